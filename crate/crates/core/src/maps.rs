//! Built-in maps with numerically careful evaluators, plus user maps.
//!
//! Every catalog entry fixes the origin. Inverses are principal branches
//! through 0; closed-form flows are provided where they exist and are
//! evaluated in cancellation-safe form (log1p/expm1 powering), which is
//! what keeps relative errors meaningful at the 1e-12 level.

use crate::coeff::{rat_from_f64, Coeff, Rat};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::solver::MapSeries;
use std::fmt;
use std::sync::Arc;

/// A catalog entry: forward/inverse evaluators, exact series coefficients,
/// and optional closed-form flow and Schröder function.
#[derive(Clone)]
pub struct MapSpec {
    name: String,
    kind: MapKind,
    domain: (f64, f64),
}

#[derive(Clone)]
enum MapKind {
    Moebius,
    Sine,
    Logistic { lambda: f64 },
    User(Arc<UserMap>),
}

struct UserMap {
    forward: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    series: Vec<Rat>,
    /// Reverted series used as the inverse's initial guess.
    inverse_guess: TruncatedSeries<f64>,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSpec").field("name", &self.name).finish()
    }
}

/// Closed-form Schröder data attached to a catalog entry.
#[derive(Clone)]
pub struct ClosedSchroeder {
    pub formula: &'static str,
    /// Eigenvalue per unit step: e for parabolic entries, a1 for hyperbolic.
    pub kappa: f64,
    psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ClosedSchroeder {
    pub fn eval(&self, x: f64) -> f64 {
        (self.psi)(x)
    }
}

/// Look up a built-in map. `lambda` is required for `logistic` (0 < λ ≤ 4)
/// and rejected for the others.
pub fn catalog_get(name: &str, lambda: Option<f64>) -> Result<MapSpec> {
    match name {
        "moebius" | "sine" => {
            if lambda.is_some() {
                return Err(Error::LambdaNotApplicable(name.to_string()));
            }
            Ok(match name {
                "moebius" => MapSpec {
                    name: name.into(),
                    kind: MapKind::Moebius,
                    domain: (0.0, 0.45),
                },
                _ => MapSpec {
                    name: name.into(),
                    kind: MapKind::Sine,
                    domain: (-1.55, 1.55),
                },
            })
        }
        "logistic" => {
            let lambda = lambda.ok_or(Error::MissingLambda)?;
            if !(lambda > 0.0 && lambda <= 4.0) {
                return Err(Error::LambdaOutOfRange(lambda));
            }
            // Domain stops short of the critical point 1/2, where the
            // inverse branch amplifies rounding unboundedly.
            Ok(MapSpec {
                name: format!("logistic({lambda})"),
                kind: MapKind::Logistic { lambda },
                domain: (0.0, 0.49),
            })
        }
        other => Err(Error::UnknownMap(other.to_string())),
    }
}

/// A user-supplied map: forward evaluator plus exact series coefficients.
/// The inverse is series reversion refined by safeguarded root finding.
pub fn user_map(
    name: &str,
    forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
    series: Vec<Rat>,
    domain: (f64, f64),
) -> Result<MapSpec> {
    let map_series = MapSeries::new(series.clone())?;
    let inverse_guess = map_series.to_f64().to_series().revert()?;
    Ok(MapSpec {
        name: name.into(),
        kind: MapKind::User(Arc::new(UserMap {
            forward: Box::new(forward),
            series,
            inverse_guess,
        })),
        domain,
    })
}

impl MapSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Recommended sampling interval around the fixed point.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Multiplier a1 = x1'(0).
    pub fn multiplier(&self) -> f64 {
        match &self.kind {
            MapKind::Moebius | MapKind::Sine => 1.0,
            MapKind::Logistic { lambda } => *lambda,
            MapKind::User(u) => u.series[0].approx(),
        }
    }

    pub fn forward(&self, x: f64) -> Result<f64> {
        let v = match &self.kind {
            MapKind::Moebius => {
                if 1.0 - x == 0.0 {
                    return Err(Error::Pole(x));
                }
                x / (1.0 - x)
            }
            MapKind::Sine => x.sin(),
            MapKind::Logistic { lambda } => lambda * x * (1.0 - x),
            MapKind::User(u) => (u.forward)(x),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("forward evaluation"))
        }
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        let v = match &self.kind {
            MapKind::Moebius => {
                if 1.0 + y == 0.0 {
                    return Err(Error::Pole(y));
                }
                y / (1.0 + y)
            }
            MapKind::Sine => {
                if y.abs() > 1.0 {
                    return Err(Error::OutsideDomain {
                        what: "arcsine argument",
                        value: y,
                    });
                }
                y.asin()
            }
            MapKind::Logistic { lambda } => {
                let u = 4.0 * y / lambda;
                if u > 1.0 {
                    return Err(Error::OutsideDomain {
                        what: "logistic inverse argument",
                        value: y,
                    });
                }
                // Branch through 0: (1 - sqrt(1-u))/2, written to avoid
                // cancellation for small y.
                u / (2.0 * (1.0 + (1.0 - u).sqrt()))
            }
            MapKind::User(u) => return user_inverse(self, u, y),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("inverse evaluation"))
        }
    }

    /// Exact series coefficients a_1..a_order.
    pub fn series(&self, order: usize) -> Result<MapSeries<Rat>> {
        let coeffs: Vec<Rat> = match &self.kind {
            MapKind::Moebius => vec![<Rat as Coeff>::one(); order],
            MapKind::Sine => {
                let mut v = Vec::with_capacity(order);
                let mut fact = <Rat as Coeff>::one();
                for k in 1..=order {
                    if k > 1 {
                        fact = fact.mul(&<Rat as Coeff>::from_i64(k as i64));
                    }
                    if k % 2 == 1 {
                        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
                        v.push(<Rat as Coeff>::from_i64(sign).mul(&fact.inv().unwrap()));
                    } else {
                        v.push(<Rat as Coeff>::zero());
                    }
                }
                v
            }
            MapKind::Logistic { lambda } => {
                let l = rat_from_f64(*lambda).ok_or(Error::NonFinite("lambda"))?;
                let mut v = vec![<Rat as Coeff>::zero(); order];
                v[0] = l.clone();
                if order >= 2 {
                    v[1] = l.neg();
                }
                v
            }
            MapKind::User(u) => {
                if u.series.len() < order {
                    return Err(Error::MapOrderTooSmall {
                        requested: order,
                        order: u.series.len(),
                    });
                }
                u.series[..order].to_vec()
            }
        };
        MapSeries::new(coeffs)
    }

    pub fn series_f64(&self, order: usize) -> Result<MapSeries<f64>> {
        Ok(self.series(order)?.to_f64())
    }

    pub fn has_exact_flow(&self) -> bool {
        match &self.kind {
            MapKind::Moebius => true,
            MapKind::Logistic { lambda } => *lambda == 2.0 || *lambda == 4.0,
            _ => false,
        }
    }

    /// Closed-form flow x_t(x) where one exists: moebius x/(1-xt);
    /// logistic λ=2 as (1 - (1-2x)^{2^t})/2 via log1p/expm1; logistic λ=4
    /// as sin²(2^t asin √x).
    pub fn exact_flow(&self, t: f64, x: f64) -> Result<f64> {
        match &self.kind {
            MapKind::Moebius => {
                let d = 1.0 - x * t;
                if d == 0.0 {
                    return Err(Error::Pole(x));
                }
                Ok(x / d)
            }
            MapKind::Logistic { lambda } if *lambda == 2.0 => {
                if x > 0.5 {
                    return Err(Error::OutsideDomain {
                        what: "logistic flow argument",
                        value: x,
                    });
                }
                // x = 1/2 maps to 1/2 for every t (log1p(-1) = -inf is the
                // correct limit), so only x > 1/2 is rejected.
                let v = -0.5 * f64::exp_m1(2f64.powf(t) * f64::ln_1p(-2.0 * x));
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite("logistic flow"))
                }
            }
            MapKind::Logistic { lambda } if *lambda == 4.0 => {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::OutsideDomain {
                        what: "logistic flow argument",
                        value: x,
                    });
                }
                let s = (2f64.powf(t) * x.sqrt().asin()).sin();
                Ok(s * s)
            }
            _ => Err(Error::NoExactFlow),
        }
    }

    /// Closed-form Schröder function where one is known.
    pub fn schroeder_closed(&self) -> Option<ClosedSchroeder> {
        match &self.kind {
            MapKind::Moebius => Some(ClosedSchroeder {
                formula: "exp(-1/x)",
                kappa: std::f64::consts::E,
                psi: Arc::new(|x: f64| (-1.0 / x).exp()),
            }),
            MapKind::Logistic { lambda } if *lambda == 2.0 => Some(ClosedSchroeder {
                formula: "-ln(1-2x)/2",
                kappa: 2.0,
                psi: Arc::new(|x: f64| -0.5 * f64::ln_1p(-2.0 * x)),
            }),
            _ => None,
        }
    }

    /// n-fold forward (n > 0) or inverse (n < 0) application; n = 0 is the
    /// identity. Domain escapes report the failing step and value.
    pub fn apply_n(&self, n: i64, x: f64) -> Result<f64> {
        let mut v = x;
        for step in 1..=n.unsigned_abs() {
            let next = if n > 0 { self.forward(v) } else { self.inverse(v) };
            v = next.map_err(|e| Error::Step {
                step: step as usize,
                value: v,
                source: Box::new(e),
            })?;
        }
        Ok(v)
    }
}

/// Safeguarded inverse for user maps: series-reversion guess, then
/// bracketed secant/bisection on forward(x) = y. Tolerance 1e-14, at most
/// 60 refinement iterations.
fn user_inverse(spec: &MapSpec, u: &UserMap, y: f64) -> Result<f64> {
    let guess = u.inverse_guess.eval(&y);
    let fwd = |x: f64| -> Option<f64> { spec.forward(x).ok().map(|v| v - y) };

    let g0 = fwd(guess).ok_or(Error::InverseRefinement(y))?;
    if g0 == 0.0 {
        return Ok(guess);
    }
    // Expand a bracket around the guess.
    let mut step = (guess.abs() + y.abs()).max(1e-3) * 0.125;
    let mut bracket = None;
    for _ in 0..60 {
        let below = guess - step;
        let above = guess + step;
        if let Some(f) = fwd(below) {
            if f.signum() != g0.signum() {
                bracket = Some((below, guess, f, g0));
                break;
            }
        }
        if let Some(f) = fwd(above) {
            if f.signum() != g0.signum() {
                bracket = Some((guess, above, g0, f));
                break;
            }
        }
        step *= 2.0;
    }
    let (mut lo, mut hi, mut flo, mut fhi) = match bracket {
        Some(b) => b,
        None => return Err(Error::InverseRefinement(y)),
    };
    let mut x = guess;
    for _ in 0..60 {
        // Secant step, falling back to bisection when it leaves the bracket.
        let mut candidate = if fhi != flo {
            hi - fhi * (hi - lo) / (fhi - flo)
        } else {
            0.5 * (lo + hi)
        };
        if !(candidate > lo && candidate < hi) {
            candidate = 0.5 * (lo + hi);
        }
        let f = fwd(candidate).ok_or(Error::InverseRefinement(y))?;
        x = candidate;
        if f == 0.0 || (hi - lo).abs() <= 1e-14 * x.abs().max(1.0) {
            return Ok(x);
        }
        if f.signum() == flo.signum() {
            lo = candidate;
            flo = f;
        } else {
            hi = candidate;
            fhi = f;
        }
    }
    Ok(x)
}
