//! Schröder conjugacies.
//!
//! Hyperbolic fixed points get the Koenigs series ψ with ψ∘f = a1·ψ and
//! ψ'(0) = 1, solved order by order (exact in rational mode). Parabolic
//! fixed points get the structured essential-singularity expansion
//! Ψ(x) = x^ρ exp(Σ p_k x^k) obtained by integrating 1/v(x) termwise,
//! where v is the flow's velocity series. Either form turns the flow into
//! pure rescaling: Ψ∘x_t = κ^t Ψ with κ = a1 (hyperbolic) or κ = e
//! (parabolic, one unit step per factor of e).

use crate::coeff::{Coeff, Rat};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::series::TruncatedSeries;
use crate::solver::{known_power_table, MapSeries};
use std::collections::BTreeMap;

/// Koenigs linearization: ψ∘f = a1·ψ, normalized by b_1 = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct KoenigsSeries<C> {
    multiplier: C,
    /// b_1..b_N with b_1 = 1.
    coeffs: Vec<C>,
}

impl<C: Coeff> KoenigsSeries<C> {
    pub fn multiplier(&self) -> &C {
        &self.multiplier
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn psi_series(&self) -> TruncatedSeries<C> {
        TruncatedSeries::new(self.coeffs.clone()).expect("non-empty by construction")
    }
}

impl KoenigsSeries<Rat> {
    pub fn to_f64(&self) -> KoenigsSeries<f64> {
        KoenigsSeries {
            multiplier: self.multiplier.approx(),
            coeffs: self.coeffs.iter().map(|c| c.approx()).collect(),
        }
    }
}

impl KoenigsSeries<f64> {
    pub fn eval(&self, x: f64) -> f64 {
        self.psi_series().eval(&x)
    }
}

/// Solve ψ(f(x)) = a1 ψ(x) order by order. Map coefficients beyond the
/// stored order count as zero (the Koenigs series of the truncated
/// polynomial map).
pub fn koenigs_series<C: Coeff>(map: &MapSeries<C>, order: usize) -> Result<KoenigsSeries<C>> {
    let a = map.multiplier().clone();
    if a.is_one() {
        return Err(Error::ExpectedHyperbolic);
    }
    if a.approx() <= 0.0 {
        return Err(Error::UnsupportedMultiplier(a.approx()));
    }
    if order == 0 {
        return Err(Error::EmptySeries);
    }
    let mut f = vec![C::zero(); order + 1];
    for (k, slot) in f.iter_mut().enumerate().skip(1) {
        *slot = map.coeff(k);
    }
    let w = known_power_table(&f, order.saturating_sub(1).max(1), order);

    let mut b = vec![C::zero(); order + 1];
    b[1] = C::one();
    let mut a_pow = a.clone();
    for k in 2..=order {
        a_pow = a_pow.mul(&a);
        let mut s = C::zero();
        for j in 1..k {
            if b[j].is_zero() || w[j][k].is_zero() {
                continue;
            }
            s = s.add(&b[j].mul(&w[j][k]));
        }
        let pivot = a.sub(&a_pow);
        if pivot.approx().abs() < 1e-12 * a.approx().abs().max(a_pow.approx().abs()) {
            return Err(Error::Resonance {
                order: k,
                pivot: pivot.approx(),
            });
        }
        b[k] = s.mul(&pivot.inv().expect("nonzero pivot"));
    }
    Ok(KoenigsSeries {
        multiplier: a,
        coeffs: b[1..].to_vec(),
    })
}

/// Flow generator from a Koenigs series: v = ln(a1) ψ/ψ'.
pub fn koenigs_velocity(psi: &KoenigsSeries<f64>, order: usize) -> Result<TruncatedSeries<f64>> {
    if order == 0 || order > psi.order() {
        return Err(Error::BadTruncation {
            requested: order,
            order: psi.order(),
        });
    }
    let b = &psi.coeffs;
    // ψ/x and ψ' share the constant term b_1 = 1, so the quotient is a
    // unit series; v = ln(a1) x (ψ/x)/ψ'.
    let num: Vec<f64> = (0..order).map(|i| b[i]).collect();
    let den: Vec<f64> = (0..order).map(|i| (i as f64 + 1.0) * b[i]).collect();
    let q = unit_div(&num, &den, order)?;
    let ln_a = psi.multiplier.ln();
    TruncatedSeries::new(q.into_iter().map(|c| ln_a * c).collect())
}

/// Quotient of two unit series (nonzero constant terms), dense in x^0..
fn unit_div<C: Coeff>(num: &[C], den: &[C], len: usize) -> Result<Vec<C>> {
    let d0_inv = den[0].inv().ok_or(Error::DegenerateMap)?;
    let mut q = vec![C::zero(); len];
    for r in 0..len {
        let mut acc = num.get(r).cloned().unwrap_or_else(C::zero);
        for (s, qs) in q.iter().enumerate().take(r) {
            if qs.is_zero() {
                continue;
            }
            if let Some(d) = den.get(r - s) {
                if !d.is_zero() {
                    acc = acc.sub(&qs.mul(d));
                }
            }
        }
        q[r] = acc.mul(&d0_inv);
    }
    Ok(q)
}

/// Structured expansion Ψ(x) = x^ρ exp(Σ_k p_k x^k) as x→0, k ranging over
/// a finite window of nonzero integers (p_0 = 0 by normalization).
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicPsi {
    rho: Rat,
    terms: BTreeMap<i64, Rat>,
}

impl ParabolicPsi {
    pub fn rho(&self) -> &Rat {
        &self.rho
    }

    /// Exponent coefficient p_k (zero when absent).
    pub fn term(&self, k: i64) -> Rat {
        self.terms.get(&k).cloned().unwrap_or_else(<Rat as Coeff>::zero)
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rat> {
        &self.terms
    }

    /// Evaluate the asymptotic form at x > 0.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::SingularPoint(x));
        }
        let mut expo = 0.0;
        for (&k, p) in &self.terms {
            expo += p.approx() * x.powi(k as i32);
        }
        let v = x.powf(self.rho.approx()) * expo.exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("psi evaluation"))
        }
    }
}

/// Build the parabolic Ψ from a velocity series with leading term a_m x^m,
/// m >= 2: write 1/v as a Laurent series and integrate termwise. The
/// x^{-1} term integrates to ρ ln x; everything else to p_k x^k / k.
pub fn parabolic_psi(v: &TruncatedSeries<Rat>) -> Result<ParabolicPsi> {
    let n = v.order();
    let m = (1..=n)
        .find(|&k| !v.coeff(k).is_zero())
        .ok_or(Error::BadVelocity)?;
    if m < 2 {
        return Err(Error::BadVelocity);
    }
    if n < 2 * m - 1 {
        // Too short to reach the ln x term of the integral.
        return Err(Error::BadTruncation {
            requested: 2 * m - 1,
            order: n,
        });
    }
    let vm = v.coeff(m).clone();
    let vm_inv = vm.inv().expect("leading velocity coefficient nonzero");
    // v = v_m x^m (1 + u), u = sum_{i>=1} (v_{m+i}/v_m) x^i.
    let len = n - m + 1;
    let mut u = vec![<Rat as Coeff>::zero(); len];
    u[0] = <Rat as Coeff>::one();
    for (i, slot) in u.iter_mut().enumerate().skip(1) {
        *slot = v.coeff(m + i).mul(&vm_inv);
    }
    let one_vec = {
        let mut o = vec![<Rat as Coeff>::zero(); len];
        o[0] = <Rat as Coeff>::one();
        o
    };
    let inv_u = unit_div(&one_vec, &u, len)?;

    let mut rho = <Rat as Coeff>::zero();
    let mut terms = BTreeMap::new();
    for (i, q) in inv_u.iter().enumerate() {
        let q = q.mul(&vm_inv); // coefficient of x^{i-m} in 1/v
        if Coeff::is_zero(&q) {
            continue;
        }
        let j = i as i64 - m as i64;
        if j == -1 {
            rho = q;
        } else {
            let k = j + 1;
            terms.insert(k, q.mul(&<Rat as Coeff>::from_i64(k).inv().unwrap()));
        }
    }
    Ok(ParabolicPsi { rho, terms })
}

/// Ψ(f^s(x)) / (e^s Ψ(x)) - 1 for a parabolic expansion; zero when Ψ
/// exactly conjugates the map to rescaling by e per unit step.
pub fn psi_residual_parabolic(
    map: &MapSpec,
    psi: &ParabolicPsi,
    x: f64,
    steps: u32,
) -> Result<f64> {
    let fx = map.apply_n(steps as i64, x)?;
    let num = psi.eval(fx)?;
    let den = (steps as f64).exp() * psi.eval(x)?;
    Ok(num / den - 1.0)
}

/// ψ(f^s(x)) / (a1^s ψ(x)) - 1 for a Koenigs series.
pub fn psi_residual_koenigs(
    map: &MapSpec,
    psi: &KoenigsSeries<f64>,
    x: f64,
    steps: u32,
) -> Result<f64> {
    let fx = map.apply_n(steps as i64, x)?;
    let num = psi.eval(fx);
    let den = psi.multiplier.powi(steps as i32) * psi.eval(x);
    if den == 0.0 {
        return Err(Error::DegeneratePoint { x, t: 0.0 });
    }
    Ok(num / den - 1.0)
}

/// Flow reconstruction x_t(x) = ψ^{-1}(a1^t ψ(x)): series reversion for
/// the initial guess, then safeguarded Newton on ψ(y) = target. Results
/// outside the series' own convergence window (estimated from the last
/// coefficient) are rejected rather than trusted.
pub fn flow_from_koenigs(psi: &KoenigsSeries<f64>, t: f64, x: f64) -> Result<f64> {
    let target = psi.multiplier.powf(t) * psi.eval(x);
    let series = psi.psi_series();
    let guess = series.revert()?.eval(&target);
    let y = refine_psi_inverse(&series, target, guess)?;
    let window = (1..=psi.order())
        .rev()
        .find(|&k| psi.coeffs[k - 1] != 0.0)
        .map(|k| psi.coeffs[k - 1].abs().powf(-1.0 / k as f64))
        .unwrap_or(f64::INFINITY);
    if y.abs() > window {
        return Err(Error::WindowError(target));
    }
    Ok(y)
}

/// Pure-reversion variant (no refinement); exposed for testing the
/// reversion path on its own.
pub fn flow_from_koenigs_series(psi: &KoenigsSeries<f64>, t: f64, x: f64) -> Result<f64> {
    let target = psi.multiplier.powf(t) * psi.eval(x);
    Ok(psi.psi_series().revert()?.eval(&target))
}

fn refine_psi_inverse(series: &TruncatedSeries<f64>, target: f64, guess: f64) -> Result<f64> {
    let n = series.order();
    let deriv = |y: f64| -> f64 {
        let mut acc = 0.0;
        for k in (1..=n).rev() {
            acc = acc * y + k as f64 * series.coeff(k);
        }
        acc
    };
    let mut y = if guess.is_finite() { guess } else { 0.0 };
    for _ in 0..60 {
        let f = series.eval(&y) - target;
        if f == 0.0 {
            return Ok(y);
        }
        let d = deriv(y);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = f / d;
        y -= step;
        if !y.is_finite() {
            break;
        }
        if step.abs() <= 1e-16 * y.abs().max(1e-300) {
            return Ok(y);
        }
    }
    if y.is_finite() && (series.eval(&y) - target).abs() <= 1e-12 * target.abs().max(1e-300) {
        return Ok(y);
    }
    // Bisection fallback on an expanding bracket from the origin.
    let side = if target >= 0.0 { 1.0 } else { -1.0 };
    let mut hi = guess.abs().max(1e-6);
    let mut found = false;
    for _ in 0..80 {
        if (series.eval(&(side * hi)) - target).signum() != (-target).signum() {
            found = true;
            break;
        }
        hi *= 2.0;
        if hi > 1e6 {
            break;
        }
    }
    if !found {
        return Err(Error::WindowError(target));
    }
    let (mut lo, mut hi) = (0.0f64, side * hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = series.eval(&mid) - target;
        if f == 0.0 || (hi - lo).abs() <= 1e-16 * mid.abs().max(1e-300) {
            return Ok(mid);
        }
        if f.signum() == (series.eval(&lo) - target).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
