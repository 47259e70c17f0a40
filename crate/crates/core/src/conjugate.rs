//! n-fold conjugated approximants A_{n,t} = outerⁿ ∘ P_{N,t} ∘ innerⁿ.
//!
//! Conjugation pushes evaluation of the truncated series toward the fixed
//! point, where it is accurate. The inner pass must contract: the rule is
//! to act first with the function smaller in magnitude than the identity.

use crate::error::{Error, Result, Stage};
use crate::maps::MapSpec;
use crate::solver::{solve_flow_exact, solve_flow_numeric, FlowSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// A = map^{-n} ∘ P ∘ map^{n} (sine pattern: forward first).
    InnerForward,
    /// A = map^{n} ∘ P ∘ map^{-n} (moebius/logistic pattern: inverse first).
    InnerInverse,
}

/// Contraction-direction rule: |a1| > 1 wants the inverse first, |a1| < 1
/// the forward map; parabolic maps are probed at x, with ties going to
/// InnerForward.
pub fn choose_direction(map: &MapSpec, x: f64) -> Direction {
    let a1 = map.multiplier();
    if a1.abs() > 1.0 {
        return Direction::InnerInverse;
    }
    if a1.abs() < 1.0 {
        return Direction::InnerForward;
    }
    match map.forward(x) {
        Ok(fx) if fx.abs() <= x.abs() => Direction::InnerForward,
        Ok(_) => Direction::InnerInverse,
        // A forward evaluation that blows up is certainly not contracting.
        Err(_) => Direction::InnerInverse,
    }
}

/// Conjugate an arbitrary mid-stage evaluator: innerⁿ, then `mid`, then
/// outerⁿ, with per-stage domain reporting. This is the engine behind
/// [`ConjugatedApproximant::eval`]; tests also drive it with closed-form
/// flows in place of the series.
pub fn conjugate_with(
    map: &MapSpec,
    n: u32,
    direction: Direction,
    mid: impl FnOnce(f64) -> Result<f64>,
    x: f64,
) -> Result<f64> {
    let inner_forward = matches!(direction, Direction::InnerForward);
    let mut v = x;
    for i in 1..=n {
        let next = if inner_forward {
            map.forward(v)
        } else {
            map.inverse(v)
        };
        v = next.map_err(|e| Error::ConjugationStage {
            stage: Stage::Inner(i),
            value: v,
            source: Box::new(e),
        })?;
    }
    v = mid(v).map_err(|e| Error::ConjugationStage {
        stage: Stage::Series,
        value: v,
        source: Box::new(e),
    })?;
    for i in 1..=n {
        let next = if inner_forward {
            map.inverse(v)
        } else {
            map.forward(v)
        };
        v = next.map_err(|e| Error::ConjugationStage {
            stage: Stage::Outer(i),
            value: v,
            source: Box::new(e),
        })?;
    }
    Ok(v)
}

/// (map, flow, n, direction) defining A_{n,t}.
#[derive(Debug, Clone)]
pub struct ConjugatedApproximant {
    pub map: MapSpec,
    pub flow: FlowSeries,
    pub n: u32,
    pub direction: Direction,
}

impl ConjugatedApproximant {
    pub fn new(map: MapSpec, flow: FlowSeries, n: u32, direction: Direction) -> Self {
        ConjugatedApproximant {
            map,
            flow,
            n,
            direction,
        }
    }

    /// Direction chosen by the contraction rule probed at x.
    pub fn auto(map: MapSpec, flow: FlowSeries, n: u32, probe_x: f64) -> Self {
        let direction = choose_direction(&map, probe_x);
        Self::new(map, flow, n, direction)
    }

    /// Evaluate A_{n,t}(x). Exact flows are evaluated at this t; numeric
    /// flows must already carry it.
    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        let series = self.flow.series_at(t)?;
        conjugate_with(
            &self.map,
            self.n,
            self.direction,
            |v| series.eval_finite(v),
            x,
        )
    }
}

/// Solve a flow suited to this map at fractional parameter tau: exact
/// polynomial mode for parabolic maps (reusable across tau), numeric mode
/// at this tau for hyperbolic ones.
pub fn flow_for(map: &MapSpec, order: usize, tau: f64) -> Result<FlowSeries> {
    if map.multiplier() == 1.0 {
        solve_flow_exact(&map.series(order)?, order)
    } else {
        solve_flow_numeric(&map.series_f64(order)?, tau, order)
    }
}

/// Splits t into an integer part and tau in [0,1).
pub fn split_t(t: f64) -> (i64, f64) {
    let k = t.floor();
    (k as i64, t - k)
}

/// Continuous iterate at arbitrary t: reduce to tau in [0,1), evaluate the
/// conjugated approximant there, then walk the integer part with the map
/// itself: x_t = x_k ∘ A_{n,tau}.
pub fn iterate_eval(map: &MapSpec, t: f64, x: f64, order: usize, depth: u32) -> Result<f64> {
    let (k, tau) = split_t(t);
    let y = if tau == 0.0 {
        x
    } else {
        let flow = flow_for(map, order, tau)?;
        ConjugatedApproximant::auto(map.clone(), flow, depth, x).eval(tau, x)?
    };
    map.apply_n(k, y)
}

/// Same reduction, but reusing an already solved flow (exact mode only,
/// since tau varies with t).
pub fn iterate_eval_with_flow(
    map: &MapSpec,
    flow: &FlowSeries,
    t: f64,
    x: f64,
    depth: u32,
) -> Result<f64> {
    let (k, tau) = split_t(t);
    let y = if tau == 0.0 {
        x
    } else {
        ConjugatedApproximant::auto(map.clone(), flow.clone(), depth, x).eval(tau, x)?
    };
    map.apply_n(k, y)
}
