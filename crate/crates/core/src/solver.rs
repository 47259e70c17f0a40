//! Order-by-order solution of the unit-step equation x1∘xt = xt∘x1.
//!
//! Writing P for the truncated flow series and expanding both sides in x,
//! the coefficient of x^R is linear in exactly one new unknown:
//!
//! * hyperbolic maps (multiplier a1 > 0, a1 != 1): the order-R equation
//!   determines c_R with pivot a1 - a1^R, after fixing c_1 = a1^t;
//! * parabolic maps (a1 = 1, first nonlinear coefficient a_m): same-order
//!   unknowns cancel, and the order-(K+m-1) equation determines c_K with
//!   pivot a_m (m - K). The pivot vanishes at K = m — that is the
//!   normalization freedom, fixed here as c_m(t) = a_m t.
//!
//! Both solvers share one engine that maintains triangular tables of the
//! powers of the growing series P and of the known map series, filling
//! each entry exactly once.

use crate::coeff::{rat_is_positive, Coeff, Rat};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::tpoly::TPoly;

/// Coefficients a_1..a_N of the unit-step map expanded around its fixed
/// point at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSeries<C> {
    coeffs: Vec<C>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapClass {
    Parabolic,
    Hyperbolic,
}

impl<C: Coeff> MapSeries<C> {
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if coeffs[0].is_zero() {
            return Err(Error::DegenerateMap);
        }
        Ok(MapSeries { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn multiplier(&self) -> &C {
        &self.coeffs[0]
    }

    /// Coefficient of x^k, 1-based; zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k - 1).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Smallest k > 1 with a_k != 0.
    pub fn first_nonlinear_index(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, c)| !c.is_zero())
            .map(|(i, _)| i + 1)
    }

    pub fn is_parabolic(&self) -> bool {
        self.multiplier().is_one()
    }

    /// Parabolic iff a1 = 1, hyperbolic iff a1 > 0 and a1 != 1; any other
    /// multiplier has no real flow a1^t and is rejected.
    pub fn classify(&self) -> Result<MapClass> {
        if self.is_parabolic() {
            Ok(MapClass::Parabolic)
        } else if self.multiplier().approx() > 0.0 {
            Ok(MapClass::Hyperbolic)
        } else {
            Err(Error::UnsupportedMultiplier(self.multiplier().approx()))
        }
    }

    pub fn to_series(&self) -> TruncatedSeries<C> {
        TruncatedSeries::new(self.coeffs.clone()).expect("non-empty by construction")
    }
}

impl MapSeries<Rat> {
    pub fn to_f64(&self) -> MapSeries<f64> {
        MapSeries {
            coeffs: self.coeffs.iter().map(|c| c.approx()).collect(),
        }
    }

    fn classify_exact(&self) -> Result<MapClass> {
        if self.is_parabolic() {
            Ok(MapClass::Parabolic)
        } else if rat_is_positive(self.multiplier()) {
            Ok(MapClass::Hyperbolic)
        } else {
            Err(Error::UnsupportedMultiplier(self.multiplier().approx()))
        }
    }
}

/// The solved iterate x_t through a finite order: per-order coefficients
/// either polynomials in t (parabolic maps, exact rationals) or numbers at
/// one fixed t.
#[derive(Debug, Clone)]
pub enum FlowSeries {
    Exact {
        map: MapSeries<Rat>,
        /// c_k(t) for k = 1..=order; c_1 = 1 and c_k(0) = 0 for k > 1.
        coeffs: Vec<TPoly>,
        /// First nonlinear index m of the map; c_m(t) = a_m t.
        scale_index: usize,
    },
    Numeric {
        map: MapSeries<f64>,
        t: f64,
        coeffs: Vec<f64>,
    },
}

impl FlowSeries {
    pub fn order(&self) -> usize {
        match self {
            FlowSeries::Exact { coeffs, .. } => coeffs.len(),
            FlowSeries::Numeric { coeffs, .. } => coeffs.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, FlowSeries::Exact { .. })
    }

    pub fn scale_index(&self) -> Option<usize> {
        match self {
            FlowSeries::Exact { scale_index, .. } => Some(*scale_index),
            FlowSeries::Numeric { .. } => None,
        }
    }

    pub fn exact_coeffs(&self) -> Option<&[TPoly]> {
        match self {
            FlowSeries::Exact { coeffs, .. } => Some(coeffs),
            FlowSeries::Numeric { .. } => None,
        }
    }

    pub fn map_multiplier(&self) -> f64 {
        match self {
            FlowSeries::Exact { map, .. } => map.multiplier().approx(),
            FlowSeries::Numeric { map, .. } => *map.multiplier(),
        }
    }

    /// Numeric coefficient series at parameter t. Exact flows evaluate
    /// their polynomials; numeric flows must already carry this t.
    pub fn series_at(&self, t: f64) -> Result<TruncatedSeries<f64>> {
        match self {
            FlowSeries::Exact { coeffs, .. } => {
                TruncatedSeries::new(coeffs.iter().map(|c| c.eval_f64(t)).collect())
            }
            FlowSeries::Numeric { t: t0, coeffs, .. } => {
                if *t0 != t {
                    return Err(Error::FlowModeMismatch {
                        expected: *t0,
                        got: t,
                    });
                }
                TruncatedSeries::new(coeffs.clone())
            }
        }
    }

    /// Exact coefficient series at a rational t (exact mode only).
    pub fn series_at_rat(&self, t: &Rat) -> Result<TruncatedSeries<Rat>> {
        match self {
            FlowSeries::Exact { coeffs, .. } => {
                TruncatedSeries::new(coeffs.iter().map(|c| c.eval(t)).collect())
            }
            FlowSeries::Numeric { .. } => Err(Error::ExactModeOnly),
        }
    }

    #[cfg(test)]
    pub(crate) fn exact_from_parts(
        map: MapSeries<Rat>,
        coeffs: Vec<TPoly>,
        scale_index: usize,
    ) -> Self {
        FlowSeries::Exact {
            map,
            coeffs,
            scale_index,
        }
    }
}

/// Solve the unit-step equation for a parabolic rational map, producing
/// polynomial-in-t coefficients that satisfy it identically through the
/// requested order. Map coefficients beyond the stored order are treated
/// as zero, i.e. this is the flow of the truncated polynomial map.
pub fn solve_flow_exact(map: &MapSeries<Rat>, order: usize) -> Result<FlowSeries> {
    if order == 0 {
        return Err(Error::EmptySeries);
    }
    match map.classify_exact()? {
        MapClass::Parabolic => {}
        MapClass::Hyperbolic => {
            return Err(Error::NotParabolic {
                multiplier: map.multiplier().approx(),
            })
        }
    }
    if map.order() < order {
        return Err(Error::MapOrderTooSmall {
            requested: order,
            order: map.order(),
        });
    }
    let m = map.first_nonlinear_index().ok_or(Error::IdentityMap)?;
    let a: Vec<TPoly> = map.coeffs.iter().map(|c| TPoly::constant(c.clone())).collect();
    let c_m = TPoly::linear(map.coeff(m));
    let coeffs = solve_parabolic(&a, m, c_m, order)?;
    Ok(FlowSeries::Exact {
        map: map.clone(),
        coeffs,
        scale_index: m,
    })
}

/// Solve the unit-step equation at one fixed t. Parabolic maps (a1 = 1)
/// run the exact recursion specialized to this t; hyperbolic maps set
/// c_1 = a1^t and solve each order from its linear pivot.
pub fn solve_flow_numeric(map: &MapSeries<f64>, t: f64, order: usize) -> Result<FlowSeries> {
    if order == 0 {
        return Err(Error::EmptySeries);
    }
    if map.order() < order {
        return Err(Error::MapOrderTooSmall {
            requested: order,
            order: map.order(),
        });
    }
    let a1 = *map.multiplier();
    let coeffs = if a1 == 1.0 {
        let m = map.first_nonlinear_index().ok_or(Error::IdentityMap)?;
        solve_parabolic(&map.coeffs, m, map.coeff(m) * t, order)?
    } else if a1 > 0.0 {
        solve_hyperbolic(&map.coeffs, t, order)?
    } else {
        return Err(Error::UnsupportedMultiplier(a1));
    };
    Ok(FlowSeries::Numeric {
        map: map.clone(),
        t,
        coeffs,
    })
}

/// Flow generator v(x) = d/dt x_t(x) at t = 0, from an exact flow.
/// Hyperbolic velocities come from the Koenigs construction instead.
pub fn velocity_series(flow: &FlowSeries) -> Result<TruncatedSeries<Rat>> {
    match flow {
        FlowSeries::Exact { coeffs, .. } => {
            TruncatedSeries::new(coeffs.iter().map(|c| c.linear_coeff()).collect())
        }
        FlowSeries::Numeric { .. } => Err(Error::ExactModeOnly),
    }
}

/// Residual of the unit-step equation for a solved flow.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitStepReport {
    /// Exact mode: order checked and the first order (if any) whose
    /// residual polynomial is nonzero.
    Exact {
        order: usize,
        first_nonzero: Option<usize>,
    },
    /// Numeric mode: max |residual coefficient| through the order.
    Numeric { order: usize, max_abs: f64 },
}

/// Compute x1∘xt − xt∘x1 through the flow's order.
pub fn verify_unit_step(flow: &FlowSeries) -> Result<UnitStepReport> {
    match flow {
        FlowSeries::Exact { map, coeffs, .. } => {
            let n = coeffs.len();
            let p = TruncatedSeries::new(coeffs.clone())?;
            let f: TruncatedSeries<TPoly> = TruncatedSeries::new(
                (1..=n).map(|k| TPoly::constant(map.coeff(k))).collect(),
            )?;
            let diff = f.compose(&p)?.sub(&p.compose(&f)?)?;
            let first_nonzero = (1..=n).find(|&k| !diff.coeff(k).is_zero());
            Ok(UnitStepReport::Exact {
                order: n,
                first_nonzero,
            })
        }
        FlowSeries::Numeric { map, coeffs, .. } => {
            let n = coeffs.len();
            let p = TruncatedSeries::new(coeffs.clone())?;
            let f = TruncatedSeries::new((1..=n).map(|k| map.coeff(k)).collect())?;
            let diff = f.compose(&p)?.sub(&p.compose(&f)?)?;
            let max_abs = diff.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
            Ok(UnitStepReport::Numeric { order: n, max_abs })
        }
    }
}

/// Triangular table of the coefficients of powers of a series. Rows are
/// powers, columns are x-orders; only rows in the chain closure of the
/// requested powers are materialized (row j is built from rows j-2 and 2,
/// so sparse odd maps never touch their even powers).
struct PowerTable<C> {
    rows: Vec<Option<Vec<C>>>,
    filled: Vec<usize>,
    r_max: usize,
}

impl<C: Coeff> PowerTable<C> {
    /// `wanted` lists the powers j >= 2 whose coefficients will be read;
    /// powers beyond r_max contribute nothing and are dropped.
    fn new(wanted: impl Iterator<Item = usize>, r_max: usize) -> Self {
        let mut present = vec![false; r_max + 1];
        for j in wanted {
            if j < 2 || j > r_max {
                continue;
            }
            let mut jj = j;
            while jj >= 2 {
                present[jj] = true;
                jj = if jj > 3 { jj - 2 } else { 2 };
                if jj == 2 {
                    present[2] = true;
                    break;
                }
            }
        }
        let rows = present
            .iter()
            .map(|&p| if p { Some(vec![C::zero(); r_max + 1]) } else { None })
            .collect::<Vec<_>>();
        let filled = (0..=r_max).map(|j| j.saturating_sub(1)).collect();
        PowerTable {
            rows,
            filled,
            r_max,
        }
    }

    fn present_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_some())
            .map(|(j, _)| j)
    }

    fn entry(&self, j: usize, r: usize) -> &C {
        debug_assert!(self.filled[j] >= r, "row {j} not filled through {r}");
        &self.rows[j].as_ref().expect("row not materialized")[r]
    }

    /// One new column value for row j: row j = row (j-2) * row 2, with
    /// row 1 being the base series itself.
    fn column_value(&self, base: &[C], j: usize, r: usize) -> C {
        let mut acc = C::zero();
        if j == 2 {
            for s in 1..r {
                let a = &base[s];
                if a.is_zero() {
                    continue;
                }
                let b = &base[r - s];
                if b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
        } else if j == 3 {
            let row2 = self.rows[2].as_ref().expect("row 2 absent");
            for s in 1..=r.saturating_sub(2) {
                let a = &base[s];
                if a.is_zero() {
                    continue;
                }
                let b = &row2[r - s];
                if b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
        } else {
            let lo = self.rows[j - 2].as_ref().expect("chain row absent");
            let row2 = self.rows[2].as_ref().expect("row 2 absent");
            for s in (j - 2)..=r.saturating_sub(2) {
                let a = &lo[s];
                if a.is_zero() {
                    continue;
                }
                let b = &row2[r - s];
                if b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
        }
        acc
    }

    /// Extend row j with final values through `target`.
    fn fill_row(&mut self, base: &[C], j: usize, target: usize) {
        let target = target.min(self.r_max);
        while self.filled[j] < target {
            let r = self.filled[j] + 1;
            let v = self.column_value(base, j, r);
            self.rows[j].as_mut().unwrap()[r] = v;
            self.filled[j] = r;
        }
    }

    fn add_at(&mut self, j: usize, r: usize, delta: &C) {
        let slot = &mut self.rows[j].as_mut().unwrap()[r];
        *slot = slot.add(delta);
    }
}

/// Dense powers of a fully known series: rows k = 1..=k_max through x^r_max.
pub(crate) fn known_power_table<C: Coeff>(s: &[C], k_max: usize, r_max: usize) -> Vec<Vec<C>> {
    // s is dense, s[r] = coefficient of x^r, s[0] = 0.
    let mut rows: Vec<Vec<C>> = Vec::with_capacity(k_max + 1);
    rows.push(vec![C::zero(); r_max + 1]); // unused row 0
    rows.push(s.to_vec());
    for k in 2..=k_max {
        let mut row = vec![C::zero(); r_max + 1];
        for r in k..=r_max {
            let mut acc = C::zero();
            for s_idx in (k - 1)..r {
                let a = &rows[k - 1][s_idx];
                if a.is_zero() {
                    continue;
                }
                let b = &s[r - s_idx];
                if b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            row[r] = acc;
        }
        rows.push(row);
    }
    rows
}

/// Shared parabolic engine: a1 = 1, first nonlinear index m, normalization
/// c_m supplied by the caller (a_m t as a polynomial, or its value at a
/// fixed t). Returns c_1..=c_n.
///
/// The unknown c_K first enters the residual at order R = K+m-1, linearly
/// with pivot a_m(m-K); the tentative diagonal entries of P^j at column
/// K+j-1 (j = 2..=m) are computed with c_K = 0 and patched by +j*c_K once
/// c_K is known.
fn solve_parabolic<C: Coeff>(a: &[C], m: usize, c_m: C, n: usize) -> Result<Vec<C>> {
    let r_max = n + m - 1;
    let a_at = |j: usize| -> C {
        if j >= 1 && j <= a.len() {
            a[j - 1].clone()
        } else {
            C::zero()
        }
    };

    // Dense map series through r_max (zeros beyond the stored order).
    let mut f = vec![C::zero(); r_max + 1];
    for (j, c) in a.iter().enumerate().take(r_max) {
        f[j + 1] = c.clone();
    }
    // Powers of the map, needed for the right-hand sums: rows 1..=n-1.
    let w = known_power_table(&f, n.saturating_sub(1).max(1), r_max);

    // Powers of the growing flow series.
    let wanted = (m..=r_max).filter(|&j| j >= 2 && !a_at(j).is_zero());
    let mut pow = PowerTable::<C>::new(wanted.chain(2..=m.max(2)), r_max);

    let mut p = vec![C::zero(); r_max + 1];
    p[1] = C::one();
    let mut c = vec![C::zero(); n + 1];
    c[1] = C::one();

    for big_k in 2..=n {
        let r = big_k + m - 1;
        // Final entries first, then the tentative diagonal (ascending j so
        // each diagonal sees the lower ones already stored).
        let rows: Vec<usize> = pow.present_rows().collect();
        for &j in &rows {
            pow.fill_row(&p, j, big_k + j - 2);
        }
        for &j in &rows {
            if j <= m && big_k + j - 1 <= r_max {
                pow.fill_row(&p, j, big_k + j - 1);
            }
        }

        let mut d0 = C::zero();
        for j in m..=r.min(a.len()) {
            let aj = a_at(j);
            if aj.is_zero() {
                continue;
            }
            d0 = d0.add(&aj.mul(pow.entry(j, r)));
        }
        for k in 1..big_k {
            if c[k].is_zero() {
                continue;
            }
            let wk = &w[k][r];
            if wk.is_zero() {
                continue;
            }
            d0 = d0.sub(&c[k].mul(wk));
        }

        let ck = if big_k == m {
            c_m.clone()
        } else {
            let pivot = a_at(m).mul(&C::from_i64(big_k as i64 - m as i64));
            let inv = pivot.inv().expect("nonzero parabolic pivot");
            d0.mul(&inv)
        };

        // Patch the diagonals that were computed with c_K = 0.
        if !ck.is_zero() {
            for &j in &rows {
                if j <= m && big_k + j - 1 <= r_max {
                    let delta = C::from_i64(j as i64).mul(&ck);
                    pow.add_at(j, big_k + j - 1, &delta);
                }
            }
        }
        p[big_k] = ck.clone();
        c[big_k] = ck;
    }
    Ok(c[1..].to_vec())
}

/// Hyperbolic engine at fixed t: c_1 = a1^t, pivot a1 - a1^K at order K.
fn solve_hyperbolic(a: &[f64], t: f64, n: usize) -> Result<Vec<f64>> {
    let a1 = a[0];
    let a_at = |j: usize| -> f64 {
        if j >= 1 && j <= a.len() {
            a[j - 1]
        } else {
            0.0
        }
    };
    let mut f = vec![0.0; n + 1];
    for (j, &c) in a.iter().enumerate().take(n) {
        f[j + 1] = c;
    }
    let w = known_power_table(&f, n.saturating_sub(1).max(1), n);

    let wanted = (2..=n).filter(|&j| a_at(j) != 0.0);
    let mut pow = PowerTable::<f64>::new(wanted.chain(std::iter::once(2)), n);

    let mut p = vec![0.0; n + 1];
    p[1] = a1.powf(t);
    let mut c = vec![0.0; n + 1];
    c[1] = p[1];

    let mut a1_pow_k = a1; // a1^K tracked across orders
    for big_k in 2..=n {
        a1_pow_k *= a1;
        let rows: Vec<usize> = pow.present_rows().collect();
        for &j in &rows {
            pow.fill_row(&p, j, big_k);
        }

        let mut d0 = 0.0;
        for j in 2..=big_k.min(a.len()) {
            let aj = a_at(j);
            if aj == 0.0 {
                continue;
            }
            d0 += aj * pow.entry(j, big_k);
        }
        for k in 1..big_k {
            if c[k] == 0.0 || w[k][big_k] == 0.0 {
                continue;
            }
            d0 -= c[k] * w[k][big_k];
        }

        let pivot = a1 - a1_pow_k;
        if pivot.abs() < 1e-12 * a1.abs().max(a1_pow_k.abs()) {
            return Err(Error::Resonance {
                order: big_k,
                pivot,
            });
        }
        let ck = d0 / (a1_pow_k - a1);
        p[big_k] = ck;
        c[big_k] = ck;
    }
    Ok(c[1..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(num: i64, den: i64) -> Rat {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    /// x/(1-x): a_k = 1 for all k.
    fn moebius_series(order: usize) -> MapSeries<Rat> {
        MapSeries::new(vec![rat(1, 1); order]).unwrap()
    }

    /// sin x: alternating inverse odd factorials.
    fn sine_series(order: usize) -> MapSeries<Rat> {
        let mut coeffs = Vec::with_capacity(order);
        let mut fact = rat(1, 1);
        for k in 1..=order {
            fact = if k == 1 { fact } else { fact * rat(k as i64, 1) };
            if k % 2 == 1 {
                let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
                coeffs.push(rat(sign, 1) / fact.clone());
            } else {
                coeffs.push(rat(0, 1));
            }
        }
        MapSeries::new(coeffs).unwrap()
    }

    fn tp(coeffs: &[(i64, i64)]) -> TPoly {
        TPoly::new(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    /// λx(1-x) padded with zeros to the requested order.
    fn logistic_map(lambda: f64, order: usize) -> MapSeries<f64> {
        let mut v = vec![0.0; order];
        v[0] = lambda;
        if order >= 2 {
            v[1] = -lambda;
        }
        MapSeries::new(v).unwrap()
    }

    #[test]
    fn moebius_flow_coefficients_are_powers_of_t() {
        let flow = solve_flow_exact(&moebius_series(5), 5).unwrap();
        let coeffs = flow.exact_coeffs().unwrap();
        for (k, c) in coeffs.iter().enumerate() {
            let mut expect = vec![rat(0, 1); k + 1];
            expect[k] = rat(1, 1);
            assert_eq!(*c, TPoly::new(expect), "c_{}", k + 1);
        }
    }

    #[test]
    fn sine_flow_matches_printed_ninth_order_coefficients() {
        let flow = solve_flow_exact(&sine_series(9), 9).unwrap();
        let c = flow.exact_coeffs().unwrap();
        assert_eq!(c[0], TPoly::constant(rat(1, 1)));
        assert!(c[1].is_zero());
        assert_eq!(c[2], tp(&[(0, 1), (-1, 6)]));
        assert!(c[3].is_zero());
        // (5t - 4) t / 5!
        assert_eq!(c[4], tp(&[(0, 1), (-4, 120), (5, 120)]));
        assert!(c[5].is_zero());
        // -(175 t^2 - 336 t + 164) t / (3 * 7!)
        assert_eq!(c[6], tp(&[(0, 1), (-164, 15120), (336, 15120), (-175, 15120)]));
        assert!(c[7].is_zero());
        // (25 t - 24)(8 - 7 t)^2 t / 9!
        let factor = tp(&[(-24, 1), (25, 1)])
            .mul(&tp(&[(8, 1), (-7, 1)]))
            .mul(&tp(&[(8, 1), (-7, 1)]))
            .mul(&tp(&[(0, 1), (1, 362880)]));
        assert_eq!(c[8], factor);
    }

    #[test]
    fn exact_flow_at_t_zero_is_identity() {
        let flow = solve_flow_exact(&sine_series(7), 7).unwrap();
        let at0 = flow.series_at_rat(&rat(0, 1)).unwrap();
        assert_eq!(at0, TruncatedSeries::identity(7).unwrap());
    }

    #[test]
    fn exact_flow_at_t_two_is_the_double_map() {
        let map = moebius_series(6);
        let flow = solve_flow_exact(&map, 6).unwrap();
        let at2 = flow.series_at_rat(&rat(2, 1)).unwrap();
        let f = map.to_series();
        assert_eq!(at2, f.compose(&f).unwrap());

        let smap = sine_series(8);
        let sflow = solve_flow_exact(&smap, 8).unwrap();
        let sat2 = sflow.series_at_rat(&rat(2, 1)).unwrap();
        let s = smap.to_series();
        assert_eq!(sat2, s.compose(&s).unwrap());
    }

    #[test]
    fn semigroup_holds_exactly_at_random_rational_pairs() {
        let flow = solve_flow_exact(&sine_series(8), 8).unwrap();
        let pairs = [
            (rat(1, 3), rat(2, 5)),
            (rat(-1, 2), rat(3, 7)),
            (rat(5, 4), rat(-2, 3)),
            (rat(1, 7), rat(1, 7)),
            (rat(9, 5), rat(-8, 3)),
        ];
        for (s, t) in pairs {
            let fs = flow.series_at_rat(&s).unwrap();
            let ft = flow.series_at_rat(&t).unwrap();
            let fst = flow.series_at_rat(&(s.clone() + t.clone())).unwrap();
            assert_eq!(fs.compose(&ft).unwrap(), fst, "s={s}, t={t}");
        }
    }

    #[test]
    fn hyperbolic_solver_rejected_for_exact_mode() {
        let map = MapSeries::new(vec![rat(2, 1), rat(-2, 1)]).unwrap();
        assert!(matches!(
            solve_flow_exact(&map, 4),
            Err(Error::NotParabolic { .. })
        ));
    }

    #[test]
    fn identity_map_has_no_t_scale() {
        let map = MapSeries::new(vec![rat(1, 1), rat(0, 1), rat(0, 1)]).unwrap();
        assert!(matches!(solve_flow_exact(&map, 3), Err(Error::IdentityMap)));
    }

    #[test]
    fn negative_multiplier_rejected() {
        let map = MapSeries::new(vec![-0.5f64, 1.0]).unwrap();
        assert!(matches!(
            solve_flow_numeric(&map, 0.5, 2),
            Err(Error::UnsupportedMultiplier(_))
        ));
    }

    #[test]
    fn near_unit_multiplier_is_resonant() {
        // a1 within 1e-12 of 1 (but not exactly 1) makes the order-2 pivot
        // a1 - a1^2 fall below the resonance tolerance.
        let map = MapSeries::new(vec![1.0 + 1e-14, -1.0]).unwrap();
        assert!(matches!(
            solve_flow_numeric(&map, 0.5, 2),
            Err(Error::Resonance { order: 2, .. })
        ));
    }

    #[test]
    fn logistic_two_numeric_matches_closed_product_formula() {
        let map = logistic_map(2.0, 10);
        for &t in &[0.25, 0.5, 0.75] {
            let flow = solve_flow_numeric(&map, t, 10).unwrap();
            let series = flow.series_at(t).unwrap();
            let two_t = 2.0f64.powf(t);
            let mut expect = 1.0; // becomes ((-2)^{k-1}/k!) prod_{j<k}(2^t - j)
            for k in 1..=10usize {
                expect *= (two_t - (k as f64 - 1.0)) / k as f64;
                if k > 1 {
                    expect *= -2.0;
                }
                let got = *series.coeff(k);
                assert!(
                    (got - expect).abs() <= 1e-13 * expect.abs(),
                    "k={k} t={t}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn logistic_halfstep_leading_coefficients() {
        let map = logistic_map(2.0, 4);
        let flow = solve_flow_numeric(&map, 0.5, 4).unwrap();
        let series = flow.series_at(0.5).unwrap();
        let sqrt2 = 2.0f64.sqrt();
        assert!((series.coeff(1) - sqrt2).abs() < 1e-12);
        assert!((series.coeff(2) + sqrt2 * (sqrt2 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn any_map_at_unit_t_reproduces_its_own_coefficients() {
        for lambda in [2.0, 3.7] {
            let map = logistic_map(lambda, 8);
            let flow = solve_flow_numeric(&map, 1.0, 8).unwrap();
            let series = flow.series_at(1.0).unwrap();
            for k in 1..=8 {
                let expect = map.coeff(k);
                assert!(
                    (series.coeff(k) - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                    "lambda={lambda} k={k}"
                );
            }
        }
        // Parabolic numeric path at t = 1.
        let sine = sine_series(9).to_f64();
        let flow = solve_flow_numeric(&sine, 1.0, 9).unwrap();
        let series = flow.series_at(1.0).unwrap();
        for k in 1..=9 {
            assert!((series.coeff(k) - sine.coeff(k)).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn parabolic_numeric_matches_exact_specialization() {
        let map = moebius_series(6);
        let flow = solve_flow_numeric(&map.to_f64(), 0.5, 6).unwrap();
        let series = flow.series_at(0.5).unwrap();
        for k in 1..=6usize {
            let expect = 0.5f64.powi(k as i32 - 1);
            assert!((series.coeff(k) - expect).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn velocity_of_moebius_flow_is_x_squared() {
        let flow = solve_flow_exact(&moebius_series(5), 5).unwrap();
        let v = velocity_series(&flow).unwrap();
        assert_eq!(*v.coeff(1), rat(0, 1));
        assert_eq!(*v.coeff(2), rat(1, 1));
        for k in 3..=5 {
            assert_eq!(*v.coeff(k), rat(0, 1), "k={k}");
        }
    }

    #[test]
    fn velocity_of_sine_flow() {
        let flow = solve_flow_exact(&sine_series(9), 9).unwrap();
        let v = velocity_series(&flow).unwrap();
        assert_eq!(*v.coeff(3), rat(-1, 6));
        assert_eq!(*v.coeff(5), rat(-1, 30));
        assert_eq!(*v.coeff(7), rat(-41, 3780));
        assert_eq!(*v.coeff(9), rat(-4, 945));
        // Normalization: the x^m velocity coefficient equals a_m.
        assert_eq!(*v.coeff(3), sine_series(9).coeff(3));
    }

    #[test]
    fn velocity_requires_exact_mode() {
        let map = logistic_map(2.0, 4);
        let flow = solve_flow_numeric(&map, 0.5, 4).unwrap();
        assert!(matches!(velocity_series(&flow), Err(Error::ExactModeOnly)));
    }

    #[test]
    fn unit_step_residual_zero_by_construction() {
        let flow = solve_flow_exact(&moebius_series(6), 6).unwrap();
        assert_eq!(
            verify_unit_step(&flow).unwrap(),
            UnitStepReport::Exact {
                order: 6,
                first_nonzero: None
            }
        );
    }

    #[test]
    fn truncating_the_sine_flow_moves_the_residual_to_order_nine() {
        // Dropping c_7 and c_9 from the ninth-order sine flow leaves the
        // equation satisfied through order 8; the unknown c_7 first enters
        // at order 7 + m - 1 = 9, so that is where the residual appears.
        let flow = solve_flow_exact(&sine_series(9), 9).unwrap();
        let mut coeffs = flow.exact_coeffs().unwrap().to_vec();
        coeffs[6] = <TPoly as Coeff>::zero();
        coeffs[8] = <TPoly as Coeff>::zero();
        let truncated = FlowSeries::exact_from_parts(sine_series(9), coeffs, 3);
        assert_eq!(
            verify_unit_step(&truncated).unwrap(),
            UnitStepReport::Exact {
                order: 9,
                first_nonzero: Some(9)
            }
        );
    }

    #[test]
    fn numeric_residual_small() {
        let map = logistic_map(2.0, 8);
        let flow = solve_flow_numeric(&map, 0.3, 8).unwrap();
        match verify_unit_step(&flow).unwrap() {
            UnitStepReport::Numeric { max_abs, .. } => assert!(max_abs < 1e-12, "{max_abs}"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn numeric_mode_guards_its_t() {
        let map = logistic_map(2.0, 4);
        let flow = solve_flow_numeric(&map, 0.5, 4).unwrap();
        assert!(flow.series_at(0.5).is_ok());
        assert!(matches!(
            flow.series_at(0.25),
            Err(Error::FlowModeMismatch { .. })
        ));
    }

    #[test]
    fn map_order_must_cover_requested_order() {
        assert!(matches!(
            solve_flow_exact(&moebius_series(4), 9),
            Err(Error::MapOrderTooSmall { .. })
        ));
    }
}
