//! Truncated power series with zero constant term.
//!
//! A series of order N stores the coefficients of x^1..x^N; the constant
//! term is identically zero because every map here fixes the origin.
//! Binary operations require equal orders — re-truncation is an explicit
//! operation, so precision is never dropped silently.

use crate::coeff::{Coeff, Rat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    /// coeffs[k-1] = coefficient of x^k, k = 1..=order.
    coeffs: Vec<C>,
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn zero(order: usize) -> Result<Self> {
        Self::new(vec![C::zero(); order])
    }

    /// The identity map x, truncated at the given order.
    pub fn identity(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptySeries);
        }
        let mut coeffs = vec![C::zero(); order];
        coeffs[0] = C::one();
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of x^k, 1-based. Panics outside 1..=order.
    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k - 1]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    fn check_order(&self, rhs: &Self) -> Result<()> {
        if self.order() != rhs.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: rhs.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Self::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Self::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    /// Cauchy product truncated at x^order. Both factors start at x^1, so
    /// the product starts at x^2; at order 1 the result is the zero series.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let n = self.order();
        let mut out = vec![C::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = i + j + 2;
                if k > n {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[k - 1] = out[k - 1].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &C) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        }
    }

    /// Composition self(inner(x)), truncated at the common order.
    ///
    /// Horner in the series ring: acc = f_N; acc = acc*g + f_k for
    /// k = N-1..1; result = acc*g. The accumulator carries a constant
    /// term, so it lives in a dense [x^0..x^N] buffer.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        let n = self.order();
        let mut acc = vec![C::zero(); n + 1];
        acc[0] = self.coeffs[n - 1].clone();
        for k in (1..n).rev() {
            acc = dense_mul_series(&acc, inner, n);
            acc[0] = acc[0].add(&self.coeffs[k - 1]);
        }
        let acc = dense_mul_series(&acc, inner, n);
        Self::new(acc[1..].to_vec())
    }

    /// Compositional inverse: g with self∘g = id through the order.
    /// Solved order by order; requires an invertible leading coefficient.
    pub fn revert(&self) -> Result<Self> {
        let c1_inv = self.coeffs[0].inv().ok_or(Error::DegenerateMap)?;
        let n = self.order();
        let mut g = vec![C::zero(); n];
        g[0] = c1_inv.clone();
        for k in 2..=n {
            let f_k = self.truncated(k)?;
            let g_k = TruncatedSeries::new(g[..k].to_vec())?;
            let h = f_k.compose(&g_k)?;
            g[k - 1] = h.coeff(k).neg().mul(&c1_inv);
        }
        Self::new(g)
    }

    /// Horner evaluation. Exact when all inputs are rational.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc.mul(x)
    }

    pub fn truncated(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order() {
            return Err(Error::BadTruncation {
                requested: order,
                order: self.order(),
            });
        }
        Self::new(self.coeffs[..order].to_vec())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl TruncatedSeries<Rat> {
    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        self.map(|c| c.approx())
    }
}

impl TruncatedSeries<f64> {
    /// Evaluation with a range check: non-finite results are reported
    /// rather than propagated.
    pub fn eval_finite(&self, x: f64) -> Result<f64> {
        let v = self.eval(&x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("series evaluation"))
        }
    }
}

/// acc (dense, constant term at index 0) times a zero-constant series,
/// truncated at x^n. Result is again dense with a zero constant term.
fn dense_mul_series<C: Coeff>(acc: &[C], g: &TruncatedSeries<C>, n: usize) -> Vec<C> {
    let mut out = vec![C::zero(); n + 1];
    for (s, a) in acc.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.coeffs.iter().enumerate() {
            let k = s + j + 1;
            if k > n {
                break;
            }
            if b.is_zero() {
                continue;
            }
            out[k] = out[k].add(&a.mul(b));
        }
    }
    out
}
