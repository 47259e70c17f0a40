//! Polynomials in the flow parameter t over exact rationals.
//!
//! These carry the t-dependence of parabolic flow coefficients. Canonical
//! form strips trailing zeros; the zero polynomial has an empty coefficient
//! vector.

use crate::coeff::{rat_to_f64, Coeff, Rat};
use num_traits::{Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TPoly {
    /// coeffs[i] = coefficient of t^i; no trailing zeros.
    coeffs: Vec<Rat>,
}

impl TPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        TPoly { coeffs }
    }

    pub fn constant(c: Rat) -> Self {
        TPoly::new(vec![c])
    }

    /// The monomial a*t.
    pub fn linear(a: Rat) -> Self {
        TPoly::new(vec![<Rat as Coeff>::zero(), a])
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of t^i (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(<Rat as Coeff>::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// d/dt at t = 0, i.e. the linear coefficient.
    pub fn linear_coeff(&self) -> Rat {
        self.coeff(1)
    }

    /// Exact Horner evaluation; at t = 0 this returns the constant coefficient.
    pub fn eval(&self, t: &Rat) -> Rat {
        let mut acc = <Rat as Coeff>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + rat_to_f64(c);
        }
        acc
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if Zero::is_zero(s) {
            return <TPoly as Coeff>::zero();
        }
        TPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

impl Coeff for TPoly {
    fn zero() -> Self {
        TPoly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        TPoly::constant(<Rat as Coeff>::one())
    }
    fn from_i64(v: i64) -> Self {
        TPoly::constant(<Rat as Coeff>::from_i64(v))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        TPoly::new(out)
    }
    fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        TPoly::new(out)
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return <TPoly as Coeff>::zero();
        }
        let mut out = vec![<Rat as Coeff>::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if Zero::is_zero(b) {
                    continue;
                }
                out[i + j] = &out[i + j] + a * b;
            }
        }
        TPoly::new(out)
    }
    fn neg(&self) -> Self {
        TPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    fn inv(&self) -> Option<Self> {
        // Units in Q[t] are the nonzero constants.
        if self.coeffs.len() == 1 {
            Coeff::inv(&self.coeffs[0]).map(TPoly::constant)
        } else {
            None
        }
    }
    fn approx(&self) -> f64 {
        self.coeff(0).approx()
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if Zero::is_zero(c) {
                continue;
            }
            let mag = c.abs();
            if first {
                if Signed::is_negative(c) {
                    write!(f, "-")?;
                }
                first = false;
            } else if Signed::is_negative(c) {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag == <Rat as Coeff>::one();
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{mag}*t^{i}")?,
            }
        }
        Ok(())
    }
}
