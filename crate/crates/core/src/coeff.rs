//! Coefficient rings for series arithmetic.
//!
//! Two scalar modes are supported and never mixed within one series:
//! exact rationals ([`Rat`], arbitrary precision, always in lowest terms
//! with positive denominator) and 64-bit floats. [`crate::tpoly::TPoly`]
//! implements [`Coeff`] as well, so parabolic flows can carry
//! polynomial-in-t coefficients through the same series code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Ring operations the series and solver code is generic over.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + std::fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, or `None` when the element is not a unit.
    fn inv(&self) -> Option<Self>;
    /// Closest f64. Lossy for rationals; the constant term for polynomials.
    fn approx(&self) -> f64;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Coeff for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as num_traits::One>::one()
    }
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn approx(&self) -> f64 {
        rat_to_f64(self)
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn approx(&self) -> f64 {
        *self
    }
}

/// Convert a rational to f64, rescaling by powers of two first so that
/// huge numerators/denominators do not overflow to inf/inf = NaN.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if Zero::is_zero(r) {
        return 0.0;
    }
    let numer = r.numer();
    let denom = r.denom();
    let nbits = numer.magnitude().bits();
    let dbits = denom.magnitude().bits();
    if nbits <= 900 && dbits <= 900 {
        let n = numer.to_f64().unwrap_or(f64::NAN);
        let d = denom.to_f64().unwrap_or(f64::NAN);
        return n / d;
    }
    let nshift = nbits.saturating_sub(512);
    let dshift = dbits.saturating_sub(512);
    let n = (numer >> nshift).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> dshift).to_f64().unwrap_or(f64::NAN);
    let exp = nshift as i64 - dshift as i64;
    // Exponent can exceed f64 range; split the power of two to saturate cleanly.
    let half = (exp / 2) as i32;
    (n / d) * 2f64.powi(half) * 2f64.powi((exp - half as i64) as i32)
}

/// Natural log of |r| for a nonzero rational of any size.
pub fn rat_ln_abs(r: &Rat) -> f64 {
    assert!(!Zero::is_zero(r), "log of zero rational");
    big_ln(r.numer().magnitude().bits(), r.numer()) - big_ln(r.denom().magnitude().bits(), r.denom())
}

fn big_ln(bits: u64, x: &BigInt) -> f64 {
    let mag = x.magnitude();
    if bits <= 900 {
        mag.to_f64().unwrap_or(f64::NAN).ln()
    } else {
        let shift = bits - 512;
        let top = mag >> shift;
        top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Rational with the exact value of a finite f64.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Sign-aware positivity; used for multiplier classification.
pub fn rat_is_positive(r: &Rat) -> bool {
    Signed::is_positive(r)
}
