use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Rational;

/// An element `re + i·im` of Q(i).
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational::new(Rational::from_integer(re), Rational::from_integer(im))
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational::new(re, Rational::zero())
    }

    pub fn zero() -> Self {
        GaussianRational::from_ints(0, 0)
    }

    pub fn one() -> Self {
        GaussianRational::from_ints(1, 0)
    }

    pub fn i() -> Self {
        GaussianRational::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    /// |z|², always rational.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplication by `i`.
    pub fn rotate_quarter(&self) -> Self {
        GaussianRational::new(-&self.im, self.re.clone())
    }

    /// Multiplication by `-i`.
    pub fn rotate_back_quarter(&self) -> Self {
        GaussianRational::new(self.im.clone(), -&self.re)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussianRational::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussianRational::new(&self.re * r, &self.im * r)
    }

    /// Lies in the half-open first quadrant `re > 0, im ≥ 0`, i.e. has
    /// argument in `[0, π/2)`.
    pub fn in_first_quadrant(&self) -> bool {
        self.re.is_positive() && !self.im.is_negative()
    }

    /// Writes a nonzero `z` as `i^q · g` with `q ∈ 0..4` and `g` in the first
    /// quadrant. Panics on zero.
    pub fn quadrant_split(&self) -> (u32, GaussianRational) {
        assert!(!self.is_zero(), "argument of zero");
        let mut g = self.clone();
        let mut q = 0;
        while !g.in_first_quadrant() {
            g = g.rotate_back_quarter();
            q += 1;
        }
        (q, g)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn arg_f64(&self) -> f64 {
        let (x, y) = self.to_f64();
        let a = y.atan2(x);
        if a < 0.0 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrant_split_recovers_value() {
        for (re, im) in [(1, 0), (0, 1), (-1, 0), (0, -1), (3, -2), (-5, -1), (2, 7)] {
            let z = GaussianRational::from_ints(re, im);
            let (q, g) = z.quadrant_split();
            assert!(g.in_first_quadrant());
            assert_eq!(&GaussianRational::i().pow(q) * &g, z);
        }
    }

    #[test]
    fn serializes_as_object() {
        let z = GaussianRational::new(Rational::new(1, 2), Rational::from_integer(-3));
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"re":"1/2","im":"-3"}"#);
    }
}
