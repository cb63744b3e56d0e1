//! Exact angles on the circle.
//!
//! Every angle handled here has the form `θ = (arg g + h·π/2) / m` where `g`
//! is a Gaussian rational in the half-open first quadrant, `m ≥ 1` and
//! `0 ≤ h < 4m`. Stokes directions `(arg c − π/2 + kπ)/m` and arguments of
//! Gaussian rational sample points both fit this shape, and two such angles
//! can be compared with rational arithmetic alone: scaling both by
//! `m1·m2·2/π` turns the comparison into an integer part (tracked as quarter
//! turns while raising `g` to a power) plus a first-quadrant remainder,
//! compared by a cross product.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GaussianRational, Rational};
use crate::error::{Error, Result};

/// Zero of `θ ↦ Re(c·e^{−imθ})`, namely `θ = (arg c − π/2 + kπ)/m mod 2π`
/// with `arg c ∈ [0, 2π)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StokesDirection {
    pub c: GaussianRational,
    pub m: u32,
    pub k: u32,
}

impl StokesDirection {
    pub fn new(c: GaussianRational, m: u32, k: u32) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Invalid("Stokes direction with c = 0".into()));
        }
        if m == 0 {
            return Err(Error::Invalid("Stokes direction with m = 0".into()));
        }
        if k >= 2 * m {
            return Err(Error::Invalid(format!("k = {k} outside 0..{}", 2 * m)));
        }
        Ok(StokesDirection { c, m, k })
    }

    pub fn angle(&self) -> ExactAngle {
        let (q, g) = self.c.quadrant_split();
        let m = u64::from(self.m);
        let modulus = 4 * m;
        // arg c = arg g + q·π/2, so m·θ = arg g + (q + 2k − 1)·π/2.
        let h = (u64::from(q) + 2 * u64::from(self.k) + modulus - 1) % modulus;
        ExactAngle { m, h, g }
    }

    /// The next zero counterclockwise, `π/m` further along.
    pub fn successor(&self) -> StokesDirection {
        StokesDirection {
            c: self.c.clone(),
            m: self.m,
            k: (self.k + 1) % (2 * self.m),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.angle().to_f64()
    }
}

impl fmt::Debug for StokesDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θ(c={:?}, m={}, k={}) ≈ {:.6}", self.c, self.m, self.k, self.to_f64())
    }
}

/// Total order of the represented angles in `[0, 2π)`.
pub fn compare_directions(d1: &StokesDirection, d2: &StokesDirection) -> Ordering {
    d1.angle().cmp(&d2.angle())
}

/// An angle `(arg g + h·π/2)/m` in `[0, 2π)`; see the module docs.
#[derive(Clone, Debug)]
pub struct ExactAngle {
    m: u64,
    h: u64,
    g: GaussianRational,
}

impl ExactAngle {
    pub fn new(m: u64, h: u64, g: GaussianRational) -> Result<Self> {
        if m == 0 || h >= 4 * m || !g.in_first_quadrant() {
            return Err(Error::Invalid(format!(
                "malformed exact angle (m={m}, h={h}, g={g:?})"
            )));
        }
        Ok(ExactAngle { m, h, g })
    }

    /// The argument of a nonzero Gaussian rational.
    pub fn of_point(u: &GaussianRational) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::Invalid("argument of zero".into()));
        }
        let (q, g) = u.quadrant_split();
        Ok(ExactAngle { m: 1, h: u64::from(q), g })
    }

    pub fn zero() -> Self {
        ExactAngle {
            m: 1,
            h: 0,
            g: GaussianRational::one(),
        }
    }

    pub fn denominator(&self) -> u64 {
        self.m
    }

    /// Adds `steps·π/(2m)` for this angle's own `m`.
    pub fn rotate_quarter_steps(&self, steps: i64) -> ExactAngle {
        let modulus = 4 * self.m as i64;
        let h = (self.h as i64 + steps).rem_euclid(modulus) as u64;
        ExactAngle {
            m: self.m,
            h,
            g: self.g.clone(),
        }
    }

    /// Same angle written with denominator `m·t`.
    pub fn rescale(&self, t: u64) -> ExactAngle {
        let (turns, r) = power_with_winding(&self.g, t);
        ExactAngle {
            m: self.m * t,
            h: self.h * t + turns,
            g: r,
        }
    }

    /// `d·θ mod 2π`, the image under the `d`-fold cover of the circle.
    pub fn multiply(&self, d: u64) -> ExactAngle {
        // d·θ = (arg g + h·π/2)/(m/d); bring to a common denominator first.
        let scaled = if self.m % d == 0 {
            self.clone()
        } else {
            self.rescale(d)
        };
        let m = scaled.m / d;
        ExactAngle {
            m,
            h: scaled.h % (4 * m),
            g: scaled.g,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.g.arg_f64() + (self.h as f64) * PI / 2.0;
        a / self.m as f64
    }

    /// Integer quarter-turn count and first-quadrant remainder of
    /// `θ·m·t·2/π` where `t` is the other angle's denominator.
    fn scaled_parts(&self, t: u64) -> (u64, GaussianRational) {
        let (turns, r) = power_with_winding(&self.g, t);
        (t * self.h + turns, r)
    }

    /// Strictly inside the counterclockwise open arc from `from` to `to`.
    /// When `from == to` the arc is the whole circle minus that point.
    pub fn strictly_between(&self, from: &ExactAngle, to: &ExactAngle) -> bool {
        match from.cmp(to) {
            Ordering::Less => from < self && self < to,
            Ordering::Greater => self > from || self < to,
            Ordering::Equal => self != from,
        }
    }
}

/// `(Q, r)` with `g^e = |g|^e · i^Q · r/|r|` where `Q = ⌊e·arg g/(π/2)⌋`
/// and `r` in the first quadrant.
fn power_with_winding(g: &GaussianRational, e: u64) -> (u64, GaussianRational) {
    let mut acc = GaussianRational::one();
    let mut turns = 0;
    for _ in 0..e {
        acc = &acc * g;
        if !acc.in_first_quadrant() {
            acc = acc.rotate_back_quarter();
            turns += 1;
        }
        acc = normalize_magnitude(&acc);
    }
    (turns, acc)
}

/// Divides by a positive rational to keep coefficient growth in check;
/// the argument is unchanged.
fn normalize_magnitude(z: &GaussianRational) -> GaussianRational {
    use num_integer::Integer;
    let (a, b) = (&z.re, &z.im);
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    if num == num_bigint::BigInt::from(0) {
        return z.clone();
    }
    let s = Rational::from_big(den, num);
    z.scale(&s)
}

/// Compares arguments of two first-quadrant Gaussian rationals.
fn cmp_first_quadrant(a: &GaussianRational, b: &GaussianRational) -> Ordering {
    // arg a < arg b  ⟺  Im(conj(a)·b) > 0.
    let cross = &a.re * &b.im - &a.im * &b.re;
    0.cmp(&cross.signum())
}

impl PartialEq for ExactAngle {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactAngle {}

impl PartialOrd for ExactAngle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactAngle {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a_int, a_rem) = self.scaled_parts(other.m);
        let (b_int, b_rem) = other.scaled_parts(self.m);
        a_int
            .cmp(&b_int)
            .then_with(|| cmp_first_quadrant(&a_rem, &b_rem))
    }
}

/// Sign of `Re(c·e^{−imθ})` at the argument of the sample point `u`.
pub fn leading_sign_at_point(c: &GaussianRational, m: u32, u: &GaussianRational) -> i32 {
    (c * &u.conj().pow(m)).re.signum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(re: i64, im: i64, m: u32, k: u32) -> StokesDirection {
        StokesDirection::new(GaussianRational::from_ints(re, im), m, k).unwrap()
    }

    #[test]
    fn spec_examples() {
        let d = dir(1, 0, 1, 0);
        assert_eq!(compare_directions(&d, &d.clone()), Ordering::Equal);
        // θ = 3π/2 vs π/2
        assert_eq!(compare_directions(&dir(1, 0, 1, 0), &dir(1, 0, 1, 1)), Ordering::Greater);
        // θ = 0 vs π/2
        assert_eq!(compare_directions(&dir(0, 1, 1, 0), &dir(1, 0, 1, 1)), Ordering::Less);
    }

    #[test]
    fn real_positive_c_gives_vertical_directions() {
        for re in [1, 2, 7] {
            let d0 = dir(re, 0, 1, 0).to_f64();
            let d1 = dir(re, 0, 1, 1).to_f64();
            assert!((d0 - 3.0 * PI / 2.0).abs() < 1e-12);
            assert!((d1 - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_angles_with_different_representations() {
        // arg(1+i) = π/4; m=1,k=1 gives 3π/4. c = -1+i has arg 3π/4; m=1, k=... gives 3π/4+π/2
        let a = dir(1, 1, 1, 1);
        assert!((a.to_f64() - 3.0 * PI / 4.0).abs() < 1e-12);
        // (c = i, m = 2, k = 1): (π/2 − π/2 + π)/2 = π/2; (c = 1, m = 1, k = 1) = π/2.
        assert_eq!(compare_directions(&dir(0, 1, 2, 1), &dir(1, 0, 1, 1)), Ordering::Equal);
        // Scaled coefficients give the same angles.
        assert_eq!(compare_directions(&dir(3, 4, 3, 2), &dir(6, 8, 3, 2)), Ordering::Equal);
        // (c = 1, m = 2, k = 2) = 3π/4 equals (c = 1+i, m = 1, k = 1) = 3π/4.
        assert_eq!(compare_directions(&dir(1, 0, 2, 2), &dir(1, 1, 1, 1)), Ordering::Equal);
    }

    #[test]
    fn agrees_with_floating_point_when_well_separated() {
        let mut dirs = Vec::new();
        for (re, im) in [(1, 0), (0, 1), (1, 1), (-2, 1), (3, -5), (-1, -1), (5, 2)] {
            for m in 1..=4 {
                for k in 0..2 * m {
                    dirs.push(dir(re, im, m, k));
                }
            }
        }
        for a in &dirs {
            for b in &dirs {
                let (x, y) = (a.to_f64(), b.to_f64());
                let exact = compare_directions(a, b);
                if (x - y).abs() > 1e-9 {
                    assert_eq!(exact, x.partial_cmp(&y).unwrap(), "{a:?} vs {b:?}");
                } else {
                    assert_eq!(exact, Ordering::Equal, "{a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn successor_is_a_rotation_by_pi_over_m() {
        for m in 1..=5u32 {
            let d = dir(2, 3, m, 0);
            let a = d.angle().rotate_quarter_steps(2);
            assert_eq!(a, d.successor().angle());
        }
    }

    #[test]
    fn cover_multiplication() {
        // θ = π/4 sampled by 1+i; doubling gives π/2.
        let a = ExactAngle::of_point(&GaussianRational::from_ints(1, 1)).unwrap();
        let b = ExactAngle::of_point(&GaussianRational::from_ints(0, 1)).unwrap();
        assert_eq!(a.multiply(2), b);
        let d = dir(1, 0, 3, 4);
        let e = d.angle().multiply(3);
        assert!((e.to_f64() - (3.0 * d.to_f64()) % (2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn strictly_between_handles_wraparound() {
        let p = |re, im| ExactAngle::of_point(&GaussianRational::from_ints(re, im)).unwrap();
        let (east, north, west, south) = (p(1, 0), p(0, 1), p(-1, 0), p(0, -1));
        assert!(north.strictly_between(&east, &west));
        assert!(!south.strictly_between(&east, &west));
        assert!(east.strictly_between(&south, &north));
        assert!(!east.strictly_between(&east, &north));
        assert!(west.strictly_between(&north, &north));
    }
}
