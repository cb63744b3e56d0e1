//! Irregular values as truncated Laurent tails in `z^{-1}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{ExactAngle, GaussianRational, Rational, StokesDirection};

/// `c·z^{-q}` with `q > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub q: Rational,
    pub c: GaussianRational,
}

impl Term {
    pub fn new(q: Rational, c: GaussianRational) -> Self {
        Term { q, c }
    }
}

/// A named irregular value; terms sorted by strictly decreasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrregularValue {
    pub name: String,
    pub terms: Vec<Term>,
}

impl IrregularValue {
    pub fn new(name: &str, mut terms: Vec<Term>) -> Result<Self> {
        terms.retain(|t| !t.c.is_zero());
        terms.sort_by(|a, b| b.q.cmp(&a.q));
        if terms.iter().any(|t| !t.q.is_positive()) {
            return Err(Error::Invalid(format!("{name}: pole orders must be positive")));
        }
        if terms.windows(2).any(|w| w[0].q == w[1].q) {
            return Err(Error::Invalid(format!("{name}: repeated pole order")));
        }
        Ok(IrregularValue {
            name: name.to_string(),
            terms,
        })
    }

    /// `c·z^{-q}` with `q = num/den` and `c = re + i·im`.
    pub fn monomial(name: &str, num: i64, den: i64, re: i64, im: i64) -> Self {
        IrregularValue::new(
            name,
            vec![Term::new(Rational::new(num, den), GaussianRational::from_ints(re, im))],
        )
        .expect("valid monomial")
    }

    pub fn zero(name: &str) -> Self {
        IrregularValue {
            name: name.to_string(),
            terms: Vec::new(),
        }
    }
}

/// A finite set of pairwise distinct irregular values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentialData {
    pub values: Vec<IrregularValue>,
}

impl ExponentialData {
    pub fn new(values: Vec<IrregularValue>) -> Result<Self> {
        for (i, a) in values.iter().enumerate() {
            for b in &values[..i] {
                if a.name == b.name {
                    return Err(Error::Invalid(format!("duplicate value name {}", a.name)));
                }
                if a.terms == b.terms {
                    return Err(Error::Invalid(format!("{} and {} are equal", b.name, a.name)));
                }
            }
        }
        Ok(ExponentialData { values })
    }

    pub fn names(&self) -> Vec<String> {
        self.values.iter().map(|v| v.name.clone()).collect()
    }

    /// Least common multiple of the denominators of all pole orders.
    pub fn ramification(&self) -> u64 {
        let mut d = num_bigint::BigInt::one();
        for v in &self.values {
            for t in &v.terms {
                d = d.lcm(t.q.denom());
            }
        }
        u64::try_from(d).expect("ramification fits in u64")
    }

    pub fn is_unramified(&self) -> bool {
        self.ramification() == 1
    }
}

/// Leading pole order and coefficient of `a − b`; `None` when equal.
pub fn leading_data(a: &IrregularValue, b: &IrregularValue) -> Option<(Rational, GaussianRational)> {
    let mut diff: BTreeMap<Rational, GaussianRational> = BTreeMap::new();
    for t in &a.terms {
        let e = diff.entry(t.q.clone()).or_default();
        *e = &*e + &t.c;
    }
    for t in &b.terms {
        let e = diff.entry(t.q.clone()).or_default();
        *e = &*e - &t.c;
    }
    diff.into_iter().rev().find(|(_, c)| !c.is_zero())
}

fn integer_order(q: &Rational) -> Result<u32> {
    if !q.is_integer() {
        return Err(Error::Precondition(format!(
            "pole order {q} is not an integer; pull back along a Kummer cover first"
        )));
    }
    u32::try_from(q.numer().clone()).map_err(|_| Error::Invalid(format!("pole order {q} too large")))
}

/// `(m, c)` of `a − b` with integer `m`.
pub fn integer_leading_data(a: &IrregularValue, b: &IrregularValue) -> Result<(u32, GaussianRational)> {
    let (q, c) = leading_data(a, b)
        .ok_or_else(|| Error::Invalid(format!("{} and {} are equal", a.name, b.name)))?;
    Ok((integer_order(&q)?, c))
}

/// The `2m` zeros of `Re(c·e^{−imθ})`, sorted by angle.
pub fn stokes_directions(a: &IrregularValue, b: &IrregularValue) -> Result<Vec<StokesDirection>> {
    let (m, c) = integer_leading_data(a, b)?;
    let mut dirs: Vec<StokesDirection> = (0..2 * m)
        .map(|k| StokesDirection::new(c.clone(), m, k).expect("valid direction"))
        .collect();
    dirs.sort_by_key(|d| d.angle());
    Ok(dirs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairOrder {
    #[serde(rename = "LT")]
    Less,
    #[serde(rename = "GT")]
    Greater,
    #[serde(rename = "EQ")]
    Equal,
    #[serde(rename = "INCOMPARABLE")]
    Incomparable,
}

/// Order of `a` and `b` at the angle `θ`: `a < b` iff `Re(c_{a,b}·e^{−imθ}) < 0`.
pub fn order_at(a: &IrregularValue, b: &IrregularValue, theta: &ExactAngle) -> Result<PairOrder> {
    if leading_data(a, b).is_none() {
        return Ok(PairOrder::Equal);
    }
    let dirs = stokes_directions(a, b)?;
    let angles: Vec<ExactAngle> = dirs.iter().map(|d| d.angle()).collect();
    if angles.iter().any(|t| t == theta) {
        return Ok(PairOrder::Incomparable);
    }
    // the zero most recently passed going counterclockwise
    let last = angles
        .iter()
        .rposition(|t| t.cmp(theta) == Ordering::Less)
        .unwrap_or(angles.len() - 1);
    // just after θ_k the sign of Re(c·e^{−imθ}) is (−1)^k
    Ok(if dirs[last].k % 2 == 1 {
        PairOrder::Less
    } else {
        PairOrder::Greater
    })
}

/// Substitutes `z ↦ z^d`.
pub fn kummer_pullback(e: &ExponentialData, d: u64) -> Result<ExponentialData> {
    if d == 0 || d % e.ramification() != 0 {
        return Err(Error::Invalid(format!(
            "degree {d} is not a multiple of the ramification {}",
            e.ramification()
        )));
    }
    let scale = Rational::from_integer(d as i64);
    let values = e
        .values
        .iter()
        .map(|v| IrregularValue {
            name: v.name.clone(),
            terms: v
                .terms
                .iter()
                .map(|t| Term::new(&t.q * &scale, t.c.clone()))
                .collect(),
        })
        .collect();
    ExponentialData::new(values)
}

impl Serialize for ExponentialData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            values: BTreeMap<&'a str, &'a [Term]>,
        }
        Repr {
            values: self.values.iter().map(|v| (v.name.as_str(), v.terms.as_slice())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExponentialData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            values: BTreeMap<String, Vec<Term>>,
        }
        let repr = Repr::deserialize(d)?;
        let values = repr
            .values
            .into_iter()
            .map(|(name, terms)| IrregularValue::new(&name, terms))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ExponentialData::new(values).map_err(D::Error::custom)
    }
}
