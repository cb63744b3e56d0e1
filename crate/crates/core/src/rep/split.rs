//! Fiberwise splittings and the cocartesian condition.

use std::collections::BTreeMap;

use serde::Serialize;

use super::StokesFunctor;
use crate::error::{Error, Result};
use crate::exact::Matrix;

/// Witness that a fiber is not a sum of principal projectives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NotSplit {
    pub object: String,
    pub element: String,
    pub dimension: usize,
    /// `Σ_{b ≤ a} dim V_b` at the offending element.
    pub expected: usize,
}

impl std::fmt::Display for NotSplit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "not split over {} at {}: dimension {} but the tops add up to {}",
            self.object, self.element, self.dimension, self.expected
        )
    }
}

impl From<NotSplit> for Error {
    fn from(n: NotSplit) -> Self {
        Error::NotSplit(n.to_string())
    }
}

/// `θ_a : ⊕_{b≤a} V_b ≅ F_x(a)` over one base object, blocks in index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub at: usize,
    pub dims: Vec<usize>,
    /// `S_b : V_b → F_x(b)`, a section of the projection onto the top.
    pub sections: Vec<Matrix>,
    pub iso: Vec<Matrix>,
}

impl Splitting {
    /// Builds `θ` from chosen sections; fails unless every `θ_a` is invertible.
    pub fn from_sections(f: &StokesFunctor, x: usize, sections: Vec<Matrix>) -> Result<Splitting> {
        let fib = f.fibration().fiber(x);
        if sections.len() != fib.len() {
            return Err(Error::Dimension("one section per element expected".into()));
        }
        for (b, s) in sections.iter().enumerate() {
            if s.rows() != f.dim(x, b) {
                return Err(Error::Dimension(format!("section at {} has the wrong height", fib.name(b))));
            }
        }
        let dims: Vec<usize> = sections.iter().map(|s| s.cols()).collect();
        let mut iso = Vec::with_capacity(fib.len());
        for a in 0..fib.len() {
            let mut theta = Matrix::zeros(f.dim(x, a), 0);
            for b in fib.down_set(a, false) {
                theta = theta.hstack(&(f.fiber_map(x, b, a) * &sections[b]));
            }
            if !theta.is_square() || !theta.is_invertible() {
                return Err(Error::Invalid(format!("sections do not split the fiber at {}", fib.name(a))));
            }
            iso.push(theta);
        }
        Ok(Splitting {
            at: x,
            dims,
            sections,
            iso,
        })
    }

    /// Offsets of the `V_b` blocks inside `⊕_{b≤a} V_b`.
    pub fn layout(&self, f: &StokesFunctor, a: usize) -> Vec<(usize, usize)> {
        block_layout(&f.fibration().fiber(self.at).down_set(a, false), &self.dims)
    }

    /// `F_x(a) → V_a`: the `V_a` rows of `θ_a⁻¹`.
    pub fn top_projection(&self, f: &StokesFunctor, a: usize) -> Matrix {
        let inv = self.iso[a].inverse().expect("splitting iso");
        let off = self
            .layout(f, a)
            .into_iter()
            .find(|&(b, _)| b == a)
            .map(|(_, o)| o)
            .expect("a lies below itself");
        inv.submatrix(off, 0, self.dims[a], inv.cols())
    }

    pub fn to_json(&self, f: &StokesFunctor) -> serde_json::Value {
        let fib = f.fibration().fiber(self.at);
        let dims: BTreeMap<&str, usize> = (0..fib.len()).map(|b| (fib.name(b), self.dims[b])).collect();
        let iso: BTreeMap<&str, &Matrix> = (0..fib.len()).map(|a| (fib.name(a), &self.iso[a])).collect();
        serde_json::json!({
            "at": f.fibration().base().object_name(self.at),
            "dims": dims,
            "iso": iso,
        })
    }
}

/// `(element, offset)` pairs for a direct sum indexed by `members`.
pub(crate) fn block_layout(members: &[usize], dims: &[usize]) -> Vec<(usize, usize)> {
    let mut off = 0;
    members
        .iter()
        .map(|&b| {
            let o = off;
            off += dims[b];
            (b, o)
        })
        .collect()
}

/// Columns of `F_x(b)` completing the radical `Σ_{c<b} im F(c≤b)` to a basis.
fn top_section(f: &StokesFunctor, x: usize, b: usize) -> Matrix {
    let d = f.dim(x, b);
    let fib = f.fibration().fiber(x);
    let mut span = Matrix::zeros(d, 0);
    for c in fib.lower_covers(b) {
        span = span.hstack(f.cover(x, c, b));
    }
    let mut rank = span.rank();
    let mut chosen = Vec::new();
    for i in 0..d {
        if rank == d {
            break;
        }
        let mut e = Matrix::zeros(d, 1);
        e.set(i, 0, crate::exact::Rational::one());
        let wider = span.hstack(&e);
        let r = wider.rank();
        if r > rank {
            rank = r;
            span = wider;
            chosen.push(i);
        }
    }
    Matrix::identity(d).select_columns(&chosen)
}

/// Splits the fiber over `x` when the projective-cover dimension count holds.
pub fn split_fiber(f: &StokesFunctor, x: usize) -> std::result::Result<Splitting, NotSplit> {
    let fib = f.fibration().fiber(x);
    let sections: Vec<Matrix> = (0..fib.len()).map(|b| top_section(f, x, b)).collect();
    for a in 0..fib.len() {
        let expected: usize = fib.down_set(a, false).iter().map(|&b| sections[b].cols()).sum();
        if expected != f.dim(x, a) {
            return Err(NotSplit {
                object: f.fibration().base().object_name(x),
                element: fib.name(a).to_string(),
                dimension: f.dim(x, a),
                expected,
            });
        }
    }
    Ok(Splitting::from_sections(f, x, sections).expect("dimension count forces invertibility"))
}

/// One splitting per base object.
pub type PunctualSplitting = Vec<Splitting>;

pub fn punctual_splitting(f: &StokesFunctor) -> std::result::Result<PunctualSplitting, NotSplit> {
    (0..f.fibration().base().num_objects())
        .map(|x| split_fiber(f, x))
        .collect()
}

pub fn is_punctually_split(f: &StokesFunctor) -> bool {
    punctual_splitting(f).is_ok()
}

/// For each `a` over the target of `γ`, the map `⊕_{f_γ(b) ≤ a} V_b → F_y(a)`.
pub fn specialization_matrices(f: &StokesFunctor, arrow: usize, s: &Splitting) -> Result<Vec<Matrix>> {
    let fib = f.fibration();
    let ar = &fib.arrows()[arrow];
    if s.at != ar.source {
        return Err(Error::Invalid("splitting is not over the source of the arrow".into()));
    }
    let (x, y) = (ar.source, ar.target);
    let t = fib.transition(arrow);
    Ok((0..fib.fiber(y).len())
        .map(|a| {
            let mut m = Matrix::zeros(f.dim(y, a), 0);
            for b in 0..fib.fiber(x).len() {
                if fib.fiber(y).leq(t[b], a) {
                    let block = &(f.fiber_map(y, t[b], a) * f.lift(arrow, b)) * &s.sections[b];
                    m = m.hstack(&block);
                }
            }
            m
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocartesianVerdict {
    Cocartesian,
    /// The specialization matrix at `element` is not invertible.
    Singular { element: usize, matrix: Matrix },
    NotApplicable(NotSplit),
}

impl CocartesianVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CocartesianVerdict::Cocartesian)
    }
}

pub fn is_cocartesian_at(f: &StokesFunctor, arrow: usize) -> CocartesianVerdict {
    let x = f.fibration().arrows()[arrow].source;
    match split_fiber(f, x) {
        Ok(s) => cocartesian_with(f, arrow, &s),
        Err(n) => CocartesianVerdict::NotApplicable(n),
    }
}

/// Same check with a caller-supplied splitting at the source.
pub fn cocartesian_with(f: &StokesFunctor, arrow: usize, s: &Splitting) -> CocartesianVerdict {
    let mats = specialization_matrices(f, arrow, s).expect("splitting over the source");
    for (a, m) in mats.into_iter().enumerate() {
        if !m.is_square() || !m.is_invertible() {
            return CocartesianVerdict::Singular { element: a, matrix: m };
        }
    }
    CocartesianVerdict::Cocartesian
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularWitness {
    pub arrow: String,
    pub element: String,
    pub matrix: Matrix,
}

/// Verdict of [`is_stokes`] together with every obstruction found.
#[derive(Clone, Debug, Serialize)]
pub struct StokesReport {
    pub is_stokes: bool,
    pub not_split: Vec<NotSplit>,
    pub singular: Vec<SingularWitness>,
}

pub fn stokes_report(f: &StokesFunctor) -> StokesReport {
    let fib = f.fibration();
    let mut not_split = Vec::new();
    let mut splittings = Vec::new();
    for x in 0..fib.base().num_objects() {
        match split_fiber(f, x) {
            Ok(s) => splittings.push(Some(s)),
            Err(n) => {
                not_split.push(n);
                splittings.push(None);
            }
        }
    }
    let mut singular = Vec::new();
    for (g, ar) in fib.arrows().iter().enumerate() {
        let Some(s) = &splittings[ar.source] else { continue };
        if let CocartesianVerdict::Singular { element, matrix } = cocartesian_with(f, g, s) {
            singular.push(SingularWitness {
                arrow: ar.name.clone(),
                element: fib.fiber(ar.target).name(element).to_string(),
                matrix,
            });
        }
    }
    StokesReport {
        is_stokes: not_split.is_empty() && singular.is_empty(),
        not_split,
        singular,
    }
}

/// Punctually split and cocartesian at every base arrow.
pub fn is_stokes(f: &StokesFunctor) -> bool {
    let fib = f.fibration();
    let Ok(splittings) = punctual_splitting(f) else {
        return false;
    };
    fib.arrows()
        .iter()
        .enumerate()
        .all(|(g, ar)| cocartesian_with(f, g, &splittings[ar.source]).holds())
}
