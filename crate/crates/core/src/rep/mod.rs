//! Representations of total categories in finite-dimensional rational
//! vector spaces.

mod global;
mod hom;
mod level;
mod ops;
mod split;

use std::collections::{BTreeMap, HashMap};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::base::BaseMorphism;
use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::fibration::StokesFibration;
use crate::total::{generator_ends, generator_name, generators, Generator, TotalCategory};

pub use global::{
    split_global, split_global_with, split_strategies, GlobalSplitting, InitialObjectSplit, LinearSplit,
    SplitFailure, SplitOutcome, SplitStrategy,
};
pub use hom::{
    ext_dims, find_isomorphism, hom_complex, hom_space, natural_endomorphism_dim, tangent_dims,
    HomComplex, NatTrans, TangentDims,
};
pub use level::{level_assemble, level_disassemble, LevelData};
pub use ops::{grade, grade_right_adjoint, induce, pullback_along_base, pullback_along_morphism};
pub use split::{
    cocartesian_with, is_cocartesian_at, is_punctually_split, is_stokes, punctual_splitting,
    specialization_matrices, split_fiber, stokes_report, CocartesianVerdict, NotSplit, PunctualSplitting,
    SingularWitness, Splitting, StokesReport,
};

/// A functor `F : I → Vect_Q` given by a dimension per total object and a
/// matrix per generating arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StokesFunctor {
    fibration: StokesFibration,
    dims: Vec<Vec<usize>>,
    covers: Vec<HashMap<(usize, usize), Matrix>>,
    lifts: Vec<Vec<Matrix>>,
    fiber_maps: Vec<HashMap<(usize, usize), Matrix>>,
}

impl StokesFunctor {
    /// Checks shapes only; functoriality is checked by [`validate_functor`].
    pub fn new(
        fibration: StokesFibration,
        dims: Vec<Vec<usize>>,
        covers: Vec<HashMap<(usize, usize), Matrix>>,
        lifts: Vec<Vec<Matrix>>,
    ) -> Result<Self> {
        let base = fibration.base();
        if dims.len() != base.num_objects()
            || covers.len() != base.num_objects()
            || lifts.len() != fibration.arrows().len()
        {
            return Err(Error::Dimension("functor data does not match the base".into()));
        }
        for x in 0..base.num_objects() {
            let fib = fibration.fiber(x);
            if dims[x].len() != fib.len() {
                return Err(Error::Dimension(format!(
                    "dimension list over {} has the wrong length",
                    base.object_name(x)
                )));
            }
            if covers[x].len() != fib.covers().len() {
                return Err(Error::Dimension(format!(
                    "expected one matrix per cover over {}",
                    base.object_name(x)
                )));
            }
            for &(a, b) in fib.covers() {
                let m = covers[x].get(&(a, b)).ok_or_else(|| {
                    Error::Invalid(format!("missing matrix for {}:{}<{}", base.object_name(x), fib.name(a), fib.name(b)))
                })?;
                if m.shape() != (dims[x][b], dims[x][a]) {
                    return Err(Error::Dimension(format!(
                        "matrix for {}:{}<{} is {}x{}, expected {}x{}",
                        base.object_name(x),
                        fib.name(a),
                        fib.name(b),
                        m.rows(),
                        m.cols(),
                        dims[x][b],
                        dims[x][a]
                    )));
                }
            }
        }
        for (g, arrow) in fibration.arrows().iter().enumerate() {
            let (x, y) = (arrow.source, arrow.target);
            if lifts[g].len() != fibration.fiber(x).len() {
                return Err(Error::Dimension(format!("expected one lift per element for {}", arrow.name)));
            }
            for a in 0..fibration.fiber(x).len() {
                let fa = fibration.transition(g)[a];
                if lifts[g][a].shape() != (dims[y][fa], dims[x][a]) {
                    return Err(Error::Dimension(format!(
                        "lift {}:{} has the wrong shape",
                        arrow.name,
                        fibration.fiber(x).name(a)
                    )));
                }
            }
        }
        let fiber_maps = (0..base.num_objects())
            .map(|x| compose_fiber_maps(&fibration, x, &dims[x], &covers[x]))
            .collect();
        Ok(StokesFunctor {
            fibration,
            dims,
            covers,
            lifts,
            fiber_maps,
        })
    }

    /// Builds a functor from a matrix for every generating arrow.
    pub fn from_generators<F>(fibration: StokesFibration, dims: Vec<Vec<usize>>, mut matrix: F) -> Result<Self>
    where
        F: FnMut(&Generator) -> Matrix,
    {
        let base = fibration.base();
        let mut covers = vec![HashMap::new(); base.num_objects()];
        let mut lifts: Vec<Vec<Matrix>> = fibration
            .arrows()
            .iter()
            .map(|a| Vec::with_capacity(fibration.fiber(a.source).len()))
            .collect();
        for gen in generators(&fibration) {
            let m = matrix(&gen);
            match gen {
                Generator::Cover { x, a, b } => {
                    covers[x].insert((a, b), m);
                }
                Generator::Lift { arrow, .. } => lifts[arrow].push(m),
            }
        }
        StokesFunctor::new(fibration, dims, covers, lifts)
    }

    /// The functor with every space zero.
    pub fn zero(fibration: &StokesFibration) -> Self {
        let dims = fibration.fibers().iter().map(|f| vec![0; f.len()]).collect();
        StokesFunctor::from_generators(fibration.clone(), dims, |_| Matrix::zeros(0, 0)).expect("zero functor")
    }

    pub fn fibration(&self) -> &StokesFibration {
        &self.fibration
    }

    pub fn dim(&self, x: usize, a: usize) -> usize {
        self.dims[x][a]
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    /// Dimensions in total-object order.
    pub fn dimension_vector(&self) -> Vec<usize> {
        self.dims.iter().flatten().copied().collect()
    }

    pub fn cover(&self, x: usize, a: usize, b: usize) -> &Matrix {
        &self.covers[x][&(a, b)]
    }

    pub fn lift(&self, arrow: usize, a: usize) -> &Matrix {
        &self.lifts[arrow][a]
    }

    /// `F(a ≤ b)` in the fiber over `x`.
    pub fn fiber_map(&self, x: usize, a: usize, b: usize) -> &Matrix {
        &self.fiber_maps[x][&(a, b)]
    }

    /// Composite of the lifts along a base morphism, starting at `a`.
    pub fn lift_along(&self, mor: &BaseMorphism, a: usize) -> Matrix {
        let mut cur = a;
        let mut m = Matrix::identity(self.dims[mor.source][a]);
        for &g in &mor.path {
            m = &self.lifts[g][cur] * &m;
            cur = self.fibration.transition(g)[cur];
        }
        m
    }

    pub fn generator_matrix(&self, gen: &Generator) -> &Matrix {
        match *gen {
            Generator::Cover { x, a, b } => self.cover(x, a, b),
            Generator::Lift { arrow, a } => self.lift(arrow, a),
        }
    }

    /// `F(m)` for every morphism of the total category.
    pub fn morphism_matrices(&self, t: &TotalCategory) -> Vec<Matrix> {
        t.morphisms
            .iter()
            .map(|m| {
                let bm = &t.base_morphisms[m.base];
                let (_, a) = t.objects[m.source];
                let (y, b) = t.objects[m.target];
                let fa = self.fibration.transport(bm, a);
                self.fiber_map(y, fa, b) * &self.lift_along(bm, a)
            })
            .collect()
    }

    /// Conjugates by an invertible matrix per total object:
    /// `F'(u) = g_t · F(u) · g_s⁻¹`.
    pub fn conjugate(&self, g: &[Vec<Matrix>]) -> Result<StokesFunctor> {
        let inv: Vec<Vec<Matrix>> = g
            .iter()
            .map(|row| {
                row.iter()
                    .map(|m| m.inverse().ok_or_else(|| Error::Invalid("conjugating matrix is singular".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let fib = self.fibration.clone();
        StokesFunctor::from_generators(fib.clone(), self.dims.clone(), |gen| {
            let ((x, a), (y, b)) = generator_ends(&fib, gen);
            &(&g[y][b] * self.generator_matrix(gen)) * &inv[x][a]
        })
    }
}

fn compose_fiber_maps(
    fibration: &StokesFibration,
    x: usize,
    dims: &[usize],
    covers: &HashMap<(usize, usize), Matrix>,
) -> HashMap<(usize, usize), Matrix> {
    let fib = fibration.fiber(x);
    let mut out = HashMap::new();
    for b in fib.linear_extension() {
        for a in fib.down_set(b, false) {
            let m = if a == b {
                Matrix::identity(dims[a])
            } else {
                let c = fib
                    .lower_covers(b)
                    .into_iter()
                    .find(|&c| fib.leq(a, c))
                    .expect("a lower cover above a");
                &covers[&(c, b)] * &out[&(a, c)]
            };
            out.insert((a, b), m);
        }
    }
    out
}

/// Checks `F(g∘f) = F(g)·F(f)` over every composable pair of morphisms.
/// DOT rendering: one node per total object labelled with its dimension,
/// generating arrows with their matrices' shapes; lifts are bold.
pub fn functor_dot(f: &StokesFunctor) -> String {
    let fib = f.fibration();
    let mut s = String::from("digraph functor {\n");
    for (x, a) in fib.total_objects() {
        let name = fib.total_object_name(x, a);
        s.push_str(&format!("  \"{name}\" [label=\"{name}\\ndim {}\"];\n", f.dim(x, a)));
    }
    for g in generators(fib) {
        let ((x, a), (y, b)) = generator_ends(fib, &g);
        let style = match g {
            Generator::Cover { .. } => "solid",
            Generator::Lift { .. } => "bold, color=blue",
        };
        let m = f.generator_matrix(&g);
        s.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{} ({}x{})\", style=\"{}\"];\n",
            fib.total_object_name(x, a),
            fib.total_object_name(y, b),
            generator_name(fib, &g),
            m.rows(),
            m.cols(),
            style
        ));
    }
    s.push_str("}\n");
    s
}

pub fn validate_functor(f: &StokesFunctor) -> Result<()> {
    let fib = f.fibration();
    fib.validate()?;
    let t = TotalCategory::new(fib);
    let mats = f.morphism_matrices(&t);
    let describe = |m: usize| {
        let mm = &t.morphisms[m];
        let (x, a) = t.objects[mm.source];
        let (y, b) = t.objects[mm.target];
        format!("{} -> {}", fib.total_object_name(x, a), fib.total_object_name(y, b))
    };
    for (fi, fm) in t.morphisms.iter().enumerate() {
        for &gi in t.outgoing(fm.target) {
            let h = t.compose(fi, gi)?;
            if mats[h] != &mats[gi] * &mats[fi] {
                return Err(Error::Invalid(format!(
                    "composite of {} and {} is not respected",
                    describe(fi),
                    describe(gi)
                )));
            }
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct FunctorRepr {
    fibration: StokesFibration,
    spaces: BTreeMap<String, usize>,
    arrows: BTreeMap<String, Matrix>,
}

impl Serialize for StokesFunctor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let fib = &self.fibration;
        let spaces = fib
            .total_objects()
            .into_iter()
            .map(|(x, a)| (fib.total_object_name(x, a), self.dims[x][a]))
            .collect();
        let arrows = generators(fib)
            .iter()
            .map(|g| (generator_name(fib, g), self.generator_matrix(g).clone()))
            .collect();
        FunctorRepr {
            fibration: fib.clone(),
            spaces,
            arrows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StokesFunctor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FunctorRepr::deserialize(d)?;
        functor_from_repr(repr).map_err(D::Error::custom)
    }
}

fn functor_from_repr(repr: FunctorRepr) -> Result<StokesFunctor> {
    let fib = repr.fibration;
    let mut dims: Vec<Vec<usize>> = fib.fibers().iter().map(|f| vec![0; f.len()]).collect();
    if repr.spaces.len() != fib.total_size() {
        return Err(Error::Invalid(format!(
            "{} spaces given for {} total objects",
            repr.spaces.len(),
            fib.total_size()
        )));
    }
    for (name, d) in &repr.spaces {
        let (x, a) = fib.parse_total_object(name)?;
        dims[x][a] = *d;
    }
    let gens = generators(&fib);
    if repr.arrows.len() != gens.len() {
        return Err(Error::Invalid(format!(
            "{} arrow matrices given for {} generating arrows",
            repr.arrows.len(),
            gens.len()
        )));
    }
    let mut missing = None;
    let f = StokesFunctor::from_generators(fib.clone(), dims, |g| {
        let name = generator_name(&fib, g);
        match repr.arrows.get(&name) {
            Some(m) => m.clone(),
            None => {
                missing.get_or_insert(name);
                Matrix::zeros(0, 0)
            }
        }
    });
    if let Some(name) = missing {
        return Err(Error::Invalid(format!("missing matrix for arrow {name}")));
    }
    f
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::base::{make_circle_base, make_poset_base};
    use crate::exact::Rational;
    use crate::fibration::tests::one_dimensional_example;
    use crate::poset::FinPoset;

    pub(crate) fn scalar(x: i64) -> Matrix {
        Matrix::from_i64(&[&[x]])
    }

    /// Rank-one local system on the trivial one-point-fiber circle with
    /// monodromy `lambda` on the last arrow.
    pub(crate) fn local_system(n: usize, lambda: i64) -> StokesFunctor {
        let fib = StokesFibration::constant(make_circle_base(n).unwrap(), FinPoset::singleton("*"));
        let dims = vec![vec![1]; 2 * n];
        let last = 2 * n - 1;
        StokesFunctor::from_generators(fib, dims, |g| match g {
            Generator::Lift { arrow, .. } if *arrow == last => scalar(lambda),
            _ => scalar(1),
        })
        .unwrap()
    }

    /// Rank-(1,1) functor on the two-point circle: F(a)=Q, F(b)=Q² on a0,
    /// F(b)=Q, F(a)=Q² on a1; the two point-to-arc gluings given by
    /// `glue[p][side]`, the off-diagonal coordinate of the non-minimal lift.
    pub(crate) fn one_dimensional_functor(glue: [[i64; 2]; 2]) -> StokesFunctor {
        let fib = one_dimensional_example();
        let dims = vec![vec![1, 1], vec![1, 1], vec![1, 2], vec![2, 1]];
        let e1 = Matrix::from_i64(&[&[1], &[0]]);
        StokesFunctor::from_generators(fib.clone(), dims, |g| match *g {
            Generator::Cover { .. } => e1.clone(),
            Generator::Lift { arrow, a } => {
                let p = arrow / 2;
                let side = arrow % 2;
                let target = fib.arrows()[arrow].target;
                // on a0 (index 2) the maximum is b; on a1 (index 3) it is a
                let top = if target == 2 { 1 } else { 0 };
                if a == top {
                    Matrix::from_i64(&[&[glue[p][side]], &[1]])
                } else {
                    scalar(1)
                }
            }
        })
        .unwrap()
    }

    #[test]
    fn validation_examples() {
        let i = one_dimensional_example();
        assert!(validate_functor(&StokesFunctor::zero(&i)).is_ok());
        assert!(validate_functor(&local_system(3, 2)).is_ok());
        assert!(validate_functor(&one_dimensional_functor([[0, 1], [2, 3]])).is_ok());

        // a square of covers whose two composites disagree
        let square = FinPoset::from_named_relations(
            &["x", "l", "r", "y"],
            &[("x", "l"), ("x", "r"), ("l", "y"), ("r", "y")],
        )
        .unwrap();
        let fib = StokesFibration::constant(make_poset_base(FinPoset::singleton("*")).unwrap(), square.clone());
        let dims = vec![vec![1; 4]];
        let l = square.index_of("l").unwrap();
        let bad = StokesFunctor::from_generators(fib, dims, |g| match *g {
            Generator::Cover { a, b, .. } if a == l && b == 3 => scalar(2),
            _ => scalar(1),
        })
        .unwrap();
        let err = validate_functor(&bad).unwrap_err().to_string();
        assert!(err.contains("not respected"), "{err}");
    }

    #[test]
    fn shapes_are_checked() {
        let i = one_dimensional_example();
        let dims = vec![vec![1, 1]; 4];
        let r = StokesFunctor::from_generators(i, dims, |_| Matrix::zeros(2, 2));
        assert!(r.is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = one_dimensional_functor([[0, 1], [0, 0]]);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"(a0,b)\":2"));
        assert!(s.contains("\"p1-:b\""));
        let back: StokesFunctor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn conjugation_preserves_functoriality() {
        let f = one_dimensional_functor([[1, 0], [0, 2]]);
        let g: Vec<Vec<Matrix>> = f
            .dims()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&d| {
                        let mut m = Matrix::identity(d);
                        if d == 2 {
                            m.set(0, 1, Rational::from_integer(3));
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let c = f.conjugate(&g).unwrap();
        assert!(validate_functor(&c).is_ok());
        assert_ne!(c, f);
    }
}
