//! Global splittings `i_!(V) ≅ F`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::hom::NatTrans;
use super::ops::{grade, induce};
use super::split::{block_layout, punctual_splitting};
use super::StokesFunctor;
use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational, SparseMatrix};
use crate::fibration::{FibrationMorphism, StokesFibration};
use crate::strategy::Registry;
use crate::total::Generator;

/// `V` on the fiberwise-discrete fibration and an isomorphism `i_!(V) → F`.
#[derive(Clone, Debug)]
pub struct GlobalSplitting {
    pub v: StokesFunctor,
    pub induced: StokesFunctor,
    pub iso: NatTrans,
}

impl GlobalSplitting {
    /// Naturality and invertibility of every component.
    pub fn verify(&self, f: &StokesFunctor) -> bool {
        self.iso.is_natural(&self.induced, f) && self.iso.is_isomorphism()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fib = self.induced.fibration();
        let iso: serde_json::Map<String, serde_json::Value> = fib
            .total_objects()
            .iter()
            .zip(&self.iso.components)
            .map(|(&(x, a), m)| (fib.total_object_name(x, a), serde_json::to_value(m).expect("matrix json")))
            .collect();
        serde_json::json!({ "graded": self.v, "iso": iso })
    }
}

/// Witness that no global splitting exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitFailure {
    pub reason: String,
    /// Constraints combined by an infeasibility certificate.
    pub constraints: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    Split(Box<GlobalSplitting>),
    NotSplit(SplitFailure),
}

pub trait SplitStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn split(&self, f: &StokesFunctor) -> Result<SplitOutcome>;
}

/// The inclusion `I^set → I`.
fn set_inclusion(i: &StokesFibration) -> Result<FibrationMorphism> {
    let maps = i.fibers().iter().map(|f| (0..f.len()).collect()).collect();
    FibrationMorphism::new(i.fiberwise_set(), i.clone(), maps)
}

fn assemble(f: &StokesFunctor, v: StokesFunctor, sections: &[Vec<Matrix>]) -> Result<GlobalSplitting> {
    let fib = f.fibration();
    let induced = induce(&set_inclusion(fib)?, &v)?;
    let components = fib
        .total_objects()
        .iter()
        .map(|&(x, a)| {
            let mut m = Matrix::zeros(f.dim(x, a), 0);
            for b in fib.fiber(x).down_set(a, false) {
                m = m.hstack(&(f.fiber_map(x, b, a) * &sections[x][b]));
            }
            m
        })
        .collect();
    Ok(GlobalSplitting {
        v,
        induced,
        iso: NatTrans::new(components),
    })
}

/// One exact linear system for a natural family of sections
/// `σ_a : V_a → F(a)` of the top projections.
pub struct LinearSplit;

impl SplitStrategy for LinearSplit {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn split(&self, f: &StokesFunctor) -> Result<SplitOutcome> {
        let fib = f.fibration();
        let sp = punctual_splitting(f)?;
        let gr = grade(&FibrationMorphism::identity(fib), f)?;
        let objs = fib.total_objects();
        let mut offsets = vec![Vec::new(); fib.base().num_objects()];
        let mut total = 0;
        for &(x, a) in &objs {
            offsets[x].push(total);
            total += f.dim(x, a) * sp[x].dims[a];
        }
        // σ_(x,a)[i][j] at offsets[x][a] + i·v_a + j
        let var = |x: usize, a: usize, i: usize, j: usize| offsets[x][a] + i * sp[x].dims[a] + j;
        let mut sys = SparseMatrix::new(total);
        let mut rhs = Vec::new();
        let mut labels = Vec::new();
        for &(x, a) in &objs {
            let q = sp[x].top_projection(f, a);
            let v = sp[x].dims[a];
            for i in 0..v {
                for j in 0..v {
                    sys.push_row((0..q.cols()).map(|k| (var(x, a, k, j), q.get(i, k).clone())));
                    rhs.push(if i == j { Rational::one() } else { Rational::zero() });
                    labels.push(format!("section at {}", fib.total_object_name(x, a)));
                }
            }
        }
        for (g, ar) in fib.arrows().iter().enumerate() {
            let (x, y) = (ar.source, ar.target);
            for a in 0..fib.fiber(x).len() {
                let fa = fib.transition(g)[a];
                let phi = f.lift(g, a);
                let grm = gr.lift(g, a);
                let name = crate::total::generator_name(fib, &Generator::Lift { arrow: g, a });
                for i in 0..f.dim(y, fa) {
                    for j in 0..sp[x].dims[a] {
                        let mut row: Vec<(usize, Rational)> = (0..phi.cols())
                            .map(|k| (var(x, a, k, j), phi.get(i, k).clone()))
                            .collect();
                        row.extend((0..grm.rows()).map(|k| (var(y, fa, i, k), -grm.get(k, j))));
                        sys.push_row(row);
                        rhs.push(Rational::zero());
                        labels.push(format!("naturality along {name}"));
                    }
                }
            }
        }
        match sys.solve(&rhs) {
            Some(sol) => {
                let sections: Vec<Vec<Matrix>> = (0..fib.base().num_objects())
                    .map(|x| {
                        (0..fib.fiber(x).len())
                            .map(|a| {
                                let (d, v) = (f.dim(x, a), sp[x].dims[a]);
                                let o = offsets[x][a];
                                Matrix::from_entries(d, v, sol[o..o + d * v].to_vec()).expect("section shape")
                            })
                            .collect()
                    })
                    .collect();
                Ok(SplitOutcome::Split(Box::new(assemble(f, gr, &sections)?)))
            }
            None => {
                let y = sys.infeasibility_certificate(&rhs).unwrap_or_default();
                let constraints: BTreeSet<String> = y
                    .iter()
                    .zip(&labels)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(_, l)| l.clone())
                    .collect();
                Ok(SplitOutcome::NotSplit(SplitFailure {
                    reason: "no natural family of sections of the top projections exists".into(),
                    constraints: constraints.into_iter().collect(),
                }))
            }
        }
    }
}

/// Transports the splitting at an initial base object along the unique
/// morphisms out of it.
pub struct InitialObjectSplit;

impl SplitStrategy for InitialObjectSplit {
    fn name(&self) -> &'static str {
        "initial-object"
    }

    fn split(&self, f: &StokesFunctor) -> Result<SplitOutcome> {
        let fib = f.fibration();
        let base = fib.base();
        let Some(x0) = base.initial_object() else {
            return Err(Error::Precondition("the base has no initial object".into()));
        };
        let s0 = super::split::split_fiber(f, x0)?;
        let n0 = fib.fiber(x0).len();
        let to: Vec<_> = (0..base.num_objects())
            .map(|y| base.hom(x0, y).into_iter().next().expect("initial object reaches every object"))
            .collect();
        let image = |y: usize, b: usize| fib.transport(&to[y], b);
        // v(y, c) = ⊕_{f(b) = c} V_b
        let over = |y: usize, c: usize| -> Vec<usize> { (0..n0).filter(|&b| image(y, b) == c).collect() };
        let dims: Vec<Vec<usize>> = (0..base.num_objects())
            .map(|y| (0..fib.fiber(y).len()).map(|c| over(y, c).iter().map(|&b| s0.dims[b]).sum()).collect())
            .collect();
        let set = fib.fiberwise_set();
        let v = StokesFunctor::from_generators(set, dims, |g| match *g {
            Generator::Lift { arrow, a } => {
                let ar = &fib.arrows()[arrow];
                let from = block_layout(&over(ar.source, a), &s0.dims);
                let to_l = block_layout(&over(ar.target, fib.transition(arrow)[a]), &s0.dims);
                super::ops::inclusion(&from, &to_l, &s0.dims)
            }
            Generator::Cover { .. } => unreachable!("discrete fibers have no covers"),
        })?;
        // σ_(y,c) = F(x0 → y) on the V_b with f(b) = c
        let sections: Vec<Vec<Matrix>> = (0..base.num_objects())
            .map(|y| {
                (0..fib.fiber(y).len())
                    .map(|c| {
                        let mut m = Matrix::zeros(f.dim(y, c), 0);
                        for b in over(y, c) {
                            m = m.hstack(&(&f.lift_along(&to[y], b) * &s0.sections[b]));
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let out = assemble(f, v, &sections)?;
        if !out.iso.is_isomorphism() {
            return Ok(SplitOutcome::NotSplit(SplitFailure {
                reason: "transported splitting is not invertible; the functor is not cocartesian".into(),
                constraints: Vec::new(),
            }));
        }
        Ok(SplitOutcome::Split(Box::new(out)))
    }
}

pub fn split_strategies() -> Registry<dyn SplitStrategy> {
    let mut r: Registry<dyn SplitStrategy> = Registry::new();
    r.register(LinearSplit.name(), Box::new(LinearSplit));
    r.register(InitialObjectSplit.name(), Box::new(InitialObjectSplit));
    r
}

pub fn split_global(f: &StokesFunctor) -> Result<SplitOutcome> {
    LinearSplit.split(f)
}

pub fn split_global_with(f: &StokesFunctor, strategy: &str) -> Result<SplitOutcome> {
    split_strategies().get(strategy)?.split(f)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{local_system, one_dimensional_functor};
    use super::*;
    use crate::base::make_poset_base;
    use crate::poset::FinPoset;

    fn unwrap_split(o: SplitOutcome) -> GlobalSplitting {
        match o {
            SplitOutcome::Split(g) => *g,
            SplitOutcome::NotSplit(w) => panic!("not split: {w:?}"),
        }
    }

    #[test]
    fn matching_gluings_split() {
        let f = one_dimensional_functor([[2, 5], [5, 2]]);
        let g = unwrap_split(split_global(&f).unwrap());
        assert!(g.verify(&f));
    }

    #[test]
    fn mismatched_gluing_does_not_split() {
        let f = one_dimensional_functor([[1, 0], [0, 0]]);
        assert!(super::super::is_stokes(&f));
        match split_global(&f).unwrap() {
            SplitOutcome::NotSplit(w) => assert!(!w.constraints.is_empty()),
            SplitOutcome::Split(_) => panic!("expected no splitting"),
        }
    }

    #[test]
    fn local_systems_split_with_monodromy() {
        let f = local_system(3, 7);
        let g = unwrap_split(split_global(&f).unwrap());
        assert!(g.verify(&f));
        assert_eq!(g.v.dims(), f.dims());
    }

    #[test]
    fn initial_object_strategy() {
        // base x<y, fibers {a,b} discrete over x and a<b over y
        let base = make_poset_base(FinPoset::chain(&["x", "y"])).unwrap();
        let fib = StokesFibration::new(
            base,
            vec![
                FinPoset::antichain(&["a", "b"]),
                FinPoset::chain(&["a", "b"]),
            ],
            vec![vec![0, 1]],
        )
        .unwrap();
        let f = StokesFunctor::from_generators(fib, vec![vec![1, 1], vec![1, 2]], |g| match *g {
            Generator::Cover { .. } => Matrix::from_i64(&[&[1], &[0]]),
            Generator::Lift { a: 0, .. } => Matrix::from_i64(&[&[1]]),
            Generator::Lift { .. } => Matrix::from_i64(&[&[3], &[1]]),
        })
        .unwrap();
        for name in split_strategies().names() {
            let g = unwrap_split(split_global_with(&f, name).unwrap());
            assert!(g.verify(&f), "{name}");
        }
        assert!(split_global_with(&local_system(1, 1), "initial-object").is_err());
        assert!(split_global_with(&f, "greedy").is_err());
    }
}
