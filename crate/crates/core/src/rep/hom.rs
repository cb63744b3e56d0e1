//! Natural transformations and the normalized cochain complex computing
//! `Ext(F, G)` over the total category.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::StokesFunctor;
use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational, SparseMatrix};
use crate::total::{generator_ends, generators, TotalCategory};

/// One matrix per total object, in `total_objects` order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NatTrans {
    pub components: Vec<Matrix>,
}

impl NatTrans {
    pub fn new(components: Vec<Matrix>) -> Self {
        NatTrans { components }
    }

    pub fn is_natural(&self, f: &StokesFunctor, g: &StokesFunctor) -> bool {
        let fib = f.fibration();
        if fib != g.fibration() || self.components.len() != fib.total_size() {
            return false;
        }
        let idx = object_indices(f);
        for (o, m) in self.components.iter().enumerate() {
            let (x, a) = idx.1[o];
            if m.shape() != (g.dim(x, a), f.dim(x, a)) {
                return false;
            }
        }
        generators(fib).iter().all(|gen| {
            let (s, t) = generator_ends(fib, gen);
            let (s, t) = (idx.0[&s], idx.0[&t]);
            g.generator_matrix(gen) * &self.components[s] == &self.components[t] * f.generator_matrix(gen)
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.components.iter().all(|m| m.is_square() && m.is_invertible())
    }
}

type ObjectIndex = (HashMap<(usize, usize), usize>, Vec<(usize, usize)>);

fn object_indices(f: &StokesFunctor) -> ObjectIndex {
    let objs = f.fibration().total_objects();
    (objs.iter().enumerate().map(|(k, &o)| (o, k)).collect(), objs)
}

/// A basis of `Hom(F, G)`, by an exact sparse kernel.
pub fn hom_space(f: &StokesFunctor, g: &StokesFunctor) -> Result<Vec<NatTrans>> {
    let fib = f.fibration();
    if fib != g.fibration() {
        return Err(Error::Invalid("functors live on different fibrations".into()));
    }
    let (idx, objs) = object_indices(f);
    let mut offsets = Vec::with_capacity(objs.len());
    let mut total = 0;
    for &(x, a) in &objs {
        offsets.push(total);
        total += g.dim(x, a) * f.dim(x, a);
    }
    // η_o[i][j] sits at offsets[o] + i·cols + j
    let var = |o: usize, i: usize, j: usize| {
        let (x, a) = objs[o];
        offsets[o] + i * f.dim(x, a) + j
    };
    let mut sys = SparseMatrix::new(total);
    for gen in generators(fib) {
        let (sp, tp) = generator_ends(fib, &gen);
        let (s, t) = (idx[&sp], idx[&tp]);
        let (gu, fu) = (g.generator_matrix(&gen), f.generator_matrix(&gen));
        for i in 0..gu.rows() {
            for j in 0..fu.cols() {
                let mut row = Vec::new();
                for k in 0..gu.cols() {
                    let v = gu.get(i, k);
                    if !v.is_zero() {
                        row.push((var(s, k, j), v.clone()));
                    }
                }
                for k in 0..fu.rows() {
                    let v = fu.get(k, j);
                    if !v.is_zero() {
                        row.push((var(t, i, k), -v));
                    }
                }
                sys.push_row(row);
            }
        }
    }
    Ok(sys
        .kernel()
        .into_iter()
        .map(|v| {
            let components = objs
                .iter()
                .enumerate()
                .map(|(o, &(x, a))| {
                    let (r, c) = (g.dim(x, a), f.dim(x, a));
                    Matrix::from_entries(r, c, v[offsets[o]..offsets[o] + r * c].to_vec()).expect("block shape")
                })
                .collect();
            NatTrans { components }
        })
        .collect())
}

pub fn natural_endomorphism_dim(f: &StokesFunctor) -> Result<usize> {
    Ok(hom_space(f, f)?.len())
}

/// Searches `Hom(F, G)` for an isomorphism by trying seeded random
/// combinations of a basis.
pub fn find_isomorphism(f: &StokesFunctor, g: &StokesFunctor, seed: u64) -> Result<Option<NatTrans>> {
    if f.dims() != g.dims() {
        return Ok(None);
    }
    let basis = hom_space(f, g)?;
    let zero: Vec<Matrix> = f
        .fibration()
        .total_objects()
        .iter()
        .map(|&(x, a)| Matrix::zeros(g.dim(x, a), f.dim(x, a)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 {
        let mut comps = zero.clone();
        for b in &basis {
            let c = Rational::from_integer(rng.gen_range(-50..=50));
            for (m, bm) in comps.iter_mut().zip(&b.components) {
                *m = &*m + &bm.scale(&c);
            }
        }
        let t = NatTrans::new(comps);
        if t.is_isomorphism() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// `C^ℓ = ⊕_{o_0 → … → o_ℓ} Hom(F(o_0), G(o_ℓ))` over nondegenerate chains.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub dims: Vec<usize>,
    /// `d^ℓ : C^ℓ → C^{ℓ+1}`.
    pub differentials: Vec<SparseMatrix>,
}

impl HomComplex {
    pub fn cohomology(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(|d| d.rank()).collect();
        (0..self.dims.len())
            .map(|n| {
                let out = ranks.get(n).copied().unwrap_or(0);
                let inc = if n == 0 { 0 } else { ranks[n - 1] };
                self.dims[n] - out - inc
            })
            .collect()
    }

    /// `d^{ℓ+1} ∘ d^ℓ = 0` for every `ℓ`.
    pub fn squares_to_zero(&self) -> bool {
        self.differentials.windows(2).all(|w| {
            let d0 = w[0].to_dense();
            let d1 = w[1].to_dense();
            (&d1 * &d0).is_zero()
        })
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(n, &d)| if n % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ds: Vec<Matrix> = self.differentials.iter().map(|d| d.to_dense()).collect();
        serde_json::json!({ "dims": self.dims, "differentials": ds })
    }
}

pub fn hom_complex(f: &StokesFunctor, g: &StokesFunctor) -> Result<HomComplex> {
    if f.fibration() != g.fibration() {
        return Err(Error::Invalid("functors live on different fibrations".into()));
    }
    let t = TotalCategory::new(f.fibration());
    let maxlen = t.max_chain_length()?;
    let chains = t.nondegenerate_chains(maxlen)?;
    let fm = f.morphism_matrices(&t);
    let gm = g.morphism_matrices(&t);
    let fd: Vec<usize> = t.objects.iter().map(|&(x, a)| f.dim(x, a)).collect();
    let gd: Vec<usize> = t.objects.iter().map(|&(x, a)| g.dim(x, a)).collect();
    let end = |start: usize, arrows: &[usize]| arrows.last().map_or(start, |&m| t.morphisms[m].target);

    // per degree: chain -> offset of its block
    let mut offsets: Vec<HashMap<(usize, Vec<usize>), usize>> = Vec::new();
    let mut dims = Vec::new();
    for level in &chains {
        let mut map = HashMap::new();
        let mut off = 0;
        for c in level {
            map.insert((c.start, c.arrows.clone()), off);
            off += gd[end(c.start, &c.arrows)] * fd[c.start];
        }
        offsets.push(map);
        dims.push(off);
    }

    let mut differentials = Vec::new();
    for n in 0..chains.len().saturating_sub(1) {
        let mut d = SparseMatrix::with_rows(dims[n + 1], dims[n]);
        let src = &offsets[n];
        for c in &chains[n + 1] {
            let row_off = offsets[n + 1][&(c.start, c.arrows.clone())];
            let o0 = c.start;
            let on = end(o0, &c.arrows);
            let cols = fd[o0];
            let entry = |i: usize, j: usize| row_off + i * cols + j;
            // G(f_{n+1}) φ(f_1..f_n)
            let last = *c.arrows.last().expect("nonempty chain");
            let head = &c.arrows[..n];
            let mid = end(o0, head);
            let col_off = src[&(o0, head.to_vec())];
            let gl = &gm[last];
            for i in 0..gd[on] {
                for j in 0..cols {
                    for k in 0..gd[mid] {
                        let v = gl.get(i, k);
                        if !v.is_zero() {
                            d.add(entry(i, j), col_off + k * cols + j, v);
                        }
                    }
                }
            }
            // Σ (−1)^i φ(…, f_{i+1}∘f_i, …)
            for i in 1..=n {
                let mut merged = c.arrows[..i - 1].to_vec();
                merged.push(t.compose(c.arrows[i - 1], c.arrows[i])?);
                merged.extend_from_slice(&c.arrows[i + 1..]);
                let col_off = src[&(o0, merged)];
                let sign = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
                for r in 0..gd[on] {
                    for s in 0..cols {
                        d.add(entry(r, s), col_off + r * cols + s, &sign);
                    }
                }
            }
            // (−1)^{n+1} φ(f_2..f_{n+1}) F(f_1)
            let first = c.arrows[0];
            let o1 = t.morphisms[first].target;
            let col_off = src[&(o1, c.arrows[1..].to_vec())];
            let sign = if (n + 1) % 2 == 0 { Rational::one() } else { -Rational::one() };
            let ff = &fm[first];
            let inner = fd[o1];
            for i in 0..gd[on] {
                for j in 0..cols {
                    for k in 0..inner {
                        let v = ff.get(k, j);
                        if !v.is_zero() {
                            d.add(entry(i, j), col_off + i * inner + k, &(&sign * v));
                        }
                    }
                }
            }
        }
        differentials.push(d);
    }
    Ok(HomComplex { dims, differentials })
}

pub fn ext_dims(f: &StokesFunctor, g: &StokesFunctor) -> Result<Vec<usize>> {
    Ok(hom_complex(f, g)?.cohomology())
}

/// Cohomology of `Hom(F, F)[1]`: `dims[k]` sits in degree `start + k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TangentDims {
    pub start: i64,
    pub dims: Vec<usize>,
}

pub fn tangent_dims(f: &StokesFunctor) -> Result<TangentDims> {
    Ok(TangentDims {
        start: -1,
        dims: ext_dims(f, f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{local_system, one_dimensional_functor};
    use super::*;
    use crate::base::{make_circle_base, make_poset_base};
    use crate::fibration::StokesFibration;
    use crate::poset::FinPoset;
    use crate::total::Generator;

    #[test]
    fn point_complex() {
        let fib = StokesFibration::constant(
            make_poset_base(FinPoset::singleton("*")).unwrap(),
            FinPoset::singleton("*"),
        );
        let f = StokesFunctor::from_generators(fib, vec![vec![1]], |_| Matrix::zeros(0, 0)).unwrap();
        let c = hom_complex(&f, &f).unwrap();
        assert_eq!(c.dims, vec![1]);
        assert_eq!(c.cohomology(), vec![1]);
    }

    #[test]
    fn circle_local_system_complex() {
        let f = local_system(1, 1);
        let c = hom_complex(&f, &f).unwrap();
        assert_eq!(c.dims, vec![2, 2]);
        assert!(c.squares_to_zero());
        for lambda in [1, 2, -3] {
            assert_eq!(ext_dims(&local_system(2, lambda), &local_system(2, lambda)).unwrap(), vec![1, 1]);
        }
    }

    #[test]
    fn rank_two_local_system() {
        let fib = StokesFibration::constant(make_circle_base(1).unwrap(), FinPoset::singleton("*"));
        let f = StokesFunctor::from_generators(fib, vec![vec![2], vec![2]], |g| match g {
            Generator::Lift { arrow: 1, .. } => Matrix::from_i64(&[&[1, 0], &[0, 2]]),
            _ => Matrix::identity(2),
        })
        .unwrap();
        assert_eq!(ext_dims(&f, &f).unwrap(), vec![2, 2]);
        assert_eq!(tangent_dims(&f).unwrap().start, -1);
    }

    #[test]
    fn chain_fiber_complex() {
        let fib = StokesFibration::constant(
            make_poset_base(FinPoset::singleton("*")).unwrap(),
            FinPoset::chain(&["a", "b"]),
        );
        let f = StokesFunctor::from_generators(fib, vec![vec![1, 1]], |_| Matrix::identity(1)).unwrap();
        let c = hom_complex(&f, &f).unwrap();
        assert_eq!(c.dims, vec![2, 1]);
        assert_eq!(c.cohomology(), vec![1, 0]);
    }

    #[test]
    fn zero_functor_complex() {
        let f = StokesFunctor::zero(&crate::fibration::tests::one_dimensional_example());
        assert!(ext_dims(&f, &f).unwrap().iter().all(|&d| d == 0));
    }

    #[test]
    fn isomorphism_search() {
        let f = one_dimensional_functor([[1, 2], [0, 1]]);
        let g: Vec<Vec<Matrix>> = f
            .dims()
            .iter()
            .map(|r| r.iter().map(|&d| Matrix::identity(d).scale(&Rational::from_integer(3))).collect())
            .collect();
        let h = f.conjugate(&g).unwrap();
        let iso = find_isomorphism(&f, &h, 7).unwrap().unwrap();
        assert!(iso.is_natural(&f, &h));
        assert!(find_isomorphism(&local_system(2, 2), &local_system(2, 3), 7).unwrap().is_none());
        assert!(ext_dims(&f, &f).unwrap()[0] >= 1);
    }
}
