//! Seeded random generators for matrices, poset representations and
//! Stokes functors.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational, SparseMatrix};
use crate::fibration::StokesFibration;
use crate::poset::FinPoset;
use crate::rep::StokesFunctor;
use crate::total::Generator;

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Matrix {
    let entries = (0..rows * cols)
        .map(|_| Rational::from_integer(rng.gen_range(-bound..=bound)))
        .collect();
    Matrix::from_entries(rows, cols, entries).expect("entry count")
}

pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n, bound.max(1));
        if m.is_invertible() {
            return m;
        }
    }
}

/// Random kernel element, as a matrix per unknown block.
fn random_kernel_point<R: Rng + ?Sized>(rng: &mut R, sys: &SparseMatrix, bound: i64) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); sys.cols()];
    for v in sys.kernel() {
        let c = Rational::from_integer(rng.gen_range(-bound..=bound));
        if c.is_zero() {
            continue;
        }
        for (xi, vi) in x.iter_mut().zip(&v) {
            if !vi.is_zero() {
                *xi += &(&c * vi);
            }
        }
    }
    x
}

/// Cover matrices of a random representation of `poset` with the given
/// dimensions. Each element's incoming covers are a random solution of
/// the commutativity constraints with what lies below.
pub fn random_poset_representation<R: Rng + ?Sized>(
    rng: &mut R,
    poset: &FinPoset,
    dims: &[usize],
) -> HashMap<(usize, usize), Matrix> {
    let mut covers: HashMap<(usize, usize), Matrix> = HashMap::new();
    let mut below: HashMap<(usize, usize), Matrix> = HashMap::new();
    for b in poset.linear_extension() {
        below.insert((b, b), Matrix::identity(dims[b]));
        let lower = poset.lower_covers(b);
        let mut offsets = Vec::new();
        let mut total = 0;
        for &c in &lower {
            offsets.push(total);
            total += dims[b] * dims[c];
        }
        let var = |ci: usize, i: usize, k: usize| offsets[ci] + i * dims[lower[ci]] + k;
        let mut sys = SparseMatrix::new(total);
        for a in poset.down_set(b, true) {
            let through: Vec<usize> = (0..lower.len()).filter(|&ci| poset.leq(a, lower[ci])).collect();
            // every route a ≤ c ⋖ b must agree with the first one
            for w in through.windows(2) {
                let (c1, c2) = (w[0], w[1]);
                let (m1, m2) = (&below[&(a, lower[c1])], &below[&(a, lower[c2])]);
                for i in 0..dims[b] {
                    for j in 0..dims[a] {
                        let mut row = Vec::new();
                        for k in 0..dims[lower[c1]] {
                            row.push((var(c1, i, k), m1.get(k, j).clone()));
                        }
                        for k in 0..dims[lower[c2]] {
                            row.push((var(c2, i, k), -m2.get(k, j)));
                        }
                        sys.push_row(row);
                    }
                }
            }
        }
        let x = random_kernel_point(rng, &sys, 3);
        for (ci, &c) in lower.iter().enumerate() {
            let m = Matrix::from_entries(dims[b], dims[c], x[offsets[ci]..offsets[ci] + dims[b] * dims[c]].to_vec())
                .expect("cover shape");
            covers.insert((c, b), m);
        }
        for a in poset.down_set(b, true) {
            let ci = lower.iter().position(|&c| poset.leq(a, c)).expect("a lower cover above a");
            let m = &covers[&(lower[ci], b)] * &below[&(a, lower[ci])];
            below.insert((a, b), m);
        }
    }
    covers
}

/// Every fiber has the same elements and every transition is the identity.
pub fn has_constant_names(fib: &StokesFibration) -> bool {
    let Some(first) = fib.fibers().first() else {
        return true;
    };
    fib.fibers().iter().all(|f| f.elements() == first.elements())
        && fib.transitions().iter().all(|t| t.iter().enumerate().all(|(k, &v)| k == v))
}

/// No two nonidentity base morphisms compose.
fn is_zigzag(fib: &StokesFibration) -> bool {
    fib.base().morphisms().iter().all(|m| m.path.len() <= 1)
}

fn block_members(p: &FinPoset, a: usize) -> Vec<usize> {
    p.down_set(a, false)
}

fn offsets_in(p: &FinPoset, a: usize, ranks: &[usize]) -> HashMap<usize, usize> {
    let mut off = 0;
    block_members(p, a)
        .into_iter()
        .map(|b| {
            let o = off;
            off += ranks[b];
            (b, o)
        })
        .collect()
}

fn induced_dims(fib: &StokesFibration, ranks: &[usize]) -> Vec<Vec<usize>> {
    fib.fibers()
        .iter()
        .map(|p| (0..p.len()).map(|a| block_members(p, a).iter().map(|&b| ranks[b]).sum()).collect())
        .collect()
}

/// Inclusion of the blocks of `⊕_{b ≤_P a} V_b` into `⊕_{b ≤_Q a'} V_b`.
fn block_inclusion(p: &FinPoset, a: usize, q: &FinPoset, a2: usize, ranks: &[usize]) -> Matrix {
    let (from, to) = (offsets_in(p, a, ranks), offsets_in(q, a2, ranks));
    let rows: usize = block_members(q, a2).iter().map(|&b| ranks[b]).sum();
    let cols: usize = block_members(p, a).iter().map(|&b| ranks[b]).sum();
    let mut m = Matrix::zeros(rows, cols);
    for (b, fo) in from {
        let to_off = to[&b];
        m.paste(to_off, fo, &Matrix::identity(ranks[b]));
    }
    m
}

/// Conjugates every space by a random invertible matrix.
pub fn random_conjugate<R: Rng + ?Sized>(rng: &mut R, f: &StokesFunctor) -> StokesFunctor {
    let g: Vec<Vec<Matrix>> = f
        .dims()
        .iter()
        .map(|r| r.iter().map(|&d| random_invertible(rng, d, 2)).collect())
        .collect();
    f.conjugate(&g).expect("invertible conjugation")
}

/// `i_!(W)` for ranks `W_b` on a fibration with constant names, in random
/// coordinates.
pub fn random_induced<R: Rng + ?Sized>(rng: &mut R, fib: &StokesFibration, ranks: &[usize]) -> Result<StokesFunctor> {
    if !has_constant_names(fib) {
        return Err(Error::Precondition("random_induced needs constant names and identity transitions".into()));
    }
    let dims = induced_dims(fib, ranks);
    let f = StokesFunctor::from_generators(fib.clone(), dims, |g| match *g {
        Generator::Cover { x, a, b } => block_inclusion(fib.fiber(x), a, fib.fiber(x), b, ranks),
        Generator::Lift { arrow, a } => {
            let ar = &fib.arrows()[arrow];
            block_inclusion(fib.fiber(ar.source), a, fib.fiber(ar.target), a, ranks)
        }
    })?;
    Ok(random_conjugate(rng, &f))
}

/// A functor in block form over a zigzag base with constant names: the
/// lift on block `V_b` is `incl ∘ M_b` with `M_b : V_b → ⊕_{c ≤ b} V_c`
/// random. The diagonal component of each `M_b` is invertible when
/// `stokes`, and one of them is singular otherwise.
pub fn random_block_functor<R: Rng + ?Sized>(
    rng: &mut R,
    fib: &StokesFibration,
    ranks: &[usize],
    stokes: bool,
) -> Result<StokesFunctor> {
    if !has_constant_names(fib) || !is_zigzag(fib) {
        return Err(Error::Precondition(
            "block functors need constant names, identity transitions and no composable arrows".into(),
        ));
    }
    let n = ranks.len();
    let arrows = fib.arrows();
    let breakable: Vec<(usize, usize)> = (0..arrows.len())
        .flat_map(|g| (0..n).filter(|&b| ranks[b] > 0).map(move |b| (g, b)))
        .collect();
    let broken = if stokes || breakable.is_empty() {
        None
    } else {
        Some(breakable[rng.gen_range(0..breakable.len())])
    };
    // M[γ][b] : V_b → F_y(b)
    let mut m: Vec<Vec<Matrix>> = Vec::with_capacity(arrows.len());
    for (g, ar) in arrows.iter().enumerate() {
        let q = fib.fiber(ar.target);
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            let offs = offsets_in(q, b, ranks);
            let rows: usize = block_members(q, b).iter().map(|&c| ranks[c]).sum();
            let mut mb = random_matrix(rng, rows, ranks[b], 2);
            let mut diag = random_invertible(rng, ranks[b], 2);
            if broken == Some((g, b)) {
                for r in 0..ranks[b] {
                    diag.set(r, 0, Rational::zero());
                }
            }
            mb.paste(offs[&b], 0, &diag);
            row.push(mb);
        }
        m.push(row);
    }
    let dims = induced_dims(fib, ranks);
    let f = StokesFunctor::from_generators(fib.clone(), dims, |g| match *g {
        Generator::Cover { x, a, b } => block_inclusion(fib.fiber(x), a, fib.fiber(x), b, ranks),
        Generator::Lift { arrow, a } => {
            let ar = &arrows[arrow];
            let (p, q) = (fib.fiber(ar.source), fib.fiber(ar.target));
            let from = offsets_in(p, a, ranks);
            let rows: usize = block_members(q, a).iter().map(|&c| ranks[c]).sum();
            let mut out = Matrix::zeros(rows, block_members(p, a).iter().map(|&b| ranks[b]).sum());
            for (b, fo) in from {
                let block = &block_inclusion(q, b, q, a, ranks) * &m[arrow][b];
                out.paste(0, fo, &block);
            }
            out
        }
    })?;
    Ok(random_conjugate(rng, &f))
}

/// Random fiber representations followed by random lifts solving the
/// naturality constraints; typically neither split nor cocartesian.
pub fn random_generic_functor<R: Rng + ?Sized>(
    rng: &mut R,
    fib: &StokesFibration,
    max_dim: usize,
) -> Result<StokesFunctor> {
    if !is_zigzag(fib) {
        return Err(Error::Precondition("generic functors need a base without composable arrows".into()));
    }
    let dims: Vec<Vec<usize>> = fib
        .fibers()
        .iter()
        .map(|p| (0..p.len()).map(|_| rng.gen_range(0..=max_dim)).collect())
        .collect();
    let covers: Vec<HashMap<(usize, usize), Matrix>> = fib
        .fibers()
        .iter()
        .zip(&dims)
        .map(|(p, d)| random_poset_representation(rng, p, d))
        .collect();
    let proto = StokesFunctor::new(
        fib.clone(),
        dims.clone(),
        covers.clone(),
        fib.arrows()
            .iter()
            .enumerate()
            .map(|(g, ar)| {
                (0..fib.fiber(ar.source).len())
                    .map(|a| Matrix::zeros(dims[ar.target][fib.transition(g)[a]], dims[ar.source][a]))
                    .collect()
            })
            .collect(),
    )?;
    let mut lifts = Vec::new();
    for (g, ar) in fib.arrows().iter().enumerate() {
        let (x, y) = (ar.source, ar.target);
        let t = fib.transition(g);
        let p = fib.fiber(x);
        let mut offsets = Vec::new();
        let mut total = 0;
        for a in 0..p.len() {
            offsets.push(total);
            total += dims[y][t[a]] * dims[x][a];
        }
        let var = |a: usize, i: usize, k: usize| offsets[a] + i * dims[x][a] + k;
        let mut sys = SparseMatrix::new(total);
        for &(a, a2) in p.covers() {
            let up = proto.fiber_map(y, t[a], t[a2]);
            let cov = proto.cover(x, a, a2);
            for i in 0..dims[y][t[a2]] {
                for j in 0..dims[x][a] {
                    let mut row = Vec::new();
                    for k in 0..dims[y][t[a]] {
                        row.push((var(a, k, j), up.get(i, k).clone()));
                    }
                    for k in 0..dims[x][a2] {
                        row.push((var(a2, i, k), -cov.get(k, j)));
                    }
                    sys.push_row(row);
                }
            }
        }
        let sol = random_kernel_point(rng, &sys, 3);
        lifts.push(
            (0..p.len())
                .map(|a| {
                    let (r, c) = (dims[y][t[a]], dims[x][a]);
                    Matrix::from_entries(r, c, sol[offsets[a]..offsets[a] + r * c].to_vec()).expect("lift shape")
                })
                .collect(),
        );
    }
    StokesFunctor::new(fib.clone(), dims, covers, lifts)
}

/// Random ranks in `0..=max` per element of the common fiber.
pub fn random_ranks<R: Rng + ?Sized>(rng: &mut R, n: usize, max: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..=max)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::make_poset_base;
    use crate::fibration::tests::one_dimensional_example;
    use crate::rep::{is_stokes, split_fiber, validate_functor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn poset_representations_are_functors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let square = FinPoset::from_named_relations(
            &["x", "l", "r", "y"],
            &[("x", "l"), ("x", "r"), ("l", "y"), ("r", "y")],
        )
        .unwrap();
        let fib = StokesFibration::constant(make_poset_base(FinPoset::singleton("*")).unwrap(), square.clone());
        for _ in 0..20 {
            let dims = random_ranks(&mut rng, 4, 2);
            let covers = random_poset_representation(&mut rng, &square, &dims);
            let f = StokesFunctor::new(fib.clone(), vec![dims], vec![covers], vec![]).unwrap();
            assert!(validate_functor(&f).is_ok());
        }
    }

    #[test]
    fn block_functors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fib = one_dimensional_example();
        for _ in 0..10 {
            let ranks = vec![rng.gen_range(1..=2), rng.gen_range(1..=2)];
            let f = random_block_functor(&mut rng, &fib, &ranks, true).unwrap();
            assert!(validate_functor(&f).is_ok());
            assert!(is_stokes(&f));
            assert_eq!(split_fiber(&f, 2).unwrap().dims, ranks);
            let g = random_block_functor(&mut rng, &fib, &ranks, false).unwrap();
            assert!(validate_functor(&g).is_ok());
            assert!(!is_stokes(&g));
        }
    }

    #[test]
    fn generic_and_induced_functors_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fib = one_dimensional_example();
        for _ in 0..10 {
            let f = random_generic_functor(&mut rng, &fib, 2).unwrap();
            assert!(validate_functor(&f).is_ok());
            let g = random_induced(&mut rng, &fib, &[1, 2]).unwrap();
            assert!(validate_functor(&g).is_ok());
        }
    }
}
