//! Induction along fibration morphisms, graduation and pullbacks, computed
//! on splittings.

use std::collections::HashMap;

use super::split::{block_layout, punctual_splitting, PunctualSplitting};
use super::StokesFunctor;
use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::fibration::{
    graded_fibration, is_graduation_morphism, pullback_fibration, BaseFunctor, FibrationMorphism,
};
use crate::total::Generator;

/// Copies the row blocks of `m` laid out by `from` into the positions given
/// by `to`; blocks missing from `to` are dropped.
pub(crate) fn transfer_rows(m: &Matrix, from: &[(usize, usize)], to: &[(usize, usize)], dims: &[usize]) -> Matrix {
    let rows: usize = to.iter().map(|&(c, _)| dims[c]).sum();
    let target: HashMap<usize, usize> = to.iter().copied().collect();
    let mut out = Matrix::zeros(rows, m.cols());
    for &(c, fo) in from {
        if let Some(&to_off) = target.get(&c) {
            out.paste(to_off, 0, &m.submatrix(fo, 0, dims[c], m.cols()));
        }
    }
    out
}

pub(crate) fn inclusion(from: &[(usize, usize)], to: &[(usize, usize)], dims: &[usize]) -> Matrix {
    let n: usize = from.iter().map(|&(c, _)| dims[c]).sum();
    transfer_rows(&Matrix::identity(n), from, to, dims)
}

pub(crate) fn inverse_isos(sp: &PunctualSplitting) -> Vec<Vec<Matrix>> {
    sp.iter()
        .map(|s| s.iso.iter().map(|m| m.inverse().expect("splitting iso")).collect())
        .collect()
}

fn check_source(p: &FibrationMorphism, f: &StokesFunctor) -> Result<()> {
    if &p.source != f.fibration() {
        return Err(Error::Invalid("functor does not live on the source of the morphism".into()));
    }
    Ok(())
}

/// `p_!F` with `(p_!F)_y(α) = ⊕_{p(b) ≤ α} V_b`.
pub fn induce(p: &FibrationMorphism, f: &StokesFunctor) -> Result<StokesFunctor> {
    check_source(p, f)?;
    let sp = punctual_splitting(f)?;
    let inv = inverse_isos(&sp);
    let (i, j) = (&p.source, &p.target);
    let members = |y: usize, alpha: usize| -> Vec<(usize, usize)> {
        let m: Vec<usize> = (0..i.fiber(y).len())
            .filter(|&b| j.fiber(y).leq(p.maps[y][b], alpha))
            .collect();
        block_layout(&m, &sp[y].dims)
    };
    let size = |y: usize, lay: &[(usize, usize)]| -> usize { lay.iter().map(|&(b, _)| sp[y].dims[b]).sum() };
    let dims: Vec<Vec<usize>> = (0..j.base().num_objects())
        .map(|y| (0..j.fiber(y).len()).map(|alpha| size(y, &members(y, alpha))).collect())
        .collect();
    StokesFunctor::from_generators(j.clone(), dims, |g| match *g {
        Generator::Cover { x, a, b } => inclusion(&members(x, a), &members(x, b), &sp[x].dims),
        Generator::Lift { arrow, a } => {
            let ar = &j.arrows()[arrow];
            let (x, y) = (ar.source, ar.target);
            let src = members(x, a);
            let tgt = members(y, j.transition(arrow)[a]);
            let mut out = Matrix::zeros(size(y, &tgt), size(x, &src));
            for &(b, off) in &src {
                let fb = i.transition(arrow)[b];
                let block = &(&inv[y][fb] * f.lift(arrow, b)) * &sp[x].sections[b];
                let lay = sp[y].layout(f, fb);
                out.paste(0, off, &transfer_rows(&block, &lay, &tgt, &sp[y].dims));
            }
            out
        }
    })
}

/// `Gr_p F` on `I_p`, with `(Gr_p F)_a = ⊕_{a' ≤ a, p(a') = p(a)} V_{a'}`.
pub fn grade(p: &FibrationMorphism, f: &StokesFunctor) -> Result<StokesFunctor> {
    check_source(p, f)?;
    if !is_graduation_morphism(p) {
        return Err(Error::Precondition("grade needs a graduation morphism".into()));
    }
    let sp = punctual_splitting(f)?;
    let inv = inverse_isos(&sp);
    let ip = graded_fibration(p)?;
    let i = &p.source;
    let level = |x: usize, a: usize| -> Vec<(usize, usize)> {
        let m: Vec<usize> = i
            .fiber(x)
            .down_set(a, false)
            .into_iter()
            .filter(|&b| p.maps[x][b] == p.maps[x][a])
            .collect();
        block_layout(&m, &sp[x].dims)
    };
    let size = |x: usize, lay: &[(usize, usize)]| -> usize { lay.iter().map(|&(b, _)| sp[x].dims[b]).sum() };
    let dims: Vec<Vec<usize>> = (0..i.base().num_objects())
        .map(|x| (0..i.fiber(x).len()).map(|a| size(x, &level(x, a))).collect())
        .collect();
    StokesFunctor::from_generators(ip.clone(), dims, |g| match *g {
        Generator::Cover { x, a, b } => inclusion(&level(x, a), &level(x, b), &sp[x].dims),
        Generator::Lift { arrow, a } => {
            let ar = &i.arrows()[arrow];
            let (x, y) = (ar.source, ar.target);
            let fa = i.transition(arrow)[a];
            let incl = inclusion(&level(x, a), &sp[x].layout(f, a), &sp[x].dims);
            let m = &(&(&inv[y][fa] * f.lift(arrow, a)) * &sp[x].iso[a]) * &incl;
            transfer_rows(&m, &sp[y].layout(f, fa), &level(y, fa), &sp[y].dims)
        }
    })
}

/// `Gr_p^* H` on `I`: same-level covers from `H`, zero across levels.
pub fn grade_right_adjoint(p: &FibrationMorphism, h: &StokesFunctor) -> Result<StokesFunctor> {
    let ip = graded_fibration(p)?;
    if h.fibration() != &ip {
        return Err(Error::Invalid("functor does not live on the graded fibration".into()));
    }
    StokesFunctor::from_generators(p.source.clone(), h.dims().to_vec(), |g| match *g {
        Generator::Cover { x, a, b } => {
            if p.maps[x][a] == p.maps[x][b] {
                h.fiber_map(x, a, b).clone()
            } else {
                Matrix::zeros(h.dim(x, b), h.dim(x, a))
            }
        }
        Generator::Lift { arrow, a } => h.lift(arrow, a).clone(),
    })
}

/// `p^* g` for a functor `g` on the target of `p`.
pub fn pullback_along_morphism(p: &FibrationMorphism, g: &StokesFunctor) -> Result<StokesFunctor> {
    if &p.target != g.fibration() {
        return Err(Error::Invalid("functor does not live on the target of the morphism".into()));
    }
    let i = &p.source;
    let dims = (0..i.base().num_objects())
        .map(|x| (0..i.fiber(x).len()).map(|a| g.dim(x, p.maps[x][a])).collect())
        .collect();
    StokesFunctor::from_generators(i.clone(), dims, |gen| match *gen {
        Generator::Cover { x, a, b } => g.fiber_map(x, p.maps[x][a], p.maps[x][b]).clone(),
        Generator::Lift { arrow, a } => {
            let x = i.arrows()[arrow].source;
            g.lift(arrow, p.maps[x][a]).clone()
        }
    })
}

/// Restriction along a functor of base categories.
pub fn pullback_along_base(phi: &BaseFunctor, f: &StokesFunctor) -> Result<StokesFunctor> {
    let fib = pullback_fibration(phi, f.fibration())?;
    let dims = phi.objects.iter().map(|&y| f.dims()[y].clone()).collect();
    StokesFunctor::from_generators(fib, dims, |g| match *g {
        Generator::Cover { x, a, b } => f.cover(phi.objects[x], a, b).clone(),
        Generator::Lift { arrow, a } => match phi.arrows[arrow] {
            Some(d) => f.lift(d, a).clone(),
            None => {
                let y = phi.objects[phi.source.arrows()[arrow].source];
                Matrix::identity(f.dim(y, a))
            }
        },
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{local_system, one_dimensional_functor};
    use super::super::{is_stokes, split_fiber, validate_functor};
    use super::*;
    use crate::base::make_poset_base;
    use crate::fibration::{graded_projection, StokesFibration};
    use crate::poset::FinPoset;

    #[test]
    fn induce_along_identity_and_terminal() {
        let f = one_dimensional_functor([[1, 2], [0, 1]]);
        let id = FibrationMorphism::identity(f.fibration());
        let g = induce(&id, &f).unwrap();
        assert_eq!(g.dims(), f.dims());
        assert!(validate_functor(&g).is_ok());

        let t = FibrationMorphism::terminal(f.fibration());
        let h = induce(&t, &f).unwrap();
        assert!(h.dims().iter().all(|d| d == &vec![2]));
        assert!(validate_functor(&h).is_ok());
        assert!(is_stokes(&h));
    }

    #[test]
    fn induce_chain_to_point_adds_dimensions() {
        let fib = StokesFibration::constant(
            make_poset_base(FinPoset::singleton("*")).unwrap(),
            FinPoset::chain(&["a", "b", "c"]),
        );
        // i_!(V) with V = (1, 0, 2)
        let f = StokesFunctor::from_generators(fib.clone(), vec![vec![1, 1, 3]], |g| match *g {
            Generator::Cover { a: 0, .. } => Matrix::from_i64(&[&[1]]),
            _ => Matrix::from_i64(&[&[1], &[0], &[0]]),
        })
        .unwrap();
        assert_eq!(split_fiber(&f, 0).unwrap().dims, vec![1, 0, 2]);
        let t = FibrationMorphism::terminal(&fib);
        assert_eq!(induce(&t, &f).unwrap().dims(), &[vec![3]]);
    }

    #[test]
    fn grade_extremes() {
        let f = one_dimensional_functor([[2, 1], [1, 3]]);
        let t = FibrationMorphism::terminal(f.fibration());
        let g = grade(&t, &f).unwrap();
        assert_eq!(g.dims(), f.dims());
        assert!(validate_functor(&g).is_ok());

        let id = FibrationMorphism::identity(f.fibration());
        let h = grade(&id, &f).unwrap();
        assert!(h.dims().iter().all(|d| d == &vec![1, 1]));
        assert!(validate_functor(&h).is_ok());
        assert!(is_stokes(&h));
        assert_eq!(h.fibration(), &f.fibration().fiberwise_set());
    }

    #[test]
    fn right_adjoint_roundtrip_dims() {
        let f = one_dimensional_functor([[2, 1], [1, 3]]);
        let id = FibrationMorphism::identity(f.fibration());
        let h = grade(&id, &f).unwrap();
        let back = grade_right_adjoint(&id, &h).unwrap();
        assert!(validate_functor(&back).is_ok());
        assert_eq!(back.dims(), h.dims());
        let t = FibrationMorphism::terminal(f.fibration());
        let h = grade(&t, &f).unwrap();
        assert_eq!(&grade_right_adjoint(&t, &h).unwrap(), &h);
    }

    #[test]
    fn pullbacks() {
        let f = local_system(2, 5);
        let phi = BaseFunctor::circle_refinement(2, &[1, 0]).unwrap();
        let g = pullback_along_base(&phi, &f).unwrap();
        assert!(validate_functor(&g).is_ok());
        assert_eq!(g.dims().len(), 6);

        let f = one_dimensional_functor([[1, 0], [0, 1]]);
        let q = graded_projection(&FibrationMorphism::terminal(f.fibration())).unwrap();
        let h = StokesFunctor::zero(&q.target);
        let back = pullback_along_morphism(&q, &h).unwrap();
        assert!(validate_functor(&back).is_ok());
    }

    #[test]
    fn non_split_input_is_rejected() {
        let fib = StokesFibration::constant(
            make_poset_base(FinPoset::singleton("*")).unwrap(),
            FinPoset::chain(&["a", "b"]),
        );
        let f = StokesFunctor::from_generators(fib.clone(), vec![vec![1, 1]], |_| Matrix::from_i64(&[&[0]])).unwrap();
        let t = FibrationMorphism::terminal(&fib);
        assert!(matches!(induce(&t, &f), Err(Error::NotSplit(_))));
        assert!(matches!(grade(&t, &f), Err(Error::NotSplit(_))));
    }
}
