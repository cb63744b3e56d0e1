//! The level square: a Stokes functor on `I` versus a pair of functors on
//! `J` and `I_p` glued over `J^set`.

use super::ops::{grade, grade_right_adjoint, induce, inclusion, pullback_along_morphism, transfer_rows};
use super::split::{block_layout, punctual_splitting};
use super::StokesFunctor;
use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::fibration::{graded_projection, is_level_fibration_morphism, FibrationMorphism};
use crate::total::{generator_ends, Generator};

/// `(g, h, α)` with `g = p_!F`, `h = Gr_p F` and `α : Gr(g) ≅ π_!h`.
#[derive(Clone, Debug)]
pub struct LevelData {
    pub g: StokesFunctor,
    pub h: StokesFunctor,
    pub gr_g: StokesFunctor,
    pub pi_h: StokesFunctor,
    /// One matrix per object `(y, β)` of `J^set`.
    pub alpha: Vec<Vec<Matrix>>,
}

fn check_level(p: &FibrationMorphism) -> Result<()> {
    if !is_level_fibration_morphism(p) {
        return Err(Error::Precondition("p is not a level morphism".into()));
    }
    if !p.target.is_set_locally_constant() {
        return Err(Error::Precondition("p is not a graduation morphism".into()));
    }
    Ok(())
}

/// Members `a` of `I_y` over `β`, in index order.
fn over(p: &FibrationMorphism, y: usize, beta: usize) -> Vec<usize> {
    (0..p.source.fiber(y).len()).filter(|&a| p.maps[y][a] == beta).collect()
}

pub fn level_disassemble(p: &FibrationMorphism, f: &StokesFunctor) -> Result<LevelData> {
    check_level(p)?;
    let sf = punctual_splitting(f)?;
    let g = induce(p, f)?;
    let h = grade(p, f)?;
    let id_j = FibrationMorphism::identity(&p.target);
    let gr_g = grade(&id_j, &g)?;
    let pi = graded_projection(p)?;
    let pi_h = induce(&pi, &h)?;
    let sg = punctual_splitting(&g)?;
    let sh = punctual_splitting(&h)?;
    let (i, j) = (&p.source, &p.target);

    let mut alpha = Vec::with_capacity(j.base().num_objects());
    for y in 0..j.base().num_objects() {
        let mut row = Vec::with_capacity(j.fiber(y).len());
        for beta in 0..j.fiber(y).len() {
            // V_a block inside g_β and inside h_a, for every a over β
            let g_members: Vec<usize> = (0..i.fiber(y).len())
                .filter(|&b| j.fiber(y).leq(p.maps[y][b], beta))
                .collect();
            let g_layout = block_layout(&g_members, &sf[y].dims);
            let q_g = sg[y].top_projection(&g, beta);
            let members = over(p, y, beta);
            let pi_layout = block_layout(&members, &sh[y].dims);
            let mut q = Matrix::zeros(q_g.rows(), 0);
            let mut r = Matrix::zeros(pi_h.dim(y, beta), 0);
            for &a in &members {
                let single = block_layout(&[a], &sf[y].dims);
                q = q.hstack(&(&q_g * &inclusion(&single, &g_layout, &sf[y].dims)));
                let level: Vec<usize> = i
                    .fiber(y)
                    .down_set(a, false)
                    .into_iter()
                    .filter(|&b| p.maps[y][b] == beta)
                    .collect();
                let into_h = inclusion(&single, &block_layout(&level, &sf[y].dims), &sf[y].dims);
                let top = &sh[y].top_projection(&h, a) * &into_h;
                let iota = inclusion(&block_layout(&[a], &sh[y].dims), &pi_layout, &sh[y].dims);
                r = r.hstack(&(&iota * &top));
            }
            let q_inv = q.inverse().ok_or_else(|| Error::Invalid("graded comparison is singular".into()))?;
            row.push(&r * &q_inv);
        }
        alpha.push(row);
    }
    Ok(LevelData {
        g,
        h,
        gr_g,
        pi_h,
        alpha,
    })
}

/// Rebuilds `F` as the fiber product `p^*g ×_{Gr(g)} Gr_p^*h`, objectwise a
/// kernel. `α` is read in the coordinates of the canonical splittings of
/// `g` and `h`.
pub fn level_assemble(
    p: &FibrationMorphism,
    g: &StokesFunctor,
    h: &StokesFunctor,
    alpha: &[Vec<Matrix>],
) -> Result<StokesFunctor> {
    check_level(p)?;
    if g.fibration() != &p.target {
        return Err(Error::Invalid("g does not live on the target of p".into()));
    }
    let sg = punctual_splitting(g)?;
    let sh = punctual_splitting(h)?;
    let i = &p.source;
    let j = &p.target;
    if alpha.len() != j.base().num_objects() || alpha.iter().zip(j.fibers()).any(|(r, fib)| r.len() != fib.len()) {
        return Err(Error::Dimension("one comparison matrix per object of J^set expected".into()));
    }
    let pg = pullback_along_morphism(p, g)?;
    let ph = grade_right_adjoint(p, h)?;

    let mut kernels: Vec<Vec<Matrix>> = Vec::with_capacity(i.base().num_objects());
    for x in 0..i.base().num_objects() {
        let mut row = Vec::with_capacity(i.fiber(x).len());
        for a in 0..i.fiber(x).len() {
            let beta = p.maps[x][a];
            let al = &alpha[x][beta];
            let members = over(p, x, beta);
            let pi_layout = block_layout(&members, &sh[x].dims);
            let expected = (pi_layout.iter().map(|&(b, _)| sh[x].dims[b]).sum(), sg[x].dims[beta]);
            if al.shape() != expected {
                return Err(Error::Dimension(format!(
                    "comparison matrix over {} has the wrong shape",
                    p.target.total_object_name(x, beta)
                )));
            }
            let al_inv = al
                .inverse()
                .ok_or_else(|| Error::Invalid("comparison matrix is not invertible".into()))?;
            let q_g = sg[x].top_projection(g, beta);
            let inv_h = sh[x].iso[a].inverse().expect("splitting iso");
            let unit = transfer_rows(&inv_h, &sh[x].layout(h, a), &pi_layout, &sh[x].dims);
            let from_h = &al_inv * &unit;
            let constraint = q_g.hstack(&(-&from_h));
            row.push(constraint.kernel());
        }
        kernels.push(row);
    }
    let dims = kernels.iter().map(|r| r.iter().map(|k| k.cols()).collect()).collect();
    let mut failure = None;
    let out = StokesFunctor::from_generators(i.clone(), dims, |gen| {
        let ((x, a), (y, b)) = generator_ends(i, gen);
        let big = Matrix::block_diag(&[pg.generator_matrix(gen).clone(), ph.generator_matrix(gen).clone()]);
        let (ks, kt) = (&kernels[x][a], &kernels[y][b]);
        match kt.solve_matrix(&(&big * ks)) {
            Ok(Some(m)) => m,
            _ => {
                failure.get_or_insert_with(|| describe(i, gen));
                Matrix::zeros(kt.cols(), ks.cols())
            }
        }
    })?;
    if let Some(name) = failure {
        return Err(Error::Invalid(format!("comparison is not natural along {name}")));
    }
    Ok(out)
}

fn describe(i: &crate::fibration::StokesFibration, g: &Generator) -> String {
    crate::total::generator_name(i, g)
}

#[cfg(test)]
mod tests {
    use super::super::tests::one_dimensional_functor;
    use super::super::{find_isomorphism, is_stokes, validate_functor, NatTrans};
    use super::*;

    #[test]
    fn identity_and_terminal() {
        let f = one_dimensional_functor([[1, 2], [3, 1]]);
        let id = FibrationMorphism::identity(f.fibration());
        let d = level_disassemble(&id, &f).unwrap();
        assert_eq!(d.g.dims(), f.dims());
        assert!(d.h.dims().iter().all(|r| r == &vec![1, 1]));

        let t = FibrationMorphism::terminal(f.fibration());
        let d = level_disassemble(&t, &f).unwrap();
        assert!(d.g.dims().iter().all(|r| r == &vec![2]));
        assert_eq!(d.h.dims(), f.dims());
    }

    #[test]
    fn alpha_is_natural_and_roundtrip_holds() {
        let f = one_dimensional_functor([[1, 2], [3, 1]]);
        for p in [
            FibrationMorphism::identity(f.fibration()),
            FibrationMorphism::terminal(f.fibration()),
        ] {
            let d = level_disassemble(&p, &f).unwrap();
            assert_eq!(d.gr_g.fibration(), d.pi_h.fibration());
            let flat: Vec<Matrix> = d.alpha.iter().flatten().cloned().collect();
            assert!(NatTrans::new(flat).is_natural(&d.gr_g, &d.pi_h));

            let back = level_assemble(&p, &d.g, &d.h, &d.alpha).unwrap();
            assert!(validate_functor(&back).is_ok());
            assert!(is_stokes(&back));
            assert_eq!(back.dims(), f.dims());
            assert!(find_isomorphism(&f, &back, 1).unwrap().is_some());
        }
    }

    #[test]
    fn zero_pieces_give_zero() {
        let f = StokesFunctor::zero(&crate::fibration::tests::one_dimensional_example());
        let t = FibrationMorphism::terminal(f.fibration());
        let d = level_disassemble(&t, &f).unwrap();
        let back = level_assemble(&t, &d.g, &d.h, &d.alpha).unwrap();
        assert_eq!(back, f);
    }
}
