//! Closed arcs of a stratified circle, elementarity and elementary covers.

use serde::Serialize;

use super::circle::CircleSpace;
use crate::base::make_poset_base;
use crate::error::{Error, Result};
use crate::exact::ExactAngle;
use crate::fibration::{pullback_fibration, BaseFunctor, StokesFibration};
use crate::poset::FinPoset;
use crate::rep::{pullback_along_base, StokesFunctor};
use crate::sample::has_constant_names;
use crate::strategy::Registry;

/// A run of consecutive strata on `CircleBase(n)`.
///
/// Position `2i` is the point `p_i` and `2i + 1` the arc `a_i`, read
/// cyclically; a window of length `2n + 1` meets one stratum twice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

impl Window {
    pub fn new(start: usize, len: usize, n: usize) -> Result<Self> {
        if len == 0 || len > 2 * n + 1 {
            return Err(Error::Invalid(format!("window length {len} on a circle with {n} points")));
        }
        Ok(Window { start: start % (2 * n), len })
    }

    /// The whole circle, cut open inside the last arc.
    pub fn full(n: usize) -> Self {
        Window { start: 2 * n - 1, len: 2 * n + 1 }
    }

    pub fn positions(&self, n: usize) -> Vec<usize> {
        (0..self.len).map(|j| (self.start + j) % (2 * n)).collect()
    }

    pub fn objects(&self, n: usize) -> Vec<usize> {
        self.positions(n).into_iter().map(|p| stratum(p, n)).collect()
    }

    /// Point `i` occurs away from both ends.
    pub fn has_interior_point(&self, i: usize, n: usize) -> bool {
        self.positions(n)
            .iter()
            .enumerate()
            .any(|(j, &p)| p == 2 * i && j > 0 && j + 1 < self.len)
    }

    pub fn covers_arc(&self, i: usize, n: usize) -> bool {
        self.positions(n).contains(&(2 * i + 1))
    }
}

pub fn stratum(position: usize, n: usize) -> usize {
    if position % 2 == 0 {
        position / 2
    } else {
        n + position / 2
    }
}

/// Smallest window containing the closed arc from `from` to `to`
/// counterclockwise.
pub fn window_between(space: &CircleSpace, from: &ExactAngle, to: &ExactAngle) -> Result<Window> {
    let n = space.num_points();
    let locate = |t: &ExactAngle| -> usize {
        if let Some(i) = space.angles.iter().position(|a| a == t) {
            return 2 * i;
        }
        // the arc a_i with p_i < t < p_{i+1}
        let i = space.angles.iter().rposition(|a| a < t).unwrap_or(n - 1);
        2 * i + 1
    };
    if from == to {
        return Err(Error::Invalid("degenerate arc".into()));
    }
    let (s, e) = (locate(from), locate(to));
    let mut len = (e + 2 * n - s) % (2 * n) + 1;
    if s == e && space.angles.iter().any(|a| a.strictly_between(from, to)) {
        // both ends inside one arc, going once around
        len = 2 * n + 1;
    }
    Window::new(s, len, n)
}

/// Pairs of elements comparable on some arc.
fn comparable_pairs(fib: &StokesFibration) -> Vec<(usize, usize)> {
    let n = fib.base().circle_size().unwrap_or(0);
    let k = fib.fiber(0).len();
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if (0..n).any(|i| fib.fiber(n + i).comparable(a, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Why a window fails to be elementary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementarityDefect {
    pub pair: (String, String),
    /// Positions within the window where the pair is incomparable.
    pub locus: Vec<usize>,
    pub reason: String,
}

fn check_window(fib: &StokesFibration, w: &Window) -> Result<Vec<ElementarityDefect>> {
    let n = fib
        .base()
        .circle_size()
        .ok_or_else(|| Error::Precondition("elementarity of arcs needs a circle base".into()))?;
    if !has_constant_names(fib) {
        return Err(Error::Precondition("elementarity of arcs needs constant names".into()));
    }
    let objs = w.objects(n);
    let names = fib.fiber(0).elements();
    let mut defects = Vec::new();
    for (a, b) in comparable_pairs(fib) {
        let locus: Vec<usize> = (0..objs.len())
            .filter(|&j| !fib.fiber(objs[j]).comparable(a, b))
            .collect();
        let reason = match locus.as_slice() {
            [] => Some("empty Stokes locus"),
            [j] if *j == 0 || *j + 1 == objs.len() => Some("Stokes locus at an end"),
            [j] if !fib.base().is_point(objs[*j]) => Some("Stokes locus on an arc"),
            [j] => {
                let before = fib.fiber(objs[j - 1]).lt(a, b);
                let after = fib.fiber(objs[j + 1]).lt(a, b);
                (before == after).then_some("no order flip across the Stokes locus")
            }
            _ => Some("Stokes locus has several points"),
        };
        if let Some(r) = reason {
            defects.push(ElementarityDefect {
                pair: (names[a].clone(), names[b].clone()),
                locus,
                reason: r.into(),
            });
        }
    }
    Ok(defects)
}

/// Every pair comparable somewhere meets the window in exactly one
/// interior point, with opposite orders on both sides.
pub fn is_elementary_window(fib: &StokesFibration, w: &Window) -> Result<bool> {
    Ok(check_window(fib, w)?.is_empty())
}

pub fn elementarity_defects(fib: &StokesFibration, w: &Window) -> Result<Vec<ElementarityDefect>> {
    check_window(fib, w)
}

pub fn is_elementary_arc(space: &CircleSpace, from: &ExactAngle, to: &ExactAngle) -> Result<bool> {
    is_elementary_window(&space.fibration, &window_between(space, from, to)?)
}

/// The window as a poset base with its map to the circle.
pub fn window_functor(fib: &StokesFibration, w: &Window) -> Result<BaseFunctor> {
    let target = fib.base().clone();
    let n = target
        .circle_size()
        .ok_or_else(|| Error::Precondition("windows live on a circle base".into()))?;
    let pos = w.positions(n);
    let objs = w.objects(n);
    let mut names: Vec<String> = Vec::with_capacity(objs.len());
    for &x in &objs {
        let mut name = target.object_name(x);
        while names.contains(&name) {
            name.push('\'');
        }
        names.push(name);
    }
    let mut rel = Vec::new();
    for j in 0..objs.len() {
        if pos[j] % 2 == 0 {
            if j > 0 {
                rel.push((j, j - 1));
            }
            if j + 1 < objs.len() {
                rel.push((j, j + 1));
            }
        }
    }
    let source = make_poset_base(FinPoset::from_relations(names, &rel)?)?;
    let arrows = source
        .arrows()
        .iter()
        .map(|a| {
            let i = pos[a.source] / 2;
            // toward the following arc is p_i+, toward the preceding one p_i-
            Some(if a.target == a.source + 1 { 2 * i } else { 2 * i + 1 })
        })
        .collect();
    BaseFunctor::new(source, target, objs, arrows)
}

pub fn restrict_fibration(fib: &StokesFibration, w: &Window) -> Result<StokesFibration> {
    pullback_fibration(&window_functor(fib, w)?, fib)
}

pub fn restrict_functor(f: &StokesFunctor, w: &Window) -> Result<StokesFunctor> {
    pullback_along_base(&window_functor(f.fibration(), w)?, f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverFailure {
    pub reason: String,
    pub window: Option<Window>,
    pub defects: Vec<ElementarityDefect>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverOutcome {
    Cover(Vec<Window>),
    Failure(CoverFailure),
}

pub trait CoverStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn cover(&self, space: &CircleSpace) -> Result<CoverOutcome>;
}

fn uncovered(n: usize, windows: &[Window]) -> Option<String> {
    for i in 0..n {
        if !windows.iter().any(|w| w.has_interior_point(i, n)) {
            return Some(format!("p{i} is interior to no window"));
        }
        if !windows.iter().any(|w| w.covers_arc(i, n)) {
            return Some(format!("a{i} meets no window"));
        }
    }
    None
}

fn finish(space: &CircleSpace, windows: Vec<Window>) -> Result<CoverOutcome> {
    let n = space.num_points();
    for w in &windows {
        let defects = check_window(&space.fibration, w)?;
        if !defects.is_empty() {
            return Ok(CoverOutcome::Failure(CoverFailure {
                reason: "window is not elementary".into(),
                window: Some(*w),
                defects,
            }));
        }
    }
    if let Some(reason) = uncovered(n, &windows) {
        return Ok(CoverOutcome::Failure(CoverFailure {
            reason,
            window: None,
            defects: Vec::new(),
        }));
    }
    Ok(CoverOutcome::Cover(windows))
}

/// Arcs of length `π/m` centred at the Stokes points of the top pole order.
pub struct UniformCover;

impl CoverStrategy for UniformCover {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn cover(&self, space: &CircleSpace) -> Result<CoverOutcome> {
        let n = space.num_points();
        let pairs = comparable_pairs(&space.fibration);
        let Some(m) = pairs.iter().map(|&(a, b)| space.pole_orders[a][b]).max() else {
            return finish(space, vec![Window::full(n)]);
        };
        let top: Vec<usize> = (0..n)
            .filter(|&i| {
                space.provenance[i]
                    .iter()
                    .any(|&(a, b)| space.pole_orders[a][b] == m && pairs.contains(&(a, b)))
            })
            .collect();
        let mut windows = Vec::new();
        for i in top {
            let p = &space.angles[i];
            let steps = p.denominator() as i64;
            let wide = p.rescale(u64::from(m));
            let (lo, hi) = (wide.rotate_quarter_steps(-steps), wide.rotate_quarter_steps(steps));
            // walk backwards and forwards from p_i while strictly inside (lo, hi)
            let inside = |j: usize| space.angles[j].strictly_between(&lo, &hi);
            let mut before = 0;
            while before + 1 < n && inside((i + n - before - 1) % n) {
                before += 1;
            }
            let mut after = 0;
            while before + after + 1 < n && inside((i + after + 1) % n) {
                after += 1;
            }
            let first = (i + n - before) % n;
            let count = before + after + 1;
            windows.push(Window::new(2 * first + 2 * n - 1, 2 * count + 1, n)?);
        }
        windows.dedup();
        finish(space, windows)
    }
}

/// For every point, the shortest elementary window having it inside.
pub struct WindowSearchCover;

impl CoverStrategy for WindowSearchCover {
    fn name(&self) -> &'static str {
        "window"
    }

    fn cover(&self, space: &CircleSpace) -> Result<CoverOutcome> {
        let n = space.num_points();
        let fib = &space.fibration;
        let mut windows: Vec<Window> = Vec::new();
        for i in 0..n {
            if windows.iter().any(|w| w.has_interior_point(i, n)) {
                continue;
            }
            let mut found = None;
            'search: for count in 1..=n {
                // windows from an arc to an arc with `count` points
                for shift in 0..count {
                    let first = (i + n - shift) % n;
                    let w = Window::new(2 * first + 2 * n - 1, 2 * count + 1, n)?;
                    if is_elementary_window(fib, &w)? {
                        found = Some(w);
                        break 'search;
                    }
                }
            }
            match found {
                Some(w) => windows.push(w),
                None => {
                    let w = Window::new(2 * i + 2 * n - 1, 3, n)?;
                    return Ok(CoverOutcome::Failure(CoverFailure {
                        reason: format!("no elementary window has p{i} inside"),
                        window: Some(w),
                        defects: check_window(fib, &w)?,
                    }));
                }
            }
        }
        finish(space, windows)
    }
}

pub fn cover_strategies() -> Registry<dyn CoverStrategy> {
    let mut r: Registry<dyn CoverStrategy> = Registry::new();
    r.register(UniformCover.name(), Box::new(UniformCover));
    r.register(WindowSearchCover.name(), Box::new(WindowSearchCover));
    r
}

pub fn elementary_cover(space: &CircleSpace) -> Result<CoverOutcome> {
    UniformCover.cover(space)
}

pub fn elementary_cover_with(space: &CircleSpace, strategy: &str) -> Result<CoverOutcome> {
    cover_strategies().get(strategy)?.cover(space)
}

#[cfg(test)]
mod tests {
    use super::super::circle::build_circle_space;
    use super::super::circle::tests::data;
    use super::super::level::level_structure_of;
    use super::*;
    use crate::exact::{GaussianRational, Rational};
    use crate::fibration::graded_fibration;

    fn angle(x: f64) -> ExactAngle {
        let u = GaussianRational::new(Rational::approximate(x.cos(), 40), Rational::approximate(x.sin(), 40));
        ExactAngle::of_point(&u).unwrap()
    }

    fn eg1() -> CircleSpace {
        build_circle_space(&data(&[("0", 0, 0, 0), ("z^-1", 1, 1, 0)])).unwrap()
    }

    #[test]
    fn arcs_of_the_two_point_circle() {
        let s = eg1();
        let n = 2;
        // around p1 = 3π/2 only
        let w1 = window_between(&s, &angle(3.0), &angle(6.0)).unwrap();
        assert_eq!(w1, Window { start: 1, len: 3 });
        assert!(is_elementary_window(&s.fibration, &w1).unwrap());
        assert!(is_elementary_arc(&s, &angle(0.5), &angle(2.5)).unwrap());
        assert!(!is_elementary_window(&s.fibration, &Window::full(n)).unwrap());
        // no point inside
        assert!(!is_elementary_arc(&s, &angle(0.2), &angle(1.0)).unwrap());
        let defects = elementarity_defects(&s.fibration, &Window::full(n)).unwrap();
        assert_eq!(defects[0].locus.len(), 2);
    }

    #[test]
    fn restriction_is_a_zigzag() {
        let s = eg1();
        let w = Window::full(2);
        let r = restrict_fibration(&s.fibration, &w).unwrap();
        assert_eq!(r.base().num_objects(), 5);
        assert_eq!(r.base().object_names(), vec!["a1", "p0", "a0", "p1", "a1'"]);
        r.validate().unwrap();
    }

    #[test]
    fn covers_of_the_two_point_circle() {
        let s = eg1();
        for name in cover_strategies().names() {
            match elementary_cover_with(&s, name).unwrap() {
                CoverOutcome::Cover(ws) => assert_eq!(ws.len(), 2, "{name}"),
                CoverOutcome::Failure(f) => panic!("{name}: {f:?}"),
            }
        }
        let single = build_circle_space(&data(&[("0", 0, 0, 0)])).unwrap();
        assert_eq!(elementary_cover(&single).unwrap(), CoverOutcome::Cover(vec![Window::full(1)]));
    }

    #[test]
    fn mixed_orders_need_a_level_step() {
        let s = build_circle_space(&data(&[("0", 0, 0, 0), ("z^-1", 1, 1, 0), ("z^-2", 2, 1, 0)])).unwrap();
        assert!(matches!(elementary_cover(&s).unwrap(), CoverOutcome::Failure(_)));
        assert!(matches!(elementary_cover_with(&s, "window").unwrap(), CoverOutcome::Cover(_)));
        let l = level_structure_of(&s).unwrap();
        let gr = s.with_fibration(graded_fibration(l.projection(1)).unwrap()).unwrap();
        match elementary_cover(&gr).unwrap() {
            CoverOutcome::Cover(ws) => assert_eq!(ws.len(), 2),
            CoverOutcome::Failure(f) => panic!("{f:?}"),
        }
    }
}
