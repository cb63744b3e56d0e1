//! Cocartesian fibrations in finite posets over a base category.

use std::collections::{BTreeMap, HashSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::base::{BaseArrow, BaseCategory, BaseMorphism};
use crate::error::{Error, Result};
use crate::poset::{
    assignment_indices, assignment_names, check_monotone, graded_by_assignment,
    is_level_assignment, underlying_set, FinPoset, MonotoneMap,
};

/// A fiber poset per base object and a transition map per generating arrow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StokesFibration {
    base: BaseCategory,
    fibers: Vec<FinPoset>,
    transitions: Vec<Vec<usize>>,
    arrows: Vec<BaseArrow>,
}

impl StokesFibration {
    /// Checks shapes and ranges only; see [`StokesFibration::validate`].
    pub fn new(base: BaseCategory, fibers: Vec<FinPoset>, transitions: Vec<Vec<usize>>) -> Result<Self> {
        let arrows = base.arrows();
        if fibers.len() != base.num_objects() {
            return Err(Error::Dimension(format!(
                "{} fibers for {} base objects",
                fibers.len(),
                base.num_objects()
            )));
        }
        if transitions.len() != arrows.len() {
            return Err(Error::Dimension(format!(
                "{} transitions for {} base arrows",
                transitions.len(),
                arrows.len()
            )));
        }
        for (t, a) in transitions.iter().zip(&arrows) {
            let (s, g) = (&fibers[a.source], &fibers[a.target]);
            if t.len() != s.len() || t.iter().any(|&b| b >= g.len()) {
                return Err(Error::Dimension(format!("transition {} has the wrong shape", a.name)));
            }
        }
        Ok(StokesFibration {
            base,
            fibers,
            transitions,
            arrows,
        })
    }

    /// The same poset over every object, identity transitions.
    pub fn constant(base: BaseCategory, fiber: FinPoset) -> Self {
        let fibers = vec![fiber.clone(); base.num_objects()];
        let transitions = base
            .arrows()
            .iter()
            .map(|_| (0..fiber.len()).collect())
            .collect();
        StokesFibration::new(base, fibers, transitions).expect("constant fibration")
    }

    pub fn base(&self) -> &BaseCategory {
        &self.base
    }

    pub fn fiber(&self, x: usize) -> &FinPoset {
        &self.fibers[x]
    }

    pub fn fibers(&self) -> &[FinPoset] {
        &self.fibers
    }

    pub fn arrows(&self) -> &[BaseArrow] {
        &self.arrows
    }

    pub fn transition(&self, arrow: usize) -> &[usize] {
        &self.transitions[arrow]
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.transitions
    }

    pub fn transition_map(&self, arrow: usize) -> MonotoneMap {
        let a = &self.arrows[arrow];
        MonotoneMap {
            source: self.fibers[a.source].clone(),
            target: self.fibers[a.target].clone(),
            assignment: self.transitions[arrow].clone(),
        }
    }

    /// Image of `a` along a base morphism.
    pub fn transport(&self, mor: &BaseMorphism, a: usize) -> usize {
        mor.path.iter().fold(a, |cur, &g| self.transitions[g][cur])
    }

    /// Monotone transitions and, for poset bases, path independence.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.arrows.iter().enumerate() {
            check_monotone(&self.fibers[a.source], &self.fibers[a.target], &self.transitions[i])
                .map_err(|e| Error::Invalid(format!("transition {}: {e}", a.name)))?;
        }
        if let BaseCategory::Poset(p) = &self.base {
            for x in 0..p.len() {
                for y in 0..p.len() {
                    if !p.lt(x, y) {
                        continue;
                    }
                    let paths = self.base.all_paths(x, y);
                    let run = |path: &Vec<usize>| -> Vec<usize> {
                        (0..self.fibers[x].len())
                            .map(|a| path.iter().fold(a, |c, &g| self.transitions[g][c]))
                            .collect()
                    };
                    let first = run(&paths[0]);
                    for path in &paths[1..] {
                        if run(path) != first {
                            let names = |pa: &Vec<usize>| {
                                pa.iter()
                                    .map(|&g| self.arrows[g].name.clone())
                                    .collect::<Vec<_>>()
                                    .join(" then ")
                            };
                            return Err(Error::Invalid(format!(
                                "transitions do not commute from {} to {}: {} differs from {}",
                                p.name(x),
                                p.name(y),
                                names(&paths[0]),
                                names(path)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Every fiber replaced by its underlying set.
    pub fn fiberwise_set(&self) -> StokesFibration {
        StokesFibration {
            base: self.base.clone(),
            fibers: self.fibers.iter().map(underlying_set).collect(),
            transitions: self.transitions.clone(),
            arrows: self.arrows.clone(),
        }
    }

    /// Every transition is a bijection of underlying sets.
    pub fn is_set_locally_constant(&self) -> bool {
        self.arrows.iter().enumerate().all(|(i, a)| {
            let t = &self.transitions[i];
            let mut seen = vec![false; self.fibers[a.target].len()];
            t.len() == seen.len() && t.iter().all(|&b| !std::mem::replace(&mut seen[b], true))
        })
    }

    /// Whether the transition along `arrow` is an isomorphism of posets.
    pub fn transition_is_isomorphism(&self, arrow: usize) -> bool {
        let a = &self.arrows[arrow];
        let (s, t) = (&self.fibers[a.source], &self.fibers[a.target]);
        let f = &self.transitions[arrow];
        if s.len() != t.len() {
            return false;
        }
        let mut seen = vec![false; t.len()];
        for &b in f {
            if std::mem::replace(&mut seen[b], true) {
                return false;
            }
        }
        (0..s.len()).all(|x| (0..s.len()).all(|y| s.leq(x, y) == t.leq(f[x], f[y])))
    }

    pub fn total_size(&self) -> usize {
        self.fibers.iter().map(|f| f.len()).sum()
    }

    /// Total objects `(x, a)` in order.
    pub fn total_objects(&self) -> Vec<(usize, usize)> {
        (0..self.fibers.len())
            .flat_map(|x| (0..self.fibers[x].len()).map(move |a| (x, a)))
            .collect()
    }

    pub fn total_object_name(&self, x: usize, a: usize) -> String {
        format!("({},{})", self.base.object_name(x), self.fibers[x].name(a))
    }

    /// Inverse of [`StokesFibration::total_object_name`].
    pub fn parse_total_object(&self, s: &str) -> Result<(usize, usize)> {
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::UnknownElement(s.to_string()))?;
        let (x, a) = inner
            .split_once(',')
            .ok_or_else(|| Error::UnknownElement(s.to_string()))?;
        let x = self.base.object_index(x)?;
        let a = self.fibers[x].index_of(a)?;
        Ok((x, a))
    }
}

/// One fiber element per base object, compatible with every transition.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CocartesianSection {
    pub choice: Vec<usize>,
}

/// All cocartesian sections, by propagation with backtracking.
pub fn cocartesian_sections(i: &StokesFibration) -> Vec<CocartesianSection> {
    let base = i.base();
    let mut per_component: Vec<(Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
    for comp in base.components() {
        let order = bfs_order(i, &comp);
        let mut found = Vec::new();
        let mut partial = vec![usize::MAX; base.num_objects()];
        extend_section(i, &order, 0, &mut partial, &mut found);
        per_component.push((comp, found));
    }
    let mut out = vec![vec![usize::MAX; base.num_objects()]];
    for (comp, found) in per_component {
        let mut next = Vec::new();
        for partial in &out {
            for f in &found {
                let mut s = partial.clone();
                for &x in &comp {
                    s[x] = f[x];
                }
                next.push(s);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|choice| CocartesianSection { choice })
        .collect()
}

fn bfs_order(i: &StokesFibration, comp: &[usize]) -> Vec<usize> {
    let mut order = vec![comp[0]];
    let mut seen: HashSet<usize> = order.iter().copied().collect();
    let mut k = 0;
    while k < order.len() {
        let x = order[k];
        k += 1;
        for a in i.arrows() {
            for (u, v) in [(a.source, a.target), (a.target, a.source)] {
                if u == x && seen.insert(v) {
                    order.push(v);
                }
            }
        }
    }
    order
}

fn extend_section(
    i: &StokesFibration,
    order: &[usize],
    k: usize,
    partial: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if k == order.len() {
        found.push(partial.clone());
        return;
    }
    let x = order[k];
    let forced = i.arrows().iter().enumerate().find_map(|(g, a)| {
        (a.target == x && partial[a.source] != usize::MAX)
            .then(|| i.transition(g)[partial[a.source]])
    });
    let candidates: Vec<usize> = match forced {
        Some(c) => vec![c],
        None => (0..i.fiber(x).len()).collect(),
    };
    for c in candidates {
        partial[x] = c;
        let consistent = i.arrows().iter().enumerate().all(|(g, a)| {
            let (s, t) = (partial[a.source], partial[a.target]);
            s == usize::MAX || t == usize::MAX || i.transition(g)[s] == t
        });
        if consistent {
            extend_section(i, order, k + 1, partial, found);
        }
    }
    partial[x] = usize::MAX;
}

/// Base objects where the two sections are incomparable.
pub fn stokes_locus(i: &StokesFibration, s: &CocartesianSection, t: &CocartesianSection) -> Vec<usize> {
    (0..i.base().num_objects())
        .filter(|&x| !i.fiber(x).comparable(s.choice[x], t.choice[x]))
        .collect()
}

/// A map of fibrations over the same base, given fiberwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FibrationMorphism {
    pub source: StokesFibration,
    pub target: StokesFibration,
    pub maps: Vec<Vec<usize>>,
}

impl FibrationMorphism {
    /// Checks fiberwise monotonicity and that every square over a base
    /// arrow commutes.
    pub fn new(source: StokesFibration, target: StokesFibration, maps: Vec<Vec<usize>>) -> Result<Self> {
        if source.base() != target.base() {
            return Err(Error::Invalid("fibrations live over different bases".into()));
        }
        if maps.len() != source.base().num_objects() {
            return Err(Error::Dimension("one fiber map per base object expected".into()));
        }
        for x in 0..maps.len() {
            check_monotone(source.fiber(x), target.fiber(x), &maps[x]).map_err(|e| {
                Error::Invalid(format!("fiber map at {}: {e}", source.base().object_name(x)))
            })?;
        }
        for (g, a) in source.arrows().iter().enumerate() {
            for b in 0..source.fiber(a.source).len() {
                let down = maps[a.target][source.transition(g)[b]];
                let across = target.transition(g)[maps[a.source][b]];
                if down != across {
                    return Err(Error::Invalid(format!(
                        "square over {} does not commute at {}",
                        a.name,
                        source.fiber(a.source).name(b)
                    )));
                }
            }
        }
        Ok(FibrationMorphism {
            source,
            target,
            maps,
        })
    }

    pub fn identity(i: &StokesFibration) -> Self {
        FibrationMorphism {
            source: i.clone(),
            target: i.clone(),
            maps: i.fibers().iter().map(|f| (0..f.len()).collect()).collect(),
        }
    }

    /// The map to the fibration with one-point fibers.
    pub fn terminal(i: &StokesFibration) -> Self {
        let target = StokesFibration::constant(i.base().clone(), FinPoset::singleton("*"));
        FibrationMorphism {
            source: i.clone(),
            target,
            maps: i.fibers().iter().map(|f| vec![0; f.len()]).collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FibrationMorphism) -> Result<FibrationMorphism> {
        if self.target != other.source {
            return Err(Error::Invalid("fibration morphisms are not composable".into()));
        }
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(f, g)| f.iter().map(|&a| g[a]).collect())
            .collect();
        Ok(FibrationMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            maps,
        })
    }

    pub fn apply(&self, x: usize, a: usize) -> usize {
        self.maps[x][a]
    }
}

/// Fiberwise level and the target's underlying-set fibration locally
/// constant.
pub fn is_level_fibration_morphism(p: &FibrationMorphism) -> bool {
    is_graduation_morphism(p)
        && (0..p.maps.len())
            .all(|x| is_level_assignment(p.source.fiber(x), p.target.fiber(x), &p.maps[x]))
}

/// The target's underlying-set fibration has bijective transitions.
pub fn is_graduation_morphism(p: &FibrationMorphism) -> bool {
    p.target.is_set_locally_constant()
}

/// `I_p` fiberwise, with the transitions of `I` restricted.
pub fn graded_fibration(p: &FibrationMorphism) -> Result<StokesFibration> {
    if !is_graduation_morphism(p) {
        return Err(Error::Precondition(
            "graduation needs a target whose underlying sets are locally constant".into(),
        ));
    }
    let i = &p.source;
    let fibers = (0..p.maps.len())
        .map(|x| graded_by_assignment(i.fiber(x), &p.maps[x]))
        .collect();
    StokesFibration::new(i.base().clone(), fibers, i.transitions().to_vec())
}

/// The map `I_p → J^set` induced by `p`.
pub fn graded_projection(p: &FibrationMorphism) -> Result<FibrationMorphism> {
    let source = graded_fibration(p)?;
    let target = p.target.fiberwise_set();
    FibrationMorphism::new(source, target, p.maps.clone())
}

/// A functor between base categories sending generating arrows to
/// generating arrows or identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseFunctor {
    pub source: BaseCategory,
    pub target: BaseCategory,
    pub objects: Vec<usize>,
    pub arrows: Vec<Option<usize>>,
}

impl BaseFunctor {
    pub fn new(
        source: BaseCategory,
        target: BaseCategory,
        objects: Vec<usize>,
        arrows: Vec<Option<usize>>,
    ) -> Result<Self> {
        let s_arrows = source.arrows();
        let t_arrows = target.arrows();
        if objects.len() != source.num_objects() || arrows.len() != s_arrows.len() {
            return Err(Error::Dimension("base functor has the wrong shape".into()));
        }
        if objects.iter().any(|&y| y >= target.num_objects()) {
            return Err(Error::Invalid("base functor object out of range".into()));
        }
        for (a, img) in s_arrows.iter().zip(&arrows) {
            let (s, t) = (objects[a.source], objects[a.target]);
            let ok = match img {
                None => s == t,
                Some(g) => t_arrows
                    .get(*g)
                    .is_some_and(|b| b.source == s && b.target == t),
            };
            if !ok {
                return Err(Error::Invalid(format!("arrow {} is sent to an ill-formed image", a.name)));
            }
        }
        Ok(BaseFunctor {
            source,
            target,
            objects,
            arrows,
        })
    }

    pub fn identity(b: &BaseCategory) -> Self {
        BaseFunctor {
            source: b.clone(),
            target: b.clone(),
            objects: (0..b.num_objects()).collect(),
            arrows: (0..b.arrows().len()).map(Some).collect(),
        }
    }

    /// The `d`-fold cover `CircleBase(d·n) → CircleBase(n)`.
    pub fn circle_cover(n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("cover degree must be positive".into()));
        }
        let m = n * d;
        let source = crate::base::make_circle_base(m)?;
        let target = crate::base::make_circle_base(n)?;
        let objects = (0..2 * m)
            .map(|x| if x < m { x % n } else { n + (x - m) % n })
            .collect();
        let arrows = (0..2 * m).map(|g| Some(2 * ((g / 2) % n) + g % 2)).collect();
        BaseFunctor::new(source, target, objects, arrows)
    }

    /// Refinement of `CircleBase(n)` inserting `extra[i]` redundant points
    /// into arc `a_i`.
    pub fn circle_refinement(n: usize, extra: &[usize]) -> Result<Self> {
        if extra.len() != n {
            return Err(Error::Dimension("one insertion count per arc expected".into()));
        }
        let m: usize = n + extra.iter().sum::<usize>();
        let source = crate::base::make_circle_base(m)?;
        let target = crate::base::make_circle_base(n)?;
        // coarse point i, then extra[i] inserted points, each followed by an arc in a_i
        let mut point_image = Vec::with_capacity(m);
        let mut arc_image = Vec::with_capacity(m);
        for (i, &k) in extra.iter().enumerate() {
            point_image.push(Some(i));
            arc_image.push(i);
            for _ in 0..k {
                point_image.push(None);
                arc_image.push(i);
            }
        }
        let mut objects: Vec<usize> = point_image
            .iter()
            .zip(&arc_image)
            .map(|(p, &a)| p.unwrap_or(n + a))
            .collect();
        objects.extend(arc_image.iter().map(|&a| n + a));
        let arrows = (0..2 * m)
            .map(|g| point_image[g / 2].map(|i| 2 * i + g % 2))
            .collect();
        BaseFunctor::new(source, target, objects, arrows)
    }
}

/// Fiber at `x'` is the fiber at `f(x')`.
pub fn pullback_fibration(f: &BaseFunctor, i: &StokesFibration) -> Result<StokesFibration> {
    if &f.target != i.base() {
        return Err(Error::Invalid("base functor lands in a different base".into()));
    }
    let fibers = f.objects.iter().map(|&y| i.fiber(y).clone()).collect();
    let transitions = f
        .source
        .arrows()
        .iter()
        .zip(&f.arrows)
        .map(|(a, img)| match img {
            Some(g) => i.transition(*g).to_vec(),
            None => (0..i.fiber(f.objects[a.source]).len()).collect(),
        })
        .collect();
    StokesFibration::new(f.source.clone(), fibers, transitions)
}

/// Result of merging redundant strata of a stratified circle.
#[derive(Clone, Debug)]
pub struct Collapse {
    pub fibration: StokesFibration,
    /// Old base object to new base object.
    pub object_map: Vec<usize>,
    /// Old fiber element to new fiber element, per old base object.
    pub element_maps: Vec<Vec<usize>>,
    pub fully_constant: bool,
}

/// Removes every point whose two transitions are poset isomorphisms and
/// merges the arcs around it.
pub fn collapse_refinement(i: &StokesFibration) -> Result<Collapse> {
    let n = i
        .base()
        .circle_size()
        .ok_or_else(|| Error::Precondition("collapse needs a circle base".into()))?;
    let removable: Vec<bool> = (0..n)
        .map(|p| i.transition_is_isomorphism(2 * p) && i.transition_is_isomorphism(2 * p + 1))
        .collect();
    let kept: Vec<usize> = (0..n).filter(|&p| !removable[p]).collect();
    let identity_maps: Vec<Vec<usize>> = i.fibers().iter().map(|f| (0..f.len()).collect()).collect();
    if kept.is_empty() {
        return Ok(Collapse {
            fibration: i.clone(),
            object_map: (0..2 * n).collect(),
            element_maps: identity_maps,
            fully_constant: true,
        });
    }
    if kept.len() == n {
        return Ok(Collapse {
            fibration: i.clone(),
            object_map: (0..2 * n).collect(),
            element_maps: identity_maps,
            fully_constant: false,
        });
    }
    let m = kept.len();
    let mut object_map = vec![0; 2 * n];
    let mut element_maps = identity_maps.clone();
    // New arc j runs from kept[j] to kept[j+1]; its fiber is that of old arc a_{kept[j]}.
    for (j, &start) in kept.iter().enumerate() {
        object_map[start] = j;
        object_map[n + start] = m + j;
        let mut to_rep: Vec<usize> = (0..i.fiber(n + start).len()).collect();
        let mut p = (start + 1) % n;
        while removable[p] {
            // a_{p-1} ← p → a_p: carry a_p back onto the representative
            let minus = i.transition(2 * p + 1);
            let plus = i.transition(2 * p);
            let mut inv_plus = vec![0; plus.len()];
            for (b, &c) in plus.iter().enumerate() {
                inv_plus[c] = b;
            }
            let on_point: Vec<usize> = (0..i.fiber(p).len()).map(|b| to_rep[minus[b]]).collect();
            object_map[p] = m + j;
            element_maps[p] = on_point.clone();
            to_rep = (0..i.fiber(n + p).len()).map(|c| on_point[inv_plus[c]]).collect();
            object_map[n + p] = m + j;
            element_maps[n + p] = to_rep.clone();
            p = (p + 1) % n;
        }
    }
    let base = crate::base::make_circle_base(m)?;
    let mut fibers: Vec<FinPoset> = kept.iter().map(|&p| i.fiber(p).clone()).collect();
    fibers.extend(kept.iter().map(|&p| i.fiber(n + p).clone()));
    let mut transitions = Vec::with_capacity(2 * m);
    for &p in &kept {
        let prev_arc = n + (p + n - 1) % n;
        transitions.push(i.transition(2 * p).to_vec());
        transitions.push(
            i.transition(2 * p + 1)
                .iter()
                .map(|&c| element_maps[prev_arc][c])
                .collect(),
        );
    }
    Ok(Collapse {
        fibration: StokesFibration::new(base, fibers, transitions)?,
        object_map,
        element_maps,
        fully_constant: false,
    })
}

#[derive(Serialize, Deserialize)]
struct FibrationRepr {
    base: BaseCategory,
    fibers: BTreeMap<String, FinPoset>,
    transitions: BTreeMap<String, MonotoneMap>,
}

#[derive(Deserialize)]
struct FibrationInput {
    base: BaseCategory,
    fibers: BTreeMap<String, FinPoset>,
    transitions: BTreeMap<String, TransitionInput>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TransitionInput {
    Full {
        #[allow(dead_code)]
        source: Option<FinPoset>,
        #[allow(dead_code)]
        target: Option<FinPoset>,
        assignment: BTreeMap<String, String>,
    },
    Bare(BTreeMap<String, String>),
}

impl Serialize for StokesFibration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let fibers = (0..self.fibers.len())
            .map(|x| (self.base.object_name(x), self.fibers[x].clone()))
            .collect();
        let transitions = self
            .arrows
            .iter()
            .enumerate()
            .map(|(g, a)| (a.name.clone(), self.transition_map(g)))
            .collect();
        FibrationRepr {
            base: self.base.clone(),
            fibers,
            transitions,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StokesFibration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let input = FibrationInput::deserialize(d)?;
        fibration_from_input(input).map_err(D::Error::custom)
    }
}

fn fibration_from_input(input: FibrationInput) -> Result<StokesFibration> {
    let base = input.base;
    let mut fibers = Vec::with_capacity(base.num_objects());
    for x in 0..base.num_objects() {
        let name = base.object_name(x);
        fibers.push(
            input
                .fibers
                .get(&name)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("missing fiber over {name}")))?,
        );
    }
    if input.fibers.len() != fibers.len() {
        return Err(Error::Invalid("fibers given over unknown base objects".into()));
    }
    let arrows = base.arrows();
    if input.transitions.len() != arrows.len() {
        return Err(Error::Invalid("transitions given over unknown base arrows".into()));
    }
    let mut transitions = Vec::with_capacity(arrows.len());
    for a in &arrows {
        let t = input
            .transitions
            .get(&a.name)
            .ok_or_else(|| Error::Invalid(format!("missing transition for {}", a.name)))?;
        let names = match t {
            TransitionInput::Full { assignment, .. } => assignment,
            TransitionInput::Bare(m) => m,
        };
        transitions.push(assignment_indices(&fibers[a.source], &fibers[a.target], names)?);
    }
    StokesFibration::new(base, fibers, transitions)
}

#[derive(Serialize, Deserialize)]
struct MorphismRepr {
    source: StokesFibration,
    target: StokesFibration,
    maps: BTreeMap<String, BTreeMap<String, String>>,
}

impl Serialize for FibrationMorphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let base = self.source.base();
        let maps = (0..self.maps.len())
            .map(|x| {
                (
                    base.object_name(x),
                    assignment_names(self.source.fiber(x), self.target.fiber(x), &self.maps[x]),
                )
            })
            .collect();
        MorphismRepr {
            source: self.source.clone(),
            target: self.target.clone(),
            maps,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FibrationMorphism {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MorphismRepr::deserialize(d)?;
        let base = repr.source.base().clone();
        let maps = (0..base.num_objects())
            .map(|x| {
                let name = base.object_name(x);
                let m = repr
                    .maps
                    .get(&name)
                    .ok_or_else(|| Error::Invalid(format!("missing fiber map over {name}")))?;
                assignment_indices(repr.source.fiber(x), repr.target.fiber(x), m)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        FibrationMorphism::new(repr.source, repr.target, maps).map_err(D::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::base::{make_circle_base, make_poset_base};

    /// Fibers {a, b} discrete at the points, a<b on a0 and b<a on a1.
    pub(crate) fn one_dimensional_example() -> StokesFibration {
        let base = make_circle_base(2).unwrap();
        let anti = FinPoset::antichain(&["a", "b"]);
        let ab = FinPoset::from_named_relations(&["a", "b"], &[("a", "b")]).unwrap();
        let ba = FinPoset::from_named_relations(&["a", "b"], &[("b", "a")]).unwrap();
        let fibers = vec![anti.clone(), anti, ab, ba];
        let id = vec![0, 1];
        StokesFibration::new(base, fibers, vec![id.clone(); 4]).unwrap()
    }

    #[test]
    fn validation_examples() {
        let trivial = StokesFibration::constant(make_circle_base(3).unwrap(), FinPoset::chain(&["x", "y"]));
        assert!(trivial.validate().is_ok());
        assert!(one_dimensional_example().validate().is_ok());

        let square = FinPoset::from_named_relations(
            &["x", "l", "r", "y"],
            &[("x", "l"), ("x", "r"), ("l", "y"), ("r", "y")],
        )
        .unwrap();
        let base = make_poset_base(square).unwrap();
        let two = FinPoset::antichain(&["s", "t"]);
        let swap = vec![1, 0];
        let id = vec![0, 1];
        let mut transitions = vec![id.clone(); 4];
        let arrows = base.arrows();
        let x_l = arrows.iter().position(|a| a.name == "x<l").unwrap();
        transitions[x_l] = swap;
        let bad = StokesFibration::new(base, vec![two; 4], transitions).unwrap();
        let err = bad.validate().unwrap_err().to_string();
        assert!(err.contains("do not commute"), "{err}");
    }

    #[test]
    fn fiberwise_set_examples() {
        let i = one_dimensional_example();
        let set = i.fiberwise_set();
        assert!(set.fibers().iter().all(|f| f.is_discrete() && f.len() == 2));
        assert_eq!(set.fiberwise_set(), set);
    }

    #[test]
    fn sections_and_loci() {
        let i = one_dimensional_example();
        let sections = cocartesian_sections(&i);
        assert_eq!(sections.len(), 2);
        let locus = stokes_locus(&i, &sections[0], &sections[1]);
        assert_eq!(locus, vec![0, 1]);
        assert!(stokes_locus(&i, &sections[0], &sections[0]).is_empty());

        let trivial = StokesFibration::constant(make_circle_base(2).unwrap(), FinPoset::antichain(&["x", "y", "z"]));
        assert_eq!(cocartesian_sections(&trivial).len(), 3);
    }

    #[test]
    fn sections_agree_with_brute_force_on_a_twisted_circle() {
        // p0+ identity, p0- swaps; the loop has no fixed section
        let base = make_circle_base(1).unwrap();
        let f = FinPoset::antichain(&["u", "v"]);
        let twisted = StokesFibration::new(base.clone(), vec![f.clone(), f.clone()], vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(cocartesian_sections(&twisted).len(), brute_force_sections(&twisted));
        assert_eq!(brute_force_sections(&twisted), 0);
        let collapsing = StokesFibration::new(base, vec![f.clone(), f], vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(cocartesian_sections(&collapsing).len(), brute_force_sections(&collapsing));
        assert_eq!(brute_force_sections(&collapsing), 2);
    }

    fn brute_force_sections(i: &StokesFibration) -> usize {
        let sizes: Vec<usize> = i.fibers().iter().map(|f| f.len()).collect();
        let total: usize = sizes.iter().product();
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let choice: Vec<usize> = sizes
                    .iter()
                    .map(|&s| {
                        let v = c % s;
                        c /= s;
                        v
                    })
                    .collect();
                i.arrows()
                    .iter()
                    .enumerate()
                    .all(|(g, a)| i.transition(g)[choice[a.source]] == choice[a.target])
            })
            .count()
    }

    #[test]
    fn level_and_graded_fibrations() {
        let i = one_dimensional_example();
        let id = FibrationMorphism::identity(&i);
        assert!(is_level_fibration_morphism(&id));
        let term = FibrationMorphism::terminal(&i);
        assert!(is_level_fibration_morphism(&term));
        assert_eq!(graded_fibration(&term).unwrap(), i);
        assert_eq!(graded_fibration(&id).unwrap(), i.fiberwise_set());
    }

    #[test]
    fn pullback_examples() {
        let i = one_dimensional_example();
        assert_eq!(pullback_fibration(&BaseFunctor::identity(i.base()), &i).unwrap(), i);
        let cover = BaseFunctor::circle_cover(2, 3).unwrap();
        let up = pullback_fibration(&cover, &i).unwrap();
        assert_eq!(up.base().circle_size(), Some(6));
        for x in 0..12 {
            assert_eq!(up.fiber(x), i.fiber(cover.objects[x]));
        }
        assert!(up.validate().is_ok());
        assert_eq!(cocartesian_sections(&up).len(), 2);
    }

    #[test]
    fn refinement_collapses_back() {
        let i = one_dimensional_example();
        let refine = BaseFunctor::circle_refinement(2, &[1, 2]).unwrap();
        let fine = pullback_fibration(&refine, &i).unwrap();
        assert_eq!(fine.base().circle_size(), Some(5));
        let c = collapse_refinement(&fine).unwrap();
        assert!(!c.fully_constant);
        assert_eq!(c.fibration, i);
        assert_eq!(c.object_map, refine.objects);

        let trivial = StokesFibration::constant(make_circle_base(3).unwrap(), FinPoset::chain(&["x", "y"]));
        assert!(collapse_refinement(&trivial).unwrap().fully_constant);
        assert_eq!(collapse_refinement(&i).unwrap().fibration, i);
    }

    #[test]
    fn json_roundtrip() {
        let i = one_dimensional_example();
        let s = serde_json::to_string(&i).unwrap();
        let back: StokesFibration = serde_json::from_str(&s).unwrap();
        assert_eq!(back, i);
        let p = FibrationMorphism::terminal(&i);
        let s = serde_json::to_string(&p).unwrap();
        let back: FibrationMorphism = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
