//! Finite posets, monotone maps, level morphisms and the graded poset `I_p`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The first order axiom that fails, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosetViolation {
    Shape { rows: usize, expected: usize },
    DuplicateElement(String),
    Reflexivity(String),
    Antisymmetry(String, String),
    Transitivity(String, String, String),
}

impl fmt::Display for PosetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosetViolation::Shape { rows, expected } => {
                write!(f, "relation matrix is not {expected}x{expected} (found {rows} rows)")
            }
            PosetViolation::DuplicateElement(a) => write!(f, "duplicate element {a:?}"),
            PosetViolation::Reflexivity(a) => write!(f, "reflexivity fails at {a:?}"),
            PosetViolation::Antisymmetry(a, b) => {
                write!(f, "antisymmetry fails: {a:?} <= {b:?} and {b:?} <= {a:?}")
            }
            PosetViolation::Transitivity(a, b, c) => write!(
                f,
                "transitivity fails: {a:?} <= {b:?} <= {c:?} but not {a:?} <= {c:?}"
            ),
        }
    }
}

/// Checks the order axioms on a full relation matrix.
pub fn validate_poset(elements: &[String], leq: &[Vec<bool>]) -> std::result::Result<(), PosetViolation> {
    let n = elements.len();
    if leq.len() != n || leq.iter().any(|row| row.len() != n) {
        return Err(PosetViolation::Shape {
            rows: leq.len(),
            expected: n,
        });
    }
    let mut seen = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        if seen.insert(e.as_str(), i).is_some() {
            return Err(PosetViolation::DuplicateElement(e.clone()));
        }
    }
    for i in 0..n {
        if !leq[i][i] {
            return Err(PosetViolation::Reflexivity(elements[i].clone()));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if leq[i][j] && leq[j][i] {
                return Err(PosetViolation::Antisymmetry(
                    elements[i].clone(),
                    elements[j].clone(),
                ));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !leq[i][j] {
                continue;
            }
            for k in 0..n {
                if leq[j][k] && !leq[i][k] {
                    return Err(PosetViolation::Transitivity(
                        elements[i].clone(),
                        elements[j].clone(),
                        elements[k].clone(),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// A finite poset on named elements. Internally elements are addressed by
/// their position in `elements()`.
#[derive(Clone, PartialEq, Eq)]
pub struct FinPoset {
    elements: Vec<String>,
    leq: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
    index: HashMap<String, usize>,
}

impl FinPoset {
    pub fn new(elements: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        validate_poset(&elements, &leq).map_err(|v| Error::Invalid(v.to_string()))?;
        Ok(Self::build(elements, leq))
    }

    fn build(elements: Vec<String>, leq: Vec<Vec<bool>>) -> Self {
        let n = elements.len();
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] {
                    let between = (0..n).any(|c| c != a && c != b && leq[a][c] && leq[c][b]);
                    if !between {
                        covers.push((a, b));
                    }
                }
            }
        }
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        FinPoset {
            elements,
            leq,
            covers,
            index,
        }
    }

    /// Reflexive-transitive closure of the given strict relations, indexed
    /// by position.
    pub fn from_relations(elements: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("relation ({a}, {b}) out of range")));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        FinPoset::new(elements, leq)
    }

    /// Same as [`FinPoset::from_relations`] but with named elements.
    pub fn from_named_relations<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let pos = |s: &str| {
            names
                .iter()
                .position(|e| e == s)
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let rel = relations
            .iter()
            .map(|(a, b)| Ok((pos(a.as_ref())?, pos(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        FinPoset::from_relations(names, &rel)
    }

    pub fn chain<S: AsRef<str>>(elements: &[S]) -> Self {
        let n = elements.len();
        let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        Self::build(elements.iter().map(|s| s.as_ref().to_string()).collect(), leq)
    }

    pub fn antichain<S: AsRef<str>>(elements: &[S]) -> Self {
        let n = elements.len();
        let leq = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        Self::build(elements.iter().map(|s| s.as_ref().to_string()).collect(), leq)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.leq
    }

    /// Hasse diagram edges `(a, b)` with `a ⋖ b`.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.covers.contains(&(a, b))
    }

    pub fn lower_covers(&self, b: usize) -> Vec<usize> {
        self.covers.iter().filter(|c| c.1 == b).map(|c| c.0).collect()
    }

    pub fn upper_covers(&self, a: usize) -> Vec<usize> {
        self.covers.iter().filter(|c| c.0 == a).map(|c| c.1).collect()
    }

    /// `{b : b ≤ a}` (or `b < a`), in index order.
    pub fn down_set(&self, a: usize, strict: bool) -> Vec<usize> {
        (0..self.len())
            .filter(|&b| self.leq[b][a] && !(strict && b == a))
            .collect()
    }

    pub fn down_set_named(&self, a: &str, strict: bool) -> Result<Vec<String>> {
        let i = self.index_of(a)?;
        Ok(self
            .down_set(i, strict)
            .into_iter()
            .map(|b| self.elements[b].clone())
            .collect())
    }

    pub fn up_set(&self, a: usize, strict: bool) -> Vec<usize> {
        (0..self.len())
            .filter(|&b| self.leq[a][b] && !(strict && b == a))
            .collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.covers.is_empty()
    }

    pub fn is_total(&self) -> bool {
        (0..self.len()).all(|a| (0..self.len()).all(|b| self.comparable(a, b)))
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.leq[a][b]))
    }

    /// Elements sorted so that `a < b` implies `a` comes first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&a| (self.down_set(a, true).len(), a));
        order
    }

    /// Number of elements in a longest chain minus one.
    pub fn height(&self) -> usize {
        let mut h = vec![0usize; self.len()];
        for a in self.linear_extension() {
            h[a] = self
                .lower_covers(a)
                .into_iter()
                .map(|c| h[c] + 1)
                .max()
                .unwrap_or(0);
        }
        h.into_iter().max().unwrap_or(0)
    }

    /// Classes of the equivalence relation generated by comparability.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(a) = stack.pop() {
                members.push(a);
                for b in 0..n {
                    if comp[b] == usize::MAX && self.comparable(a, b) {
                        comp[b] = id;
                        stack.push(b);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Same poset with every element renamed.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        FinPoset::new(names, self.leq.clone())
    }

    pub fn singleton(name: &str) -> Self {
        FinPoset::antichain(&[name])
    }

    pub fn empty() -> Self {
        FinPoset::antichain::<&str>(&[])
    }
}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.elements[a], self.elements[b]))
            .collect();
        write!(f, "Poset{:?} covers {:?}", self.elements, covers)
    }
}

/// Same elements, trivial order.
pub fn underlying_set(p: &FinPoset) -> FinPoset {
    FinPoset::antichain(p.elements())
}

#[derive(Serialize, Deserialize)]
struct PosetRepr {
    elements: Vec<String>,
    leq: Vec<Vec<LeqEntry>>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(untagged)]
enum LeqEntry {
    Int(u8),
    Bool(bool),
}

impl LeqEntry {
    fn truth(self) -> std::result::Result<bool, String> {
        match self {
            LeqEntry::Bool(b) => Ok(b),
            LeqEntry::Int(0) => Ok(false),
            LeqEntry::Int(1) => Ok(true),
            LeqEntry::Int(k) => Err(format!("relation entry {k} is not 0 or 1")),
        }
    }
}

impl Serialize for FinPoset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PosetRepr {
            elements: self.elements.clone(),
            leq: self
                .leq
                .iter()
                .map(|row| row.iter().map(|&b| LeqEntry::Int(u8::from(b))).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinPoset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PosetRepr::deserialize(d)?;
        let leq = repr
            .leq
            .into_iter()
            .map(|row| row.into_iter().map(LeqEntry::truth).collect())
            .collect::<std::result::Result<Vec<Vec<bool>>, String>>()
            .map_err(D::Error::custom)?;
        FinPoset::new(repr.elements, leq).map_err(D::Error::custom)
    }
}

/// A map of finite posets given by an element assignment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotoneMap {
    pub source: FinPoset,
    pub target: FinPoset,
    pub assignment: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: FinPoset, target: FinPoset, assignment: Vec<usize>) -> Result<Self> {
        check_monotone(&source, &target, &assignment)?;
        Ok(MonotoneMap {
            source,
            target,
            assignment,
        })
    }

    pub fn identity(p: &FinPoset) -> Self {
        MonotoneMap {
            source: p.clone(),
            target: p.clone(),
            assignment: (0..p.len()).collect(),
        }
    }

    /// The map to the one-point poset named `name`.
    pub fn to_point(p: &FinPoset, name: &str) -> Self {
        MonotoneMap {
            source: p.clone(),
            target: FinPoset::singleton(name),
            assignment: vec![0; p.len()],
        }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.assignment[a]
    }
}

/// Checks that `assignment` is a monotone map `source → target`.
pub fn check_monotone(source: &FinPoset, target: &FinPoset, assignment: &[usize]) -> Result<()> {
    if assignment.len() != source.len() {
        return Err(Error::Dimension(format!(
            "assignment has {} entries for {} elements",
            assignment.len(),
            source.len()
        )));
    }
    if let Some(&bad) = assignment.iter().find(|&&b| b >= target.len()) {
        return Err(Error::Invalid(format!("assignment value {bad} out of range")));
    }
    for &(a, b) in source.covers() {
        if !target.leq(assignment[a], assignment[b]) {
            return Err(Error::Invalid(format!(
                "map is not monotone: {} <= {} but {} is not <= {}",
                source.name(a),
                source.name(b),
                target.name(assignment[a]),
                target.name(assignment[b])
            )));
        }
    }
    Ok(())
}

/// Surjective and reflects strict inequalities.
pub fn is_level_morphism(f: &MonotoneMap) -> bool {
    is_level_assignment(&f.source, &f.target, &f.assignment)
}

pub fn is_level_assignment(source: &FinPoset, target: &FinPoset, p: &[usize]) -> bool {
    let mut hit = vec![false; target.len()];
    for &b in p {
        hit[b] = true;
    }
    if hit.iter().any(|h| !h) {
        return false;
    }
    for a in 0..source.len() {
        for b in 0..source.len() {
            if target.lt(p[a], p[b]) && !source.lt(a, b) {
                return false;
            }
        }
    }
    true
}

/// `I_p`: same elements, `a ≤ a'` iff `p(a) = p(a')` and `a ≤ a'`.
pub fn graded_poset(f: &MonotoneMap) -> FinPoset {
    graded_by_assignment(&f.source, &f.assignment)
}

pub fn graded_by_assignment(source: &FinPoset, p: &[usize]) -> FinPoset {
    let n = source.len();
    let leq = (0..n)
        .map(|a| (0..n).map(|b| p[a] == p[b] && source.leq(a, b)).collect())
        .collect();
    FinPoset::build(source.elements.clone(), leq)
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    source: FinPoset,
    target: FinPoset,
    assignment: BTreeMap<String, String>,
}

impl Serialize for MonotoneMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr {
            source: self.source.clone(),
            target: self.target.clone(),
            assignment: assignment_names(&self.source, &self.target, &self.assignment),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MonotoneMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MapRepr::deserialize(d)?;
        let assignment = assignment_indices(&repr.source, &repr.target, &repr.assignment)
            .map_err(D::Error::custom)?;
        MonotoneMap::new(repr.source, repr.target, assignment).map_err(D::Error::custom)
    }
}

pub(crate) fn assignment_names(
    source: &FinPoset,
    target: &FinPoset,
    assignment: &[usize],
) -> BTreeMap<String, String> {
    assignment
        .iter()
        .enumerate()
        .map(|(a, &b)| (source.name(a).to_string(), target.name(b).to_string()))
        .collect()
}

pub(crate) fn assignment_indices(
    source: &FinPoset,
    target: &FinPoset,
    names: &BTreeMap<String, String>,
) -> Result<Vec<usize>> {
    if names.len() != source.len() {
        return Err(Error::Invalid(format!(
            "assignment covers {} of {} elements",
            names.len(),
            source.len()
        )));
    }
    source
        .elements()
        .iter()
        .map(|a| {
            let b = names
                .get(a)
                .ok_or_else(|| Error::UnknownElement(a.clone()))?;
            target.index_of(b)
        })
        .collect()
}

/// Whether some bijection of elements carries one order onto the other.
pub fn posets_isomorphic(p: &FinPoset, q: &FinPoset) -> bool {
    poset_isomorphism(p, q).is_some()
}

/// A bijection `σ` with `a ≤ b ⟺ σ(a) ≤ σ(b)`, found by backtracking.
pub fn poset_isomorphism(p: &FinPoset, q: &FinPoset) -> Option<Vec<usize>> {
    let n = p.len();
    if n != q.len() || p.covers().len() != q.covers().len() {
        return None;
    }
    let sig = |x: &FinPoset, a: usize| (x.down_set(a, true).len(), x.up_set(a, true).len());
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        p: &FinPoset,
        q: &FinPoset,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        sig: &dyn Fn(&FinPoset, usize) -> (usize, usize),
    ) -> bool {
        if i == p.len() {
            return true;
        }
        for c in 0..q.len() {
            if used[c] || sig(p, i) != sig(q, c) {
                continue;
            }
            let ok = (0..i).all(|j| {
                p.leq(i, j) == q.leq(c, assign[j]) && p.leq(j, i) == q.leq(assign[j], c)
            });
            if ok {
                assign[i] = c;
                used[c] = true;
                if go(i + 1, p, q, assign, used, sig) {
                    return true;
                }
                used[c] = false;
            }
        }
        false
    }
    if go(0, p, q, &mut assign, &mut used, &sig) {
        Some(assign)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn validation_reports_axioms() {
        let chain = FinPoset::chain(&["a", "b", "c"]);
        assert!(validate_poset(chain.elements(), chain.relation()).is_ok());

        let cyc = vec![vec![true, true], vec![true, true]];
        assert!(matches!(
            validate_poset(&names(&["a", "b"]), &cyc),
            Err(PosetViolation::Antisymmetry(..))
        ));

        let intrans = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        assert!(matches!(
            validate_poset(&names(&["a", "b", "c"]), &intrans),
            Err(PosetViolation::Transitivity(..))
        ));
    }

    #[test]
    fn down_sets() {
        let chain = FinPoset::chain(&["a", "b", "c"]);
        assert_eq!(chain.down_set_named("c", false).unwrap(), names(&["a", "b", "c"]));
        assert_eq!(chain.down_set_named("c", true).unwrap(), names(&["a", "b"]));
        let anti = FinPoset::antichain(&["a", "b"]);
        assert_eq!(anti.down_set_named("a", false).unwrap(), names(&["a"]));
        assert!(anti.down_set_named("z", false).is_err());
    }

    #[test]
    fn level_morphism_examples() {
        let chain = FinPoset::chain(&["a", "b"]);
        assert!(is_level_morphism(&MonotoneMap::identity(&chain)));
        let anti = FinPoset::antichain(&["a", "b"]);
        let f = MonotoneMap::new(anti, FinPoset::chain(&["x", "y"]), vec![0, 1]).unwrap();
        assert!(!is_level_morphism(&f));
        let g = MonotoneMap::to_point(&chain, "*");
        assert!(is_level_morphism(&g));
    }

    #[test]
    fn graded_poset_examples() {
        let chain = FinPoset::chain(&["a", "b"]);
        let id = graded_poset(&MonotoneMap::identity(&chain));
        assert!(id.is_discrete());

        let abc = FinPoset::chain(&["a", "b", "c"]);
        let f = MonotoneMap::new(abc.clone(), FinPoset::chain(&["x", "y"]), vec![0, 0, 1]).unwrap();
        let g = graded_poset(&f);
        assert!(g.lt(0, 1));
        assert!(!g.comparable(1, 2));
        assert!(!g.comparable(0, 2));

        let t = graded_poset(&MonotoneMap::to_point(&abc, "*"));
        assert_eq!(t, abc);
    }

    #[test]
    fn underlying_set_examples() {
        let chain = FinPoset::chain(&["a", "b"]);
        assert!(underlying_set(&chain).is_discrete());
        assert_eq!(underlying_set(&FinPoset::empty()).len(), 0);
    }

    #[test]
    fn json_roundtrip_accepts_booleans() {
        let p = FinPoset::chain(&["a", "b"]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"elements":["a","b"],"leq":[[1,1],[0,1]]}"#);
        let back: FinPoset = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let b: FinPoset =
            serde_json::from_str(r#"{"elements":["a","b"],"leq":[[true,false],[true,true]]}"#)
                .unwrap();
        assert!(b.lt(1, 0));
        let bad = serde_json::from_str::<FinPoset>(r#"{"elements":["a","b"],"leq":[[1,1],[1,1]]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn isomorphism_search() {
        let p = FinPoset::from_named_relations(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let q = FinPoset::from_named_relations(&["x", "y", "z"], &[("y", "x"), ("z", "x")]).unwrap();
        assert!(posets_isomorphic(&p, &q));
        assert!(!posets_isomorphic(&p, &FinPoset::chain(&["a", "b", "c"])));
    }

    fn arb_poset() -> impl Strategy<Value = FinPoset> {
        (0usize..6).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
                let rel: Vec<(usize, usize)> = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| i < j && bits[i * n + j])
                    .collect();
                let names = (0..n).map(|i| format!("e{i}")).collect();
                FinPoset::from_relations(names, &rel).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn underlying_set_is_idempotent(p in arb_poset()) {
            let once = underlying_set(&p);
            prop_assert_eq!(underlying_set(&once), once);
        }

        #[test]
        fn covers_generate_the_order(p in arb_poset()) {
            let again = FinPoset::from_relations(p.elements().to_vec(), p.covers()).unwrap();
            prop_assert_eq!(again, p);
        }

        #[test]
        fn identity_and_point_maps_are_level(p in arb_poset()) {
            prop_assert!(is_level_morphism(&MonotoneMap::identity(&p)));
            if !p.is_empty() {
                prop_assert!(is_level_morphism(&MonotoneMap::to_point(&p, "*")));
            }
        }

        #[test]
        fn graded_order_is_contained_and_stays_in_fibers(
            p in arb_poset(),
            seed in any::<u64>(),
        ) {
            // collapse a random down-closed prefix of a linear extension
            let ext = p.linear_extension();
            let cut = if p.is_empty() { 0 } else { (seed as usize) % (p.len() + 1) };
            let mut assign = vec![0; p.len()];
            for (i, &a) in ext.iter().enumerate() {
                assign[a] = usize::from(i >= cut);
            }
            let levels = if cut == 0 || cut == p.len() { 1 } else { 2 };
            let target = FinPoset::chain(&["lo", "hi"][..levels]);
            if levels == 1 {
                assign.iter_mut().for_each(|x| *x = 0);
            }
            let f = MonotoneMap::new(p.clone(), target, assign.clone()).unwrap();
            let g = graded_poset(&f);
            prop_assert_eq!(g.elements(), p.elements());
            for a in 0..p.len() {
                for b in 0..p.len() {
                    if g.leq(a, b) {
                        prop_assert!(p.leq(a, b));
                    }
                }
            }
            if is_level_morphism(&f) {
                for comp in g.components() {
                    prop_assert!(comp.iter().all(|&a| assign[a] == assign[comp[0]]));
                }
            }
        }
    }
}
