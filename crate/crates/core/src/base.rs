//! Finite models of exit-path categories: poset bases and stratified circles.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poset::FinPoset;

/// A generating arrow of a base category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseArrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// The exit category of a stratified circle with `n` points, or a poset.
///
/// Circle objects are the points `p0..p{n-1}` (indices `0..n`) followed by
/// the arcs `a0..a{n-1}` (indices `n..2n`), arc `a_i` lying between `p_i` and
/// `p_{i+1}` counterclockwise. Point `p_i` has the arrows `p_i+` to `a_i` and
/// `p_i-` to `a_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseCategory {
    Circle { n: usize },
    Poset(FinPoset),
}

/// A morphism of the base: an identity or a path of generating arrows.
/// Poset bases use a canonical path of Hasse covers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseMorphism {
    pub source: usize,
    pub target: usize,
    pub path: Vec<usize>,
}

impl BaseMorphism {
    pub fn is_identity(&self) -> bool {
        self.path.is_empty()
    }
}

pub fn make_circle_base(n: usize) -> Result<BaseCategory> {
    if n == 0 {
        return Err(Error::Invalid("a stratified circle needs at least one point".into()));
    }
    Ok(BaseCategory::Circle { n })
}

pub fn make_poset_base(p: FinPoset) -> Result<BaseCategory> {
    crate::poset::validate_poset(p.elements(), p.relation())
        .map_err(|v| Error::Invalid(v.to_string()))?;
    Ok(BaseCategory::Poset(p))
}

impl BaseCategory {
    pub fn num_objects(&self) -> usize {
        match self {
            BaseCategory::Circle { n } => 2 * n,
            BaseCategory::Poset(p) => p.len(),
        }
    }

    pub fn object_name(&self, x: usize) -> String {
        match self {
            BaseCategory::Circle { n } => {
                if x < *n {
                    format!("p{x}")
                } else {
                    format!("a{}", x - n)
                }
            }
            BaseCategory::Poset(p) => p.name(x).to_string(),
        }
    }

    pub fn object_names(&self) -> Vec<String> {
        (0..self.num_objects()).map(|x| self.object_name(x)).collect()
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        match self {
            BaseCategory::Circle { n } => {
                let parse = |prefix: &str| {
                    name.strip_prefix(prefix)
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|&i| i < *n && name == format!("{prefix}{i}"))
                };
                if let Some(i) = parse("p") {
                    Ok(i)
                } else if let Some(i) = parse("a") {
                    Ok(n + i)
                } else {
                    Err(Error::UnknownElement(name.to_string()))
                }
            }
            BaseCategory::Poset(p) => p.index_of(name),
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, BaseCategory::Circle { .. })
    }

    pub fn circle_size(&self) -> Option<usize> {
        match self {
            BaseCategory::Circle { n } => Some(*n),
            BaseCategory::Poset(_) => None,
        }
    }

    /// Point index of a circle object, if it is a point.
    pub fn is_point(&self, x: usize) -> bool {
        match self {
            BaseCategory::Circle { n } => x < *n,
            BaseCategory::Poset(_) => false,
        }
    }

    pub fn arrows(&self) -> Vec<BaseArrow> {
        match self {
            BaseCategory::Circle { n } => {
                let n = *n;
                (0..n)
                    .flat_map(|i| {
                        [
                            BaseArrow {
                                name: format!("p{i}+"),
                                source: i,
                                target: n + i,
                            },
                            BaseArrow {
                                name: format!("p{i}-"),
                                source: i,
                                target: n + (i + n - 1) % n,
                            },
                        ]
                    })
                    .collect()
            }
            BaseCategory::Poset(p) => p
                .covers()
                .iter()
                .map(|&(a, b)| BaseArrow {
                    name: format!("{}<{}", p.name(a), p.name(b)),
                    source: a,
                    target: b,
                })
                .collect(),
        }
    }

    pub fn arrow_index(&self, name: &str) -> Result<usize> {
        self.arrows()
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn identity(&self, x: usize) -> BaseMorphism {
        BaseMorphism {
            source: x,
            target: x,
            path: Vec::new(),
        }
    }

    /// Every morphism of the base, identities first.
    pub fn morphisms(&self) -> Vec<BaseMorphism> {
        let mut out: Vec<BaseMorphism> = (0..self.num_objects()).map(|x| self.identity(x)).collect();
        match self {
            BaseCategory::Circle { .. } => {
                for (i, a) in self.arrows().iter().enumerate() {
                    out.push(BaseMorphism {
                        source: a.source,
                        target: a.target,
                        path: vec![i],
                    });
                }
            }
            BaseCategory::Poset(p) => {
                for x in 0..p.len() {
                    for y in 0..p.len() {
                        if p.lt(x, y) {
                            out.push(self.poset_morphism(x, y).expect("comparable"));
                        }
                    }
                }
            }
        }
        out
    }

    /// Morphisms `x → y`. At most one for posets; two parallel arrows for
    /// the one-point circle.
    pub fn hom(&self, x: usize, y: usize) -> Vec<BaseMorphism> {
        if x == y {
            return vec![self.identity(x)];
        }
        match self {
            BaseCategory::Circle { .. } => self
                .arrows()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.source == x && a.target == y)
                .map(|(i, _)| BaseMorphism {
                    source: x,
                    target: y,
                    path: vec![i],
                })
                .collect(),
            BaseCategory::Poset(_) => self.poset_morphism(x, y).into_iter().collect(),
        }
    }

    /// The canonical cover path from `x` to `y` in a poset base.
    fn poset_morphism(&self, x: usize, y: usize) -> Option<BaseMorphism> {
        let BaseCategory::Poset(p) = self else {
            return None;
        };
        if !p.leq(x, y) {
            return None;
        }
        let arrows = self.arrows();
        let mut path = Vec::new();
        let mut cur = x;
        while cur != y {
            let next = arrows
                .iter()
                .position(|a| a.source == cur && p.leq(a.target, y))
                .expect("cover towards a larger element");
            path.push(next);
            cur = arrows[next].target;
        }
        Some(BaseMorphism {
            source: x,
            target: y,
            path,
        })
    }

    /// `g ∘ f`. Fails when the morphisms are not composable.
    pub fn compose(&self, f: &BaseMorphism, g: &BaseMorphism) -> Result<BaseMorphism> {
        if f.target != g.source {
            return Err(Error::Invalid("base morphisms are not composable".into()));
        }
        if f.is_identity() {
            return Ok(g.clone());
        }
        if g.is_identity() {
            return Ok(f.clone());
        }
        match self {
            BaseCategory::Circle { .. } => Err(Error::Invalid(
                "no composable pair of arrows in a stratified circle".into(),
            )),
            BaseCategory::Poset(_) => Ok(self
                .poset_morphism(f.source, g.target)
                .expect("composite of comparable pairs")),
        }
    }

    /// All cover paths from `x` to `y` (poset bases), used to check path
    /// independence exhaustively.
    pub fn all_paths(&self, x: usize, y: usize) -> Vec<Vec<usize>> {
        let arrows = self.arrows();
        let mut out = Vec::new();
        let mut stack = vec![(x, Vec::new())];
        while let Some((cur, path)) = stack.pop() {
            if cur == y {
                out.push(path);
                continue;
            }
            for (i, a) in arrows.iter().enumerate() {
                if a.source == cur && self.reaches(a.target, y) {
                    let mut next = path.clone();
                    next.push(i);
                    stack.push((a.target, next));
                }
            }
        }
        out
    }

    fn reaches(&self, x: usize, y: usize) -> bool {
        match self {
            BaseCategory::Circle { .. } => x == y || !self.hom(x, y).is_empty(),
            BaseCategory::Poset(p) => p.leq(x, y),
        }
    }

    /// An object from which every object is reachable by a unique morphism.
    pub fn initial_object(&self) -> Option<usize> {
        match self {
            BaseCategory::Circle { .. } => None,
            BaseCategory::Poset(p) => p.minimum(),
        }
    }

    /// Connected components of the underlying graph.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.num_objects();
        let arrows = self.arrows();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut stack = vec![s];
            let mut members = vec![];
            while let Some(x) = stack.pop() {
                members.push(x);
                for a in &arrows {
                    for (u, v) in [(a.source, a.target), (a.target, a.source)] {
                        if u == x && comp[v] == usize::MAX {
                            comp[v] = id;
                            stack.push(v);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph base {\n");
        for x in 0..self.num_objects() {
            let shape = if self.is_point(x) { "point" } else { "ellipse" };
            s.push_str(&format!(
                "  \"{}\" [shape={}, xlabel=\"{}\"];\n",
                self.object_name(x),
                shape,
                self.object_name(x)
            ));
        }
        for a in self.arrows() {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.object_name(a.source),
                self.object_name(a.target),
                a.name
            ));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum BaseRepr {
    Circle { n: usize },
    Poset { poset: FinPoset },
}

impl Serialize for BaseCategory {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BaseCategory::Circle { n } => BaseRepr::Circle { n: *n },
            BaseCategory::Poset(p) => BaseRepr::Poset { poset: p.clone() },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BaseCategory {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match BaseRepr::deserialize(d)? {
            BaseRepr::Circle { n } => make_circle_base(n).map_err(D::Error::custom),
            BaseRepr::Poset { poset } => make_poset_base(poset).map_err(D::Error::custom),
        }
    }
}
