//! The total category of a fibration and its nerve.

use std::collections::HashMap;

use crate::base::BaseMorphism;
use crate::error::{Error, Result};
use crate::fibration::StokesFibration;

/// A morphism `(γ, a, b)` of the total category: `γ: x → y` in the base and
/// `f_γ(a) ≤ b` in the fiber over `y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TotalMorphism {
    pub base: usize,
    pub source: usize,
    pub target: usize,
}

/// A generating arrow of the total category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// A Hasse cover `a ⋖ b` in the fiber over `x`.
    Cover { x: usize, a: usize, b: usize },
    /// The cocartesian lift of base arrow `arrow` at `a`.
    Lift { arrow: usize, a: usize },
}

/// Composable chain of nonidentity morphisms starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub start: usize,
    pub arrows: Vec<usize>,
}

/// Objects, all morphisms and composition of the total category.
#[derive(Clone, Debug)]
pub struct TotalCategory {
    pub objects: Vec<(usize, usize)>,
    pub base_morphisms: Vec<BaseMorphism>,
    pub morphisms: Vec<TotalMorphism>,
    object_index: HashMap<(usize, usize), usize>,
    morphism_index: HashMap<TotalMorphism, usize>,
    base_compose: HashMap<(usize, usize), usize>,
    outgoing: Vec<Vec<usize>>,
}

impl TotalCategory {
    pub fn new(i: &StokesFibration) -> Self {
        let base = i.base();
        let objects = i.total_objects();
        let object_index: HashMap<(usize, usize), usize> =
            objects.iter().enumerate().map(|(k, &o)| (o, k)).collect();
        let base_morphisms = base.morphisms();
        let base_lookup: HashMap<(usize, usize, Vec<usize>), usize> = base_morphisms
            .iter()
            .enumerate()
            .map(|(k, m)| ((m.source, m.target, m.path.clone()), k))
            .collect();
        let mut base_compose = HashMap::new();
        for (fi, f) in base_morphisms.iter().enumerate() {
            for (gi, g) in base_morphisms.iter().enumerate() {
                if f.target != g.source {
                    continue;
                }
                if let Ok(h) = base.compose(f, g) {
                    let k = base_lookup[&(h.source, h.target, h.path.clone())];
                    base_compose.insert((fi, gi), k);
                }
            }
        }
        let mut morphisms = Vec::new();
        for (bi, m) in base_morphisms.iter().enumerate() {
            let (fx, fy) = (i.fiber(m.source), i.fiber(m.target));
            for a in 0..fx.len() {
                let fa = i.transport(m, a);
                for b in 0..fy.len() {
                    if fy.leq(fa, b) {
                        morphisms.push(TotalMorphism {
                            base: bi,
                            source: object_index[&(m.source, a)],
                            target: object_index[&(m.target, b)],
                        });
                    }
                }
            }
        }
        let morphism_index: HashMap<TotalMorphism, usize> =
            morphisms.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        let mut outgoing = vec![Vec::new(); objects.len()];
        for (k, m) in morphisms.iter().enumerate() {
            if !Self::is_identity_raw(&base_morphisms, m) {
                outgoing[m.source].push(k);
            }
        }
        TotalCategory {
            objects,
            base_morphisms,
            morphisms,
            object_index,
            morphism_index,
            base_compose,
            outgoing,
        }
    }

    fn is_identity_raw(base: &[BaseMorphism], m: &TotalMorphism) -> bool {
        base[m.base].is_identity() && m.source == m.target
    }

    pub fn object(&self, x: usize, a: usize) -> usize {
        self.object_index[&(x, a)]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        Self::is_identity_raw(&self.base_morphisms, &self.morphisms[m])
    }

    pub fn identity(&self, o: usize) -> usize {
        let x = self.objects[o].0;
        self.morphism_index[&TotalMorphism {
            base: x,
            source: o,
            target: o,
        }]
    }

    /// `g ∘ f`.
    pub fn compose(&self, f: usize, g: usize) -> Result<usize> {
        let (mf, mg) = (&self.morphisms[f], &self.morphisms[g]);
        if mf.target != mg.source {
            return Err(Error::Invalid("total morphisms are not composable".into()));
        }
        let base = self
            .base_compose
            .get(&(mf.base, mg.base))
            .copied()
            .ok_or_else(|| Error::Invalid("base morphisms do not compose".into()))?;
        Ok(self.morphism_index[&TotalMorphism {
            base,
            source: mf.source,
            target: mg.target,
        }])
    }

    /// Nonidentity morphisms leaving an object.
    pub fn outgoing(&self, o: usize) -> &[usize] {
        &self.outgoing[o]
    }

    /// Composable chains of nonidentity morphisms of length `≤ maxlen`,
    /// grouped by length. Fails when nonidentity morphisms form a cycle.
    pub fn nondegenerate_chains(&self, maxlen: usize) -> Result<Vec<Vec<Chain>>> {
        self.check_acyclic()?;
        let mut out: Vec<Vec<Chain>> = vec![(0..self.objects.len())
            .map(|o| Chain {
                start: o,
                arrows: Vec::new(),
            })
            .collect()];
        for len in 1..=maxlen {
            let mut next = Vec::new();
            for c in &out[len - 1] {
                let end = c
                    .arrows
                    .last()
                    .map_or(c.start, |&m| self.morphisms[m].target);
                for &m in &self.outgoing[end] {
                    let mut arrows = c.arrows.clone();
                    arrows.push(m);
                    next.push(Chain {
                        start: c.start,
                        arrows,
                    });
                }
            }
            if next.is_empty() {
                break;
            }
            out.push(next);
        }
        Ok(out)
    }

    /// Length of the longest chain of nonidentity morphisms.
    pub fn max_chain_length(&self) -> Result<usize> {
        let order = self.check_acyclic()?;
        let mut longest = vec![0usize; self.objects.len()];
        for &o in order.iter().rev() {
            longest[o] = self.outgoing[o]
                .iter()
                .map(|&m| longest[self.morphisms[m].target] + 1)
                .max()
                .unwrap_or(0);
        }
        Ok(longest.into_iter().max().unwrap_or(0))
    }

    /// A topological order of objects along nonidentity morphisms.
    fn check_acyclic(&self) -> Result<Vec<usize>> {
        let n = self.objects.len();
        let mut indeg = vec![0usize; n];
        for o in 0..n {
            for &m in &self.outgoing[o] {
                let t = self.morphisms[m].target;
                if t == o {
                    return Err(Error::Cycle(format!("object {o}")));
                }
                indeg[t] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&o| indeg[o] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(o) = queue.pop() {
            order.push(o);
            for &m in &self.outgoing[o] {
                let t = self.morphisms[m].target;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push(t);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|o| !order.contains(o)).unwrap_or(0);
            return Err(Error::Cycle(format!("object {stuck}")));
        }
        Ok(order)
    }
}

/// Generating arrows: fiber covers, then lifts.
pub fn generators(i: &StokesFibration) -> Vec<Generator> {
    let mut out = Vec::new();
    for x in 0..i.base().num_objects() {
        for &(a, b) in i.fiber(x).covers() {
            out.push(Generator::Cover { x, a, b });
        }
    }
    for (g, arrow) in i.arrows().iter().enumerate() {
        for a in 0..i.fiber(arrow.source).len() {
            out.push(Generator::Lift { arrow: g, a });
        }
    }
    out
}

/// `(source, target)` total objects of a generator.
pub fn generator_ends(i: &StokesFibration, gen: &Generator) -> ((usize, usize), (usize, usize)) {
    match *gen {
        Generator::Cover { x, a, b } => ((x, a), (x, b)),
        Generator::Lift { arrow, a } => {
            let ar = &i.arrows()[arrow];
            ((ar.source, a), (ar.target, i.transition(arrow)[a]))
        }
    }
}

/// Identifier used in JSON: `x:a<b` for covers and `γ:a` for lifts.
pub fn generator_name(i: &StokesFibration, gen: &Generator) -> String {
    match *gen {
        Generator::Cover { x, a, b } => format!(
            "{}:{}<{}",
            i.base().object_name(x),
            i.fiber(x).name(a),
            i.fiber(x).name(b)
        ),
        Generator::Lift { arrow, a } => {
            let ar = &i.arrows()[arrow];
            format!("{}:{}", ar.name, i.fiber(ar.source).name(a))
        }
    }
}

/// DOT rendering of the total category's generating arrows; lifts are bold.
pub fn total_dot(i: &StokesFibration) -> String {
    let mut s = String::from("digraph total {\n");
    for (x, a) in i.total_objects() {
        s.push_str(&format!("  \"{}\";\n", i.total_object_name(x, a)));
    }
    for gen in generators(i) {
        let ((x, a), (y, b)) = generator_ends(i, &gen);
        let style = match gen {
            Generator::Cover { .. } => "solid",
            Generator::Lift { .. } => "bold, color=blue",
        };
        s.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\", style=\"{}\"];\n",
            i.total_object_name(x, a),
            i.total_object_name(y, b),
            generator_name(i, &gen),
            style
        ));
    }
    s.push_str("}\n");
    s
}
