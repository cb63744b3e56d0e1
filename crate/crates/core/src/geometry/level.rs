//! Pole-order truncations `I = I^r → I^{r−1} → … → I^0`.

use super::circle::{build_circle_space, CircleSpace};
use super::exponential::ExponentialData;
use crate::error::Result;
use crate::fibration::{FibrationMorphism, StokesFibration};
use crate::poset::FinPoset;

/// Stage `k` identifies values whose difference has pole order `≤ r − k`.
#[derive(Clone, Debug)]
pub struct LevelStructure {
    pub space: CircleSpace,
    pub r: u32,
    /// Value indices per class, per stage `0..=r`.
    pub classes: Vec<Vec<Vec<usize>>>,
    pub stages: Vec<StokesFibration>,
    /// `p_k : I → I^k`.
    pub projections: Vec<FibrationMorphism>,
}

impl LevelStructure {
    pub fn stage(&self, k: usize) -> &StokesFibration {
        &self.stages[k]
    }

    pub fn projection(&self, k: usize) -> &FibrationMorphism {
        &self.projections[k]
    }

    /// `I^k → I^{k−1}` for `1 ≤ k ≤ r`.
    pub fn step(&self, k: usize) -> Result<FibrationMorphism> {
        let class_of = |stage: usize, v: usize| {
            self.classes[stage].iter().position(|c| c.contains(&v)).expect("partition")
        };
        let map: Vec<usize> = self.classes[k].iter().map(|c| class_of(k - 1, c[0])).collect();
        let n = self.space.fibration.base().num_objects();
        FibrationMorphism::new(self.stages[k].clone(), self.stages[k - 1].clone(), vec![map; n])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let names = self.space.names();
        let stages: Vec<serde_json::Value> = (0..self.stages.len())
            .map(|k| {
                let classes: Vec<Vec<&str>> = self.classes[k]
                    .iter()
                    .map(|c| c.iter().map(|&v| names[v].as_str()).collect())
                    .collect();
                serde_json::json!({ "level": k, "classes": classes, "fibration": self.stages[k] })
            })
            .collect();
        serde_json::json!({ "r": self.r, "stages": stages })
    }
}

fn class_name(names: &[String], class: &[usize]) -> String {
    if class.len() == 1 {
        names[class[0]].clone()
    } else {
        let parts: Vec<&str> = class.iter().map(|&v| names[v].as_str()).collect();
        format!("[{}]", parts.join("+"))
    }
}

fn quotient(space: &CircleSpace, classes: &[Vec<usize>]) -> Result<(StokesFibration, Vec<usize>)> {
    let names = space.names();
    let fib = &space.fibration;
    let k = classes.len();
    let class_names: Vec<String> = classes.iter().map(|c| class_name(&names, c)).collect();
    let mut of = vec![0; names.len()];
    for (i, c) in classes.iter().enumerate() {
        for &v in c {
            of[v] = i;
        }
    }
    let fibers = fib
        .fibers()
        .iter()
        .map(|p| {
            let leq = (0..k)
                .map(|s| (0..k).map(|t| s == t || p.lt(classes[s][0], classes[t][0])).collect())
                .collect();
            FinPoset::new(class_names.clone(), leq)
        })
        .collect::<Result<Vec<_>>>()?;
    let id: Vec<usize> = (0..k).collect();
    let stage = StokesFibration::new(fib.base().clone(), fibers, vec![id; fib.arrows().len()])?;
    Ok((stage, of))
}

pub fn pole_level_structure(e: &ExponentialData) -> Result<LevelStructure> {
    level_structure_of(&build_circle_space(e)?)
}

/// Level structure on an already built circle space.
pub fn level_structure_of(space: &CircleSpace) -> Result<LevelStructure> {
    let n = space.names().len();
    let r = space.pole_orders.iter().flatten().copied().max().unwrap_or(0);
    let mut classes = Vec::new();
    let mut stages = Vec::new();
    let mut projections = Vec::new();
    for k in 0..=r {
        let threshold = r - k;
        // ord(a − c) ≤ max(ord(a − b), ord(b − c)), so this is an equivalence
        let mut cls: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            match cls.iter_mut().find(|c| space.pole_orders[c[0]][v] <= threshold) {
                Some(c) => c.push(v),
                None => cls.push(vec![v]),
            }
        }
        let (stage, of) = quotient(space, &cls)?;
        let maps = vec![of; space.fibration.base().num_objects()];
        projections.push(FibrationMorphism::new(space.fibration.clone(), stage.clone(), maps)?);
        stages.push(stage);
        classes.push(cls);
    }
    Ok(LevelStructure {
        space: space.clone(),
        r,
        classes,
        stages,
        projections,
    })
}

#[cfg(test)]
mod tests {
    use super::super::circle::tests::data;
    use super::*;
    use crate::fibration::{is_graduation_morphism, is_level_fibration_morphism};

    #[test]
    fn three_values_two_levels() {
        let l = pole_level_structure(&data(&[("0", 0, 0, 0), ("z^-1", 1, 1, 0), ("z^-2", 2, 1, 0)])).unwrap();
        assert_eq!(l.r, 2);
        assert_eq!(l.classes[1], vec![vec![0, 1], vec![2]]);
        assert_eq!(l.classes[0], vec![vec![0, 1, 2]]);
        assert_eq!(l.stages[2], l.space.fibration);
        assert_eq!(l.stage(1).fiber(0).elements(), &["[0+z^-1]".to_string(), "z^-2".to_string()]);
        for k in 0..=2 {
            assert!(is_level_fibration_morphism(l.projection(k)), "stage {k}");
            assert!(is_graduation_morphism(l.projection(k)), "stage {k}");
        }
        for k in 1..=2 {
            assert!(is_level_fibration_morphism(&l.step(k).unwrap()));
        }
        assert!(l.stage(0).fibers().iter().all(|f| f.len() == 1));
    }

    #[test]
    fn single_order_gives_short_chain() {
        let l = pole_level_structure(&data(&[("0", 0, 0, 0), ("z^-1", 1, 1, 0), ("2z^-1", 1, 2, 0)])).unwrap();
        assert_eq!(l.r, 1);
        assert_eq!(l.stages.len(), 2);
        assert!(is_level_fibration_morphism(l.projection(0)));
    }
}
