//! Stratifications of `Q^n` by the signs of finitely many affine forms.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::base::make_poset_base;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::fibration::StokesFibration;
use crate::poset::FinPoset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineForm {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl AffineForm {
    pub fn linear(coeffs: &[i64]) -> Self {
        AffineForm {
            coeffs: coeffs.iter().map(|&c| Rational::from_integer(c)).collect(),
            constant: Rational::zero(),
        }
    }

    pub fn sign_at(&self, x: &[Rational]) -> i8 {
        let v = self.coeffs.iter().zip(x).fold(self.constant.clone(), |acc, (c, xi)| acc + c * xi);
        v.signum() as i8
    }
}

/// Distinct sign vectors realized by the given points, sorted.
pub fn sign_vectors_from_points(forms: &[AffineForm], points: &[Vec<Rational>]) -> Vec<Vec<i8>> {
    let set: BTreeSet<Vec<i8>> = points
        .iter()
        .map(|p| forms.iter().map(|f| f.sign_at(p)).collect())
        .collect();
    set.into_iter().collect()
}

pub fn sign_vector_name(s: &[i8]) -> String {
    s.iter()
        .map(|&v| match v {
            -1 => '-',
            0 => '0',
            _ => '+',
        })
        .collect()
}

/// `a < b` where the form has sign `orientation`, `b < a` where it has the
/// opposite sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairForm {
    pub a: String,
    pub b: String,
    pub form: usize,
    pub orientation: i8,
}

#[derive(Clone, Debug)]
pub struct PolyhedralSpace {
    pub forms: Vec<AffineForm>,
    pub strata: Vec<Vec<i8>>,
    pub sections: Vec<String>,
    pub pairs: Vec<PairForm>,
    pub fibration: StokesFibration,
}

/// Input file shape for polyhedral data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyhedralInput {
    pub forms: Vec<AffineForm>,
    /// Sign vectors as strings over `-0+`.
    pub strata: Vec<String>,
    pub sections: Vec<String>,
    pub pairs: Vec<PairForm>,
}

fn parse_sign_vector(s: &str) -> Result<Vec<i8>> {
    s.chars()
        .map(|c| match c {
            '-' => Ok(-1),
            '0' => Ok(0),
            '+' => Ok(1),
            _ => Err(Error::Invalid(format!("bad sign {c:?} in {s:?}"))),
        })
        .collect()
}

impl PolyhedralInput {
    pub fn build(&self) -> Result<PolyhedralSpace> {
        let strata = self
            .strata
            .iter()
            .map(|s| parse_sign_vector(s))
            .collect::<Result<Vec<_>>>()?;
        build_polyhedral_space(self.forms.clone(), strata, self.sections.clone(), self.pairs.clone())
    }
}

/// `s ≤ t` iff `t` agrees with `s` wherever `s` is nonzero.
fn specializes(s: &[i8], t: &[i8]) -> bool {
    s.iter().zip(t).all(|(&x, &y)| x == 0 || x == y)
}

pub fn build_polyhedral_space(
    forms: Vec<AffineForm>,
    strata: Vec<Vec<i8>>,
    sections: Vec<String>,
    pairs: Vec<PairForm>,
) -> Result<PolyhedralSpace> {
    if strata.is_empty() {
        return Err(Error::Invalid("no strata".into()));
    }
    if strata.iter().any(|s| s.len() != forms.len()) {
        return Err(Error::Dimension("sign vector length differs from the number of forms".into()));
    }
    let k = sections.len();
    let idx = |name: &str| {
        sections
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    };
    let mut assigned = vec![vec![None; k]; k];
    for p in &pairs {
        let (a, b) = (idx(&p.a)?, idx(&p.b)?);
        if a == b || p.form >= forms.len() || !matches!(p.orientation, -1 | 1) {
            return Err(Error::Invalid(format!("malformed pair data for {} and {}", p.a, p.b)));
        }
        if assigned[a][b].is_some() {
            return Err(Error::Invalid(format!("pair {} and {} given twice", p.a, p.b)));
        }
        assigned[a][b] = Some((p.form, p.orientation));
        assigned[b][a] = Some((p.form, -p.orientation));
    }
    for a in 0..k {
        for b in a + 1..k {
            if assigned[a][b].is_none() {
                return Err(Error::Invalid(format!("no form for {} and {}", sections[a], sections[b])));
            }
        }
    }
    let names: Vec<String> = strata.iter().map(|s| sign_vector_name(s)).collect();
    let rel: Vec<(usize, usize)> = (0..strata.len())
        .flat_map(|s| (0..strata.len()).map(move |t| (s, t)))
        .filter(|&(s, t)| s != t && specializes(&strata[s], &strata[t]))
        .collect();
    let base = make_poset_base(FinPoset::from_relations(names, &rel)?)?;
    let fibers = strata
        .iter()
        .map(|s| {
            let leq = (0..k)
                .map(|a| {
                    (0..k)
                        .map(|b| a == b || assigned[a][b].is_some_and(|(f, o)| s[f] == o))
                        .collect()
                })
                .collect();
            FinPoset::new(sections.clone(), leq)
                .map_err(|e| Error::Invalid(format!("inconsistent pair data at {}: {e}", sign_vector_name(s))))
        })
        .collect::<Result<Vec<_>>>()?;
    let id: Vec<usize> = (0..k).collect();
    let narrows = base.arrows().len();
    let fibration = StokesFibration::new(base, fibers, vec![id; narrows])?;
    fibration.validate()?;
    Ok(PolyhedralSpace {
        forms,
        strata,
        sections,
        pairs,
        fibration,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyhedralVerdict {
    pub elementary: bool,
    pub failures: Vec<String>,
}

fn components(strata: &[usize], all: &[Vec<i8>]) -> Vec<Vec<usize>> {
    let mut comp: Vec<Vec<usize>> = Vec::new();
    for &s in strata {
        let touching: Vec<usize> = (0..comp.len())
            .filter(|&c| {
                comp[c]
                    .iter()
                    .any(|&t| specializes(&all[s], &all[t]) || specializes(&all[t], &all[s]))
            })
            .collect();
        let mut merged = vec![s];
        for &c in touching.iter().rev() {
            merged.extend(comp.remove(c));
        }
        comp.push(merged);
    }
    comp
}

/// For every pair: the locus is the nonempty zero set of its form, its
/// complement has exactly two components and the order flips between them.
pub fn check_polyhedral_elementarity(s: &PolyhedralSpace) -> PolyhedralVerdict {
    let fib = &s.fibration;
    let mut failures = Vec::new();
    for p in &s.pairs {
        let a = s.sections.iter().position(|x| x == &p.a).expect("known section");
        let b = s.sections.iter().position(|x| x == &p.b).expect("known section");
        let locus: Vec<usize> = (0..s.strata.len()).filter(|&x| !fib.fiber(x).comparable(a, b)).collect();
        let zeros: Vec<usize> = (0..s.strata.len()).filter(|&x| s.strata[x][p.form] == 0).collect();
        let label = format!("{} and {}", p.a, p.b);
        if locus != zeros {
            failures.push(format!("{label}: locus differs from the zero set of the form"));
            continue;
        }
        if locus.is_empty() {
            failures.push(format!("{label}: empty Stokes locus"));
            continue;
        }
        let rest: Vec<usize> = (0..s.strata.len()).filter(|x| !locus.contains(x)).collect();
        let comps = components(&rest, &s.strata);
        if comps.len() != 2 {
            failures.push(format!("{label}: complement has {} components", comps.len()));
            continue;
        }
        let side = |c: &[usize]| -> BTreeSet<bool> { c.iter().map(|&x| fib.fiber(x).lt(a, b)).collect() };
        let (l, r) = (side(&comps[0]), side(&comps[1]));
        if l.len() != 1 || r.len() != 1 || l == r {
            failures.push(format!("{label}: no order flip between the two components"));
        }
    }
    PolyhedralVerdict {
        elementary: failures.is_empty(),
        failures,
    }
}

impl PolyhedralSpace {
    pub fn to_json(&self) -> serde_json::Value {
        let strata: Vec<String> = self.strata.iter().map(|s| sign_vector_name(s)).collect();
        serde_json::json!({
            "forms": self.forms,
            "strata": strata,
            "pairs": self.pairs,
            "fibration": self.fibration,
        })
    }
}

/// One form `x` on the line; two sections swapping across the origin.
pub fn line_example(realize_positive: bool) -> Result<PolyhedralSpace> {
    let mut strata = vec![vec![-1], vec![0]];
    if realize_positive {
        strata.push(vec![1]);
    }
    build_polyhedral_space(
        vec![AffineForm::linear(&[1])],
        strata,
        vec!["a".into(), "b".into()],
        vec![PairForm {
            a: "a".into(),
            b: "b".into(),
            form: 0,
            orientation: 1,
        }],
    )
}

/// Sections `0, x, y, x + y` on the plane, each pair separated by the
/// line where the two agree.
pub fn square_example() -> Result<PolyhedralSpace> {
    let forms = vec![
        AffineForm::linear(&[1, 0]),
        AffineForm::linear(&[0, 1]),
        AffineForm::linear(&[1, 1]),
        AffineForm::linear(&[1, -1]),
    ];
    let mut pts = vec![vec![0, 0]];
    for (x, y) in [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)] {
        pts.push(vec![x, y]);
    }
    for (x, y) in [(2, 1), (1, 2), (-1, 2), (-2, 1), (-2, -1), (-1, -2), (1, -2), (2, -1)] {
        pts.push(vec![x, y]);
    }
    let pts: Vec<Vec<Rational>> = pts
        .into_iter()
        .map(|p| p.into_iter().map(Rational::from_integer).collect())
        .collect();
    let strata = sign_vectors_from_points(&forms, &pts);
    let pair = |a: &str, b: &str, form| PairForm {
        a: a.into(),
        b: b.into(),
        form,
        orientation: 1,
    };
    // a < b where b − a > 0
    let pairs = vec![
        pair("0", "x", 0),
        pair("0", "y", 1),
        pair("0", "x+y", 2),
        PairForm {
            a: "x".into(),
            b: "y".into(),
            form: 3,
            orientation: -1,
        },
        pair("x", "x+y", 1),
        pair("y", "x+y", 0),
    ];
    build_polyhedral_space(forms, strata, vec!["0".into(), "x".into(), "y".into(), "x+y".into()], pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{is_stokes, split_global, SplitOutcome};
    use crate::sample::{random_induced, random_ranks};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn line_examples() {
        let s = line_example(true).unwrap();
        assert!(check_polyhedral_elementarity(&s).elementary);
        let t = line_example(false).unwrap();
        let v = check_polyhedral_elementarity(&t);
        assert!(!v.elementary);
        assert!(v.failures[0].contains("1 components"));
    }

    #[test]
    fn square_is_elementary_and_splits() {
        let s = square_example().unwrap();
        assert_eq!(s.strata.len(), 17);
        assert_eq!(s.fibration.base().initial_object().map(|x| s.fibration.base().object_name(x)), Some("0000".into()));
        assert!(check_polyhedral_elementarity(&s).elementary);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let ranks = random_ranks(&mut rng, 4, 2);
            let f = random_induced(&mut rng, &s.fibration, &ranks).unwrap();
            assert!(is_stokes(&f));
            match split_global(&f).unwrap() {
                SplitOutcome::Split(g) => assert!(g.verify(&f)),
                SplitOutcome::NotSplit(w) => panic!("{w:?}"),
            }
        }
    }

    #[test]
    fn inconsistent_pairs_are_rejected() {
        // a < b < c on x > 0 but c < a there
        let forms = vec![AffineForm::linear(&[1])];
        let p = |a: &str, b: &str, o| PairForm {
            a: a.into(),
            b: b.into(),
            form: 0,
            orientation: o,
        };
        let r = build_polyhedral_space(
            forms,
            vec![vec![-1], vec![0], vec![1]],
            vec!["a".into(), "b".into(), "c".into()],
            vec![p("a", "b", 1), p("b", "c", 1), p("c", "a", 1)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn two_crossing_lines_on_a_square() {
        // lines x = y and x = −y/2 crossing at the centre of [−1, 1]²
        let forms = vec![AffineForm::linear(&[1, -1]), AffineForm::linear(&[2, 1])];
        let mut oracle = BTreeSet::new();
        let mut pts = Vec::new();
        for i in -8..=8i64 {
            for j in -8..=8i64 {
                oracle.insert(vec![(i - j).signum() as i8, (2 * i + j).signum() as i8]);
                pts.push(vec![Rational::new(i, 8), Rational::new(j, 8)]);
            }
        }
        let found = sign_vectors_from_points(&forms, &pts);
        assert_eq!(found, oracle.into_iter().collect::<Vec<_>>());
        assert_eq!(found.len(), 9);
        let names: Vec<String> = found.iter().map(|s| sign_vector_name(s)).collect();
        let rel: Vec<(usize, usize)> = (0..found.len())
            .flat_map(|s| (0..found.len()).map(move |t| (s, t)))
            .filter(|&(s, t)| s != t && specializes(&found[s], &found[t]))
            .collect();
        let base = make_poset_base(FinPoset::from_relations(names, &rel).unwrap()).unwrap();
        assert_eq!(base.num_objects(), 9);
        assert_eq!(base.object_name(base.initial_object().unwrap()), "00");
    }

    #[test]
    fn sign_vectors_dedupe() {
        let forms = vec![AffineForm::linear(&[1])];
        let pts: Vec<Vec<Rational>> = [-2, -1, 0, 3].iter().map(|&x| vec![Rational::from_integer(x)]).collect();
        assert_eq!(sign_vectors_from_points(&forms, &pts), vec![vec![-1], vec![0], vec![1]]);
    }
}
