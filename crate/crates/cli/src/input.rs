use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;
use stokes_core::base::BaseCategory;
use stokes_core::exact::{ExactAngle, GaussianRational, Rational};
use stokes_core::fibration::{FibrationMorphism, StokesFibration};
use stokes_core::geometry::{pole_level_structure, ExponentialData, PolyhedralInput};
use stokes_core::rep::{validate_functor, StokesFunctor};

/// What a JSON document looks like it holds, judged by its top-level keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Functor,
    Fibration,
    Morphism,
    Base,
    Exponential,
    Polyhedral,
    LevelData,
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))
}

pub fn kind_of(v: &Value) -> Result<Kind> {
    let has = |k: &str| v.get(k).is_some();
    Ok(if has("spaces") {
        Kind::Functor
    } else if has("alpha") && has("g") && has("h") {
        Kind::LevelData
    } else if has("maps") && has("source") {
        Kind::Morphism
    } else if has("fibers") {
        Kind::Fibration
    } else if has("forms") {
        Kind::Polyhedral
    } else if has("values") {
        Kind::Exponential
    } else if has("kind") {
        Kind::Base
    } else {
        bail!("unrecognized document: expected a functor, fibration, level map, base, exponential or polyhedral data")
    })
}

fn expect(v: &Value, want: &[Kind], what: &str) -> Result<Kind> {
    let k = kind_of(v)?;
    if !want.contains(&k) {
        bail!("expected {what}, found {k:?} data");
    }
    Ok(k)
}

pub fn functor(v: &Value) -> Result<StokesFunctor> {
    expect(v, &[Kind::Functor], "a functor")?;
    let f: StokesFunctor = serde_json::from_value(v.clone()).context("invalid functor")?;
    validate_functor(&f).context("functor fails functoriality")?;
    Ok(f)
}

pub fn fibration(v: &Value) -> Result<StokesFibration> {
    match expect(v, &[Kind::Fibration, Kind::Functor], "a fibration")? {
        Kind::Functor => Ok(functor(v)?.fibration().clone()),
        _ => serde_json::from_value(v.clone()).context("invalid fibration"),
    }
}

pub fn base(v: &Value) -> Result<BaseCategory> {
    serde_json::from_value(v.clone()).context("invalid base")
}

pub fn exponential(v: &Value) -> Result<ExponentialData> {
    expect(v, &[Kind::Exponential], "exponential data")?;
    serde_json::from_value(v.clone()).context("invalid exponential data")
}

pub fn polyhedral(v: &Value) -> Result<PolyhedralInput> {
    serde_json::from_value(v.clone()).context("invalid polyhedral data")
}

/// A level map given directly, or as stage `level` of the pole-order
/// structure of exponential data.
pub fn level_map(v: &Value, level: Option<usize>) -> Result<FibrationMorphism> {
    match expect(v, &[Kind::Morphism, Kind::Exponential], "a level map or exponential data")? {
        Kind::Morphism => {
            if level.is_some() {
                bail!("--level needs exponential data, not an explicit map");
            }
            serde_json::from_value(v.clone()).context("invalid fibration morphism")
        }
        _ => {
            let k = level.ok_or_else(|| anyhow!("--level is required with exponential data"))?;
            let ls = pole_level_structure(&exponential(v)?)?;
            if k > ls.r as usize {
                bail!("level {k} exceeds the maximal pole order {}", ls.r);
            }
            Ok(ls.projection(k).clone())
        }
    }
}

pub fn gaussian(s: &str) -> Result<GaussianRational> {
    let (re, im) = s.split_once(',').ok_or_else(|| anyhow!("expected re,im but got {s:?}"))?;
    let re: Rational = re.parse()?;
    let im: Rational = im.parse()?;
    Ok(GaussianRational::new(re, im))
}

pub fn angle(s: &str) -> Result<ExactAngle> {
    Ok(ExactAngle::of_point(&gaussian(s)?)?)
}

/// `START:LEN`.
pub fn window_spec(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(':').ok_or_else(|| anyhow!("expected START:LEN but got {s:?}"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_kinds() {
        let e = serde_json::json!({ "values": {} });
        assert_eq!(kind_of(&e).unwrap(), Kind::Exponential);
        assert_eq!(kind_of(&serde_json::json!({ "kind": "circle", "n": 2 })).unwrap(), Kind::Base);
        assert!(kind_of(&serde_json::json!({ "x": 1 })).is_err());
    }

    #[test]
    fn parses_points_and_windows() {
        assert_eq!(gaussian("1/2, -3").unwrap(), GaussianRational::new(Rational::new(1, 2), Rational::from_integer(-3)));
        assert!(gaussian("1").is_err());
        assert_eq!(window_spec("3:5").unwrap(), (3, 5));
        assert!(angle("0,0").is_err());
    }
}
