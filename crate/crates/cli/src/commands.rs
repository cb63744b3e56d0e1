use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use stokes_core::base::BaseCategory;
use stokes_core::exact::Matrix;
use stokes_core::fibration::{collapse_refinement, graded_fibration, FibrationMorphism, StokesFibration};
use stokes_core::geometry::{
    build_circle_space, check_polyhedral_elementarity, cover_strategies, direction_json, elementarity_defects,
    kummer_pullback, leading_data, pole_level_structure, stokes_directions, window_between, CircleSpace,
    CoverOutcome, Window,
};
use stokes_core::rep::{
    functor_dot, grade, hom_complex, induce, level_assemble, level_disassemble, split_strategies, stokes_report,
    tangent_dims, SplitOutcome, StokesFunctor,
};
use stokes_core::total::total_dot;

use crate::args::{Command, Format};
use crate::input::{self, Kind};

pub enum Payload {
    Json(Value),
    Dot(String),
}

pub struct Outcome {
    pub payload: Payload,
    /// 0 on success, 1 on a negative verdict, 2 on invalid input.
    pub code: u8,
    pub summary: String,
}

impl Outcome {
    fn ok(value: Value, summary: impl Into<String>) -> Self {
        Outcome {
            payload: Payload::Json(value),
            code: 0,
            summary: summary.into(),
        }
    }

    fn verdict(value: Value, holds: bool, summary: impl Into<String>) -> Self {
        Outcome {
            payload: Payload::Json(value),
            code: if holds { 0 } else { 1 },
            summary: summary.into(),
        }
    }
}

pub struct Ctx<'a> {
    pub inputs: &'a [Value],
    pub format: Format,
    pub strategy: Option<&'a str>,
}

impl Ctx<'_> {
    fn one(&self) -> Result<&Value> {
        match self.inputs {
            [v] => Ok(v),
            _ => bail!("expected exactly one --input, got {}", self.inputs.len()),
        }
    }

    fn two(&self) -> Result<(&Value, &Value)> {
        match self.inputs {
            [a, b] => Ok((a, b)),
            _ => bail!("expected two --input files, got {}", self.inputs.len()),
        }
    }
}

/// Commands that read one document and can fan out over several files.
pub fn is_single_input(c: &Command) -> bool {
    !matches!(
        c,
        Command::Grade { .. } | Command::Induce { .. } | Command::Disassemble { .. } | Command::Assemble { .. } | Command::Ext
    )
}

pub fn run(cmd: &Command, ctx: &Ctx) -> Result<Outcome> {
    if ctx.strategy.is_some() && !matches!(cmd, Command::Split | Command::Cover { .. }) {
        bail!("--strategy applies to split and cover only");
    }
    let out = match cmd {
        Command::Validate => validate(ctx)?,
        Command::BuildCircle => {
            let space = build_circle_space(&input::exponential(ctx.one()?)?)?;
            let summary = format!("{} points, {} values", space.num_points(), space.names().len());
            fibration_out(ctx, &space.fibration, space.to_json(), summary)
        }
        Command::Kummer { d } => {
            let e = kummer_pullback(&input::exponential(ctx.one()?)?, *d)?;
            let summary = format!("pulled back along z^{d}");
            Outcome::ok(serde_json::to_value(e)?, summary)
        }
        Command::Directions => directions(ctx)?,
        Command::IsStokes => {
            let f = input::functor(ctx.one()?)?;
            let r = stokes_report(&f);
            let summary = if r.is_stokes {
                "Stokes functor".to_string()
            } else {
                format!(
                    "not Stokes: {} unsplit fibers, {} singular specializations",
                    r.not_split.len(),
                    r.singular.len()
                )
            };
            Outcome::verdict(serde_json::to_value(&r)?, r.is_stokes, summary)
        }
        Command::Split => split(ctx)?,
        Command::Grade { level } => {
            let (f, p) = functor_and_map(ctx, *level)?;
            functor_out(ctx, &grade(&p, &f)?, "graded functor")
        }
        Command::Induce { level } => {
            let (f, p) = functor_and_map(ctx, *level)?;
            functor_out(ctx, &induce(&p, &f)?, "induced functor")
        }
        Command::Disassemble { level } => {
            let (f, p) = functor_and_map(ctx, *level)?;
            let d = level_disassemble(&p, &f)?;
            let alpha = keyed_by_objects(&p.target, &d.alpha);
            let value = json!({ "g": d.g, "h": d.h, "alpha": alpha });
            Outcome::ok(value, "level data (g, h, alpha)")
        }
        Command::Assemble { level } => assemble(ctx, *level)?,
        Command::Ext => {
            let (f, g) = match ctx.inputs {
                [a] => (input::functor(a)?, input::functor(a)?),
                [a, b] => (input::functor(a)?, input::functor(b)?),
                _ => bail!("ext takes one or two --input files"),
            };
            let c = hom_complex(&f, &g)?;
            let ext = c.cohomology();
            let summary = format!("Ext dims {ext:?}");
            let value = json!({
                "ext": ext,
                "cochain_dims": c.dims,
                "euler_characteristic": c.euler_characteristic(),
            });
            Outcome::ok(value, summary)
        }
        Command::TangentDims => {
            let t = tangent_dims(&input::functor(ctx.one()?)?)?;
            let degrees: BTreeMap<String, usize> = t
                .dims
                .iter()
                .enumerate()
                .map(|(k, &d)| ((t.start + k as i64).to_string(), d))
                .collect();
            let summary = format!("tangent dims {:?} from degree {}", t.dims, t.start);
            Outcome::ok(json!({ "start": t.start, "dims": t.dims, "degrees": degrees }), summary)
        }
        Command::Elementary { window, from, to, level } => elementary(ctx, window, from, to, *level)?,
        Command::Cover { level } => cover(ctx, *level)?,
        Command::Collapse => collapse(ctx)?,
        Command::ExportDot => {
            let v = ctx.one()?;
            let dot = match input::kind_of(v)? {
                Kind::Functor => functor_dot(&input::functor(v)?),
                Kind::Fibration => total_dot(&input::fibration(v)?),
                Kind::Base => input::base(v)?.to_dot(),
                k => bail!("cannot render {k:?} data as DOT"),
            };
            Outcome {
                payload: Payload::Dot(dot),
                code: 0,
                summary: "DOT graph".into(),
            }
        }
    };
    if ctx.format == Format::Dot && matches!(out.payload, Payload::Json(_)) {
        bail!("--format dot is available for fibration and functor outputs only");
    }
    Ok(out)
}

fn fibration_out(ctx: &Ctx, fib: &StokesFibration, value: Value, summary: String) -> Outcome {
    let payload = match ctx.format {
        Format::Dot => Payload::Dot(total_dot(fib)),
        Format::Json => Payload::Json(value),
    };
    Outcome { payload, code: 0, summary }
}

fn functor_out(ctx: &Ctx, f: &StokesFunctor, summary: &str) -> Outcome {
    let payload = match ctx.format {
        Format::Dot => Payload::Dot(functor_dot(f)),
        Format::Json => Payload::Json(serde_json::to_value(f).expect("functor json")),
    };
    Outcome {
        payload,
        code: 0,
        summary: format!("{summary}, total dimension {}", f.dimension_vector().iter().sum::<usize>()),
    }
}

fn validate(ctx: &Ctx) -> Result<Outcome> {
    let v = ctx.one()?;
    let kind = input::kind_of(v)?;
    let checked = match kind {
        Kind::Functor => input::functor(v).map(|f| f.fibration().clone()),
        Kind::Fibration => input::fibration(v).and_then(|f| {
            f.validate()?;
            Ok(f)
        }),
        k => bail!("validate takes a fibration or a functor, not {k:?} data"),
    };
    let what = if kind == Kind::Functor { "functor" } else { "fibration" };
    Ok(match checked {
        Ok(fib) => {
            let value = json!({
                "valid": true,
                "kind": what,
                "base_objects": fib.base().num_objects(),
                "total_objects": fib.total_size(),
            });
            let payload = match ctx.format {
                Format::Dot if kind == Kind::Functor => Payload::Dot(functor_dot(&input::functor(v)?)),
                Format::Dot => Payload::Dot(total_dot(&fib)),
                Format::Json => Payload::Json(value),
            };
            Outcome {
                payload,
                code: 0,
                summary: format!("valid {what}"),
            }
        }
        Err(e) => {
            let diagnostics: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            Outcome {
                payload: Payload::Json(json!({ "valid": false, "kind": what, "diagnostics": diagnostics })),
                code: 2,
                summary: format!("invalid {what}: {e:#}"),
            }
        }
    })
}

fn directions(ctx: &Ctx) -> Result<Outcome> {
    let e = input::exponential(ctx.one()?)?;
    let mut pairs = Vec::new();
    for (i, a) in e.values.iter().enumerate() {
        for b in &e.values[i + 1..] {
            let (q, _) = leading_data(a, b).ok_or_else(|| anyhow!("{} and {} coincide", a.name, b.name))?;
            let dirs = stokes_directions(a, b).context("ramified pair; apply `kummer` first")?;
            pairs.push(json!({
                "a": a.name,
                "b": b.name,
                "pole_order": q,
                "directions": dirs.iter().map(direction_json).collect::<Vec<_>>(),
            }));
        }
    }
    let summary = format!("{} pairs", pairs.len());
    Ok(Outcome::ok(json!({ "pairs": pairs }), summary))
}

fn split(ctx: &Ctx) -> Result<Outcome> {
    let f = input::functor(ctx.one()?)?;
    let registry = split_strategies();
    let strategy = registry.select(ctx.strategy)?;
    Ok(match strategy.split(&f)? {
        SplitOutcome::Split(s) => {
            let value = json!({ "split": true, "strategy": strategy.name(), "splitting": s.to_json() });
            Outcome::verdict(value, true, format!("split by {}", strategy.name()))
        }
        SplitOutcome::NotSplit(w) => {
            let summary = format!("not split: {}", w.reason);
            let value = json!({ "split": false, "strategy": strategy.name(), "witness": w });
            Outcome::verdict(value, false, summary)
        }
    })
}

fn functor_and_map(ctx: &Ctx, level: Option<usize>) -> Result<(StokesFunctor, FibrationMorphism)> {
    let (a, b) = ctx.two()?;
    let f = input::functor(a)?;
    let p = input::level_map(b, level)?;
    if f.fibration() != &p.source {
        bail!("the functor does not live on the source of the level map");
    }
    Ok((f, p))
}

fn keyed_by_objects(j: &StokesFibration, m: &[Vec<Matrix>]) -> BTreeMap<String, Matrix> {
    j.total_objects()
        .into_iter()
        .map(|(y, b)| (j.total_object_name(y, b), m[y][b].clone()))
        .collect()
}

fn assemble(ctx: &Ctx, level: Option<usize>) -> Result<Outcome> {
    let (data, map_doc) = ctx.two()?;
    if input::kind_of(data)? != Kind::LevelData {
        bail!("first input must hold level data with g, h and alpha");
    }
    let p = input::level_map(map_doc, level)?;
    let g = input::functor(&data["g"]).context("in g")?;
    let h = input::functor(&data["h"]).context("in h")?;
    if h.fibration() != &graded_fibration(&p)? {
        bail!("h does not live on the graded fibration of the level map");
    }
    let given: BTreeMap<String, Matrix> =
        serde_json::from_value(data["alpha"].clone()).context("alpha must map objects to matrices")?;
    let j = &p.target;
    let mut alpha: Vec<Vec<Matrix>> = j.fibers().iter().map(|f| Vec::with_capacity(f.len())).collect();
    for (y, b) in j.total_objects() {
        let name = j.total_object_name(y, b);
        let m = given.get(&name).ok_or_else(|| anyhow!("alpha has no matrix at {name}"))?;
        alpha[y].push(m.clone());
    }
    if given.len() != j.total_size() {
        bail!("alpha has matrices at unknown objects");
    }
    let f = level_assemble(&p, &g, &h, &alpha)?;
    Ok(functor_out(ctx, &f, "assembled functor"))
}

fn circle_with_level(v: &Value, level: Option<usize>) -> Result<CircleSpace> {
    let e = input::exponential(v)?;
    match level {
        None => Ok(build_circle_space(&e)?),
        Some(k) => {
            let ls = pole_level_structure(&e)?;
            if k > ls.r as usize {
                bail!("level {k} exceeds the maximal pole order {}", ls.r);
            }
            Ok(ls.space.with_fibration(graded_fibration(ls.projection(k))?)?)
        }
    }
}

fn window_json(space: &CircleSpace, w: &Window) -> Value {
    let n = space.num_points();
    let base = space.fibration.base();
    let strata: Vec<String> = w.objects(n).into_iter().map(|x| base.object_name(x)).collect();
    json!({ "start": w.start, "len": w.len, "strata": strata })
}

fn elementary(
    ctx: &Ctx,
    window: &Option<String>,
    from: &Option<String>,
    to: &Option<String>,
    level: Option<usize>,
) -> Result<Outcome> {
    let v = ctx.one()?;
    if input::kind_of(v)? == Kind::Polyhedral {
        if window.is_some() || from.is_some() || level.is_some() {
            bail!("arc and level options apply to exponential data only");
        }
        let space = input::polyhedral(v)?.build()?;
        let verdict = check_polyhedral_elementarity(&space);
        let summary = if verdict.elementary {
            "elementary".to_string()
        } else {
            format!("not elementary: {}", verdict.failures.join("; "))
        };
        let value = json!({ "elementary": verdict.elementary, "failures": verdict.failures, "space": space.to_json() });
        return Ok(Outcome::verdict(value, verdict.elementary, summary));
    }
    let space = circle_with_level(v, level)?;
    let n = space.num_points();
    let w = match (window, from, to) {
        (Some(s), _, _) => {
            let (start, len) = input::window_spec(s)?;
            Window::new(start, len, n)?
        }
        (None, Some(a), Some(b)) => window_between(&space, &input::angle(a)?, &input::angle(b)?)?,
        _ => Window::full(n),
    };
    let defects = elementarity_defects(&space.fibration, &w)?;
    let holds = defects.is_empty();
    let summary = if holds {
        "elementary".to_string()
    } else {
        format!("not elementary: {} defective pairs", defects.len())
    };
    let value = json!({ "elementary": holds, "window": window_json(&space, &w), "defects": defects });
    Ok(Outcome::verdict(value, holds, summary))
}

fn cover(ctx: &Ctx, level: Option<usize>) -> Result<Outcome> {
    let space = circle_with_level(ctx.one()?, level)?;
    let registry = cover_strategies();
    let strategy = registry.select(ctx.strategy)?;
    Ok(match strategy.cover(&space)? {
        CoverOutcome::Cover(ws) => {
            let windows: Vec<Value> = ws.iter().map(|w| window_json(&space, w)).collect();
            let summary = format!("{} elementary windows by {}", ws.len(), strategy.name());
            Outcome::verdict(json!({ "strategy": strategy.name(), "cover": windows }), true, summary)
        }
        CoverOutcome::Failure(f) => {
            let summary = format!("no cover by {}: {}", strategy.name(), f.reason);
            Outcome::verdict(json!({ "strategy": strategy.name(), "failure": f }), false, summary)
        }
    })
}

fn collapse(ctx: &Ctx) -> Result<Outcome> {
    let old = input::fibration(ctx.one()?)?;
    let c = collapse_refinement(&old)?;
    let new_base: &BaseCategory = c.fibration.base();
    let objects: BTreeMap<String, String> = c
        .object_map
        .iter()
        .enumerate()
        .map(|(x, &y)| (old.base().object_name(x), new_base.object_name(y)))
        .collect();
    let elements: BTreeMap<String, BTreeMap<String, String>> = c
        .element_maps
        .iter()
        .enumerate()
        .map(|(x, m)| {
            let target = c.fibration.fiber(c.object_map[x]);
            let inner = m
                .iter()
                .enumerate()
                .map(|(a, &b)| (old.fiber(x).name(a).to_string(), target.name(b).to_string()))
                .collect();
            (old.base().object_name(x), inner)
        })
        .collect();
    let summary = format!(
        "{} base objects collapsed to {}",
        old.base().num_objects(),
        new_base.num_objects()
    );
    let value = json!({
        "fibration": c.fibration,
        "object_map": objects,
        "element_maps": elements,
        "fully_constant": c.fully_constant,
    });
    Ok(fibration_out(ctx, &c.fibration, value, summary))
}
