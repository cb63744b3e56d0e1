use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use stokes_core::base::make_circle_base;
use stokes_core::exact::Matrix;
use stokes_core::fibration::{pullback_fibration, BaseFunctor, StokesFibration};
use stokes_core::geometry::{build_circle_space, ExponentialData, IrregularValue};
use stokes_core::poset::FinPoset;
use stokes_core::rep::StokesFunctor;
use stokes_core::total::Generator;
use tempfile::TempDir;

fn eg1_values() -> ExponentialData {
    ExponentialData::new(vec![IrregularValue::zero("0"), IrregularValue::monomial("z^-1", 1, 1, 1, 0)]).unwrap()
}

/// Rank one per value; `glue[p][side]` is the off-diagonal entry of the
/// lift into the top of the adjacent arc.
fn eg1_functor(glue: [[i64; 2]; 2]) -> StokesFunctor {
    let fib = build_circle_space(&eg1_values()).unwrap().fibration;
    let top = |arc: usize| (0..2).find(|&a| fib.fiber(arc).lt(1 - a, a)).unwrap();
    let dims: Vec<Vec<usize>> = (0..4)
        .map(|x| if x < 2 { vec![1, 1] } else { (0..2).map(|a| if a == top(x) { 2 } else { 1 }).collect() })
        .collect();
    let arrows = fib.arrows().to_vec();
    StokesFunctor::from_generators(fib.clone(), dims, |g| match *g {
        Generator::Cover { .. } => Matrix::from_i64(&[&[1], &[0]]),
        Generator::Lift { arrow, a } if a == top(arrows[arrow].target) => {
            Matrix::from_i64(&[&[glue[arrow / 2][arrow % 2]], &[1]])
        }
        Generator::Lift { .. } => Matrix::from_i64(&[&[1]]),
    })
    .unwrap()
}

fn trivial_local_system(n: usize) -> StokesFunctor {
    let fib = StokesFibration::constant(make_circle_base(n).unwrap(), FinPoset::singleton("*"));
    StokesFunctor::from_generators(fib, vec![vec![1]; 2 * n], |_| Matrix::identity(1)).unwrap()
}

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write<T: serde::Serialize + ?Sized>(&self, name: &str, v: &T) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
        p
    }

    fn write_raw(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn stokes(args: &[&str], inputs: &[&Path]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stokes"));
    c.args(args);
    for p in inputs {
        c.arg("--input").arg(p);
    }
    c.output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn directions_of_a_simple_pole() {
    let s = Sandbox::new();
    let e = s.write("e.json", &eg1_values());
    let out = stokes(&["directions"], &[&e]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let dirs = v["pairs"][0]["directions"].as_array().unwrap();
    assert_eq!(dirs.len(), 2);
    let approx: Vec<f64> = dirs.iter().map(|d| d["approx"].as_f64().unwrap()).collect();
    assert!((approx[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((approx[1] - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert_eq!(dirs[0]["m"], 1);
    assert_eq!(dirs[0]["k"], 0);
    assert_eq!(dirs[1]["k"], 1);
}

#[test]
fn ramified_data_is_an_input_error() {
    let s = Sandbox::new();
    let e = ExponentialData::new(vec![IrregularValue::zero("0"), IrregularValue::monomial("z^-1/2", 1, 2, 1, 0)]).unwrap();
    let p = s.write("e.json", &e);
    assert_eq!(stokes(&["build-circle"], &[&p]).status.code(), Some(2));
    let out = stokes(&["kummer", "--d", "2"], &[&p]);
    assert_eq!(out.status.code(), Some(0));
    let q = s.write_raw("k.json", &String::from_utf8(out.stdout).unwrap());
    let out = stokes(&["build-circle"], &[&q]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["points"].as_array().unwrap().len(), 2);
}

#[test]
fn identity_stokes_matrices_are_stokes() {
    let s = Sandbox::new();
    let f = s.write("f.json", &eg1_functor([[0, 0], [0, 0]]));
    let out = stokes(&["is-stokes"], &[&f]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["is_stokes"], true);
    let out = stokes(&["split"], &[&f]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["split"], true);
}

#[test]
fn nontrivial_gluing_is_not_split() {
    let s = Sandbox::new();
    let f = s.write("f.json", &eg1_functor([[1, 0], [0, 0]]));
    assert_eq!(stokes(&["is-stokes"], &[&f]).status.code(), Some(0));
    let out = stokes(&["split", "--strategy", "linear"], &[&f]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["split"], false);
    assert!(v["witness"]["reason"].is_string());
    // the circle has no initial object
    assert_eq!(stokes(&["split", "--strategy", "initial-object"], &[&f]).status.code(), Some(2));
    assert_eq!(stokes(&["split", "--strategy", "nope"], &[&f]).status.code(), Some(2));
}

#[test]
fn tangent_dims_of_trivial_rank_one_system() {
    let s = Sandbox::new();
    let f = s.write("f.json", &trivial_local_system(2));
    let out = stokes(&["tangent-dims"], &[&f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["start"], -1);
    assert_eq!(v["dims"], serde_json::json!([1, 1]));
    assert_eq!(v["degrees"]["-1"], 1);
    assert_eq!(v["degrees"]["0"], 1);
    let out = stokes(&["ext"], &[&f, &f]);
    assert_eq!(json(&out)["euler_characteristic"], 0);
}

#[test]
fn outputs_are_byte_identical() {
    let s = Sandbox::new();
    let e = s.write("e.json", &eg1_values());
    let f = s.write("f.json", &eg1_functor([[0, 2], [0, 0]]));
    for (args, input) in [
        (vec!["build-circle"], &e),
        (vec!["cover"], &e),
        (vec!["split"], &f),
        (vec!["is-stokes"], &f),
        (vec!["ext"], &f),
    ] {
        let a = stokes(&args, &[input]);
        let b = stokes(&args, &[input]);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn functor_round_trips_through_validate_and_files() {
    let s = Sandbox::new();
    let f = eg1_functor([[3, 0], [0, -1]]);
    let p = s.write("f.json", &f);
    let out = stokes(&["validate"], &[&p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["kind"], "functor");
    let text = std::fs::read_to_string(&p).unwrap();
    let back: StokesFunctor = serde_json::from_str(&text).unwrap();
    assert_eq!(back, f);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

#[test]
fn malformed_and_invalid_inputs_exit_two() {
    let s = Sandbox::new();
    let bad = s.write_raw("bad.json", "{\"values\": ");
    assert_eq!(stokes(&["directions"], &[&bad]).status.code(), Some(2));
    let unknown = s.write_raw("u.json", "{\"x\": 1}");
    assert_eq!(stokes(&["validate"], &[&unknown]).status.code(), Some(2));
    // order on a0 claims a < b and b < a
    let mut v = serde_json::to_value(build_circle_space(&eg1_values()).unwrap().fibration).unwrap();
    v["fibers"]["a0"]["leq"] = serde_json::json!([[1, 1], [1, 1]]);
    let p = s.write("fib.json", &v);
    let out = stokes(&["validate"], &[&p]);
    assert_eq!(out.status.code(), Some(2));
    let missing = Path::new("/nonexistent/input.json");
    assert_eq!(stokes(&["validate"], &[missing]).status.code(), Some(2));
}

#[test]
fn elementary_arcs_and_cover() {
    let s = Sandbox::new();
    let e = s.write("e.json", &eg1_values());
    let full = stokes(&["elementary"], &[&e]);
    assert_eq!(full.status.code(), Some(1));
    assert_eq!(json(&full)["defects"][0]["locus"], serde_json::json!([1, 3]));
    assert_eq!(stokes(&["elementary", "--window", "1:3"], &[&e]).status.code(), Some(0));
    assert_eq!(stokes(&["elementary", "--from", "1,0", "--to", "-1,0"], &[&e]).status.code(), Some(0));
    let out = stokes(&["cover", "--strategy", "window"], &[&e]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["cover"].as_array().unwrap().len(), 2);
}

#[test]
fn polyhedral_elementarity() {
    let s = Sandbox::new();
    let line = serde_json::json!({
        "forms": [{ "coeffs": ["1"], "constant": "0" }],
        "strata": ["-", "0", "+"],
        "sections": ["a", "b"],
        "pairs": [{ "a": "a", "b": "b", "form": 0, "orientation": 1 }],
    });
    let p = s.write("line.json", &line);
    let out = stokes(&["elementary"], &[&p]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut half = line.clone();
    half["strata"] = serde_json::json!(["-", "0"]);
    let p = s.write("half.json", &half);
    assert_eq!(stokes(&["elementary"], &[&p]).status.code(), Some(1));
}

#[test]
fn level_square_through_files() {
    let s = Sandbox::new();
    let e = ExponentialData::new(vec![
        IrregularValue::zero("0"),
        IrregularValue::monomial("z^-1", 1, 1, 1, 0),
        IrregularValue::monomial("z^-2", 2, 1, 1, 0),
    ])
    .unwrap();
    let space = build_circle_space(&e).unwrap();
    let fib = space.fibration.clone();
    let ep = s.write("e.json", &e);
    let f = StokesFunctor::from_generators(fib.fiberwise_set(), vec![vec![1, 1, 1]; fib.base().num_objects()], |_| {
        Matrix::identity(1)
    })
    .unwrap();
    let vp = s.write("v.json", &f);
    // induce along the set inclusion gives a Stokes functor on the circle
    let incl = stokes_core::fibration::FibrationMorphism::new(
        fib.fiberwise_set(),
        fib.clone(),
        fib.fibers().iter().map(|x| (0..x.len()).collect()).collect(),
    )
    .unwrap();
    let ip = s.write("incl.json", &incl);
    let out = stokes(&["induce"], &[&vp, &ip]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let fp = s.write_raw("f.json", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(stokes(&["is-stokes"], &[&fp]).status.code(), Some(0));

    let out = stokes(&["disassemble", "--level", "1"], &[&fp, &ep]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dp = s.write_raw("d.json", &String::from_utf8(out.stdout).unwrap());
    let out = stokes(&["assemble", "--level", "1"], &[&dp, &ep]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let back: StokesFunctor = serde_json::from_slice(&out.stdout).unwrap();
    let orig: StokesFunctor = serde_json::from_str(&std::fs::read_to_string(&fp).unwrap()).unwrap();
    assert_eq!(back.dims(), orig.dims());
    assert!(stokes_core::rep::find_isomorphism(&back, &orig, 1).unwrap().is_some());

    let out = stokes(&["grade", "--level", "1"], &[&fp, &ep]);
    assert_eq!(out.status.code(), Some(0));
    let out = stokes(&["cover", "--level", "1"], &[&ep]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stokes(&["grade", "--level", "7"], &[&fp, &ep]).status.code(), Some(2));
}

#[test]
fn collapse_and_dot_export() {
    let s = Sandbox::new();
    let fib = build_circle_space(&eg1_values()).unwrap().fibration;
    let p = s.write("fib.json", &fib);
    let out = stokes(&["collapse"], &[&p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["fibration"]["base"]["n"], 2);
    let trivial = s.write("t.json", &trivial_local_system(3).fibration().clone());
    let out = stokes(&["collapse"], &[&trivial]);
    assert_eq!(json(&out)["fully_constant"], true);
    let refine = BaseFunctor::circle_refinement(2, &[1, 2]).unwrap();
    let refined = s.write("r.json", &pullback_fibration(&refine, &fib).unwrap());
    let out = stokes(&["collapse"], &[&refined]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["fibration"]["base"]["n"], 2);
    assert_eq!(v["fibration"], serde_json::to_value(&fib).unwrap());
    let out = stokes(&["export-dot"], &[&p]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("digraph"));
    let f = s.write("f.json", &eg1_functor([[0, 0], [0, 0]]));
    let out = stokes(&["validate", "--format", "dot"], &[&f]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("digraph"));
    assert_eq!(stokes(&["directions", "--format", "dot"], &[&s.write("e.json", &eg1_values())]).status.code(), Some(2));
}

#[test]
fn jobs_fan_out_keeps_input_order() {
    let s = Sandbox::new();
    let good = s.write("good.json", &eg1_functor([[0, 0], [0, 0]]));
    let glued = s.write("glued.json", &eg1_functor([[1, 0], [0, 0]]));
    let out = stokes(&["split", "--jobs", "2"], &[&good, &glued, &good]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let verdicts: Vec<bool> = v.as_array().unwrap().iter().map(|r| r["result"]["split"].as_bool().unwrap()).collect();
    assert_eq!(verdicts, [true, false, true]);
    let out_path = s.dir.path().join("out.json");
    let status = Command::new(env!("CARGO_BIN_EXE_stokes"))
        .args(["is-stokes", "--input"])
        .arg(&good)
        .arg("--output")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    assert!(std::fs::read_to_string(out_path).unwrap().contains("\"is_stokes\": true"));
}

#[test]
fn packaged_fixtures() {
    let e: ExponentialData = serde_json::from_str(&std::fs::read_to_string(fixture("eg1_values.json")).unwrap()).unwrap();
    assert_eq!(e, eg1_values());
    let f = fixture("eg1_identity_stokes.json");
    let parsed: StokesFunctor = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(parsed, eg1_functor([[0, 0], [0, 0]]));
    assert_eq!(stokes(&["is-stokes"], &[&f]).status.code(), Some(0));
    let g = fixture("eg1_glued.json");
    assert_eq!(stokes(&["split"], &[&g]).status.code(), Some(1));
    let l = fixture("local_system_rank1.json");
    let out = stokes(&["tangent-dims"], &[&l]);
    assert_eq!(json(&out)["dims"], serde_json::json!([1, 1]));
}

