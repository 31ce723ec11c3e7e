use std::path::{Path, PathBuf};
use std::process::Command;

use horncat::builtin::{pos, preord};
use horncat::quantale::DistMatrix;
use horncat::saturate::{Derivation, SaturationTrace};
use horncat::structure::{Edge, Morphism, Structure};
use horncat::theory::Theory;
use horncat_cli::{run_with_bound, CommandResult, Format, Status};
use serde_json::{json, Value};
use tempfile::TempDir;

fn le(a: &str, b: &str) -> Edge {
    Edge::new("le", [a, b])
}

fn write(dir: &TempDir, name: &str, value: &impl serde::Serialize) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> CommandResult {
    run_with_bound(std::iter::once("horncat").chain(args.iter().copied()), None)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn path3() -> Structure {
    Structure::new(["a", "b", "c"], [le("a", "b"), le("b", "c")])
}

fn chain2() -> Structure {
    Structure::new(["0", "1"], [le("0", "0"), le("1", "1"), le("0", "1")])
}

fn point() -> Structure {
    Structure::new(["p"], [le("p", "p")])
}

fn reload<T: serde::de::DeserializeOwned>(v: &Value) -> T {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn saturate_path_adds_transitivity_and_reflexivity() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", &path3());
    let r = run(&["saturate", "--theory", "Preord", "--structure", p(&s)]);
    assert_eq!(r.status, Status::Ok);
    let out: Structure = reload(&r.payload);
    let expected = Structure::new(
        ["a", "b", "c"],
        [le("a", "a"), le("b", "b"), le("c", "c"), le("a", "b"), le("b", "c"), le("a", "c")],
    );
    assert_eq!(out, expected);
}

#[test]
fn trace_lines_replay() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", &path3());
    let r = run(&["saturate", "--theory", "Preord", "--structure", p(&s), "--trace"]);
    assert_eq!(r.format, Format::JsonLines);
    let text = r.render();
    let lines: Vec<&str> = text.lines().collect();
    let last: Structure = serde_json::from_str(lines.last().unwrap()).unwrap();
    let rounds: Vec<Derivation> = lines[..lines.len() - 1]
        .iter()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rounds.len(), 4);
    let trace = SaturationTrace {
        rounds,
        final_edges: last.edges.clone(),
    };
    assert!(trace.replay(&preord(), &path3().edges));
}

#[test]
fn check_theory_reports_pos() {
    let r = run(&["check-theory", "--theory", "Pos"]);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.payload["uses_equality"], json!(true));
    assert_eq!(r.payload["variable_condition"], json!("ok"));
    let t: Theory = reload(&r.payload["theory"]);
    assert_eq!(t, pos());
}

#[test]
fn check_theory_flags_the_variable_condition() {
    let dir = TempDir::new().unwrap();
    let t = Theory::new(
        preord().signature,
        vec![horncat::Formula::new([le("x", "x2"), le("y", "y2")], le("x", "y"))],
    )
    .unwrap();
    let path = write(&dir, "t.json", &t);
    let r = run(&["check-theory", "--theory", p(&path)]);
    assert_eq!(r.status, Status::PropertyFailed);
    assert_eq!(r.payload["variable_condition"], json!("violated"));
    assert!(!r.diagnostics.is_empty());
}

#[test]
fn coproduct_of_nothing_is_empty() {
    let r = run(&["coproduct", "--theory", "Preord"]);
    assert_eq!(r.status, Status::Ok);
    let object: Structure = reload(&r.payload["object"]);
    assert!(object.carrier.is_empty() && object.edges.is_empty());
    assert_eq!(r.payload["universal"]["holds"], json!(true));
}

#[test]
fn input_errors() {
    let r = run(&["no-such-command"]);
    assert_eq!(r.status, Status::InputError);
    assert!(r.diagnostics[0].contains("Usage"));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"carrier\": [").unwrap();
    assert_eq!(run(&["free", "--theory", "Preord", "--structure", p(&bad)]).status, Status::InputError);

    let foreign = write(&dir, "f.json", &Structure::new(["a"], [le("a", "b")]));
    assert_eq!(run(&["free", "--theory", "Preord", "--structure", p(&foreign)]).status, Status::InputError);

    // Saturation needs an equality-free theory.
    let s = write(&dir, "s.json", &path3());
    assert_eq!(run(&["saturate", "--theory", "Pos", "--structure", p(&s)]).status, Status::InputError);

    assert_eq!(run(&["gen-theory", "--quantale", "trivial", "--flavor", "met"]).status, Status::InputError);
}

#[test]
fn bound_override() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "c.json", &chain2());
    let args = ["horncat", "product", "--theory", "Preord", "--structure", p(&s), "--bound", "1"];
    let r = run_with_bound(args, None);
    assert_eq!(r.payload["universal"]["bound"], json!(1));
    let r = run_with_bound(args, Some("0".into()));
    assert_eq!(r.payload["universal"]["bound"], json!(0));
    assert_eq!(run_with_bound(args, Some("many".into())).status, Status::InputError);
}

#[test]
fn limits_round_trip_through_morphism_files() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", &chain2());
    let r = run(&["product", "--theory", "Preord", "--structure", p(&c), "--structure", p(&c)]);
    assert_eq!(r.status, Status::Ok, "{:?}", r.diagnostics);
    let object: Structure = reload(&r.payload["object"]);
    assert_eq!(object.carrier.len(), 4);
    let legs: Vec<Morphism> = reload(&r.payload["legs"]);
    let f = write(&dir, "f.json", &legs[0]);
    let g = write(&dir, "g.json", &legs[1]);

    for cmd in ["equalizer", "coequalizer"] {
        let r = run(&[cmd, "--theory", "Preord", "--morphism", p(&f), "--morphism", p(&g)]);
        assert_eq!(r.status, Status::Ok, "{cmd}: {:?}", r.diagnostics);
        let _: Structure = reload(&r.payload["object"]);
        let _: Vec<Morphism> = reload(&r.payload["legs"]);
    }

    let co = run(&["coproduct", "--theory", "Preord", "--structure", p(&c), "--structure", p(&c)]);
    let ins: Vec<Morphism> = reload(&co.payload["legs"]);
    let i0 = write(&dir, "i0.json", &ins[0]);
    let i1 = write(&dir, "i1.json", &ins[1]);
    let r = run(&["pullback", "--theory", "Preord", "--morphism", p(&i0), "--morphism", p(&i1)]);
    assert_eq!(r.status, Status::Ok);
    let object: Structure = reload(&r.payload["object"]);
    assert!(object.carrier.is_empty());
}

#[test]
fn pos_coequalizer_of_a_forced_cycle_is_a_point() {
    let dir = TempDir::new().unwrap();
    let f = Morphism::new(point(), chain2(), horncat::ElementMap::new([("p", "0")])).unwrap();
    let g = Morphism::new(point(), chain2(), horncat::ElementMap::new([("p", "1")])).unwrap();
    let (fp, gp) = (write(&dir, "f.json", &f), write(&dir, "g.json", &g));
    let r = run(&["coequalizer", "--theory", "Pos", "--morphism", p(&fp), "--morphism", p(&gp)]);
    assert_eq!(r.status, Status::Ok);
    let q: Morphism = reload(&r.payload["legs"][0]);
    assert_eq!(q.cod(), &Structure::new(["0"], [le("0", "0")]));
}

#[test]
fn reflect_outputs_a_quotient_morphism() {
    let dir = TempDir::new().unwrap();
    let cycle = Structure::new(["a", "b", "c"], [le("a", "b"), le("b", "a"), le("b", "c")]);
    let s = write(&dir, "s.json", &cycle);
    let r = run(&["reflect", "--theory", "Pos", "--structure", p(&s)]);
    let q: Morphism = reload(&r.payload);
    assert_eq!(q.dom(), &cycle);
    assert_eq!(q.cod().carrier.len(), 2);
    let m = write(&dir, "m.json", q.cod());
    assert_eq!(run(&["is-model", "--theory", "Pos", "--structure", p(&m)]).status, Status::Ok);
    assert_eq!(run(&["is-model", "--theory", "Pos", "--structure", p(&s)]).status, Status::PropertyFailed);
}

#[test]
fn extensivity_and_distributivity() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", &chain2());
    let pt = write(&dir, "p.json", &point());
    let args = ["check-extensivity", "--theory", "Pos", "--structure", p(&c), "--structure", p(&pt)];
    let r = run(&args);
    assert_eq!(r.status, Status::Ok, "{:?}", r.diagnostics);
    assert_eq!(r.payload["maps_tested"], json!(17));
    assert_eq!(r.render(), run(&args).render());

    let r = run(&["check-distributivity", "--theory", "Preord", "--structure", p(&c), "--structure", p(&c), "--structure", p(&pt)]);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.payload["distributive"], json!(true));
}

#[test]
fn extensivity_witness_for_a_disconnected_axiom() {
    let dir = TempDir::new().unwrap();
    let t = Theory::new(
        preord().signature,
        vec![horncat::Formula::new([le("x", "x2"), le("y", "y2")], le("x", "y"))],
    )
    .unwrap();
    let tp = write(&dir, "t.json", &t);
    let x = write(&dir, "x.json", &Structure::new(["a"], [le("a", "a")]));
    let r = run(&["check-extensivity", "--theory", p(&tp), "--structure", p(&x), "--structure", p(&x)]);
    assert_eq!(r.status, Status::PropertyFailed);
    let w: horncat::extensivity::Witness = reload(&r.payload["witnesses"][0]);
    assert!(w.replay(&t).unwrap());
}

#[test]
fn representing_objects() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", &chain2());
    let r = run(&["hom-count", "--theory", "Preord", "--symbol", "le", "--structure", p(&c)]);
    assert_eq!(r.payload["count"], json!(3));
    let r = run(&["hom-count", "--theory", "Preord", "--structure", p(&c), "--structure", p(&c)]);
    assert_eq!(r.payload["count"], json!(3));
    let r = run(&["final-density", "--theory", "Pos", "--structure", p(&c)]);
    assert_eq!(r.status, Status::Ok);
    let legs: Vec<Morphism> = reload(&r.payload["legs"]);
    assert_eq!(legs.len(), 3);
}

#[test]
fn quantale_commands() {
    let dir = TempDir::new().unwrap();
    let r = run(&["gen-theory", "--quantale", "3-chain", "--flavor", "pmet"]);
    assert_eq!(r.status, Status::Ok);
    let t: Theory = reload(&r.payload);
    let tp = write(&dir, "t.json", &t);
    assert_eq!(run(&["check-theory", "--theory", p(&tp)]).status, Status::Ok);

    let mut m = DistMatrix::default();
    m.carrier = ["x", "y"].into_iter().map(String::from).collect();
    for (a, b, v) in [("x", "x", "0"), ("y", "y", "0"), ("x", "y", "1"), ("y", "x", "1")] {
        m.set(a, b, v);
    }
    let mp = write(&dir, "m.json", &m);
    let r = run(&["translate", "--quantale", "3-chain", "--flavor", "pmet", "--dir", "from-distance", "--matrix", p(&mp)]);
    assert_eq!(r.status, Status::Ok, "{:?}", r.diagnostics);
    let sp = write(&dir, "s.json", &r.payload);
    let back = run(&["translate", "--quantale", "3-chain", "--dir", "to-distance", "--structure", p(&sp)]);
    assert_eq!(reload::<DistMatrix>(&back.payload), m);

    assert_eq!(run(&["validate-quantale", "--quantale", "diamond"]).status, Status::Ok);
    let mut broken: Value = serde_json::to_value(horncat::quantale::two_chain()).unwrap();
    broken["tensor"]["top,top"] = json!("bot");
    let qp = write(&dir, "q.json", &broken);
    let r = run(&["validate-quantale", "--quantale", p(&qp)]);
    assert_eq!(r.status, Status::PropertyFailed);
    assert_eq!(r.payload["valid"], json!(false));
}

#[test]
fn binary_exit_codes_and_output() {
    let bin = env!("CARGO_BIN_EXE_horncat");
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", &path3());
    let out = |args: &[&str]| Command::new(bin).args(args).env_remove("HORNCAT_BOUND").output().unwrap();

    let a = out(&["saturate", "--theory", "Preord", "--structure", p(&s)]);
    let b = out(&["saturate", "--theory", "Preord", "--structure", p(&s)]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let failed = out(&["is-model", "--theory", "Preord", "--structure", p(&s)]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(!failed.stderr.is_empty());

    let unknown = out(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(unknown.stdout.is_empty());

    let target = dir.path().join("out.json");
    let written = out(&["free", "--theory", "Preord", "--structure", p(&s), "--out", p(&target)]);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), a.stdout);

    let c = write(&dir, "c.json", &chain2());
    let env = Command::new(bin)
        .args(["product", "--theory", "Preord", "--structure", p(&c), "--bound", "2"])
        .env("HORNCAT_BOUND", "1")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["universal"]["bound"], json!(1));
}
