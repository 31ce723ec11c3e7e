//! Batch front end for `horncat`: every subcommand loads JSON inputs, runs
//! one library operation and returns a [`CommandResult`] whose payload is
//! plain JSON.
//!
//! Structures, morphisms, theories, quantales and distance matrices are read
//! and written in the library's serde formats, so any object in a payload can
//! be fed back in through the matching flag.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use horncat::builtin;
use horncat::catops;
use horncat::extensivity::{self, Witness};
use horncat::gen::{instance_rng, random_morphism_into};
use horncat::quantale::{self, DistMatrix, Flavor, Quantale};
use horncat::saturate::{self, SaturationOptions};
use horncat::structure::{validate_structure, Morphism, Structure};
use horncat::theory::{self, check_variable_condition, Theory};
use horncat::universal;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

/// Overrides `--bound` when set.
pub const BOUND_ENV: &str = "HORNCAT_BOUND";

/// Random maps tried by `check-extensivity` besides the identity.
pub const RANDOM_MAPS: usize = 16;

/// Carrier bound for the domains of those random maps.
const RANDOM_MAP_CARRIER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    PropertyFailed,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::PropertyFailed => 1,
            Status::InputError => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::PropertyFailed => "property-failed",
            Status::InputError => "input-error",
        })
    }
}

/// How the payload is written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    /// The payload is an array; one compact JSON value per line.
    JsonLines,
    /// The payload is a string, written as is.
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    pub format: Format,
    /// Where to write the payload; stdout when `None`.
    pub out: Option<PathBuf>,
}

impl CommandResult {
    fn input_error(message: impl Into<String>) -> Self {
        CommandResult {
            status: Status::InputError,
            payload: Value::Null,
            diagnostics: vec![message.into()],
            format: Format::Json,
            out: None,
        }
    }

    /// The payload as written to stdout or `--out`. Empty for input errors.
    pub fn render(&self) -> String {
        match (self.format, &self.payload) {
            (_, Value::Null) if self.status == Status::InputError => String::new(),
            (Format::Text, Value::String(s)) => s.clone(),
            (Format::JsonLines, Value::Array(items)) => items.iter().map(|v| format!("{v}\n")).collect(),
            (_, v) => format!("{v}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "horncat", version, about = "Finite models of relational Horn theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, clap::Args)]
struct Options {
    /// Theory JSON file, or one of the built-in names `Preord`, `Pos`.
    #[arg(long, global = true)]
    theory: Option<String>,

    /// Structure JSON file. Repeatable; order matters.
    #[arg(long, global = true)]
    structure: Vec<PathBuf>,

    /// Morphism JSON file. Repeatable; order matters.
    #[arg(long, global = true)]
    morphism: Vec<PathBuf>,

    /// Quantale JSON file, or one of the built-in quantale names.
    #[arg(long, global = true)]
    quantale: Option<String>,

    #[arg(long, global = true, value_parser = parse_flavor)]
    flavor: Option<Flavor>,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest carrier of the test objects used to check universal
    /// properties. The HORNCAT_BOUND environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 2)]
    bound: usize,

    /// Emit the saturation trace as JSON lines.
    #[arg(long, global = true)]
    trace: bool,

    /// Write the payload here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Direction for `translate`.
    #[arg(long, global = true, value_enum)]
    dir: Option<Direction>,

    /// Distance matrix JSON file for `translate --dir from-distance`.
    #[arg(long, global = true)]
    matrix: Option<PathBuf>,

    /// Use the representing object of this symbol as the domain of
    /// `hom-count`.
    #[arg(long, global = true)]
    symbol: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    ToDistance,
    FromDistance,
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse().map_err(|e: horncat::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Validate a theory and report equality use and the variable condition.
    CheckTheory,
    /// Check that a structure satisfies every axiom.
    IsModel,
    /// Close a structure's edges under an equality-free theory.
    Saturate,
    /// The free model on a structure (same carrier, closed edges).
    Free,
    /// The reflection of a structure into the models, as its quotient map.
    Reflect,
    /// Product of the given structures.
    Product,
    /// Pullback of two morphisms with a common codomain.
    Pullback,
    /// Equalizer of two parallel morphisms.
    Equalizer,
    /// Coproduct of the given structures (possibly none).
    Coproduct,
    /// Coequalizer of two parallel morphisms.
    Coequalizer,
    /// Edge formula, disjointness and universality of the coproduct.
    CheckExtensivity,
    /// Check that the first structure times the coproduct of the rest
    /// distributes.
    CheckDistributivity,
    /// Number of morphisms from the first structure to the second.
    HomCount,
    /// Check that the representing objects' edge maps into a structure form
    /// a final sink.
    FinalDensity,
    /// The theory of V-categories for a quantale and flavor.
    GenTheory,
    /// Convert between models of the generated theory and distance matrices.
    Translate,
    /// Check the quantale laws.
    ValidateQuantale,
}

/// Runs one command with `HORNCAT_BOUND` taken from the environment.
pub fn run<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_bound(argv, std::env::var(BOUND_ENV).ok())
}

/// Like [`run`], with the value of `HORNCAT_BOUND` passed explicitly.
pub fn run_with_bound<I, S>(argv: I, bound_override: Option<String>) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult {
                    status: Status::Ok,
                    payload: Value::String(text),
                    diagnostics: Vec::new(),
                    format: Format::Text,
                    out: None,
                },
                _ => CommandResult::input_error(text.trim_end()),
            };
        }
    };
    let mut opts = cli.opts;
    if let Some(raw) = bound_override {
        match raw.trim().parse() {
            Ok(b) => opts.bound = b,
            Err(_) => return CommandResult::input_error(format!("{BOUND_ENV}={raw:?} is not a carrier bound")),
        }
    }
    let out = opts.out.clone();
    let mut result = match dispatch(cli.command, &opts) {
        Ok(report) => CommandResult {
            status: if report.holds { Status::Ok } else { Status::PropertyFailed },
            payload: report.payload,
            diagnostics: report.diagnostics,
            format: report.format,
            out: None,
        },
        Err(InputError(message)) => CommandResult::input_error(message),
    };
    result.out = out;
    result
}

struct InputError(String);

impl From<horncat::Error> for InputError {
    fn from(e: horncat::Error) -> Self {
        InputError(e.to_string())
    }
}

type Outcome<T> = Result<T, InputError>;

struct Report {
    payload: Value,
    holds: bool,
    diagnostics: Vec<String>,
    format: Format,
}

impl Report {
    fn value(payload: Value) -> Self {
        Report {
            payload,
            holds: true,
            diagnostics: Vec::new(),
            format: Format::Json,
        }
    }

    fn check(payload: Value, holds: bool) -> Self {
        Report {
            holds,
            ..Report::value(payload)
        }
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Outcome<T> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("invalid {what} {}: {e}", path.display())))
}

fn theory(opts: &Options) -> Outcome<Theory> {
    let name = opts
        .theory
        .as_deref()
        .ok_or_else(|| InputError("--theory is required".into()))?;
    for (builtin_name, t) in [("Preord", builtin::preord()), ("Pos", builtin::pos())] {
        if name.eq_ignore_ascii_case(builtin_name) {
            return Ok(t);
        }
    }
    read_json(Path::new(name), "theory")
}

fn quantale(opts: &Options) -> Outcome<Quantale> {
    let name = opts
        .quantale
        .as_deref()
        .ok_or_else(|| InputError("--quantale is required".into()))?;
    match quantale::builtin_quantale(name) {
        Some(q) => Ok(q),
        None => read_json(Path::new(name), "quantale"),
    }
}

fn flavor(opts: &Options) -> Outcome<Flavor> {
    opts.flavor.ok_or_else(|| InputError("--flavor is required".into()))
}

/// All `--structure` inputs, validated against the theory's signature.
fn structures(opts: &Options, t: &Theory) -> Outcome<Vec<Structure>> {
    opts.structure
        .iter()
        .map(|p| {
            let x: Structure = read_json(p, "structure")?;
            validate_structure(&t.signature, &x)
                .map_err(|e| InputError(format!("structure {}: {e}", p.display())))?;
            Ok(x)
        })
        .collect()
}

fn exactly<T>(items: Vec<T>, n: usize, flag: &str) -> Outcome<Vec<T>> {
    if items.len() == n {
        Ok(items)
    } else {
        Err(InputError(format!("expected {n} --{flag} inputs, got {}", items.len())))
    }
}

fn one_structure(opts: &Options, t: &Theory) -> Outcome<Structure> {
    Ok(exactly(structures(opts, t)?, 1, "structure")?.remove(0))
}

/// Two `--morphism` inputs between models of the theory.
fn two_morphisms(opts: &Options, t: &Theory) -> Outcome<(Morphism, Morphism)> {
    let mut ms = Vec::new();
    for p in &opts.morphism {
        let m: Morphism = read_json(p, "morphism")?;
        for x in [m.dom(), m.cod()] {
            validate_structure(&t.signature, x).map_err(|e| InputError(format!("morphism {}: {e}", p.display())))?;
            if !theory::is_model(t, x) {
                return Err(InputError(format!(
                    "morphism {}: an end of the morphism is not a model",
                    p.display()
                )));
            }
        }
        if !m.preserves_edges() {
            return Err(InputError(format!("morphism {}: map does not preserve edges", p.display())));
        }
        ms.push(m);
    }
    let mut ms = exactly(ms, 2, "morphism")?;
    let g = ms.pop().expect("two");
    let f = ms.pop().expect("two");
    Ok((f, g))
}

/// Runs a bounded universal-property check. The JSON records the bound and
/// the verdict; `None` in the verdict means the test objects were too many
/// to enumerate.
fn verify<F>(t: &Theory, bound: usize, check: F) -> Outcome<(Value, bool, Vec<String>)>
where
    F: FnOnce(&[Structure]) -> horncat::Result<bool>,
{
    let tests = match universal::test_models(t, bound) {
        Ok(tests) => tests,
        Err(horncat::Error::TooLarge(why)) => {
            let msg = format!("universal property not checked: {why}");
            return Ok((json!({"bound": bound, "holds": null}), true, vec![msg]));
        }
        Err(e) => return Err(e.into()),
    };
    let holds = check(&tests)?;
    let mut diagnostics = Vec::new();
    if !holds {
        diagnostics.push(format!("universal property fails against models with at most {bound} elements"));
    }
    Ok((
        json!({"bound": bound, "test_objects": tests.len(), "holds": holds}),
        holds,
        diagnostics,
    ))
}

fn construction(payload: Value, verified: (Value, bool, Vec<String>)) -> Report {
    let (universal, holds, diagnostics) = verified;
    let mut payload = payload;
    payload["universal"] = universal;
    Report {
        diagnostics,
        ..Report::check(payload, holds)
    }
}

fn dispatch(command: Command, opts: &Options) -> Outcome<Report> {
    match command {
        Command::CheckTheory => check_theory(opts),
        Command::IsModel => {
            let t = theory(opts)?;
            let x = one_structure(opts, &t)?;
            let failing = theory::failing_axioms(&t, &x);
            let holds = failing.is_empty();
            let mut r = Report::check(json!({"model": holds, "failing_axioms": failing}), holds);
            for i in &failing {
                r.diagnostics.push(format!("axiom {i} fails: {}", t.axioms[*i]));
            }
            Ok(r)
        }
        Command::Saturate => saturate_cmd(opts),
        Command::Free => {
            let t = theory(opts)?;
            let x = one_structure(opts, &t)?;
            Ok(Report::value(to_json(&saturate::free_model(&t, &x)?)))
        }
        Command::Reflect => {
            let t = theory(opts)?;
            let x = one_structure(opts, &t)?;
            Ok(Report::value(to_json(&saturate::reflect(&t, &x)?.quotient)))
        }
        Command::Product => {
            let t = theory(opts)?;
            let factors = structures(opts, &t)?;
            for x in &factors {
                require_model(&t, x)?;
            }
            let p = catops::product(&t, &factors)?;
            let v = verify(&t, opts.bound, |tests| universal::product_by_definition(&p, &factors, tests))?;
            Ok(construction(json!({"object": to_json(&p.object), "legs": to_json(&p.projections)}), v))
        }
        Command::Pullback => {
            let t = theory(opts)?;
            let (f, g) = two_morphisms(opts, &t)?;
            let p = catops::pullback(&t, &f, &g)?;
            let v = verify(&t, opts.bound, |tests| universal::pullback_by_definition(&p, &f, &g, tests))?;
            let legs = [p.proj_left.clone(), p.proj_right.clone()];
            Ok(construction(json!({"object": to_json(&p.object), "legs": to_json(&legs)}), v))
        }
        Command::Equalizer => {
            let t = theory(opts)?;
            let (f, g) = two_morphisms(opts, &t)?;
            let e = catops::equalizer(&t, &f, &g)?;
            let v = verify(&t, opts.bound, |tests| universal::equalizer_by_definition(&e, &f, &g, tests))?;
            Ok(construction(json!({"object": to_json(&e.object), "legs": [to_json(&e.inclusion)]}), v))
        }
        Command::Coproduct => {
            let t = theory(opts)?;
            let family = structures(opts, &t)?;
            for x in &family {
                require_model(&t, x)?;
            }
            let c = catops::coproduct(&t, &family)?;
            let v = verify(&t, opts.bound, |tests| universal::coproduct_by_definition(&c, &family, tests))?;
            Ok(construction(json!({"object": to_json(&c.object), "legs": to_json(&c.insertions)}), v))
        }
        Command::Coequalizer => {
            let t = theory(opts)?;
            let (f, g) = two_morphisms(opts, &t)?;
            let q = catops::coequalizer(&t, &f, &g)?;
            let v = verify(&t, opts.bound, |tests| universal::coequalizer_by_definition(&q, &f, &g, tests))?;
            Ok(construction(json!({"object": to_json(q.cod()), "legs": [to_json(&q)]}), v))
        }
        Command::CheckExtensivity => check_extensivity_cmd(opts),
        Command::CheckDistributivity => {
            let t = theory(opts)?;
            let mut all = structures(opts, &t)?;
            if all.is_empty() {
                return Err(InputError("expected X followed by the family as --structure inputs".into()));
            }
            for x in &all {
                require_model(&t, x)?;
            }
            let family = all.split_off(1);
            let x = all.remove(0);
            let holds = extensivity::check_distributivity(&t, &x, &family)?;
            let witness = (!holds).then(|| to_json(&Witness::Distributivity { x, family }));
            Ok(Report::check(json!({"distributive": holds, "witness": witness}), holds))
        }
        Command::HomCount => {
            let t = theory(opts)?;
            let mut xs = structures(opts, &t)?;
            let (a, x) = match &opts.symbol {
                Some(symbol) => {
                    let x = exactly(xs, 1, "structure")?.remove(0);
                    (extensivity::representing_object(&t, symbol)?, x)
                }
                None => {
                    xs = exactly(xs, 2, "structure")?;
                    let x = xs.pop().expect("two");
                    (xs.pop().expect("two"), x)
                }
            };
            let count = extensivity::hom_count(&t, &a, &x)?;
            Ok(Report::value(json!({"count": count})))
        }
        Command::FinalDensity => {
            let t = theory(opts)?;
            let x = one_structure(opts, &t)?;
            require_model(&t, &x)?;
            let fd = extensivity::final_density_sink(&t, &x)?;
            let holds = fd.ok();
            Ok(Report::check(
                json!({
                    "object": to_json(fd.sink.apex()),
                    "legs": to_json(&fd.sink.legs()),
                    "legs_are_morphisms": fd.legs_are_morphisms,
                    "is_final": fd.is_final,
                }),
                holds,
            ))
        }
        Command::GenTheory => {
            let q = quantale(opts)?;
            Ok(Report::value(to_json(&quantale::gen_theory(&q, flavor(opts)?)?)))
        }
        Command::Translate => translate(opts),
        Command::ValidateQuantale => {
            let q = quantale(opts)?;
            let violations = quantale::validate_quantale(&q).err().unwrap_or_default();
            let holds = violations.is_empty();
            let mut r = Report::check(json!({"valid": holds, "violations": to_json(&violations)}), holds);
            r.diagnostics = violations.iter().map(|v| v.to_string()).collect();
            Ok(r)
        }
    }
}

fn require_model(t: &Theory, x: &Structure) -> Outcome<()> {
    if theory::is_model(t, x) {
        Ok(())
    } else {
        let failing = theory::failing_axioms(t, x);
        Err(InputError(format!("structure is not a model: fails axioms {failing:?}")))
    }
}

fn check_theory(opts: &Options) -> Outcome<Report> {
    let t = theory(opts)?;
    let (condition, violations) = match check_variable_condition(&t) {
        Ok(()) => ("ok", Vec::new()),
        Err(v) => ("violated", v),
    };
    let holds = violations.is_empty();
    let payload = json!({
        "theory": to_json(&t),
        "axioms": t.axioms.len(),
        "uses_equality": t.uses_equality(),
        "variable_condition": condition,
        "violations": to_json(&violations),
    });
    let mut r = Report::check(payload, holds);
    r.diagnostics = violations.iter().map(|v| v.to_string()).collect();
    Ok(r)
}

fn saturate_cmd(opts: &Options) -> Outcome<Report> {
    let t = theory(opts)?;
    let x = one_structure(opts, &t)?;
    let options = SaturationOptions {
        trace: opts.trace,
        ..SaturationOptions::default()
    };
    let s = saturate::closure_with(&t, &x.carrier, &x.edges, options)?;
    let result = Structure {
        carrier: x.carrier,
        edges: s.edges,
    };
    if !opts.trace {
        return Ok(Report::value(to_json(&result)));
    }
    let trace = s.trace.expect("trace was requested");
    let mut lines: Vec<Value> = trace.rounds.iter().map(to_json).collect();
    lines.push(to_json(&result));
    Ok(Report {
        format: Format::JsonLines,
        ..Report::value(Value::Array(lines))
    })
}

fn check_extensivity_cmd(opts: &Options) -> Outcome<Report> {
    let t = theory(opts)?;
    let family = structures(opts, &t)?;
    for x in &family {
        require_model(&t, x)?;
    }
    let mut diagnostics = Vec::new();
    let mut maps = Vec::new();
    if extensivity::check_coproduct_edge_formula(&t, &family)? {
        let co = catops::coproduct(&t, &family)?;
        maps.push(Morphism::identity(co.object.clone()));
        for i in 0..RANDOM_MAPS {
            let mut rng = instance_rng(opts.seed, i as u64);
            maps.push(random_morphism_into(&mut rng, &t, &co.object, RANDOM_MAP_CARRIER)?);
        }
    } else {
        diagnostics.push("the union of the inserted edges is not closed; universality not tested".into());
    }
    let report = extensivity::check_extensivity(&t, &family, &maps)?;
    for w in &report.witnesses {
        if let Witness::Universality { reason, .. } = w {
            diagnostics.push(format!("universality: {reason}"));
        }
    }
    let holds = report.ok();
    let mut payload = to_json(&report);
    payload["maps_tested"] = json!(maps.len());
    Ok(Report {
        diagnostics,
        ..Report::check(payload, holds)
    })
}

fn translate(opts: &Options) -> Outcome<Report> {
    let q = quantale(opts)?;
    let dir = opts
        .dir
        .ok_or_else(|| InputError("--dir to-distance|from-distance is required".into()))?;
    let target = opts.flavor.unwrap_or(Flavor::VCat);
    let gen = quantale::gen_theory(&q, target)?;
    match dir {
        Direction::ToDistance => {
            let x = one_structure(opts, &gen)?;
            require_model(&gen, &x)?;
            Ok(Report::value(to_json(&quantale::to_distance(&q, &x)?)))
        }
        Direction::FromDistance => {
            let path = opts
                .matrix
                .as_deref()
                .ok_or_else(|| InputError("--matrix is required".into()))?;
            let m: DistMatrix = read_json(path, "distance matrix")?;
            let x = quantale::from_distance(&q, &m)?;
            require_model(&gen, &x)?;
            Ok(Report::value(to_json(&x)))
        }
    }
}
