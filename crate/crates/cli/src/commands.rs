//! Subcommand implementations. Each returns an [`Outcome`]: an exit code, a
//! JSON report and its human rendering.

use std::fmt::Write as _;
use std::path::Path;

use routed::circuit::{Algorithm, BoxMap, CheckReport};
use routed::iodag::{Interpretation, Iodag, LintMode, LintReport};
use routed::linalg::{self, Entry, Mat};
use routed::par::Exec;
use routed::{CheckMode, Mode, PartitionedSpace, Relation, RoutedCircuit, RoutedCpm, RoutedMap};
use serde_json::{json, Value};

use crate::document::{load, LoadError, Payload};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub human: String,
}

impl Outcome {
    fn new(code: i32, report: Value, human: String) -> Self {
        Outcome {
            code,
            report,
            human,
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        let message = message.into();
        Outcome::new(
            EXIT_USAGE,
            json!({"error": {"kind": "UsageError", "message": message}}),
            format!("error: {message}\n"),
        )
    }

    fn load_error(e: &LoadError) -> Self {
        let mut err = json!({"kind": e.kind(), "message": e.message()});
        if let Some(loc) = e.location() {
            err["location"] = json!(loc);
        }
        Outcome::new(EXIT_USAGE, json!({ "error": err }), format!("error: {e}\n"))
    }

    fn library_error(e: &routed::Error) -> Self {
        let (loc, message) = e.location();
        let mut err = json!({"kind": e.kind(), "message": message});
        if let Some(loc) = &loc {
            err["location"] = json!(loc);
        }
        Outcome::new(
            EXIT_FAILED,
            json!({ "error": err }),
            format!("error: {}: {e}\n", e.kind()),
        )
    }
}

/// The `--mode` argument, shared by circuits and IODAGs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Iso,
    Uni,
    Channel,
}

impl std::str::FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "iso" | "isometry" => Ok(ModeArg::Iso),
            "uni" | "unitary" => Ok(ModeArg::Uni),
            "channel" => Ok(ModeArg::Channel),
            _ => Err(format!("unknown mode `{s}` (expected iso, uni or channel)")),
        }
    }
}

fn check_mode(c: &RoutedCircuit, mode: Option<ModeArg>) -> CheckMode {
    match mode {
        Some(ModeArg::Iso) => CheckMode::Isometry,
        Some(ModeArg::Uni) => CheckMode::Unitary,
        Some(ModeArg::Channel) => CheckMode::Channel,
        None if c.mode() == Mode::Pure => CheckMode::Isometry,
        None => CheckMode::Channel,
    }
}

fn lint_mode(mode: Option<ModeArg>) -> Result<LintMode, Outcome> {
    match mode {
        None | Some(ModeArg::Iso) => Ok(LintMode::Iso),
        Some(ModeArg::Uni) => Ok(LintMode::Uni),
        Some(ModeArg::Channel) => Err(Outcome::usage("IODAGs are checked in iso or uni mode")),
    }
}

fn mat_json(m: &Mat) -> Value {
    json!(linalg::to_rows(m)
        .into_iter()
        .map(|r| r.into_iter().map(Entry).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn relation_json(r: &Relation) -> Value {
    json!(r
        .to_matrix()
        .iter()
        .map(|row| row.iter().map(|&b| u8::from(b)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn space_json(s: &PartitionedSpace) -> Value {
    json!({
        "dim": s.total_dim(),
        "sectors": (0..s.num_sectors()).map(|i| json!({"label": s.labels().label(i), "dim": s.sector_dims()[i]})).collect::<Vec<_>>(),
    })
}

fn labels_text(labels: &[routed::Label]) -> String {
    labels
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn load_or(path: &Path, tol: f64) -> Result<Payload, Outcome> {
    load(path, tol)
        .map(|d| d.payload)
        .map_err(|e| Outcome::load_error(&e))
}

pub fn validate(path: &Path, mode: Option<ModeArg>, tol: f64) -> Outcome {
    let payload = match load_or(path, tol) {
        Ok(p) => p,
        Err(o) => return o,
    };
    match payload {
        Payload::Circuit(c) => {
            let mode = check_mode(&c, mode);
            match c.check(mode) {
                Ok(r) => circuit_check_outcome("validate", &r),
                Err(e @ routed::Error::TypeMismatch(_)) => Outcome::usage(e.to_string()),
                Err(e) => Outcome::library_error(&e),
            }
        }
        Payload::Iodag {
            graph,
            interpretation,
        } => {
            let mode = match lint_mode(mode) {
                Ok(m) => m,
                Err(o) => return o,
            };
            let lint = graph.lint(mode);
            let mut report = json!({"command": "validate", "payload": "iodag", "mode": mode, "passed": lint.passed, "lint": lint});
            let mut human = lint_text(&lint);
            if let (true, Some(interp)) = (lint.passed, &interpretation) {
                let check = interpretation_check(&graph, interp, mode, tol);
                let ok = check["passed"] == json!(true);
                let _ = writeln!(
                    human,
                    "interpretation: {}",
                    if ok {
                        "pass".to_string()
                    } else {
                        format!(
                            "fail ({})",
                            check["error"]["message"].as_str().unwrap_or("")
                        )
                    }
                );
                report["interpretation"] = check;
                report["passed"] = json!(ok);
            }
            let code = if report["passed"] == json!(true) {
                EXIT_OK
            } else {
                EXIT_FAILED
            };
            Outcome::new(code, report, human)
        }
    }
}

fn interpretation_check(graph: &Iodag, interp: &Interpretation, mode: LintMode, tol: f64) -> Value {
    match graph.interpret(interp, mode, tol) {
        Ok(f) => json!({
            "passed": true,
            "practical_isometry": f.is_practical_isometry(tol),
            "practical_unitary": f.is_practical_unitary(tol),
        }),
        Err(e) => {
            let (loc, message) = e.location();
            json!({"passed": false, "error": {"kind": e.kind(), "location": loc, "message": message}})
        }
    }
}

fn circuit_check_outcome(command: &str, r: &CheckReport) -> Outcome {
    let mut human = format!(
        "{} check: {}\n",
        r.mode,
        if r.passed { "pass" } else { "fail" }
    );
    for i in &r.interfaces {
        let _ = write!(
            human,
            "  layer {} [{}] after {{{}}}: ",
            i.layer,
            i.boxes.join(", "),
            i.wires.join(", ")
        );
        if i.passed {
            human.push_str("ok\n");
        } else {
            let _ = writeln!(
                human,
                "labels {} escape {}",
                labels_text(&i.escaping),
                i.target.as_deref().unwrap_or("?")
            );
        }
    }
    let code = if r.passed { EXIT_OK } else { EXIT_FAILED };
    let report = json!({"command": command, "payload": "circuit", "mode": r.mode, "passed": r.passed, "interfaces": r.interfaces});
    Outcome::new(code, report, human)
}

fn lint_text(lint: &LintReport) -> String {
    let mut s = format!(
        "{} lint: {}\n",
        lint.mode,
        if lint.passed { "pass" } else { "fail" }
    );
    for v in &lint.violations {
        let _ = writeln!(s, "  {}", v.message);
    }
    s
}

fn pure_report(f: &RoutedMap, tol: f64) -> (Value, String) {
    let iso = f.is_practical_isometry(tol);
    let uni = f.is_practical_unitary(tol);
    let defect = f.isometry_defect();
    let report = json!({
        "kind": "pure",
        "domain": space_json(f.domain()),
        "codomain": space_json(f.codomain()),
        "route": relation_json(f.route()),
        "matrix": mat_json(f.matrix()),
        "certification": {"practical_isometry": iso, "practical_unitary": uni, "isometry_defect": defect},
    });
    let human = format!(
        "pure map {} -> {} ({} of {} route entries set)\npractical isometry: {iso}\npractical unitary: {uni}\nisometry defect: {defect:.3e}\n",
        f.domain().total_dim(),
        f.codomain().total_dim(),
        f.route().count(),
        f.domain().num_sectors() * f.codomain().num_sectors(),
    );
    (report, human)
}

fn cpm_report(c: &RoutedCpm, tol: f64) -> (Value, String) {
    let tp = c.is_practically_trace_preserving(tol);
    let defect = c.trace_defect();
    let diag = c.route().diagonal();
    let decoherent = c.route().has_full_decoherence();
    let report = json!({
        "kind": "cpm",
        "domain": space_json(c.domain()),
        "codomain": space_json(c.codomain()),
        "route_diagonal": relation_json(&diag),
        "full_decoherence": decoherent,
        "kraus_count": c.kraus().len(),
        "certification": {"practically_trace_preserving": tp, "trace_defect": defect},
    });
    let human = format!(
        "CP map {} -> {} with {} Kraus operators\nfully decoherent route: {decoherent}\npractically trace preserving: {tp}\ntrace defect: {defect:.3e}\n",
        c.domain().total_dim(),
        c.codomain().total_dim(),
        c.kraus().len(),
    );
    (report, human)
}

pub fn eval(path: &Path, mode: Option<ModeArg>, tol: f64) -> Outcome {
    let payload = match load_or(path, tol) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let (mut report, human) = match payload {
        Payload::Circuit(c) => match c.evaluate() {
            Ok(BoxMap::Pure(f)) => pure_report(&f, tol),
            Ok(BoxMap::Cpm(k)) => cpm_report(&k, tol),
            Err(e) => return Outcome::library_error(&e),
        },
        Payload::Iodag {
            graph,
            interpretation,
        } => {
            let Some(interp) = interpretation else {
                return Outcome::usage("this IODAG has no interpretation to evaluate");
            };
            let mode = match mode {
                None if graph.lint(LintMode::Uni).passed => LintMode::Uni,
                m => match lint_mode(m) {
                    Ok(m) => m,
                    Err(o) => return o,
                },
            };
            match graph.interpret(&interp, mode, tol) {
                Ok(f) => {
                    let (mut r, h) = pure_report(&f, tol);
                    r["mode"] = json!(mode);
                    (r, format!("interpreted in {mode} mode\n{h}"))
                }
                Err(e) => return Outcome::library_error(&e),
            }
        }
    };
    report["command"] = json!("eval");
    Outcome::new(EXIT_OK, report, human)
}

pub fn accessible(
    path: &Path,
    slice: &[String],
    algorithm: Option<Algorithm>,
    tol: f64,
) -> Outcome {
    let payload = match load_or(path, tol) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let Payload::Circuit(c) = payload else {
        return Outcome::usage("accessible spaces are computed for routed circuits");
    };
    let wires: Vec<&str> = slice.iter().map(String::as_str).collect();
    let algorithms = match algorithm {
        Some(a) => vec![a],
        None => vec![Algorithm::Definition, Algorithm::Recipe],
    };
    let mut results = Vec::new();
    for &a in &algorithms {
        match c.accessible_space(&wires, a, Exec::default()) {
            Ok(s) => results.push(s),
            Err(e @ routed::Error::InvalidSlice(_)) => return Outcome::usage(e.to_string()),
            Err(e) => return Outcome::library_error(&e),
        }
    }
    let agree = results.windows(2).all(|w| w[0].tuples == w[1].tuples);
    let tuples = results[0].labels();
    let formal = results[0].formal_labels().len();
    let mut report = json!({
        "command": "accessible",
        "slice": slice,
        "formal_size": formal,
        "tuples": tuples,
        "algorithms": algorithms,
    });
    let mut human = format!(
        "accessible tuples on {} ({} of {formal}):\n",
        slice.join(","),
        tuples.len()
    );
    for t in &tuples {
        let _ = writeln!(human, "  {t}");
    }
    if algorithms.len() > 1 {
        report["algorithms_agree"] = json!(agree);
        if !agree {
            let _ = writeln!(
                human,
                "warning: the algorithms disagree; recipe gives {}",
                labels_text(&results[1].labels())
            );
        }
    }
    Outcome::new(if agree { EXIT_OK } else { EXIT_FAILED }, report, human)
}

pub fn explain(path: &Path, mode: Option<ModeArg>, tol: f64) -> Outcome {
    let payload = match load_or(path, tol) {
        Ok(p) => p,
        Err(o) => return o,
    };
    match payload {
        Payload::Circuit(c) => {
            let mode = check_mode(&c, mode);
            match c.check(mode) {
                Ok(r) => {
                    let mut o = circuit_check_outcome("explain", &r);
                    let failing: Vec<_> = r.interfaces.iter().filter(|i| !i.passed).collect();
                    o.report["improper"] = json!(failing);
                    o.report
                        .as_object_mut()
                        .expect("object")
                        .remove("interfaces");
                    if failing.is_empty() {
                        o.human = format!("every composition is proper for the {} check\n", r.mode);
                    }
                    o
                }
                Err(e @ routed::Error::TypeMismatch(_)) => Outcome::usage(e.to_string()),
                Err(e) => Outcome::library_error(&e),
            }
        }
        Payload::Iodag {
            graph,
            interpretation,
        } => {
            let mode = match lint_mode(mode) {
                Ok(m) => m,
                Err(o) => return o,
            };
            let lengths = interpretation
                .map(|i| i.lengths)
                .unwrap_or_else(|| graph.uniform_lengths(2));
            let lint = graph.lint(mode);
            let gates = match graph.compose_along_graph(&lengths, mode) {
                Ok((_, g)) => g,
                Err(e) => return Outcome::library_error(&e),
            };
            let improper: Vec<_> = gates.iter().filter(|g| !g.passed).collect();
            let passed = lint.passed && improper.is_empty();
            let mut human = lint_text(&lint);
            for g in &improper {
                let w = g
                    .witness
                    .as_ref()
                    .map(ToString::to_string)
                    .unwrap_or_default();
                let _ = writeln!(human, "  layer {} [{}]: {w}", g.layer, g.nodes.join(", "));
            }
            if passed {
                human = format!("every composition along the graph is proper in {mode} mode\n");
            }
            let report = json!({
                "command": "explain",
                "payload": "iodag",
                "mode": mode,
                "passed": passed,
                "lengths": lengths,
                "violations": lint.violations,
                "improper": improper,
            });
            Outcome::new(if passed { EXIT_OK } else { EXIT_FAILED }, report, human)
        }
    }
}

pub fn export_dot(path: &Path, output: Option<&Path>, tol: f64) -> Outcome {
    let payload = match load_or(path, tol) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let dot = match payload {
        Payload::Circuit(c) => c.to_dot(),
        Payload::Iodag { graph, .. } => graph.to_dot(),
    };
    match output {
        None => Outcome::new(EXIT_OK, Value::String(dot.clone()), dot),
        Some(out) => match std::fs::write(out, &dot) {
            Ok(()) => Outcome::new(
                EXIT_OK,
                json!({"command": "export-dot", "output": out.display().to_string(), "bytes": dot.len()}),
                format!("wrote {}\n", out.display()),
            ),
            Err(e) => Outcome::new(
                EXIT_USAGE,
                json!({"error": {"kind": "IoError", "message": e.to_string()}}),
                format!("error: cannot write {}: {e}\n", out.display()),
            ),
        },
    }
}
