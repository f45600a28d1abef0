//! Command-line surface. Each command returns a [`Record`]; the binary
//! prints it as text or as one JSON object per line.

use std::collections::BTreeMap;
use std::fmt;

use clap::{Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance::run_all;
use crate::coding::{code, fiber, rho, unbounded_fiber_witness};
use crate::dlo::{eliminate_quantifiers, enumerate_cells, DloError};
use crate::formula::{parse_formula, Formula, Language, ParseError};
use crate::interior::{interior_formula, nonelementarity_report, open_core_check, InteriorError};
use crate::rational::Rational;
use crate::rnf::{evaluate_point, sign_decompose, to_rnf, RnfError};
use crate::semantics::{eval_direct_with, SemanticsError, DEFAULT_LABEL_LIMIT};
use crate::wmso::{eval_wformula, vs_evaluate, FiniteSetQ, WValue, WmsoError, DEFAULT_ANCHOR_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub anchors: usize,
    pub seed: u64,
    pub depth: u32,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            anchors: DEFAULT_ANCHOR_LIMIT,
            seed: 2024,
            depth: 10,
            format: Format::Text,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eliminate quantifiers from a pure-order formula
    Qe { formula: String },
    /// List the order cells of variables over parameters
    Cells {
        #[arg(required = true)]
        vars: Vec<String>,
        /// Comma-separated rationals
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        params: String,
    },
    /// The finite set coded by a rational
    Rho {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// The fiber `{y : A(x, y)}`
    Fiber {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// A point whose fiber has more than N elements
    Witness { n: u32 },
    /// Relative normal forms on each sign stratum
    Rnf { formula: String },
    /// Truth of a formula at a point, e.g. `--at x=-1/2,y=1` or `--at T={1,2}`
    Eval {
        formula: String,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        at: String,
        /// Read the formula in the weak monadic language over positive rationals
        #[arg(long)]
        wmso: bool,
    },
    /// The interior of a definable set as a pure-order formula
    Interior { formula: String },
    /// Openness report for a unary definable set
    Omin {
        formula: String,
        /// Random sample points beyond the anchors
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// A closed discrete set of N+1 points and the components of its complement
    Nonelem { n: u32 },
    /// Run the acceptance suite
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Qe { .. } => "qe",
            Command::Cells { .. } => "cells",
            Command::Rho { .. } => "rho",
            Command::Fiber { .. } => "fiber",
            Command::Witness { .. } => "witness",
            Command::Rnf { .. } => "rnf",
            Command::Eval { .. } => "eval",
            Command::Interior { .. } => "interior",
            Command::Omin { .. } => "omin",
            Command::Nonelem { .. } => "nonelem",
            Command::Selftest => "selftest",
        }
    }

    fn input(&self) -> Value {
        match self {
            Command::Qe { formula } | Command::Rnf { formula } | Command::Interior { formula } => json!(formula),
            Command::Omin { formula, samples } => json!({ "formula": formula, "samples": samples }),
            Command::Cells { vars, params } => json!({ "vars": vars, "params": params }),
            Command::Rho { x } | Command::Fiber { x } => json!(x),
            Command::Witness { n } | Command::Nonelem { n } => json!(n),
            Command::Eval { formula, at, wmso } => json!({ "formula": formula, "at": at, "wmso": wmso }),
            Command::Selftest => Value::Null,
        }
    }
}

/// One output record. `text` is the human-readable rendering.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub command: &'static str,
    pub input: Value,
    pub result: Value,
    pub evidence: Value,
    #[serde(skip)]
    pub text: String,
    #[serde(skip)]
    pub status: i32,
}

impl Record {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Structured => serde_json::to_string(self).expect("records serialize"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Fragment,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self.kind {
            ErrorKind::Domain => 1,
            ErrorKind::Fragment => 2,
        }
    }

    fn domain(message: impl fmt::Display) -> CliError {
        CliError {
            kind: ErrorKind::Domain,
            message: message.to_string(),
        }
    }

    fn fragment(message: impl fmt::Display) -> CliError {
        CliError {
            kind: ErrorKind::Fragment,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn wmso_kind(e: &WmsoError) -> ErrorKind {
    match e {
        WmsoError::FragmentViolation { .. } | WmsoError::Language(_) => ErrorKind::Fragment,
        _ => ErrorKind::Domain,
    }
}

fn dlo_kind(e: &DloError) -> ErrorKind {
    match e {
        DloError::NonOrderAtom(_) | DloError::SetQuantifier(_) | DloError::NotUnary(_) => ErrorKind::Fragment,
        _ => ErrorKind::Domain,
    }
}

macro_rules! classify {
    ($t:ty, |$e:ident| $kind:expr) => {
        impl From<$t> for CliError {
            fn from($e: $t) -> CliError {
                CliError {
                    kind: $kind,
                    message: $e.to_string(),
                }
            }
        }
    };
}

classify!(ParseError, |e| if matches!(e, ParseError::Language(_)) {
    ErrorKind::Fragment
} else {
    ErrorKind::Domain
});
classify!(WmsoError, |e| wmso_kind(&e));
classify!(DloError, |e| dlo_kind(&e));
classify!(SemanticsError, |e| if matches!(e, SemanticsError::NotOrderA(_)) {
    ErrorKind::Fragment
} else {
    ErrorKind::Domain
});
classify!(RnfError, |e| match &e {
    RnfError::Wmso(w) => wmso_kind(w),
    _ => ErrorKind::Domain,
});
classify!(InteriorError, |e| match &e {
    InteriorError::Wmso(w) | InteriorError::Rnf(RnfError::Wmso(w)) => wmso_kind(w),
    InteriorError::Dlo(d) => dlo_kind(d),
    InteriorError::Semantics(SemanticsError::NotOrderA(_)) | InteriorError::NotUnary(_) => ErrorKind::Fragment,
    _ => ErrorKind::Domain,
});

fn rational(s: &str) -> Result<Rational, CliError> {
    s.trim().parse().map_err(CliError::domain)
}

fn rationals(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(rational).collect()
}

fn order_formula(s: &str) -> Result<Formula, CliError> {
    Ok(parse_formula(s, Language::OrderA)?)
}

/// `x=1/2,T={1,2}`; braces hold set values.
fn assignments(s: &str) -> Result<BTreeMap<String, WValue>, CliError> {
    let mut out = BTreeMap::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let (name, tail) = rest
            .split_once('=')
            .ok_or_else(|| CliError::domain(format!("expected name=value in `{rest}`")))?;
        let tail = tail.trim_start();
        let (value, after) = if let Some(body) = tail.strip_prefix('{') {
            let (inner, after) = body.split_once('}').ok_or_else(|| CliError::domain("unclosed `{`"))?;
            let set = FiniteSetQ::new(rationals(inner)?).map_err(CliError::domain)?;
            (WValue::Set(set), after)
        } else {
            let (v, after) = tail.split_once(',').unwrap_or((tail, ""));
            (WValue::Element(rational(v)?), after)
        };
        out.insert(name.trim().to_string(), value);
        rest = after.trim_start().trim_start_matches(',').trim_start();
    }
    Ok(out)
}

fn record(cmd: &Command, result: Value, evidence: Value, text: String) -> Record {
    Record {
        command: cmd.name(),
        input: cmd.input(),
        result,
        evidence,
        text,
        status: 0,
    }
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Record, CliError> {
    match cmd {
        Command::Qe { formula } => {
            let f = order_formula(formula)?;
            let g = eliminate_quantifiers(&f)?;
            let text = g.to_string();
            Ok(record(
                cmd,
                json!(text),
                json!({ "quantifiers_removed": f.quantifier_count() }),
                text,
            ))
        }
        Command::Cells { vars, params } => {
            let params = rationals(params)?;
            let cells = enumerate_cells(vars, &params);
            let listed: Vec<Value> = cells
                .iter()
                .map(|c| json!({ "formula": c.formula().to_string(), "representative": c.representative() }))
                .collect();
            let mut text = format!("{} cells", cells.len());
            for c in &cells {
                let rep: Vec<String> = c.representative().iter().map(ToString::to_string).collect();
                text.push_str(&format!("\n{}  at ({})", c.formula(), rep.join(", ")));
            }
            Ok(record(cmd, json!(cells.len()), json!(listed), text))
        }
        Command::Rho { x } | Command::Fiber { x } => {
            let x = rational(x)?;
            let set = match cmd {
                Command::Rho { .. } => rho(&x).map_err(CliError::domain)?,
                _ => fiber(&x),
            };
            let index = code(&x).ok().map(|n| n.to_string());
            let text = set.to_string();
            Ok(record(
                cmd,
                json!(set),
                json!({ "size": set.len(), "index": index }),
                text,
            ))
        }
        Command::Witness { n } => {
            let w = unbounded_fiber_witness(*n);
            let fib = fiber(&w);
            let text = format!("{w} fiber_size={}", fib.len());
            Ok(record(
                cmd,
                json!(w),
                json!({ "fiber_size": fib.len(), "fiber": fib }),
                text,
            ))
        }
        Command::Rnf { formula } => {
            let f = order_formula(formula)?;
            let mut forms = Vec::new();
            let mut text = Vec::new();
            for (stratum, _) in sign_decompose(&f)? {
                let r = to_rnf(&f, &stratum)?;
                text.push(format!("[{stratum}]"));
                for d in &r.disjuncts {
                    text.push(format!("  {}  with  {}", d.chi, d.theta));
                }
                forms.push(r);
            }
            let codes: Vec<Value> = f
                .element_constants()
                .into_iter()
                .filter(Rational::is_negative)
                .map(|c| json!({ "constant": c, "code": fiber(&c) }))
                .collect();
            Ok(record(cmd, json!(forms), json!({ "codes": codes }), text.join("\n")))
        }
        Command::Eval { formula, at, wmso } => {
            let env = assignments(at)?;
            if *wmso {
                let f = parse_formula(formula, Language::Wmso)?;
                let value = eval_wformula(&f, &env)?;
                let oracle = vs_evaluate(&f, &env, cfg.anchors)?;
                if value != oracle {
                    return Err(CliError::domain(format!(
                        "eliminator gives {value}, the oracle {oracle}"
                    )));
                }
                return Ok(record(
                    cmd,
                    json!(value),
                    json!({ "oracle": oracle }),
                    value.to_string(),
                ));
            }
            let f = order_formula(formula)?;
            let mut point = BTreeMap::new();
            for (k, v) in env {
                match v {
                    WValue::Element(x) => point.insert(k, x),
                    WValue::Set(_) => {
                        return Err(CliError::fragment(format!("set value for `{k}` in an order formula")))
                    }
                };
            }
            let direct = eval_direct_with(&f, &point, DEFAULT_LABEL_LIMIT)?;
            let normal = evaluate_point(&f, &point)?;
            if direct != normal {
                return Err(CliError::domain(format!(
                    "direct evaluation gives {direct}, the normal form {normal}"
                )));
            }
            Ok(record(
                cmd,
                json!(direct),
                json!({ "normal_form": normal }),
                direct.to_string(),
            ))
        }
        Command::Interior { formula } => {
            let f = order_formula(formula)?;
            let g = interior_formula(&f)?;
            let text = g.to_string();
            Ok(record(
                cmd,
                json!(text),
                json!({ "vars": f.free_variable_names() }),
                text,
            ))
        }
        Command::Omin { formula, samples } => {
            let f = order_formula(formula)?;
            let rep = open_core_check(&f, *samples, cfg.seed, cfg.depth)?;
            let interior = if rep.interior.is_empty() {
                "empty".to_string()
            } else {
                rep.interior.to_string()
            };
            let mut text = if rep.is_open {
                format!("open, {} = {interior}", rep.variable)
            } else {
                format!("not open, interior {interior}")
            };
            match rep.codes.as_slice() {
                [] => {}
                [(_, s)] => text.push_str(&format!(", fiber {s}")),
                many => {
                    let parts: Vec<String> = many.iter().map(|(c, s)| format!("{c}:{s}")).collect();
                    text.push_str(&format!(", fibers {}", parts.join(" ")));
                }
            }
            if let Some(x) = &rep.counterexample {
                text.push_str(&format!("\ncounterexample {}={x}", rep.variable));
            }
            Ok(record(
                cmd,
                json!(rep.is_open),
                serde_json::to_value(&rep).expect("report serializes"),
                text,
            ))
        }
        Command::Nonelem { n } => {
            let rep = nonelementarity_report(*n);
            let text = format!(
                "witness {} fiber_size={} complement_components={}",
                rep.witness, rep.fiber_size, rep.complement_components
            );
            Ok(record(
                cmd,
                json!(rep.complement_components),
                serde_json::to_value(&rep).expect("report serializes"),
                text,
            ))
        }
        Command::Selftest => {
            let reports = run_all(cfg.seed);
            let passed = reports.iter().all(|r| r.passed);
            // timings stay out of the structured record so that it is reproducible
            let listed: Vec<Value> = reports
                .iter()
                .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail, "budget_seconds": r.budget_seconds }))
                .collect();
            let text = reports.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
            let mut rec = record(cmd, json!(passed), json!(listed), text);
            rec.status = if passed { 0 } else { 1 };
            Ok(rec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(cmd: Command) -> String {
        run(&cmd, &RunConfig::default()).unwrap().text
    }

    #[test]
    fn documented_outputs() {
        assert_eq!(text(Command::Rho { x: "-1/2".into() }), "{1}");
        assert_eq!(text(Command::Witness { n: 3 }), "-1/32768 fiber_size=4");
        let omin = text(Command::Omin {
            formula: "(A -1/2 y)".into(),
            samples: 50,
        });
        assert!(omin.starts_with("not open, interior empty, fiber {1}"), "{omin}");
    }

    #[test]
    fn exit_statuses() {
        let cfg = RunConfig::default();
        let qe_a = run(
            &Command::Qe {
                formula: "(exists x (A x y))".into(),
            },
            &cfg,
        )
        .unwrap_err();
        assert_eq!(qe_a.status(), 2);
        let bad = run(&Command::Rho { x: "1/0".into() }, &cfg).unwrap_err();
        assert_eq!(bad.status(), 1);
        let binary = run(
            &Command::Omin {
                formula: "(< x y)".into(),
                samples: 10,
            },
            &cfg,
        )
        .unwrap_err();
        assert_eq!(binary.status(), 2);
    }

    #[test]
    fn assignments_parse_sets() {
        let env = assignments("y=3/2, T={1/2,2},x=-1").unwrap();
        assert_eq!(env["x"], WValue::Element("-1".parse().unwrap()));
        assert_eq!(
            env["T"],
            WValue::Set(FiniteSetQ::new(rationals("1/2,2").unwrap()).unwrap())
        );
        assert!(assignments("T={1").is_err());
    }

    #[test]
    fn eval_both_languages() {
        let cfg = RunConfig::default();
        let a = run(
            &Command::Eval {
                formula: "(A x y)".into(),
                at: "x=-1/2,y=1".into(),
                wmso: false,
            },
            &cfg,
        )
        .unwrap();
        assert_eq!(a.result, json!(true));
        let w = Command::Eval {
            formula: "(exists-set S (and (in y S) (= S T)))".into(),
            at: "y=2,T={1,2}".into(),
            wmso: true,
        };
        assert_eq!(run(&w, &cfg).unwrap().result, json!(true));
    }

    #[test]
    fn structured_records_are_reproducible() {
        let cfg = RunConfig {
            format: Format::Structured,
            ..RunConfig::default()
        };
        let cmd = Command::Omin {
            formula: "(and (exists x (A x y)) (< 0 y))".into(),
            samples: 40,
        };
        let a = run(&cmd, &cfg).unwrap().render(Format::Structured);
        let b = run(&cmd, &cfg).unwrap().render(Format::Structured);
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        for key in ["command", "input", "result", "evidence"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
