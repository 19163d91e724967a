//! Command execution and reporting.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use noether_core::numeric::check_laws;
use noether_core::{
    euler_lagrange, noether_symmetries, verify, verify_candidate, CandidateOutcome, ConservationLaw, ELSystem, Error,
    Expr, Generator, JetSpace, LawKind, VerifyReport, VerifyStatus,
};
use serde_json::{json, Map, Value};

use crate::problem::{Flags, InputError, Problem, ProblemSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Solve for the Noether symmetries and their gauge functions.
    Symmetries,
    /// Solve, then synthesize and verify the conservation laws.
    Integrals,
    /// Check the listed generators and laws.
    Verify,
    /// Integrate the equations of motion and measure drift of first integrals.
    Numcheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Symmetries => "symmetries",
            Command::Integrals => "integrals",
            Command::Verify => "verify",
            Command::Numcheck => "numcheck",
        }
    }
}

/// Result of running one command on one file.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotASymmetry(_) | Error::NotConserved(_) => Failure::Check(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Reads, validates and runs one problem file.
pub fn run_file(command: Command, path: &str, flags: &Flags, deterministic: bool) -> Outcome {
    let result = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read file: {e}")))
        .and_then(|text| run_text(command, &text, flags));
    let mut out = match result {
        Ok(out) => out,
        Err(f) => {
            let (code, message) = match f {
                Failure::Input(m) => (EXIT_INPUT, m),
                Failure::Check(m) => (EXIT_FAIL, m),
            };
            Outcome {
                code,
                text: format!("error: {message}\n"),
                json: json!({ "error": message, "passed": false }),
            }
        }
    };
    out.text = format!("== {path}\n{}", out.text);
    let obj = out.json.as_object_mut().expect("reports are objects");
    obj.insert("file".into(), json!(path));
    obj.insert("command".into(), json!(command.name()));
    if !deterministic {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        obj.insert("timestamp".into(), json!(secs));
    }
    out
}

fn run_text(command: Command, text: &str, flags: &Flags) -> Result<Outcome, Failure> {
    let problem = Problem::load(ProblemSpec::parse(text)?, flags)?;
    let el = euler_lagrange(&problem.lagrangian)?;
    let mut r = Report::new(&problem, &el);
    match command {
        Command::Symmetries => r.solve(false)?,
        Command::Integrals => r.solve(true)?,
        Command::Verify => r.verify()?,
        Command::Numcheck => r.numcheck()?,
    }
    Ok(r.finish())
}

fn named(names: &[String], exprs: &[Expr], space: &JetSpace) -> Value {
    let map: Map<String, Value> =
        names.iter().zip(exprs).map(|(n, e)| (n.clone(), json!(e.to_string_in(space)))).collect();
    Value::Object(map)
}

fn status_name(s: VerifyStatus) -> &'static str {
    match s {
        VerifyStatus::Conserved => "conserved",
        VerifyStatus::NotConserved => "not_conserved",
        VerifyStatus::Indeterminate => "indeterminate",
    }
}

struct Report<'a> {
    p: &'a Problem,
    el: &'a ELSystem,
    text: String,
    json: Map<String, Value>,
    passed: bool,
}

impl<'a> Report<'a> {
    fn new(p: &'a Problem, el: &'a ELSystem) -> Self {
        let space = p.space();
        let a = &p.ansatz;
        let mut json = Map::new();
        json.insert(
            "problem".into(),
            json!({
                "independents": space.independents(),
                "dependents": space.dependents(),
                "lagrangian": p.lagrangian.body().to_string_in(space),
                "order": p.lagrangian.order(),
                "ansatz": {
                    "degree": a.coeff_degree,
                    "jet_order": a.coeff_jet_order,
                    "gauge": a.include_gauge,
                    "gauge_degree": a.gauge_degree,
                    "gauge_jet_order": a.gauge_jet_order,
                    "evolutionary": a.suppress_xi,
                },
            }),
        );
        let eqs = el.display(space);
        json.insert("euler_lagrange".into(), json!(eqs));
        let mut text = String::new();
        let _ = writeln!(text, "L = {}", p.lagrangian.body().to_string_in(space));
        for e in &eqs {
            let _ = writeln!(text, "EL: {e}");
        }
        Report { p, el, text, json, passed: true }
    }

    fn space(&self) -> &'a JetSpace {
        self.p.space()
    }

    fn generator_json(&self, g: &Generator) -> Map<String, Value> {
        let s = self.space();
        let mut m = Map::new();
        m.insert("operator".into(), json!(g.describe(s)));
        m.insert("xi".into(), named(s.independents(), &g.xi, s));
        m.insert("eta".into(), named(s.dependents(), &g.eta, s));
        m
    }

    fn law_json(&self, law: &ConservationLaw) -> Value {
        let s = self.space();
        let kind = match law.kind {
            LawKind::FirstIntegral => "first_integral",
            LawKind::FluxVector => "flux_vector",
        };
        json!({ "kind": kind, "components": named(s.independents(), &law.components, s) })
    }

    fn verification_json(&self, v: &VerifyReport) -> Value {
        json!({
            "status": status_name(v.status),
            "residual": v.residual.to_string_in(self.space()),
            "note": v.note,
        })
    }

    fn law_text(&self, law: &ConservationLaw) -> String {
        let s = self.space();
        match law.first_integral() {
            Some(i) => format!("I = {}", i.to_string_in(s)),
            None => {
                let parts: Vec<String> = s
                    .independents()
                    .iter()
                    .zip(&law.components)
                    .map(|(n, c)| format!("{n}: {}", c.to_string_in(s)))
                    .collect();
                format!("I = ({})", parts.join(", "))
            }
        }
    }

    fn gauge_text(&self, gauge: &[Expr]) -> String {
        let shown: Vec<String> = gauge.iter().map(|f| f.to_string_in(self.space())).collect();
        match shown.as_slice() {
            [one] => one.clone(),
            many => format!("({})", many.join(", ")),
        }
    }

    fn verification_text(v: &VerifyReport) -> &'static str {
        match v.status {
            VerifyStatus::Conserved => "verified",
            VerifyStatus::NotConserved => "NOT conserved",
            VerifyStatus::Indeterminate => "indeterminate",
        }
    }

    fn solve(&mut self, with_laws: bool) -> Result<(), Failure> {
        let sols = match noether_symmetries(&self.p.lagrangian, &self.p.ansatz) {
            Err(Error::Unsupported(why)) if !self.p.candidates.is_empty() || !self.p.laws.is_empty() => {
                let note = format!("solving unsupported ({why}); checked the listed generators instead");
                let _ = writeln!(self.text, "note: {note}");
                self.json.insert("note".into(), json!(note));
                return self.verify();
            }
            other => other?,
        };
        let _ = writeln!(self.text, "symmetries: {}", sols.len());
        let mut list = Vec::new();
        for (k, sol) in sols.iter().enumerate() {
            let mut m = self.generator_json(&sol.generator);
            m.insert("gauge".into(), named(self.space().independents(), &sol.gauge, self.space()));
            let _ = writeln!(self.text, "  [{}] {}", k + 1, sol.generator.describe(self.space()));
            let _ = writeln!(self.text, "      gauge: {}", self.gauge_text(&sol.gauge));
            if with_laws {
                m.insert("law".into(), self.law_json(&sol.law));
                m.insert("verification".into(), self.verification_json(&sol.verification));
                let _ = writeln!(
                    self.text,
                    "      {}  ({})",
                    self.law_text(&sol.law),
                    Self::verification_text(&sol.verification)
                );
                self.passed &= sol.verification.passed();
            }
            list.push(Value::Object(m));
        }
        self.json.insert("generators".into(), Value::Array(list));
        Ok(())
    }

    fn verify(&mut self) -> Result<(), Failure> {
        if self.p.candidates.is_empty() && self.p.laws.is_empty() {
            return Err(Failure::Input("nothing to verify: add [generator] or [law] sections".into()));
        }
        let space = self.space();
        let mut list = Vec::new();
        for c in &self.p.candidates {
            let out = verify_candidate(&self.p.lagrangian, &c.generator, c.gauge.as_deref(), &self.p.ansatz)?;
            let mut m = self.generator_json(&c.generator);
            m.insert("name".into(), json!(c.name));
            let _ = writeln!(self.text, "{}: {}", c.name, c.generator.describe(space));
            match &out {
                CandidateOutcome::Symmetry { gauge, law, verification } => {
                    m.insert("status".into(), json!("symmetry"));
                    m.insert("gauge".into(), named(space.independents(), gauge, space));
                    m.insert("law".into(), self.law_json(law));
                    m.insert("verification".into(), self.verification_json(verification));
                    let _ = writeln!(self.text, "  symmetry, gauge: {}", self.gauge_text(gauge));
                    let _ = writeln!(self.text, "  {}  ({})", self.law_text(law), Self::verification_text(verification));
                }
                CandidateOutcome::NotASymmetry { residual } => {
                    m.insert("status".into(), json!("not_a_symmetry"));
                    m.insert("residual".into(), json!(residual.to_string_in(space)));
                    let _ = writeln!(self.text, "  not a symmetry with the given gauge");
                    let _ = writeln!(self.text, "  residual: {}", residual.to_string_in(space));
                }
                CandidateOutcome::NoLocalGauge { residual } => {
                    m.insert("status".into(), json!("no_local_gauge"));
                    m.insert("residual".into(), json!(residual.to_string_in(space)));
                    let what = if space.is_ode() { "gauge" } else { "flux gauge" };
                    let _ = writeln!(self.text, "  no local {what} found");
                    let _ = writeln!(self.text, "  residual without gauge: {}", residual.to_string_in(space));
                }
            }
            m.insert("passed".into(), json!(out.passed()));
            self.passed &= out.passed();
            list.push(Value::Object(m));
        }
        self.json.insert("candidates".into(), Value::Array(list));

        let mut laws = Vec::new();
        for l in &self.p.laws {
            let v = verify(&l.law, self.el, space)?;
            let _ = writeln!(self.text, "{}: {}  ({})", l.name, self.law_text(&l.law), Self::verification_text(&v));
            if !v.passed() {
                let _ = writeln!(self.text, "  residual: {}", v.residual.to_string_in(space));
            }
            self.passed &= v.passed();
            let mut m = Map::new();
            m.insert("name".into(), json!(l.name));
            m.insert("law".into(), self.law_json(&l.law));
            m.insert("verification".into(), self.verification_json(&v));
            laws.push(Value::Object(m));
        }
        self.json.insert("laws".into(), Value::Array(laws));
        Ok(())
    }

    fn numcheck(&mut self) -> Result<(), Failure> {
        let space = self.space();
        if !space.is_ode() {
            return Err(Failure::Input("numeric validation needs exactly one independent variable".into()));
        }
        let (names, laws): (Vec<String>, Vec<ConservationLaw>) = if self.p.laws.is_empty() {
            noether_symmetries(&self.p.lagrangian, &self.p.ansatz)?
                .into_iter()
                .enumerate()
                .map(|(k, s)| (format!("I{}", k + 1), s.law))
                .unzip()
        } else {
            self.p.laws.iter().map(|l| (l.name.clone(), l.law.clone())).unzip()
        };
        let cfg = &self.p.numeric;
        let report = check_laws(&laws, self.el, space, cfg)?;
        let _ = writeln!(
            self.text,
            "step {}, horizon {}, tolerance {:e}, seed {}",
            cfg.step, cfg.horizon, cfg.tolerance, cfg.seed
        );
        let mut list = Vec::new();
        for ((name, law), (d, ok)) in names.iter().zip(&laws).zip(report.drifts.iter().zip(&report.passed)) {
            let verdict = if *ok { "PASS" } else { "FAIL" };
            let _ = writeln!(self.text, "  {verdict} {name}: drift {d:.3e}  {}", self.law_text(law));
            list.push(json!({
                "name": name,
                "law": self.law_json(law),
                "drift": d,
                "passed": ok,
            }));
        }
        if report.truncated > 0 {
            let _ = writeln!(self.text, "  {} trajectories hit a non-finite value", report.truncated);
        }
        self.passed &= report.all_passed();
        self.json.insert(
            "numeric".into(),
            json!({
                "step": cfg.step,
                "horizon": cfg.horizon,
                "tolerance": cfg.tolerance,
                "seed": cfg.seed,
                "samples": report.samples,
                "truncated": report.truncated,
                "laws": list,
            }),
        );
        Ok(())
    }

    fn finish(mut self) -> Outcome {
        let _ = writeln!(self.text, "{}", if self.passed { "PASSED" } else { "FAILED" });
        self.json.insert("passed".into(), json!(self.passed));
        Outcome {
            code: if self.passed { EXIT_PASS } else { EXIT_FAIL },
            text: self.text,
            json: Value::Object(self.json),
        }
    }
}
