//! Problem files.
//!
//! A problem file is a list of `key = value` lines grouped in sections.
//! Blank lines and lines starting with `#` are ignored.
//!
//! ```text
//! [problem]
//! independents = t, x          # comma or space separated
//! dependents = u
//! lagrangian = 1/12*u_x^4 + 1/2*u_t^2
//! order = 1                    # optional, checked when given
//!
//! [ansatz]                     # optional overrides
//! degree = 4                   # generator coefficient degree
//! jet_order = 0                # derivative order of generator coefficients
//! gauge = true
//! gauge_degree = 4
//! gauge_jet_order = 0
//! evolutionary = false
//! flux_derivatives = false     # lets a flux gauge depend on first derivatives
//!
//! [generator G4]               # candidates for `verify`, any number
//! xi.t = 0
//! xi.x = 0
//! eta.u = t
//! gauge.t = u                  # optional; searched for when absent
//!
//! [law I3]                     # laws for `verify` and `numcheck`
//! component.t = u_t
//! component.x = 1/3*u_x^3
//!
//! [numeric]
//! step = 1e-3
//! horizon = 10
//! tolerance = 1e-8
//! seed = 42
//! ```
//!
//! With one independent variable the suffix may be dropped: `xi`, `gauge`
//! and `component`; likewise `eta` with one dependent variable. Missing
//! generator coefficients are zero.

use std::fmt;
use std::sync::Arc;

use noether_core::jet::jet_order;
use noether_core::numeric::NumericConfig;
use noether_core::{parse, Ansatz, ConservationLaw, Expr, Generator, JetSpace, Lagrangian};

/// An input problem, with the line and field it concerns when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl InputError {
    fn at(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { line: Some(line), field: Some(field.into()), message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        InputError { line: None, field: None, message: message.into() }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub label: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn field(&self, key: &str) -> String {
        match &self.label {
            Some(label) => format!("[{} {label}] {key}", self.name),
            None => format!("[{}] {key}", self.name),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnsatzOverrides {
    pub degree: Option<u32>,
    pub jet_order: Option<u32>,
    pub gauge: Option<bool>,
    pub gauge_degree: Option<u32>,
    pub gauge_jet_order: Option<u32>,
    pub evolutionary: Option<bool>,
    pub flux_derivatives: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumericOverrides {
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

/// The parsed but not yet interpreted contents of a problem file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProblemSpec {
    pub independents: Vec<String>,
    pub dependents: Vec<String>,
    pub lagrangian: Entry,
    pub order: Option<u32>,
    pub ansatz: AnsatzOverrides,
    pub numeric: NumericOverrides,
    pub generators: Vec<Section>,
    pub laws: Vec<Section>,
}

fn split_sections(text: &str) -> Result<Vec<Section>, InputError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| InputError::at(line, "section", format!("unterminated header `{content}`")))?;
            let mut words = header.split_whitespace();
            let name = words.next().unwrap_or_default().to_string();
            let label = words.next().map(str::to_string);
            if words.next().is_some() {
                return Err(InputError::at(line, "section", format!("unexpected text in header `{content}`")));
            }
            sections.push(Section { name, label, line, entries: Vec::new() });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| InputError::at(line, "entry", format!("expected `key = value`, found `{content}`")))?;
        let section = sections
            .last_mut()
            .ok_or_else(|| InputError::at(line, key.trim(), "entry outside of any section"))?;
        let key = key.trim().to_string();
        if section.get(&key).is_some() {
            return Err(InputError::at(line, section.field(&key), "duplicate key"));
        }
        section.entries.push(Entry { key, value: value.trim().to_string(), line });
    }
    Ok(sections)
}

fn names(e: &Entry) -> Vec<String> {
    e.value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn number<T: std::str::FromStr>(s: &Section, e: &Entry) -> Result<T, InputError> {
    e.value.parse().map_err(|_| InputError::at(e.line, s.field(&e.key), format!("invalid number `{}`", e.value)))
}

fn boolean(s: &Section, e: &Entry) -> Result<bool, InputError> {
    match e.value.as_str() {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(InputError::at(e.line, s.field(&e.key), format!("expected true or false, found `{other}`"))),
    }
}

fn unknown_key(s: &Section, e: &Entry) -> InputError {
    InputError::at(e.line, s.field(&e.key), "unknown key")
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let mut spec = ProblemSpec::default();
        let mut seen_problem = false;
        let mut seen = std::collections::BTreeSet::new();
        for s in split_sections(text)? {
            let singleton = matches!(s.name.as_str(), "problem" | "ansatz" | "numeric");
            if singleton && !seen.insert(s.name.clone()) {
                return Err(InputError::at(s.line, format!("[{}]", s.name), "section appears twice"));
            }
            match s.name.as_str() {
                "problem" => {
                    seen_problem = true;
                    for e in &s.entries {
                        match e.key.as_str() {
                            "independents" => spec.independents = names(e),
                            "dependents" => spec.dependents = names(e),
                            "lagrangian" => spec.lagrangian = e.clone(),
                            "order" => spec.order = Some(number(&s, e)?),
                            _ => return Err(unknown_key(&s, e)),
                        }
                    }
                    for key in ["independents", "dependents", "lagrangian"] {
                        if s.get(key).is_none() {
                            return Err(InputError::at(s.line, s.field(key), "missing"));
                        }
                    }
                }
                "ansatz" => {
                    let a = &mut spec.ansatz;
                    for e in &s.entries {
                        match e.key.as_str() {
                            "degree" => a.degree = Some(number(&s, e)?),
                            "jet_order" => a.jet_order = Some(number(&s, e)?),
                            "gauge" => a.gauge = Some(boolean(&s, e)?),
                            "gauge_degree" => a.gauge_degree = Some(number(&s, e)?),
                            "gauge_jet_order" => a.gauge_jet_order = Some(number(&s, e)?),
                            "evolutionary" => a.evolutionary = Some(boolean(&s, e)?),
                            "flux_derivatives" => a.flux_derivatives = Some(boolean(&s, e)?),
                            _ => return Err(unknown_key(&s, e)),
                        }
                    }
                }
                "numeric" => {
                    let n = &mut spec.numeric;
                    for e in &s.entries {
                        match e.key.as_str() {
                            "step" => n.step = Some(number(&s, e)?),
                            "horizon" => n.horizon = Some(number(&s, e)?),
                            "tolerance" => n.tolerance = Some(number(&s, e)?),
                            "seed" => n.seed = Some(number(&s, e)?),
                            _ => return Err(unknown_key(&s, e)),
                        }
                    }
                }
                "generator" | "law" => {
                    let list = if s.name == "generator" { &mut spec.generators } else { &mut spec.laws };
                    if s.label.is_none() {
                        let label = format!("{}{}", if s.name == "generator" { "G" } else { "I" }, list.len() + 1);
                        list.push(Section { label: Some(label), ..s });
                    } else {
                        list.push(s);
                    }
                }
                other => return Err(InputError::at(s.line, format!("[{other}]"), "unknown section")),
            }
        }
        if !seen_problem {
            return Err(InputError::general("missing [problem] section"));
        }
        Ok(spec)
    }
}

/// Settings given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    pub degree: Option<u32>,
    pub jet_order: Option<u32>,
    pub no_gauge: bool,
    pub evolutionary: bool,
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub name: String,
    pub generator: Generator,
    pub gauge: Option<Vec<Expr>>,
}

#[derive(Debug, Clone)]
pub struct NamedLaw {
    pub name: String,
    pub law: ConservationLaw,
}

/// A validated problem ready to run.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub lagrangian: Lagrangian,
    pub ansatz: Ansatz,
    pub numeric: NumericConfig,
    pub candidates: Vec<Candidate>,
    pub laws: Vec<NamedLaw>,
}

fn expr(text: &str, space: &JetSpace, line: usize, field: String) -> Result<Expr, InputError> {
    parse(text, space).map_err(|e| InputError::at(line, field, e.to_string()))
}

/// Reads `prefix` or `prefix.name` keys into one expression per name.
fn indexed(
    s: &Section,
    prefix: &str,
    names: &[String],
    space: &JetSpace,
    used: &mut Vec<String>,
) -> Result<Option<Vec<Expr>>, InputError> {
    let mut out = vec![Expr::zero(); names.len()];
    let mut any = false;
    for (i, name) in names.iter().enumerate() {
        let dotted = format!("{prefix}.{name}");
        let e = s.get(&dotted).or_else(|| if names.len() == 1 { s.get(prefix) } else { None });
        if let Some(e) = e {
            out[i] = expr(&e.value, space, e.line, s.field(&e.key))?;
            used.push(e.key.clone());
            any = true;
        }
    }
    Ok(any.then_some(out))
}

fn check_all_used(s: &Section, used: &[String]) -> Result<(), InputError> {
    match s.entries.iter().find(|e| !used.contains(&e.key)) {
        Some(e) => Err(unknown_key(s, e)),
        None => Ok(()),
    }
}

impl Problem {
    pub fn load(spec: ProblemSpec, flags: &Flags) -> Result<Self, InputError> {
        let le = &spec.lagrangian;
        let lfield = "[problem] lagrangian".to_string();
        let space_err = |e: noether_core::Error| InputError::at(le.line, "[problem]", e.to_string());
        let probe = JetSpace::new(&spec.independents, &spec.dependents, 8).map_err(space_err)?;
        let found = jet_order(&expr(&le.value, &probe, le.line, lfield.clone())?, &probe);
        let order = spec.order.unwrap_or(found);
        if order == 0 {
            return Err(InputError::at(le.line, lfield, "the Lagrangian contains no derivatives"));
        }
        let space = Arc::new(
            JetSpace::for_lagrangian(&spec.independents, &spec.dependents, order, order).map_err(space_err)?,
        );
        let body = expr(&le.value, &space, le.line, lfield.clone())?;
        let lagrangian =
            Lagrangian::with_order(space.clone(), body, order).map_err(|e| InputError::at(le.line, lfield, e.to_string()))?;

        let a = &spec.ansatz;
        let evolutionary = flags.evolutionary || a.evolutionary.unwrap_or(false);
        let mut ansatz = if evolutionary { Ansatz::evolutionary(&lagrangian) } else { Ansatz::point(&lagrangian) };
        if let Some(d) = a.degree {
            ansatz.coeff_degree = d;
        }
        if let Some(j) = a.jet_order {
            ansatz.coeff_jet_order = j;
        }
        if let Some(g) = a.gauge {
            ansatz.include_gauge = g;
        }
        if let Some(d) = a.gauge_degree {
            ansatz.gauge_degree = d;
        }
        if let Some(j) = a.gauge_jet_order {
            ansatz.gauge_jet_order = j;
        }
        if a.flux_derivatives == Some(true) {
            ansatz.gauge_jet_order = ansatz.gauge_jet_order.max(1);
        }
        if let Some(d) = flags.degree {
            ansatz.coeff_degree = d;
            ansatz.gauge_degree = d;
        }
        if let Some(j) = flags.jet_order {
            ansatz.coeff_jet_order = j;
        }
        if flags.no_gauge {
            ansatz.include_gauge = false;
        }
        ansatz.validate(&lagrangian).map_err(|e| InputError { line: None, field: Some("ansatz".into()), message: e.to_string() })?;

        let n = &spec.numeric;
        let numeric = NumericConfig {
            step: flags.step.or(n.step).unwrap_or(1e-3),
            horizon: flags.horizon.or(n.horizon).unwrap_or(10.0),
            tolerance: flags.tolerance.or(n.tolerance).unwrap_or(1e-8),
            seed: flags.seed.or(n.seed).unwrap_or(42),
        };
        numeric.validate().map_err(|e| InputError { line: None, field: Some("numeric".into()), message: e.to_string() })?;

        let indep = &spec.independents;
        let dep = &spec.dependents;
        let mut candidates = Vec::new();
        for s in &spec.generators {
            let mut used = Vec::new();
            let xi = indexed(s, "xi", indep, &space, &mut used)?.unwrap_or_else(|| vec![Expr::zero(); indep.len()]);
            let eta = indexed(s, "eta", dep, &space, &mut used)?.unwrap_or_else(|| vec![Expr::zero(); dep.len()]);
            let gauge = indexed(s, "gauge", indep, &space, &mut used)?;
            check_all_used(s, &used)?;
            let generator = Generator::new(xi, eta, &space).expect("coefficient counts match the space");
            candidates.push(Candidate { name: s.label.clone().unwrap_or_default(), generator, gauge });
        }
        let mut laws = Vec::new();
        for s in &spec.laws {
            let mut used = Vec::new();
            let comps = indexed(s, "component", indep, &space, &mut used)?
                .ok_or_else(|| InputError::at(s.line, s.field("component"), "missing"))?;
            check_all_used(s, &used)?;
            let law = ConservationLaw::new(comps, &space).expect("component count matches the space");
            laws.push(NamedLaw { name: s.label.clone().unwrap_or_default(), law });
        }
        Ok(Problem { spec, lagrangian, ansatz, numeric, candidates, laws })
    }

    pub fn space(&self) -> &JetSpace {
        self.lagrangian.space()
    }
}
