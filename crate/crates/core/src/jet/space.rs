use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Derivative counts per independent variable. The total is the jet order.
pub type MultiIndex = SmallVec<[u32; 4]>;

/// Interned handle for a symbol of a [`JetSpace`].
///
/// Independent variables come first, then jet coordinates (dependent
/// variables are the order-zero jets), then ansatz parameters. The numeric
/// order of ids is the variable order used by the monomial ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    Independent(usize),
    /// `dep` indexes the dependent variable; an all-zero multi-index is the
    /// dependent variable itself.
    Jet { dep: usize, multi: MultiIndex },
    Parameter(usize),
}

#[derive(Debug, Clone)]
struct VarInfo {
    kind: VarKind,
    name: String,
    order: u32,
}

/// Registry of independent variables, dependent variables and every jet
/// coordinate up to a fixed maximum order.
///
/// The coordinate table is built once and never mutated. Parameters are not
/// stored: `c<k>` maps to the id `len + k`, so any number of unknowns can be
/// minted without writing to shared state.
#[derive(Debug, Clone)]
pub struct JetSpace {
    independents: Vec<String>,
    dependents: Vec<String>,
    max_order: u32,
    vars: Vec<VarInfo>,
    by_name: HashMap<String, VarId>,
    by_jet: HashMap<(usize, MultiIndex), VarId>,
    /// `raise[i][j]`: jet `i` differentiated once more in independent `j`.
    raise: Vec<Vec<Option<VarId>>>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric()),
        _ => false,
    }
}

fn is_param_name(name: &str) -> bool {
    name.len() > 1 && name.starts_with('c') && name[1..].chars().all(|c| c.is_ascii_digit())
}

/// All multi-indices over `n` variables of total degree exactly `order`,
/// lexicographically descending (so `tt` precedes `tx` precedes `xx`).
pub(crate) fn multi_indices(n: usize, order: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, left: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, order, &mut MultiIndex::new(), &mut out);
    out
}

impl JetSpace {
    /// Builds the space with every jet coordinate of order `<= max_order`.
    pub fn new<S: AsRef<str>>(independents: &[S], dependents: &[S], max_order: u32) -> Result<Self> {
        let independents: Vec<String> = independents.iter().map(|s| s.as_ref().to_string()).collect();
        let dependents: Vec<String> = dependents.iter().map(|s| s.as_ref().to_string()).collect();
        if independents.is_empty() {
            return Err(Error::InvalidSpace("at least one independent variable is required".into()));
        }
        if dependents.is_empty() {
            return Err(Error::InvalidSpace("at least one dependent variable is required".into()));
        }
        if max_order < 1 {
            return Err(Error::InvalidSpace("maximum jet order must be at least 1".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in independents.iter().chain(&dependents) {
            if !valid_identifier(name) {
                return Err(Error::InvalidSpace(format!("`{name}` is not a valid variable name")));
            }
            if is_param_name(name) {
                return Err(Error::InvalidSpace(format!("`{name}` is reserved for ansatz parameters")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSpace(format!("variable `{name}` is declared twice")));
            }
        }

        let n = independents.len();
        let ode = n == 1;
        let mut space = JetSpace {
            independents,
            dependents,
            max_order,
            vars: Vec::new(),
            by_name: HashMap::new(),
            by_jet: HashMap::new(),
            raise: Vec::new(),
        };
        for (j, name) in space.independents.iter().enumerate() {
            space.vars.push(VarInfo { kind: VarKind::Independent(j), name: name.clone(), order: 0 });
        }
        for order in 0..=max_order {
            for multi in multi_indices(n, order) {
                for dep in 0..space.dependents.len() {
                    let name = space.jet_name(dep, &multi, ode);
                    space.vars.push(VarInfo { kind: VarKind::Jet { dep, multi: multi.clone() }, name, order });
                }
            }
        }
        for (i, info) in space.vars.iter().enumerate() {
            let id = VarId(i as u32);
            space.by_name.insert(info.name.clone(), id);
            if let VarKind::Jet { dep, multi } = &info.kind {
                space.by_jet.insert((*dep, multi.clone()), id);
            }
        }
        let mut raise = Vec::with_capacity(space.vars.len());
        for info in &space.vars {
            let row = match &info.kind {
                VarKind::Jet { dep, multi } => (0..n)
                    .map(|j| {
                        let mut m = multi.clone();
                        m[j] += 1;
                        space.by_jet.get(&(*dep, m)).copied()
                    })
                    .collect(),
                _ => vec![None; n],
            };
            raise.push(row);
        }
        space.raise = raise;
        Ok(space)
    }

    /// Space sized for a Lagrangian of order `order` whose generator
    /// coefficients may depend on jets up to `coeff_jet_order`: maximum jet
    /// order `2 * order + coeff_jet_order + 2`.
    pub fn for_lagrangian<S: AsRef<str>>(
        independents: &[S],
        dependents: &[S],
        order: u32,
        coeff_jet_order: u32,
    ) -> Result<Self> {
        Self::new(independents, dependents, 2 * order + coeff_jet_order + 2)
    }

    fn jet_name(&self, dep: usize, multi: &[u32], ode: bool) -> String {
        let base = &self.dependents[dep];
        let order: u32 = multi.iter().sum();
        if order == 0 {
            return base.clone();
        }
        if ode {
            let mut s = base.clone();
            s.extend(std::iter::repeat_n('\'', order as usize));
            return s;
        }
        let mut s = format!("{base}_");
        for (j, k) in multi.iter().enumerate() {
            for _ in 0..*k {
                s.push_str(&self.independents[j]);
            }
        }
        s
    }

    pub fn independents(&self) -> &[String] {
        &self.independents
    }

    pub fn dependents(&self) -> &[String] {
        &self.dependents
    }

    pub fn n_independents(&self) -> usize {
        self.independents.len()
    }

    pub fn n_dependents(&self) -> usize {
        self.dependents.len()
    }

    pub fn is_ode(&self) -> bool {
        self.independents.len() == 1
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Number of registered (non-parameter) variables.
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn independent(&self, j: usize) -> VarId {
        assert!(j < self.independents.len(), "independent index out of range");
        VarId(j as u32)
    }

    pub fn dependent(&self, i: usize) -> VarId {
        let zero: MultiIndex = std::iter::repeat_n(0, self.n_independents()).collect();
        self.jet(i, &zero).expect("dependent index out of range")
    }

    pub fn jet(&self, dep: usize, multi: &[u32]) -> Option<VarId> {
        self.by_jet.get(&(dep, MultiIndex::from_slice(multi))).copied()
    }

    /// ODE shorthand: the `order`-th derivative of dependent `dep`.
    pub fn ode_jet(&self, dep: usize, order: u32) -> Option<VarId> {
        self.jet(dep, &[order])
    }

    /// Parameter `c<k>`.
    pub fn param(&self, k: usize) -> VarId {
        VarId((self.vars.len() + k) as u32)
    }

    pub fn kind(&self, v: VarId) -> VarKind {
        match self.vars.get(v.index()) {
            Some(info) => info.kind.clone(),
            None => VarKind::Parameter(v.index() - self.vars.len()),
        }
    }

    pub fn is_param(&self, v: VarId) -> bool {
        v.index() >= self.vars.len()
    }

    pub fn is_independent(&self, v: VarId) -> bool {
        v.index() < self.independents.len()
    }

    pub fn is_jet(&self, v: VarId) -> bool {
        !self.is_param(v) && !self.is_independent(v)
    }

    /// Jet order of a variable; zero for independents and parameters.
    pub fn order(&self, v: VarId) -> u32 {
        self.vars.get(v.index()).map_or(0, |i| i.order)
    }

    /// `(dep, multi)` of a jet coordinate.
    pub fn jet_parts(&self, v: VarId) -> Option<(usize, &MultiIndex)> {
        match self.vars.get(v.index()).map(|i| &i.kind) {
            Some(VarKind::Jet { dep, multi }) => Some((*dep, multi)),
            _ => None,
        }
    }

    /// The jet coordinate `v` differentiated once in independent `j`.
    pub fn raise(&self, v: VarId, j: usize) -> Result<VarId> {
        match self.raise.get(v.index()).and_then(|r| r[j]) {
            Some(id) => Ok(id),
            None => Err(Error::HeadroomExhausted { needed: self.order(v) + 1, max: self.max_order }),
        }
    }

    pub fn name(&self, v: VarId) -> String {
        match self.vars.get(v.index()) {
            Some(info) => info.name.clone(),
            None => format!("c{}", v.index() - self.vars.len()),
        }
    }

    /// Every jet coordinate of dependent `dep` with order `<= order`, by
    /// increasing order.
    pub fn jets_of(&self, dep: usize, order: u32) -> Vec<VarId> {
        (0..self.vars.len())
            .map(|i| VarId(i as u32))
            .filter(|&v| matches!(self.jet_parts(v), Some((d, _)) if d == dep) && self.order(v) <= order)
            .collect()
    }

    /// Independents, dependents and jets of order `<= order`, in id order.
    pub fn variables_up_to(&self, order: u32) -> Vec<VarId> {
        (0..self.vars.len())
            .map(|i| VarId(i as u32))
            .filter(|&v| self.is_independent(v) || self.order(v) <= order)
            .collect()
    }

    /// Resolves a source-level name.
    ///
    /// Accepts canonical names (`y''`, `u_tx`), underscore suffixes in any
    /// order (`u_xt`), ODE underscore suffixes (`y_xx`) and the dot aliases
    /// `qdot`, `qddot`.
    pub fn resolve(&self, name: &str) -> Option<VarId> {
        if let Some(&id) = self.by_name.get(name) {
            return Some(id);
        }
        let n = self.n_independents();
        if let Some((base, suffix)) = name.split_once('_') {
            let dep = self.dependents.iter().position(|d| d == base)?;
            let mut multi: MultiIndex = std::iter::repeat_n(0, n).collect();
            let mut rest = suffix;
            while !rest.is_empty() {
                // Longest independent name that prefixes the remainder.
                let (j, len) = self
                    .independents
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| rest.starts_with(s.as_str()))
                    .map(|(j, s)| (j, s.len()))
                    .max_by_key(|&(_, len)| len)?;
                multi[j] += 1;
                rest = &rest[len..];
            }
            return self.jet(dep, &multi);
        }
        if n == 1 {
            for (suffix, order) in [("ddot", 2), ("dot", 1)] {
                if let Some(base) = name.strip_suffix(suffix) {
                    if let Some(dep) = self.dependents.iter().position(|d| d == base) {
                        return self.ode_jet(dep, order);
                    }
                }
            }
        }
        None
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
