//! Euler-Lagrange equations, Hessians, and reduction modulo the equations of
//! motion.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{Expr, Rational};
use crate::jet::{jet_order, total_derivative_multi, JetSpace, MultiIndex, VarId};

/// A polynomial Lagrangian density of order `order`.
#[derive(Debug, Clone)]
pub struct Lagrangian {
    space: Arc<JetSpace>,
    order: u32,
    body: Expr,
}

impl Lagrangian {
    /// Builds the Lagrangian; its order is the highest jet order in `body`.
    pub fn new(space: Arc<JetSpace>, body: Expr) -> Result<Self> {
        if body.is_zero() {
            return Err(Error::InvalidLagrangian("the Lagrangian is identically zero".into()));
        }
        if let Some(v) = body.vars().into_iter().find(|&v| space.is_param(v)) {
            return Err(Error::InvalidLagrangian(format!("unexpected parameter `{}`", space.name(v))));
        }
        let order = jet_order(&body, &space);
        if order < 1 {
            return Err(Error::InvalidLagrangian("the Lagrangian contains no derivatives".into()));
        }
        if space.max_order() < 2 * order {
            return Err(Error::InvalidLagrangian(format!(
                "jet space of order {} is too small for a Lagrangian of order {order}",
                space.max_order()
            )));
        }
        Ok(Lagrangian { space, order, body })
    }

    /// As [`Lagrangian::new`], also checking a declared order.
    pub fn with_order(space: Arc<JetSpace>, body: Expr, declared: u32) -> Result<Self> {
        let l = Self::new(space, body)?;
        if l.order != declared {
            return Err(Error::InvalidLagrangian(format!(
                "declared order {declared} but the highest derivative present has order {}",
                l.order
            )));
        }
        Ok(l)
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    /// Jet coordinates the Lagrangian may depend on, by increasing order.
    pub fn jets(&self) -> Vec<VarId> {
        (0..self.space.n_dependents()).flat_map(|i| self.space.jets_of(i, self.order)).collect()
    }
}

/// An equation solved for its distinguished highest derivative: `var = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvedForm {
    pub dep: usize,
    pub var: VarId,
    pub multi: MultiIndex,
    pub rhs: Expr,
}

#[derive(Debug, Clone)]
pub struct ELSystem {
    pub equations: Vec<Expr>,
    solved: std::result::Result<Vec<SolvedForm>, String>,
}

impl ELSystem {
    /// Wraps equations and solves each for its distinguished derivative.
    ///
    /// The distinguished derivative of an equation is a jet coordinate of
    /// maximal order in which the equation is linear with a constant
    /// coefficient; ties go to the equation's own dependent variable, then
    /// to the lexicographically largest multi-index (for `(t, x)` this picks
    /// `u_tt` over `u_xx`).
    pub fn new(equations: Vec<Expr>, space: &JetSpace) -> Self {
        let solved = Self::solve_all(&equations, space);
        ELSystem { equations, solved }
    }

    fn solve_all(equations: &[Expr], space: &JetSpace) -> std::result::Result<Vec<SolvedForm>, String> {
        let mut out: Vec<SolvedForm> = Vec::new();
        for (i, eq) in equations.iter().enumerate() {
            if eq.is_zero() {
                return Err(format!("equation {} vanishes identically", i + 1));
            }
            let top = jet_order(eq, space);
            let mut candidates: Vec<(VarId, usize, MultiIndex, Rational, Expr)> = eq
                .vars()
                .into_iter()
                .filter(|&v| space.is_jet(v) && space.order(v) == top && top > 0)
                .filter(|&v| out.iter().all(|s| s.var != v))
                .filter_map(|v| {
                    let (coeff, rest) = eq.linear_in(v)?;
                    let c = coeff.as_constant().filter(|c| !c.is_zero())?;
                    let (dep, multi) = space.jet_parts(v)?;
                    Some((v, dep, multi.clone(), c, rest))
                })
                .collect();
            candidates.sort_by(|a, b| (b.1 == i).cmp(&(a.1 == i)).then_with(|| b.2.cmp(&a.2)));
            let Some((var, dep, multi, c, rest)) = candidates.into_iter().next() else {
                return Err(format!(
                    "equation {} is not linear with constant coefficient in any highest derivative",
                    i + 1
                ));
            };
            let rhs = rest.scale(&(-Rational::one() / c));
            out.push(SolvedForm { dep, var, multi, rhs });
        }
        Ok(out)
    }

    pub fn solved_forms(&self) -> Option<&[SolvedForm]> {
        self.solved.as_deref().ok()
    }

    /// Why reduction is unavailable, if it is.
    pub fn unsolved_reason(&self) -> Option<&str> {
        self.solved.as_ref().err().map(String::as_str)
    }

    pub fn display(&self, space: &JetSpace) -> Vec<String> {
        match self.solved_forms() {
            Some(forms) => {
                forms.iter().map(|s| format!("{} = {}", space.name(s.var), s.rhs.to_string_in(space))).collect()
            }
            None => self.equations.iter().map(|e| format!("{} = 0", e.to_string_in(space))).collect(),
        }
    }
}

/// `E_i(L) = sum over multi-indices a of (-D)^a dL/du^i_a`.
pub fn euler_lagrange(l: &Lagrangian) -> Result<ELSystem> {
    let space = l.space();
    let mut equations = Vec::with_capacity(space.n_dependents());
    for i in 0..space.n_dependents() {
        let mut e = Expr::zero();
        for v in space.jets_of(i, l.order()) {
            let (_, multi) = space.jet_parts(v).expect("jet");
            let d = l.body().partial(v);
            if d.is_zero() {
                continue;
            }
            let term = total_derivative_multi(&d, multi, space)?;
            if space.order(v).is_multiple_of(2) {
                e += &term;
            } else {
                e -= &term;
            }
        }
        equations.push(e);
    }
    Ok(ELSystem::new(equations, space))
}

/// Hessian of a first-order one-independent-variable Lagrangian with
/// respect to the velocities.
#[derive(Debug, Clone)]
pub struct Hessian {
    pub matrix: Vec<Vec<Expr>>,
    pub determinant: Expr,
    pub regular: bool,
}

pub fn hessian(l: &Lagrangian) -> Result<Hessian> {
    let space = l.space();
    if l.order() != 1 || !space.is_ode() {
        return Err(Error::Unsupported(
            "the Hessian is defined here for first-order Lagrangians in one independent variable".into(),
        ));
    }
    let vel: Vec<VarId> = (0..space.n_dependents()).map(|i| space.ode_jet(i, 1).expect("velocity")).collect();
    let matrix: Vec<Vec<Expr>> =
        vel.iter().map(|&a| vel.iter().map(|&b| l.body().partial(a).partial(b)).collect()).collect();
    let determinant = determinant(&matrix);
    let regular = !determinant.is_zero();
    Ok(Hessian { matrix, determinant, regular })
}

/// Cofactor expansion along the first row.
fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Expr::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Expr>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = &m[0][col] * &determinant(&minor);
                if col % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc
        }
    }
}

const REDUCTION_LIMIT: usize = 10_000;

/// Normal form of `e` modulo the equations of motion: every jet coordinate
/// that is a derivative of a distinguished derivative is replaced by the
/// corresponding total derivative of its solved form, until none is left.
pub fn reduce_mod_el(e: &Expr, el: &ELSystem, space: &JetSpace) -> Result<Expr> {
    let forms = el
        .solved_forms()
        .ok_or_else(|| Error::ReductionUnavailable(el.unsolved_reason().unwrap_or_default().to_string()))?;
    let mut cache: HashMap<VarId, Expr> = HashMap::new();
    let mut cur = e.clone();
    for _ in 0..REDUCTION_LIMIT {
        // Highest-order reducible coordinate first.
        let target = cur
            .vars()
            .into_iter()
            .filter_map(|v| {
                let (dep, multi) = space.jet_parts(v)?;
                let form = forms.iter().find(|s| {
                    s.dep == dep && s.multi.iter().zip(multi.iter()).all(|(a, b)| a <= b)
                })?;
                Some((space.order(v), v, form))
            })
            .max_by_key(|&(order, v, _)| (order, std::cmp::Reverse(v)));
        let Some((_, v, form)) = target else {
            return Ok(cur);
        };
        let replacement = match cache.get(&v) {
            Some(r) => r.clone(),
            None => {
                let (_, multi) = space.jet_parts(v).expect("jet");
                let delta: Vec<u32> = multi.iter().zip(form.multi.iter()).map(|(a, b)| a - b).collect();
                let r = total_derivative_multi(&form.rhs, &delta, space)?;
                cache.insert(v, r.clone());
                r
            }
        };
        cur = cur.substitute_unchecked(&BTreeMap::from([(v, replacement)]));
    }
    Err(Error::ReductionDiverged(REDUCTION_LIMIT))
}
