use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{Expr, Monomial, Rational};
use crate::jet::{Generator, JetSpace, VarId};
use crate::linalg::{to_sparse, Rref, SparseRow};
use crate::variational::{euler_lagrange, Lagrangian};

use super::laws::{conservation_vector_unchecked, verify, VerifyReport};
use super::{condition_residual, Ansatz, ConservationLaw};

/// Homogeneous linear system over the ansatz parameters.
///
/// Columns are ordered generator coefficients first (`xi` then `eta`, one
/// block per component, monomials ascending in graded-lex order), then the
/// gauge components in the same way.
#[derive(Debug, Clone)]
pub struct DeterminingSystem {
    pub unknowns: Vec<VarId>,
    pub rows: Vec<SparseRow>,
    /// Columns below this index belong to the generator.
    pub generator_columns: usize,
    template: Generator,
    gauge: Vec<Expr>,
}

impl DeterminingSystem {
    /// Generator and gauge obtained by assigning values to the unknowns.
    pub fn instantiate(&self, values: &[Rational], space: &JetSpace) -> (Generator, Vec<Expr>) {
        let inst = |e: &Expr| instantiate(e, values, space);
        let g = Generator { xi: self.template.xi.iter().map(inst).collect(), eta: self.template.eta.iter().map(inst).collect() };
        (g, self.gauge.iter().map(inst).collect())
    }

    pub fn template(&self) -> (&Generator, &[Expr]) {
        (&self.template, &self.gauge)
    }
}

/// Replaces each parameter by its value in an expression linear in the
/// parameters.
pub(crate) fn instantiate(e: &Expr, values: &[Rational], space: &JetSpace) -> Expr {
    let base = space.len();
    Expr::from_terms(e.terms().filter_map(|(m, c)| {
        let (p, rest): (Vec<_>, Vec<_>) = m.factors().iter().partition(|(v, _)| space.is_param(*v));
        let &[(p, 1)] = p.as_slice() else {
            return None;
        };
        let value = &values[p.index() - base];
        if value.is_zero() {
            return None;
        }
        Some((Monomial::from_exponents(rest), c * value))
    }))
}

/// All monomials in `vars` of total degree at most `degree`, ascending.
pub(crate) fn monomials(vars: &[VarId], degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for &v in vars {
        let mut next = Vec::new();
        for m in &out {
            for e in 0..=(degree - m.degree()) {
                next.push(m.mul(&Monomial::from_exponents([(v, e)])));
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Independents plus jets of order at most `order`.
pub(crate) fn dependence_vars(space: &JetSpace, order: u32) -> Vec<VarId> {
    space.variables_up_to(order)
}

/// Fills each slot with `sum_k c_k m_k`, drawing fresh parameters.
pub(crate) fn polynomial_template(monos: &[Monomial], next: &mut usize, space: &JetSpace) -> Expr {
    Expr::from_terms(monos.iter().map(|m| {
        let p = space.param(*next);
        *next += 1;
        (m.mul(&Monomial::var(p)), Rational::from_integer(1.into()))
    }))
}

/// Coefficient rows of an expression linear in the parameters, collected
/// over every non-parameter monomial.
pub(crate) fn linear_rows(residual: &Expr, space: &JetSpace) -> Result<Vec<SparseRow>> {
    let outside: BTreeSet<VarId> = residual.vars().into_iter().filter(|&v| !space.is_param(v)).collect();
    let base = space.len();
    residual
        .collect(&outside)
        .into_values()
        .map(|coeff| {
            coeff
                .terms()
                .map(|(m, c)| match m.factors() {
                    &[(p, 1)] if space.is_param(p) => Ok((p.index() - base, c.clone())),
                    _ => Err(Error::InvalidAnsatz("determining equations are not linear homogeneous".into())),
                })
                .collect()
        })
        .collect()
}

fn check_supported(l: &Lagrangian) -> Result<()> {
    let s = l.space();
    if s.is_ode() || (s.n_independents() == 2 && s.n_dependents() == 1 && l.order() == 1) {
        return Ok(());
    }
    Err(Error::Unsupported(format!(
        "solving is available for one independent variable or for first-order Lagrangians in two independents \
         and one dependent; this problem has {} independents, {} dependents and order {}; use verification mode",
        s.n_independents(),
        s.n_dependents(),
        l.order()
    )))
}

pub fn determining_system(l: &Lagrangian, a: &Ansatz) -> Result<DeterminingSystem> {
    check_supported(l)?;
    a.validate(l)?;
    let space = l.space();
    let coeff_monos = monomials(&dependence_vars(space, a.coeff_jet_order), a.coeff_degree);
    let mut next = 0;
    let xi: Vec<Expr> = (0..space.n_independents())
        .map(|_| if a.suppress_xi { Expr::zero() } else { polynomial_template(&coeff_monos, &mut next, space) })
        .collect();
    let eta: Vec<Expr> =
        (0..space.n_dependents()).map(|_| polynomial_template(&coeff_monos, &mut next, space)).collect();
    let generator_columns = next;
    let gauge_monos = monomials(&dependence_vars(space, a.gauge_jet_order), a.gauge_degree);
    let gauge: Vec<Expr> = (0..space.n_independents())
        .map(|_| if a.include_gauge { polynomial_template(&gauge_monos, &mut next, space) } else { Expr::zero() })
        .collect();
    let template = Generator { xi, eta };
    let residual = condition_residual(l, &template, &gauge)?;
    let rows = linear_rows(&residual, space)?;
    Ok(DeterminingSystem { unknowns: (0..next).map(|k| space.param(k)).collect(), rows, generator_columns, template, gauge })
}

/// Basis of the solution space modulo pure gauge terms.
///
/// The exact nullspace is brought to reduced echelon form with generator
/// columns first. Rows whose pivot is a gauge column carry no generator at
/// all (additive constants, divergence-free fluxes) and are dropped; the
/// remaining rows are returned in pivot order with pivot entry 1.
pub fn solve(ds: &DeterminingSystem) -> Vec<Vec<Rational>> {
    let n = ds.unknowns.len();
    let null = Rref::from_rows(n, &ds.rows).nullspace();
    let basis: Vec<SparseRow> = null.iter().map(|v| to_sparse(v)).collect();
    let rref = Rref::from_rows(n, &basis);
    rref.rows()
        .into_iter()
        .filter(|row| row.iter().position(|v| !v.is_zero()).is_some_and(|p| p < ds.generator_columns))
        .collect()
}

/// A solved symmetry with its gauge term and verified conservation law.
#[derive(Debug, Clone)]
pub struct NoetherSolution {
    pub generator: Generator,
    /// One gauge function for ODE problems, a flux gauge vector otherwise.
    pub gauge: Vec<Expr>,
    pub law: ConservationLaw,
    pub verification: VerifyReport,
}

/// Determining system, exact solve, re-substitution check and law synthesis.
pub fn noether_symmetries(l: &Lagrangian, a: &Ansatz) -> Result<Vec<NoetherSolution>> {
    let ds = determining_system(l, a)?;
    let el = euler_lagrange(l)?;
    let space = l.space();
    solve(&ds)
        .iter()
        .map(|x| {
            let (generator, gauge) = ds.instantiate(x, space);
            let residual = condition_residual(l, &generator, &gauge)?;
            if !residual.is_zero() {
                return Err(Error::NotASymmetry(residual.to_string_in(space)));
            }
            let law = conservation_vector_unchecked(l, &generator, &gauge)?;
            let verification = verify(&law, &el, space)?;
            if verification.failed() {
                return Err(Error::NotConserved(verification.residual.to_string_in(space)));
            }
            Ok(NoetherSolution { generator, gauge, law, verification })
        })
        .collect()
}
