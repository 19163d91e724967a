//! Noether symmetries and their conservation laws.
//!
//! A generator `g` with gauge term `F` is a Noether symmetry when
//!
//! ```text
//! pr g (L) + L * sum_j D_j xi^j - sum_j D_j F_j = 0
//! ```
//!
//! identically on the jet space. For one independent variable `F` is the
//! single gauge function `f`. The associated law is `I_j = F_j - xi^j L - P_j`
//! where `P` comes from moving total derivatives off the characteristic
//! `Q^i = eta^i - u^i_j xi^j`; its divergence vanishes on solutions.

mod condition;
mod gauge;
mod laws;
mod system;

pub use condition::condition_residual;
pub use gauge::{find_gauge, verify_candidate, CandidateOutcome};
pub use laws::{
    characteristic, conservation_vector, first_integral, hessian_relation_check, in_span_mod_el, verify,
    VerifyReport, VerifyStatus,
};
pub use system::{determining_system, noether_symmetries, solve, DeterminingSystem, NoetherSolution};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::JetSpace;
use crate::variational::Lagrangian;

/// Shape of the polynomial search space for generators and gauge terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ansatz {
    /// Maximal total degree of each generator coefficient.
    pub coeff_degree: u32,
    /// Maximal jet order the generator coefficients may depend on.
    pub coeff_jet_order: u32,
    pub gauge_degree: u32,
    pub gauge_jet_order: u32,
    pub include_gauge: bool,
    /// Search for evolutionary generators only (`xi = 0`).
    pub suppress_xi: bool,
}

impl Ansatz {
    /// Point symmetries with the default degrees. The gauge may depend on
    /// derivatives up to order `p - 1` for one independent variable and on
    /// the independents and dependents only otherwise.
    pub fn point(l: &Lagrangian) -> Self {
        let gauge_jet_order = if l.space().is_ode() { l.order() - 1 } else { 0 };
        Ansatz {
            coeff_degree: 4,
            coeff_jet_order: 0,
            gauge_degree: 4,
            gauge_jet_order,
            include_gauge: true,
            suppress_xi: false,
        }
    }

    /// Evolutionary search: `xi = 0`, characteristics and gauge of jet order `p`.
    pub fn evolutionary(l: &Lagrangian) -> Self {
        Ansatz { coeff_jet_order: l.order(), gauge_jet_order: l.order(), suppress_xi: true, ..Ansatz::point(l) }
    }

    pub fn validate(&self, l: &Lagrangian) -> Result<()> {
        if self.coeff_jet_order > l.order() {
            return Err(Error::InvalidAnsatz(format!(
                "coefficient jet order {} exceeds the Lagrangian order {}",
                self.coeff_jet_order,
                l.order()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LawKind {
    FirstIntegral,
    FluxVector,
}

/// A first integral (one component) or a conserved flux vector (one
/// component per independent variable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConservationLaw {
    pub kind: LawKind,
    pub components: Vec<Expr>,
}

impl ConservationLaw {
    pub fn new(components: Vec<Expr>, space: &JetSpace) -> Result<Self> {
        if components.len() != space.n_independents() {
            return Err(Error::GaugeDimension { expected: space.n_independents(), got: components.len() });
        }
        let kind = if space.is_ode() { LawKind::FirstIntegral } else { LawKind::FluxVector };
        Ok(ConservationLaw { kind, components })
    }

    pub fn first_integral(&self) -> Option<&Expr> {
        match self.kind {
            LawKind::FirstIntegral => self.components.first(),
            LawKind::FluxVector => None,
        }
    }

    pub fn scale(&self, c: &crate::expr::Rational) -> Self {
        ConservationLaw { kind: self.kind, components: self.components.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn display(&self, space: &JetSpace) -> Vec<String> {
        self.components.iter().map(|e| e.to_string_in(space)).collect()
    }
}

pub(crate) fn check_gauge_len(gauge: &[Expr], space: &JetSpace) -> Result<()> {
    if gauge.len() != space.n_independents() {
        return Err(Error::GaugeDimension { expected: space.n_independents(), got: gauge.len() });
    }
    Ok(())
}
