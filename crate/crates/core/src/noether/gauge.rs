use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{total_derivative, Generator};
use crate::linalg::{to_sparse, Rref};
use crate::variational::{euler_lagrange, Lagrangian};

use super::laws::{conservation_vector_unchecked, verify, VerifyReport};
use super::system::{dependence_vars, instantiate, linear_rows, monomials, polynomial_template};
use super::{condition_residual, Ansatz, ConservationLaw};

/// Searches the gauge ansatz of `a` for `F` with `condition_residual(g, F) = 0`.
///
/// Solves `lambda * R - Div F = 0`, where `R` is the residual without gauge,
/// and accepts a solution with `lambda = 1`. The returned gauge has its pure
/// gauge part (constants, divergence-free fluxes) reduced away.
pub fn find_gauge(l: &Lagrangian, g: &Generator, a: &Ansatz) -> Result<Option<Vec<Expr>>> {
    let space = l.space();
    let n = space.n_independents();
    if let Some(v) = g.coefficients().flat_map(|e| e.vars()).find(|&v| space.is_param(v)) {
        return Err(Error::InvalidAnsatz(format!("generator contains the parameter `{}`", space.name(v))));
    }
    let r0 = condition_residual(l, g, &vec![Expr::zero(); n])?;
    if r0.is_zero() {
        return Ok(Some(vec![Expr::zero(); n]));
    }
    if !a.include_gauge {
        return Ok(None);
    }
    let monos = monomials(&dependence_vars(space, a.gauge_jet_order), a.gauge_degree);
    let mut next = 1;
    let gauge: Vec<Expr> = (0..n).map(|_| polynomial_template(&monos, &mut next, space)).collect();
    let mut system = &Expr::var(space.param(0)) * &r0;
    for (j, f) in gauge.iter().enumerate() {
        system -= &total_derivative(f, j, space)?;
    }
    let rows = linear_rows(&system, space)?;
    let null = Rref::from_rows(next, &rows).nullspace();
    let basis: Vec<_> = null.iter().map(|v| to_sparse(v)).collect();
    let rref = Rref::from_rows(next, &basis);
    let Some(row) = rref.rows().into_iter().find(|r| !r[0].is_zero()) else {
        return Ok(None);
    };
    Ok(Some(gauge.iter().map(|f| instantiate(f, &row, space)).collect()))
}

/// Result of checking a supplied generator.
#[derive(Debug, Clone)]
pub enum CandidateOutcome {
    Symmetry { gauge: Vec<Expr>, law: ConservationLaw, verification: VerifyReport },
    /// The supplied gauge leaves this residual.
    NotASymmetry { residual: Expr },
    /// No gauge in the local polynomial ansatz works; `residual` is the
    /// condition residual without gauge.
    NoLocalGauge { residual: Expr },
}

impl CandidateOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CandidateOutcome::Symmetry { verification, .. } if !verification.failed())
    }
}

/// Verification mode: checks `g` with the supplied gauge, or searches for a
/// gauge when none is given, then synthesizes and verifies the law.
pub fn verify_candidate(l: &Lagrangian, g: &Generator, gauge: Option<&[Expr]>, a: &Ansatz) -> Result<CandidateOutcome> {
    let space = l.space();
    let gauge = match gauge {
        Some(f) => {
            let residual = condition_residual(l, g, f)?;
            if !residual.is_zero() {
                return Ok(CandidateOutcome::NotASymmetry { residual });
            }
            f.to_vec()
        }
        None => match find_gauge(l, g, a)? {
            Some(f) => f,
            None => {
                let residual = condition_residual(l, g, &vec![Expr::zero(); space.n_independents()])?;
                return Ok(CandidateOutcome::NoLocalGauge { residual });
            }
        },
    };
    let law = conservation_vector_unchecked(l, g, &gauge)?;
    let verification = verify(&law, &euler_lagrange(l)?, space)?;
    Ok(CandidateOutcome::Symmetry { gauge, law, verification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jet::JetSpace;
    use std::sync::Arc;

    fn setup(indep: &[&str], dep: &[&str], order: u32, body: &str) -> Lagrangian {
        let s = Arc::new(JetSpace::for_lagrangian(indep, dep, order, 0).unwrap());
        let e = parse(body, &s).unwrap();
        Lagrangian::new(s, e).unwrap()
    }

    fn gen(l: &Lagrangian, xi: &[&str], eta: &[&str]) -> Generator {
        let s = l.space();
        let p = |t: &&str| parse(t, s).unwrap();
        Generator::new(xi.iter().map(p).collect(), eta.iter().map(p).collect(), s).unwrap()
    }

    #[test]
    fn ode_gauges() {
        let l = setup(&["x"], &["y"], 1, "1/2*y'^2");
        let a = Ansatz::point(&l);
        let f = find_gauge(&l, &gen(&l, &["x^2"], &["x*y"]), &a).unwrap().unwrap();
        assert_eq!(f, vec![parse("1/2*y^2", l.space()).unwrap()]);
        assert_eq!(find_gauge(&l, &gen(&l, &["0"], &["y"]), &a).unwrap(), None);
    }

    #[test]
    fn pde_gauges() {
        let l = setup(&["t", "x"], &["u"], 1, "1/12*u_x^4 + 1/2*u_t^2");
        let s = l.space();
        let a = Ansatz::point(&l);
        let f = find_gauge(&l, &gen(&l, &["0", "0"], &["t"]), &a).unwrap().unwrap();
        assert_eq!(f, vec![parse("u", s).unwrap(), Expr::zero()]);
        for (xi, eta) in [(["t", "0"], ["-u"]), (["0", "x"], ["2*u"])] {
            let out = verify_candidate(&l, &gen(&l, &xi, &eta), None, &a).unwrap();
            assert!(matches!(out, CandidateOutcome::NoLocalGauge { .. }));
            let wide = Ansatz { gauge_jet_order: 1, ..a.clone() };
            assert!(find_gauge(&l, &gen(&l, &xi, &eta), &wide).unwrap().is_none());
        }
    }
}
