//! Jet-space bookkeeping, total derivatives and prolongation of generators.

mod generator;
mod prolong;
mod space;

pub use generator::{evolutionary_form, Generator};
pub use prolong::{prolong, prolong_ode, prolong_ode_binomial, prolong_pde, Prolongation};
pub use space::{JetSpace, MultiIndex, VarId, VarKind};

use crate::error::Result;
use crate::expr::{int, Expr, Monomial};

/// Total derivative with respect to independent variable `j`:
/// `D_j e = de/dx_j + sum over jets v of (de/dv) * v_{+j}`.
pub fn total_derivative(e: &Expr, j: usize, space: &JetSpace) -> Result<Expr> {
    let xj = space.independent(j);
    let mut out = Expr::zero();
    for (m, c) in e.terms() {
        for &(v, k) in m.factors() {
            let replacement = if v == xj {
                None
            } else if space.is_jet(v) {
                Some(space.raise(v, j)?)
            } else {
                continue;
            };
            let lowered = Monomial::from_exponents(
                m.factors().iter().map(|&(w, e)| if w == v { (w, e - 1) } else { (w, e) }),
            );
            let raised = match replacement {
                Some(r) => lowered.mul(&Monomial::var(r)),
                None => lowered,
            };
            out += &Expr::term(c * int(k as i64), raised);
        }
    }
    Ok(out)
}

/// Applies `D_{j_1} ... D_{j_k}` for the multi-index `multi`.
pub fn total_derivative_multi(e: &Expr, multi: &[u32], space: &JetSpace) -> Result<Expr> {
    let mut out = e.clone();
    for (j, &k) in multi.iter().enumerate() {
        for _ in 0..k {
            out = total_derivative(&out, j, space)?;
        }
    }
    Ok(out)
}

/// Highest jet order among the variables of `e` (0 if it has none).
pub fn jet_order(e: &Expr, space: &JetSpace) -> u32 {
    e.vars().into_iter().map(|v| space.order(v)).max().unwrap_or(0)
}
