use crate::error::Result;
use crate::expr::Expr;
use crate::jet::{total_derivative, Generator, Prolongation};
use crate::variational::Lagrangian;

use super::check_gauge_len;

/// `pr g (L) + L * Div xi - Div F`, zero exactly when `(g, F)` is a Noether
/// symmetry. The equations of motion play no part.
pub fn condition_residual(l: &Lagrangian, g: &Generator, gauge: &[Expr]) -> Result<Expr> {
    let space = l.space();
    check_gauge_len(gauge, space)?;
    let body = l.body();
    let mut pr = Prolongation::new(g, space);
    let mut out = Expr::zero();
    for v in l.jets() {
        let dl = body.partial(v);
        if dl.is_zero() {
            continue;
        }
        let (dep, multi) = space.jet_parts(v).expect("jet");
        let zeta = pr.at(dep, &multi.clone())?;
        out += &(&zeta * &dl);
    }
    for (j, xi) in g.xi.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let dl = body.partial(space.independent(j));
        out += &(xi * &dl);
        out += &(body * &total_derivative(xi, j, space)?);
    }
    for (j, f) in gauge.iter().enumerate() {
        out -= &total_derivative(f, j, space)?;
    }
    Ok(out)
}
