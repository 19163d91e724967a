use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{total_derivative, Generator, JetSpace, MultiIndex, VarId};

/// Memoised prolongation coefficients of one generator.
///
/// Uses the recursion `eta_{J+k} = D_k eta_J - sum_l u_{J+l} D_k xi^l`,
/// peeling the first nonzero index of the target multi-index.
pub struct Prolongation<'a> {
    g: &'a Generator,
    space: &'a JetSpace,
    memo: HashMap<(usize, MultiIndex), Expr>,
    dxi: HashMap<(usize, usize), Expr>,
}

impl<'a> Prolongation<'a> {
    pub fn new(g: &'a Generator, space: &'a JetSpace) -> Self {
        Prolongation { g, space, memo: HashMap::new(), dxi: HashMap::new() }
    }

    /// `D_k xi^l`.
    fn dxi(&mut self, k: usize, l: usize) -> Result<Expr> {
        if let Some(e) = self.dxi.get(&(k, l)) {
            return Ok(e.clone());
        }
        let e = total_derivative(&self.g.xi[l], k, self.space)?;
        self.dxi.insert((k, l), e.clone());
        Ok(e)
    }

    /// Coefficient of `d/du^dep_multi` in the prolonged generator.
    pub fn at(&mut self, dep: usize, multi: &[u32]) -> Result<Expr> {
        let key = (dep, MultiIndex::from_slice(multi));
        if let Some(e) = self.memo.get(&key) {
            return Ok(e.clone());
        }
        let Some(k) = multi.iter().position(|&m| m > 0) else {
            return Ok(self.g.eta[dep].clone());
        };
        let mut lower = MultiIndex::from_slice(multi);
        lower[k] -= 1;
        let prev = self.at(dep, &lower)?;
        let mut out = total_derivative(&prev, k, self.space)?;
        for l in 0..self.space.n_independents() {
            let d = self.dxi(k, l)?;
            if d.is_zero() {
                continue;
            }
            let mut raised = lower.clone();
            raised[l] += 1;
            let order: u32 = raised.iter().sum();
            let u = self
                .space
                .jet(dep, &raised)
                .ok_or(Error::HeadroomExhausted { needed: order, max: self.space.max_order() })?;
            out -= &(&Expr::var(u) * &d);
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// Prolongation coefficient for an arbitrary jet coordinate.
pub fn prolong(g: &Generator, target: VarId, space: &JetSpace) -> Result<Expr> {
    let (dep, multi) = space
        .jet_parts(target)
        .ok_or_else(|| Error::InvalidSpace(format!("`{}` is not a jet coordinate", space.name(target))))?;
    Prolongation::new(g, space).at(dep, multi)
}

/// `zeta^j` for dependent `dep` of a one-independent-variable problem.
pub fn prolong_ode(g: &Generator, dep: usize, j: u32, space: &JetSpace) -> Result<Expr> {
    if !space.is_ode() {
        return Err(Error::Unsupported("prolong_ode needs exactly one independent variable".into()));
    }
    Prolongation::new(g, space).at(dep, &[j])
}

/// Closed form `zeta^j = eta^(j) - sum_{k=1}^{j} C(j,k) q^(j+1-k) tau^(k)`,
/// kept as an independent route to check [`prolong_ode`].
pub fn prolong_ode_binomial(g: &Generator, dep: usize, j: u32, space: &JetSpace) -> Result<Expr> {
    if !space.is_ode() {
        return Err(Error::Unsupported("prolong_ode_binomial needs exactly one independent variable".into()));
    }
    let mut eta_d = g.eta[dep].clone();
    for _ in 0..j {
        eta_d = total_derivative(&eta_d, 0, space)?;
    }
    let mut tau_d = g.xi[0].clone();
    let mut binom = BigInt::from(1);
    for k in 1..=j {
        tau_d = total_derivative(&tau_d, 0, space)?;
        binom = binom * BigInt::from(j - k + 1) / BigInt::from(k);
        let q = space
            .ode_jet(dep, j + 1 - k)
            .ok_or(Error::HeadroomExhausted { needed: j + 1 - k, max: space.max_order() })?;
        let term = (&Expr::var(q) * &tau_d).scale(&BigRational::from_integer(binom.clone()));
        eta_d -= &term;
    }
    Ok(eta_d)
}

/// Extension coefficient at a jet coordinate of order at least one.
pub fn prolong_pde(g: &Generator, target: VarId, space: &JetSpace) -> Result<Expr> {
    if space.order(target) < 1 {
        return Err(Error::InvalidSpace(format!("`{}` is not a derivative coordinate", space.name(target))));
    }
    prolong(g, target, space)
}
