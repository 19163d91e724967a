use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::expr::{Expr, Monomial, Rational};
use crate::jet::{evolutionary_form, total_derivative, total_derivative_multi, Generator, JetSpace, MultiIndex};
use crate::linalg::Rref;
use crate::variational::{euler_lagrange, hessian, reduce_mod_el, ELSystem, Lagrangian};

use super::{check_gauge_len, condition_residual, ConservationLaw};

/// Characteristic `Q^i = eta^i - u^i_j xi^j` of a generator.
pub fn characteristic(g: &Generator, space: &JetSpace) -> Result<Vec<Expr>> {
    Ok(evolutionary_form(g, space)?.eta)
}

fn require_symmetry(l: &Lagrangian, g: &Generator, gauge: &[Expr]) -> Result<()> {
    let r = condition_residual(l, g, gauge)?;
    if r.is_zero() {
        Ok(())
    } else {
        Err(Error::NotASymmetry(r.to_string_in(l.space())))
    }
}

/// First integral `I = f - [tau L + sum_k sum_i sum_j (-1)^j D^i(Q_k) D^j(dL/dq_k^(i+j+1))]`
/// of a symmetry of a Lagrangian in one independent variable.
pub fn first_integral(l: &Lagrangian, g: &Generator, f: &Expr) -> Result<ConservationLaw> {
    let space = l.space();
    if !space.is_ode() {
        return Err(Error::Unsupported("first integrals need exactly one independent variable".into()));
    }
    require_symmetry(l, g, std::slice::from_ref(f))?;
    let q = characteristic(g, space)?;
    let p = l.order();
    let mut bracket = &g.xi[0] * l.body();
    for (k, qk) in q.iter().enumerate() {
        let mut dq = qk.clone();
        for i in 0..p {
            for j in 0..p - i {
                let v = space.ode_jet(k, i + j + 1).expect("jet within the Lagrangian order");
                let mut a = l.body().partial(v);
                for _ in 0..j {
                    a = total_derivative(&a, 0, space)?;
                }
                let term = &dq * &a;
                if j % 2 == 0 {
                    bracket += &term;
                } else {
                    bracket -= &term;
                }
            }
            dq = total_derivative(&dq, 0, space)?;
        }
    }
    ConservationLaw::new(vec![f - &bracket], space)
}

/// Flux vector `I_j = F_j - xi^j L - P_j` of a symmetry with flux gauge `F`.
pub fn conservation_vector(l: &Lagrangian, g: &Generator, gauge: &[Expr]) -> Result<ConservationLaw> {
    require_symmetry(l, g, gauge)?;
    conservation_vector_unchecked(l, g, gauge)
}

/// `P` is built by integrating each `D_a(Q) dL/du_a` by parts, peeling the
/// first nonzero index of `a` at every step.
pub(crate) fn conservation_vector_unchecked(l: &Lagrangian, g: &Generator, gauge: &[Expr]) -> Result<ConservationLaw> {
    let space = l.space();
    check_gauge_len(gauge, space)?;
    let q = characteristic(g, space)?;
    let n = space.n_independents();
    let mut comps: Vec<Expr> = (0..n).map(|j| &gauge[j] - &(&g.xi[j] * l.body())).collect();
    let mut dq: HashMap<(usize, MultiIndex), Expr> = HashMap::new();
    for v in l.jets() {
        let (dep, multi) = space.jet_parts(v).expect("jet");
        let mut a = l.body().partial(v);
        if a.is_zero() {
            continue;
        }
        let mut alpha = multi.clone();
        while let Some(j) = alpha.iter().position(|&m| m > 0) {
            alpha[j] -= 1;
            let d = match dq.get(&(dep, alpha.clone())) {
                Some(d) => d.clone(),
                None => {
                    let d = total_derivative_multi(&q[dep], &alpha, space)?;
                    dq.insert((dep, alpha.clone()), d.clone());
                    d
                }
            };
            comps[j] -= &(&d * &a);
            a = -total_derivative(&a, j, space)?;
        }
    }
    ConservationLaw::new(comps, space)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStatus {
    Conserved,
    NotConserved,
    /// The equations of motion could not be solved for a highest derivative.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub status: VerifyStatus,
    /// Divergence (total derivative for one independent variable) before reduction.
    pub divergence: Expr,
    /// Normal form of the divergence, or the raw divergence when indeterminate.
    pub residual: Expr,
    pub note: Option<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.status == VerifyStatus::Conserved
    }

    pub fn failed(&self) -> bool {
        self.status == VerifyStatus::NotConserved
    }
}

/// Reduces `sum_j D_j I_j` modulo the equations of motion.
pub fn verify(law: &ConservationLaw, el: &ELSystem, space: &JetSpace) -> Result<VerifyReport> {
    check_gauge_len(&law.components, space)?;
    let mut divergence = Expr::zero();
    for (j, c) in law.components.iter().enumerate() {
        divergence += &total_derivative(c, j, space)?;
    }
    match reduce_mod_el(&divergence, el, space) {
        Ok(residual) => {
            let status = if residual.is_zero() { VerifyStatus::Conserved } else { VerifyStatus::NotConserved };
            Ok(VerifyReport { status, divergence, residual, note: None })
        }
        Err(Error::ReductionUnavailable(why)) => {
            let status = if divergence.is_zero() { VerifyStatus::Conserved } else { VerifyStatus::Indeterminate };
            Ok(VerifyReport { status, residual: divergence.clone(), divergence, note: Some(why) })
        }
        Err(e) => Err(e),
    }
}

/// Checks `dI/dq'_j = -sum_i (eta_i - q'_i tau) d2L/dq'_i dq'_j` for every `j`.
/// Returns `false` when `(g, f)` is not a symmetry or when `I` is not
/// conserved, since the identity only constrains the velocity gradient.
pub fn hessian_relation_check(l: &Lagrangian, g: &Generator, f: &Expr, integral: &Expr) -> Result<bool> {
    let space = l.space();
    let h = hessian(l)?;
    if g.dependence_order(space) > 1 {
        return Err(Error::Unsupported("the Hessian relation needs generators of dependence order at most 1".into()));
    }
    if !condition_residual(l, g, std::slice::from_ref(f))?.is_zero() {
        return Ok(false);
    }
    let q = characteristic(g, space)?;
    for j in 0..space.n_dependents() {
        let vj = space.ode_jet(j, 1).expect("velocity");
        let lhs = integral.partial(vj);
        let rhs: Expr = q.iter().zip(&h.matrix).map(|(qi, row)| qi * &row[j]).sum();
        if lhs != -rhs {
            return Ok(false);
        }
    }
    let el = euler_lagrange(l)?;
    let law = ConservationLaw::new(vec![integral.clone()], space)?;
    Ok(!verify(&law, &el, space)?.failed())
}

/// Whether `target` is a linear combination of `span` after reduction
/// modulo the equations of motion. Additive constants are ignored.
pub fn in_span_mod_el(
    target: &ConservationLaw,
    span: &[ConservationLaw],
    el: &ELSystem,
    space: &JetSpace,
) -> Result<bool> {
    let mut columns: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let mut to_row = |law: &ConservationLaw| -> Result<Vec<(usize, Rational)>> {
        let mut row = Vec::new();
        for (j, c) in law.components.iter().enumerate() {
            let reduced = reduce_mod_el(c, el, space)?;
            for (m, v) in reduced.terms() {
                if m.is_one() {
                    continue;
                }
                let next = columns.len();
                let col = *columns.entry((j, m.clone())).or_insert(next);
                row.push((col, v.clone()));
            }
        }
        Ok(row)
    };
    let rows: Vec<_> = span.iter().map(&mut to_row).collect::<Result<_>>()?;
    let target_row = sorted(to_row(target)?);
    let mut rref = Rref::new(columns.len());
    for r in rows {
        rref.push(&sorted(r));
    }
    Ok(!rref.push(&target_row))
}

fn sorted(mut row: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    row.sort_by_key(|(c, _)| *c);
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, parse};
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
    fn free_particle_integrals() {
        let l = setup(&["x"], &["y"], 1, "1/2*y'^2");
        let s = l.space();
        let i1 = first_integral(&l, &gen(&l, &["0"], &["1"]), &Expr::zero()).unwrap();
        assert_eq!(i1.components[0], parse("-y'", s).unwrap());
        let f5 = parse("1/2*y^2", s).unwrap();
        let i5 = first_integral(&l, &gen(&l, &["x^2"], &["x*y"]), &f5).unwrap();
        assert_eq!(i5.components[0], parse("1/2*(y - x*y')^2", s).unwrap());
        assert!(matches!(first_integral(&l, &gen(&l, &["0"], &["y"]), &Expr::zero()), Err(Error::NotASymmetry(_))));
    }

    #[test]
    fn higher_order_integrals_match_general_recursion() {
        let l = setup(&["x"], &["y"], 2, "1/2*y''^2");
        let s = l.space();
        let el = euler_lagrange(&l).unwrap();
        let cases = [
            (["0"], ["1"], "0", "y'''"),
            (["0"], ["x"], "0", "x*y''' - y''"),
            (["0"], ["x^2"], "2*y'", "x^2*y''' - 2*x*y'' + 2*y'"),
            (["0"], ["x^3"], "6*x*y' - 6*y", "x^3*y''' - 3*x^2*y'' + 6*x*y' - 6*y"),
        ];
        for (xi, eta, f, want) in cases {
            let g = gen(&l, &xi, &eta);
            let f = parse(f, s).unwrap();
            let a = first_integral(&l, &g, &f).unwrap();
            let b = conservation_vector(&l, &g, std::slice::from_ref(&f)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.components[0], parse(want, s).unwrap());
            assert!(verify(&a, &el, s).unwrap().passed());
        }
    }

    #[test]
    fn pde_vectors() {
        let l = setup(&["t", "x"], &["u"], 1, "1/12*u_x^4 + 1/2*u_t^2");
        let s = l.space();
        let el = euler_lagrange(&l).unwrap();
        let z = [Expr::zero(), Expr::zero()];
        let i4 = conservation_vector(&l, &gen(&l, &["0", "0"], &["t"]), &[parse("u", s).unwrap(), Expr::zero()]).unwrap();
        assert_eq!(i4.display(s), ["-t*u_t + u", "-1/3*t*u_x^3"]);
        assert!(verify(&i4, &el, s).unwrap().passed());
        let i1 = conservation_vector(&l, &gen(&l, &["1", "0"], &["0"]), &z).unwrap();
        assert_eq!(i1.components, vec![parse("1/2*u_t^2 - 1/12*u_x^4", s).unwrap(), parse("1/3*u_t*u_x^3", s).unwrap()]);
        assert!(verify(&i1, &el, s).unwrap().passed());
    }

    #[test]
    fn verify_examples() {
        let l = setup(&["x"], &["y"], 1, "1/2*y'^2");
        let s = l.space();
        let el = euler_lagrange(&l).unwrap();
        let law = |t: &str| ConservationLaw::new(vec![parse(t, s).unwrap()], s).unwrap();
        let ok = verify(&law("1/2*y'^2"), &el, s).unwrap();
        assert!(ok.passed() && ok.residual.is_zero());
        let bad = verify(&law("y"), &el, s).unwrap();
        assert_eq!(bad.status, VerifyStatus::NotConserved);
        assert_eq!(bad.residual, parse("y'", s).unwrap());
    }

    #[test]
    fn unsolvable_equations_are_indeterminate() {
        let l = setup(&["x"], &["y"], 1, "1/2*y*y'^2");
        let s = l.space();
        let el = euler_lagrange(&l).unwrap();
        let r = verify(&ConservationLaw::new(vec![parse("y", s).unwrap()], s).unwrap(), &el, s).unwrap();
        assert_eq!(r.status, VerifyStatus::Indeterminate);
        assert_eq!(r.residual, parse("y'", s).unwrap());
    }

    #[test]
    fn hessian_relation_examples() {
        let l = setup(&["x"], &["y"], 1, "1/2*y'^2");
        let s = l.space();
        let g2 = gen(&l, &["0"], &["x"]);
        let f2 = parse("y", s).unwrap();
        assert!(hessian_relation_check(&l, &g2, &f2, &parse("y - x*y'", s).unwrap()).unwrap());
        let g3 = gen(&l, &["1"], &["0"]);
        assert!(hessian_relation_check(&l, &g3, &Expr::zero(), &parse("1/2*y'^2", s).unwrap()).unwrap());
        assert!(!hessian_relation_check(&l, &g3, &Expr::zero(), &parse("1/2*y'^2 + y", s).unwrap()).unwrap());
        assert!(!hessian_relation_check(&l, &g3, &Expr::zero(), &parse("1/2*y'^2 + y*y'", s).unwrap()).unwrap());
        assert!(!hessian_relation_check(&l, &gen(&l, &["0"], &["y"]), &Expr::zero(), &Expr::zero()).unwrap());
    }

    #[test]
    fn span_membership() {
        let l = setup(&["x"], &["y"], 1, "1/2*y'^2");
        let s = l.space();
        let el = euler_lagrange(&l).unwrap();
        let law = |t: &str| ConservationLaw::new(vec![parse(t, s).unwrap()], s).unwrap();
        let span = [law("y'"), law("y - x*y'")];
        assert!(in_span_mod_el(&law("2*y + 3*y' - 2*x*y' + 7"), &span, &el, s).unwrap());
        assert!(in_span_mod_el(&law("y' + x*y''"), &span, &el, s).unwrap());
        assert!(!in_span_mod_el(&law("y'^2"), &span, &el, s).unwrap());
        assert_eq!(law("y'").scale(&int(2)), law("2*y'"));
    }
}
