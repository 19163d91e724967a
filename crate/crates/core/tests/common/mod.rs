#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use noether_core::jet::jet_order;
use noether_core::linalg::{solve_particular, SparseRow};
use noether_core::{parse, Expr, Generator, JetSpace, Lagrangian, Monomial, Rational, VarId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Lagrangian over a space with headroom for generalized coefficients up to
/// the Lagrangian order.
pub fn lagrangian(indep: &[&str], dep: &[&str], body: &str) -> Lagrangian {
    let probe = JetSpace::new(indep, dep, 8).unwrap();
    let order = jet_order(&parse(body, &probe).unwrap(), &probe);
    let space = Arc::new(JetSpace::for_lagrangian(indep, dep, order, order).unwrap());
    let e = parse(body, &space).unwrap();
    Lagrangian::new(space, e).unwrap()
}

pub fn free_particle() -> Lagrangian {
    lagrangian(&["x"], &["y"], "1/2*y'^2")
}

pub fn beam() -> Lagrangian {
    lagrangian(&["x"], &["y"], "1/2*y''^2")
}

pub fn planar_particle() -> Lagrangian {
    lagrangian(&["t"], &["x", "y"], "1/2*x'^2 + 1/2*y'^2")
}

pub fn oscillator() -> Lagrangian {
    lagrangian(&["t"], &["q"], "1/2*q'^2 - 1/2*q^2")
}

pub fn wave() -> Lagrangian {
    lagrangian(&["t", "x"], &["u"], "1/12*u_x^4 + 1/2*u_t^2")
}

/// First-order corpus with one independent variable.
pub fn first_order_corpus() -> Vec<Lagrangian> {
    vec![free_particle(), planar_particle(), oscillator()]
}

pub fn e(l: &Lagrangian, text: &str) -> Expr {
    parse(text, l.space()).unwrap()
}

pub fn gen(l: &Lagrangian, xi: &[&str], eta: &[&str]) -> Generator {
    let s = l.space();
    let p = |t: &&str| parse(t, s).unwrap();
    Generator::new(xi.iter().map(p).collect(), eta.iter().map(p).collect(), s).unwrap()
}

/// Coefficients `c` with `sum_k c_k basis[k] == target`, slot by slot.
pub fn express_in_basis(target: &[Expr], basis: &[Vec<Expr>]) -> Option<Vec<Rational>> {
    let mut cols: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let mut index = |slot: usize, m: &Monomial| {
        let next = cols.len();
        *cols.entry((slot, m.clone())).or_insert(next)
    };
    let mut entries: Vec<Vec<(usize, Rational)>> = Vec::new();
    for (k, b) in basis.iter().enumerate() {
        for (slot, ex) in b.iter().enumerate() {
            for (m, c) in ex.terms() {
                let r = index(slot, m);
                if entries.len() <= r {
                    entries.resize(r + 1, Vec::new());
                }
                entries[r].push((k, c.clone()));
            }
        }
    }
    let mut rhs = vec![Rational::from_integer(0.into()); entries.len()];
    for (slot, ex) in target.iter().enumerate() {
        for (m, c) in ex.terms() {
            let r = index(slot, m);
            if entries.len() <= r {
                entries.resize(r + 1, Vec::new());
                rhs.resize(r + 1, Rational::from_integer(0.into()));
            }
            rhs[r] = c.clone();
        }
    }
    let rows: Vec<SparseRow> = entries;
    solve_particular(basis.len(), &rows, &rhs)
}

pub fn combine(coeffs: &[Rational], items: &[Vec<Expr>]) -> Vec<Expr> {
    let n = items.first().map_or(0, Vec::len);
    (0..n).map(|slot| coeffs.iter().zip(items).map(|(c, it)| it[slot].scale(c)).sum()).collect()
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into())
}

/// Random polynomial with up to `terms` terms, exponents below `max_exp`.
pub fn random_expr(rng: &mut ChaCha8Rng, vars: &[VarId], terms: usize, max_exp: u32) -> Expr {
    let n = rng.gen_range(0..=terms);
    Expr::from_terms((0..n).map(|_| {
        let m = Monomial::from_exponents(vars.iter().map(|&v| (v, rng.gen_range(0..max_exp))));
        (m, small_rational(rng))
    }))
}
