//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use noether_core::jet::jet_order;
use noether_core::{parse, JetSpace, Lagrangian};

/// Builds a Lagrangian over a space with headroom for generalized coefficients.
pub fn lagrangian(indep: &[&str], dep: &[&str], body: &str) -> Lagrangian {
    let probe = JetSpace::new(indep, dep, 8).expect("valid names");
    let order = jet_order(&parse(body, &probe).expect("valid body"), &probe);
    let space = Arc::new(JetSpace::for_lagrangian(indep, dep, order, order).expect("valid names"));
    let e = parse(body, &space).expect("valid body");
    Lagrangian::new(space, e).expect("valid Lagrangian")
}

/// Named benchmark problems.
pub fn corpus() -> Vec<(&'static str, Lagrangian)> {
    vec![
        ("free_particle", lagrangian(&["x"], &["y"], "1/2*y'^2")),
        ("beam", lagrangian(&["x"], &["y"], "1/2*y''^2")),
        ("planar_particle", lagrangian(&["t"], &["x", "y"], "1/2*x'^2 + 1/2*y'^2")),
        ("oscillator", lagrangian(&["t"], &["q"], "1/2*q'^2 - 1/2*q^2")),
        ("wave", lagrangian(&["t", "x"], &["u"], "1/12*u_x^4 + 1/2*u_t^2")),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn corpus_builds() {
        assert_eq!(super::corpus().len(), 5);
    }
}
