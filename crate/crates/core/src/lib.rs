//! Noether symmetries, gauge functions, first integrals and conservation-law
//! fluxes for polynomial Lagrangians.
//!
//! The pipeline is:
//!
//! 1. [`expr`]: exact polynomial arithmetic over jet variables.
//! 2. [`jet`]: total derivatives and prolongation of generators.
//! 3. [`variational`]: Euler-Lagrange equations and reduction on shell.
//! 4. [`noether`]: the invariance condition, determining equations, their
//!    exact nullspace, and the induced conservation laws.
//! 5. [`numeric`]: floating-point drift checks along integrated trajectories.
//!
//! ```
//! use std::sync::Arc;
//! use noether_core::{parse, Ansatz, JetSpace, Lagrangian};
//!
//! let space = Arc::new(JetSpace::for_lagrangian(&["x"], &["y"], 1, 0).unwrap());
//! let l = Lagrangian::new(space.clone(), parse("1/2*y'^2", &space).unwrap()).unwrap();
//! let solutions = noether_core::noether_symmetries(&l, &Ansatz::point(&l)).unwrap();
//! assert_eq!(solutions.len(), 5);
//! ```

pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod noether;
pub mod numeric;
pub mod variational;

pub use error::{Error, Result};
pub use expr::{combine, int, parse, rat, BinOp, Expr, Monomial, Rational};
pub use jet::{evolutionary_form, total_derivative, Generator, JetSpace, VarId, VarKind};
pub use noether::{
    condition_residual, conservation_vector, determining_system, find_gauge, first_integral,
    hessian_relation_check, in_span_mod_el, noether_symmetries, solve, verify, verify_candidate, Ansatz,
    CandidateOutcome, ConservationLaw, DeterminingSystem, LawKind, NoetherSolution, VerifyReport, VerifyStatus,
};
pub use variational::{euler_lagrange, hessian, reduce_mod_el, ELSystem, Hessian, Lagrangian};
