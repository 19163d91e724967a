//! Library side of the `noether` command: problem files and reports.

pub mod problem;
pub mod run;

pub use problem::{Flags, InputError, Problem, ProblemSpec};
pub use run::{run_file, Command, Outcome, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
