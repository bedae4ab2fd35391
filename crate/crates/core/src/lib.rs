//! Binary (0/1) solutions of overdetermined linear systems `A x = b`.
//!
//! The main entry point is [`solver::dpbb_solve`], a single sweep over the
//! variables that decides each bit by fitting the remaining columns in the
//! least-squares sense for both branches and keeping the branch with the
//! smaller residual. Alongside it are an exhaustive reference
//! ([`oracle`]), a round-the-real-solution baseline ([`baseline`]), problem
//! generators ([`generator`]) and a seeded comparison harness ([`bench`]).
//!
//! ```
//! use dpbb::generator::{generate, Family, GeneratorSpec};
//! use dpbb::linalg::Tolerances;
//! use dpbb::solver::dpbb_solve;
//!
//! let g = generate(&GeneratorSpec::preset(Family::Paper1)).unwrap();
//! let r = dpbb_solve(&g.problem, &Tolerances::default()).unwrap();
//! assert_eq!(r.x, vec![1, 0, 1]);
//! ```

pub mod baseline;
pub mod bench;
pub mod cli;
pub mod error;
pub mod generator;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod solver;
pub mod trace;

pub use error::{Error, Result};
