//! Relaxed Lagrangian duals of linear semi-infinite programs.
//!
//! A problem here is `inf c'x` subject to `a(t)'x <= b(t)` for every index
//! `t` in an index set `T` (an interval, the naturals, or an explicit finite
//! list). Instead of the classical dual over all finitely supported
//! multipliers, this crate evaluates the dual restricted to a *family* of
//! finite index subsets: singletons, prefixes of a countable ordering, or
//! every finite subset of the sample. Restricting the family can only lower
//! the dual value, which makes the family sup a certified lower bound on the
//! primal infimum.
//!
//! The crate is organised as:
//!
//! * [`model`]: problem data (polynomial constraint generators, index
//!   families).
//! * [`lp`]: a dense two-phase simplex, a brute-force vertex oracle, and
//!   polyhedral cone probes built on top of the solver.
//! * [`duals`]: finite subproblems, family dual values, and the named
//!   strategy registry behind the CLI's `--family` switch.
//! * [`certificates`]: Farkas and optimality certificate verification.
//! * [`conditions`]: sampled checks of the reverse-strong-duality conditions
//!   (Slater point, recession-cone subspace tests, pointed-cone half-line
//!   test, objective sign on recession directions).
//! * [`oracle`]: independent ground truth (dense grid values, a Farkas
//!   certificate oracle, seeded random instances).
//! * [`io`]: the JSON problem/certificate file formats.
//!
//! Every verdict that depends on sampling an infinite index set is relative
//! to the sample; reports say so explicitly.

pub mod certificates;
pub mod conditions;
pub mod duals;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;

mod error;

pub use error::Error;
pub use lp::{DenseLP, ExtendedReal, LPOutcome};
pub use model::{ConstraintGenerator, IndexFamily, IndexValue, LinearSIP, ScalarPoly};
