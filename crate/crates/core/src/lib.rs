//! Solver and verifier for x^2 + 2^a 3^b 11^c = y^n with gcd(x, y) = 1 and
//! n >= 3.
//!
//! - [`arith`]: exact S-unit and integer primitives
//! - [`model`]: solutions, verification, descent on n, the mod-8 constraint
//! - [`oracle`]: exhaustive bounded enumeration, the ground truth for tables
//! - [`elliptic`]: cubic and quartic models and their S-integral points
//! - [`lucas`]: quadratic fields, Lucas sequences and the p = 5 case analysis
//! - [`report`]: table ingestion, commands and JSON run reports

pub mod arith;
pub mod elliptic;
pub mod lucas;
pub mod model;
pub mod oracle;
pub mod report;

pub use arith::SUnitExponents;
pub use model::{check_solution, Solution, Verdict};
