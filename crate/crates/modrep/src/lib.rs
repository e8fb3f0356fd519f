//! Word algebra, twisted actions and induced representations over the
//! free product `G = Z2 * Z3 = <a, b | a^2 = b^3 = 1>`.
//!
//! The kernel `H` of the canonical map `p: G -> K = Z2 x Z3` is free on
//! `x1 = a b a b^2` and `x2 = a b^2 a b`. Conjugation by the section
//! `n(i, j) = a^i b^j` equips the group algebra of `H` with a twisted
//! `K`-action `(alpha, u)`, and every unitary pair `(V1, V2)` on `C^d`
//! induces a representation of the associated twisted system on
//! `l^2(K) (x) C^d ~ C^(6d)`.
//!
//! The crate is organized bottom-up:
//!
//! - [`words`]: exact normal-form arithmetic in `G`, `K` and `F2`.
//! - [`rewrite`]: kernel membership, rewriting into the free generators,
//!   and the twisted-action table.
//! - [`twisted`]: the `l^1`-style twisted convolution algebra with exact
//!   Gaussian-rational coefficients, plus the twisted-action axiom checker.
//! - [`rep`]: finite-dimensional unitary models of the free group and
//!   spectral equivalence tests.
//! - [`induced`]: the covariant pair, induced representation and the
//!   intertwiner/commutant solver.
//! - [`freepoint`]: forbidden-set enumeration and free-point selection on
//!   the circle.
//! - [`report`] and [`cli`]: machine-readable reports and the command-line
//!   driver.

pub mod cli;
pub mod freepoint;
pub mod induced;
pub mod linalg;
pub mod rep;
pub mod report;
pub mod rewrite;
pub mod twisted;
pub mod words;

pub use rewrite::TwistedActionTable;
pub use words::{FWord, GWord, KElem};
