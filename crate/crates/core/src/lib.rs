//! Solver library for a one-dimensional parabolic equation with an
//! exponential memory term, posed on a strip with Dirichlet data.
//!
//! The linear problem is solved in closed form through its fundamental
//! solution and the method of images; semilinear problems go through Picard
//! iteration on the same integral representation. Independent
//! finite-difference and Laplace-transform oracles live in [`oracles`] and
//! back every closed-form path. The [`esjj`] module carries the change of
//! variables connecting the memory equation to the third-order equation of
//! an exponentially tapered Josephson junction, together with residual
//! checks that make the equivalence testable.

pub mod error;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use quad::QuadratureConfig;
pub use special::BesselAccuracy;
