//! Mesh-free numerical exterior calculus in `R^n`.
//!
//! The library works with differential forms given only as point samplers
//! (closures, parsed expressions, or scattered data clouds) and never builds a
//! mesh.  Its central operation is the *flux derivative*: the exterior
//! derivative of a (k-1)-form recovered as the limit of normalized boundary
//! flux over shrinking k-blocks,
//!
//! ```text
//!   D omega_x(e_q1, .., e_qk)  ~  1/vol(B) * integral over boundary(B) of omega
//! ```
//!
//! which at the smallest stencil reduces to centered differences of the form's
//! components at the 2n face centers of an axis-aligned cube.  On top of that
//! sit integration of forms over chains of singular blocks, a Stokes-identity
//! checker, a `D(D omega) = 0` residual, and a mean-value locator that nests
//! trisected sub-blocks around a point where the derivative attains the block
//! average.
//!
//! Module layout mirrors the data flow:
//!
//! * [`multiindex`] - strictly increasing index tuples and their bookkeeping.
//! * [`forms`] - alternating tensors, form fields, the expression grammar and
//!   scattered-data clouds.
//! * [`chains`] - blocks, C^1 singular blocks, integer chains, boundaries.
//! * [`integrate`] - pullback and midpoint quadrature over chains.
//! * [`deriv`] - the flux derivative stencil, Richardson refinement,
//!   convergence-order estimation.
//! * [`verify`] - Stokes residuals, `D^2 = 0`, analytic cross-checks, and the
//!   mean-value locator.

pub mod chains;
pub mod deriv;
mod error;
pub mod forms;
pub mod integrate;
pub mod multiindex;
mod util;
pub mod verify;

pub use error::{Error, Result};
pub use forms::{AlternatingTensor, FormExpression, FormField};
pub use multiindex::MultiIndex;

/// Library version, echoed in CLI reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
