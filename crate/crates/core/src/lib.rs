//! Computing in rearrangement-invariant function spaces on `[0,1]`.
//!
//! The crate provides a closed symbolic-numeric algebra of nonnegative
//! functions ([`FunctionExpr`]), decreasing rearrangements and
//! distribution functions, Lorentz and Marcinkiewicz norms over a catalog
//! of quasi-concave fundamental functions, the Cesaro averaging operator
//! and its Copson dual, the vector measure induced by averaging
//! indicators together with its variation, and a set of executable
//! certificates that check the concrete identities tying all of these
//! together.
//!
//! Numeric outcomes are always reported as [`ExtReal`]: a finite value
//! with a certified error bound, a certified divergence, or an explicit
//! `Unknown` with the reason the computation could not decide.

pub mod cesaro;
pub mod error;
pub mod expr;
pub mod ext_real;
pub mod par;
pub mod phi;
pub mod quad;
pub mod spaces;

mod dist;
mod integrate;

pub use error::Error;
pub use expr::{EndBehavior, Endpoint, FunctionExpr, Monotone, Tri};
pub use ext_real::ExtReal;
pub use phi::{dilation_indices, validate_phi, DilationIndices, PhiReport, QuasiConcave};
pub use quad::QuadOpts;
pub use spaces::{Associate, RiSpace};

pub use dist::{graded_grid, graded_grid_two_sided, REARRANGE_CELLS, REARRANGE_T_MIN};
