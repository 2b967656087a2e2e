//! Numerical laboratory for warped-product steady solitons and the
//! isoperimetric inequality on them.
//!
//! The crate builds the two-dimensional cigar model and the rotationally
//! symmetric n >= 3 soliton from its phase-plane ODE, verifies the soliton
//! identities and the admissibility condition 0 <= (phi')^2 - phi'' phi <= K,
//! constructs isoperimetric profiles, evolves radial graphs by the
//! volume-preserving curvature-type flow, and batch-checks the inequality
//! Area >= xi(Volume) on random and curated graphs.

pub mod bryant;
pub mod error;
pub mod experiments;
pub mod fiber;
pub mod flow;
pub mod interp;
pub mod ode;
pub mod profile;
pub mod quad;
pub mod warp;

pub use error::{Error, Result};
pub use warp::{WarpEval, WarpKind, WarpModel};
