//! Verification toolkit for the kinematical symmetries of polytropic Euler flow.
//!
//! The crate implements the twelve-parameter group `SL(2,R) ∧ Galilei`, the
//! Noether currents of its generators, the standard and extended jump
//! conditions across shocks, their images under `SL(2,R)` (the dual
//! conditions), and the entropy admissibility test. An exact Riemann solver and
//! a Godunov finite-volume solver supply ground-truth and numerical data.
//!
//! Conventions:
//! * spatial vectors are stored as [`Vec3`]; only the first `n` components are
//!   used, where `n` is the dimension carried by [`Polytrope`];
//! * in planar and spherically symmetric reductions the velocity and position
//!   live in component 0 (for spherical symmetry this is the radial component);
//! * group elements act "Galilei first, then `SL(2,R)`".

pub mod eos;
pub mod error;
pub mod field;
pub mod fvm;
pub mod group;
pub mod noether;
pub mod riemann;
pub mod shock;

pub use eos::{Conserved, EntropyState, Polytrope, Primitive, Vec3};
pub use error::{Error, Result};
pub use field::{Boundary, Geometry, Grid, Snapshot, SpacetimeField};
pub use group::{GalileiElement, GroupElement, RepresentationMatrix, Sl2Element};
pub use noether::{CurrentFamily, CurrentSample};
pub use riemann::RiemannSolution;
pub use shock::{JumpReport, ShockFront, Verdict};
