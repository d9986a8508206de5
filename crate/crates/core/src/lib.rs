//! Tropical and ultradiscrete two-variable Oregonator.
//!
//! The crate follows the chain continuous model → tropical difference
//! scheme → max-plus lattice map → binary cellular automaton, plus the
//! zero-dimensional (diffusion-free) max-plus map and its attractors.
//!
//! * [`grid`]: lattices, boundaries and the five-point mean/max stencils.
//! * [`tropical`]: positivity-preserving schemes and consistency studies.
//! * [`ultradiscrete`]: max-plus maps with finite and infinite `E`.
//! * [`automaton`]: the binary automaton, pattern seeds and their checks.
//! * [`zerodim`]: the second-order scalar map, equilibria and attractors.
//! * [`verify`]: property suites shared by the command line tool and tests.

pub mod error;
pub mod grid;
pub mod maxplus;
pub mod reference;
pub mod tropical;
pub mod ultradiscrete;
pub mod automaton;
pub mod zerodim;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{field_sum, max5, mean5, Boundary, Field2D, IntField2D, RealField2D, INT_GUARD};
pub use maxplus::ExtInt;
