//! Simulation of atom-optics kicked-rotor ratchets.
//!
//! Matter-wave states live on a momentum ladder `p = n + beta` and are
//! driven by standing-wave kicks `e^{-i phi_d cos(theta + gamma)}` separated
//! by free flight. On top of that core sit Bragg-pulse state preparation,
//! ratchet observables, the near-resonance pseudo-classical scaling law and
//! a scenario runner.
//!
//! The `parallel` feature (on by default) runs sweeps on rayon; without it
//! every sweep runs sequentially with identical results.

pub mod bessel;
pub mod epsiclassical;
pub mod error;
pub mod evolve;
pub mod harness;
pub mod observe;
pub mod par;
pub mod prep;
pub mod state;

pub use error::{Error, Result};
pub use evolve::{Engine, KickSchedule, Period};
pub use par::Execution;
pub use state::{Component, LadderState, SpatialProfile};
