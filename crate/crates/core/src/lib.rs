//! Three-dimensional integrated guidance and control (IGC) for skid-to-turn
//! pursuers.
//!
//! The crate couples the pursuit-evasion kinematics in spherical line-of-sight
//! (LOS) coordinates with the pursuer attitude dynamics and closes the loop
//! with a three-stage control law. Each stage is an input-to-state stabilizing
//! (ISS) controller of the form `u = g⁻¹(−f − kx − x/(2δ²))`:
//!
//! 1. angle of attack / sideslip commands that regulate the LOS rate,
//! 2. body-rate commands that track those angles,
//! 3. fin deflections that track the body rates.
//!
//! No derivative of any command is ever formed; the interconnection is
//! justified by the small-gain theorem, and [`analysis`] turns the resulting
//! ISS estimates into executable audits over simulated trajectories.
//!
//! Module map:
//!
//! * [`frames`]: ground / velocity / LOS frame transforms and the projection
//!   matrix `M(t)`.
//! * [`airframe`]: attitude dynamics and aerodynamic accelerations.
//! * [`engagement`]: relative kinematics, evader and disturbance models.
//! * [`igc`]: the composite guidance and control law.
//! * [`analysis`]: ISS bounds, explicit linear gains, small-gain certificate,
//!   trajectory bound audits.
//! * [`sim`]: fixed-step RK4 closed-loop simulation and gain sweeps.
//! * [`cli`]: scenario files, CSV logs and the `run` / `sweep` /
//!   `check-gains` commands.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod airframe;
pub mod analysis;
pub mod cli;
pub mod engagement;
pub mod error;
pub mod frames;
pub mod igc;
pub mod linalg;
pub mod sim;

pub use error::{ModelError, Stage};
