//! Directional excitable systems.
//!
//! An n-dimensional gradient system `τẋ = −∇V(‖x‖, x_s) + αu` with slow
//! adaptation `τ_s ẋ_s = −x_s + g(‖x‖)` spikes along the direction of its
//! input. Its norm obeys a planar system driven by `ũ = cos(x, u)‖u‖`, which
//! the [`analysis`] module studies in the phase plane. [`navigation`] drives a
//! point robot with an all-or-none actuator from such a controller.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod io;
pub mod model;
pub mod navigation;
pub mod roots;
pub mod simulate;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use model::{FullState, ModelParams};
pub use simulate::{FullTrajectory, ReducedState, ReducedTrajectory, SpikeDetector, SpikeTrain, Trajectory};
pub use vector::StateVec;
