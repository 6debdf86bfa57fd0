//! Numerical laboratory for stationary SU(2) Yang–Mills fields on the
//! Schwarzschild exterior and their linear and nonlinear stability.

pub mod evolution;
pub mod geometry;
pub mod io;
pub mod numerics;
pub mod spectrum;
pub mod stationary;
pub mod verify;
