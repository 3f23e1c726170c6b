//! Spectral analysis and nonlinear simulation of two delay-coupled modes with
//! anti-PT symmetry.

pub mod special;
pub mod dde;
pub mod spectral;
pub mod models;
pub mod analysis;
pub mod cli;
