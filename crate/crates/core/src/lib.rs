//! Phase-plane analysis of gradient Yamabe solitons on warped products
//! `R x_phi N`.
//!
//! The soliton equation reduces to an Abel equation of the second kind,
//! `w w'(z) + w = Phi(z)`, and hence to the planar system `z' = w`,
//! `w' = Phi(z) - w`. This crate provides the reduction and its charts
//! ([`params`]), the vector fields and the curves used to trap trajectories
//! ([`dynsys`]), an adaptive Dormand-Prince integrator with event location
//! ([`integrate`]), series seeds at the singular ends together with the
//! completeness test ([`asymptotics`]), and the top-level procedures that
//! produce soliton certificates ([`solitons`]).
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;
mod poly;
mod rk;

pub mod asymptotics;
pub mod dynsys;
pub mod integrate;
pub mod params;
pub mod solitons;

pub use error::{Error, Result};
pub use params::{make_params, Chart, ChartPoint, PhasePoint, Regime, SolitonParams};
