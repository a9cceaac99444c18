//! Truncated Fock-space simulation of a dissipative optical cavity containing
//! a Kerr medium.
//!
//! The master equation
//!
//! ```text
//! dρ/dt = -iχ[(a†a)², ρ] + γ(2aρa† - a†aρ - ρa†a)
//! ```
//!
//! admits a closed-form operator-sum solution whose coefficients are built
//! from the complex dissipation factors Λ_{m,n}. This crate implements that
//! analytic channel ([`channel`]) together with two independent reference
//! solvers ([`solvers`]): a fixed-step RK4 integrator of the master equation
//! and a matrix-exponential propagator for the vectorized Liouvillian.
//! Scalar diagnostics and Husimi-Q grids live in [`observables`]; the batch
//! CLI driver is built from [`config`] and [`runner`].

pub mod channel;
pub mod config;
pub mod eigen;
pub mod expm;
pub mod fock;
pub mod linalg;
pub mod observables;
pub mod runner;
pub mod solvers;

mod error;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
