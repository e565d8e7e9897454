//! Sinc differential quadrature solver for the cubic nonlinear Schrödinger
//! equation `i u_t + u_xx + kappa |u|^2 u = 0` on a bounded interval with
//! homogeneous Dirichlet data.
//!
//! Space is discretized with explicit sinc weight matrices
//! ([`weights`]), time with fixed-step explicit Runge-Kutta methods
//! ([`integrator`]). [`spectral`] checks a time step against the frozen
//! coefficient spectrum, [`diagnostics`] tracks the error norm and the
//! conserved quantities, and [`experiments`] packages the benchmark problems.

// Negated comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod integrator;
pub mod io;
pub mod model;
pub mod reference;
pub mod spectral;
pub mod stability;
pub mod weights;

pub use error::{Error, Result};
pub use experiments::{preset, run, ExperimentConfig, ExperimentName, Overrides, RunArtifact, RunOutcome};
pub use grid::Grid;
pub use integrator::{ButcherTableau, ExplicitRk, Method};
pub use model::{NlsProblem, State};
