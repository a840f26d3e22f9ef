//! Contact-disaggregated SIR dynamics with nonlinear relapse.
//!
//! This crate implements a three-compartment epidemic model in which each
//! health status (susceptible, infected, recovered) carries its own average
//! contact rate, and recovered individuals may relapse through contact with
//! the infected. The incidence multiplier is
//!
//! ```text
//! g(s, i, r) = C^s C^i / (s C^s + i C^i + r C^r)
//! ```
//!
//! and the rescaled dynamics on the unit simplex are
//!
//! ```text
//! ds/dt = -g(.) beta s i + mu - mu s
//! di/dt =  g(.) beta s i + phi r i - (gamma + mu) i
//! dr/dt =  gamma i - phi r i - mu r
//! ```
//!
//! The contact ratios `kappa = C^i/C^s` and `theta = C^r/C^s` control a
//! backward bifurcation: for suitable ratios the endemic cubic admits three
//! positive roots inside the unit interval, producing bistability below and
//! slightly above the classical threshold `R0 = 1`.
//!
//! Functionality is organized around that analysis:
//!
//! - [`model`]: parameters, contact profiles, simplex states, incidence and
//!   the vector field.
//! - [`cubic`]: closed-form cubic/quadratic root solver with Newton polish.
//! - [`sturm`]: derivative Sturm chains, sign variations, Cauchy indices and
//!   exact real-root counting on an interval.
//! - [`equilibria`]: the endemic cubic, root lifting to full states, and the
//!   disease-free point.
//! - [`stability`]: Jacobian assembly, eigenvalue classification and the
//!   Dulac divergence certificate.
//! - [`theorem`]: the backward-bifurcation inequality, line constants,
//!   theta thresholds, coefficient sign conditions and the three-root window.
//! - [`ode`]: embedded Runge-Kutta 4(5) integration.
//! - [`simulate`]: trajectories, convergence detection and basin probing.
//! - [`sweep`]: bifurcation diagrams, region classification and
//!   `(kappa, theta)` surface grids.
//! - [`extensions`]: generalized multi-compartment incidence, the host-vector
//!   system and peak-prevalence reduction.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature and enable `libm` to build without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]
// Negated comparisons like `!(x > 0.0)` are deliberate throughout: they
// reject NaN together with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(not(feature = "std"))]
mod fmath;

pub mod cubic;
pub mod equilibria;
pub mod extensions;
pub mod model;
pub mod ode;
pub mod simulate;
pub mod stability;
pub mod sturm;
pub mod sweep;
pub mod theorem;

pub use equilibria::{CubicCoefficients, EquilibriumPoint, EquilibriumSet};
pub use model::{ContactProfile, DerivedRates, EpiState, ModelParams};
pub use simulate::{ConvergenceReport, ScenarioSpec, Trajectory};
pub use stability::{StabilityClass, StabilityLabel};
pub use sturm::{Polynomial, SignSequence, SturmChain};
