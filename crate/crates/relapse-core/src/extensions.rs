//! Contact-disaggregated incidence beyond the three-compartment system:
//! generalized multi-compartment incidence builders, the host-vector
//! system, and peak-prevalence analysis of the no-relapse scenario.
//!
//! The construction principle carries over unchanged: the numerator collects
//! the contact activity of the compartments that can infect a susceptible
//! class, and the denominator is the total contact activity `sum_h C^h h`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{ContactProfile, ModelParams};
use crate::ode::{integrate_adaptive, OdeError, Rk45Options};
use crate::simulate::{ScenarioSpec, Trajectory};

/// Activity denominators at or below this threshold are treated as zero.
pub const ZERO_ACTIVITY: f64 = 1e-14;

/// Relative tolerance on compartment totals entering the host-vector system.
pub const POPULATION_TOL: f64 = 1e-9;

/// Errors from the generalized models.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtensionsError {
    /// Compartment vectors have inconsistent lengths.
    MismatchedLengths,
    /// A referenced compartment label does not exist.
    UnknownLabel(String),
    /// The total contact activity vanished.
    ZeroActivity,
    /// A rate or size is negative or non-finite.
    InvalidValue(&'static str),
    /// Compartment sums disagree with the declared population totals.
    PopulationMismatch {
        /// Which population ("host" or "vector").
        which: &'static str,
        /// Sum of the compartments.
        total: f64,
        /// Declared total.
        expected: f64,
    },
    /// Integration failure in the host-vector run.
    Ode(OdeError<ExtensionsErrorBox>),
}

/// Boxed self-reference used by the integrator error path.
pub type ExtensionsErrorBox = alloc::boxed::Box<ExtensionsError>;

impl fmt::Display for ExtensionsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionsError::MismatchedLengths => {
                write!(f, "labels, sizes, contacts and weights must have equal lengths")
            }
            ExtensionsError::UnknownLabel(l) => write!(f, "unknown compartment label {l:?}"),
            ExtensionsError::ZeroActivity => write!(f, "total contact activity is zero"),
            ExtensionsError::InvalidValue(what) => write!(f, "invalid value: {what}"),
            ExtensionsError::PopulationMismatch {
                which,
                total,
                expected,
            } => write!(f, "{which} compartments sum to {total}, expected {expected}"),
            ExtensionsError::Ode(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ExtensionsError {}

/// A labeled set of compartments with contact rates and infectivity weights.
///
/// Weights scale each compartment's contribution to the incidence numerator
/// (for example reductions applied to exposed or asymptomatic classes);
/// compartments that cannot transmit carry weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedCompartments {
    labels: Vec<String>,
    sizes: Vec<f64>,
    contacts: Vec<f64>,
    weights: Vec<f64>,
}

impl GeneralizedCompartments {
    /// Builds the compartment table, validating lengths and signs.
    pub fn new(
        labels: Vec<String>,
        sizes: Vec<f64>,
        contacts: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self, ExtensionsError> {
        if labels.len() != sizes.len()
            || labels.len() != contacts.len()
            || labels.len() != weights.len()
        {
            return Err(ExtensionsError::MismatchedLengths);
        }
        for &v in sizes.iter().chain(&contacts).chain(&weights) {
            if !v.is_finite() || v < 0.0 {
                return Err(ExtensionsError::InvalidValue(
                    "sizes, contacts and weights must be finite and nonnegative",
                ));
            }
        }
        Ok(Self {
            labels,
            sizes,
            contacts,
            weights,
        })
    }

    fn index_of(&self, label: &str) -> Result<usize, ExtensionsError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ExtensionsError::UnknownLabel(label.into()))
    }

    /// Total contact activity `sum_h C^h h`.
    pub fn total_activity(&self) -> f64 {
        self.contacts
            .iter()
            .zip(&self.sizes)
            .map(|(c, h)| c * h)
            .sum()
    }

    /// Updates a compartment size.
    pub fn set_size(&mut self, label: &str, size: f64) -> Result<(), ExtensionsError> {
        let idx = self.index_of(label)?;
        if !size.is_finite() || size < 0.0 {
            return Err(ExtensionsError::InvalidValue("sizes must be nonnegative"));
        }
        self.sizes[idx] = size;
        Ok(())
    }
}

/// Incidence multiplier for one susceptible class:
///
/// ```text
/// epsilon C^sus (sum_j w_j C^j x_j) / (sum_h C^h x_h)
/// ```
///
/// where `j` ranges over `sources`. `epsilon` is an optional susceptible-side
/// reduction (pass one for none).
pub fn generalized_incidence(
    g: &GeneralizedCompartments,
    susceptible: &str,
    sources: &[&str],
    epsilon: f64,
) -> Result<f64, ExtensionsError> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(ExtensionsError::InvalidValue("epsilon must be nonnegative"));
    }
    let sus = g.index_of(susceptible)?;
    let activity = g.total_activity();
    if activity <= ZERO_ACTIVITY {
        return Err(ExtensionsError::ZeroActivity);
    }
    let mut numerator = 0.0;
    for label in sources {
        let j = g.index_of(label)?;
        numerator += g.weights[j] * g.contacts[j] * g.sizes[j];
    }
    Ok(epsilon * g.contacts[sus] * numerator / activity)
}

/// Host compartments `(S_h, E_h, I_h, R_h)` then vectors `(S_v, E_v, I_v)`.
pub const VECTOR_COMPARTMENTS: usize = 7;

/// Index constants into the host-vector state.
pub mod vector_index {
    /// Susceptible hosts.
    pub const S_H: usize = 0;
    /// Exposed hosts.
    pub const E_H: usize = 1;
    /// Infected hosts.
    pub const I_H: usize = 2;
    /// Recovered hosts.
    pub const R_H: usize = 3;
    /// Susceptible vectors.
    pub const S_V: usize = 4;
    /// Exposed vectors.
    pub const E_V: usize = 5;
    /// Infected vectors.
    pub const I_V: usize = 6;
}

/// Rates, populations and contacts of the host-vector system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorBorneParams {
    /// Host demographic turnover.
    pub mu_h: f64,
    /// Host incubation rate (exposed to infectious).
    pub alpha_h: f64,
    /// Host recovery rate.
    pub gamma: f64,
    /// Host infection probability per contact with infected vectors.
    pub beta: f64,
    /// Vector demographic turnover.
    pub mu_v: f64,
    /// Vector incubation rate.
    pub alpha_v: f64,
    /// Vector infection probability per contact with infected hosts.
    pub beta_v: f64,
    /// Host population size.
    pub n_h: f64,
    /// Vector population size.
    pub n_v: f64,
    /// Contact rates per compartment, indexed by [`vector_index`].
    pub contacts: [f64; VECTOR_COMPARTMENTS],
    /// Replace both incidence multipliers by one (the constant-incidence
    /// formulation).
    pub constant_incidence: bool,
}

impl VectorBorneParams {
    fn validate(&self) -> Result<(), ExtensionsError> {
        let rates = [
            self.mu_h,
            self.alpha_h,
            self.gamma,
            self.beta,
            self.mu_v,
            self.alpha_v,
            self.beta_v,
        ];
        if rates.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ExtensionsError::InvalidValue("rates must be nonnegative"));
        }
        if !(self.n_h > 0.0) || !(self.n_v > 0.0) {
            return Err(ExtensionsError::InvalidValue("populations must be positive"));
        }
        if self.contacts.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ExtensionsError::InvalidValue("contacts must be nonnegative"));
        }
        Ok(())
    }

    /// Incidence multipliers `(g_h, g_v)` at a state:
    ///
    /// ```text
    /// g_h = C^{S_h} C^{I_v} I_v / sum_j C^j x_j
    /// g_v = C^{S_v} C^{I_h} I_h / sum_j C^j x_j
    /// ```
    pub fn incidence(
        &self,
        state: &[f64; VECTOR_COMPARTMENTS],
    ) -> Result<(f64, f64), ExtensionsError> {
        if self.constant_incidence {
            return Ok((1.0, 1.0));
        }
        let activity: f64 = self
            .contacts
            .iter()
            .zip(state.iter())
            .map(|(c, x)| c * x)
            .sum();
        if activity <= ZERO_ACTIVITY {
            return Err(ExtensionsError::ZeroActivity);
        }
        use vector_index::{I_H, I_V, S_H, S_V};
        let g_h = self.contacts[S_H] * self.contacts[I_V] * state[I_V] / activity;
        let g_v = self.contacts[S_V] * self.contacts[I_H] * state[I_H] / activity;
        Ok((g_h, g_v))
    }
}

/// Derivatives of the host-vector system.
///
/// Host infections require contact with infected vectors and vector
/// infections contact with infected hosts; both populations keep balanced
/// demography, so host derivatives sum to zero and vector derivatives sum to
/// `mu_v (N_v - S_v - E_v - I_v)`.
pub fn vector_borne_rhs(
    state: &[f64; VECTOR_COMPARTMENTS],
    vp: &VectorBorneParams,
) -> Result<[f64; VECTOR_COMPARTMENTS], ExtensionsError> {
    vp.validate()?;
    use vector_index::*;
    let host_total = state[S_H] + state[E_H] + state[I_H] + state[R_H];
    if (host_total - vp.n_h).abs() > POPULATION_TOL * vp.n_h.max(1.0) {
        return Err(ExtensionsError::PopulationMismatch {
            which: "host",
            total: host_total,
            expected: vp.n_h,
        });
    }
    let vector_total = state[S_V] + state[E_V] + state[I_V];
    if (vector_total - vp.n_v).abs() > POPULATION_TOL * vp.n_v.max(1.0) {
        return Err(ExtensionsError::PopulationMismatch {
            which: "vector",
            total: vector_total,
            expected: vp.n_v,
        });
    }
    let (g_h, g_v) = vp.incidence(state)?;

    let host_infection = vp.beta * g_h * state[S_H] * state[I_V] / vp.n_v;
    let vector_infection = vp.beta_v * g_v * state[S_V] * state[I_H] / vp.n_h;

    Ok([
        vp.mu_h * vp.n_h - host_infection - vp.mu_h * state[S_H],
        host_infection - (vp.mu_h + vp.alpha_h) * state[E_H],
        vp.alpha_h * state[E_H] - (vp.mu_h + vp.gamma) * state[I_H],
        vp.gamma * state[I_H] - vp.mu_h * state[R_H],
        vp.mu_v * vp.n_v - vector_infection - vp.mu_v * state[S_V],
        vector_infection - (vp.mu_v + vp.alpha_v) * state[E_V],
        vp.alpha_v * state[E_V] - vp.mu_v * state[I_V],
    ])
}

/// A sampled host-vector path.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTrajectory {
    /// Sample times.
    pub times: Vec<f64>,
    /// Sampled compartment vectors.
    pub states: Vec<[f64; VECTOR_COMPARTMENTS]>,
}

/// Integrates the host-vector system.
pub fn integrate_vector_borne(
    vp: &VectorBorneParams,
    initial: [f64; VECTOR_COMPARTMENTS],
    horizon: f64,
    stride: f64,
) -> Result<VectorTrajectory, ExtensionsError> {
    vp.validate()?;
    if !(horizon > 0.0 && stride > 0.0 && stride <= horizon) {
        return Err(ExtensionsError::InvalidValue(
            "horizon and stride must be positive with stride <= horizon",
        ));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate_adaptive::<VECTOR_COMPARTMENTS, ExtensionsErrorBox, _, _, _>(
        |_, y| vector_borne_rhs(y, vp).map_err(alloc::boxed::Box::new),
        initial,
        0.0,
        horizon,
        stride,
        &Rk45Options::default(),
        |_| {},
        |t, y| {
            times.push(t);
            states.push(*y);
            core::ops::ControlFlow::Continue(())
        },
    )
    .map_err(ExtensionsError::Ode)?;
    Ok(VectorTrajectory { times, states })
}

/// Time and value of the infected-proportion peak (first attained).
pub fn peak_prevalence(traj: &Trajectory) -> (f64, f64) {
    traj.peak_infected()
}

/// Rates of the no-relapse influenza example (`R0 = 1.625` at `C^i = 5`).
pub fn influenza_params() -> ModelParams {
    ModelParams::new(0.07943065, 1.0 / 4.1, 0.0, 0.0005).expect("rates are valid")
}

/// A ready-to-run influenza scenario at the given contact ratios, started
/// from `i(0) = rho` under the basin convention.
pub fn influenza_scenario(
    kappa: f64,
    theta: f64,
    rho: f64,
    horizon: f64,
    stride: f64,
) -> Result<ScenarioSpec, crate::model::ModelError> {
    Ok(ScenarioSpec {
        params: influenza_params(),
        contacts: ContactProfile::from_ratios(5.0, kappa, theta)?,
        initial: crate::simulate::basin_initial(rho)?,
        horizon,
        stride,
    })
}
