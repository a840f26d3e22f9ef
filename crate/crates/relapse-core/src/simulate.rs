//! Time integration of the rescaled system, convergence detection and
//! basin-of-attraction probing.

use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use crate::equilibria::EquilibriumSet;
use crate::model::{rescale_absolute, rhs, ContactProfile, EpiState, ModelError, ModelParams};
use crate::ode::{integrate_adaptive, OdeError, Rk45Options};

/// Successive-stride difference below which the state is considered settled.
pub const CONVERGENCE_EPS: f64 = 1e-12;

/// Number of consecutive settled strides required to declare convergence.
pub const CONVERGENCE_RUN: usize = 10;

/// Max-norm radius for matching a limit state to an equilibrium.
pub const MATCH_TOL: f64 = 1e-3;

/// Default integration horizon.
pub const DEFAULT_HORIZON: f64 = 1e6;

/// Default sampling stride.
pub const DEFAULT_STRIDE: f64 = 500.0;

/// Reference population used by the basin convention `(1 - rho - 10/N, rho, 10/N)`.
pub const BASIN_POPULATION: f64 = 10_000.0;

/// Errors from scenario integration.
#[derive(Debug, Clone, PartialEq)]
pub enum SimulateError {
    /// Bad scenario description.
    InvalidSpec(&'static str),
    /// Parameter or state validation failure.
    Model(ModelError),
    /// Integrator failure.
    Ode(OdeError<ModelError>),
}

impl fmt::Display for SimulateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimulateError::InvalidSpec(what) => write!(f, "invalid scenario: {what}"),
            SimulateError::Model(e) => write!(f, "{e}"),
            SimulateError::Ode(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SimulateError {}

impl From<ModelError> for SimulateError {
    fn from(e: ModelError) -> Self {
        SimulateError::Model(e)
    }
}

impl From<OdeError<ModelError>> for SimulateError {
    fn from(e: OdeError<ModelError>) -> Self {
        SimulateError::Ode(e)
    }
}

/// A complete description of one integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    /// Disease rates.
    pub params: ModelParams,
    /// Contact profile.
    pub contacts: ContactProfile,
    /// Initial state.
    pub initial: EpiState,
    /// Integration horizon.
    pub horizon: f64,
    /// Output stride.
    pub stride: f64,
}

impl ScenarioSpec {
    fn validate(&self) -> Result<(), SimulateError> {
        self.params.validate()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(SimulateError::InvalidSpec("horizon must be positive"));
        }
        if !(self.stride > 0.0 && self.stride <= self.horizon) {
            return Err(SimulateError::InvalidSpec(
                "stride must be positive and no larger than the horizon",
            ));
        }
        Ok(())
    }
}

/// Sampled solution path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times, ascending, starting at zero.
    pub times: Vec<f64>,
    /// Sampled states (same length as `times`).
    pub states: Vec<EpiState>,
    /// Largest `|s + i + r - 1|` observed before per-step renormalization.
    pub max_drift: f64,
    /// Smallest component value observed over all accepted steps.
    pub min_component: f64,
}

impl Trajectory {
    /// Final sampled state.
    pub fn final_state(&self) -> &EpiState {
        self.states.last().expect("trajectories are never empty")
    }

    /// Final sample time.
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories are never empty")
    }

    /// Time and height of the infected-proportion peak (first attained).
    pub fn peak_infected(&self) -> (f64, f64) {
        let mut best = (self.times[0], self.states[0].i());
        for (t, st) in self.times.iter().zip(&self.states) {
            if st.i() > best.1 {
                best = (*t, st.i());
            }
        }
        best
    }
}

/// Convergence verdict for a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    /// Whether [`CONVERGENCE_RUN`] consecutive stride differences fell below
    /// [`CONVERGENCE_EPS`].
    pub converged: bool,
    /// Last sampled state.
    pub limit_state: EpiState,
    /// Time at which convergence was declared (horizon end if not).
    pub attained_at: f64,
    /// Nearest equilibrium within [`MATCH_TOL`] of the limit state, if any.
    /// Matching uses the final state even when the strict convergence
    /// criterion was not met within the horizon.
    pub matched: Option<MatchedEquilibrium>,
}

/// Which equilibrium a limit state matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchedEquilibrium {
    /// The disease-free point.
    DiseaseFree,
    /// Index into [`EquilibriumSet::endemic`].
    Endemic(usize),
}

fn run(spec: &ScenarioSpec, early_exit: bool) -> Result<Trajectory, SimulateError> {
    spec.validate()?;
    let p = spec.params;
    let c = spec.contacts;
    let mut max_drift = 0.0f64;
    let mut min_component = f64::INFINITY;

    let mut times = Vec::new();
    let mut states: Vec<EpiState> = Vec::new();
    let mut settled = 0usize;

    integrate_adaptive::<3, ModelError, _, _, _>(
        |_, y| {
            let st = EpiState::from_parts_unchecked(y[0], y[1], y[2]);
            rhs(&st, &p, &c)
        },
        spec.initial.as_array(),
        0.0,
        spec.horizon,
        spec.stride,
        &Rk45Options::default(),
        |y| {
            let sum = y[0] + y[1] + y[2];
            max_drift = max_drift.max((sum - 1.0).abs());
            min_component = min_component.min(y[0].min(y[1]).min(y[2]));
            for v in y.iter_mut() {
                *v /= sum;
            }
        },
        |t, y| {
            let st = EpiState::from_parts_unchecked(y[0], y[1], y[2]);
            if let Some(prev) = states.last() {
                if st.max_norm_distance(prev) < CONVERGENCE_EPS {
                    settled += 1;
                } else {
                    settled = 0;
                }
            }
            times.push(t);
            states.push(st);
            if early_exit && settled >= CONVERGENCE_RUN {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;

    if min_component == f64::INFINITY {
        min_component = spec
            .initial
            .as_array()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
    }
    Ok(Trajectory {
        times,
        states,
        max_drift,
        min_component,
    })
}

/// Integrates the scenario over its full horizon.
pub fn integrate(spec: &ScenarioSpec) -> Result<Trajectory, SimulateError> {
    run(spec, false)
}

/// Integrates the scenario, stopping early once the settled-stride criterion
/// of [`detect_convergence`] is met.
pub fn integrate_converging(spec: &ScenarioSpec) -> Result<Trajectory, SimulateError> {
    run(spec, true)
}

/// Scans a trajectory for convergence and matches the limit against an
/// equilibrium set.
pub fn detect_convergence(traj: &Trajectory, eq: &EquilibriumSet) -> ConvergenceReport {
    let mut settled = 0usize;
    let mut converged = false;
    let mut attained_at = traj.final_time();
    for k in 1..traj.states.len() {
        if traj.states[k].max_norm_distance(&traj.states[k - 1]) < CONVERGENCE_EPS {
            settled += 1;
            if settled >= CONVERGENCE_RUN {
                converged = true;
                attained_at = traj.times[k];
                break;
            }
        } else {
            settled = 0;
        }
    }
    let limit_state = *traj.final_state();
    ConvergenceReport {
        converged,
        limit_state,
        attained_at,
        matched: match_equilibrium(&limit_state, eq),
    }
}

/// Nearest equilibrium within [`MATCH_TOL`], if any.
pub fn match_equilibrium(state: &EpiState, eq: &EquilibriumSet) -> Option<MatchedEquilibrium> {
    let mut best: Option<(f64, MatchedEquilibrium)> = None;
    let mut consider = |dist: f64, who: MatchedEquilibrium| {
        if dist <= MATCH_TOL && best.is_none_or(|(d, _)| dist < d) {
            best = Some((dist, who));
        }
    };
    consider(
        state.max_norm_distance(&eq.dfe.state),
        MatchedEquilibrium::DiseaseFree,
    );
    for (k, point) in eq.endemic.iter().enumerate() {
        consider(
            state.max_norm_distance(&point.state),
            MatchedEquilibrium::Endemic(k),
        );
    }
    best.map(|(_, who)| who)
}

/// One basin-probe outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinCell {
    /// Initial infected proportion.
    pub rho: f64,
    /// Limiting infected proportion.
    pub limit_i: f64,
    /// Matched equilibrium, if any.
    pub matched: Option<MatchedEquilibrium>,
}

/// Initial state of the basin convention: `(N - rho N - 10, rho N, 10) / N`
/// with `N = `[`BASIN_POPULATION`].
pub fn basin_initial(rho: f64) -> Result<EpiState, ModelError> {
    let n = BASIN_POPULATION;
    rescale_absolute(n - rho * n - 10.0, rho * n, 10.0, n)
}

/// Integrates one scenario per initial infected proportion and reports which
/// equilibrium attracted each run.
pub fn basin_probe(
    p: &ModelParams,
    c: &ContactProfile,
    rho_grid: &[f64],
    horizon: f64,
    stride: f64,
) -> Result<Vec<BasinCell>, SimulateError> {
    let eq = crate::equilibria::endemic_equilibria(p, c)
        .map_err(|e| match e {
            crate::equilibria::EquilibriaError::Model(m) => SimulateError::Model(m),
            crate::equilibria::EquilibriaError::RootPolish(_) => {
                SimulateError::InvalidSpec("equilibria of the scenario are ill conditioned")
            }
        })?;
    let mut cells = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let spec = ScenarioSpec {
            params: *p,
            contacts: *c,
            initial: basin_initial(rho)?,
            horizon,
            stride,
        };
        let traj = integrate_converging(&spec)?;
        let report = detect_convergence(&traj, &eq);
        cells.push(BasinCell {
            rho,
            limit_i: report.limit_state.i(),
            matched: report.matched,
        });
    }
    Ok(cells)
}
