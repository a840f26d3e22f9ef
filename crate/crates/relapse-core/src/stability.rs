//! Linear stability of equilibria and the Dulac divergence certificate.
//!
//! Eigenvalues of the 3x3 Jacobian come from its characteristic cubic via
//! the closed-form solver, so no external linear algebra is needed at this
//! dimension.

use core::fmt;

use crate::cubic::{solve_cubic, CubicRoots};
use crate::equilibria::EquilibriumPoint;
use crate::model::{incidence, incidence_partials, rhs, ContactProfile, EpiState, ModelError, ModelParams};

/// Real parts within this tolerance of zero classify as marginal.
pub const STABILITY_TOL: f64 = 1e-10;

/// Residual bound a point must satisfy before classification.
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// Errors from stability analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum StabilityError {
    /// Underlying parameter or incidence failure.
    Model(ModelError),
    /// The Dulac expression is only defined on the open region
    /// `i > 0, r > 0, i + r < 1`.
    OutsideDomain {
        /// Infected coordinate.
        i: f64,
        /// Recovered coordinate.
        r: f64,
    },
    /// The candidate point does not satisfy the vector field within
    /// [`RESIDUAL_BOUND`].
    ResidualTooLarge {
        /// Max-norm residual of the right-hand side.
        residual: f64,
    },
}

impl fmt::Display for StabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityError::Model(e) => write!(f, "{e}"),
            StabilityError::OutsideDomain { i, r } => {
                write!(f, "point (i={i}, r={r}) outside the open interior region")
            }
            StabilityError::ResidualTooLarge { residual } => {
                write!(f, "not an equilibrium: rhs residual {residual:e}")
            }
        }
    }
}

impl core::error::Error for StabilityError {}

impl From<ModelError> for StabilityError {
    fn from(e: ModelError) -> Self {
        StabilityError::Model(e)
    }
}

/// Stability verdict of an equilibrium point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityLabel {
    /// All eigenvalue real parts below `-`[`STABILITY_TOL`].
    Stable,
    /// Some real part above [`STABILITY_TOL`].
    Unstable,
    /// Neither: a real part sits within tolerance of zero.
    Marginal,
    /// Not yet classified.
    Unclassified,
}

impl fmt::Display for StabilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StabilityLabel::Stable => "stable",
            StabilityLabel::Unstable => "unstable",
            StabilityLabel::Marginal => "marginal",
            StabilityLabel::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// Classification outcome with the eigenvalue real parts that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityClass {
    /// The verdict.
    pub label: StabilityLabel,
    /// Eigenvalue real parts in ascending order.
    pub real_parts: [f64; 3],
}

impl StabilityClass {
    fn from_real_parts(mut real_parts: [f64; 3]) -> Self {
        real_parts.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let label = if real_parts.iter().all(|&re| re < -STABILITY_TOL) {
            StabilityLabel::Stable
        } else if real_parts.iter().any(|&re| re > STABILITY_TOL) {
            StabilityLabel::Unstable
        } else {
            StabilityLabel::Marginal
        };
        Self { label, real_parts }
    }
}

/// Jacobian of the rescaled system at a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianMatrix {
    /// Row-major entries, ordered `(s, i, r)`.
    pub entries: [[f64; 3]; 3],
    /// Evaluation state.
    pub state: EpiState,
    /// Incidence partials `[g_s, g_i, g_r]` used in the assembly.
    pub partials: [f64; 3],
}

impl JacobianMatrix {
    /// Trace.
    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    /// Sum of the principal 2x2 minors.
    pub fn second_invariant(&self) -> f64 {
        let m = &self.entries;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    /// Determinant.
    pub fn determinant(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Eigenvalue real parts through the characteristic cubic.
    pub fn eigen_real_parts(&self) -> [f64; 3] {
        let c2 = -self.trace();
        let c1 = self.second_invariant();
        let c0 = -self.determinant();
        match solve_cubic(1.0, c2, c1, c0) {
            CubicRoots::ThreeReal(r) => r,
            CubicRoots::OneReal { root, pair_re, .. } => [root, pair_re, pair_re],
        }
    }
}

/// Assembles the Jacobian with analytic incidence partials.
pub fn jacobian_at(
    state: &EpiState,
    p: &ModelParams,
    c: &ContactProfile,
) -> Result<JacobianMatrix, ModelError> {
    let g = incidence(state, c)?;
    let partials = incidence_partials(state, c)?;
    let [g_s, g_i, g_r] = partials;
    let (s, i, r) = (state.s(), state.i(), state.r());
    let beta = p.beta;

    let infect_s = beta * i * (g_s * s + g);
    let infect_i = beta * s * (g_i * i + g);
    let infect_r = beta * s * i * g_r;

    let entries = [
        [-infect_s - p.mu, -infect_i, -infect_r],
        [
            infect_s,
            infect_i + p.phi * r - (p.mu + p.gamma),
            infect_r + p.phi * i,
        ],
        [0.0, p.gamma - p.phi * r, -p.phi * i - p.mu],
    ];
    Ok(JacobianMatrix {
        entries,
        state: *state,
        partials,
    })
}

/// Classifies the disease-free point from its exact eigenvalues
/// `{-mu, -mu, beta C0 - (mu + gamma)}`.
pub fn classify_dfe(p: &ModelParams, c: &ContactProfile) -> Result<StabilityClass, ModelError> {
    p.validate()?;
    let lambda3 = p.beta * c.c_i() - (p.mu + p.gamma);
    Ok(StabilityClass::from_real_parts([-p.mu, -p.mu, lambda3]))
}

/// Classifies an equilibrium point by the eigenvalues of the Jacobian.
///
/// The point must satisfy the vector field within [`RESIDUAL_BOUND`].
pub fn classify_equilibrium(
    point: &EquilibriumPoint,
    p: &ModelParams,
    c: &ContactProfile,
) -> Result<StabilityClass, StabilityError> {
    let f = rhs(&point.state, p, c)?;
    let residual = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if residual > RESIDUAL_BOUND {
        return Err(StabilityError::ResidualTooLarge { residual });
    }
    let j = jacobian_at(&point.state, p, c)?;
    Ok(StabilityClass::from_real_parts(j.eigen_real_parts()))
}

/// Dulac-weighted divergence of the planar `(i, r)` reduction at an interior
/// point, using the weight `1/(i r)`:
///
/// ```text
/// (g_i - g_s) beta (1 - i - r) / r - beta g / r - gamma / r^2
/// ```
///
/// Negative throughout the region whenever `C^i >= C^s`, which rules out
/// limit cycles there.
pub fn dulac_divergence(
    i: f64,
    r: f64,
    p: &ModelParams,
    c: &ContactProfile,
) -> Result<f64, StabilityError> {
    if !(i > 0.0 && r > 0.0 && i + r < 1.0) {
        return Err(StabilityError::OutsideDomain { i, r });
    }
    let s = 1.0 - i - r;
    let state = EpiState::new(s, i, r)?;
    let g = incidence(&state, c)?;
    let [g_s, g_i, _] = incidence_partials(&state, c)?;
    Ok((g_i - g_s) * p.beta * s / r - p.beta * g / r - p.gamma / (r * r))
}

/// Outcome of evaluating the Dulac divergence over an interior grid.
///
/// A numerical certificate, not a proof: it supports the no-limit-cycle
/// conclusion, which is established analytically only for `C^i > C^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DulacCertificate {
    /// Largest divergence value seen on the grid.
    pub max_divergence: f64,
    /// Whether every grid value was strictly negative.
    pub all_negative: bool,
    /// Number of interior grid points evaluated.
    pub points: usize,
}

/// Evaluates [`dulac_divergence`] over an `n x n` interior grid (use 200 for
/// the default certificate density).
pub fn dulac_certificate(
    p: &ModelParams,
    c: &ContactProfile,
    n: usize,
) -> Result<DulacCertificate, StabilityError> {
    let mut max_divergence = f64::NEG_INFINITY;
    let mut points = 0usize;
    for a in 1..n {
        for b in 1..(n - a) {
            let i = a as f64 / n as f64;
            let r = b as f64 / n as f64;
            max_divergence = max_divergence.max(dulac_divergence(i, r, p, c)?);
            points += 1;
        }
    }
    Ok(DulacCertificate {
        max_divergence,
        all_negative: max_divergence < 0.0,
        points,
    })
}
