//! The endemic cubic, its roots, and equilibrium points of the system.
//!
//! Interior equilibria have the form
//! `(1 - i* - gamma i*/(phi i* + mu), i*, gamma i*/(phi i* + mu))` where `i*`
//! solves `a3 X^3 + a2 X^2 + a1 X + a0 = 0` with coefficients determined by
//! `(R0, R_mu, R_phi, kappa, theta)`.

use alloc::vec::Vec;
use core::fmt;

use crate::cubic::{self, CubicError, CubicRoots};
use crate::model::{derived_rates, rhs, ContactProfile, DerivedRates, EpiState, ModelError, ModelParams};
use crate::stability::{classify_dfe, classify_equilibrium, StabilityLabel};

/// Roots below this value coincide with the disease-free state and are not
/// reported as endemic. Shared with the lower endpoint used for interval
/// root counting so the two root counts agree.
pub const ENDEMIC_MIN: f64 = 1e-9;

/// Roots closer than this are merged and the set is flagged degenerate.
pub const ROOT_MERGE_TOL: f64 = 1e-10;

/// Residual bound for accepting a lifted root as an equilibrium.
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// Errors from equilibrium computation.
#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriaError {
    /// Parameter or state validation failure.
    Model(ModelError),
    /// Newton polish of a cubic root failed to converge.
    RootPolish(CubicError),
}

impl fmt::Display for EquilibriaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquilibriaError::Model(e) => write!(f, "{e}"),
            EquilibriaError::RootPolish(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EquilibriaError {}

impl From<ModelError> for EquilibriaError {
    fn from(e: ModelError) -> Self {
        EquilibriaError::Model(e)
    }
}

impl From<CubicError> for EquilibriaError {
    fn from(e: CubicError) -> Self {
        EquilibriaError::RootPolish(e)
    }
}

/// Coefficients of the endemic cubic `a3 X^3 + a2 X^2 + a1 X + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    /// Constant term `R_mu^2 (1 - R0)`.
    pub a0: f64,
    /// Linear term.
    pub a1: f64,
    /// Quadratic term.
    pub a2: f64,
    /// Cubic term `R_phi^2 R0 - R_mu R_phi^2 (1 - kappa)`.
    pub a3: f64,
}

impl CubicCoefficients {
    /// Coefficients from the reduced threshold quantities and contact ratios.
    pub fn from_thresholds(r0: f64, r_mu: f64, r_phi: f64, kappa: f64, theta: f64) -> Self {
        let a3 = r_phi * r_phi * r0 - r_mu * r_phi * r_phi * (1.0 - kappa);
        let a2 = r_phi
            * (r0 * (1.0 - r_phi) + r_mu * (r0 + r_phi)
                - r_mu * (1.0 - r_mu) * (1.0 - theta)
                - r_mu * (1.0 + r_mu) * (1.0 - kappa));
        let a1 = r_mu
            * (r0 * (1.0 - r_phi) + r_phi * (1.0 - r0) - (1.0 - r_mu) * (1.0 - theta)
                + r_mu * r_phi
                - r_mu * (1.0 - kappa));
        let a0 = r_mu * r_mu * (1.0 - r0);
        Self { a0, a1, a2, a3 }
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0
    }

    /// Ascending coefficient array `[a0, a1, a2, a3]`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }
}

/// Coefficients of the endemic cubic for the given derived rates and ratios.
pub fn cubic_coefficients(d: &DerivedRates, kappa: f64, theta: f64) -> CubicCoefficients {
    CubicCoefficients::from_thresholds(d.r0, d.r_mu, d.r_phi, kappa, theta)
}

/// All real roots of the endemic cubic, polished, ascending, with
/// near-coincident roots merged. The boolean reports whether a merge
/// happened (a degenerate, fold-like configuration).
pub fn polished_real_roots(c: &CubicCoefficients) -> Result<(Vec<f64>, bool), EquilibriaError> {
    let mut roots: Vec<f64> = Vec::new();
    if c.a3.abs() <= cubic::DEGENERATE_LEADING {
        let (r, n) = cubic::solve_quadratic_real(c.a2, c.a1, c.a0);
        roots.extend_from_slice(&r[..n]);
    } else {
        let (b, cc, d) = (c.a2 / c.a3, c.a1 / c.a3, c.a0 / c.a3);
        let raw = match cubic::solve_cubic(c.a3, c.a2, c.a1, c.a0) {
            CubicRoots::ThreeReal(r) => r.to_vec(),
            CubicRoots::OneReal { root, .. } => alloc::vec![root],
        };
        for x in raw {
            roots.push(cubic::polish_monic_cubic(b, cc, d, x)?);
        }
        roots.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    }
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    let mut degenerate = false;
    for r in roots {
        match merged.last() {
            Some(&last) if (r - last).abs() < ROOT_MERGE_TOL => degenerate = true,
            _ => merged.push(r),
        }
    }
    Ok((merged, degenerate))
}

/// Distinct roots of the endemic cubic inside `(`[`ENDEMIC_MIN`]`, 1]`, the
/// candidate endemic infection levels. The boolean flags a degenerate merge.
pub fn unit_interval_roots(c: &CubicCoefficients) -> Result<(Vec<f64>, bool), EquilibriaError> {
    let (roots, degenerate) = polished_real_roots(c)?;
    Ok((
        roots
            .into_iter()
            .filter(|&r| r > ENDEMIC_MIN && r <= 1.0)
            .collect(),
        degenerate,
    ))
}

/// An equilibrium point with its stability verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPoint {
    /// Full state on the simplex.
    pub state: EpiState,
    /// Infected proportion at the point (zero for the disease-free point).
    pub i_star: f64,
    /// Stability verdict.
    pub stability: StabilityLabel,
}

/// Why a cubic root was not accepted as an endemic equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RejectReason {
    /// The lifted state left the simplex (`s* < 0` or `r*` outside `[0, 1]`).
    NonPhysical {
        /// Lifted susceptible proportion.
        s_star: f64,
        /// Lifted recovered proportion.
        r_star: f64,
    },
    /// The vector field residual at the lifted state exceeded
    /// [`RESIDUAL_BOUND`].
    LargeResidual {
        /// Max-norm residual.
        residual: f64,
    },
}

/// A rejected root, reported alongside the accepted equilibria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectedRoot {
    /// The cubic root.
    pub i_star: f64,
    /// Why it was rejected.
    pub reason: RejectReason,
}

/// The disease-free point plus all accepted endemic equilibria.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    /// The disease-free point `(1, 0, 0)`.
    pub dfe: EquilibriumPoint,
    /// Endemic points sorted ascending by `i_star`, at most three.
    pub endemic: Vec<EquilibriumPoint>,
    /// Roots in the unit interval that failed lifting or residual checks.
    pub rejected: Vec<RejectedRoot>,
    /// Whether nearly coincident roots were merged (fold configuration).
    pub degenerate: bool,
}

impl EquilibriumSet {
    /// All points, disease-free first.
    pub fn points(&self) -> impl Iterator<Item = &EquilibriumPoint> {
        core::iter::once(&self.dfe).chain(self.endemic.iter())
    }
}

/// Recovered proportion at an endemic root: `gamma i* / (phi i* + mu)`.
pub fn recovered_at(i_star: f64, p: &ModelParams) -> f64 {
    p.gamma * i_star / (p.phi * i_star + p.mu)
}

/// The disease-free equilibrium `(1, 0, 0)` with its stability verdict.
pub fn disease_free(p: &ModelParams, c: &ContactProfile) -> Result<EquilibriumPoint, EquilibriaError> {
    let class = classify_dfe(p, c)?;
    Ok(EquilibriumPoint {
        state: EpiState::new(1.0, 0.0, 0.0).expect("disease-free state is on the simplex"),
        i_star: 0.0,
        stability: class.label,
    })
}

/// Computes every equilibrium of the system: the disease-free point plus all
/// endemic roots of the cubic in `(0, 1]` that lift to nonnegative states
/// with vector-field residual below [`RESIDUAL_BOUND`]. Roots below
/// [`ENDEMIC_MIN`] coincide with the disease-free point and are absorbed
/// into it.
///
/// ```
/// use relapse_core::equilibria::endemic_equilibria;
/// use relapse_core::model::{ContactProfile, ModelParams};
///
/// // Strong-relapse scenario inside the bistable window.
/// let params = ModelParams::new(0.00096, 0.0027, 0.0044, 0.00015)?;
/// let contacts = ContactProfile::from_ratios(3.0, 0.8, 1.7)?;
/// let set = endemic_equilibria(&params, &contacts)?;
/// assert_eq!(set.endemic.len(), 3);
/// assert!((set.endemic[2].i_star - 0.238099).abs() < 1e-4);
/// # Ok::<(), Box<dyn std::error::Error>>(())
/// ```
pub fn endemic_equilibria(
    p: &ModelParams,
    c: &ContactProfile,
) -> Result<EquilibriumSet, EquilibriaError> {
    let d = derived_rates(p, c)?;
    let coeffs = cubic_coefficients(&d, c.kappa(), c.theta());
    let (candidates, degenerate) = unit_interval_roots(&coeffs)?;

    let mut endemic = Vec::new();
    let mut rejected = Vec::new();
    for i_star in candidates {
        let r_star = recovered_at(i_star, p);
        let s_star = 1.0 - i_star - r_star;
        if !(0.0..=1.0).contains(&r_star) || s_star < 0.0 {
            rejected.push(RejectedRoot {
                i_star,
                reason: RejectReason::NonPhysical { s_star, r_star },
            });
            continue;
        }
        let state = match EpiState::new(s_star, i_star, r_star) {
            Ok(st) => st,
            Err(_) => {
                rejected.push(RejectedRoot {
                    i_star,
                    reason: RejectReason::NonPhysical { s_star, r_star },
                });
                continue;
            }
        };
        let residual = rhs(&state, p, c)?
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > RESIDUAL_BOUND {
            rejected.push(RejectedRoot {
                i_star,
                reason: RejectReason::LargeResidual { residual },
            });
            continue;
        }
        let mut point = EquilibriumPoint {
            state,
            i_star,
            stability: StabilityLabel::Unclassified,
        };
        if degenerate {
            // Fold points carry a structurally zero eigenvalue; surface them
            // as marginal rather than trusting rounded eigenvalues.
            point.stability = StabilityLabel::Marginal;
        } else if let Ok(class) = classify_equilibrium(&point, p, c) {
            point.stability = class.label;
        }
        endemic.push(point);
    }

    Ok(EquilibriumSet {
        dfe: disease_free(p, c)?,
        endemic,
        rejected,
        degenerate,
    })
}
