//! Backward-bifurcation machinery: the relapse-strength inequality, the
//! line constants of the coefficient geometry, theta thresholds at the
//! `R0 = 1` axis, coefficient sign conditions and the numeric three-root
//! window.
//!
//! In the `(R0, theta)` plane the cubic coefficients are affine, i.e.
//!
//! ```text
//! a3 = A R0 - B (1 - kappa)
//! a2 = C + D R0 - E (1 - kappa) - F (1 - theta)
//! a1 = G + H R0 - I (1 - kappa) - J (1 - theta)
//! a0 = K (1 - R0)
//! ```
//!
//! with constants depending only on `R_mu` and `R_phi`. The thresholds
//! `theta1*..theta3*` are the intersections of the lines `a2 = 0`,
//! `a2 + a3 = 0` and `a0 + a1 = 0` with the `R0 = 1` axis.

use crate::equilibria::{CubicCoefficients, ENDEMIC_MIN};
use crate::model::{derived_rates, ContactProfile, ModelError, ModelParams};
use crate::sturm::{count_roots, Polynomial, SturmError};

/// Bisection resolution of the window boundary in `R0`.
pub const WINDOW_RESOLUTION: f64 = 1e-6;

/// Bracketing scan step in `R0` before bisection.
pub const WINDOW_SCAN_STEP: f64 = 1e-4;

/// Upper bound of the window scan; three-root windows of this model family
/// live within a few percent of `R0 = 1`.
pub const WINDOW_SCAN_LIMIT: f64 = 2.0;

/// The eleven line constants of the coefficient geometry. All are positive
/// for `R_mu` in `(0, 1)` and `R_phi > 0` except possibly `d` and `h`,
/// hostage to the sign of `1 - R_phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConstants {
    /// `R_phi^2`.
    pub a: f64,
    /// `R_mu R_phi^2`.
    pub b: f64,
    /// `R_phi^2 R_mu`.
    pub c: f64,
    /// `R_phi (1 - R_phi) + R_phi R_mu`.
    pub d: f64,
    /// `R_phi R_mu (1 + R_mu)`.
    pub e: f64,
    /// `R_phi R_mu (1 - R_mu)`.
    pub f: f64,
    /// `R_phi R_mu (1 + R_mu)`.
    pub g: f64,
    /// `R_mu (1 - R_phi) - R_mu R_phi`.
    pub h: f64,
    /// `R_mu^2`.
    pub i: f64,
    /// `R_mu (1 - R_mu)`.
    pub j: f64,
    /// `R_mu^2`.
    pub k: f64,
}

impl TheoremConstants {
    /// Constants from the reduced rates.
    pub fn from_thresholds(r_mu: f64, r_phi: f64) -> Self {
        Self {
            a: r_phi * r_phi,
            b: r_mu * r_phi * r_phi,
            c: r_phi * r_phi * r_mu,
            d: r_phi * (1.0 - r_phi) + r_phi * r_mu,
            e: r_phi * r_mu * (1.0 + r_mu),
            f: r_phi * r_mu * (1.0 - r_mu),
            g: r_phi * r_mu * (1.0 + r_mu),
            h: r_mu * (1.0 - r_phi) - r_mu * r_phi,
            i: r_mu * r_mu,
            j: r_mu * (1.0 - r_mu),
            k: r_mu * r_mu,
        }
    }

    /// Cubic coefficients `[a0, a1, a2, a3]` through the affine line forms;
    /// agrees with [`CubicCoefficients::from_thresholds`].
    pub fn coefficient_lines(&self, r0: f64, kappa: f64, theta: f64) -> [f64; 4] {
        [
            self.k * (1.0 - r0),
            self.g + self.h * r0 - self.i * (1.0 - kappa) - self.j * (1.0 - theta),
            self.c + self.d * r0 - self.e * (1.0 - kappa) - self.f * (1.0 - theta),
            self.a * r0 - self.b * (1.0 - kappa),
        ]
    }
}

/// The line constants for the given rates.
pub fn theorem_constants(p: &ModelParams) -> Result<TheoremConstants, ModelError> {
    p.validate()?;
    let r_mu = p.mu / (p.mu + p.gamma);
    let r_phi = p.phi / (p.mu + p.gamma);
    Ok(TheoremConstants::from_thresholds(r_mu, r_phi))
}

/// Whether the relapse strength clears the backward-bifurcation bound
/// `R_phi > (1 + R_mu^2) / (1 - R_mu)^2`.
pub fn inequality_holds(p: &ModelParams) -> Result<bool, ModelError> {
    p.validate()?;
    let r_mu = p.mu / (p.mu + p.gamma);
    let r_phi = p.phi / (p.mu + p.gamma);
    let bound = (1.0 + r_mu * r_mu) / ((1.0 - r_mu) * (1.0 - r_mu));
    Ok(r_phi > bound)
}

/// Intersections of the three coefficient lines with the `R0 = 1` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaThresholds {
    /// Intersection of `a2 = 0`; the sign conditions need `theta` below it.
    pub theta1_star: f64,
    /// Intersection of `a2 + a3 = 0`; always below `theta1_star`.
    pub theta2_star: f64,
    /// Intersection of `a0 + a1 = 0`.
    pub theta3_star: f64,
}

impl ThetaThresholds {
    /// Lower edge of the admissible band, `max(theta2*, theta3*)`.
    pub fn lower(&self) -> f64 {
        self.theta2_star.max(self.theta3_star)
    }
}

/// The three theta thresholds at `R0 = 1` for a given `kappa`.
pub fn theta_stars(p: &ModelParams, kappa: f64) -> Result<ThetaThresholds, ModelError> {
    let tc = theorem_constants(p)?;
    let theta1_star = 1.0 - (tc.c + tc.d) / tc.f + (tc.e / tc.f) * (1.0 - kappa);
    let theta2_star = theta1_star + (tc.b * (1.0 - kappa) - tc.a) / tc.f;
    let theta3_star = 1.0 - (tc.g + tc.h) / tc.j + (tc.i / tc.j) * (1.0 - kappa);
    Ok(ThetaThresholds {
        theta1_star,
        theta2_star,
        theta3_star,
    })
}

/// The coefficient sign pattern `a0 < 0, a2 < 0, a3 > 0, a0 + a1 > 0,
/// a2 + a3 > 0`, which pins the derivative-chain signs to `(-, +, -, +)` at
/// zero and `(+, +, +, +)` at one.
pub fn sign_conditions(c: &CubicCoefficients) -> bool {
    c.a0 < 0.0 && c.a2 < 0.0 && c.a3 > 0.0 && c.a0 + c.a1 > 0.0 && c.a2 + c.a3 > 0.0
}

/// The three-root window `[1, r0_max]` of a `(kappa, theta)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionWindow {
    /// Supremum of `R0 >= 1` with three distinct roots in `(0, 1]`; equals
    /// one when the window is empty.
    pub r0_max: f64,
    /// Contact ratio of the cell.
    pub kappa: f64,
    /// Contact ratio of the cell.
    pub theta: f64,
}

impl RegionWindow {
    /// Window length `r0_max - 1`.
    pub fn len(&self) -> f64 {
        self.r0_max - 1.0
    }

    /// Whether the window is empty.
    pub fn is_empty(&self) -> bool {
        self.len() <= 0.0
    }
}

fn three_roots(r_mu: f64, r_phi: f64, kappa: f64, theta: f64, r0: f64) -> bool {
    let coeffs = CubicCoefficients::from_thresholds(r0, r_mu, r_phi, kappa, theta);
    let poly = match Polynomial::new(coeffs.as_array().to_vec()) {
        Ok(p) => p,
        Err(_) => return false,
    };
    match count_roots(&poly, ENDEMIC_MIN, 1.0 + ENDEMIC_MIN) {
        Ok(n) => n == 3,
        // Degenerate folds and boundary-straddling roots close the window.
        Err(SturmError::RepeatedRoot | SturmError::EndpointRoot { .. }) => false,
        Err(_) => false,
    }
}

/// Locates the three-root window above `R0 = 1` by a bracketing scan
/// ([`WINDOW_SCAN_STEP`]) followed by bisection on the root count down to
/// [`WINDOW_RESOLUTION`].
pub fn r0_window(p: &ModelParams, kappa: f64, theta: f64) -> Result<RegionWindow, ModelError> {
    p.validate()?;
    let r_mu = p.mu / (p.mu + p.gamma);
    let r_phi = p.phi / (p.mu + p.gamma);
    let probe = |r0: f64| three_roots(r_mu, r_phi, kappa, theta, r0);

    let start = 1.0 + WINDOW_RESOLUTION;
    if !probe(start) {
        return Ok(RegionWindow {
            r0_max: 1.0,
            kappa,
            theta,
        });
    }
    let mut lo = start;
    while lo + WINDOW_SCAN_STEP < WINDOW_SCAN_LIMIT && probe(lo + WINDOW_SCAN_STEP) {
        lo += WINDOW_SCAN_STEP;
    }
    let mut hi = (lo + WINDOW_SCAN_STEP).min(WINDOW_SCAN_LIMIT);
    while hi - lo > WINDOW_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if probe(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RegionWindow {
        r0_max: 0.5 * (lo + hi),
        kappa,
        theta,
    })
}

/// Convenience: the window computed from explicit contacts.
pub fn r0_window_for_contacts(
    p: &ModelParams,
    c: &ContactProfile,
) -> Result<RegionWindow, ModelError> {
    derived_rates(p, c)?;
    r0_window(p, c.kappa(), c.theta())
}
