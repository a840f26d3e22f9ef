//! Model parameters, contact profiles, simplex states and the vector field.
//!
//! Contacts are constant per health status. Because the incidence multiplier
//! only depends on the ratios `kappa = C^i/C^s` and `theta = C^r/C^s` (and on
//! `C^i` itself), [`ContactProfile`] stores that reduced form; profiles can be
//! built either from explicit per-status rates or directly from the ratios.

use core::fmt;

/// Tolerance on `s + i + r = 1` when constructing a state.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Threshold below which the incidence denominator is considered singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-14;

/// Errors from parameter validation and incidence evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A rate or contact value violates its domain constraint.
    InvalidParameter {
        /// Name of the offending field.
        name: &'static str,
        /// Rejected value.
        value: f64,
    },
    /// State components do not lie on the unit simplex within [`SIMPLEX_TOL`].
    OffSimplex {
        /// Sum `s + i + r` of the rejected state.
        sum: f64,
    },
    /// The contact-activity denominator of the incidence function vanished.
    SingularDenominator {
        /// Value of `s C^s + i C^i + r C^r`.
        denominator: f64,
    },
    /// Absolute compartment counts do not add up to the declared total.
    TotalMismatch {
        /// Sum of the provided counts.
        total: f64,
        /// Declared population size.
        expected: f64,
    },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            ModelError::OffSimplex { sum } => {
                write!(f, "state off the unit simplex: s + i + r = {sum}")
            }
            ModelError::SingularDenominator { denominator } => {
                write!(f, "singular contact-activity denominator: {denominator}")
            }
            ModelError::TotalMismatch { total, expected } => {
                write!(f, "compartment counts sum to {total}, expected {expected}")
            }
        }
    }
}

impl core::error::Error for ModelError {}

fn require(cond: bool, name: &'static str, value: f64) -> Result<(), ModelError> {
    if cond {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value })
    }
}

/// Disease rates, all per unit time (days in the bundled scenarios).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Infection probability per contact, in `(0, 1]`.
    pub beta: f64,
    /// Recovery rate, `> 0`.
    pub gamma: f64,
    /// Relapse rate, `>= 0`.
    pub phi: f64,
    /// Demographic turnover rate, `> 0`.
    pub mu: f64,
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(beta: f64, gamma: f64, phi: f64, mu: f64) -> Result<Self, ModelError> {
        let p = Self {
            beta,
            gamma,
            phi,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the domain constraints on all rates.
    pub fn validate(&self) -> Result<(), ModelError> {
        require(
            self.beta.is_finite() && self.beta > 0.0 && self.beta <= 1.0,
            "beta",
            self.beta,
        )?;
        require(self.gamma.is_finite() && self.gamma > 0.0, "gamma", self.gamma)?;
        require(self.phi.is_finite() && self.phi >= 0.0, "phi", self.phi)?;
        require(self.mu.is_finite() && self.mu > 0.0, "mu", self.mu)?;
        Ok(())
    }
}

/// Constant mean contact rates per health status, stored in ratio form.
///
/// The dynamics depend on contacts only through `C^i` and the ratios
/// `kappa = C^i/C^s`, `theta = C^r/C^s`, so profiles built from ratios with
/// `kappa = 0` are admissible even though they correspond to an unbounded
/// susceptible rate; [`ContactProfile::c_s`] reports `f64::INFINITY` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactProfile {
    c_i: f64,
    c_s: f64,
    kappa: f64,
    theta: f64,
}

impl ContactProfile {
    /// Builds a profile from explicit per-status contact rates.
    pub fn new(c_s: f64, c_i: f64, c_r: f64) -> Result<Self, ModelError> {
        require(c_s.is_finite() && c_s > 0.0, "c_s", c_s)?;
        require(c_i.is_finite() && c_i >= 0.0, "c_i", c_i)?;
        require(c_r.is_finite() && c_r >= 0.0, "c_r", c_r)?;
        Ok(Self {
            c_i,
            c_s,
            kappa: c_i / c_s,
            theta: c_r / c_s,
        })
    }

    /// Builds a profile from the infected rate and the two contact ratios.
    pub fn from_ratios(c_i: f64, kappa: f64, theta: f64) -> Result<Self, ModelError> {
        require(c_i.is_finite() && c_i >= 0.0, "c_i", c_i)?;
        require(kappa.is_finite() && kappa >= 0.0, "kappa", kappa)?;
        require(theta.is_finite() && theta >= 0.0, "theta", theta)?;
        let c_s = if kappa > 0.0 {
            let c_s = c_i / kappa;
            require(c_s > 0.0, "c_s", c_s)?;
            c_s
        } else {
            f64::INFINITY
        };
        Ok(Self {
            c_i,
            c_s,
            kappa,
            theta,
        })
    }

    /// Mean contacts per unit time for an infected individual.
    pub fn c_i(&self) -> f64 {
        self.c_i
    }

    /// Mean contacts per unit time for a susceptible individual.
    pub fn c_s(&self) -> f64 {
        self.c_s
    }

    /// Mean contacts per unit time for a recovered individual.
    pub fn c_r(&self) -> f64 {
        if self.theta == 0.0 {
            0.0
        } else {
            self.theta * self.c_s
        }
    }

    /// Contact ratio `C^i / C^s`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Contact ratio `C^r / C^s`.
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Population proportions on the unit simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpiState {
    s: f64,
    i: f64,
    r: f64,
}

impl EpiState {
    /// Validated constructor; requires `s + i + r = 1` within [`SIMPLEX_TOL`].
    pub fn new(s: f64, i: f64, r: f64) -> Result<Self, ModelError> {
        for (name, v) in [("s", s), ("i", i), ("r", r)] {
            require(v.is_finite() && v >= -SIMPLEX_TOL, name, v)?;
        }
        let sum = s + i + r;
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(ModelError::OffSimplex { sum });
        }
        Ok(Self { s, i, r })
    }

    /// Constructor that rescales by `s + i + r` before validating, so inputs
    /// only need to be nonnegative with a positive sum. Useful to absorb
    /// integrator drift.
    pub fn new_renormalized(s: f64, i: f64, r: f64) -> Result<Self, ModelError> {
        let sum = s + i + r;
        if !sum.is_finite() || sum <= 0.0 {
            return Err(ModelError::OffSimplex { sum });
        }
        Self::new(s / sum, i / sum, r / sum)
    }

    pub(crate) fn from_parts_unchecked(s: f64, i: f64, r: f64) -> Self {
        Self { s, i, r }
    }

    /// Susceptible proportion.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Infected proportion.
    pub fn i(&self) -> f64 {
        self.i
    }

    /// Recovered proportion.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Components as `[s, i, r]`.
    pub fn as_array(&self) -> [f64; 3] {
        [self.s, self.i, self.r]
    }

    /// Max-norm distance to another state.
    pub fn max_norm_distance(&self, other: &EpiState) -> f64 {
        let ds = (self.s - other.s).abs();
        let di = (self.i - other.i).abs();
        let dr = (self.r - other.r).abs();
        ds.max(di).max(dr)
    }
}

/// Threshold quantities derived from the rates and the contact profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Basic reproductive number `beta C0 / (gamma + mu)`.
    pub r0: f64,
    /// `mu / (mu + gamma)`, in `(0, 1)`.
    pub r_mu: f64,
    /// `phi / (mu + gamma)`, `>= 0`.
    pub r_phi: f64,
    /// Disease-free limit of the incidence multiplier; equals `C^i` for
    /// constant contacts.
    pub c0: f64,
}

/// Computes `R0`, `R_mu`, `R_phi` and the incidence limit `C0`.
pub fn derived_rates(p: &ModelParams, c: &ContactProfile) -> Result<DerivedRates, ModelError> {
    p.validate()?;
    let c0 = c.c_i();
    Ok(DerivedRates {
        r0: p.beta * c0 / (p.gamma + p.mu),
        r_mu: p.mu / (p.mu + p.gamma),
        r_phi: p.phi / (p.mu + p.gamma),
        c0,
    })
}

/// Contact activity `s + i kappa + r theta`, i.e. the incidence denominator
/// normalized by `C^s`.
fn activity(state: &EpiState, c: &ContactProfile) -> f64 {
    state.s() + state.i() * c.kappa() + state.r() * c.theta()
}

fn check_activity(state: &EpiState, c: &ContactProfile) -> Result<f64, ModelError> {
    let act = activity(state, c);
    let denominator = if c.c_s().is_finite() {
        c.c_s() * act
    } else {
        act
    };
    if !(denominator > SINGULAR_DENOMINATOR) {
        return Err(ModelError::SingularDenominator { denominator });
    }
    Ok(act)
}

/// The incidence multiplier `g(s, i, r) = C^s C^i / (s C^s + i C^i + r C^r)`.
///
/// At the disease-free state `(1, 0, 0)` this equals `C^i`.
pub fn incidence(state: &EpiState, c: &ContactProfile) -> Result<f64, ModelError> {
    let act = check_activity(state, c)?;
    Ok(c.c_i() / act)
}

/// Partial derivatives `[dg/ds, dg/di, dg/dr]` of the incidence multiplier.
///
/// For constant contacts, `dg/dh = -g^2 C^h / (C^s C^i)`.
pub fn incidence_partials(state: &EpiState, c: &ContactProfile) -> Result<[f64; 3], ModelError> {
    let act = check_activity(state, c)?;
    let g = c.c_i() / act;
    if g == 0.0 {
        return Ok([0.0, 0.0, 0.0]);
    }
    let scale = -g * g / c.c_i();
    Ok([scale, scale * c.kappa(), scale * c.theta()])
}

/// Right-hand side `[ds/dt, di/dt, dr/dt]` of the rescaled system.
///
/// The components sum to `mu (1 - s - i - r)`, which vanishes on the simplex.
pub fn rhs(state: &EpiState, p: &ModelParams, c: &ContactProfile) -> Result<[f64; 3], ModelError> {
    rhs_components(state.s(), state.i(), state.r(), p, c)
}

/// [`rhs`] on raw components, without the simplex check. The vector field is
/// defined slightly off the simplex, which difference-quotient probes and
/// integrator stages rely on.
pub fn rhs_components(
    s: f64,
    i: f64,
    r: f64,
    p: &ModelParams,
    c: &ContactProfile,
) -> Result<[f64; 3], ModelError> {
    let state = EpiState::from_parts_unchecked(s, i, r);
    let g = incidence(&state, c)?;
    let infection = g * p.beta * s * i;
    let relapse = p.phi * r * i;
    Ok([
        -infection + p.mu - p.mu * s,
        infection + relapse - (p.gamma + p.mu) * i,
        p.gamma * i - relapse - p.mu * r,
    ])
}

/// Rescales absolute compartment counts `(S, I, R)` with total `N` to
/// proportions on the simplex.
pub fn rescale_absolute(s: f64, i: f64, r: f64, n: f64) -> Result<EpiState, ModelError> {
    require(n.is_finite() && n > 0.0, "n", n)?;
    for (name, v) in [("s_count", s), ("i_count", i), ("r_count", r)] {
        require(v.is_finite() && v >= 0.0, name, v)?;
    }
    let total = s + i + r;
    if (total - n).abs() > SIMPLEX_TOL * n {
        return Err(ModelError::TotalMismatch { total, expected: n });
    }
    EpiState::new(s / n, i / n, r / n)
}
