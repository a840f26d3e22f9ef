//! Embedded Runge-Kutta 4(5) integration (Dormand-Prince coefficients).
//!
//! The integrator walks from sample point to sample point (the output
//! stride), clamping internal steps to land exactly on them, and hands each
//! accepted state to a post-step hook before continuing. The epidemic
//! drivers use that hook to renormalize onto the simplex; the host-vector
//! system passes a no-op.

use core::fmt;
use core::ops::ControlFlow;

#[cfg(not(feature = "std"))]
use crate::fmath::FloatExt;

/// Step-size control options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk45Options {
    /// Relative tolerance.
    pub rtol: f64,
    /// Absolute tolerance.
    pub atol: f64,
    /// Steps below this duration abort the integration.
    pub min_step: f64,
    /// Optional cap on the step size.
    pub max_step: Option<f64>,
}

impl Default for Rk45Options {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            min_step: 1e-14,
            max_step: None,
        }
    }
}

/// Integration failure.
#[derive(Debug, Clone, PartialEq)]
pub enum OdeError<E> {
    /// Error control pushed the step below [`Rk45Options::min_step`].
    StepSizeUnderflow {
        /// Time at which the underflow occurred.
        t: f64,
    },
    /// A state or stage evaluation produced a non-finite value.
    NonFiniteState {
        /// Time at which it occurred.
        t: f64,
    },
    /// The right-hand side reported an error.
    Rhs(E),
}

impl<E: fmt::Display> fmt::Display for OdeError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            OdeError::NonFiniteState { t } => write!(f, "non-finite state at t = {t}"),
            OdeError::Rhs(e) => write!(f, "right-hand side failed: {e}"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for OdeError<E> {}

/// Step counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rk45Stats {
    /// Accepted steps.
    pub accepted: usize,
    /// Rejected attempts.
    pub rejected: usize,
    /// Right-hand-side evaluations.
    pub evaluations: usize,
}

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

fn axpy<const N: usize>(y: &[f64; N], h: f64, weights: &[f64], stages: &[[f64; N]]) -> [f64; N] {
    let mut out = *y;
    for (w, k) in weights.iter().zip(stages) {
        if *w == 0.0 {
            continue;
        }
        for n in 0..N {
            out[n] += h * w * k[n];
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t_end`, emitting samples every
/// `stride` time units (plus the initial and final points).
///
/// `post_step` runs after every accepted step and may adjust the state in
/// place. `on_sample` receives each sample and can stop the run early by
/// returning [`ControlFlow::Break`].
#[allow(clippy::too_many_arguments)]
pub fn integrate_adaptive<const N: usize, E, F, P, O>(
    mut f: F,
    y0: [f64; N],
    t0: f64,
    t_end: f64,
    stride: f64,
    opts: &Rk45Options,
    mut post_step: P,
    mut on_sample: O,
) -> Result<Rk45Stats, OdeError<E>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    P: FnMut(&mut [f64; N]),
    O: FnMut(f64, &[f64; N]) -> ControlFlow<()>,
{
    debug_assert!(t_end > t0 && stride > 0.0);
    let mut stats = Rk45Stats::default();
    let mut t = t0;
    let mut y = y0;
    if on_sample(t, &y).is_break() {
        return Ok(stats);
    }

    let span = t_end - t0;
    let mut h = (span * 1e-4).min(stride);
    if let Some(cap) = opts.max_step {
        h = h.min(cap);
    }

    let mut next_sample = t0 + stride;
    let eval = |f: &mut F, stats: &mut Rk45Stats, t: f64, y: &[f64; N]| -> Result<[f64; N], OdeError<E>> {
        stats.evaluations += 1;
        let k = f(t, y).map_err(OdeError::Rhs)?;
        if k.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFiniteState { t });
        }
        Ok(k)
    };

    while t < t_end {
        let target = next_sample.min(t_end);
        while t < target {
            let mut h_try = h.min(target - t);
            if h_try < opts.min_step {
                // Within roundoff of the sample point.
                if target - t < opts.min_step {
                    break;
                }
                return Err(OdeError::StepSizeUnderflow { t });
            }
            loop {
                let k1 = eval(&mut f, &mut stats, t, &y)?;
                let k2 = eval(&mut f, &mut stats, t + C[0] * h_try, &axpy(&y, h_try, &A2, &[k1]))?;
                let k3 = eval(
                    &mut f,
                    &mut stats,
                    t + C[1] * h_try,
                    &axpy(&y, h_try, &A3, &[k1, k2]),
                )?;
                let k4 = eval(
                    &mut f,
                    &mut stats,
                    t + C[2] * h_try,
                    &axpy(&y, h_try, &A4, &[k1, k2, k3]),
                )?;
                let k5 = eval(
                    &mut f,
                    &mut stats,
                    t + C[3] * h_try,
                    &axpy(&y, h_try, &A5, &[k1, k2, k3, k4]),
                )?;
                let k6 = eval(
                    &mut f,
                    &mut stats,
                    t + C[4] * h_try,
                    &axpy(&y, h_try, &A6, &[k1, k2, k3, k4, k5]),
                )?;
                let stages = [k1, k2, k3, k4, k5, k6, [0.0; N]];
                let y5 = axpy(&y, h_try, &B5[..6], &stages[..6]);
                let k7 = eval(&mut f, &mut stats, t + h_try, &y5)?;
                let full = [k1, k2, k3, k4, k5, k6, k7];

                // Weighted RMS of the embedded error estimate.
                let mut err_sq = 0.0;
                for n in 0..N {
                    let mut e = 0.0;
                    for (w, k) in ERR.iter().zip(full.iter()) {
                        e += w * k[n];
                    }
                    e *= h_try;
                    let scale = opts.atol + opts.rtol * y[n].abs().max(y5[n].abs());
                    err_sq += (e / scale) * (e / scale);
                }
                let err = (err_sq / N as f64).sqrt();

                if err <= 1.0 {
                    stats.accepted += 1;
                    t += h_try;
                    y = y5;
                    if y.iter().any(|v| !v.is_finite()) {
                        return Err(OdeError::NonFiniteState { t });
                    }
                    post_step(&mut y);
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    h = h_try * factor;
                    if let Some(cap) = opts.max_step {
                        h = h.min(cap);
                    }
                    break;
                }
                stats.rejected += 1;
                h_try *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h_try < opts.min_step {
                    return Err(OdeError::StepSizeUnderflow { t });
                }
            }
        }
        t = target;
        if on_sample(t, &y).is_break() {
            return Ok(stats);
        }
        next_sample += stride;
    }
    Ok(stats)
}
