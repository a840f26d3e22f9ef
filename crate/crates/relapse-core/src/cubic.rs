//! Closed-form solution of quadratic and cubic equations with Newton polish.
//!
//! Three distinct real roots are obtained through the trigonometric form of
//! the depressed cubic; the one-real-root case goes through Cardano. Real
//! roots are then refined by a few Newton steps on the monic polynomial,
//! which keeps the fold regions of the endemic cubic well conditioned.

use core::fmt;

#[cfg(not(feature = "std"))]
use crate::fmath::FloatExt;

/// Leading coefficients at or below this magnitude demote the equation to the
/// next lower degree.
pub const DEGENERATE_LEADING: f64 = 1e-13;

/// Residual target of the Newton polish on the monic cubic.
pub const POLISH_RESIDUAL: f64 = 1e-10;

/// Iteration cap of the Newton polish.
pub const POLISH_MAX_ITER: usize = 50;

/// Errors from root refinement.
#[derive(Debug, Clone, PartialEq)]
pub enum CubicError {
    /// Newton refinement failed to reach [`POLISH_RESIDUAL`] within
    /// [`POLISH_MAX_ITER`] iterations, which signals an ill-conditioned
    /// polynomial.
    PolishFailed {
        /// Best residual reached.
        residual: f64,
    },
}

impl fmt::Display for CubicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubicError::PolishFailed { residual } => {
                write!(f, "root polish stalled at residual {residual:e}")
            }
        }
    }
}

impl core::error::Error for CubicError {}

/// Roots of a genuine cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Three real roots in ascending order (possibly equal at a fold).
    ThreeReal([f64; 3]),
    /// One real root plus a complex-conjugate pair.
    OneReal {
        /// The real root.
        root: f64,
        /// Real part of the conjugate pair.
        pair_re: f64,
        /// Absolute imaginary part of the conjugate pair.
        pair_im: f64,
    },
}

/// Solves `a3 x^3 + a2 x^2 + a1 x + a0 = 0` for `|a3|` above
/// [`DEGENERATE_LEADING`].
///
/// The discriminant decides between the trigonometric (three real) and
/// Cardano (one real) branches; boundary cases fall to the trigonometric
/// branch with the acos argument clamped, which yields the correct repeated
/// roots.
pub fn solve_cubic(a3: f64, a2: f64, a1: f64, a0: f64) -> CubicRoots {
    debug_assert!(a3.abs() > DEGENERATE_LEADING);
    let b = a2 / a3;
    let c = a1 / a3;
    let d = a0 / a3;

    // Depressed form y^3 + p y + q with x = y - b/3.
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    // Repeated roots sit on disc = 0; resolve roundoff-scale positives in
    // favor of the (clamped) trigonometric branch so folds come out as
    // coincident real roots.
    let disc_scale = (0.25 * q * q).max((p * p * p / 27.0).abs());
    let boundary = p <= 0.0 && disc <= 1e-12 * disc_scale;

    if disc <= 0.0 || boundary {
        // Three real roots; p <= 0 is implied here.
        let m = 2.0 * (-p / 3.0).sqrt();
        if m == 0.0 {
            return CubicRoots::ThreeReal([shift; 3]);
        }
        let mut cos_arg = 3.0 * q / (p * m);
        cos_arg = cos_arg.clamp(-1.0, 1.0);
        let angle = cos_arg.acos() / 3.0;
        let two_thirds_pi = 2.0 * core::f64::consts::PI / 3.0;
        let mut roots = [
            m * angle.cos() + shift,
            m * (angle - two_thirds_pi).cos() + shift,
            m * (angle + two_thirds_pi).cos() + shift,
        ];
        roots.sort_unstable_by(|x, y| x.partial_cmp(y).expect("roots are finite"));
        CubicRoots::ThreeReal(roots)
    } else {
        let sq = disc.sqrt();
        let u = (-0.5 * q + sq).cbrt();
        let v = (-0.5 * q - sq).cbrt();
        CubicRoots::OneReal {
            root: u + v + shift,
            pair_re: -0.5 * (u + v) + shift,
            pair_im: 0.5 * 3.0f64.sqrt() * (u - v).abs(),
        }
    }
}

/// Real roots of `a2 x^2 + a1 x + a0 = 0`, ascending. Degenerate leading
/// coefficients demote to the linear (or constant, yielding no roots) case.
pub fn solve_quadratic_real(a2: f64, a1: f64, a0: f64) -> ([f64; 2], usize) {
    if a2.abs() <= DEGENERATE_LEADING {
        if a1.abs() <= DEGENERATE_LEADING {
            return ([0.0; 2], 0);
        }
        return ([-a0 / a1, 0.0], 1);
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return ([0.0; 2], 0);
    }
    if disc == 0.0 {
        return ([-a1 / (2.0 * a2), 0.0], 1);
    }
    // Citardauq on the small root to avoid cancellation.
    let sq = disc.sqrt();
    let qq = -0.5 * (a1 + sq.copysign(a1));
    let (r1, r2) = if qq == 0.0 {
        (0.0, 0.0)
    } else {
        (qq / a2, a0 / qq)
    };
    if r1 <= r2 {
        ([r1, r2], 2)
    } else {
        ([r2, r1], 2)
    }
}

/// All real roots of `a3 x^3 + a2 x^2 + a1 x + a0 = 0`, ascending, handling
/// degenerate leading coefficients by demotion.
pub fn real_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> ([f64; 3], usize) {
    if a3.abs() <= DEGENERATE_LEADING {
        let (r, n) = solve_quadratic_real(a2, a1, a0);
        return ([r[0], r[1], 0.0], n);
    }
    match solve_cubic(a3, a2, a1, a0) {
        CubicRoots::ThreeReal(r) => (r, 3),
        CubicRoots::OneReal { root, .. } => ([root, 0.0, 0.0], 1),
    }
}

/// Newton-refines `x0` as a root of the monic cubic
/// `x^3 + b x^2 + c x + d`, stopping once the residual drops below
/// [`POLISH_RESIDUAL`].
pub fn polish_monic_cubic(b: f64, c: f64, d: f64, x0: f64) -> Result<f64, CubicError> {
    let eval = |x: f64| ((x + b) * x + c) * x + d;
    let deriv = |x: f64| (3.0 * x + 2.0 * b) * x + c;
    let mut x = x0;
    let mut best = x;
    let mut best_res = eval(x).abs();
    for _ in 0..POLISH_MAX_ITER {
        let f = eval(x);
        if f.abs() < best_res {
            best_res = f.abs();
            best = x;
        }
        if f.abs() < POLISH_RESIDUAL {
            return Ok(x);
        }
        let df = deriv(x);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        x -= step;
        if !x.is_finite() {
            break;
        }
    }
    if best_res < POLISH_RESIDUAL {
        Ok(best)
    } else {
        Err(CubicError::PolishFailed { residual: best_res })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_roots(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn three_distinct_real_roots() {
        // (x - 1)(x - 2)(x - 3) = x^3 - 6x^2 + 11x - 6
        match solve_cubic(1.0, -6.0, 11.0, -6.0) {
            CubicRoots::ThreeReal(r) => assert_roots(&r, &[1.0, 2.0, 3.0], 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn one_real_root_with_pair() {
        // (x - 1)(x^2 + 1) = x^3 - x^2 + x - 1
        match solve_cubic(1.0, -1.0, 1.0, -1.0) {
            CubicRoots::OneReal {
                root,
                pair_re,
                pair_im,
            } => {
                assert!((root - 1.0).abs() < 1e-12);
                assert!(pair_re.abs() < 1e-12);
                assert!((pair_im - 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn triple_and_double_roots() {
        // (x - 2)^3 = x^3 - 6x^2 + 12x - 8
        match solve_cubic(1.0, -6.0, 12.0, -8.0) {
            CubicRoots::ThreeReal(r) => assert_roots(&r, &[2.0, 2.0, 2.0], 1e-5),
            other => panic!("unexpected {other:?}"),
        }
        // (x - 1)(x - 2)^2 = x^3 - 5x^2 + 8x - 4
        match solve_cubic(1.0, -5.0, 8.0, -4.0) {
            CubicRoots::ThreeReal(r) => assert_roots(&r, &[1.0, 2.0, 2.0], 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadratic_demotion() {
        let (r, n) = real_roots(0.0, 1.0, -3.0, 2.0);
        assert_eq!(n, 2);
        assert_roots(&r[..2], &[1.0, 2.0], 1e-12);

        let (r, n) = solve_quadratic_real(0.0, 2.0, -4.0);
        assert_eq!(n, 1);
        assert!((r[0] - 2.0).abs() < 1e-14);

        let (_, n) = solve_quadratic_real(1.0, 0.0, 1.0);
        assert_eq!(n, 0);
    }

    #[test]
    fn quadratic_avoids_cancellation() {
        // x^2 - 1e8 x + 1 has roots ~1e8 and ~1e-8.
        let (r, n) = solve_quadratic_real(1.0, -1e8, 1.0);
        assert_eq!(n, 2);
        assert!((r[0] - 1e-8).abs() < 1e-20);
        assert!((r[1] - 1e8).abs() < 1.0);
    }

    #[test]
    fn polish_converges() {
        // x^3 - 2x^2 - x + 2 = (x-2)(x-1)(x+1), start near 1.9.
        let x = polish_monic_cubic(-2.0, -1.0, 2.0, 1.9).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn random_cubics_reconstruct() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let r1: f64 = rng.random_range(-2.0..2.0);
            let r2: f64 = rng.random_range(-2.0..2.0);
            let r3: f64 = rng.random_range(-2.0..2.0);
            let scale: f64 = rng.random_range(0.1..5.0);
            let a2 = -(r1 + r2 + r3);
            let a1 = r1 * r2 + r1 * r3 + r2 * r3;
            let a0 = -(r1 * r2 * r3);
            match solve_cubic(scale, scale * a2, scale * a1, scale * a0) {
                CubicRoots::ThreeReal(mut got) => {
                    let mut want = [r1, r2, r3];
                    want.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                    got.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                    for (g, w) in got.iter().zip(want.iter()) {
                        assert!((g - w).abs() < 2e-7, "{got:?} vs {want:?}");
                    }
                }
                CubicRoots::OneReal { .. } => panic!("expected three real roots"),
            }
        }
    }
}
