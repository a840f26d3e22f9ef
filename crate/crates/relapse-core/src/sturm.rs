//! Derivative Sturm chains, sign variations, Cauchy indices and exact
//! real-root counting on an interval.
//!
//! For a polynomial with all roots real and distinct, the chain of higher
//! derivatives `[p, p', p'', ...]` is a Sturm chain on any interval, and the
//! number of roots in `[a, b]` equals the drop in sign variations
//! `V(a) - V(b)`. When roots are repeated the chain loses that property, so
//! [`count_roots`] first runs a squarefree check through a truncated
//! polynomial gcd. When a degree-`<= 3` input carries a complex-conjugate
//! pair the variation drop only bounds the root count from above, so the
//! count falls back to the closed-form solver to stay exact; for higher
//! degrees the all-real hypothesis is the caller's responsibility.
//!
//! Generic Euclidean remainder chains are intentionally not implemented;
//! derivative chains are the only chain family needed here, and they leave
//! the second Cauchy-index term of the general Sturm theorem identically
//! zero. The Euclidean variant is a natural extension point.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cubic;

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 16;

/// Endpoint values at or below this magnitude count as roots of the
/// polynomial (or poles of a rational function) sitting on the interval
/// boundary.
pub const ENDPOINT_GUARD: f64 = 1e-13;

/// Coefficient truncation threshold of the gcd remainder sequence.
pub const GCD_TRUNCATION: f64 = 1e-12;

/// Pole separation limit of the Cauchy-index bisection.
pub const POLE_SEPARATION: f64 = 1e-12;

/// Errors from chain construction and root counting.
#[derive(Debug, Clone, PartialEq)]
pub enum SturmError {
    /// Degree exceeds [`MAX_DEGREE`].
    DegreeTooHigh {
        /// Offending degree.
        degree: usize,
    },
    /// All coefficients are zero (or none were given).
    ZeroPolynomial,
    /// The operation needs degree at least one.
    ConstantPolynomial,
    /// Interval bounds are not ordered `a < b`.
    InvalidInterval {
        /// Lower bound.
        a: f64,
        /// Upper bound.
        b: f64,
    },
    /// The polynomial value at an interval endpoint is within
    /// [`ENDPOINT_GUARD`] of zero.
    EndpointRoot {
        /// The endpoint.
        at: f64,
    },
    /// `gcd(p, p')` has positive degree: repeated roots break the
    /// derivative-chain property.
    RepeatedRoot,
    /// The denominator vanishes at an interval endpoint.
    EndpointPole {
        /// The endpoint.
        at: f64,
    },
    /// Poles of the rational function could not be separated or classified
    /// at [`POLE_SEPARATION`] spacing.
    UnresolvedPole,
}

impl fmt::Display for SturmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SturmError::DegreeTooHigh { degree } => {
                write!(f, "degree {degree} exceeds supported maximum {MAX_DEGREE}")
            }
            SturmError::ZeroPolynomial => write!(f, "zero polynomial"),
            SturmError::ConstantPolynomial => write!(f, "constant polynomial"),
            SturmError::InvalidInterval { a, b } => write!(f, "invalid interval [{a}, {b}]"),
            SturmError::EndpointRoot { at } => write!(f, "polynomial vanishes at endpoint {at}"),
            SturmError::RepeatedRoot => write!(f, "repeated roots detected"),
            SturmError::EndpointPole { at } => write!(f, "denominator vanishes at endpoint {at}"),
            SturmError::UnresolvedPole => write!(f, "could not separate denominator roots"),
        }
    }
}

impl core::error::Error for SturmError {}

/// Real univariate polynomial with ascending-degree coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending-degree coefficients, trimming
    /// trailing zeros.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Result<Self, SturmError> {
        let mut coeffs: Vec<f64> = coeffs.into();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(SturmError::ZeroPolynomial);
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(SturmError::DegreeTooHigh {
                degree: coeffs.len() - 1,
            });
        }
        Ok(Self { coeffs })
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Result<Self, SturmError> {
        let mut asc = vec![1.0];
        for &r in roots {
            // Multiply by (x - r).
            let mut next = vec![0.0; asc.len() + 1];
            for (k, &c) in asc.iter().enumerate() {
                next[k] -= r * c;
                next[k + 1] += c;
            }
            asc = next;
        }
        Self::new(asc)
    }

    fn from_trimmed(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    /// Ascending-degree coefficients.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Polynomial degree (zero for constants, including the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Leading (highest-degree) coefficient.
    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("coeffs nonempty")
    }

    /// Whether this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs == [0.0]
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::from_trimmed(vec![0.0]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Polynomial::from_trimmed(coeffs)
    }

    /// Scales so the leading coefficient is one.
    fn monic(&self) -> Polynomial {
        let lead = self.leading();
        Polynomial::from_trimmed(self.coeffs.iter().map(|c| c / lead).collect())
    }

    /// Remainder of `self` divided by monic `div`, with coefficients at or
    /// below `trunc` dropped.
    fn rem_by_monic(&self, div: &Polynomial, trunc: f64) -> Polynomial {
        debug_assert!((div.leading() - 1.0).abs() < 1e-12);
        let mut rem = self.coeffs.clone();
        let dd = div.degree();
        while rem.len() > dd {
            let k = rem.len() - 1;
            let factor = rem[k];
            for (j, &c) in div.coeffs.iter().enumerate() {
                rem[k - dd + j] -= factor * c;
            }
            rem.pop();
        }
        for c in rem.iter_mut() {
            if c.abs() <= trunc {
                *c = 0.0;
            }
        }
        Polynomial::from_trimmed(rem)
    }
}

/// Greatest common divisor of `p` and `q` through the Euclidean remainder
/// sequence, with monic normalization at every step and remainder
/// coefficients truncated at `trunc`.
pub fn gcd_truncated(p: &Polynomial, q: &Polynomial, trunc: f64) -> Polynomial {
    let mut a = p.monic();
    let mut b = q.monic();
    if a.degree() < b.degree() {
        core::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_zero() {
            return a;
        }
        let r = a.rem_by_monic(&b, trunc);
        a = b;
        b = if r.is_zero() { r } else { r.monic() };
    }
}

/// Whether `p` is squarefree under the [`GCD_TRUNCATION`] tolerance.
pub fn is_squarefree(p: &Polynomial) -> bool {
    if p.degree() <= 1 {
        return true;
    }
    gcd_truncated(p, &p.derivative(), GCD_TRUNCATION).degree() == 0
}

/// An ordered chain of polynomials satisfying the Sturm property on the
/// intervals where it is used.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmChain {
    polys: Vec<Polynomial>,
}

impl SturmChain {
    /// Wraps an explicit chain. The Sturm property itself is the caller's
    /// responsibility; [`derivative_chain`] is the checked builder.
    pub fn from_polys(polys: Vec<Polynomial>) -> Result<Self, SturmError> {
        if polys.is_empty() {
            return Err(SturmError::ZeroPolynomial);
        }
        Ok(Self { polys })
    }

    /// Chain members, leading with the original polynomial.
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }
}

/// Signs of the chain values at a point together with their variation count.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSequence {
    /// Signs in `{-1, 0, +1}` of each chain member.
    pub signs: Vec<i8>,
    /// Number of strict sign changes between consecutive nonzero entries.
    pub variations: usize,
}

/// Builds the chain of higher derivatives `[p, p', ..., p^(n)]`.
///
/// For `p` of degree `n` with `n` distinct real roots this is a Sturm chain
/// on any interval.
pub fn derivative_chain(p: &Polynomial) -> Result<SturmChain, SturmError> {
    if p.is_zero() {
        return Err(SturmError::ZeroPolynomial);
    }
    if p.degree() < 1 {
        return Err(SturmError::ConstantPolynomial);
    }
    let mut polys = Vec::with_capacity(p.degree() + 1);
    polys.push(p.clone());
    for _ in 0..p.degree() {
        let next = polys.last().expect("nonempty").derivative();
        polys.push(next);
    }
    Ok(SturmChain { polys })
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Evaluates the chain at `x` and counts sign variations, skipping zeros.
pub fn sign_variations(chain: &SturmChain, x: f64) -> SignSequence {
    let signs: Vec<i8> = chain.polys.iter().map(|p| sign_of(p.eval(x))).collect();
    let mut variations = 0;
    let mut last = 0i8;
    for &s in &signs {
        if s != 0 {
            if last != 0 && s != last {
                variations += 1;
            }
            last = s;
        }
    }
    SignSequence { signs, variations }
}

/// Number of distinct real roots of degree `<= 3` polynomials in `(a, b]`,
/// via the closed-form solver. Used when the chain hypothesis (all roots
/// real) fails.
fn closed_form_count(p: &Polynomial, a: f64, b: f64) -> usize {
    let c = p.coeffs();
    let get = |k: usize| c.get(k).copied().unwrap_or(0.0);
    let (roots, n) = cubic::real_roots(get(3), get(2), get(1), get(0));
    roots[..n].iter().filter(|&&r| r > a && r <= b).count()
}

/// Whether all roots of a degree `<= 3` polynomial are real, decided by the
/// discriminant sign.
fn low_degree_all_real(p: &Polynomial) -> bool {
    let c = p.coeffs();
    match p.degree() {
        0 | 1 => true,
        2 => c[1] * c[1] - 4.0 * c[2] * c[0] >= 0.0,
        3 => {
            let b = c[2] / c[3];
            let cc = c[1] / c[3];
            let d = c[0] / c[3];
            let pp = cc - b * b / 3.0;
            let qq = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
            0.25 * qq * qq + pp * pp * pp / 27.0 <= 0.0
        }
        _ => unreachable!("only called for degree <= 3"),
    }
}

/// Counts distinct real roots of a squarefree `p` in `[a, b]`.
///
/// The count is the variation drop `V(a) - V(b)` of the derivative chain,
/// which is exact whenever all roots of `p` are real (checked and repaired
/// through the closed-form solver for degrees up to three, where a complex
/// pair would otherwise inflate the drop by two). Endpoints must not be
/// roots and repeated roots are rejected, since the derivative-chain
/// argument requires distinct roots.
pub fn count_roots(p: &Polynomial, a: f64, b: f64) -> Result<usize, SturmError> {
    if !(a < b) {
        return Err(SturmError::InvalidInterval { a, b });
    }
    if p.is_zero() {
        return Err(SturmError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(SturmError::ConstantPolynomial);
    }
    // Guard endpoints on the monic scale so the check is invariant under
    // rescaling of the coefficient vector.
    let monic = p.monic();
    if monic.eval(a).abs() < ENDPOINT_GUARD {
        return Err(SturmError::EndpointRoot { at: a });
    }
    if monic.eval(b).abs() < ENDPOINT_GUARD {
        return Err(SturmError::EndpointRoot { at: b });
    }
    if !is_squarefree(p) {
        return Err(SturmError::RepeatedRoot);
    }
    if p.degree() <= 3 && !low_degree_all_real(p) {
        return Ok(closed_form_count(p, a, b));
    }
    let chain = derivative_chain(p)?;
    let va = sign_variations(&chain, a).variations;
    let vb = sign_variations(&chain, b).variations;
    Ok(va.saturating_sub(vb))
}

/// Cauchy index of `num/den` over `[a, b]`.
///
/// Interior poles of odd multiplicity are located by bisection on sign
/// changes of `den` and classified by the local signs of the fraction; with
/// the endpoints required to be pole-free the endpoint half-contributions of
/// the definition vanish. The fraction must be in reduced form.
pub fn cauchy_index(
    num: &Polynomial,
    den: &Polynomial,
    a: f64,
    b: f64,
) -> Result<f64, SturmError> {
    if !(a < b) {
        return Err(SturmError::InvalidInterval { a, b });
    }
    if den.is_zero() {
        return Err(SturmError::ZeroPolynomial);
    }
    let den_monic = den.monic();
    if den_monic.eval(a).abs() < ENDPOINT_GUARD {
        return Err(SturmError::EndpointPole { at: a });
    }
    if den_monic.eval(b).abs() < ENDPOINT_GUARD {
        return Err(SturmError::EndpointPole { at: b });
    }
    if den.degree() == 0 {
        // No poles anywhere: index zero.
        return Ok(0.0);
    }
    if !num.is_zero() && gcd_truncated(num, den, GCD_TRUNCATION).degree() >= 1 {
        // Common factors make pole classification meaningless.
        return Err(SturmError::UnresolvedPole);
    }

    // Scan for sign changes of the denominator; each bracket holds at least
    // one odd-multiplicity root.
    let cells = 1usize << 14;
    let h = (b - a) / cells as f64;
    let mut index = 0.0;
    let mut prev_x = a;
    let mut prev_sign = sign_of(den_monic.eval(a));
    let mut last_pole: Option<f64> = None;
    for k in 1..=cells {
        let x = if k == cells { b } else { a + k as f64 * h };
        let s = sign_of(den_monic.eval(x));
        if s == 0 {
            // Grid point sits on a root; perturbation by half a cell keeps
            // the bracket while restoring a definite sign.
            continue;
        }
        if prev_sign != 0 && s != prev_sign {
            let (mut lo, mut hi) = (prev_x, x);
            let s_lo = prev_sign;
            while hi - lo > POLE_SEPARATION {
                let mid = 0.5 * (lo + hi);
                let sm = sign_of(den_monic.eval(mid));
                if sm == s_lo {
                    lo = mid;
                } else if sm == -s_lo {
                    hi = mid;
                } else {
                    lo = mid;
                    break;
                }
            }
            let pole = 0.5 * (lo + hi);
            if let Some(prev_pole) = last_pole {
                if pole - prev_pole < POLE_SEPARATION {
                    return Err(SturmError::UnresolvedPole);
                }
            }
            last_pole = Some(pole);
            let num_sign = sign_of(num.eval(pole));
            if num_sign == 0 {
                // Numerator vanishes where the denominator changes sign:
                // the fraction was not reduced.
                return Err(SturmError::UnresolvedPole);
            }
            // f jumps to sign(num) * sign(den right of pole) * infinity on
            // the right; the jump contributes that sign to the index.
            index += (num_sign * s) as f64;
        }
        prev_x = x;
        prev_sign = s;
    }
    Ok(index)
}
