//! Bifurcation branch sweeps over `R0`, region classification and
//! `(kappa, theta)` surface grids.
//!
//! `R0` is swept by scaling `C^i` (so `C^s` and `C^r` co-vary at fixed
//! ratios). Region boundaries are refined by bisection on the root count,
//! and cells whose roots merged at a fold are flagged degenerate rather than
//! classified.

use alloc::vec::Vec;
use core::fmt;

use crate::equilibria::{
    cubic_coefficients, endemic_equilibria, unit_interval_roots, EquilibriaError,
};
use crate::model::{derived_rates, ContactProfile, ModelError, ModelParams};
use crate::simulate::{integrate, integrate_converging, ScenarioSpec, SimulateError};
use crate::stability::StabilityLabel;
use crate::theorem::{r0_window, WINDOW_RESOLUTION};

/// Errors from sweep construction.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepError {
    /// Bad grid description.
    InvalidGrid(&'static str),
    /// Parameter validation failure.
    Model(ModelError),
    /// Equilibrium computation failure.
    Equilibria(EquilibriaError),
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepError::InvalidGrid(what) => write!(f, "invalid grid: {what}"),
            SweepError::Model(e) => write!(f, "{e}"),
            SweepError::Equilibria(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SweepError {}

impl From<ModelError> for SweepError {
    fn from(e: ModelError) -> Self {
        SweepError::Model(e)
    }
}

impl From<EquilibriaError> for SweepError {
    fn from(e: EquilibriaError) -> Self {
        SweepError::Equilibria(e)
    }
}

/// Region labels by endemic-root pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLabel {
    /// No endemic equilibrium.
    R1,
    /// One stable and one unstable endemic point.
    R2,
    /// Three endemic points: stable, unstable, stable by increasing `i*`.
    R3,
    /// One stable endemic point.
    R4,
    /// Pattern matches none of the above (degenerate or rejected cells).
    Unclassified,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionLabel::R1 => "R1",
            RegionLabel::R2 => "R2",
            RegionLabel::R3 => "R3",
            RegionLabel::R4 => "R4",
            RegionLabel::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// One point of a bifurcation branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    /// Basic reproductive number of the cell.
    pub r0: f64,
    /// Endemic infected proportion.
    pub i_star: f64,
    /// Stability verdict.
    pub stability: StabilityLabel,
}

/// A connected branch of endemic points across the sweep.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BifurcationBranch {
    /// Points in ascending `r0` order.
    pub points: Vec<BranchPoint>,
}

/// Equilibria of one `R0` gridpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramCell {
    /// Basic reproductive number of the cell.
    pub r0: f64,
    /// Infected contact rate that realizes it.
    pub c_i: f64,
    /// Endemic `(i*, stability)` pairs sorted by `i*`.
    pub endemic: Vec<(f64, StabilityLabel)>,
    /// Whether roots merged at this cell.
    pub degenerate: bool,
}

/// A swept bifurcation diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagram {
    /// Contact ratio of the sweep.
    pub kappa: f64,
    /// Contact ratio of the sweep.
    pub theta: f64,
    /// Per-gridpoint equilibria in ascending `r0`.
    pub cells: Vec<DiagramCell>,
    /// Branches connected across adjacent cells.
    pub branches: Vec<BifurcationBranch>,
    /// Refined `r0` values where the endemic root count changes.
    pub region_boundaries: Vec<f64>,
}

/// Infected contact rate realizing a target `R0` at the given rates.
pub fn c_i_for_r0(p: &ModelParams, r0: f64) -> f64 {
    r0 * (p.gamma + p.mu) / p.beta
}

fn root_count(p: &ModelParams, kappa: f64, theta: f64, r0: f64) -> Result<usize, SweepError> {
    let c = ContactProfile::from_ratios(c_i_for_r0(p, r0), kappa, theta)?;
    let d = derived_rates(p, &c)?;
    let coeffs = cubic_coefficients(&d, kappa, theta);
    let (roots, _) = unit_interval_roots(&coeffs)?;
    Ok(roots.len())
}

/// Maximum `i*` jump between adjacent cells for two points to join the same
/// branch.
const BRANCH_JUMP: f64 = 0.05;

fn connect_branches(cells: &[DiagramCell]) -> Vec<BifurcationBranch> {
    let mut finished: Vec<BifurcationBranch> = Vec::new();
    let mut open: Vec<BifurcationBranch> = Vec::new();
    for cell in cells {
        let mut taken = alloc::vec![false; open.len()];
        let mut next_open: Vec<BifurcationBranch> = Vec::new();
        for &(i_star, stability) in &cell.endemic {
            let point = BranchPoint {
                r0: cell.r0,
                i_star,
                stability,
            };
            // Nearest unconsumed branch end within the jump window.
            let mut best: Option<(usize, f64)> = None;
            for (idx, branch) in open.iter().enumerate() {
                if taken[idx] {
                    continue;
                }
                let last = branch.points.last().expect("open branches are nonempty");
                let dist = (last.i_star - i_star).abs();
                if dist <= BRANCH_JUMP && best.is_none_or(|(_, d)| dist < d) {
                    best = Some((idx, dist));
                }
            }
            match best {
                Some((idx, _)) => {
                    taken[idx] = true;
                    let mut branch = core::mem::take(&mut open[idx]);
                    branch.points.push(point);
                    next_open.push(branch);
                }
                None => next_open.push(BifurcationBranch {
                    points: alloc::vec![point],
                }),
            }
        }
        for (idx, branch) in open.into_iter().enumerate() {
            if !taken[idx] && !branch.points.is_empty() {
                finished.push(branch);
            }
        }
        open = next_open;
    }
    finished.extend(open.into_iter().filter(|b| !b.points.is_empty()));
    finished.sort_by(|a, b| {
        a.points[0]
            .r0
            .partial_cmp(&b.points[0].r0)
            .expect("finite r0")
            .then(
                a.points[0]
                    .i_star
                    .partial_cmp(&b.points[0].i_star)
                    .expect("finite i*"),
            )
    });
    finished
}

/// Sweeps `R0` over `[r0_range.0, r0_range.1]` with `steps` gridpoints,
/// computing the endemic equilibria of every cell, connecting branches, and
/// refining the root-count boundaries by bisection.
pub fn branch_sweep(
    p: &ModelParams,
    kappa: f64,
    theta: f64,
    r0_range: (f64, f64),
    steps: usize,
) -> Result<BifurcationDiagram, SweepError> {
    if steps < 2 {
        return Err(SweepError::InvalidGrid("at least two R0 gridpoints"));
    }
    if !(r0_range.0 > 0.0 && r0_range.1 > r0_range.0) {
        return Err(SweepError::InvalidGrid("R0 range must be positive and increasing"));
    }
    p.validate()?;

    let mut cells = Vec::with_capacity(steps);
    for k in 0..steps {
        let r0 = r0_range.0 + (r0_range.1 - r0_range.0) * k as f64 / (steps - 1) as f64;
        let c_i = c_i_for_r0(p, r0);
        let contacts = ContactProfile::from_ratios(c_i, kappa, theta)?;
        let set = endemic_equilibria(p, &contacts)?;
        cells.push(DiagramCell {
            r0,
            c_i,
            endemic: set
                .endemic
                .iter()
                .map(|pt| (pt.i_star, pt.stability))
                .collect(),
            degenerate: set.degenerate,
        });
    }

    // Boundaries: bisect each adjacent pair with differing counts.
    let mut region_boundaries = Vec::new();
    for pair in cells.windows(2) {
        let (lo_cell, hi_cell) = (&pair[0], &pair[1]);
        if lo_cell.endemic.len() == hi_cell.endemic.len() {
            continue;
        }
        let n_lo = lo_cell.endemic.len();
        let (mut lo, mut hi) = (lo_cell.r0, hi_cell.r0);
        while hi - lo > WINDOW_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if root_count(p, kappa, theta, mid).unwrap_or(n_lo) == n_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        region_boundaries.push(0.5 * (lo + hi));
    }

    Ok(BifurcationDiagram {
        kappa,
        theta,
        branches: connect_branches(&cells),
        cells,
        region_boundaries,
    })
}

/// Labels the segments between region boundaries by their endemic pattern.
/// Returns one label per segment (`region_boundaries.len() + 1` entries).
pub fn classify_regions(diag: &BifurcationDiagram) -> Vec<RegionLabel> {
    let mut labels = Vec::with_capacity(diag.region_boundaries.len() + 1);
    let mut lo = f64::NEG_INFINITY;
    for k in 0..=diag.region_boundaries.len() {
        let hi = diag
            .region_boundaries
            .get(k)
            .copied()
            .unwrap_or(f64::INFINITY);
        // Representative: a non-degenerate cell from the segment middle,
        // away from the boundary folds.
        let in_segment: Vec<&DiagramCell> = diag
            .cells
            .iter()
            .filter(|c| c.r0 > lo && c.r0 < hi && !c.degenerate)
            .collect();
        let cell = in_segment.get(in_segment.len() / 2).copied();
        labels.push(cell.map_or(RegionLabel::Unclassified, classify_cell));
        lo = hi;
    }
    labels
}

fn classify_cell(cell: &DiagramCell) -> RegionLabel {
    use StabilityLabel::{Stable, Unstable};
    let pattern: Vec<StabilityLabel> = cell.endemic.iter().map(|&(_, s)| s).collect();
    match pattern.as_slice() {
        [] => RegionLabel::R1,
        [Stable] => RegionLabel::R4,
        [Unstable, Stable] => RegionLabel::R2,
        [Stable, Unstable, Stable] => RegionLabel::R3,
        _ => RegionLabel::Unclassified,
    }
}

/// Rectangular `(kappa, theta)` grid with one payload value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Kappa gridpoints, ascending.
    pub kappa: Vec<f64>,
    /// Theta gridpoints, ascending.
    pub theta: Vec<f64>,
    /// Row-major payload: `payload[ik * theta.len() + it]`.
    pub payload: Vec<f64>,
    /// Cells whose evaluation failed (payload holds NaN there).
    pub missing: usize,
}

impl SweepGrid {
    /// Payload at `(kappa index, theta index)`.
    pub fn get(&self, ik: usize, it: usize) -> f64 {
        self.payload[ik * self.theta.len() + it]
    }
}

fn linspace(range: (f64, f64), n: usize) -> Result<Vec<f64>, SweepError> {
    if n < 2 || !(range.1 > range.0) {
        return Err(SweepError::InvalidGrid(
            "ranges need at least two ascending gridpoints",
        ));
    }
    Ok((0..n)
        .map(|k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64)
        .collect())
}

/// Limiting infected proportion of one `(kappa, theta)` cell started from
/// `i(0) = i0` under the basin convention (ten recovered per ten thousand).
pub fn heatmap_cell(
    p: &ModelParams,
    c_i: f64,
    kappa: f64,
    theta: f64,
    i0: f64,
    horizon: f64,
    stride: f64,
) -> Result<f64, SimulateError> {
    let contacts = ContactProfile::from_ratios(c_i, kappa, theta)?;
    let spec = ScenarioSpec {
        params: *p,
        contacts,
        initial: crate::simulate::basin_initial(i0)?,
        horizon,
        stride,
    };
    Ok(integrate_converging(&spec)?.final_state().i())
}

/// Peak infected proportion of one `(kappa, theta)` cell started from
/// `i(0) = i0`.
pub fn peak_cell(
    p: &ModelParams,
    c_i: f64,
    kappa: f64,
    theta: f64,
    i0: f64,
    horizon: f64,
    stride: f64,
) -> Result<f64, SimulateError> {
    let contacts = ContactProfile::from_ratios(c_i, kappa, theta)?;
    let spec = ScenarioSpec {
        params: *p,
        contacts,
        initial: crate::simulate::basin_initial(i0)?,
        horizon,
        stride,
    };
    Ok(integrate(&spec)?.peak_infected().1)
}

/// Grid of limiting infected proportions over `(kappa, theta)` at fixed
/// `C^i`. Failed cells are recorded as NaN and counted in `missing`.
#[allow(clippy::too_many_arguments)]
pub fn equilibrium_heatmap(
    p: &ModelParams,
    c_i: f64,
    kappa_range: (f64, f64),
    theta_range: (f64, f64),
    resolution: (usize, usize),
    i0: f64,
    horizon: f64,
    stride: f64,
) -> Result<SweepGrid, SweepError> {
    let kappa = linspace(kappa_range, resolution.0)?;
    let theta = linspace(theta_range, resolution.1)?;
    let mut payload = Vec::with_capacity(kappa.len() * theta.len());
    let mut missing = 0;
    for &ka in &kappa {
        for &th in &theta {
            match heatmap_cell(p, c_i, ka, th, i0, horizon, stride) {
                Ok(v) => payload.push(v),
                Err(_) => {
                    payload.push(f64::NAN);
                    missing += 1;
                }
            }
        }
    }
    Ok(SweepGrid {
        kappa,
        theta,
        payload,
        missing,
    })
}

/// Grid of three-root window lengths `r0_max - 1` over `(kappa, theta)`.
pub fn r3_window_surface(
    p: &ModelParams,
    kappa_range: (f64, f64),
    theta_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<SweepGrid, SweepError> {
    let kappa = linspace(kappa_range, resolution.0)?;
    let theta = linspace(theta_range, resolution.1)?;
    let mut payload = Vec::with_capacity(kappa.len() * theta.len());
    for &ka in &kappa {
        for &th in &theta {
            payload.push(r0_window(p, ka, th)?.len());
        }
    }
    Ok(SweepGrid {
        kappa,
        theta,
        payload,
        missing: 0,
    })
}
