//! JSON run configuration and its mapping onto the library types.
//!
//! Rates live at the top level (`beta`, `gamma`, `phi`, `mu`, interpreted
//! per day) together with exactly one contact description: either explicit
//! rates `c_s`, `c_i`, `c_r` or the ratio form `c_i`, `kappa`, `theta`.
//! Command-specific blocks carry ranges, grids, horizons and initial
//! conditions.

use anyhow::{anyhow, bail, Context, Result};
use relapse_core::model::{ContactProfile, EpiState, ModelParams};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,

    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
    pub mu: f64,

    #[serde(default)]
    pub c_s: Option<f64>,
    #[serde(default)]
    pub c_i: Option<f64>,
    #[serde(default)]
    pub c_r: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,

    #[serde(default)]
    pub simulate: Option<SimulateBlock>,
    #[serde(default)]
    pub basin: Option<BasinBlock>,
    #[serde(default)]
    pub bifurcate: Option<BifurcateBlock>,
    #[serde(default)]
    pub heatmap: Option<HeatmapBlock>,
    #[serde(default)]
    pub window: Option<WindowBlock>,
    #[serde(default)]
    pub influenza: Option<InfluenzaBlock>,
    #[serde(default)]
    pub vector: Option<VectorBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    /// Initial infected proportion under the reference-population convention
    /// (ten recovered individuals out of ten thousand).
    #[serde(default)]
    pub rho: Option<f64>,
    /// Explicit initial state; wins over `rho` when both are present.
    #[serde(default)]
    pub initial: Option<InitialState>,
    pub horizon: f64,
    pub stride: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasinBlock {
    pub rho_values: Vec<f64>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_stride")]
    pub stride: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcateBlock {
    pub r0_min: f64,
    pub r0_max: f64,
    #[serde(default = "default_sweep_steps")]
    pub steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapBlock {
    #[serde(default = "zero")]
    pub kappa_min: f64,
    #[serde(default = "one")]
    pub kappa_max: f64,
    #[serde(default = "zero")]
    pub theta_min: f64,
    #[serde(default = "two")]
    pub theta_max: f64,
    #[serde(default = "default_grid_cells")]
    pub kappa_cells: usize,
    #[serde(default = "default_grid_cells")]
    pub theta_cells: usize,
    pub i0: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_stride")]
    pub stride: f64,
    /// "limit" records the limiting infected proportion, "peak" the maximum.
    #[serde(default = "default_payload")]
    pub payload: PayloadKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Limit,
    Peak,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowBlock {
    /// Single-cell query.
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Grid query (used when the scalars are absent).
    #[serde(default = "zero")]
    pub kappa_min: f64,
    #[serde(default = "one")]
    pub kappa_max: f64,
    #[serde(default = "one")]
    pub theta_min: f64,
    #[serde(default = "two")]
    pub theta_max: f64,
    #[serde(default = "default_window_cells")]
    pub kappa_cells: usize,
    #[serde(default = "default_window_cells")]
    pub theta_cells: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfluenzaBlock {
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_influenza_horizon")]
    pub horizon: f64,
    #[serde(default = "default_influenza_stride")]
    pub stride: f64,
    pub variants: Vec<ContactVariant>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactVariant {
    pub kappa: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorBlock {
    pub mu_h: f64,
    pub alpha_h: f64,
    pub gamma: f64,
    pub beta: f64,
    pub mu_v: f64,
    pub alpha_v: f64,
    pub beta_v: f64,
    pub n_h: f64,
    pub n_v: f64,
    /// Contact rates ordered `[S_h, E_h, I_h, R_h, S_v, E_v, I_v]`.
    pub contacts: [f64; 7],
    /// Initial compartment counts in the same order.
    pub initial: [f64; 7],
    #[serde(default)]
    pub constant_incidence: bool,
    pub horizon: f64,
    pub stride: f64,
}

fn zero() -> f64 {
    0.0
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_horizon() -> f64 {
    relapse_core::simulate::DEFAULT_HORIZON
}
fn default_stride() -> f64 {
    relapse_core::simulate::DEFAULT_STRIDE
}
fn default_sweep_steps() -> usize {
    300
}
fn default_grid_cells() -> usize {
    50
}
fn default_window_cells() -> usize {
    25
}
fn default_rho() -> f64 {
    0.001
}
fn default_influenza_horizon() -> f64 {
    300.0
}
fn default_influenza_stride() -> f64 {
    0.25
}
fn default_payload() -> PayloadKind {
    PayloadKind::Limit
}

impl RunConfig {
    /// Loads and parses a config file. IO, syntax and schema problems are
    /// usage errors for exit-code purposes.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        let explicit = cfg.c_s.is_some() || cfg.c_r.is_some();
        let ratios = cfg.kappa.is_some() || cfg.theta.is_some();
        if explicit && ratios {
            bail!(
                "config {} sets both contact forms: give either (c_s, c_i, c_r) \
                 or (c_i, kappa, theta), not both",
                path.display()
            );
        }
        Ok(cfg)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.beta, self.gamma, self.phi, self.mu).map_err(|e| anyhow!("{e}"))
    }

    /// Resolves the contact description; exactly one of the explicit and
    /// ratio forms must be present.
    pub fn contacts(&self) -> Result<ContactProfile> {
        let explicit = self.c_s.is_some() || self.c_r.is_some();
        let ratios = self.kappa.is_some() || self.theta.is_some();
        match (explicit, ratios) {
            (true, true) => bail!("give either (c_s, c_i, c_r) or (c_i, kappa, theta), not both"),
            (false, false) => bail!("missing contacts: set (c_s, c_i, c_r) or (c_i, kappa, theta)"),
            (true, false) => {
                let (c_s, c_i, c_r) = (
                    self.c_s.ok_or_else(|| anyhow!("missing c_s"))?,
                    self.c_i.ok_or_else(|| anyhow!("missing c_i"))?,
                    self.c_r.ok_or_else(|| anyhow!("missing c_r"))?,
                );
                ContactProfile::new(c_s, c_i, c_r).map_err(|e| anyhow!("{e}"))
            }
            (false, true) => {
                let (c_i, kappa, theta) = (
                    self.c_i.ok_or_else(|| anyhow!("missing c_i"))?,
                    self.kappa.ok_or_else(|| anyhow!("missing kappa"))?,
                    self.theta.ok_or_else(|| anyhow!("missing theta"))?,
                );
                ContactProfile::from_ratios(c_i, kappa, theta).map_err(|e| anyhow!("{e}"))
            }
        }
    }

    /// Infected contact rate, needed by the grid commands.
    pub fn c_i(&self) -> Result<f64> {
        self.c_i.ok_or_else(|| anyhow!("missing c_i"))
    }
}

impl SimulateBlock {
    pub fn initial_state(&self) -> Result<EpiState> {
        if let Some(init) = self.initial {
            return EpiState::new(init.s, init.i, init.r).map_err(|e| anyhow!("{e}"));
        }
        let rho = self
            .rho
            .ok_or_else(|| anyhow!("simulate block needs rho or an explicit initial state"))?;
        relapse_core::simulate::basin_initial(rho).map_err(|e| anyhow!("{e}"))
    }
}
