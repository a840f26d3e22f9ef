//! Command implementations.

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use serde::Serialize;

use relapse_core::equilibria::{endemic_equilibria, EquilibriumSet};
use relapse_core::extensions::{integrate_vector_borne, VectorBorneParams};
use relapse_core::model::ContactProfile;
use relapse_core::simulate::{
    basin_probe, integrate, MatchedEquilibrium, ScenarioSpec, Trajectory,
};
use relapse_core::stability::{classify_dfe, classify_equilibrium};
use relapse_core::sturm::{count_roots, Polynomial};
use relapse_core::sweep::{
    branch_sweep, classify_regions, heatmap_cell, peak_cell, RegionLabel,
};
use relapse_core::theorem::{inequality_holds, r0_window, theorem_constants, theta_stars};

use crate::config::{PayloadKind, RunConfig};
use crate::output::{csv, fmt_f64, OutDir};

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        bail!("grids need at least two ascending points");
    }
    Ok((0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect())
}

fn matched_index(m: Option<MatchedEquilibrium>) -> i64 {
    match m {
        None => -1,
        Some(MatchedEquilibrium::DiseaseFree) => 0,
        Some(MatchedEquilibrium::Endemic(k)) => k as i64 + 1,
    }
}

fn trajectory_csv(traj: &Trajectory) -> String {
    csv(
        &["t", "s", "i", "r"],
        traj.times.iter().zip(&traj.states).map(|(t, st)| {
            vec![
                fmt_f64(*t),
                fmt_f64(st.s()),
                fmt_f64(st.i()),
                fmt_f64(st.r()),
            ]
        }),
    )
}

#[derive(Serialize)]
struct EquilibriumPointOut {
    i_star: f64,
    s: f64,
    r: f64,
    stability: String,
}

#[derive(Serialize)]
struct EquilibriaOut {
    dfe: EquilibriumPointOut,
    endemic: Vec<EquilibriumPointOut>,
    rejected: Vec<RejectedOut>,
    degenerate: bool,
}

#[derive(Serialize)]
struct RejectedOut {
    i_star: f64,
    reason: String,
}

fn equilibria_out(set: &EquilibriumSet) -> EquilibriaOut {
    let point = |p: &relapse_core::equilibria::EquilibriumPoint| EquilibriumPointOut {
        i_star: p.i_star,
        s: p.state.s(),
        r: p.state.r(),
        stability: p.stability.to_string(),
    };
    EquilibriaOut {
        dfe: point(&set.dfe),
        endemic: set.endemic.iter().map(point).collect(),
        rejected: set
            .rejected
            .iter()
            .map(|r| RejectedOut {
                i_star: r.i_star,
                reason: format!("{:?}", r.reason),
            })
            .collect(),
        degenerate: set.degenerate,
    }
}

pub fn equilibria(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let set = endemic_equilibria(&cfg.params()?, &cfg.contacts()?).map_err(|e| anyhow!("{e}"))?;
    let path = out.write_json("equilibria.json", &equilibria_out(&set))?;
    Ok(format!(
        "{} endemic point(s), DFE {}; wrote {}",
        set.endemic.len(),
        set.dfe.stability,
        path.display()
    ))
}

#[derive(Serialize)]
struct StabilityOut {
    i_star: f64,
    s: f64,
    i: f64,
    r: f64,
    eigenvalue_real_parts: [f64; 3],
    label: String,
}

pub fn stability(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let p = cfg.params()?;
    let c = cfg.contacts()?;
    let set = endemic_equilibria(&p, &c).map_err(|e| anyhow!("{e}"))?;
    let mut rows = Vec::new();
    let dfe_class = classify_dfe(&p, &c).map_err(|e| anyhow!("{e}"))?;
    rows.push(StabilityOut {
        i_star: 0.0,
        s: 1.0,
        i: 0.0,
        r: 0.0,
        eigenvalue_real_parts: dfe_class.real_parts,
        label: dfe_class.label.to_string(),
    });
    for point in &set.endemic {
        let class = classify_equilibrium(point, &p, &c).map_err(|e| anyhow!("{e}"))?;
        rows.push(StabilityOut {
            i_star: point.i_star,
            s: point.state.s(),
            i: point.state.i(),
            r: point.state.r(),
            eigenvalue_real_parts: class.real_parts,
            label: class.label.to_string(),
        });
    }
    let path = out.write_json("stability.json", &rows)?;
    Ok(format!(
        "classified {} equilibria; wrote {}",
        rows.len(),
        path.display()
    ))
}

pub fn simulate(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let block = cfg
        .simulate
        .as_ref()
        .ok_or_else(|| anyhow!("config has no simulate block"))?;
    let spec = ScenarioSpec {
        params: cfg.params()?,
        contacts: cfg.contacts()?,
        initial: block.initial_state()?,
        horizon: block.horizon,
        stride: block.stride,
    };
    let traj = integrate(&spec).map_err(|e| anyhow!("{e}"))?;
    let path = out.write("trajectory.csv", &trajectory_csv(&traj))?;
    Ok(format!(
        "integrated to t = {} ({} samples, final i = {:.6}); wrote {}",
        traj.final_time(),
        traj.times.len(),
        traj.final_state().i(),
        path.display()
    ))
}

pub fn basin(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let block = cfg
        .basin
        .as_ref()
        .ok_or_else(|| anyhow!("config has no basin block"))?;
    let cells = basin_probe(
        &cfg.params()?,
        &cfg.contacts()?,
        &block.rho_values,
        block.horizon,
        block.stride,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let body = csv(
        &["rho", "i_limit", "matched_index"],
        cells.iter().map(|cell| {
            vec![
                fmt_f64(cell.rho),
                fmt_f64(cell.limit_i),
                matched_index(cell.matched).to_string(),
            ]
        }),
    );
    let path = out.write("basin.csv", &body)?;
    Ok(format!("probed {} initial conditions; wrote {}", cells.len(), path.display()))
}

#[derive(Serialize)]
struct BifurcationOut {
    kappa: f64,
    theta: f64,
    region_boundaries: Vec<f64>,
    regions: Vec<String>,
}

pub fn bifurcate(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let block = cfg
        .bifurcate
        .as_ref()
        .ok_or_else(|| anyhow!("config has no bifurcate block"))?;
    let c = cfg.contacts()?;
    let diag = branch_sweep(
        &cfg.params()?,
        c.kappa(),
        c.theta(),
        (block.r0_min, block.r0_max),
        block.steps,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let labels = classify_regions(&diag);

    let region_of = |r0: f64| -> RegionLabel {
        let seg = diag
            .region_boundaries
            .iter()
            .position(|&b| r0 < b)
            .unwrap_or(diag.region_boundaries.len());
        labels.get(seg).copied().unwrap_or(RegionLabel::Unclassified)
    };

    let mut rows = Vec::new();
    for branch in &diag.branches {
        for pt in &branch.points {
            rows.push(vec![
                fmt_f64(pt.r0),
                fmt_f64(pt.i_star),
                pt.stability.to_string(),
                region_of(pt.r0).to_string(),
            ]);
        }
    }
    let csv_path = out.write("branches.csv", &csv(&["r0", "i_star", "stability", "region"], rows))?;
    let json_path = out.write_json(
        "bifurcation.json",
        &BifurcationOut {
            kappa: c.kappa(),
            theta: c.theta(),
            region_boundaries: diag.region_boundaries.clone(),
            regions: labels.iter().map(|l| l.to_string()).collect(),
        },
    )?;
    Ok(format!(
        "{} branches, boundaries {:?}; wrote {} and {}",
        diag.branches.len(),
        diag.region_boundaries,
        csv_path.display(),
        json_path.display()
    ))
}

pub fn heatmap(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let block = cfg
        .heatmap
        .as_ref()
        .ok_or_else(|| anyhow!("config has no heatmap block"))?;
    let p = cfg.params()?;
    let c_i = cfg.c_i()?;
    let kappas = linspace(block.kappa_min, block.kappa_max, block.kappa_cells)?;
    let thetas = linspace(block.theta_min, block.theta_max, block.theta_cells)?;

    let cells: Vec<(f64, f64)> = kappas
        .iter()
        .flat_map(|&ka| thetas.iter().map(move |&th| (ka, th)))
        .collect();
    let payload: Vec<f64> = cells
        .par_iter()
        .map(|&(ka, th)| {
            let run = match block.payload {
                PayloadKind::Limit => heatmap_cell(&p, c_i, ka, th, block.i0, block.horizon, block.stride),
                PayloadKind::Peak => peak_cell(&p, c_i, ka, th, block.i0, block.horizon, block.stride),
            };
            run.unwrap_or(f64::NAN)
        })
        .collect();

    let body = csv(
        &["kappa", "theta", "payload"],
        cells
            .iter()
            .zip(&payload)
            .map(|(&(ka, th), &v)| vec![fmt_f64(ka), fmt_f64(th), fmt_f64(v)]),
    );
    let path = out.write("heatmap.csv", &body)?;
    let missing = payload.iter().filter(|v| v.is_nan()).count();
    Ok(format!(
        "computed {} cells ({missing} missing); wrote {}",
        cells.len(),
        path.display()
    ))
}

#[derive(Serialize)]
struct WindowOut {
    kappa: f64,
    theta: f64,
    r0_max: f64,
    length: f64,
}

pub fn window(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let block = cfg
        .window
        .as_ref()
        .ok_or_else(|| anyhow!("config has no window block"))?;
    let p = cfg.params()?;
    match (block.kappa, block.theta) {
        (Some(kappa), Some(theta)) => {
            let w = r0_window(&p, kappa, theta).map_err(|e| anyhow!("{e}"))?;
            let path = out.write_json(
                "window.json",
                &WindowOut {
                    kappa,
                    theta,
                    r0_max: w.r0_max,
                    length: w.len(),
                },
            )?;
            Ok(format!(
                "window [1, {:.6}] (length {:.6}); wrote {}",
                w.r0_max,
                w.len(),
                path.display()
            ))
        }
        (None, None) => {
            let kappas = linspace(block.kappa_min, block.kappa_max, block.kappa_cells)?;
            let thetas = linspace(block.theta_min, block.theta_max, block.theta_cells)?;
            let cells: Vec<(f64, f64)> = kappas
                .iter()
                .flat_map(|&ka| thetas.iter().map(move |&th| (ka, th)))
                .collect();
            let lengths: Vec<f64> = cells
                .par_iter()
                .map(|&(ka, th)| r0_window(&p, ka, th).map(|w| w.len()).unwrap_or(f64::NAN))
                .collect();
            let body = csv(
                &["kappa", "theta", "window_length"],
                cells
                    .iter()
                    .zip(&lengths)
                    .map(|(&(ka, th), &v)| vec![fmt_f64(ka), fmt_f64(th), fmt_f64(v)]),
            );
            let path = out.write("window.csv", &body)?;
            Ok(format!("computed {} cells; wrote {}", cells.len(), path.display()))
        }
        _ => bail!("window block needs both kappa and theta, or neither"),
    }
}

#[derive(Serialize)]
struct ConstantsOut {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    f: f64,
    g: f64,
    h: f64,
    i: f64,
    j: f64,
    k: f64,
}

#[derive(Serialize)]
struct ThetaStarsOut {
    theta1_star: f64,
    theta2_star: f64,
    theta3_star: f64,
}

#[derive(Serialize)]
struct TheoremOut {
    inequality_holds: bool,
    constants: ConstantsOut,
    theta_stars: ThetaStarsOut,
    r0_max: f64,
}

pub fn theorem_check(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let p = cfg.params()?;
    let c = cfg.contacts()?;
    let holds = inequality_holds(&p).map_err(|e| anyhow!("{e}"))?;
    let tc = theorem_constants(&p).map_err(|e| anyhow!("{e}"))?;
    let stars = theta_stars(&p, c.kappa()).map_err(|e| anyhow!("{e}"))?;
    let w = r0_window(&p, c.kappa(), c.theta()).map_err(|e| anyhow!("{e}"))?;
    let result = TheoremOut {
        inequality_holds: holds,
        constants: ConstantsOut {
            a: tc.a,
            b: tc.b,
            c: tc.c,
            d: tc.d,
            e: tc.e,
            f: tc.f,
            g: tc.g,
            h: tc.h,
            i: tc.i,
            j: tc.j,
            k: tc.k,
        },
        theta_stars: ThetaStarsOut {
            theta1_star: stars.theta1_star,
            theta2_star: stars.theta2_star,
            theta3_star: stars.theta3_star,
        },
        r0_max: w.r0_max,
    };
    let path = out.write_json("theorem.json", &result)?;
    Ok(format!(
        "inequality_holds = {holds}, r0_max = {:.6}; wrote {}",
        w.r0_max,
        path.display()
    ))
}

pub fn sturm_count(coeffs: &str, interval: &str) -> Result<String> {
    let coeffs: Vec<f64> = coeffs
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("bad --coeffs: {e}"))?;
    let bounds: Vec<f64> = interval
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("bad --interval: {e}"))?;
    let [a, b] = bounds.as_slice() else {
        bail!("--interval takes exactly two comma-separated bounds");
    };
    let poly = Polynomial::new(coeffs).map_err(|e| anyhow!("{e}"))?;
    let count = count_roots(&poly, *a, *b).map_err(|e| anyhow!("{e}"))?;
    Ok(format!(
        "{{\"count\": {count}, \"interval\": [{}, {}]}}",
        fmt_f64(*a),
        fmt_f64(*b)
    ))
}

pub fn influenza(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let block = cfg
        .influenza
        .as_ref()
        .ok_or_else(|| anyhow!("config has no influenza block"))?;
    if block.variants.is_empty() {
        bail!("influenza block needs at least one (kappa, theta) variant");
    }
    // Rates come from the config so immunization-adjusted scenarios stay
    // reproducible; the bundled config pins the published estimates.
    let p = cfg.params()?;
    let c_i = cfg.c_i()?;
    let mut peak_rows = Vec::new();
    let mut paths = Vec::new();
    for (idx, variant) in block.variants.iter().enumerate() {
        let contacts = ContactProfile::from_ratios(c_i, variant.kappa, variant.theta)
            .map_err(|e| anyhow!("{e}"))?;
        let spec = ScenarioSpec {
            params: p,
            contacts,
            initial: relapse_core::simulate::basin_initial(block.rho).map_err(|e| anyhow!("{e}"))?,
            horizon: block.horizon,
            stride: block.stride,
        };
        let traj = integrate(&spec).map_err(|e| anyhow!("{e}"))?;
        let (t_peak, i_peak) = traj.peak_infected();
        let name = format!("influenza_{idx}.csv");
        paths.push(out.write(&name, &trajectory_csv(&traj))?);
        peak_rows.push(vec![
            idx.to_string(),
            fmt_f64(variant.kappa),
            fmt_f64(variant.theta),
            fmt_f64(t_peak),
            fmt_f64(i_peak),
        ]);
    }
    let peaks = out.write(
        "peaks.csv",
        &csv(&["variant", "kappa", "theta", "t_peak", "i_peak"], peak_rows),
    )?;
    Ok(format!(
        "ran {} variants; wrote {} trajectory file(s) and {}",
        block.variants.len(),
        paths.len(),
        peaks.display()
    ))
}

pub fn vector(cfg: &RunConfig, out: &OutDir) -> Result<String> {
    let block = cfg
        .vector
        .as_ref()
        .ok_or_else(|| anyhow!("config has no vector block"))?;
    let vp = VectorBorneParams {
        mu_h: block.mu_h,
        alpha_h: block.alpha_h,
        gamma: block.gamma,
        beta: block.beta,
        mu_v: block.mu_v,
        alpha_v: block.alpha_v,
        beta_v: block.beta_v,
        n_h: block.n_h,
        n_v: block.n_v,
        contacts: block.contacts,
        constant_incidence: block.constant_incidence,
    };
    let traj = integrate_vector_borne(&vp, block.initial, block.horizon, block.stride)
        .map_err(|e| anyhow!("{e}"))?;
    let body = csv(
        &["t", "s_h", "e_h", "i_h", "r_h", "s_v", "e_v", "i_v"],
        traj.times.iter().zip(&traj.states).map(|(t, st)| {
            let mut row = vec![fmt_f64(*t)];
            row.extend(st.iter().map(|v| fmt_f64(*v)));
            row
        }),
    );
    let path = out.write("vector.csv", &body)?;
    Ok(format!(
        "integrated {} samples; wrote {}",
        traj.times.len(),
        path.display()
    ))
}
