//! Executes a validated RunConfig against the library and shapes the output.

use ductmodes::eigen::{find_modes, BoundarySpec, ModeSet, SURFACE_THRESHOLD};
use ductmodes::ep::{encircle_ep, enumerate_eps, EpRecord};
use ductmodes::error::Result as CoreResult;
use ductmodes::junction::{incident_amplitudes, solve_junction};
use ductmodes::nonortho::{kp, sij_matrix};
use ductmodes::power::{modal_decay_rates, power_profile};
use ductmodes::special::dispersion_lhs;
use ductmodes::sweep::{sweep, GridResult, SweepRequest};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{CommandKind, RunConfig};
use crate::output::{cell, cell_int, complex_json, CsvTable};

pub struct RunOutput {
    pub result: Value,
    pub diagnostics: Value,
    pub csv: CsvTable,
}

pub fn execute(cfg: &RunConfig) -> CoreResult<RunOutput> {
    match cfg.command {
        CommandKind::Modes => run_modes(cfg),
        CommandKind::Ep => run_ep(cfg),
        CommandKind::Encircle => run_encircle(cfg),
        CommandKind::Nonortho => run_nonortho(cfg),
        CommandKind::Junction => run_junction(cfg),
        CommandKind::Power => run_power(cfg),
        CommandKind::Sweep => run_sweep(cfg),
    }
}

fn spec_of(cfg: &RunConfig) -> CoreResult<BoundarySpec> {
    if cfg.pressure_release {
        BoundarySpec::pressure_release(cfg.k, cfg.m)
    } else {
        let beta = cfg
            .beta0()
            .map_err(|e| ductmodes::Error::InvalidInput { reason: e })?;
        BoundarySpec::new(cfg.k, cfg.m, beta)
    }
}

fn mode_residual(set: &ModeSet, idx: usize) -> f64 {
    let mode = &set.modes[idx];
    match set.spec.boundary_y() {
        Some(y) => {
            let lhs = if mode.gamma.norm() < 1e-9 {
                -mode.gamma * mode.gamma * 0.5
            } else {
                match dispersion_lhs(mode.m, mode.gamma) {
                    Ok(v) => v,
                    Err(_) => return f64::NAN,
                }
            };
            (lhs - y).norm() / y.norm().max(1.0)
        }
        None => set.max_residual,
    }
}

fn run_modes(cfg: &RunConfig) -> CoreResult<RunOutput> {
    let spec = spec_of(cfg)?;
    let threshold = cfg.surface_threshold.unwrap_or(SURFACE_THRESHOLD);
    let set = find_modes(&spec, cfg.n_modes)?;
    let mut rows = Vec::new();
    let mut csv = CsvTable::new(&[
        "n",
        "gamma_re (1/R)",
        "gamma_im (1/R)",
        "k_axial_re (1/R)",
        "k_axial_im (1/R)",
        "lambda_re (R^2)",
        "lambda_im (R^2)",
        "class",
        "residual",
    ]);
    for (i, mode) in set.modes.iter().enumerate() {
        let class = if mode.gamma.im > threshold {
            "surface"
        } else {
            "guided"
        };
        let residual = mode_residual(&set, i);
        rows.push(json!({
            "n": mode.n,
            "gamma": complex_json(mode.gamma),
            "k_axial": complex_json(mode.k_axial),
            "lambda": complex_json(mode.norm),
            "class": class,
            "residual": residual,
        }));
        csv.push_row(vec![
            cell_int(mode.n),
            cell(mode.gamma.re),
            cell(mode.gamma.im),
            cell(mode.k_axial.re),
            cell(mode.k_axial.im),
            cell(mode.norm.re),
            cell(mode.norm.im),
            class.to_string(),
            cell(residual),
        ]);
    }
    let n_surface = set
        .modes
        .iter()
        .filter(|m| m.gamma.im > threshold)
        .count();
    Ok(RunOutput {
        result: json!({ "modes": rows, "surface_mode_count": n_surface }),
        diagnostics: json!({
            "max_residual": set.max_residual,
            "near_ep_warning": set.near_ep_warning,
            "warnings": if set.near_ep_warning { vec!["two eigenvalues within the near-EP window"] } else { vec![] },
        }),
        csv,
    })
}

fn ep_json(rec: &EpRecord, residuals: (f64, f64)) -> Value {
    json!({
        "pair": [rec.pair.0, rec.pair.1],
        "beta_ep": complex_json(rec.beta_ep),
        "gamma_ep": complex_json(rec.gamma_ep),
        "sqrt_coeff": complex_json(rec.sqrt_coeff),
        "residual_f": residuals.0,
        "residual_f_gamma": residuals.1,
    })
}

fn ep_residuals(rec: &EpRecord) -> (f64, f64) {
    match ductmodes::ep::dispersion_residuals(rec) {
        Ok(v) => v,
        Err(_) => (f64::NAN, f64::NAN),
    }
}

fn run_ep(cfg: &RunConfig) -> CoreResult<RunOutput> {
    let count = cfg.count.unwrap_or(1);
    let recs = enumerate_eps(cfg.m, cfg.k, count)?;
    let mut rows = Vec::new();
    let mut csv = CsvTable::new(&[
        "pair_low",
        "pair_high",
        "beta_ep_re (dimensionless)",
        "beta_ep_im (dimensionless)",
        "gamma_ep_re (1/R)",
        "gamma_ep_im (1/R)",
        "sqrt_coeff_re",
        "sqrt_coeff_im",
        "residual_f",
        "residual_f_gamma",
    ]);
    let mut worst = 0.0_f64;
    for rec in &recs {
        let res = ep_residuals(rec);
        worst = worst.max(res.0).max(res.1);
        rows.push(ep_json(rec, res));
        csv.push_row(vec![
            cell_int(rec.pair.0),
            cell_int(rec.pair.1),
            cell(rec.beta_ep.re),
            cell(rec.beta_ep.im),
            cell(rec.gamma_ep.re),
            cell(rec.gamma_ep.im),
            cell(rec.sqrt_coeff.re),
            cell(rec.sqrt_coeff.im),
            cell(res.0),
            cell(res.1),
        ]);
    }
    Ok(RunOutput {
        result: json!({ "exceptional_points": rows }),
        diagnostics: json!({ "max_residual": worst, "warnings": [] }),
        csv,
    })
}

fn default_loop() -> Vec<[f64; 2]> {
    vec![
        [0.095, 0.042655],
        [0.105, 0.042655],
        [0.105, 0.042652],
        [0.095, 0.042652],
        [0.095, 0.042655],
    ]
}

fn run_encircle(cfg: &RunConfig) -> CoreResult<RunOutput> {
    let ep_index = cfg.ep_index.unwrap_or(0);
    let recs = enumerate_eps(cfg.m, cfg.k, ep_index + 1)?;
    let rec = recs[ep_index];
    let nodes: Vec<Complex64> = cfg
        .loop_nodes
        .clone()
        .unwrap_or_else(default_loop)
        .iter()
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let spec = BoundarySpec::new(cfg.k, cfg.m, nodes[0])?;
    let perm = encircle_ep(&rec, &nodes, &spec)?;
    let mut csv = CsvTable::new(&["mode_start", "mode_end"]);
    for (i, &p) in perm.iter().enumerate() {
        csv.push_row(vec![cell_int(i), cell_int(p)]);
    }
    let res = ep_residuals(&rec);
    Ok(RunOutput {
        result: json!({
            "permutation": perm,
            "ep": ep_json(&rec, res),
            "loop": nodes.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
        }),
        diagnostics: json!({ "warnings": [] }),
        csv,
    })
}

fn run_nonortho(cfg: &RunConfig) -> CoreResult<RunOutput> {
    let spec = spec_of(cfg)?;
    let set = find_modes(&spec, cfg.n_modes)?;
    let s = sij_matrix(&set)?.s;
    let mut kp_rows = Vec::new();
    let mut capped_any = false;
    let mut csv = CsvTable::new(&[
        "i",
        "j",
        "s_re",
        "s_im",
        "kp (diag only)",
        "self_overlap_re (diag only)",
        "self_overlap_im (diag only)",
        "max_mode_residual",
    ]);
    for i in 0..set.modes.len() {
        let rep = kp(&set.modes[i])?;
        capped_any |= rep.overflow_capped;
        kp_rows.push(json!({
            "n": i,
            "kp": rep.kp,
            "kp_prime": complex_json(rep.kp_prime),
            "self_overlap": complex_json(rep.self_overlap),
            "overflow_capped": rep.overflow_capped,
        }));
        for j in 0..set.modes.len() {
            let sij = s[(i, j)];
            if i == j {
                csv.push_row(vec![
                    cell_int(i),
                    cell_int(j),
                    cell(sij.re),
                    cell(sij.im),
                    cell(rep.kp),
                    cell(rep.self_overlap.re),
                    cell(rep.self_overlap.im),
                    cell(set.max_residual),
                ]);
            } else {
                csv.push_row(vec![
                    cell_int(i),
                    cell_int(j),
                    cell(sij.re),
                    cell(sij.im),
                    String::new(),
                    String::new(),
                    String::new(),
                    cell(set.max_residual),
                ]);
            }
        }
    }
    let sij_rows: Vec<Value> = (0..set.modes.len())
        .flat_map(|i| {
            let s = &s;
            (0..set.modes.len()).map(move |j| {
                json!({ "i": i, "j": j, "s": complex_json(s[(i, j)]) })
            })
        })
        .collect();
    Ok(RunOutput {
        result: json!({ "kp": kp_rows, "sij": sij_rows }),
        diagnostics: json!({
            "max_residual": set.max_residual,
            "near_ep_warning": set.near_ep_warning,
            "kp_capped": capped_any,
            "warnings": [],
        }),
        csv,
    })
}

fn vector_json(v: &[Complex64]) -> Vec<Value> {
    v.iter().map(|z| complex_json(*z)).collect()
}

fn run_junction(cfg: &RunConfig) -> CoreResult<RunOutput> {
    let spec = spec_of(cfg)?;
    let n = cfg.n_modes;
    let a = incident_amplitudes(&spec, n)?;
    let sol = solve_junction(&spec, &a, n)?;
    let mut csv = CsvTable::new(&[
        "n",
        "a_re",
        "a_im",
        "b_re",
        "b_im",
        "c_re",
        "c_im",
        "kr_re (1/R)",
        "kr_im (1/R)",
        "kl_re (1/R)",
        "kl_im (1/R)",
        "kp_prime_re",
        "kp_prime_im",
        "residual_pressure",
        "residual_velocity",
    ]);
    for i in 0..n {
        csv.push_row(vec![
            cell_int(i),
            cell(sol.a[i].re),
            cell(sol.a[i].im),
            cell(sol.b[i].re),
            cell(sol.b[i].im),
            cell(sol.c[i].re),
            cell(sol.c[i].im),
            cell(sol.kr[i].re),
            cell(sol.kr[i].im),
            cell(sol.kl[i].re),
            cell(sol.kl[i].im),
            cell(sol.kp_prime_diag[i].re),
            cell(sol.kp_prime_diag[i].im),
            cell(sol.residual_pressure),
            cell(sol.residual_velocity),
        ]);
    }
    Ok(RunOutput {
        result: json!({
            "a": vector_json(sol.a.as_slice()),
            "b": vector_json(sol.b.as_slice()),
            "c": vector_json(sol.c.as_slice()),
            "kr": vector_json(sol.kr.as_slice()),
            "kl": vector_json(sol.kl.as_slice()),
            "kp_prime": vector_json(sol.kp_prime_diag.as_slice()),
            "g_inf_norm": sol.g_inf_norm(),
            "incident_flux": sol.incident_flux(),
            "net_flux_rigid": sol.net_flux_rigid(),
            "reflected_flux": sol.reflected_flux(),
        }),
        diagnostics: json!({
            "residual_pressure": sol.residual_pressure,
            "residual_velocity": sol.residual_velocity,
            "condition_estimate": sol.condition_estimate,
            "lined_max_residual": sol.lined.max_residual,
            "near_ep_warning": sol.lined.near_ep_warning,
            "warnings": [],
        }),
        csv,
    })
}

fn run_power(cfg: &RunConfig) -> CoreResult<RunOutput> {
    let spec = spec_of(cfg)?;
    let n = cfg.n_modes;
    let z_max = cfg.z_max.unwrap_or(10.0);
    let z_points = cfg.z_points.unwrap_or(201);
    let grid: Vec<f64> = (0..z_points)
        .map(|i| z_max * i as f64 / (z_points - 1) as f64)
        .collect();
    let a = incident_amplitudes(&spec, n)?;
    let sol = solve_junction(&spec, &a, n)?;
    let prof = power_profile(&sol, &grid, cfg.azimuthal_factor)?;
    let rates = modal_decay_rates(&sol);
    let mut csv = CsvTable::new(&[
        "z (duct radii)",
        "w_total",
        "w_modal",
        "w_cross",
        "residual_pressure",
        "residual_velocity",
    ]);
    for i in 0..prof.z.len() {
        csv.push_row(vec![
            cell(prof.z[i]),
            cell(prof.w_total[i]),
            cell(prof.w_modal[i]),
            cell(prof.w_cross[i]),
            cell(sol.residual_pressure),
            cell(sol.residual_velocity),
        ]);
    }
    let w0 = prof.w_total[0];
    Ok(RunOutput {
        result: json!({
            "z": prof.z,
            "w_total": prof.w_total,
            "w_modal": prof.w_modal,
            "w_cross": prof.w_cross,
            "modal_decay_rates": rates,
        }),
        diagnostics: json!({
            "residual_pressure": sol.residual_pressure,
            "residual_velocity": sol.residual_velocity,
            "interface_balance": (w0 - sol.net_flux_rigid()).abs() / sol.incident_flux().max(1e-300),
            "warnings": [],
        }),
        csv,
    })
}

fn grid_json(grid: &GridResult) -> Value {
    let ncols = grid.re_axis.len();
    let sheets: Vec<Value> = grid
        .sheets
        .iter()
        .map(|sheet| {
            let rows: Vec<Value> = (0..grid.im_axis.len())
                .map(|r| {
                    let row: Vec<Value> = (0..ncols)
                        .map(|c| match sheet[r * ncols + c] {
                            Some(v) => complex_json(v),
                            None => Value::Null,
                        })
                        .collect();
                    Value::Array(row)
                })
                .collect();
            Value::Array(rows)
        })
        .collect();
    json!({
        "re_axis": grid.re_axis,
        "im_axis": grid.im_axis,
        "sheets": sheets,
        "ep_markers": grid
            .ep_markers
            .iter()
            .map(|ep| ep_json(ep, ep_residuals(ep)))
            .collect::<Vec<_>>(),
    })
}

fn run_sweep(cfg: &RunConfig) -> CoreResult<RunOutput> {
    let quantity = cfg
        .quantity
        .ok_or_else(|| ductmodes::Error::InvalidInput {
            reason: "sweep requires a quantity".into(),
        })?;
    let req = SweepRequest {
        k: cfg.k,
        m: cfg.m,
        re_range: (cfg.re_min.unwrap(), cfg.re_max.unwrap()),
        im_range: (cfg.im_min.unwrap(), cfg.im_max.unwrap()),
        re_resolution: cfg.re_resolution.unwrap_or(101),
        im_resolution: cfg.im_resolution.unwrap_or(101),
        n_modes: cfg.n_modes,
        quantity: quantity.into(),
        sij_pair: (cfg.sij_i.unwrap_or(0), cfg.sij_j.unwrap_or(1)),
    };
    let grid = sweep(&req)?;
    let ncols = grid.re_axis.len();
    let mut csv = CsvTable::new(&[
        "beta_re (dimensionless)",
        "beta_im (dimensionless)",
        "sheet",
        "value_re",
        "value_im",
        "masked",
    ]);
    for (s, sheet) in grid.sheets.iter().enumerate() {
        for r in 0..grid.im_axis.len() {
            for c in 0..ncols {
                let (vre, vim, masked) = match sheet[r * ncols + c] {
                    Some(v) => (cell(v.re), cell(v.im), "0"),
                    None => (String::new(), String::new(), "1"),
                };
                csv.push_row(vec![
                    cell(grid.re_axis[c]),
                    cell(grid.im_axis[r]),
                    cell_int(s),
                    vre,
                    vim,
                    masked.to_string(),
                ]);
            }
        }
    }
    let warnings = grid.warnings.clone();
    let masked = grid.masked_cells;
    Ok(RunOutput {
        result: grid_json(&grid),
        diagnostics: json!({ "masked_cells": masked, "warnings": warnings }),
        csv,
    })
}

/// Full modes listing including classification threshold metadata (used by
/// figure recipes that want the raw eigenvalue tables).
pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}
