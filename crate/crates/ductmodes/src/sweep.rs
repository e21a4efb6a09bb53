//! Admittance-plane grids: Riemann-surface sheets of tracked eigenvalues,
//! K_p maps, S_ij maps, and EP overlays.
//!
//! Every cell is reached from the rigid seeds at beta0 = 0 by continuation
//! along the real axis to the cell's column and then straight up the column.
//! With that path family the sheet discontinuities (branch cuts) emanate
//! from each enclosed EP in the +Im(beta0) direction, a fixed deterministic
//! convention. Rows are independent jobs; per-cell failures are masked, and
//! the merged result is identical regardless of execution order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen::{find_modes, track_path, BoundarySpec};
use crate::ep::{enumerate_eps, EpRecord};
use crate::error::{Error, Result};
use crate::nonortho::KP_CAP;
use crate::special::radial_overlap;

/// What a sweep records per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    GammaRe,
    GammaIm,
    /// log10 of K_p, clipped at log10(KP_CAP).
    Kp,
    SijRe,
    SijIm,
}

/// A computed admittance-plane lattice.
///
/// `sheets[s][row * re_axis.len() + col]` holds the complex value of sheet
/// `s` (one sheet per tracked mode for gamma and K_p quantities, a single
/// sheet for S_ij). Gamma sheets store the full eigenvalue; K_p sheets store
/// log10(K_p) in the real part; S_ij sheets store the complex overlap.
#[derive(Debug, Clone)]
pub struct GridResult {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    pub quantity: Quantity,
    pub sheets: Vec<Vec<Option<Complex64>>>,
    pub ep_markers: Vec<EpRecord>,
    pub masked_cells: usize,
    pub warnings: Vec<String>,
}

/// Sweep parameters.
#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub k: f64,
    pub m: u32,
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub re_resolution: usize,
    pub im_resolution: usize,
    /// Number of tracked modes (sheets).
    pub n_modes: usize,
    pub quantity: Quantity,
    /// Mode pair for S_ij quantities.
    pub sij_pair: (usize, usize),
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64)
        .collect()
}

fn cell_values(
    req: &SweepRequest,
    gammas: &[Complex64],
) -> Result<Vec<Complex64>> {
    match req.quantity {
        Quantity::GammaRe | Quantity::GammaIm => Ok(gammas.to_vec()),
        Quantity::Kp => gammas
            .iter()
            .map(|&g| {
                let lam = radial_overlap(req.m, g, g.conj())?;
                let plain = radial_overlap(req.m, g, g)?;
                let kp = if plain.norm() == 0.0 {
                    KP_CAP
                } else {
                    (lam / plain).norm_sqr().min(KP_CAP)
                };
                Ok(Complex64::new(kp.log10(), 0.0))
            })
            .collect(),
        Quantity::SijRe | Quantity::SijIm => {
            let (i, j) = req.sij_pair;
            if i >= gammas.len() || j >= gammas.len() {
                return Err(Error::invalid(format!(
                    "S_ij pair ({i}, {j}) outside the {} tracked modes",
                    gammas.len()
                )));
            }
            let li = radial_overlap(req.m, gammas[i], gammas[i].conj())?.re;
            let lj = radial_overlap(req.m, gammas[j], gammas[j].conj())?.re;
            let num = radial_overlap(req.m, gammas[i], gammas[j].conj())?;
            Ok(vec![num / (li * lj).sqrt()])
        }
    }
}

/// Run an admittance-plane sweep.
pub fn sweep(req: &SweepRequest) -> Result<GridResult> {
    if req.re_resolution == 0 || req.im_resolution == 0 {
        return Err(Error::invalid("resolution must be >= 1"));
    }
    if req.re_resolution > 512 || req.im_resolution > 512 {
        return Err(Error::invalid("resolution capped at 512 per axis"));
    }
    if req.n_modes == 0 {
        return Err(Error::invalid("need at least one tracked mode"));
    }
    if matches!(req.quantity, Quantity::SijRe | Quantity::SijIm) {
        let (i, j) = req.sij_pair;
        if i >= req.n_modes || j >= req.n_modes {
            return Err(Error::invalid(format!(
                "S_ij pair ({i}, {j}) outside n_modes = {}",
                req.n_modes
            )));
        }
    }
    let re_axis = axis(req.re_range, req.re_resolution);
    let im_axis = axis(req.im_range, req.im_resolution);
    let mut warnings = Vec::new();

    // seeds: rigid family at beta0 = 0, then a real-axis pass to every column
    let spec0 = BoundarySpec::new(req.k, req.m, Complex64::new(0.0, 0.0))?;
    let rigid = find_modes(&spec0, req.n_modes)?;
    let real_nodes: Vec<Complex64> = re_axis.iter().map(|&re| Complex64::new(re, 0.0)).collect();
    let column_seeds: Vec<Option<Vec<Complex64>>> = match track_path(&spec0, &real_nodes, &rigid)
    {
        Ok(sets) => sets.into_iter().map(|s| Some(s.gammas())).collect(),
        Err(_) => {
            // column-by-column fallback so one bad column does not kill the grid
            warnings.push("real-axis continuation fell back to per-column solves".into());
            re_axis
                .iter()
                .map(|&re| {
                    let spec = spec0.with_beta0(Complex64::new(re, 0.0));
                    find_modes(&spec, req.n_modes).ok().map(|s| s.gammas())
                })
                .collect()
        }
    };

    let n_sheets = match req.quantity {
        Quantity::SijRe | Quantity::SijIm => 1,
        _ => req.n_modes,
    };

    // rows are independent; each cell continues its column seed vertically
    let rows: Vec<Vec<Option<Vec<Complex64>>>> = im_axis
        .par_iter()
        .map(|&im| {
            let mut row: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(re_axis.len());
            for (col, &re) in re_axis.iter().enumerate() {
                let seed = match &column_seeds[col] {
                    Some(g) => g.clone(),
                    None => {
                        row.push(None);
                        continue;
                    }
                };
                let start = Complex64::new(re, 0.0);
                let target = Complex64::new(re, im);
                let spec_col = spec0.with_beta0(start);
                let seed_set = {
                    // wrap the seed gammas in a minimal ModeSet for track_path
                    let mut s = rigid.clone();
                    s.spec = spec_col;
                    for (mode, &g) in s.modes.iter_mut().zip(&seed) {
                        mode.gamma = g;
                    }
                    s
                };
                let value = track_path(&spec_col, &[target], &seed_set)
                    .ok()
                    .map(|sets| sets.last().unwrap().gammas())
                    .and_then(|gammas| cell_values(req, &gammas).ok());
                row.push(value);
            }
            row
        })
        .collect();

    let mut sheets = vec![vec![None; re_axis.len() * im_axis.len()]; n_sheets];
    let mut masked = 0usize;
    for (r, row) in rows.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            match cell {
                Some(values) => {
                    for (s, &v) in values.iter().enumerate() {
                        sheets[s][r * re_axis.len() + c] = Some(v);
                    }
                }
                None => masked += 1,
            }
        }
    }

    // EP overlay: best effort, never fatal for the lattice itself
    let ep_markers = match enumerate_eps(req.m, req.k, 10) {
        Ok(all) => all
            .into_iter()
            .filter(|ep| {
                ep.beta_ep.re >= req.re_range.0.min(req.re_range.1)
                    && ep.beta_ep.re <= req.re_range.0.max(req.re_range.1)
                    && ep.beta_ep.im >= req.im_range.0.min(req.im_range.1)
                    && ep.beta_ep.im <= req.im_range.0.max(req.im_range.1)
            })
            .collect(),
        Err(e) => {
            warnings.push(format!("EP overlay unavailable: {e}"));
            Vec::new()
        }
    };

    Ok(GridResult {
        re_axis,
        im_axis,
        quantity: req.quantity,
        sheets,
        ep_markers,
        masked_cells: masked,
        warnings,
    })
}
