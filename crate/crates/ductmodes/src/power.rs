//! Axial sound power in the lined section, decomposed into the modal sum
//! (i = j) and the cross-power (i != j).
//!
//! Starting from W(z) = (1/2) Re int_0^1 p v_z^* r dr with
//! p = sum_i C_i phi_i e^{-j K_i z} and v_z = sum_i (K_i / K) C_i phi_i
//! e^{-j K_i z}, the power is
//!
//!   W(z) = (1/2) Re sum_{i,j} C_i C_j^* (K_j^* / K) S_ij e^{-j (K_i - K_j^*) z}
//!
//! so each modal term decays like e^{2 Im(K_i) z}. (The displayed modal
//! exponent in the source derivation is typographically inconsistent; this
//! module keeps the first-principles form.) The constant azimuthal factor is
//! omitted by default; a flag applies it uniformly for absolute scales.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::junction::JunctionSolution;
use crate::nonortho::sij_matrix;

/// Axial power profile and its modal/cross decomposition.
#[derive(Debug, Clone)]
pub struct PowerProfile {
    /// Axial stations, in duct radii.
    pub z: Vec<f64>,
    pub w_total: Vec<f64>,
    pub w_modal: Vec<f64>,
    pub w_cross: Vec<f64>,
}

/// Power profile of a junction solution on a sorted non-negative z grid.
pub fn power_profile(
    sol: &JunctionSolution,
    z_grid: &[f64],
    include_azimuthal_factor: bool,
) -> Result<PowerProfile> {
    if z_grid.is_empty() {
        return Err(Error::invalid("empty z grid"));
    }
    if z_grid.windows(2).any(|w| w[1] < w[0]) || z_grid[0] < 0.0 {
        return Err(Error::invalid("z grid must be sorted and non-negative"));
    }
    let n = sol.n;
    let s = sij_matrix(&sol.lined)?.s;
    let k = sol.spec.k;
    let prefactor = if include_azimuthal_factor {
        if sol.spec.m == 0 {
            2.0 * std::f64::consts::PI
        } else {
            std::f64::consts::PI
        }
    } else {
        1.0
    };
    let mut out = PowerProfile {
        z: z_grid.to_vec(),
        w_total: Vec::with_capacity(z_grid.len()),
        w_modal: Vec::with_capacity(z_grid.len()),
        w_cross: Vec::with_capacity(z_grid.len()),
    };
    for &z in z_grid {
        let phases: Vec<Complex64> = (0..n)
            .map(|i| (-Complex64::i() * sol.kl[i] * z).exp())
            .collect();
        let mut modal = 0.0;
        let mut cross = 0.0;
        for i in 0..n {
            let ci = sol.c[i] * phases[i];
            for j in 0..n {
                let cj = sol.c[j] * phases[j];
                let term = 0.5 * (ci * cj.conj() * s[(i, j)] * sol.kl[j].conj() / k).re;
                if i == j {
                    modal += term;
                } else {
                    cross += term;
                }
            }
        }
        out.w_modal.push(prefactor * modal);
        out.w_cross.push(prefactor * cross);
        out.w_total.push(prefactor * (modal + cross));
    }
    Ok(out)
}

/// Per-mode power decay rates -2 Im(K_{l,i}) (per unit z).
pub fn modal_decay_rates(sol: &JunctionSolution) -> Vec<f64> {
    sol.kl.iter().map(|k| -2.0 * k.im).collect()
}
