//! Normalisation, left/right eigenfunction relations, and the two
//! nonorthogonality metrics: self-nonorthogonality K_p (the Petermann
//! factor) and mutual-nonorthogonality S_ij.
//!
//! Working convention: the unnormalised radial profile of a mode is
//! `J_m(gamma r)` and its left (adjoint) partner is the pointwise complex
//! conjugate. Normalisation divides by the real positive
//! `sqrt(Lambda) = sqrt(int |J_m(gamma r)|^2 r dr)`, which makes the lined
//! family reduce exactly to the rigid orthonormal family as beta0 -> 0.
//! Every metric here is a ratio of radial integrals, so the constant
//! azimuthal factor (2 pi for m = 0, pi otherwise) cancels and is omitted.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::{Mode, ModeSet};
use crate::error::{Error, Result};
use crate::special::{bessel_j, radial_overlap};

/// K_p values above this cap are clipped and flagged.
pub const KP_CAP: f64 = 1e12;

/// Self-nonorthogonality report for one mode.
#[derive(Debug, Clone, Copy)]
pub struct NonorthReport {
    /// K'_p = int |phi|^2 ds / int phi^2 ds (ratio form of Eq.-17's root).
    pub kp_prime: Complex64,
    /// K_p = |K'_p|^2, clipped at `KP_CAP`.
    pub kp: f64,
    /// Normalised left-right self-overlap, equal to 1 / K'_p.
    pub self_overlap: Complex64,
    pub mode_index: usize,
    /// Set when the unclipped K_p exceeded the cap.
    pub overflow_capped: bool,
}

/// Dense matrix of mutual-nonorthogonality entries S_ij.
#[derive(Debug, Clone)]
pub struct OverlapMatrix {
    pub s: DMatrix<Complex64>,
}

/// Radial profile J_m(gamma r), optionally conjugated (the left partner).
#[derive(Debug, Clone, Copy)]
pub struct RadialProfile {
    pub m: u32,
    pub gamma: Complex64,
    pub conjugated: bool,
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        let v = bessel_j(self.m, self.gamma * r)?;
        Ok(if self.conjugated { v.conj() } else { v })
    }
}

/// Right eigenfunction profile of a mode (unnormalised).
pub fn right_eigenfunction(mode: &Mode) -> RadialProfile {
    RadialProfile {
        m: mode.m,
        gamma: mode.gamma,
        conjugated: false,
    }
}

/// Left eigenfunction profile: the pointwise conjugate of the right one.
///
/// For self-adjoint walls (rigid, pressure-release, purely reactive) the
/// profile is real and this is the right eigenfunction again.
pub fn left_eigenfunction(mode: &Mode) -> RadialProfile {
    RadialProfile {
        m: mode.m,
        gamma: mode.gamma,
        conjugated: true,
    }
}

/// Normalisation integral Lambda = int_0^1 |J_m(gamma r)|^2 r dr.
///
/// Real and positive for any eigenvalue; computed by the Lommel closed form
/// with conjugate pairing.
pub fn normalization(mode: &Mode) -> Result<Complex64> {
    let g = mode.gamma;
    if !g.re.is_finite() || !g.im.is_finite() {
        return Err(Error::invalid("non-finite eigenvalue"));
    }
    let lam = radial_overlap(mode.m, g, g.conj())?;
    debug_assert!(lam.im.abs() <= 1e-8 * lam.re.abs().max(1e-300));
    Ok(lam)
}

/// Unnormalised conjugate overlap int phi_i phi_j^* r dr.
pub(crate) fn raw_conj_overlap(i: &Mode, j: &Mode) -> Result<Complex64> {
    radial_overlap(i.m, i.gamma, j.gamma.conj())
}

/// Unnormalised plain (no-conjugate) overlap int phi_i phi_j r dr.
///
/// Vanishes for i != j under any admittance wall: the bi-orthogonality of
/// the lined family.
pub fn raw_plain_overlap(i: &Mode, j: &Mode) -> Result<Complex64> {
    if i.m != j.m {
        return Err(Error::invalid("modes of different azimuthal order"));
    }
    radial_overlap(i.m, i.gamma, j.gamma)
}

/// Normalised conjugate overlap S_ij = int phi_i phi_j^* ds on unit-norm
/// eigenfunctions. S_ii = 1; |S_ij| -> 1 as a pair coalesces.
pub fn mutual_overlap(i: &Mode, j: &Mode) -> Result<Complex64> {
    if i.m != j.m {
        return Err(Error::invalid("modes of different azimuthal order"));
    }
    let num = raw_conj_overlap(i, j)?;
    let li = normalization(i)?.re;
    let lj = normalization(j)?.re;
    Ok(num / (li * lj).sqrt())
}

/// Normalised left-right self-overlap (Eq.-14 form): (int phi^2) / (int |phi|^2).
///
/// 1 in every self-adjoint limit, 0 at an exceptional point.
pub fn self_overlap(mode: &Mode) -> Result<Complex64> {
    let plain = radial_overlap(mode.m, mode.gamma, mode.gamma)?;
    let lam = normalization(mode)?;
    Ok(plain / lam)
}

/// Self-nonorthogonality of one mode.
///
/// K'_p is evaluated as the ratio (int |phi|^2) / (int phi^2): with the left
/// eigenfunction equal to the conjugated right one, the square-root numerator
/// of the defining formula collapses to int |phi|^2 exactly, so no branch
/// choice is involved.
pub fn kp(mode: &Mode) -> Result<NonorthReport> {
    let lam = normalization(mode)?;
    let plain = radial_overlap(mode.m, mode.gamma, mode.gamma)?;
    if plain.norm() == 0.0 {
        return Ok(NonorthReport {
            kp_prime: Complex64::new(f64::MAX.sqrt(), 0.0),
            kp: KP_CAP,
            self_overlap: Complex64::new(0.0, 0.0),
            mode_index: mode.n,
            overflow_capped: true,
        });
    }
    let kp_prime = lam / plain;
    let kp_raw = kp_prime.norm_sqr();
    let capped = kp_raw > KP_CAP;
    Ok(NonorthReport {
        kp_prime,
        kp: if capped { KP_CAP } else { kp_raw },
        self_overlap: plain / lam,
        mode_index: mode.n,
        overflow_capped: capped,
    })
}

/// Full S_ij matrix of a mode set (Hermitian by construction, unit diagonal).
pub fn sij_matrix(set: &ModeSet) -> Result<OverlapMatrix> {
    let n = set.modes.len();
    let lambdas: Vec<f64> = set
        .modes
        .iter()
        .map(|m| normalization(m).map(|l| l.re))
        .collect::<Result<_>>()?;
    let mut s = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        s[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..n {
            let num = raw_conj_overlap(&set.modes[i], &set.modes[j])?;
            let v = num / (lambdas[i] * lambdas[j]).sqrt();
            s[(i, j)] = v;
            s[(j, i)] = v.conj();
        }
    }
    Ok(OverlapMatrix { s })
}
