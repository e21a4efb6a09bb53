//! Exceptional points of the dispersion equation: Cremer-optimum admittances
//! where a pair of neighbouring eigenvalues (and their eigenfunctions)
//! coalesce.
//!
//! An EP is a simultaneous root of `f = 0` and `df/dgamma = 0` with
//! `f(gamma, beta0) = gamma J'_m(gamma)/J_m(gamma) + j K beta0`, solved by a
//! two-unknown Newton iteration with the analytic Jacobian assembled from
//! Bessel recurrences. Near the EP the eigenvalue pair follows the
//! square-root law `gamma - gamma_ep ~ +/- c sqrt(beta0 - beta_ep)` with
//! `c = -sqrt(2 (df/dbeta0) / (d2f/dgamma2))`.

use num_complex::Complex64;

use crate::eigen::{find_modes, rigid_modes, track_path, BoundarySpec, ModeSet};
use crate::error::{Error, Result};
use crate::special::bessel_j_pair;

const J: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Residual bound on |f| and |df/dgamma| at a converged EP.
pub const EP_RESIDUAL: f64 = 1e-10;
/// |d2f/dgamma2| below this is treated as a triple root.
const TRIPLE_ROOT_THRESHOLD: f64 = 1e-8;
/// Loops may not pass closer than this to the EP.
const LOOP_CLEARANCE: f64 = 1e-6;
/// Validity radius of the first-order square-root expansion.
const EXPANSION_DISK: f64 = 1e-2;

/// A located exceptional point.
#[derive(Debug, Clone, Copy)]
pub struct EpRecord {
    pub m: u32,
    pub k: f64,
    /// Admittance at the branch point (the Cremer optimum).
    pub beta_ep: Complex64,
    /// Double eigenvalue at the branch point.
    pub gamma_ep: Complex64,
    /// Indices (n, n+1) of the coalescing mode pair.
    pub pair: (usize, usize),
    /// Coefficient -sqrt(2 f_beta / f_gamma_gamma) of the local expansion.
    pub sqrt_coeff: Complex64,
}

/// f, df/dgamma, d2f/dgamma2 of the dispersion ratio form at (gamma, beta0).
///
/// With R = J'_m/J_m and the Bessel ODE:
///   f      = gamma R + j K beta0
///   f_g    = -gamma (1 - m^2/gamma^2 + R^2)
///   f_gg   = -1 - m^2/gamma^2 + R^2 + 2 gamma R (1 - m^2/gamma^2) + 2 gamma R^3
pub(crate) fn dispersion_f(
    m: u32,
    k: f64,
    gamma: Complex64,
    beta0: Complex64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let (jv, jp) = bessel_j_pair(m, gamma)?;
    if jv.norm() < 1e-290 {
        return Err(Error::PoleAtEigenvalue { gamma });
    }
    let r = jp / jv;
    let msq = (m as f64) * (m as f64);
    let g2 = gamma * gamma;
    let f = gamma * r + J * k * beta0;
    let fg = -gamma * (ONE - msq / g2 + r * r);
    let fgg = -ONE - msq / g2
        + r * r
        + 2.0 * gamma * r * (ONE - msq / g2)
        + 2.0 * gamma * r * r * r;
    Ok((f, fg, fgg))
}

fn canonical_gamma(gamma: Complex64) -> Complex64 {
    if gamma.re < 0.0 {
        -gamma
    } else {
        gamma
    }
}

/// Index of the rigid interval containing Re(gamma_ep): the EP couples the
/// rigid-family neighbours (n, n+1).
fn pair_index(m: u32, gamma_ep: Complex64) -> Result<usize> {
    let mut n = 0usize;
    let mut count = 8;
    loop {
        let alphas = rigid_modes(m, count)?;
        if *alphas.last().unwrap() > gamma_ep.re {
            for (i, w) in alphas.windows(2).enumerate() {
                if gamma_ep.re >= w[0] && gamma_ep.re < w[1] {
                    n = i;
                }
            }
            return Ok(n);
        }
        count *= 2;
        if count > 1 << 12 {
            return Err(Error::invalid("EP real part beyond rigid-root table"));
        }
    }
}

fn newton_ep(
    m: u32,
    k: f64,
    mut gamma: Complex64,
    mut beta: Complex64,
) -> Result<(Complex64, Complex64)> {
    let fb = J * k; // df/dbeta0, constant
    for _ in 0..100 {
        let (f, fg, fgg) = dispersion_f(m, k, gamma, beta)?;
        if fgg.norm() < TRIPLE_ROOT_THRESHOLD {
            return Err(Error::TripleRoot {
                magnitude: fgg.norm(),
            });
        }
        // block-triangular system: fgg dg = -fg; fg dg + fb db = -f
        let dg = -fg / fgg;
        let db = (-f - fg * dg) / fb;
        gamma += dg;
        beta += db;
        if dg.norm() < 1e-14 * gamma.norm().max(1.0) && db.norm() < 1e-14 * beta.norm().max(1.0) {
            let (f, fg, _) = dispersion_f(m, k, gamma, beta)?;
            if f.norm() < EP_RESIDUAL && fg.norm() < EP_RESIDUAL {
                return Ok((gamma, beta));
            }
        }
    }
    let (f, _, _) = dispersion_f(m, k, gamma, beta)?;
    Err(Error::NoConvergence {
        iterations: 100,
        residual: f.norm(),
    })
}

/// Same Newton iteration with a finite-difference Jacobian (step 1e-7).
///
/// Verification path for the analytic derivatives; not used in production.
pub fn find_ep_fd(
    m: u32,
    k: f64,
    gamma_init: Complex64,
    beta_init: Complex64,
) -> Result<EpRecord> {
    let h = 1e-7;
    let fval = |g: Complex64, b: Complex64| -> Result<(Complex64, Complex64)> {
        let (f, fg, _) = dispersion_f(m, k, g, b)?;
        Ok((f, fg))
    };
    let mut gamma = gamma_init;
    let mut beta = beta_init;
    for _ in 0..200 {
        let (f1, f2) = fval(gamma, beta)?;
        let (f1g, f2g) = fval(gamma + h, beta)?;
        let (f1b, f2b) = fval(gamma, beta + h)?;
        let a11 = (f1g - f1) / h;
        let a12 = (f1b - f1) / h;
        let a21 = (f2g - f2) / h;
        let a22 = (f2b - f2) / h;
        let det = a11 * a22 - a12 * a21;
        if det.norm() < 1e-300 {
            return Err(Error::NoConvergence {
                iterations: 200,
                residual: f1.norm(),
            });
        }
        let dg = (f1 * a22 - a12 * f2) / det;
        let db = (a11 * f2 - f1 * a21) / det;
        gamma -= dg;
        beta -= db;
        if dg.norm() < 1e-12 && db.norm() < 1e-12 {
            break;
        }
    }
    finish_record(m, k, gamma, beta)
}

fn finish_record(m: u32, k: f64, gamma: Complex64, beta: Complex64) -> Result<EpRecord> {
    let gamma = canonical_gamma(gamma);
    let (f, fg, fgg) = dispersion_f(m, k, gamma, beta)?;
    if f.norm() >= EP_RESIDUAL || fg.norm() >= EP_RESIDUAL {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: f.norm().max(fg.norm()),
        });
    }
    if fgg.norm() < TRIPLE_ROOT_THRESHOLD {
        return Err(Error::TripleRoot {
            magnitude: fgg.norm(),
        });
    }
    // Expanding f = 0 to lowest order gives (dgamma)^2 = -2 f_beta dbeta / f_gg;
    // the minus sign belongs under the root (verified against tracked roots).
    let sqrt_coeff = -(-2.0 * (J * k) / fgg).sqrt();
    let n = pair_index(m, gamma)?;
    Ok(EpRecord {
        m,
        k,
        beta_ep: beta,
        gamma_ep: gamma,
        pair: (n, n + 1),
        sqrt_coeff,
    })
}

/// Locate one exceptional point from an initial guess.
pub fn find_ep(m: u32, k: f64, gamma_init: Complex64, beta_init: Complex64) -> Result<EpRecord> {
    let (gamma, beta) = newton_ep(m, k, gamma_init, beta_init)?;
    finish_record(m, k, gamma, beta)
}

/// (|f|, |df/dgamma|) evaluated at a record's branch point.
pub fn dispersion_residuals(rec: &EpRecord) -> Result<(f64, f64)> {
    let (f, fg, _) = dispersion_f(rec.m, rec.k, rec.gamma_ep, rec.beta_ep)?;
    Ok((f.norm(), fg.norm()))
}

/// The first `count` EPs, ordered by the lower index of the coalescing pair.
///
/// Seeds: gamma at the midpoint of consecutive rigid eigenvalues, beta0 from
/// solving f = 0 there; retried with small offsets if Newton leaves the
/// target interval.
pub fn enumerate_eps(m: u32, k: f64, count: usize) -> Result<Vec<EpRecord>> {
    if count == 0 || count > 20 {
        return Err(Error::invalid(format!(
            "EP count {count} outside 1..=20"
        )));
    }
    let alphas = rigid_modes(m, count + 2)?;
    let mut out: Vec<EpRecord> = Vec::with_capacity(count);
    for n in 0..count {
        let mid = 0.5 * (alphas[n] + alphas[n + 1]);
        let offsets = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.3, 0.8),
            Complex64::new(-0.3, 0.8),
            Complex64::new(0.0, 1.5),
        ];
        let mut found: Option<EpRecord> = None;
        let mut last_err = Error::invalid("no seed attempted");
        for off in offsets {
            let gamma_seed = Complex64::new(mid, 0.0) + off;
            let (jv, jp) = bessel_j_pair(m, gamma_seed)?;
            if jv.norm() < 0.05 * jp.norm() {
                continue; // too close to a J_m zero for the ratio seed
            }
            // beta from f(gamma_seed, beta) = 0
            let beta_seed = J * (gamma_seed * jp / jv) / k;
            match find_ep(m, k, gamma_seed, beta_seed) {
                Ok(rec) if rec.pair.0 == n => {
                    found = Some(rec);
                    break;
                }
                Ok(rec) => {
                    last_err = Error::invalid(format!(
                        "seed for pair ({n}, {}) converged to pair ({}, {})",
                        n + 1,
                        rec.pair.0,
                        rec.pair.1
                    ));
                }
                Err(e) => last_err = e,
            }
        }
        match found {
            Some(rec) => out.push(rec),
            None => return Err(last_err),
        }
    }
    Ok(out)
}

/// First-order branch values gamma_ep +/- c sqrt(beta0 - beta_ep).
pub fn local_expansion(ep: &EpRecord, beta0: Complex64) -> Result<(Complex64, Complex64)> {
    let d = beta0 - ep.beta_ep;
    if d.norm() >= EXPANSION_DISK {
        return Err(Error::OutOfExpansionDisk { distance: d.norm() });
    }
    let s = d.sqrt();
    Ok((ep.gamma_ep + ep.sqrt_coeff * s, ep.gamma_ep - ep.sqrt_coeff * s))
}

/// Transport the coalescing pair around a closed admittance loop and report
/// the induced permutation of mode indices.
///
/// `permutation[i] = j` means the branch that started as mode i returned on
/// the sheet of mode j.
pub fn encircle_ep(
    ep: &EpRecord,
    loop_nodes: &[Complex64],
    spec: &BoundarySpec,
) -> Result<Vec<usize>> {
    if loop_nodes.len() < 2 {
        return Err(Error::InvalidLoop {
            reason: "need at least two nodes".into(),
        });
    }
    let first = loop_nodes[0];
    let last = *loop_nodes.last().unwrap();
    if (first - last).norm() > 1e-12 {
        return Err(Error::InvalidLoop {
            reason: format!("loop not closed: starts {first}, ends {last}"),
        });
    }
    for seg in loop_nodes.windows(2) {
        if segment_distance(ep.beta_ep, seg[0], seg[1]) < LOOP_CLEARANCE {
            return Err(Error::InvalidLoop {
                reason: format!("loop passes within {LOOP_CLEARANCE:.1e} of the EP"),
            });
        }
    }
    // >= 64 nodes per circuit for tracking robustness near the cusp
    let circuits = loop_nodes.len().saturating_sub(1).max(1);
    let per_seg = (64 * circuits.div_ceil(loop_nodes.len() - 1)).max(8);
    let mut dense = Vec::new();
    for seg in loop_nodes.windows(2) {
        for i in 0..per_seg {
            dense.push(seg[0] + (seg[1] - seg[0]) * (i as f64 / per_seg as f64));
        }
    }
    dense.push(last);

    let count = ep.pair.1 + 2;
    let spec_start = spec.with_beta0(first);
    let seed = find_modes(&spec_start, count)?;
    let sets = track_path(&spec_start, &dense, &seed)?;
    let end: &ModeSet = sets.last().unwrap();

    let start_g = seed.gammas();
    let end_g = end.gammas();
    let mut perm = vec![usize::MAX; start_g.len()];
    for (i, ge) in end_g.iter().enumerate() {
        let (mut best, mut best_d) = (usize::MAX, f64::INFINITY);
        for (jdx, gs) in start_g.iter().enumerate() {
            let d = (ge - gs).norm();
            if d < best_d {
                best_d = d;
                best = jdx;
            }
        }
        perm[i] = best;
    }
    let mut seen = vec![false; perm.len()];
    for &p in &perm {
        if p == usize::MAX || seen[p] {
            return Err(Error::InvalidLoop {
                reason: "endpoint matching is not a permutation".into(),
            });
        }
        seen[p] = true;
    }
    Ok(perm)
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sqr();
    if denom == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / denom;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// The 2x2 non-Hermitian toy model H = diag(alpha1, alpha2) + lambda [[0, c], [c, 0]].
#[derive(Debug, Clone, Copy)]
pub struct TwoLevelModel {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub c: Complex64,
    pub lambda: Complex64,
}

impl TwoLevelModel {
    pub fn new(
        alpha1: Complex64,
        alpha2: Complex64,
        c: Complex64,
        lambda: Complex64,
    ) -> Result<Self> {
        if c.norm() == 0.0 {
            return Err(Error::invalid("coupling c must be nonzero"));
        }
        Ok(TwoLevelModel {
            alpha1,
            alpha2,
            c,
            lambda,
        })
    }
}

/// Eigenvalues gamma_{1,2} = (alpha1 + alpha2 +/- R)/2 with
/// R = sqrt((alpha1 - alpha2)^2 + 4 lambda^2 c^2), and eigenvectors of H.
pub fn two_level_eigen(
    model: &TwoLevelModel,
) -> (Complex64, Complex64, [Complex64; 2], [Complex64; 2]) {
    let TwoLevelModel {
        alpha1: a1,
        alpha2: a2,
        c,
        lambda,
    } = *model;
    let lc = lambda * c;
    let r = ((a1 - a2) * (a1 - a2) + 4.0 * lc * lc).sqrt();
    let g1 = 0.5 * (a1 + a2 + r);
    let g2 = 0.5 * (a1 + a2 - r);
    let vector_for = |g: Complex64| -> [Complex64; 2] {
        // rows of H - gI give [lc, g - a1] or [g - a2, lc]; pick the larger
        let v1 = [lc, g - a1];
        let v2 = [g - a2, lc];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let v = if n1 >= n2 { v1 } else { v2 };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n == 0.0 {
            // lc = 0 and g equals both diagonal entries: any basis works
            return [ONE, Complex64::new(0.0, 0.0)];
        }
        [v[0] / n, v[1] / n]
    };
    // diagonal case: eigenvectors are the coordinate axes
    if lc.norm() == 0.0 {
        return (
            a1,
            a2,
            [ONE, Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), ONE],
        );
    }
    (g1, g2, vector_for(g1), vector_for(g2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_ep_matches_published_value() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let expect = c64(0.099346, 0.042653);
        assert!(
            (rec.beta_ep - expect).norm() < 5e-5,
            "beta_ep = {}",
            rec.beta_ep
        );
        assert_eq!(rec.pair, (0, 1));
        // m = 0 structure: at a double root J'_0/J_0 = -j exactly, so
        // beta_ep = gamma_ep / K and d2f/dgamma2 = -2
        assert!((rec.beta_ep - rec.gamma_ep / 30.0).norm() < 1e-10);
        let (_, _, fgg) = dispersion_f(0, 30.0, rec.gamma_ep, rec.beta_ep).unwrap();
        assert!((fgg - c64(-2.0, 0.0)).norm() < 1e-8, "fgg = {fgg}");
    }

    #[test]
    fn ep_residuals_and_conjugate_symmetry() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let (f, fg, _) = dispersion_f(0, 30.0, rec.gamma_ep, rec.beta_ep).unwrap();
        assert!(f.norm() < EP_RESIDUAL);
        assert!(fg.norm() < EP_RESIDUAL);
        // f has real coefficients in the (gamma^2, j beta0) variables, so the
        // conjugate of an EP is (gamma*, -beta*); seeding there must land on it
        let again = find_ep(0, 30.0, rec.gamma_ep.conj(), -rec.beta_ep.conj()).unwrap();
        assert!((again.beta_ep - (-rec.beta_ep.conj())).norm() < 1e-10);
        assert!((again.gamma_ep - rec.gamma_ep.conj()).norm() < 1e-10);
    }

    #[test]
    fn second_ep_residual_verified() {
        let recs = enumerate_eps(0, 30.0, 2).unwrap();
        let rec = recs[1];
        assert_eq!(rec.pair, (1, 2));
        let (f, fg, _) = dispersion_f(0, 30.0, rec.gamma_ep, rec.beta_ep).unwrap();
        assert!(f.norm() < EP_RESIDUAL && fg.norm() < EP_RESIDUAL);
    }

    #[test]
    fn analytic_and_fd_jacobians_agree() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let fd = find_ep_fd(
            0,
            30.0,
            rec.gamma_ep + c64(0.05, 0.02),
            rec.beta_ep + c64(0.001, -0.001),
        )
        .unwrap();
        assert!((fd.beta_ep - rec.beta_ep).norm() < 1e-8);
        assert!((fd.gamma_ep - rec.gamma_ep).norm() < 1e-8);
    }

    #[test]
    fn ten_eps_distinct_upper_half_plane() {
        let recs = enumerate_eps(0, 30.0, 10).unwrap();
        assert_eq!(recs.len(), 10);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.pair.0, i);
            assert!(r.beta_ep.im > 0.0, "EP {i} not in Im > 0: {}", r.beta_ep);
        }
        for i in 0..recs.len() {
            for jdx in (i + 1)..recs.len() {
                assert!((recs[i].beta_ep - recs[jdx].beta_ep).norm() > 1e-3);
            }
        }
    }

    #[test]
    fn local_expansion_at_center_and_scaling() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let (a, b) = local_expansion(&rec, rec.beta_ep).unwrap();
        assert!((a - rec.gamma_ep).norm() < 1e-14);
        assert!((b - rec.gamma_ep).norm() < 1e-14);
        // square-root scaling: quadrupling |dbeta| doubles |dgamma|
        let d1 = c64(1e-6, 0.0);
        let (a1, _) = local_expansion(&rec, rec.beta_ep + d1).unwrap();
        let (a4, _) = local_expansion(&rec, rec.beta_ep + 4.0 * d1).unwrap();
        let ratio = (a4 - rec.gamma_ep).norm() / (a1 - rec.gamma_ep).norm();
        assert!((ratio - 2.0).abs() < 0.05, "ratio = {ratio}");
        // outside the disk
        assert!(matches!(
            local_expansion(&rec, rec.beta_ep + c64(0.02, 0.0)),
            Err(Error::OutOfExpansionDisk { .. })
        ));
    }

    #[test]
    fn local_expansion_predicts_true_roots() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let beta = rec.beta_ep + c64(1e-6, 0.0);
        let (pa, pb) = local_expansion(&rec, beta).unwrap();
        let spec = BoundarySpec::new(30.0, 0, beta).unwrap();
        let set = find_modes(&spec, 2).unwrap();
        let g = set.gammas();
        for p in [pa, pb] {
            let err = g
                .iter()
                .map(|q| (q - p).norm())
                .fold(f64::INFINITY, f64::min);
            let scale = (p - rec.gamma_ep).norm();
            assert!(err < 1e-2 * scale.max(1e-6), "prediction {p} off by {err}");
        }
    }

    #[test]
    fn two_level_diagonal_and_coalescent() {
        let m = TwoLevelModel::new(c64(1.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))
            .unwrap();
        let (g1, g2, v1, v2) = two_level_eigen(&m);
        assert!((g1 - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((g2 - c64(-1.0, 0.0)).norm() < 1e-15);
        assert!((v1[0].norm() - 1.0).abs() < 1e-15 && v1[1].norm() < 1e-15);
        assert!((v2[1].norm() - 1.0).abs() < 1e-15 && v2[0].norm() < 1e-15);

        // alpha1=1, alpha2=-1, c=1, lambda=j: R^2 = 4 + 4(-1) = 0
        let m = TwoLevelModel::new(c64(1.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0))
            .unwrap();
        let (g1, g2, v1, v2) = two_level_eigen(&m);
        assert!((g1 - g2).norm() < 1e-14);
        assert!(g1.norm() < 1e-14); // (alpha1+alpha2)/2 = 0
        // coalescent eigenvectors parallel to [1, j] or [1, -j]
        for v in [v1, v2] {
            let ratio = v[1] / v[0];
            assert!(
                (ratio - c64(0.0, 1.0)).norm() < 1e-12 || (ratio - c64(0.0, -1.0)).norm() < 1e-12,
                "ratio = {ratio}"
            );
        }
    }

    #[test]
    fn two_level_ep_condition_has_imaginary_unit() {
        // lambda_EP = +/- j (alpha1 - alpha2) / (2c): R = 0 and the
        // eigenvectors are parallel to [1, +/-j]
        let (a1, a2, c) = (c64(2.0, 0.5), c64(-1.0, 0.3), c64(1.5, -0.2));
        let lam = J * (a1 - a2) / (2.0 * c);
        let m = TwoLevelModel::new(a1, a2, c, lam).unwrap();
        let (g1, g2, v1, _) = two_level_eigen(&m);
        // R = sqrt(cancellation of O(1) terms): roundoff amplified to ~1e-8
        assert!((g1 - g2).norm() < 1e-7);
        assert!((g1 - 0.5 * (a1 + a2)).norm() < 1e-7);
        let ratio = v1[1] / v1[0];
        assert!(
            (ratio - c64(0.0, 1.0)).norm() < 1e-6 || (ratio - c64(0.0, -1.0)).norm() < 1e-6
        );
    }

    #[test]
    fn two_level_rejects_zero_coupling() {
        assert!(
            TwoLevelModel::new(c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0))
                .is_err()
        );
    }

    #[test]
    fn encircle_first_ep_swaps_pair() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        // the paper's rectangular loop around the first EP
        let loop_nodes = [
            c64(0.095, 0.042655),
            c64(0.105, 0.042655),
            c64(0.105, 0.042652),
            c64(0.095, 0.042652),
            c64(0.095, 0.042655),
        ];
        let spec = BoundarySpec::new(30.0, 0, loop_nodes[0]).unwrap();
        let perm = encircle_ep(&rec, &loop_nodes, &spec).unwrap();
        assert_eq!(perm[0], 1, "mode 0 must return as mode 1: {perm:?}");
        assert_eq!(perm[1], 0, "mode 1 must return as mode 0: {perm:?}");
        for (i, &p) in perm.iter().enumerate().skip(2) {
            assert_eq!(p, i, "spectator mode {i} moved: {perm:?}");
        }
    }

    #[test]
    fn encircle_twice_is_identity() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let once = [
            c64(0.095, 0.042655),
            c64(0.105, 0.042655),
            c64(0.105, 0.042652),
            c64(0.095, 0.042652),
            c64(0.095, 0.042655),
        ];
        let mut twice = once.to_vec();
        twice.extend_from_slice(&once[1..]);
        let spec = BoundarySpec::new(30.0, 0, once[0]).unwrap();
        let perm = encircle_ep(&rec, &twice, &spec).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert_eq!(p, i, "double loop not identity: {perm:?}");
        }
    }

    #[test]
    fn non_enclosing_loop_is_identity() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let shifted = [
            c64(0.115, 0.042655),
            c64(0.125, 0.042655),
            c64(0.125, 0.042652),
            c64(0.115, 0.042652),
            c64(0.115, 0.042655),
        ];
        let spec = BoundarySpec::new(30.0, 0, shifted[0]).unwrap();
        let perm = encircle_ep(&rec, &shifted, &spec).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert_eq!(p, i, "non-enclosing loop not identity: {perm:?}");
        }
    }

    #[test]
    fn loop_validation() {
        let rec = enumerate_eps(0, 30.0, 1).unwrap()[0];
        let spec = BoundarySpec::new(30.0, 0, c64(0.095, 0.0427)).unwrap();
        // not closed
        let open = [c64(0.095, 0.0427), c64(0.105, 0.0427)];
        assert!(matches!(
            encircle_ep(&rec, &open, &spec),
            Err(Error::InvalidLoop { .. })
        ));
        // passes through the EP itself
        let through = [
            rec.beta_ep + c64(-0.001, 0.0),
            rec.beta_ep,
            rec.beta_ep + c64(0.001, 0.0),
            rec.beta_ep + c64(-0.001, 0.0),
        ];
        assert!(matches!(
            encircle_ep(&rec, &through, &spec),
            Err(Error::InvalidLoop { .. })
        ));
    }
}
