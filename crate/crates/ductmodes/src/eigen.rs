//! Transverse eigenvalues of the lined-duct dispersion equation
//! `gamma J'_m(gamma) / J_m(gamma) = Y`, with `Y = -j K beta0`.
//!
//! Roots are found by homotopy from the rigid-wall roots, a strip scan for
//! the surface mode, Newton polishing on the entire form
//! `g(gamma) = gamma J'_m(gamma) - Y J_m(gamma)`, and an argument-principle
//! winding count over a bounding rectangle as the completeness gate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{bessel_j_pair, dispersion_lhs, radial_overlap};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const J: Complex64 = Complex64::new(0.0, 1.0);

/// Default Im(gamma) threshold separating surface from guided modes.
pub const SURFACE_THRESHOLD: f64 = 3.0;
/// Two roots closer than this raise the near-EP warning on a ModeSet.
pub const NEAR_EP_DISTANCE: f64 = 1e-4;
/// Relative residual allowed on every returned eigenvalue.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Wall boundary condition of the lined section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wall {
    /// Finite admittance beta0 = 1/Z0; rigid wall is beta0 = 0.
    Admittance(Complex64),
    /// The beta0 -> infinity limit (Z0 = 0), handled in the reciprocal
    /// (impedance) formulation: the dispersion equation degenerates to
    /// J_m(gamma) = 0 and the eigenfunctions are J_m(gamma r) directly.
    PressureRelease,
}

/// Frequency, azimuthal order, and wall condition of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    /// Dimensionless frequency K = omega R / c0.
    pub k: f64,
    /// Azimuthal order m >= 0.
    pub m: u32,
    /// Wall boundary condition.
    pub wall: Wall,
}

impl BoundarySpec {
    pub fn new(k: f64, m: u32, beta0: Complex64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid(format!("K must be positive, got {k}")));
        }
        if !beta0.re.is_finite() || !beta0.im.is_finite() {
            return Err(Error::invalid("beta0 must be finite"));
        }
        Ok(BoundarySpec {
            k,
            m,
            wall: Wall::Admittance(beta0),
        })
    }

    pub fn pressure_release(k: f64, m: u32) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid(format!("K must be positive, got {k}")));
        }
        Ok(BoundarySpec {
            k,
            m,
            wall: Wall::PressureRelease,
        })
    }

    /// Wall admittance, if the wall is in the admittance formulation.
    pub fn beta0(&self) -> Option<Complex64> {
        match self.wall {
            Wall::Admittance(b) => Some(b),
            Wall::PressureRelease => None,
        }
    }

    /// Boundary coefficient Y = -j K beta0, recomputed on demand.
    pub fn boundary_y(&self) -> Option<Complex64> {
        self.beta0().map(|b| -J * self.k * b)
    }

    /// Same K and m, different admittance.
    pub fn with_beta0(&self, beta0: Complex64) -> Self {
        BoundarySpec {
            k: self.k,
            m: self.m,
            wall: Wall::Admittance(beta0),
        }
    }
}

/// Guided modes oscillate across the section; surface modes cling to the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeClass {
    Guided,
    Surface,
}

/// One transverse eigensolution.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    pub m: u32,
    /// Radial index after sorting by ascending Re(gamma).
    pub n: usize,
    /// Transverse eigenvalue.
    pub gamma: Complex64,
    /// Axial wavenumber sqrt(K^2 - gamma^2) under the decay branch rule.
    pub k_axial: Complex64,
    /// Normalisation integral int_0^1 |J_m(gamma r)|^2 r dr (real positive).
    pub norm: Complex64,
    pub class: ModeClass,
}

/// An ordered family of modes for one boundary configuration.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub spec: BoundarySpec,
    pub modes: Vec<Mode>,
    /// Number of modes requested (truncation N).
    pub truncation: usize,
    /// Set when the two closest eigenvalues are within `NEAR_EP_DISTANCE`.
    pub near_ep_warning: bool,
    /// Largest dispersion residual across the set.
    pub max_residual: f64,
}

impl ModeSet {
    pub fn gammas(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.gamma).collect()
    }
}

/// Surface/guided classification by the Im(gamma) threshold.
pub fn classify(gamma: Complex64, threshold: f64) -> ModeClass {
    if gamma.im > threshold {
        ModeClass::Surface
    } else {
        ModeClass::Guided
    }
}

/// Axial wavenumber K_n = sqrt(K^2 - gamma^2).
///
/// Branch: Im(K_n) <= 0; when Im(K_n) = 0 then Re(K_n) >= 0, so the wave
/// e^{j omega t - j K_n z} travels or decays in +z.
pub fn axial_wavenumber(k: f64, gamma: Complex64) -> Complex64 {
    let s = (Complex64::new(k * k, 0.0) - gamma * gamma).sqrt();
    if s.im > 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Entire dispersion form g = gamma J'_m - Y J_m and its gamma-derivative.
fn dispersion_entire(m: u32, gamma: Complex64, y: Complex64) -> Result<(Complex64, Complex64)> {
    let (j, jp) = bessel_j_pair(m, gamma)?;
    let g = gamma * jp - y * j;
    // g' = -gamma (1 - m^2/gamma^2) J - Y J'  (from the Bessel ODE)
    let gp = if gamma.norm() < 1e-12 {
        // series limit: for m=0, g ~ -(gamma^2/2)(1 - ...) - Y(1 - ...), g' ~ -gamma(1+Y/ ...)
        -gamma - y * jp
    } else {
        let msq = (m as f64) * (m as f64);
        -gamma * (Complex64::new(1.0, 0.0) - msq / (gamma * gamma)) * j - y * jp
    };
    Ok((g, gp))
}

/// Newton (secant fallback) on the entire dispersion form.
fn polish_root(m: u32, y: Complex64, seed: Complex64) -> Result<Complex64> {
    // g' vanishes at the origin; push the rigid plane-wave seed off zero
    let mut z = if seed.norm() < 1e-9 {
        Complex64::new(0.05, 0.05)
    } else {
        seed
    };
    let mut prev: Option<(Complex64, Complex64)> = None;
    let mut last_step = f64::INFINITY;
    for it in 0..80 {
        let (g, gp) = dispersion_entire(m, z, y)?;
        let step = if gp.norm() > 1e-300 * g.norm().max(1.0) {
            g / gp
        } else if let Some((zp, gprev)) = prev {
            // secant when Newton stagnates on a flat derivative
            let denom = g - gprev;
            if denom.norm() == 0.0 {
                return Err(Error::NoConvergence {
                    iterations: it,
                    residual: g.norm(),
                });
            }
            g * (z - zp) / denom
        } else {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: g.norm(),
            });
        };
        prev = Some((z, g));
        z -= step;
        let scale = z.norm().max(1.0);
        let s = step.norm();
        if s < 1e-14 * scale {
            return Ok(z);
        }
        // diverging iteration: bail early so callers can refine their steps
        if s > 1e3 * scale {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: g.norm(),
            });
        }
        last_step = s;
    }
    if last_step < 1e-9 {
        Ok(z)
    } else {
        Err(Error::NoConvergence {
            iterations: 80,
            residual: last_step,
        })
    }
}

/// Bracketed bisection plus Newton polish for real-axis roots.
fn real_roots_of(
    count: usize,
    start: f64,
    f: &dyn Fn(f64) -> f64,
    newton: &dyn Fn(f64) -> Option<f64>,
) -> Vec<f64> {
    let mut roots = Vec::with_capacity(count);
    let step = 0.2;
    let mut x = start;
    let mut fx = f(x);
    while roots.len() < count {
        let x2 = x + step;
        let fx2 = f(x2);
        if fx == 0.0 {
            roots.push(x);
        } else if fx * fx2 < 0.0 {
            let (mut lo, mut hi) = (x, x2);
            let mut flo = fx;
            for _ in 0..70 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            let mut r = 0.5 * (lo + hi);
            if let Some(p) = newton(r) {
                if (p - r).abs() < 1e-6 {
                    r = p;
                }
            }
            roots.push(r);
        }
        x = x2;
        fx = fx2;
    }
    roots
}

/// First `count` non-negative roots of J'_m(alpha) = 0, ascending.
///
/// For m = 0 the first root is alpha = 0 (plane wave); for m >= 1 the trivial
/// root at the origin is excluded.
pub fn rigid_modes(m: u32, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    let jp = |x: f64| {
        bessel_j_pair(m, Complex64::new(x, 0.0))
            .map(|(_, d)| d.re)
            .unwrap_or(f64::NAN)
    };
    let newton = |x: f64| -> Option<f64> {
        // J''_m from the ODE at a real point
        let z = Complex64::new(x, 0.0);
        let (j, jd) = bessel_j_pair(m, z).ok()?;
        let msq = (m as f64) * (m as f64);
        let jpp = -jd / z - (Complex64::new(1.0, 0.0) - msq / (z * z)) * j;
        let mut r = x;
        for _ in 0..4 {
            let zr = Complex64::new(r, 0.0);
            let (jr, jdr) = bessel_j_pair(m, zr).ok()?;
            let _ = jr;
            let step = jdr.re / jpp.re;
            r -= step;
            if step.abs() < 1e-15 * r.abs().max(1.0) {
                break;
            }
        }
        Some(r)
    };
    let mut roots = Vec::with_capacity(count);
    let mut need = count;
    if m == 0 {
        roots.push(0.0);
        need -= 1;
    }
    if need > 0 {
        let start = if m == 0 { 2.0 } else { m as f64 + 1e-3 };
        roots.extend(real_roots_of(need, start, &jp, &newton));
    }
    Ok(roots)
}

/// First `count` positive roots of J_m(gamma) = 0 (pressure-release family).
pub fn pressure_release_roots(m: u32, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    let jf = |x: f64| {
        bessel_j_pair(m, Complex64::new(x, 0.0))
            .map(|(j, _)| j.re)
            .unwrap_or(f64::NAN)
    };
    let newton = |x: f64| -> Option<f64> {
        let mut r = x;
        for _ in 0..4 {
            let (j, jp) = bessel_j_pair(m, Complex64::new(r, 0.0)).ok()?;
            let step = j.re / jp.re;
            r -= step;
            if step.abs() < 1e-15 * r.abs().max(1.0) {
                break;
            }
        }
        Some(r)
    };
    let start = if m == 0 { 1.5 } else { m as f64 + 1e-3 };
    Ok(real_roots_of(count, start, &jf, &newton))
}

/// Canonical representative of the +/-gamma pair: Re > 0, or Im >= 0 on the
/// imaginary axis.
fn canonical(gamma: Complex64) -> Complex64 {
    if gamma.re.abs() <= 1e-12 * gamma.norm() {
        if gamma.im < 0.0 {
            -gamma
        } else {
            gamma
        }
    } else if gamma.re < 0.0 {
        -gamma
    } else {
        gamma
    }
}

/// Deduplicate canonical representatives, treating gamma and -gamma as the
/// same eigenvalue family.
fn dedupe_roots(roots: &mut Vec<Complex64>) {
    let mut kept: Vec<Complex64> = Vec::with_capacity(roots.len());
    for &r in roots.iter() {
        if kept
            .iter()
            .all(|q| (q - r).norm() > 5e-10 && (q + r).norm() > 5e-10)
        {
            kept.push(r);
        }
    }
    *roots = kept;
}

/// Winding number of g around the rectangle boundary by adaptive phase
/// tracking. `None` when a contour point lands on (numerically) zero.
fn winding_count(
    m: u32,
    y: Complex64,
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
) -> Result<Option<i64>> {
    let corners = [
        Complex64::new(re0, im0),
        Complex64::new(re1, im0),
        Complex64::new(re1, im1),
        Complex64::new(re0, im1),
        Complex64::new(re0, im0),
    ];
    let gval = |z: Complex64| -> Result<Complex64> { Ok(dispersion_entire(m, z, y)?.0) };
    let mut total = 0.0_f64;
    for seg in corners.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let n0 = 64.max((8.0 * (b - a).norm()).ceil() as usize);
        // stack of (t0, t1, g(t0), g(t1)) intervals with adaptive splitting
        let mut stack = Vec::new();
        let mut samples = Vec::with_capacity(n0 + 1);
        for i in 0..=n0 {
            let t = i as f64 / n0 as f64;
            samples.push((t, gval(a + (b - a) * t)?));
        }
        for w in samples.windows(2) {
            stack.push((w[0].0, w[1].0, w[0].1, w[1].1));
        }
        while let Some((t0, t1, g0, g1)) = stack.pop() {
            if g0.norm() == 0.0 || g1.norm() == 0.0 {
                return Ok(None);
            }
            let dphi = (g1 / g0).arg();
            if dphi.abs() < 1.0 {
                total += dphi;
            } else {
                if t1 - t0 < 1e-12 {
                    return Ok(None); // zero on (or hugging) the contour
                }
                let tm = 0.5 * (t0 + t1);
                let gm = gval(a + (b - a) * tm)?;
                stack.push((t0, tm, g0, gm));
                stack.push((tm, t1, gm, g1));
            }
        }
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.01 {
        return Ok(None);
    }
    Ok(Some(rounded as i64))
}

/// Count a found set against the winding number: each root inside counts
/// once, plus once more when its mirror -gamma also falls inside, plus the
/// order-m trivial zero of g at the origin.
fn expected_zero_count(
    roots: &[Complex64],
    m: u32,
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
) -> i64 {
    let inside =
        |z: Complex64| -> bool { z.re > re0 && z.re < re1 && z.im > im0 && z.im < im1 };
    let mut n = 0i64;
    for &r in roots {
        if inside(r) {
            n += 1;
        }
        // -gamma is a distinct zero of g except exactly at the origin, where
        // counting it again reproduces the origin's double multiplicity
        if inside(-r) {
            n += 1;
        }
    }
    if m > 0 && inside(ZERO) {
        n += m as i64;
    }
    n
}

/// Grid scan for local minima of the normalised |g|, polished by Newton.
fn scan_region(
    m: u32,
    y: Complex64,
    re_range: (f64, f64),
    im_range: (f64, f64),
    spacing: f64,
    found: &mut Vec<Complex64>,
) -> Result<()> {
    let ratio = |z: Complex64| -> Result<f64> {
        let (jv, jp) = bessel_j_pair(m, z)?;
        let g = z * jp - y * jv;
        Ok(g.norm() / ((z * jp).norm() + (y * jv).norm() + 1e-30))
    };
    let n_re = (((re_range.1 - re_range.0) / spacing).ceil() as usize).max(2) + 1;
    let n_im = (((im_range.1 - im_range.0) / spacing).ceil() as usize).max(2) + 1;
    let mut lattice = vec![0.0_f64; n_re * n_im];
    for i in 0..n_re {
        let re = re_range.0 + (re_range.1 - re_range.0) * i as f64 / (n_re - 1) as f64;
        for j in 0..n_im {
            let im = im_range.0 + (im_range.1 - im_range.0) * j as f64 / (n_im - 1) as f64;
            lattice[i * n_im + j] = ratio(Complex64::new(re, im))?;
        }
    }
    for i in 0..n_re {
        for j in 0..n_im {
            let v = lattice[i * n_im + j];
            if v > 0.9 {
                continue;
            }
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii >= 0 && jj >= 0 && (ii as usize) < n_re && (jj as usize) < n_im {
                        if lattice[ii as usize * n_im + jj as usize] < v {
                            is_min = false;
                        }
                    }
                }
            }
            if !is_min {
                continue;
            }
            let z = Complex64::new(
                re_range.0 + (re_range.1 - re_range.0) * i as f64 / (n_re - 1) as f64,
                im_range.0 + (im_range.1 - im_range.0) * j as f64 / (n_im - 1) as f64,
            );
            if let Ok(r) = polish_root(m, y, z) {
                let r = canonical(r);
                if !r.re.is_finite() || !r.im.is_finite() {
                    continue;
                }
                // gamma = 0 is the trivial zero of g for m >= 1, not a mode
                if m >= 1 && r.norm() < 1e-6 {
                    continue;
                }
                let fresh = found
                    .iter()
                    .all(|q| (q - r).norm() > 1e-6 && (q + r).norm() > 1e-6);
                if fresh && ratio(r)? < 1e-10 {
                    found.push(r);
                }
            }
        }
    }
    Ok(())
}

/// First-order prediction of a root's motion: dgamma/dY = J_m / g' from the
/// implicit function theorem on g = gamma J' - Y J. Falls back to the
/// unmoved root when the derivative is unreliable (near an EP).
fn predict_root(m: u32, root: Complex64, y_from: Complex64, y_to: Complex64) -> Complex64 {
    let step = match (bessel_j_pair(m, root), dispersion_entire(m, root, y_from)) {
        (Ok((jv, _)), Ok((_, gp))) if gp.norm() > 1e-12 * jv.norm().max(1e-30) => {
            (y_to - y_from) * jv / gp
        }
        _ => ZERO,
    };
    if step.norm() > 3.0 + root.norm() {
        root
    } else {
        root + step
    }
}

/// Homotopy continuation of a root family from Y = y0 to Y = y1.
///
/// Predictor-corrector: each root is seeded at its first-order prediction
/// and polished by Newton. A step is rejected when any root fails to
/// converge, lands far from its prediction, or two tracked roots collapse.
fn continue_family(
    m: u32,
    roots: &mut [Complex64],
    y0: Complex64,
    y1: Complex64,
    max_steps: usize,
) -> Result<()> {
    let mut t = 0.0_f64;
    let mut h = 0.125_f64;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while t < 1.0 {
        let h_eff = h.min(1.0 - t);
        let y_prev = y0 + (y1 - y0) * t;
        let y = y0 + (y1 - y0) * (t + h_eff);
        attempts += 1;
        if attempts > 40 * max_steps {
            return Err(Error::StepCollapse {
                beta0: y,
                substep: h_eff,
            });
        }
        let trial: Result<Vec<(Complex64, Complex64)>> = roots
            .iter()
            .map(|&r| {
                let pred = predict_root(m, r, y_prev, y);
                polish_root(m, y, pred).map(|nr| (pred, nr))
            })
            .collect();
        let ok = match trial {
            Ok(pairs) => {
                let mut ok = true;
                for (i, (pred, nr)) in pairs.iter().enumerate() {
                    // Newton corrected far beyond the prediction: wrong basin
                    if (nr - pred).norm() > 1.0 + 0.3 * (pred - roots[i]).norm() {
                        ok = false;
                        break;
                    }
                    for (jdx, (_, other)) in pairs.iter().enumerate() {
                        if jdx != i && (nr - other).norm() < 1e-9 {
                            ok = false; // two tracked roots collapsed
                            break;
                        }
                    }
                    if !ok {
                        break;
                    }
                }
                if ok {
                    for (r, (_, nr)) in roots.iter_mut().zip(&pairs) {
                        *r = *nr;
                    }
                }
                ok
            }
            Err(_) => false,
        };
        if ok {
            t += h_eff;
            accepted += 1;
            if accepted > max_steps {
                return Err(Error::StepCollapse {
                    beta0: y,
                    substep: h_eff,
                });
            }
            h = (h * 1.7).min(0.25);
        } else {
            h *= 0.5;
            if h < 1e-9 {
                return Err(Error::StepCollapse {
                    beta0: y,
                    substep: h,
                });
            }
        }
    }
    Ok(())
}

fn build_mode_set(
    spec: BoundarySpec,
    mut gammas: Vec<Complex64>,
    count: usize,
) -> Result<ModeSet> {
    gammas.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    gammas.truncate(count);
    let mut max_residual = 0.0_f64;
    let mut modes = Vec::with_capacity(gammas.len());
    for (n, &gamma) in gammas.iter().enumerate() {
        let residual = match spec.wall {
            Wall::Admittance(_) => {
                let y = spec.boundary_y().unwrap();
                let lhs = if gamma.norm() < 1e-9 {
                    // gamma J'/J -> -gamma^2/2 (1 + O(gamma^2)) for m = 0
                    -gamma * gamma * 0.5
                } else {
                    dispersion_lhs(spec.m, gamma)?
                };
                (lhs - y).norm() / y.norm().max(1.0)
            }
            Wall::PressureRelease => {
                let (j, jp) = bessel_j_pair(spec.m, gamma)?;
                j.norm() / jp.norm().max(1.0)
            }
        };
        if residual > RESIDUAL_TOL {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual,
            });
        }
        max_residual = max_residual.max(residual);
        let norm = radial_overlap(spec.m, gamma, gamma.conj())?;
        modes.push(Mode {
            m: spec.m,
            n,
            gamma,
            k_axial: axial_wavenumber(spec.k, gamma),
            norm,
            class: classify(gamma, SURFACE_THRESHOLD),
        });
    }
    let mut near_ep = false;
    for i in 0..modes.len() {
        for j in (i + 1)..modes.len() {
            if (modes[i].gamma - modes[j].gamma).norm() < NEAR_EP_DISTANCE {
                near_ep = true;
            }
        }
    }
    Ok(ModeSet {
        spec,
        truncation: count,
        near_ep_warning: near_ep,
        max_residual,
        modes,
    })
}

/// Find the first `count` transverse eigenvalues for the given boundary.
///
/// Completeness over the bounding rectangle Re in [-0.5, alpha_count + 2],
/// Im in [-1, K] is verified with an argument-principle winding count; a
/// mismatch after the rescue scan is a hard error.
pub fn find_modes(spec: &BoundarySpec, count: usize) -> Result<ModeSet> {
    if count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    match spec.wall {
        Wall::PressureRelease => {
            let roots = pressure_release_roots(spec.m, count)?;
            let gammas: Vec<Complex64> = roots.iter().map(|&r| Complex64::new(r, 0.0)).collect();
            build_mode_set(*spec, gammas, count)
        }
        Wall::Admittance(beta0) => {
            let y = spec.boundary_y().unwrap();
            let alphas = rigid_modes(spec.m, count + 3)?;
            let rect_right = alphas[count.min(alphas.len() - 1)] + 2.0;
            let (re0, re1) = (-0.5, rect_right);
            let (im0, im1) = (-1.0, spec.k);

            let mut roots: Vec<Complex64> = if beta0.norm() == 0.0 {
                alphas
                    .iter()
                    .take(count + 2)
                    .map(|&a| Complex64::new(a, 0.0))
                    .collect()
            } else {
                let mut fam: Vec<Complex64> = alphas
                    .iter()
                    .take(count + 2)
                    .map(|&a| Complex64::new(a, 0.0))
                    .collect();
                continue_family(spec.m, &mut fam, ZERO, y, 64)?;
                fam.iter().map(|&r| canonical(r)).collect()
            };
            if spec.m >= 1 {
                // drop anything that slid into the trivial origin zero
                roots.retain(|r| r.norm() > 1e-6);
            }
            dedupe_roots(&mut roots);

            // surface root detaches from the rigid family; scan the strip
            if beta0.im > 0.0 {
                scan_region(
                    spec.m,
                    y,
                    (0.0, re1),
                    (SURFACE_THRESHOLD, spec.k),
                    0.61,
                    &mut roots,
                )?;
            }

            // argument-principle completeness gate, with one rescue scan
            let mut verified = false;
            for attempt in 0..2 {
                let mut nudge = 0.0;
                let mut winding = None;
                for _ in 0..4 {
                    winding = winding_count(
                        spec.m,
                        y,
                        re0 - nudge,
                        re1 + nudge,
                        im0 - nudge,
                        im1 + nudge,
                    )?;
                    if winding.is_some() {
                        break;
                    }
                    nudge += 0.0137;
                }
                let winding = winding.ok_or(Error::CompletenessFailure {
                    expected: -1,
                    found: roots.len(),
                })?;
                let expected = expected_zero_count(
                    &roots,
                    spec.m,
                    re0 - nudge,
                    re1 + nudge,
                    im0 - nudge,
                    im1 + nudge,
                );
                if winding == expected {
                    verified = true;
                    break;
                }
                if attempt == 0 {
                    scan_region(spec.m, y, (re0, re1), (im0, im1), 0.31, &mut roots)?;
                } else {
                    return Err(Error::CompletenessFailure {
                        expected: winding,
                        found: roots.len(),
                    });
                }
            }
            debug_assert!(verified);
            if roots.len() < count {
                return Err(Error::CompletenessFailure {
                    expected: count as i64,
                    found: roots.len(),
                });
            }
            build_mode_set(*spec, roots, count)
        }
    }
}

/// Continue a seed ModeSet along a path of admittances.
///
/// Identity is preserved by continuity (nearest-gamma tracking with adaptive
/// step refinement); the output sets are NOT re-sorted.
pub fn track_path(
    spec0: &BoundarySpec,
    path: &[Complex64],
    seed: &ModeSet,
) -> Result<Vec<ModeSet>> {
    let beta_start = spec0
        .beta0()
        .ok_or_else(|| Error::invalid("track_path needs an admittance wall"))?;
    if path.is_empty() {
        return Err(Error::invalid("empty admittance path"));
    }
    let mut gammas = seed.gammas();
    let mut out = Vec::with_capacity(path.len());
    let mut from = beta_start;
    for &to in path {
        track_segment(spec0.m, spec0.k, &mut gammas, from, to)?;
        let spec = spec0.with_beta0(to);
        let mut modes = Vec::with_capacity(gammas.len());
        let mut max_residual = 0.0_f64;
        let y = spec.boundary_y().unwrap();
        for (idx, &gamma) in gammas.iter().enumerate() {
            let lhs = if gamma.norm() < 1e-9 {
                -gamma * gamma * 0.5
            } else {
                dispersion_lhs(spec.m, gamma)?
            };
            let residual = (lhs - y).norm() / y.norm().max(1.0);
            max_residual = max_residual.max(residual);
            modes.push(Mode {
                m: spec.m,
                n: seed.modes.get(idx).map(|md| md.n).unwrap_or(idx),
                gamma,
                k_axial: axial_wavenumber(spec.k, gamma),
                norm: radial_overlap(spec.m, gamma, gamma.conj())?,
                class: classify(gamma, SURFACE_THRESHOLD),
            });
        }
        let mut near_ep = false;
        for i in 0..modes.len() {
            for jdx in (i + 1)..modes.len() {
                if (modes[i].gamma - modes[jdx].gamma).norm() < NEAR_EP_DISTANCE {
                    near_ep = true;
                }
            }
        }
        out.push(ModeSet {
            spec,
            truncation: modes.len(),
            near_ep_warning: near_ep,
            max_residual,
            modes,
        });
        from = to;
    }
    Ok(out)
}

/// One path segment with adaptive bisection; rejects identity swaps and
/// jumps beyond the implicit-derivative prediction (basin hops).
fn track_segment(
    m: u32,
    k: f64,
    gammas: &mut [Complex64],
    from: Complex64,
    to: Complex64,
) -> Result<()> {
    if (to - from).norm() == 0.0 {
        return Ok(());
    }
    let mut t = 0.0_f64;
    let mut h = 1.0_f64;
    let mut fails = 0usize;
    while t < 1.0 {
        let h_eff = h.min(1.0 - t);
        let beta = from + (to - from) * (t + h_eff);
        let y_prev = -J * k * (from + (to - from) * t);
        let y = -J * k * beta;
        let mut trial = Vec::with_capacity(gammas.len());
        let mut preds = Vec::with_capacity(gammas.len());
        let mut ok = true;
        for &g in gammas.iter() {
            let pred = predict_root(m, g, y_prev, y);
            match polish_root(m, y, pred) {
                Ok(r) => {
                    preds.push(pred);
                    trial.push(r);
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            'check: for (i, nr) in trial.iter().enumerate() {
                let moved = (nr - gammas[i]).norm();
                // basin hop: Newton corrected far beyond the prediction
                if (nr - preds[i]).norm() > 0.5 + 0.3 * (preds[i] - gammas[i]).norm() {
                    ok = false;
                    break 'check;
                }
                // a root may not leap past its nearest sibling in one step,
                // or identities can silently migrate around an EP
                let spacing = gammas
                    .iter()
                    .enumerate()
                    .filter(|(jdx, _)| *jdx != i)
                    .map(|(_, g)| (g - gammas[i]).norm())
                    .fold(f64::INFINITY, f64::min);
                if spacing.is_finite() && spacing > 1e-6 && moved > 0.45 * spacing {
                    ok = false;
                    break 'check;
                }
                // identity swap: new root closer to another predecessor
                for (jdx, old) in gammas.iter().enumerate() {
                    if jdx != i && (nr - old).norm() < 0.5 * moved {
                        ok = false;
                        break 'check;
                    }
                }
                // two tracked roots collapsed onto one
                for (jdx, other) in trial.iter().enumerate() {
                    if jdx != i && (nr - other).norm() < 1e-10 {
                        ok = false;
                        break 'check;
                    }
                }
            }
        }
        if ok {
            gammas.copy_from_slice(&trial);
            t += h_eff;
            h = (h * 1.6).min(1.0);
        } else {
            h *= 0.5;
            fails += 1;
            if h < 1e-10 || fails > 600 {
                return Err(Error::StepCollapse {
                    beta0: beta,
                    substep: h,
                });
            }
        }
    }
    Ok(())
}
