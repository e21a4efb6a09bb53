//! Mode matching at the rigid-to-lined junction (z = 0): incident rigid
//! modes A scatter into reflected rigid modes B = G A and transmitted lined
//! modes C.
//!
//! Projecting pressure continuity onto the left lined eigenfunctions and
//! velocity continuity onto the rigid eigenfunctions gives
//!
//!   G = (Kr + F^T Kl K'p F)^(-1) (Kr - F^T Kl K'p F),   B = G A,
//!   C = K'p F (I + G) A,
//!
//! with F the coupling matrix between the two families, Kr/Kl the diagonal
//! axial-wavenumber matrices, and K'p the diagonal of self-nonorthogonality
//! ratios. Cut-off rigid modes are retained with evanescent entries so the
//! system stays square.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::{axial_wavenumber, find_modes, rigid_modes, BoundarySpec, ModeSet, Wall};
use crate::error::{Error, Result};
use crate::nonortho;
use crate::special::{bessel_j, gauss_legendre_unit, lommel_self, radial_overlap};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Condition-number estimates above this abort the solve.
const CONDITION_LIMIT: f64 = 1e12;

/// Everything produced by one junction solve.
#[derive(Debug, Clone)]
pub struct JunctionSolution {
    pub spec: BoundarySpec,
    /// Truncation: number of modes kept on each side.
    pub n: usize,
    /// Coupling matrix F_ij = int phi_varphi_i^* psi_j r dr.
    pub f: DMatrix<Complex64>,
    /// Reflection (scattering) matrix G.
    pub g: DMatrix<Complex64>,
    /// Incident, reflected, transmitted amplitudes.
    pub a: DVector<Complex64>,
    pub b: DVector<Complex64>,
    pub c: DVector<Complex64>,
    /// Rigid and lined axial wavenumber diagonals.
    pub kr: DVector<Complex64>,
    pub kl: DVector<Complex64>,
    /// Diagonal of K'_p (self-nonorthogonality ratios of the lined modes).
    pub kp_prime_diag: DVector<Complex64>,
    /// The lined mode family used for the expansion.
    pub lined: ModeSet,
    /// Rigid eigenvalues alpha_n and L2 norms of J_m(alpha_n r).
    pub rigid_alphas: Vec<f64>,
    pub rigid_norms: Vec<f64>,
    /// sqrt(Lambda_n) of the lined modes.
    pub lined_norms: Vec<f64>,
    /// L2 pressure/velocity mismatch on a 64-point radial grid, over ||A||.
    pub residual_pressure: f64,
    pub residual_velocity: f64,
    /// Infinity-norm condition estimate of the solved system.
    pub condition_estimate: f64,
}

fn admittance_of(spec: &BoundarySpec) -> Result<Complex64> {
    match spec.wall {
        Wall::Admittance(b) => Ok(b),
        Wall::PressureRelease => Err(Error::invalid(
            "junction requires an admittance wall on the lined side",
        )),
    }
}

/// Rigid-side data: eigenvalues alpha_n and norms ||J_m(alpha_n r)||_{L2,r}.
fn rigid_family(m: u32, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let alphas = rigid_modes(m, n)?;
    let norms = alphas
        .iter()
        .map(|&a| {
            lommel_self(m, Complex64::new(a, 0.0)).map(|l| {
                debug_assert!(l.im.abs() < 1e-12);
                l.re.sqrt()
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((alphas, norms))
}

/// Coupling matrix F between normalised left lined and rigid eigenfunctions.
pub fn coupling_matrix(spec: &BoundarySpec, n: usize) -> Result<DMatrix<Complex64>> {
    let lined = find_modes(spec, n)?;
    let (alphas, rigid_norms) = rigid_family(spec.m, n)?;
    coupling_from_parts(&lined, &alphas, &rigid_norms)
}

fn lined_norms_of(lined: &ModeSet) -> Result<Vec<f64>> {
    lined
        .modes
        .iter()
        .map(|mode| nonortho::normalization(mode).map(|l| l.re.sqrt()))
        .collect()
}

fn coupling_from_parts(
    lined: &ModeSet,
    alphas: &[f64],
    rigid_norms: &[f64],
) -> Result<DMatrix<Complex64>> {
    let n = lined.modes.len();
    let m = lined.spec.m;
    let lined_norms = lined_norms_of(lined)?;
    let mut f = DMatrix::from_element(n, n, ZERO);
    for i in 0..n {
        let gi = lined.modes[i].gamma;
        for j in 0..n {
            // conj(left_i) = right_i, so the integrand is J(g_i r) J(a_j r) r
            let overlap = radial_overlap(m, gi, Complex64::new(alphas[j], 0.0))?;
            f[(i, j)] = overlap / (lined_norms[i] * rigid_norms[j]);
        }
    }
    Ok(f)
}

/// Incident amplitudes A_i = int psi_i conj(phi_0) r dr: the rigid-basis
/// projection of the conjugated, normalised lined mode 0.
pub fn incident_amplitudes(spec: &BoundarySpec, n: usize) -> Result<DVector<Complex64>> {
    if n == 0 {
        return Err(Error::invalid("truncation must be >= 1"));
    }
    let lined = find_modes(spec, 1)?;
    let (alphas, rigid_norms) = rigid_family(spec.m, n)?;
    let g0 = lined.modes[0].gamma;
    let l0 = nonortho::normalization(&lined.modes[0])?.re.sqrt();
    let mut a = DVector::from_element(n, ZERO);
    for i in 0..n {
        // conj(J(g0 r)) = J(conj(g0) r); the normalisation constant is real
        let overlap = radial_overlap(spec.m, Complex64::new(alphas[i], 0.0), g0.conj())?;
        a[i] = overlap / (rigid_norms[i] * l0);
    }
    Ok(a)
}

/// Solve the junction for given incident amplitudes.
pub fn solve_junction(
    spec: &BoundarySpec,
    a: &DVector<Complex64>,
    n: usize,
) -> Result<JunctionSolution> {
    admittance_of(spec)?;
    if a.len() != n {
        return Err(Error::invalid(format!(
            "incident vector length {} != truncation {n}",
            a.len()
        )));
    }
    let lined = find_modes(spec, n)?;
    let (alphas, rigid_norms) = rigid_family(spec.m, n)?;
    let lined_norms = lined_norms_of(&lined)?;
    let f = coupling_from_parts(&lined, &alphas, &rigid_norms)?;

    let kr = DVector::from_iterator(
        n,
        alphas
            .iter()
            .map(|&al| axial_wavenumber(spec.k, Complex64::new(al, 0.0))),
    );
    let kl = DVector::from_iterator(n, lined.modes.iter().map(|md| md.k_axial));
    let kp_prime = lined
        .modes
        .iter()
        .map(|md| nonortho::kp(md).map(|rep| rep.kp_prime))
        .collect::<Result<Vec<Complex64>>>()?;
    let kp_prime = DVector::from_vec(kp_prime);

    // M = F^T diag(Kl K'p) F
    let mut weighted = f.clone();
    for i in 0..n {
        let w = kl[i] * kp_prime[i];
        for j in 0..n {
            weighted[(i, j)] *= w;
        }
    }
    let m_mat = f.transpose() * weighted;
    let mut lhs = m_mat.clone();
    let mut rhs = -m_mat;
    for i in 0..n {
        lhs[(i, i)] += kr[i];
        rhs[(i, i)] += kr[i];
    }

    let condition_estimate = {
        let inv = lhs.clone().try_inverse();
        match inv {
            Some(inv) => inf_norm(&lhs) * inf_norm(&inv),
            None => f64::INFINITY,
        }
    };
    if condition_estimate > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            estimate: condition_estimate,
        });
    }

    let lu = lhs.lu();
    let g = lu
        .solve(&rhs)
        .ok_or(Error::IllConditioned {
            estimate: condition_estimate,
        })?;
    let b = &g * a;
    let apb = a + &b;
    let mut c = &f * &apb; // C = K'p F (A + B)
    for i in 0..n {
        c[i] *= kp_prime[i];
    }

    let (residual_pressure, residual_velocity) = continuity_residuals(
        spec, &lined, &alphas, &rigid_norms, &lined_norms, a, &b, &c, &kr, &kl,
    )?;

    Ok(JunctionSolution {
        spec: *spec,
        n,
        f,
        g,
        a: a.clone(),
        b,
        c,
        kr,
        kl,
        kp_prime_diag: kp_prime,
        lined,
        rigid_alphas: alphas,
        rigid_norms,
        lined_norms,
        residual_pressure,
        residual_velocity,
        condition_estimate,
    })
}

fn inf_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn continuity_residuals(
    spec: &BoundarySpec,
    lined: &ModeSet,
    alphas: &[f64],
    rigid_norms: &[f64],
    lined_norms: &[f64],
    a: &DVector<Complex64>,
    b: &DVector<Complex64>,
    c: &DVector<Complex64>,
    kr: &DVector<Complex64>,
    kl: &DVector<Complex64>,
) -> Result<(f64, f64)> {
    let n = lined.modes.len();
    let (nodes, weights) = gauss_legendre_unit(64);
    let mut p_err = 0.0;
    let mut v_err = 0.0;
    for (&r, &w) in nodes.iter().zip(&weights) {
        let mut p_minus = ZERO;
        let mut v_minus = ZERO;
        let mut p_plus = ZERO;
        let mut v_plus = ZERO;
        for i in 0..n {
            let psi = bessel_j(spec.m, Complex64::new(alphas[i] * r, 0.0))? / rigid_norms[i];
            p_minus += psi * (a[i] + b[i]);
            v_minus += psi * kr[i] * (a[i] - b[i]);
            let phi = bessel_j(spec.m, lined.modes[i].gamma * r)? / lined_norms[i];
            p_plus += phi * c[i];
            v_plus += phi * kl[i] * c[i];
        }
        p_err += w * r * (p_minus - p_plus).norm_sqr();
        v_err += w * r * (v_minus - v_plus).norm_sqr();
    }
    let a_norm = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let scale = a_norm.max(1e-300);
    Ok((
        p_err.sqrt() / scale,
        v_err.sqrt() / (spec.k * scale), // velocity carries one factor of K
    ))
}

impl JunctionSolution {
    /// ||G||_inf, the worst-case reflection gain.
    pub fn g_inf_norm(&self) -> f64 {
        inf_norm(&self.g)
    }

    /// Pressure field in the lined section, p(r, z) = sum C_n phi_n(r) e^{-j K_n z}.
    pub fn pressure_field(&self, r: f64, z: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&r) || z < 0.0 {
            return Err(Error::invalid("need 0 <= r <= 1 and z >= 0"));
        }
        let mut p = ZERO;
        for i in 0..self.n {
            let phi = bessel_j(self.spec.m, self.lined.modes[i].gamma * r)? / self.lined_norms[i];
            let phase = (-Complex64::i() * self.kl[i] * z).exp();
            p += self.c[i] * phi * phase;
        }
        Ok(p)
    }

    /// Incident axial power on the rigid side (cut-on modes only carry flux).
    pub fn incident_flux(&self) -> f64 {
        (0..self.n)
            .map(|i| 0.5 * self.a[i].norm_sqr() * self.kr[i].re / self.spec.k)
            .sum()
    }

    /// Net axial power through z = 0^- from the full bilinear form,
    /// including evanescent interaction terms.
    pub fn net_flux_rigid(&self) -> f64 {
        let mut w = 0.0;
        for i in 0..self.n {
            let flux =
                (self.a[i] + self.b[i]) * (self.a[i] - self.b[i]).conj() * self.kr[i].conj();
            w += 0.5 * flux.re / self.spec.k;
        }
        w
    }

    /// Reflected power: incident minus net (everything sent back leftward).
    pub fn reflected_flux(&self) -> f64 {
        self.incident_flux() - self.net_flux_rigid()
    }
}
