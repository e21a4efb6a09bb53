//! Independent oracles for the integration suites: series Bessel evaluation,
//! bisection root location, and a generic dense 2x2 eigensolve. These must
//! not share code with the library paths they check.

use num_complex::Complex64;

/// J_m by the plain ascending series (reliable for |z| up to ~25).
pub fn series_bessel_j(m: u32, z: Complex64) -> Complex64 {
    let zh = 0.5 * z;
    let mut prefix = Complex64::new(1.0, 0.0);
    for k in 1..=m {
        prefix *= zh / k as f64;
    }
    let u = zh * zh;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        term *= -u / (k as f64 * (m as f64 + k as f64));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    prefix * sum
}

/// Derivative via the recurrence, built on the series evaluation.
pub fn series_bessel_j_prime(m: u32, z: Complex64) -> Complex64 {
    if m == 0 {
        -series_bessel_j(1, z)
    } else {
        0.5 * (series_bessel_j(m - 1, z) - series_bessel_j(m + 1, z))
    }
}

/// Bisection on a real function with a sign change in [lo, hi].
pub fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    assert!(
        flo * f(hi) < 0.0,
        "no sign change in [{lo}, {hi}] for bisection oracle"
    );
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Generic dense 2x2 eigensolve: stable quadratic on the characteristic
/// polynomial (trace/determinant route), eigenvectors by row elimination,
/// residual-checked.
pub fn dense_eigen_2x2(
    h: [[Complex64; 2]; 2],
) -> (Complex64, Complex64, [Complex64; 2], [Complex64; 2]) {
    let tr = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    // avoid cancellation: pick the larger-magnitude root first
    let q = if (tr + disc).norm() >= (tr - disc).norm() {
        0.5 * (tr + disc)
    } else {
        0.5 * (tr - disc)
    };
    let g1 = q;
    let g2 = if q.norm() > 0.0 { det / q } else { tr - q };
    let vec_for = |g: Complex64| -> [Complex64; 2] {
        let r1 = [h[0][0] - g, h[0][1]];
        let r2 = [h[1][0], h[1][1] - g];
        let (a, b) = if r1[0].norm() + r1[1].norm() >= r2[0].norm() + r2[1].norm() {
            (r1[0], r1[1])
        } else {
            (r2[0], r2[1])
        };
        let v = if b.norm() >= a.norm() {
            [b, -a]
        } else {
            [-b, a]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n == 0.0 {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [v[0] / n, v[1] / n]
        }
    };
    (g1, g2, vec_for(g1), vec_for(g2))
}

/// Residual ||H v - g v|| of an eigenpair.
pub fn eigen_residual(h: [[Complex64; 2]; 2], g: Complex64, v: [Complex64; 2]) -> f64 {
    let r0 = h[0][0] * v[0] + h[0][1] * v[1] - g * v[0];
    let r1 = h[1][0] * v[0] + h[1][1] * v[1] - g * v[1];
    (r0.norm_sqr() + r1.norm_sqr()).sqrt()
}

/// Deterministic xorshift for reproducible "random" test values.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_f64(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        (x >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [-scale, scale].
    pub fn sym(&mut self, scale: f64) -> f64 {
        (2.0 * self.next_f64() - 1.0) * scale
    }
}
