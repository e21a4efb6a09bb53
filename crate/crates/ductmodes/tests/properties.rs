//! Property tests for the pure special-function and algebra layers.

mod common;

use ductmodes::eigen::axial_wavenumber;
use ductmodes::ep::{two_level_eigen, TwoLevelModel};
use ductmodes::special::{bessel_j, lommel_cross, quad_overlap, radial_overlap};
use num_complex::Complex64;
use proptest::prelude::*;

use common::{dense_eigen_2x2, eigen_residual, series_bessel_j};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_consistency(
        m in 1u32..40,
        re in -50.0_f64..50.0,
        im in -20.0_f64..20.0,
    ) {
        let z = c64(re, im);
        prop_assume!(z.norm() > 0.5 && z.norm() <= 50.0);
        let jm1 = bessel_j(m - 1, z).unwrap();
        let jp1 = bessel_j(m + 1, z).unwrap();
        let jm = bessel_j(m, z).unwrap();
        let lhs = jm1 + jp1;
        let rhs = (2.0 * m as f64 / z) * jm;
        let scale = lhs.norm().max(rhs.norm()).max(1e-280);
        prop_assert!(
            (lhs - rhs).norm() <= 1e-10 * scale,
            "m={m} z={z}: {lhs} vs {rhs}"
        );
    }

    #[test]
    fn bessel_matches_series_oracle(
        m in 0u32..8,
        re in -20.0_f64..20.0,
        im in -12.0_f64..12.0,
    ) {
        let z = c64(re, im);
        let lib = bessel_j(m, z).unwrap();
        let oracle = series_bessel_j(m, z);
        // the oracle itself loses digits to cancellation away from the axes
        let slack = 1e-11 * (0.25 * z.norm()).exp().max(1.0);
        prop_assert!(
            (lib - oracle).norm() <= slack * oracle.norm().max(1e-12),
            "m={m} z={z}: {lib} vs {oracle}"
        );
    }

    #[test]
    fn lommel_symmetry_and_quadrature(
        m in 0u32..4,
        are in -30.0_f64..30.0,
        aim in -8.0_f64..8.0,
        bre in -30.0_f64..30.0,
        bim in -8.0_f64..8.0,
    ) {
        let a = c64(are, aim);
        let b = c64(bre, bim);
        prop_assume!((a * a - b * b).norm() >= 1e-8);
        let ab = lommel_cross(m, a, b).unwrap();
        let ba = lommel_cross(m, b, a).unwrap();
        prop_assert!((ab - ba).norm() <= 1e-12 * ab.norm().max(1e-12));
        let q = quad_overlap(
            |r| bessel_j(m, a * r).unwrap(),
            |r| bessel_j(m, b * r).unwrap(),
            64,
        )
        .unwrap();
        prop_assert!(
            (ab - q).norm() <= 1e-10 * q.norm().max(1.0),
            "m={m} a={a} b={b}: closed {ab} vs quadrature {q}"
        );
    }

    #[test]
    fn degenerate_switch_continuity(
        m in 0u32..4,
        are in 0.6_f64..20.0,
        aim in -5.0_f64..5.0,
    ) {
        // the closed form stays accurate right up to the switch, and the
        // overlap approaches the self integral at the first-derivative rate
        let a = c64(are, aim);
        let eps = c64(1e-5, 0.0);
        let near = radial_overlap(m, a, a + eps).unwrap();
        let own = radial_overlap(m, a, a).unwrap();
        let q = quad_overlap(
            |r| bessel_j(m, a * r).unwrap(),
            |r| bessel_j(m, (a + eps) * r).unwrap(),
            96,
        )
        .unwrap();
        // evaluation noise is amplified by 1/|a^2 - b^2| this close to the
        // switch, so the agreement floor is the spec's continuity tolerance
        prop_assert!(
            (near - q).norm() <= 1e-6 * q.norm().max(1.0),
            "m={m} a={a}: switch-adjacent value {near} vs quadrature {q}"
        );
        let scale = own.norm().max(1.0);
        let lipschitz = 10.0 * (1.0 + a.norm()) * scale;
        prop_assert!(
            (near - own).norm() <= lipschitz * eps.norm(),
            "m={m} a={a}: {near} vs {own}"
        );
    }

    #[test]
    fn axial_branch_rule(
        re in -45.0_f64..45.0,
        im in -45.0_f64..45.0,
        k in 1.0_f64..60.0,
    ) {
        let gamma = c64(re, im);
        let kn = axial_wavenumber(k, gamma);
        prop_assert!(kn.im <= 1e-12);
        if kn.im.abs() < 1e-14 {
            prop_assert!(kn.re >= 0.0);
        }
        let back = kn * kn + gamma * gamma;
        prop_assert!((back - c64(k * k, 0.0)).norm() <= 1e-8 * (k * k).max(gamma.norm_sqr()));
    }

    #[test]
    fn two_level_matches_dense_oracle(
        a1re in -3.0_f64..3.0, a1im in -3.0_f64..3.0,
        a2re in -3.0_f64..3.0, a2im in -3.0_f64..3.0,
        cre in 0.2_f64..3.0, cim in -3.0_f64..3.0,
        lre in -2.0_f64..2.0, lim in -2.0_f64..2.0,
    ) {
        let (a1, a2, c, l) = (c64(a1re, a1im), c64(a2re, a2im), c64(cre, cim), c64(lre, lim));
        let model = TwoLevelModel::new(a1, a2, c, l).unwrap();
        let (g1, g2, v1, v2) = two_level_eigen(&model);
        let h = [[a1, l * c], [l * c, a2]];
        let (e1, e2, _, _) = dense_eigen_2x2(h);
        let as_sets = ((g1 - e1).norm() + (g2 - e2).norm())
            .min((g1 - e2).norm() + (g2 - e1).norm());
        prop_assert!(as_sets <= 1e-12 * (g1.norm() + g2.norm()).max(1.0));
        prop_assert!(eigen_residual(h, g1, v1) <= 1e-12 * h_scale(&h));
        prop_assert!(eigen_residual(h, g2, v2) <= 1e-12 * h_scale(&h));
    }
}

fn h_scale(h: &[[Complex64; 2]; 2]) -> f64 {
    h.iter()
        .flatten()
        .map(|x| x.norm())
        .fold(1.0_f64, f64::max)
}
