use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use nl4s::spectral::{apply_multiplier, lq_norm, sobolev_norm, Field, Grid, SobolevSpec};

fn field(dim: usize, seed: u64, band: usize) -> Field {
    let points = if dim == 1 { 128 } else { 32 };
    let g = Arc::new(Grid::new(dim, 8.0, points).unwrap());
    Field::random_band_limited(g, seed, band)
}

fn rel_l2(a: &Field, b: &Field) -> f64 {
    lq_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lq_norm(b, 2.0).unwrap()
}

fn bracket(xi: [f64; 2]) -> f64 {
    (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(dim in 1usize..=2, seed in any::<u64>(), band in 2usize..10) {
        let f = field(dim, seed, band);
        let a = lq_norm(&f, 2.0).unwrap();
        let b = sobolev_norm(&f, SobolevSpec::inhomogeneous(0.0)).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn transform_round_trip(dim in 1usize..=2, seed in any::<u64>()) {
        let f = field(dim, seed, 8);
        let back = f.to_fourier().unwrap().to_physical().unwrap();
        prop_assert!(rel_l2(&back, &f) < 1e-12);
    }

    #[test]
    fn multiplier_composition(seed in any::<u64>(), s1 in -2.0f64..2.0, s2 in -2.0f64..2.0, t in -1.0f64..1.0) {
        let f = field(1, seed, 6);
        let m1 = move |xi: [f64; 2]| Complex64::from_polar(bracket(xi).powf(s1), t * xi[0]);
        let m2 = move |xi: [f64; 2]| Complex64::new(bracket(xi).powf(s2), 0.0);
        let twice = apply_multiplier(&apply_multiplier(&f, m2).unwrap(), m1).unwrap();
        let once = apply_multiplier(&f, move |xi| m1(xi) * m2(xi)).unwrap();
        prop_assert!(rel_l2(&twice, &once) < 1e-12);
    }

    #[test]
    fn multiplier_inverse(seed in any::<u64>(), s in 0.0f64..3.0) {
        let f = field(2, seed, 5);
        let up = apply_multiplier(&f, move |xi| bracket(xi).powf(s).into()).unwrap();
        let back = apply_multiplier(&up, move |xi| bracket(xi).powf(-s).into()).unwrap();
        prop_assert!(rel_l2(&back, &f) < 1e-10);
    }

    #[test]
    fn interpolation_inequality(seed in any::<u64>(), gamma in 0.1f64..3.0, frac in 0.01f64..0.99) {
        let f = field(1, seed, 8);
        let eps = frac * gamma;
        let lhs = sobolev_norm(&f, SobolevSpec::inhomogeneous(gamma - eps)).unwrap();
        let hg = sobolev_norm(&f, SobolevSpec::inhomogeneous(gamma)).unwrap();
        let l2 = lq_norm(&f, 2.0).unwrap();
        let rhs = hg.powf(1.0 - eps / gamma) * l2.powf(eps / gamma);
        prop_assert!(lhs <= rhs * (1.0 + 1e-10));
    }

    #[test]
    fn inhomogeneous_norms_increase_with_gamma(dim in 1usize..=2, seed in any::<u64>(), g in -3.0f64..3.0, dg in 0.0f64..2.0) {
        let f = field(dim, seed, 6);
        let a = sobolev_norm(&f, SobolevSpec::inhomogeneous(g)).unwrap();
        let b = sobolev_norm(&f, SobolevSpec::inhomogeneous(g + dg)).unwrap();
        prop_assert!(b >= a * (1.0 - 1e-14));
    }
}
