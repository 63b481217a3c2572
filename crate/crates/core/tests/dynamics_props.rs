use std::sync::Arc;

use proptest::prelude::*;

use nl4s::dynamics::{evolve, phase_flow, strang_step, EquationParams, StepControl};
use nl4s::experiments::{co_scaled, Profile};
use nl4s::spectral::{lq_norm, Field, Grid};

fn rel_l2(a: &Field, b: &Field) -> f64 {
    lq_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lq_norm(b, 2.0).unwrap()
}

fn smooth(seed: u64) -> Field {
    let g = Arc::new(Grid::new(1, 16.0, 256).unwrap());
    Field::random_band_limited(g, seed, 6).scale(0.5.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn step_preserves_mass(seed in any::<u64>(), nu in 2.0f64..7.0, mu in prop_oneof![Just(1.0), Just(-1.0)], dt in 1e-4f64..0.05) {
        let f = smooth(seed);
        let p = EquationParams::new(1, nu, mu, 1.0).unwrap();
        let mut u = f.clone();
        for _ in 0..50 {
            u = strang_step(&u, dt, &p, false).unwrap();
        }
        let (m0, m1) = (lq_norm(&f, 2.0).unwrap(), lq_norm(&u, 2.0).unwrap());
        prop_assert!((m1 - m0).abs() <= 1e-12 * m0);
    }

    #[test]
    fn step_is_reversible(seed in any::<u64>(), dt in 1e-3f64..0.05) {
        let f = smooth(seed);
        let p = EquationParams::new(1, 3.0, 1.0, 1.0).unwrap();
        let back = strang_step(&strang_step(&f, dt, &p, false).unwrap(), -dt, &p, false).unwrap();
        prop_assert!(rel_l2(&back, &f) < 1e-9);
    }

    #[test]
    fn zero_dispersion_is_the_phase_flow(seed in any::<u64>(), t in 0.1f64..3.0) {
        let f = smooth(seed);
        let p = EquationParams::new(1, 5.0, -1.0, 0.0).unwrap();
        let traj = evolve(&f, &StepControl::new(0.01, t), &p).unwrap();
        let exact = phase_flow(&f, t, &p).unwrap();
        prop_assert!(rel_l2(&traj.last().field, &exact) < 1e-12);
    }
}

fn evolve_to(f: &Field, p: &EquationParams, dt: f64, t: f64) -> Field {
    evolve(f, &StepControl::new(dt, t), p).unwrap().last().field.clone()
}

#[test]
fn co_scaled_runs_agree() {
    let g = Arc::new(Grid::new(1, 16.0, 256).unwrap());
    let f = Profile::Gaussian { amp: 1.0, width: 1.5 }.build(&g).unwrap();
    for nu in [3.0, 5.0] {
        let p = EquationParams::new(1, nu, 1.0, 1.0).unwrap();
        let reference = evolve_to(&f, &p, 0.01, 0.5);
        for lam in [0.5, 2.0] {
            let l4: f64 = lam * lam * lam * lam;
            let u = evolve_to(&co_scaled(&f, nu, lam).unwrap(), &p, 0.01 * l4, 0.5 * l4);
            let expected = co_scaled(&reference, nu, lam).unwrap();
            let m: f64 = u
                .values()
                .iter()
                .zip(expected.values())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
                / expected.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!(m < 1e-6, "nu = {nu}, lambda = {lam}: {m:e}");
        }
    }
}

#[test]
fn back_transformed_small_dispersion_matches_full_equation() {
    // phi solves the weak-dispersion equation on [-L, L); u(t, x) = phi(t, delta x)
    // solves the full equation on [-L/delta, L/delta).
    let delta = 0.5;
    let g = Arc::new(Grid::new(1, 8.0, 256).unwrap());
    let phi0 = Profile::gaussian().build(&g).unwrap();
    let weak = EquationParams::new(1, 3.0, 1.0, delta).unwrap();
    let phi = evolve_to(&phi0, &weak, 0.01, 0.4);

    let gu = Arc::new(g.scaled(1.0 / delta).unwrap());
    let u0 = Field::new(gu.clone(), phi0.values().to_vec(), phi0.space()).unwrap();
    let full = EquationParams::new(1, 3.0, 1.0, 1.0).unwrap();
    let u = evolve_to(&u0, &full, 0.01, 0.4);
    let diff: f64 = u
        .values()
        .iter()
        .zip(phi.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let norm: f64 = phi.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    assert!(diff / norm < 1e-6, "{:e}", diff / norm);
}
