mod common;

use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trilevel::algebra::{eta_from_matrix, matrix_from_eta};
use trilevel::observables::purity;
use trilevel::{eta_to_rho, rho_to_eta, DensityMatrix};

fn arb_complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn arb_matrix() -> impl Strategy<Value = Matrix3<Complex64>> {
    proptest::collection::vec(arb_complex(), 9).prop_map(|v| Matrix3::from_column_slice(&v))
}

fn arb_density() -> impl Strategy<Value = DensityMatrix> {
    arb_matrix().prop_filter_map("degenerate", |g| {
        let m = g * g.adjoint();
        let tr = m.trace();
        (tr.re > 1e-6).then(|| DensityMatrix::new(m / tr).unwrap())
    })
}

proptest! {
    #[test]
    fn any_matrix_round_trips(m in arb_matrix()) {
        let back = matrix_from_eta(&eta_from_matrix(&m), m.trace());
        prop_assert!((back - m).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn states_round_trip_with_real_pattern(rho in arb_density()) {
        let eta = rho_to_eta(&rho);
        prop_assert!(eta.reality_defect() < 1e-15);
        let back = eta_to_rho(&eta, 1.0);
        prop_assert!(back.max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn purity_identity(rho in arb_density()) {
        let n = rho_to_eta(&rho).norm();
        prop_assert!((purity(&rho) - (1.0 / 3.0 + 0.5 * n * n)).abs() < 1e-12);
    }

    #[test]
    fn mapping_is_linear(a in arb_matrix(), b in arb_matrix(), s in arb_complex()) {
        let lhs = eta_from_matrix(&(a + b * s));
        let rhs = eta_from_matrix(&a).vector() + eta_from_matrix(&b).vector() * s;
        prop_assert!((lhs.vector() - rhs).iter().all(|z| z.norm() < 1e-14));
    }
}

#[test]
fn purity_identity_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
    let mut worst: f64 = 0.0;
    for k in 0..2000 {
        let rho = if k % 2 == 0 { common::random_density(&mut rng) } else { common::random_pure(&mut rng) };
        let n = rho_to_eta(&rho).norm();
        worst = worst.max((purity(&rho) - (1.0 / 3.0 + 0.5 * n * n)).abs());
    }
    assert!(worst <= 1e-12, "{worst:e}");
}
