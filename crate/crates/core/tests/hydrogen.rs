use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trilevel::oracle::{hydrogen_amplitudes, hydrogen_stark_basis, hydrogen_trajectory};
use trilevel::presets::preset;
use trilevel::{FieldConfig, InitialState, Propagator, StarkState};

#[test]
fn product_populations_match_closed_form_over_two_periods() {
    let p = preset("hydrogen").unwrap();
    assert!(p.config.is_hydrogen());
    assert_eq!(p.config.gamma, 0.0);
    let a = p.config.stark_amplitude().unwrap();
    let omega = p.config.j_frequency;
    let traj = Propagator::new(1e-12)
        .run(&p.config, &InitialState::Level1.density(), 2.0 * TAU / omega, 0.01)
        .unwrap();
    for (t, rec) in traj.grid.iter().zip(&traj.observables) {
        let want = hydrogen_amplitudes(a, omega, *t).unwrap().populations();
        for (got, w) in [rec.pop1, rec.pop2, rec.pop3].iter().zip(want) {
            assert!((got - w).abs() <= 1e-8, "t={t}");
        }
    }
}

#[test]
fn stark_factors() {
    let basis = hydrogen_stark_basis();
    let r = 1.5f64.sqrt();
    assert!((r - 1.224745).abs() < 1e-6);
    let mut f = basis.factors;
    f.sort_by(|a, b| a.total_cmp(b));
    assert!((f[0] + r).abs() <= 1e-12 && f[1].abs() <= 1e-12 && (f[2] - r).abs() <= 1e-12);
    assert!(basis.rediagonalization_error <= 1e-12);
    assert!(basis.orthonormality_error <= 1e-12);
}

#[test]
fn product_matches_closed_form_for_other_drives() {
    let starts = [
        InitialState::Level1,
        InitialState::Level2,
        InitialState::Level3,
        InitialState::Stark(StarkState::Zero),
    ];
    for (a, omega, gamma) in [(1.0, 1.0, 0.0), (2.0, 0.5, 0.05), (3.0, 2.0, 0.1), (0.4, 1.3, 0.02)] {
        let cfg = FieldConfig::hydrogen(a, omega, gamma).unwrap();
        for s in &starts {
            let rho0 = s.density();
            let product = Propagator::new(1e-12).run(&cfg, &rho0, 30.0, 0.1).unwrap();
            let closed = hydrogen_trajectory(&cfg, &rho0, 30.0, 0.1).unwrap();
            let err = product.max_rho_diff(&closed);
            assert!(err <= 1e-6, "A={a} omega={omega} {s}: {err:e}");
        }
    }
}

#[test]
fn populations_are_periodic_in_the_drive() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (a, omega) in [(1.0, 1.0), (2.0, 1.0), (10.0, 1.0), (0.7, 2.5)] {
        let period = TAU / omega;
        for _ in 0..10 {
            let t = rng.random_range(0.0..period);
            let p0 = hydrogen_amplitudes(a, omega, t).unwrap().populations();
            let p1 = hydrogen_amplitudes(a, omega, t + period).unwrap().populations();
            for (x, y) in p0.iter().zip(p1) {
                assert!((x - y).abs() <= 1e-10);
            }
        }
        let revival = hydrogen_amplitudes(a, omega, PI / omega).unwrap().populations();
        assert!((revival[0] - 1.0).abs() <= 1e-12);
    }
}

fn crossings_per_period(a: f64, omega: f64) -> usize {
    let n = 20_000;
    let period = TAU / omega;
    let s: Vec<f64> = (0..n)
        .map(|k| hydrogen_amplitudes(a, omega, period * k as f64 / n as f64).unwrap().populations()[0])
        .collect();
    let mean = s.iter().sum::<f64>() / n as f64;
    s.windows(2).filter(|w| (w[0] - mean) * (w[1] - mean) < 0.0).count()
}

#[test]
fn stronger_drive_adds_harmonics() {
    let counts: Vec<usize> = [0.5, 1.0, 2.0, 5.0, 10.0].iter().map(|&a| crossings_per_period(a, 1.0)).collect();
    for w in counts.windows(2) {
        assert!(w[1] >= w[0], "{counts:?}");
    }
    assert!(counts[4] > 3 * counts[0], "{counts:?}");
}
