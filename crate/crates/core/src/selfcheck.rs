//! Built-in consistency suite behind the `check` command.

use std::f64::consts::PI;

use crate::algebra::{rho_to_eta, verify_generators, GeneratorSet};
use crate::fields::InitialState;
use crate::oracle::{hydrogen_amplitudes, hydrogen_stark_basis, integrate_eta_direct};
use crate::presets::preset;
use crate::propagator::Propagator;
use crate::report::CheckOutcome;
use crate::tolerances::Tolerances;

pub const ORACLE_TOL: f64 = 1e-10;
pub const PRODUCT_TOL: f64 = 1e-12;

/// Runs every check against the standard generators.
pub fn self_check() -> Vec<CheckOutcome> {
    self_check_with(GeneratorSet::standard())
}

/// Runs every check, taking the algebra from `g`.
pub fn self_check_with(g: &GeneratorSet) -> Vec<CheckOutcome> {
    let mut out = verify_generators(g, &Tolerances::DEFAULT).checks;
    out.push(product_vs_oracle());
    out.push(hydrogen_closed_form());
    out.push(stark_factors());
    out.push(stark_freeze());
    out.push(purity_law());
    out
}

fn failed(name: &str, threshold: f64) -> CheckOutcome {
    CheckOutcome::flag(name, false, f64::INFINITY, threshold)
}

fn product_vs_oracle() -> CheckOutcome {
    let name = "fig1 product vs direct oracle on [0, 100]";
    let p = preset("fig1").expect("fig1 preset");
    let rho0 = p.initial_state.density();
    let product = Propagator::new(PRODUCT_TOL).run(&p.config, &rho0, 100.0, 0.5);
    let direct = integrate_eta_direct(&p.config, &rho_to_eta(&rho0), 100.0, 0.5, ORACLE_TOL);
    match (product, direct) {
        (Ok(a), Ok(b)) => CheckOutcome::within(name, a.max_rho_diff(&b.into_trajectory(1.0)), 1e-6),
        _ => failed(name, 1e-6),
    }
}

fn hydrogen_closed_form() -> CheckOutcome {
    let name = "hydrogen populations vs closed form, two periods";
    let p = preset("hydrogen").expect("hydrogen preset");
    let a = p.config.stark_amplitude().expect("hydrogen fields");
    let omega = p.config.j_frequency;
    let t_end = 4.0 * PI / omega;
    let rho0 = InitialState::Level1.density();
    let Ok(traj) = Propagator::new(PRODUCT_TOL).run(&p.config, &rho0, t_end, 0.05) else {
        return failed(name, 1e-8);
    };
    let mut err: f64 = 0.0;
    for (t, rec) in traj.grid.iter().zip(&traj.observables) {
        let Ok(amp) = hydrogen_amplitudes(a, omega, *t) else {
            return failed(name, 1e-8);
        };
        for (got, want) in [rec.pop1, rec.pop2, rec.pop3].into_iter().zip(amp.populations()) {
            err = err.max((got - want).abs());
        }
    }
    CheckOutcome::within(name, err, 1e-8)
}

fn stark_factors() -> CheckOutcome {
    let basis = hydrogen_stark_basis();
    CheckOutcome::within(
        "Stark eigenvalue factors (+-sqrt(3/2), 0)",
        basis.rediagonalization_error.max(basis.orthonormality_error),
        1e-12,
    )
}

fn stark_freeze() -> CheckOutcome {
    let name = "fig16 Stark state frozen";
    let p = preset("fig16").expect("fig16 preset");
    let rho0 = p.initial_state.density();
    match Propagator::new(PRODUCT_TOL).run(&p.config, &rho0, p.t_end, 0.5) {
        Ok(traj) => {
            let drift = traj.rho.iter().map(|r| r.max_abs_diff(&rho0)).fold(0.0, f64::max);
            CheckOutcome::within(name, drift, 1e-8)
        }
        Err(_) => failed(name, 1e-8),
    }
}

fn purity_law() -> CheckOutcome {
    let name = "fig5 purity law 1/3 + |eta(0)|^2 exp(-2 Gamma t) / 2";
    let p = preset("fig5").expect("fig5 preset");
    let rho0 = p.initial_state.density();
    let n0 = rho_to_eta(&rho0).norm();
    match Propagator::new(PRODUCT_TOL).run(&p.config, &rho0, 100.0, 0.5) {
        Ok(traj) => {
            let err = traj
                .grid
                .iter()
                .zip(&traj.observables)
                .map(|(t, rec)| {
                    let want = 1.0 / 3.0 + 0.5 * (-2.0 * p.config.gamma * t).exp() * n0 * n0;
                    (rec.purity - want).abs()
                })
                .fold(0.0, f64::max);
            CheckOutcome::within(name, err, 1e-7)
        }
        Err(_) => failed(name, 1e-7),
    }
}
