//! Runs a [`RunConfig`] with the selected solver.

use thiserror::Error;

use crate::algebra::rho_to_eta;
use crate::config::{RunConfig, SolverKind};
use crate::oracle::{hydrogen_trajectory, integrate_eta_direct, integrate_rho_direct, OracleError};
use crate::propagator::{Propagator, PropagatorError, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulateError {
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub fn simulate(cfg: &RunConfig) -> Result<Trajectory, SimulateError> {
    let rho0 = cfg.initial.density();
    let field = &cfg.field;
    let traj = match cfg.solver {
        SolverKind::Product => Propagator::new(cfg.tol).run(field, &rho0, cfg.t_end, cfg.dt_out)?,
        SolverKind::DirectEta => {
            integrate_eta_direct(field, &rho_to_eta(&rho0), cfg.t_end, cfg.dt_out, cfg.tol)?
                .into_trajectory(rho0.trace().re)
        }
        SolverKind::DirectRho => integrate_rho_direct(field, &rho0, cfg.t_end, cfg.dt_out, cfg.tol)?,
        SolverKind::HydrogenAnalytic => hydrogen_trajectory(field, &rho0, cfg.t_end, cfg.dt_out)?,
    };
    Ok(traj)
}
