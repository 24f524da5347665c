//! Driven, degenerate three-level system with uniform decoherence.
//!
//! The density matrix is carried as an 8-component coherence vector `eta`
//! obeying `i eta' = L(t) eta`. The main solver writes the propagator as a
//! product of generator exponentials whose exponents solve a Riccati system
//! (see [`riccati`] and [`propagator`]); [`oracle`] holds the direct
//! integrators and the closed-form hydrogen solution used to check it.
//!
//! ```
//! use trilevel::{preset, run};
//!
//! let p = preset("fig1").unwrap();
//! let traj = run(&p.config, &p.initial_state.density(), 10.0, 0.5, 1e-10).unwrap();
//! assert_eq!(traj.len(), 21);
//! assert!((traj.observables[0].pop1 - 1.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod config;
pub mod fields;
pub mod observables;
pub mod ode;
pub mod oracle;
pub mod presets;
pub mod propagator;
pub mod report;
pub mod riccati;
pub mod selfcheck;
pub mod simulate;
pub mod tolerances;

pub use algebra::{
    eta_to_rho, rho_to_eta, verify_algebra, CoherenceVector, DensityMatrix, GeneratorSet, StateError, C64,
};
pub use config::{ConfigError, OutputSpec, RunConfig, SolverKind};
pub use fields::{FieldConfig, FieldError, InitialState, Sign, StarkState};
pub use observables::ObservableRecord;
pub use oracle::OracleError;
pub use presets::{preset, Preset, UnknownPreset, PRESET_NAMES};
pub use propagator::{run, Propagator, PropagatorError, Trajectory};
pub use report::CheckOutcome;
pub use riccati::{solve_mu, MuTrajectory, MuValues, RiccatiError, SingularityError};
pub use simulate::{simulate, SimulateError};
pub use tolerances::Tolerances;
