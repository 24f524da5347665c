//! Exponent functions of the product-of-exponentials propagator.
//!
//! For `eta(t) = exp(-i mu_plus B_plus) exp(-i mu_minus B_minus) exp(-i mu B_z) eta(0)`
//! (decay factor aside) to solve `i eta' = (eps B_z + 2J B_x) eta`, the three
//! scalar exponents must obey
//!
//! ```text
//! mu_plus'  = -i eps mu_plus + J (1 + mu_plus^2)      (Riccati)
//! mu'       = 2i J mu_plus + eps
//! mu_minus' = J + i mu' mu_minus
//! ```
//!
//! with all three zero at the start of the chart. They are integrated together
//! as one complex 3-vector so `mu` and `mu_minus` share the adaptive grid.
//! `mu_plus` can blow up in finite time (e.g. `tan(J t)` for constant `J`);
//! that is a failure of the coordinate chart, reported as [`SingularityError`].

use std::ops::ControlFlow;

use nalgebra::SVector;
use thiserror::Error;

use crate::algebra::C64;
use crate::fields::{epsilon, epsilon_rate, j_coupling, j_coupling_rate, FieldConfig};
use crate::ode::{Dopri5, OdeError, Outcome};
use crate::tolerances::BLOWUP_THRESHOLD;

type State = SVector<C64, 3>;

const I: C64 = C64::new(0.0, 1.0);

/// The three exponents at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MuValues {
    pub plus: C64,
    pub minus: C64,
    pub mu: C64,
}

impl MuValues {
    fn from_state(y: &State) -> Self {
        MuValues {
            plus: y[0],
            minus: y[1],
            mu: y[2],
        }
    }

    /// Size of the exponents that make the product of exponentials
    /// non-unitary: `max(|mu_plus|, |mu_minus|, |Im mu|)`.
    pub fn chart_extent(&self) -> f64 {
        self.plus.norm().max(self.minus.norm()).max(self.mu.im.abs())
    }
}

/// Right-hand side of the exponent system at time `t`.
pub fn mu_rhs(t: f64, mus: &MuValues, cfg: &FieldConfig) -> MuValues {
    let eps = epsilon(t, cfg);
    let j = j_coupling(t, cfg);
    let mu_dot = I * 2.0 * j * mus.plus + eps;
    MuValues {
        plus: -I * eps * mus.plus + j * (1.0 + mus.plus * mus.plus),
        minus: j + I * mu_dot * mus.minus,
        mu: mu_dot,
    }
}

fn rhs(t: f64, y: &State, cfg: &FieldConfig) -> State {
    let d = mu_rhs(t, &MuValues::from_state(y), cfg);
    State::new(d.plus, d.minus, d.mu)
}

// Second time derivative, from differentiating the system once more.
fn second_derivative(t: f64, y: &State, dy: &State, cfg: &FieldConfig) -> State {
    let (eps, deps) = (epsilon(t, cfg), epsilon_rate(t, cfg));
    let (j, dj) = (j_coupling(t, cfg), j_coupling_rate(t, cfg));
    let (p, m) = (y[0], y[1]);
    let (dp, dm, dmu) = (dy[0], dy[1], dy[2]);
    let ddp = -I * (deps * p + eps * dp) + dj * (1.0 + p * p) + 2.0 * j * p * dp;
    let ddmu = I * 2.0 * (dj * p + j * dp) + deps;
    let ddm = dj + I * (ddmu * m + dmu * dm);
    State::new(ddp, ddm, ddmu)
}

/// Residuals of the three defining equations for given values and time derivatives.
pub fn mu_residuals(t: f64, mus: &MuValues, dmus: &MuValues, cfg: &FieldConfig) -> [f64; 3] {
    let eps = epsilon(t, cfg);
    let j = j_coupling(t, cfg);
    let riccati = dmus.plus + I * eps * mus.plus - j * (1.0 + mus.plus * mus.plus);
    let quadrature = dmus.mu - I * 2.0 * j * mus.plus - eps;
    let minus = dmus.minus - I * dmus.mu * mus.minus - j;
    [riccati.norm(), quadrature.norm(), minus.norm()]
}

/// Sampled exponents with quintic Hermite dense output (values, first and
/// second derivatives at every accepted step).
#[derive(Debug, Clone, PartialEq)]
pub struct MuTrajectory {
    grid: Vec<f64>,
    values: Vec<State>,
    derivs: Vec<State>,
    curvatures: Vec<State>,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("time {t} outside trajectory range [{start}, {end}]")]
pub struct OutOfRange {
    pub t: f64,
    pub start: f64,
    pub end: f64,
}

impl MuTrajectory {
    fn starting_at(t0: f64, d0: State, dd0: State) -> Self {
        MuTrajectory {
            grid: vec![t0],
            values: vec![State::zeros()],
            derivs: vec![d0],
            curvatures: vec![dd0],
        }
    }

    fn push(&mut self, t: f64, y: State, dy: State, ddy: State) {
        self.grid.push(t);
        self.values.push(y);
        self.derivs.push(dy);
        self.curvatures.push(ddy);
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        *self.grid.last().expect("trajectory has at least one sample")
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn sample(&self, k: usize) -> MuValues {
        MuValues::from_state(&self.values[k])
    }

    pub fn mu_plus(&self) -> Vec<C64> {
        self.values.iter().map(|y| y[0]).collect()
    }

    pub fn mu_minus(&self) -> Vec<C64> {
        self.values.iter().map(|y| y[1]).collect()
    }

    pub fn mu(&self) -> Vec<C64> {
        self.values.iter().map(|y| y[2]).collect()
    }

    fn locate(&self, t: f64) -> Result<Result<usize, usize>, OutOfRange> {
        if !(t >= self.start() && t <= self.end()) {
            return Err(OutOfRange {
                t,
                start: self.start(),
                end: self.end(),
            });
        }
        Ok(self.grid.binary_search_by(|g| g.total_cmp(&t)))
    }

    /// Exponents at `t`: exact at grid points, quintic Hermite in between.
    pub fn at(&self, t: f64) -> Result<MuValues, OutOfRange> {
        Ok(match self.locate(t)? {
            Ok(k) => self.sample(k),
            Err(k) => MuValues::from_state(&self.hermite(k - 1, t).0),
        })
    }

    /// Time derivative of the interpolant at `t` (the stored derivative at grid points).
    pub fn derivative_at(&self, t: f64) -> Result<MuValues, OutOfRange> {
        Ok(match self.locate(t)? {
            Ok(k) => MuValues::from_state(&self.derivs[k]),
            Err(k) => MuValues::from_state(&self.hermite(k - 1, t).1),
        })
    }

    fn hermite(&self, k: usize, t: f64) -> (State, State) {
        let (t0, t1) = (self.grid[k], self.grid[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3, s4, s5) = (s * s, s.powi(3), s.powi(4), s.powi(5));
        let (y0, y1) = (&self.values[k], &self.values[k + 1]);
        let (d0, d1) = (self.derivs[k] * C64::from(h), self.derivs[k + 1] * C64::from(h));
        let (c0, c1) = (
            self.curvatures[k] * C64::from(h * h),
            self.curvatures[k + 1] * C64::from(h * h),
        );
        let w = |x: f64| C64::from(x);
        let value = y0 * w(1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5)
            + d0 * w(s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5)
            + c0 * w(0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5))
            + y1 * w(10.0 * s3 - 15.0 * s4 + 6.0 * s5)
            + d1 * w(-4.0 * s3 + 7.0 * s4 - 3.0 * s5)
            + c1 * w(0.5 * (s3 - 2.0 * s4 + s5));
        let slope = (y0 * w(-30.0 * s2 + 60.0 * s3 - 30.0 * s4)
            + d0 * w(1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4)
            + c0 * w(0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4))
            + y1 * w(30.0 * s2 - 60.0 * s3 + 30.0 * s4)
            + d1 * w(-12.0 * s2 + 28.0 * s3 - 15.0 * s4)
            + c1 * w(0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4)))
            / C64::from(h);
        (value, slope)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartFailure {
    /// `|mu_plus|` exceeded the blow-up threshold.
    Blowup,
    /// The chart extent exceeded the caller's conditioning limit.
    Conditioning,
}

/// The exponents left their chart at `t_star`. `partial` holds every accepted
/// sample before the crossing, so a new chart can start at `partial.end()`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("Riccati chart singular at t = {t_star} ({kind:?})")]
pub struct SingularityError {
    pub t_star: f64,
    pub kind: ChartFailure,
    pub partial: MuTrajectory,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiccatiError {
    #[error(transparent)]
    Singularity(Box<SingularityError>),
    #[error(transparent)]
    Integrator(#[from] OdeError),
    #[error("invalid solve request: {0}")]
    InvalidInput(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiSolver {
    pub tol: f64,
    pub blowup_threshold: f64,
    /// Optional bound on [`MuValues::chart_extent`]; exceeding it ends the
    /// solve with [`ChartFailure::Conditioning`].
    pub conditioning_limit: Option<f64>,
}

impl RiccatiSolver {
    pub fn new(tol: f64) -> Self {
        RiccatiSolver {
            tol,
            blowup_threshold: BLOWUP_THRESHOLD,
            conditioning_limit: None,
        }
    }

    pub fn with_conditioning_limit(mut self, limit: f64) -> Self {
        self.conditioning_limit = Some(limit);
        self
    }

    /// Solves from `t_start` (where all exponents vanish) to `t_end`, with
    /// exact samples at every time in `stops`.
    pub fn solve(
        &self,
        cfg: &FieldConfig,
        t_start: f64,
        t_end: f64,
        stops: &[f64],
    ) -> Result<MuTrajectory, RiccatiError> {
        if !(self.tol > 0.0) {
            return Err(RiccatiError::InvalidInput("tol must be positive"));
        }
        if !(t_end > t_start) {
            return Err(RiccatiError::InvalidInput("t_end must exceed the start time"));
        }

        if cfg.is_field_free() {
            let mut traj = MuTrajectory::starting_at(t_start, State::zeros(), State::zeros());
            for &s in stops.iter().filter(|&&s| s > t_start && s < t_end) {
                if s > traj.end() {
                    traj.push(s, State::zeros(), State::zeros(), State::zeros());
                }
            }
            traj.push(t_end, State::zeros(), State::zeros(), State::zeros());
            return Ok(traj);
        }

        let f = |t: f64, y: &State| rhs(t, y, cfg);
        let d0 = f(t_start, &State::zeros());
        let mut traj = MuTrajectory::starting_at(t_start, d0, second_derivative(t_start, &State::zeros(), &d0, cfg));
        let mut failure = None;

        let max_freq = cfg.eps_frequency.abs().max(cfg.j_frequency.abs());
        let mut integrator = Dopri5 {
            per_unit_step: true,
            ..Dopri5::new(self.tol)
        };
        if max_freq > 0.0 {
            integrator = integrator.with_h_max(0.1 * std::f64::consts::TAU / max_freq);
        }

        let outcome = integrator.integrate(f, t_start, State::zeros(), t_end, stops, |t, y, dy| {
            let v = MuValues::from_state(y);
            let extent_ok = !y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite());
            if !extent_ok || v.plus.norm() > self.blowup_threshold {
                failure = Some(ChartFailure::Blowup);
                return ControlFlow::Break(());
            }
            if self.conditioning_limit.is_some_and(|lim| v.chart_extent() > lim) {
                failure = Some(ChartFailure::Conditioning);
                return ControlFlow::Break(());
            }
            traj.push(t, *y, *dy, second_derivative(t, y, dy, cfg));
            ControlFlow::Continue(())
        });

        match outcome {
            Ok(Outcome::Finished) => Ok(traj),
            Ok(Outcome::Stopped { t }) => Err(RiccatiError::Singularity(Box::new(SingularityError {
                t_star: t,
                kind: failure.unwrap_or(ChartFailure::Blowup),
                partial: traj,
            }))),
            Err(OdeError::StepSizeUnderflow { t }) => {
                // Step collapse on approach to a pole.
                Err(RiccatiError::Singularity(Box::new(SingularityError {
                    t_star: t,
                    kind: ChartFailure::Blowup,
                    partial: traj,
                })))
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// Solves the exponent system on `[0, t_end]` with local tolerance `tol`.
pub fn solve_mu(cfg: &FieldConfig, t_end: f64, tol: f64) -> Result<MuTrajectory, RiccatiError> {
    RiccatiSolver::new(tol).solve(cfg, 0.0, t_end, &[])
}
