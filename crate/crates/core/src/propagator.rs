//! Product-of-exponentials evolution of the coherence vector.
//!
//! Within one chart the solution is
//!
//! ```text
//! eta(t) = exp(-Gamma t) exp(-i mu_plus B_plus) exp(-i mu_minus B_minus) exp(-i mu B_z) eta(0)
//! ```
//!
//! When the exponents leave their chart (see [`crate::riccati`]) the
//! propagator freezes the 8x8 field propagator at the last good sample and
//! starts a fresh chart from there, so the full non-decay propagator is an
//! ordered product of per-chart factors. Decay is always the scalar
//! `exp(-Gamma t)` applied to `eta`.

use std::sync::OnceLock;

use thiserror::Error;

use crate::algebra::{
    eta_to_rho, nilpotency_degree, rho_to_eta, CoherenceVector, DensityMatrix, GeneratorSet,
    Matrix8c, C64,
};
use crate::fields::FieldConfig;
use crate::observables::ObservableRecord;
use crate::riccati::{MuTrajectory, MuValues, OutOfRange, RiccatiError, RiccatiSolver};
use crate::tolerances::MIN_SEGMENT;

const I: C64 = C64::new(0.0, 1.0);

/// Default bound on the chart extent before a restart.
pub const DEFAULT_CONDITIONING_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Plus,
    Minus,
    Z,
}

/// Powers `G^0 .. G^(k-1)` of a nilpotent generator, with `G^k = 0`.
struct LadderPowers(Vec<Matrix8c>);

impl LadderPowers {
    fn of(g: &Matrix8c) -> LadderPowers {
        let k = nilpotency_degree(g, 8, 1e-12).expect("ladder generator must be nilpotent");
        let mut powers = vec![Matrix8c::identity()];
        for _ in 1..k {
            let next = powers.last().unwrap() * g;
            powers.push(next);
        }
        LadderPowers(powers)
    }

    /// Terminating series `sum_k c^k G^k / k!`.
    fn exp(&self, c: C64) -> Matrix8c {
        let mut out = self.0[0];
        let mut coeff = C64::from(1.0);
        for (k, p) in self.0.iter().enumerate().skip(1) {
            coeff *= c / k as f64;
            out += p * coeff;
        }
        out
    }
}

fn ladders() -> &'static (LadderPowers, LadderPowers) {
    static L: OnceLock<(LadderPowers, LadderPowers)> = OnceLock::new();
    L.get_or_init(|| {
        let g = GeneratorSet::standard();
        (LadderPowers::of(&g.b_plus), LadderPowers::of(&g.b_minus))
    })
}

fn norm1(m: &Matrix8c) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor core. The series
/// is summed until the next term is below `1e-17` of the partial sum, which
/// keeps the relative truncation error under `1e-14` after squaring.
pub fn expm(m: &Matrix8c) -> Matrix8c {
    let n = norm1(m);
    let squarings = if n > 0.5 { (n / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / C64::from(2f64.powi(squarings));
    let mut sum = Matrix8c::identity();
    let mut term = Matrix8c::identity();
    for k in 1..40 {
        term = term * scaled / C64::from(k as f64);
        sum += term;
        if norm1(&term) <= 1e-17 * norm1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `exp(c G)` for one of the generators. The ladder generators use their
/// terminating power series; `B_z` uses [`expm`].
pub fn exp_generator(c: C64, g: Generator) -> Matrix8c {
    match g {
        Generator::Plus => ladders().0.exp(c),
        Generator::Minus => ladders().1.exp(c),
        Generator::Z => expm(&(GeneratorSet::standard().b_z * c)),
    }
}

/// Field part of the chart propagator,
/// `exp(-i mu_plus B_plus) exp(-i mu_minus B_minus) exp(-i mu B_z)`.
pub fn chart_propagator(v: &MuValues) -> Matrix8c {
    exp_generator(-I * v.plus, Generator::Plus)
        * exp_generator(-I * v.minus, Generator::Minus)
        * exp_generator(-I * v.mu, Generator::Z)
}

fn apply_chart(v: &MuValues, eta: &nalgebra::SVector<C64, 8>) -> nalgebra::SVector<C64, 8> {
    let z = exp_generator(-I * v.mu, Generator::Z) * eta;
    let m = exp_generator(-I * v.minus, Generator::Minus) * z;
    exp_generator(-I * v.plus, Generator::Plus) * m
}

/// Single-chart evolution from `eta0` at time 0 to `t`.
pub fn evolve_eta(
    eta0: &CoherenceVector,
    mus: &MuTrajectory,
    gamma: f64,
    t: f64,
) -> Result<CoherenceVector, OutOfRange> {
    let v = mus.at(t)?;
    let eta = apply_chart(&v, eta0.vector()) * C64::from((-gamma * t).exp());
    Ok(CoherenceVector::new(eta))
}

/// Output times `k * dt_out` for `k = 0 ..= ceil(t_end / dt_out)`, with the
/// last one clamped to `t_end`.
pub fn output_grid(t_end: f64, dt_out: f64) -> Vec<f64> {
    let ratio = t_end / dt_out;
    let mut n = ratio.ceil() as usize;
    // 100/0.1 style ratios that land a hair above an integer.
    if n > 0 && (ratio - (n - 1) as f64) <= 1e-9 * ratio.max(1.0) {
        n -= 1;
    }
    (0..=n).map(|k| (k as f64 * dt_out).min(t_end)).collect()
}

/// Sampled solution with per-sample diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub rho: Vec<DensityMatrix>,
    pub eta: Vec<CoherenceVector>,
    pub observables: Vec<ObservableRecord>,
    /// Number of Riccati charts used (1 for the direct solvers).
    pub charts: usize,
}

impl Trajectory {
    pub fn from_etas(grid: Vec<f64>, eta: Vec<CoherenceVector>, trace: f64) -> Trajectory {
        let rho: Vec<DensityMatrix> = eta.iter().map(|e| eta_to_rho(e, trace)).collect();
        Self::assemble(grid, rho, eta)
    }

    pub fn from_rhos(grid: Vec<f64>, rho: Vec<DensityMatrix>) -> Trajectory {
        let eta = rho.iter().map(rho_to_eta).collect();
        Self::assemble(grid, rho, eta)
    }

    fn assemble(grid: Vec<f64>, rho: Vec<DensityMatrix>, eta: Vec<CoherenceVector>) -> Trajectory {
        let observables = grid
            .iter()
            .zip(rho.iter().zip(eta.iter()))
            .map(|(&t, (r, e))| ObservableRecord::new(t, r, e))
            .collect();
        Trajectory {
            grid,
            rho,
            eta,
            observables,
            charts: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Largest entrywise density-matrix difference against another trajectory
    /// on the same grid.
    pub fn max_rho_diff(&self, other: &Trajectory) -> f64 {
        self.rho
            .iter()
            .zip(&other.rho)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("invalid run parameters: {0}")]
    InvalidInput(&'static str),
    #[error("chart restart failed at t = {t}: {source}")]
    Restart {
        t: f64,
        #[source]
        source: RiccatiError,
    },
    #[error(transparent)]
    Solver(#[from] RiccatiError),
}

/// Segmented product-formula solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub tol: f64,
    /// Restart the chart once `max(|mu_plus|, |mu_minus|, |Im mu|)` exceeds this.
    pub conditioning_limit: f64,
    /// Extra restart times, for exercising chart composition.
    pub checkpoints: Vec<f64>,
}

impl Propagator {
    pub fn new(tol: f64) -> Self {
        Propagator {
            tol,
            conditioning_limit: DEFAULT_CONDITIONING_LIMIT,
            checkpoints: Vec::new(),
        }
    }

    /// Accuracy degrades quickly above about 10: the ladder exponentials
    /// are polynomials of degree 4 in the exponents, so rounding is amplified
    /// by roughly the fourth power of the chart extent.
    pub fn with_conditioning_limit(mut self, limit: f64) -> Self {
        self.conditioning_limit = limit;
        self
    }

    pub fn with_checkpoints(mut self, mut checkpoints: Vec<f64>) -> Self {
        checkpoints.sort_by(|a, b| a.total_cmp(b));
        self.checkpoints = checkpoints;
        self
    }

    /// Evolves `rho0` and samples on [`output_grid`].
    pub fn run(
        &self,
        cfg: &FieldConfig,
        rho0: &DensityMatrix,
        t_end: f64,
        dt_out: f64,
    ) -> Result<Trajectory, PropagatorError> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(PropagatorError::InvalidInput("t_end must be positive"));
        }
        if !(dt_out > 0.0) {
            return Err(PropagatorError::InvalidInput("dt_out must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(PropagatorError::InvalidInput("tol must be positive"));
        }
        let grid = output_grid(t_end, dt_out);
        let (etas, charts) = self.evolve_on(cfg, &rho_to_eta(rho0), &grid)?;
        let mut traj = Trajectory::from_etas(grid, etas, rho0.trace().re);
        traj.charts = charts;
        Ok(traj)
    }

    /// Evolves `eta0` from time 0 and samples at the ascending times `grid`
    /// (the first of which must be 0). Returns the samples and the chart count.
    pub fn evolve_on(
        &self,
        cfg: &FieldConfig,
        eta0: &CoherenceVector,
        grid: &[f64],
    ) -> Result<(Vec<CoherenceVector>, usize), PropagatorError> {
        let t_end = *grid.last().ok_or(PropagatorError::InvalidInput("empty output grid"))?;
        if grid[0] != 0.0 {
            return Err(PropagatorError::InvalidInput("output grid must start at 0"));
        }
        let solver = RiccatiSolver::new(self.tol).with_conditioning_limit(self.conditioning_limit);

        let mut out = Vec::with_capacity(grid.len());
        out.push(*eta0);
        let mut next = 1;
        // Field propagator from 0 to the start of the current chart.
        let mut accumulated = Matrix8c::identity();
        let mut chart_start = 0.0;
        let mut charts = 0;

        while chart_start < t_end && next < grid.len() {
            charts += 1;
            let chart_end = self
                .checkpoints
                .iter()
                .copied()
                .find(|&c| c > chart_start && c < t_end)
                .unwrap_or(t_end);
            let stops: Vec<f64> = grid[next..]
                .iter()
                .copied()
                .take_while(|&t| t <= chart_end)
                .collect();

            let traj = match solver.solve(cfg, chart_start, chart_end, &stops) {
                Ok(traj) => traj,
                Err(RiccatiError::Singularity(s)) => {
                    if s.partial.end() - chart_start < MIN_SEGMENT {
                        return Err(PropagatorError::Restart {
                            t: chart_start,
                            source: RiccatiError::Singularity(s),
                        });
                    }
                    s.partial
                }
                Err(e) => return Err(PropagatorError::Restart { t: chart_start, source: e }),
            };
            let reached = traj.end();

            let start_vec = accumulated * eta0.vector();
            while next < grid.len() && grid[next] <= reached {
                let t = grid[next];
                let v = traj.at(t).expect("output time inside chart");
                let eta = apply_chart(&v, &start_vec) * C64::from((-cfg.gamma * t).exp());
                out.push(CoherenceVector::new(eta));
                next += 1;
            }
            accumulated = chart_propagator(&traj.sample(traj.len() - 1)) * accumulated;
            chart_start = reached;
        }
        Ok((out, charts))
    }
}

/// Product-formula run with default chart handling.
pub fn run(
    cfg: &FieldConfig,
    rho0: &DensityMatrix,
    t_end: f64,
    dt_out: f64,
    tol: f64,
) -> Result<Trajectory, PropagatorError> {
    Propagator::new(tol).run(cfg, rho0, t_end, dt_out)
}
