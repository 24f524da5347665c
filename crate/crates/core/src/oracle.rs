//! Reference solutions that share no machinery with the product formula:
//! direct adaptive integration in coherence-vector and density-matrix
//! coordinates, and the closed-form n=3 hydrogen Stark solution.

use std::ops::ControlFlow;

use nalgebra::SVector;
use thiserror::Error;

use crate::algebra::{c, CoherenceVector, DensityMatrix, Matrix3c, Vector3c, C64};
use crate::fields::{hamiltonian, liouvillian, FieldConfig, StarkState};
use crate::observables::purity;
use crate::ode::{Dopri5, OdeError};
use crate::propagator::{output_grid, Trajectory};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("omega must be nonzero for the closed-form hydrogen solution")]
    ZeroFrequency,
    #[error("initial state is not pure (Tr rho^2 = {0})")]
    NotPure(f64),
    #[error("fields do not have the hydrogen structure (Omega = omega, delta = 0, A/B = sqrt 2)")]
    NotHydrogen,
    #[error("invalid oracle parameters: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Integrator(#[from] OdeError),
}

/// Coherence vectors on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaSamples {
    pub grid: Vec<f64>,
    pub eta: Vec<CoherenceVector>,
}

impl EtaSamples {
    pub fn into_trajectory(self, trace: f64) -> Trajectory {
        Trajectory::from_etas(self.grid, self.eta, trace)
    }
}

fn check_run(t_end: f64, dt_out: f64, tol: f64) -> Result<(), OracleError> {
    if !(t_end > 0.0) || !(dt_out > 0.0) || !(tol > 0.0) {
        return Err(OracleError::InvalidInput("t_end, dt_out and tol must be positive"));
    }
    Ok(())
}

/// Integrates `i eta' = L(t) eta` directly.
pub fn integrate_eta_direct(
    cfg: &FieldConfig,
    eta0: &CoherenceVector,
    t_end: f64,
    dt_out: f64,
    tol: f64,
) -> Result<EtaSamples, OracleError> {
    check_run(t_end, dt_out, tol)?;
    let grid = output_grid(t_end, dt_out);
    let eta = integrate_eta_on(cfg, eta0, &grid, tol)?;
    Ok(EtaSamples { grid, eta })
}

/// As [`integrate_eta_direct`] on an explicit ascending grid starting at 0.
pub fn integrate_eta_on(
    cfg: &FieldConfig,
    eta0: &CoherenceVector,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<CoherenceVector>, OracleError> {
    let f = |t: f64, y: &SVector<C64, 8>| -(liouvillian(t, cfg) * y) * I;
    let mut out = vec![*eta0];
    let t_end = *grid.last().unwrap_or(&0.0);
    if t_end <= 0.0 {
        return Ok(out);
    }
    Dopri5::new(tol).integrate(f, 0.0, *eta0.vector(), t_end, &grid[1..], |t, y, _| {
        if grid[out.len()..].first() == Some(&t) {
            out.push(CoherenceVector::new(*y));
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

fn rho_rhs(t: f64, y: &SVector<C64, 9>, cfg: &FieldConfig) -> SVector<C64, 9> {
    let rho = Matrix3c::from_column_slice(y.as_slice());
    let h = hamiltonian(t, cfg);
    let unitary = -(h * rho - rho * h) * I;
    let mixed = Matrix3c::identity() * (rho.trace() / 3.0);
    let d = unitary - (rho - mixed) * C64::from(cfg.gamma);
    SVector::<C64, 9>::from_column_slice(d.as_slice())
}

/// Integrates `rho' = -i[H(t), rho] - Gamma (rho - Tr(rho) I / 3)` directly.
///
/// The dissipator is the one whose coherence-vector image is `-Gamma` on all
/// eight components, i.e. the same uniform decoherence as `L(t)`.
pub fn integrate_rho_direct(
    cfg: &FieldConfig,
    rho0: &DensityMatrix,
    t_end: f64,
    dt_out: f64,
    tol: f64,
) -> Result<Trajectory, OracleError> {
    check_run(t_end, dt_out, tol)?;
    let grid = output_grid(t_end, dt_out);
    let y0 = SVector::<C64, 9>::from_column_slice(rho0.matrix().as_slice());
    let mut rho = vec![*rho0];
    Dopri5::new(tol).integrate(
        |t, y| rho_rhs(t, y, cfg),
        0.0,
        y0,
        t_end,
        &grid[1..],
        |t, y, _| {
            if grid[rho.len()..].first() == Some(&t) {
                rho.push(DensityMatrix::from_matrix_unchecked(Matrix3c::from_column_slice(
                    y.as_slice(),
                )));
            }
            ControlFlow::Continue(())
        },
    )?;
    Ok(Trajectory::from_rhos(grid, rho))
}

/// Amplitudes on the 3s, 3p, 3d states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeTriple {
    pub s: C64,
    pub p: C64,
    pub d: C64,
}

impl AmplitudeTriple {
    pub fn norm_sqr(&self) -> f64 {
        self.s.norm_sqr() + self.p.norm_sqr() + self.d.norm_sqr()
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.s.norm_sqr(), self.p.norm_sqr(), self.d.norm_sqr()]
    }

    pub fn vector(&self) -> Vector3c {
        Vector3c::new(self.s, self.p, self.d)
    }
}

/// Phase argument `sqrt(3/2) (a / omega) sin(omega t)`.
fn stark_angle(a: f64, omega: f64, t: f64) -> f64 {
    1.5f64.sqrt() * (a / omega) * (omega * t).sin()
}

/// Closed-form amplitudes for the whole population starting in 3s, under
/// `i psi' = a cos(omega t) M0 psi`.
pub fn hydrogen_amplitudes(a: f64, omega: f64, t: f64) -> Result<AmplitudeTriple, OracleError> {
    if omega == 0.0 {
        return Err(OracleError::ZeroFrequency);
    }
    let theta = stark_angle(a, omega, t);
    let (sin, cos) = theta.sin_cos();
    Ok(AmplitudeTriple {
        s: c((1.0 + 2.0 * cos) / 3.0, 0.0),
        p: c(0.0, (2.0f64 / 3.0).sqrt() * sin),
        d: c(2f64.sqrt() / 3.0 * (cos - 1.0), 0.0),
    })
}

/// Stark coefficient matrix per unit amplitude: s-p entries `-1`, p-d entries `-1/sqrt2`.
pub fn stark_matrix() -> Matrix3c {
    let r = -std::f64::consts::FRAC_1_SQRT_2;
    Matrix3c::new(
        c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0),
        c(-1.0, 0.0), c(0.0, 0.0), c(r, 0.0),
        c(0.0, 0.0), c(r, 0.0), c(0.0, 0.0),
    )
}

/// Parabolic eigenstates (plus, minus, zero) and their eigenvalue factors.
#[derive(Debug, Clone, PartialEq)]
pub struct StarkBasis {
    pub states: [Vector3c; 3],
    /// Eigenvalues of [`stark_matrix`]; multiply by the amplitude.
    pub factors: [f64; 3],
    /// Worst disagreement between the closed forms and a numerical
    /// diagonalization (eigenvalues and eigenvector residuals).
    pub rediagonalization_error: f64,
    /// Worst deviation of the Gram matrix from the identity.
    pub orthonormality_error: f64,
}

pub fn hydrogen_stark_basis() -> StarkBasis {
    let m0 = stark_matrix();
    let states = StarkState::ALL.map(StarkState::vector);
    let factors = StarkState::ALL.map(StarkState::eigenvalue_factor);

    let mut numeric: Vec<f64> = m0.symmetric_eigenvalues().iter().copied().collect();
    numeric.sort_by(|a, b| a.total_cmp(b));
    let mut closed = factors.to_vec();
    closed.sort_by(|a, b| a.total_cmp(b));
    let mut err = numeric
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    for (v, l) in states.iter().zip(factors) {
        err = err.max((m0 * v - v * c(l, 0.0)).camax());
    }

    let mut ortho: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((a.dotc(b) - c(want, 0.0)).norm());
        }
    }

    StarkBasis {
        states,
        factors,
        rediagonalization_error: err,
        orthonormality_error: ortho,
    }
}

/// Unitary Schroedinger evolution of `psi0` under `a cos(omega t) M0`.
pub fn hydrogen_state(a: f64, omega: f64, psi0: &Vector3c, t: f64) -> Result<Vector3c, OracleError> {
    if omega == 0.0 {
        return Err(OracleError::ZeroFrequency);
    }
    let tau = (omega * t).sin() / omega;
    let basis = hydrogen_stark_basis();
    let mut psi = Vector3c::zeros();
    for (v, l) in basis.states.iter().zip(basis.factors) {
        let phase = C64::from_polar(1.0, -a * l * tau);
        psi += v * (v.dotc(psi0) * phase);
    }
    Ok(psi)
}

/// `rho(t) = I/3 + exp(-Gamma t) (|psi(t)><psi(t)| - I/3)` for a pure `rho0`.
pub fn hydrogen_density(
    a: f64,
    omega: f64,
    gamma: f64,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix, OracleError> {
    let psi0 = pure_state_vector(rho0)?;
    let psi = hydrogen_state(a, omega, &psi0, t)?;
    let third = Matrix3c::identity() / C64::from(3.0);
    let pure = DensityMatrix::pure(&psi);
    let m = third + (pure.matrix() - third) * C64::from((-gamma * t).exp());
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Closed-form trajectory for hydrogen-structured fields.
pub fn hydrogen_trajectory(
    cfg: &FieldConfig,
    rho0: &DensityMatrix,
    t_end: f64,
    dt_out: f64,
) -> Result<Trajectory, OracleError> {
    check_run(t_end, dt_out, 1.0)?;
    let a = cfg.stark_amplitude().ok_or(OracleError::NotHydrogen)?;
    let grid = output_grid(t_end, dt_out);
    let rho = grid
        .iter()
        .map(|&t| hydrogen_density(a, cfg.j_frequency, cfg.gamma, rho0, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Trajectory::from_rhos(grid, rho))
}

/// Principal eigenvector of a pure density matrix.
pub fn pure_state_vector(rho: &DensityMatrix) -> Result<Vector3c, OracleError> {
    let p = purity(rho);
    if (p - 1.0).abs() > 1e-9 {
        return Err(OracleError::NotPure(p));
    }
    let h = (rho.matrix() + rho.matrix().adjoint()) * C64::from(0.5);
    let eig = h.symmetric_eigen();
    let k = eig.eigenvalues.imax();
    Ok(eig.eigenvectors.column(k).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rho_to_eta;
    use std::f64::consts::PI;

    #[test]
    fn amplitudes_at_origin_and_revival() {
        let z = hydrogen_amplitudes(1.3, 0.7, 0.0).unwrap();
        assert_eq!(z.populations(), [1.0, 0.0, 0.0]);
        let r = hydrogen_amplitudes(1.3, 0.7, PI / 0.7).unwrap();
        assert!((r.s - c(1.0, 0.0)).norm() < 1e-14);
        assert!(r.p.norm() < 1e-14 && r.d.norm() < 1e-14);
    }

    #[test]
    fn amplitudes_at_theta_pi() {
        // sqrt(3/2) a / omega sin(omega t) = pi with omega t = pi/2.
        let omega = 1.0;
        let a = PI / 1.5f64.sqrt();
        let z = hydrogen_amplitudes(a, omega, PI / 2.0).unwrap();
        assert!((z.s - c(-1.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!(z.p.norm() < 1e-14);
        assert!((z.d - c(-2.0 * 2f64.sqrt() / 3.0, 0.0)).norm() < 1e-14);
        let p = z.populations();
        assert!((p[0] - 1.0 / 9.0).abs() < 1e-14 && (p[2] - 8.0 / 9.0).abs() < 1e-14);
        assert!((z.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_frequency_rejected() {
        assert_eq!(hydrogen_amplitudes(1.0, 0.0, 1.0), Err(OracleError::ZeroFrequency));
    }

    #[test]
    fn stark_basis() {
        let b = hydrogen_stark_basis();
        assert!(b.rediagonalization_error < 1e-12);
        assert!(b.orthonormality_error < 1e-12);
        let r = 1.5f64.sqrt();
        assert_eq!(b.factors, [-r, r, 0.0]);
        assert!((r - 1.224745).abs() < 1e-6);
        let zero = Vector3c::new(c(1.0, 0.0), c(0.0, 0.0), c(-(2f64.sqrt()), 0.0)) / c(3f64.sqrt(), 0.0);
        assert!((stark_matrix() * zero).camax() < 1e-15);
    }

    #[test]
    fn state_evolution_reproduces_amplitudes() {
        let s = Vector3c::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        for k in 0..25 {
            let t = 0.37 * k as f64;
            let psi = hydrogen_state(2.0, 1.0, &s, t).unwrap();
            let want = hydrogen_amplitudes(2.0, 1.0, t).unwrap().vector();
            assert!((psi - want).camax() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn stark_eigenstate_decays_monotonically() {
        let rho0 = DensityMatrix::pure(&StarkState::Plus.vector());
        let third = DensityMatrix::maximally_mixed();
        let mut prev = f64::INFINITY;
        for k in 0..30 {
            let t = 0.5 * k as f64;
            let rho = hydrogen_density(1.0, 1.0, 0.2, &rho0, t).unwrap();
            let want = third.matrix() + (rho0.matrix() - third.matrix()) * c((-0.2 * t).exp(), 0.0);
            assert!((rho.matrix() - want).camax() < 1e-14);
            let dist = rho.max_abs_diff(&third);
            assert!(dist <= prev);
            prev = dist;
        }
    }

    #[test]
    fn mixed_initial_state_rejected() {
        let r = hydrogen_density(1.0, 1.0, 0.0, &DensityMatrix::maximally_mixed(), 1.0);
        assert!(matches!(r, Err(OracleError::NotPure(_))));
    }

    #[test]
    fn field_free_direct_integration() {
        let eta0 = rho_to_eta(&DensityMatrix::pure(&Vector3c::new(
            c(0.6, 0.0),
            c(0.0, 0.8),
            c(0.0, 0.0),
        )));
        let frozen = FieldConfig::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let out = integrate_eta_direct(&frozen, &eta0, 10.0, 1.0, 1e-10).unwrap();
        assert!(out.eta.iter().all(|e| e.max_abs_diff(&eta0) == 0.0));

        let decay = frozen.with_gamma(0.02);
        let out = integrate_eta_direct(&decay, &eta0, 50.0, 5.0, 1e-11).unwrap();
        for (t, e) in out.grid.iter().zip(&out.eta) {
            assert!(e.max_abs_diff(&eta0.scaled((-0.02 * t).exp())) < 1e-9, "t={t}");
        }
    }

    #[test]
    fn static_hamiltonian_conjugation() {
        // omega = Omega = 0 gives a constant H; compare with U rho U^dagger.
        let cfg = FieldConfig::new(0.8, 0.0, 1.2, 0.0, 0.0, 0.0).unwrap();
        let rho0 = DensityMatrix::diagonal([0.2, 0.5, 0.3]);
        let traj = integrate_rho_direct(&cfg, &rho0, 5.0, 0.5, 1e-12).unwrap();
        let h = hamiltonian(0.0, &cfg);
        for (t, rho) in traj.grid.iter().zip(&traj.rho) {
            let u = (h * C64::new(0.0, -t)).exp();
            let want = u * rho0.matrix() * u.adjoint();
            assert!((rho.matrix() - want).camax() < 1e-8, "t={t}");
        }
    }
}
