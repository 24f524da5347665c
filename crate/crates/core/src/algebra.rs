//! Generator matrices, state types and the density-matrix / coherence-vector
//! isomorphism.
//!
//! The coherence vector packs the eight traceless degrees of freedom of a 3x3
//! density matrix as
//!
//! ```text
//! eta = (r11 - r33, (r11 + r33 - 2 r22)/sqrt3, r12 + r21, r21 - r12,
//!        r13 + r31, r31 - r13, r23 + r32, r32 - r23)
//! ```
//!
//! so that for Hermitian `rho` components 4, 6 and 8 are purely imaginary. The
//! vector is stored as eight complex numbers to keep that factor of `i`
//! explicit. Under this map the commutator action `[A_k, .]` of the three
//! spin-1 generators becomes the Hermitian 8x8 matrix `B_k`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SMatrix, SVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::report::CheckOutcome;
use crate::tolerances::Tolerances;

pub type C64 = Complex64;
pub type Matrix3c = SMatrix<C64, 3, 3>;
pub type Matrix8c = SMatrix<C64, 8, 8>;
pub type Vector3c = SVector<C64, 3>;
pub type Vector8c = SVector<C64, 8>;

/// Measured nilpotency degree of `B_plus` and `B_minus`: `B^5 = 0`, `B^4 != 0`.
///
/// Under the spin-1 action the 8-dimensional space splits into spin-2 and
/// spin-1 blocks, so the longest ladder has five rungs.
pub const NILPOTENCY_DEGREE: usize = 5;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("density matrix is not Hermitian (max defect {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    Trace(C64),
    #[error("density matrix has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("density matrix has non-finite entries")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
}

/// 3x3 density matrix.
///
/// [`DensityMatrix::new`] validates hermiticity, unit trace and positivity.
/// Matrices produced by the solvers are wrapped unchecked, since the checks are
/// exactly what the test suites measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix3c);

impl DensityMatrix {
    pub fn new(m: Matrix3c) -> Result<Self, StateError> {
        Self::new_with(m, &Tolerances::DEFAULT)
    }

    pub fn new_with(m: Matrix3c, tol: &Tolerances) -> Result<Self, StateError> {
        let rho = DensityMatrix(m);
        rho.validate(tol)?;
        Ok(rho)
    }

    pub fn from_matrix_unchecked(m: Matrix3c) -> Self {
        DensityMatrix(m)
    }

    /// `|psi><psi|` for the normalized `psi`.
    pub fn pure(psi: &Vector3c) -> Self {
        let psi = psi / C64::from(psi.norm());
        DensityMatrix(psi * psi.adjoint())
    }

    pub fn diagonal(populations: [f64; 3]) -> Self {
        DensityMatrix(Matrix3c::from_diagonal(&Vector3c::new(
            populations[0].into(),
            populations[1].into(),
            populations[2].into(),
        )))
    }

    /// The chaotically mixed state `I/3`.
    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix3c::identity() / C64::from(3.0))
    }

    pub fn matrix(&self) -> &Matrix3c {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix3c {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.0)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let h = (self.0 + self.0.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2]]
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<(), StateError> {
        if self.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let herm = self.hermiticity_defect();
        if herm > tol.hermiticity {
            return Err(StateError::NotHermitian(herm));
        }
        let tr = self.trace();
        if (tr - C64::from(1.0)).norm() > tol.trace {
            return Err(StateError::Trace(tr));
        }
        let min = self.eigenvalues()[0];
        if min < -tol.positivity {
            return Err(StateError::NotPositive(min));
        }
        Ok(())
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs(&(self.0 - other.0))
    }
}

/// The eight-component coherence vector, stored literally (components 4, 6
/// and 8 carry the factor `i` for Hermitian states).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceVector(Vector8c);

impl CoherenceVector {
    pub fn new(v: Vector8c) -> Self {
        CoherenceVector(v)
    }

    pub fn zero() -> Self {
        CoherenceVector(Vector8c::zeros())
    }

    pub fn from_components(c: [C64; 8]) -> Self {
        CoherenceVector(Vector8c::from_column_slice(&c))
    }

    pub fn vector(&self) -> &Vector8c {
        &self.0
    }

    pub fn into_vector(self) -> Vector8c {
        self.0
    }

    /// Component `k`, 1-based as in the packing formula.
    pub fn component(&self, k: usize) -> C64 {
        self.0[k - 1]
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        CoherenceVector(self.0 * C64::from(s))
    }

    /// Size of the parts that should vanish for a Hermitian source matrix:
    /// imaginary parts of components 1, 2, 3, 5, 7 and real parts of 4, 6, 8.
    pub fn reality_defect(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, z)| if matches!(k, 3 | 5 | 7) { z.re.abs() } else { z.im.abs() })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CoherenceVector) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Packs an arbitrary 3x3 matrix into coherence-vector form (linear, drops the trace).
pub fn eta_from_matrix(r: &Matrix3c) -> CoherenceVector {
    let g = |i: usize, j: usize| r[(i - 1, j - 1)];
    CoherenceVector::from_components([
        g(1, 1) - g(3, 3),
        (g(1, 1) + g(3, 3) - g(2, 2) * 2.0) / SQRT3,
        g(1, 2) + g(2, 1),
        g(2, 1) - g(1, 2),
        g(1, 3) + g(3, 1),
        g(3, 1) - g(1, 3),
        g(2, 3) + g(3, 2),
        g(3, 2) - g(2, 3),
    ])
}

/// Inverse of [`eta_from_matrix`] given the trace.
pub fn matrix_from_eta(eta: &CoherenceVector, trace: C64) -> Matrix3c {
    let e = |k: usize| eta.component(k);
    let half = C64::from(0.5);
    let s = (trace * 2.0 + e(2) * SQRT3) / 3.0;
    let mut r = Matrix3c::zeros();
    r[(0, 0)] = (s + e(1)) * half;
    r[(2, 2)] = (s - e(1)) * half;
    r[(1, 1)] = trace - s;
    r[(0, 1)] = (e(3) - e(4)) * half;
    r[(1, 0)] = (e(3) + e(4)) * half;
    r[(0, 2)] = (e(5) - e(6)) * half;
    r[(2, 0)] = (e(5) + e(6)) * half;
    r[(1, 2)] = (e(7) - e(8)) * half;
    r[(2, 1)] = (e(7) + e(8)) * half;
    r
}

pub fn rho_to_eta(rho: &DensityMatrix) -> CoherenceVector {
    eta_from_matrix(rho.matrix())
}

pub fn eta_to_rho(eta: &CoherenceVector, trace: f64) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(matrix_from_eta(eta, trace.into()))
}

/// `XY - YX` for dynamically sized square matrices.
pub fn commutator(x: &DMatrix<C64>, y: &DMatrix<C64>) -> Result<DMatrix<C64>, AlgebraError> {
    if !x.is_square() || x.shape() != y.shape() {
        return Err(AlgebraError::DimensionMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(x * y - y * x)
}

pub fn bracket<const N: usize>(
    x: &SMatrix<C64, N, N>,
    y: &SMatrix<C64, N, N>,
) -> SMatrix<C64, N, N> {
    x * y - y * x
}

pub(crate) fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// The spin-1 generators on the three levels and their images on coherence vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    /// Couples levels 2 and 3.
    pub a_x: Matrix3c,
    /// Couples levels 1 and 3 (not driven by the two-field Hamiltonian).
    pub a_y: Matrix3c,
    /// Couples levels 1 and 2.
    pub a_z: Matrix3c,
    pub b_x: Matrix8c,
    pub b_y: Matrix8c,
    pub b_z: Matrix8c,
    pub b_plus: Matrix8c,
    pub b_minus: Matrix8c,
}

impl GeneratorSet {
    /// Shared instance of the standard generators.
    pub fn standard() -> &'static GeneratorSet {
        static SET: OnceLock<GeneratorSet> = OnceLock::new();
        SET.get_or_init(GeneratorSet::build)
    }

    fn build() -> GeneratorSet {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let a_x = Matrix3c::from_row_slice(&[z, z, z, z, z, one, z, one, z]);
        let a_y = Matrix3c::from_row_slice(&[z, z, c(0.0, -1.0), z, z, z, c(0.0, 1.0), z, z]);
        let a_z = Matrix3c::from_row_slice(&[z, one, z, one, z, z, z, z, z]);

        let mut b_x = Matrix8c::zeros();
        for &(i, j, v) in &[
            (0, 7, 1.0),
            (1, 7, -SQRT3),
            (2, 5, 1.0),
            (3, 4, 1.0),
            (4, 3, 1.0),
            (5, 2, 1.0),
            (7, 0, 1.0),
            (7, 1, -SQRT3),
        ] {
            b_x[(i, j)] = c(v, 0.0);
        }
        let mut b_y = Matrix8c::zeros();
        for &(i, j, v) in &[
            (0, 4, -2.0),
            (2, 6, -1.0),
            (3, 7, 1.0),
            (4, 0, 2.0),
            (6, 2, 1.0),
            (7, 3, -1.0),
        ] {
            b_y[(i, j)] = c(0.0, v);
        }
        let mut b_z = Matrix8c::zeros();
        for &(i, j, v) in &[
            (0, 3, 1.0),
            (1, 3, SQRT3),
            (3, 0, 1.0),
            (3, 1, SQRT3),
            (4, 7, -1.0),
            (5, 6, -1.0),
            (6, 5, -1.0),
            (7, 4, -1.0),
        ] {
            b_z[(i, j)] = c(v, 0.0);
        }
        GeneratorSet::from_parts(a_x, a_y, a_z, b_x, b_y, b_z)
    }

    /// Assembles a set, deriving `B_plus = B_x + i B_y` and `B_minus = B_x - i B_y`.
    pub fn from_parts(
        a_x: Matrix3c,
        a_y: Matrix3c,
        a_z: Matrix3c,
        b_x: Matrix8c,
        b_y: Matrix8c,
        b_z: Matrix8c,
    ) -> GeneratorSet {
        let i = c(0.0, 1.0);
        GeneratorSet {
            a_x,
            a_y,
            a_z,
            b_x,
            b_y,
            b_z,
            b_plus: b_x + b_y * i,
            b_minus: b_x - b_y * i,
        }
    }
}

/// Matrix of the map `eta -> eta([A, rho(eta)])` on traceless states.
pub fn coherence_image(a: &Matrix3c) -> Matrix8c {
    let mut out = Matrix8c::zeros();
    for k in 0..8 {
        let mut basis = Vector8c::zeros();
        basis[k] = c(1.0, 0.0);
        let rho = matrix_from_eta(&CoherenceVector::new(basis), c(0.0, 0.0));
        let col = eta_from_matrix(&bracket(a, &rho));
        out.set_column(k, col.vector());
    }
    out
}

/// Smallest `k <= max_power` with `m^k = 0` (entrywise below `zero_tol`).
pub fn nilpotency_degree(m: &Matrix8c, max_power: usize, zero_tol: f64) -> Option<usize> {
    let mut p = *m;
    for k in 1..=max_power {
        if max_abs(&p) <= zero_tol {
            return Some(k);
        }
        p *= m;
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraReport {
    pub checks: Vec<CheckOutcome>,
    pub nilpotency_plus: Option<usize>,
    pub nilpotency_minus: Option<usize>,
}

impl AlgebraReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks the commutation relations, hermiticity, the coherence-space
/// representation and nilpotency of the standard generators.
pub fn verify_algebra() -> AlgebraReport {
    verify_generators(GeneratorSet::standard(), &Tolerances::DEFAULT)
}

pub fn verify_generators(g: &GeneratorSet, tol: &Tolerances) -> AlgebraReport {
    let i = c(0.0, 1.0);
    let eps = tol.commutator;
    let mut checks = Vec::new();

    let a_triples = [
        ("[A_x,A_y] = i A_z", &g.a_x, &g.a_y, &g.a_z),
        ("[A_y,A_z] = i A_x", &g.a_y, &g.a_z, &g.a_x),
        ("[A_z,A_x] = i A_y", &g.a_z, &g.a_x, &g.a_y),
    ];
    for (name, x, y, z) in a_triples {
        checks.push(CheckOutcome::within(name, max_abs(&(bracket(x, y) - z * i)), eps));
    }
    let b_triples = [
        ("[B_x,B_y] = i B_z", &g.b_x, &g.b_y, &g.b_z),
        ("[B_y,B_z] = i B_x", &g.b_y, &g.b_z, &g.b_x),
        ("[B_z,B_x] = i B_y", &g.b_z, &g.b_x, &g.b_y),
    ];
    for (name, x, y, z) in b_triples {
        checks.push(CheckOutcome::within(name, max_abs(&(bracket(x, y) - z * i)), eps));
    }

    for (name, d) in [
        ("A_x Hermitian", hermiticity_defect(&g.a_x)),
        ("A_y Hermitian", hermiticity_defect(&g.a_y)),
        ("A_z Hermitian", hermiticity_defect(&g.a_z)),
        ("B_x Hermitian", hermiticity_defect(&g.b_x)),
        ("B_y Hermitian", hermiticity_defect(&g.b_y)),
        ("B_z Hermitian", hermiticity_defect(&g.b_z)),
    ] {
        checks.push(CheckOutcome::within(name, d, eps));
    }

    for (name, a, b) in [
        ("B_x represents [A_x, .]", &g.a_x, &g.b_x),
        ("B_y represents [A_y, .]", &g.a_y, &g.b_y),
        ("B_z represents [A_z, .]", &g.a_z, &g.b_z),
    ] {
        checks.push(CheckOutcome::within(name, max_abs(&(coherence_image(a) - b)), eps));
    }

    let nilpotency_plus = nilpotency_degree(&g.b_plus, 8, 1e-12);
    let nilpotency_minus = nilpotency_degree(&g.b_minus, 8, 1e-12);
    for (name, k) in [
        ("B_plus nilpotency degree", nilpotency_plus),
        ("B_minus nilpotency degree", nilpotency_minus),
    ] {
        let measured = k.map_or(f64::INFINITY, |k| k as f64);
        checks.push(CheckOutcome::flag(
            name,
            k == Some(NILPOTENCY_DEGREE),
            measured,
            NILPOTENCY_DEGREE as f64,
        ));
    }

    AlgebraReport {
        checks,
        nilpotency_plus,
        nilpotency_minus,
    }
}
