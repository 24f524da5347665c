//! Numerical tolerances shared by state validation and the self-check suite.

/// Thresholds used when validating states and generator identities.
///
/// [`Tolerances::DEFAULT`] is what every public constructor uses; callers that
/// need looser or tighter checks pass their own value to the `*_with` variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum `|rho_ij - conj(rho_ji)|`.
    pub hermiticity: f64,
    /// Maximum `|Tr rho - 1|`.
    pub trace: f64,
    /// Smallest admissible eigenvalue (negative slack).
    pub positivity: f64,
    /// Maximum wrong-part magnitude in the coherence vector reality pattern.
    pub reality: f64,
    /// Entrywise tolerance for commutator identities of the generators.
    pub commutator: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-10,
        trace: 1e-10,
        positivity: 1e-9,
        reality: 1e-10,
        commutator: 1e-14,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Eigenvalues inside `[-EIGEN_CLAMP, 1 + EIGEN_CLAMP]` are clamped into `[0, 1]`
/// before taking logarithms.
pub const EIGEN_CLAMP: f64 = 1e-9;

/// `|mu_plus|` beyond which the Riccati chart is declared singular.
pub const BLOWUP_THRESHOLD: f64 = 1e6;

/// Shortest chart segment the propagator accepts before giving up on a restart.
pub const MIN_SEGMENT: f64 = 1e-6;
