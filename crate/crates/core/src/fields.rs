//! Driving fields, the coherence-space generator `L(t)` and initial states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{c, DensityMatrix, GeneratorSet, Matrix3c, Matrix8c, Vector3c};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("Gamma must be ≥ 0")]
    NegativeGamma,
    #[error("sign must be +1 or -1")]
    BadSign,
    #[error("field parameter {0} is not finite")]
    NonFinite(&'static str),
}

/// Global sign applied to both couplings.
///
/// `Minus` reproduces the explicit `-A` entries of the hydrogen Stark
/// Hamiltonian; populations do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_factor(f: f64) -> Result<Sign, FieldError> {
        if f == 1.0 {
            Ok(Sign::Plus)
        } else if f == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(FieldError::BadSign)
        }
    }
}

/// Two-cosine drive `eps(t) = A cos(Omega t)`, `J(t) = (B/2) cos(omega t + delta)`
/// plus the uniform decoherence rate `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    /// `A`, amplitude of the 1-2 coupling.
    pub eps_amplitude: f64,
    /// `Omega`, angular frequency of the 1-2 coupling.
    pub eps_frequency: f64,
    /// `B`, amplitude parameter of the 2-3 coupling.
    pub j_amplitude: f64,
    /// `omega`, angular frequency of the 2-3 coupling.
    pub j_frequency: f64,
    /// `delta`, relative phase of the 2-3 coupling.
    pub phase: f64,
    /// `Gamma`, decoherence rate.
    pub gamma: f64,
    pub sign: Sign,
}

impl FieldConfig {
    pub fn new(
        eps_amplitude: f64,
        eps_frequency: f64,
        j_amplitude: f64,
        j_frequency: f64,
        phase: f64,
        gamma: f64,
    ) -> Result<Self, FieldError> {
        let cfg = FieldConfig {
            eps_amplitude,
            eps_frequency,
            j_amplitude,
            j_frequency,
            phase,
            gamma,
            sign: Sign::Plus,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// The resonant n=3 hydrogen configuration for a field of amplitude `a`:
    /// equal frequencies, `A/B = sqrt 2`, no phase, and the sign convention of
    /// the Stark Hamiltonian.
    pub fn hydrogen(a: f64, omega: f64, gamma: f64) -> Result<Self, FieldError> {
        Ok(FieldConfig::new(a, omega, a * FRAC_1_SQRT_2, omega, 0.0, gamma)?.with_sign(Sign::Minus))
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        for (name, v) in [
            ("A", self.eps_amplitude),
            ("Omega", self.eps_frequency),
            ("B", self.j_amplitude),
            ("omega", self.j_frequency),
            ("delta", self.phase),
            ("Gamma", self.gamma),
        ] {
            if !v.is_finite() {
                return Err(FieldError::NonFinite(name));
            }
        }
        if self.gamma < 0.0 {
            return Err(FieldError::NegativeGamma);
        }
        Ok(())
    }

    /// Whether the fields have the hydrogen structure (`Omega = omega != 0`,
    /// `delta = 0`, `A = sqrt2 B`), for which a closed form exists.
    pub fn is_hydrogen(&self) -> bool {
        let ratio_ok = (self.eps_amplitude - std::f64::consts::SQRT_2 * self.j_amplitude).abs()
            <= 1e-12 * self.eps_amplitude.abs().max(1.0);
        self.eps_frequency == self.j_frequency
            && self.j_frequency != 0.0
            && self.phase == 0.0
            && ratio_ok
    }

    /// Amplitude `a` of the Stark Hamiltonian `a cos(omega t) M0`, where `M0`
    /// has entries `-1` (s-p) and `-1/sqrt2` (p-d). `None` unless [`Self::is_hydrogen`].
    pub fn stark_amplitude(&self) -> Option<f64> {
        self.is_hydrogen().then(|| -self.sign.factor() * self.eps_amplitude)
    }

    pub fn is_field_free(&self) -> bool {
        self.eps_amplitude == 0.0 && self.j_amplitude == 0.0
    }
}

pub fn epsilon(t: f64, cfg: &FieldConfig) -> f64 {
    cfg.sign.factor() * cfg.eps_amplitude * (cfg.eps_frequency * t).cos()
}

pub fn j_coupling(t: f64, cfg: &FieldConfig) -> f64 {
    cfg.sign.factor() * 0.5 * cfg.j_amplitude * (cfg.j_frequency * t + cfg.phase).cos()
}

/// Time derivative of [`epsilon`].
pub fn epsilon_rate(t: f64, cfg: &FieldConfig) -> f64 {
    -cfg.sign.factor() * cfg.eps_amplitude * cfg.eps_frequency * (cfg.eps_frequency * t).sin()
}

/// Time derivative of [`j_coupling`].
pub fn j_coupling_rate(t: f64, cfg: &FieldConfig) -> f64 {
    -cfg.sign.factor() * 0.5 * cfg.j_amplitude * cfg.j_frequency * (cfg.j_frequency * t + cfg.phase).sin()
}

/// `H(t) = eps(t) A_z + 2 J(t) A_x`.
pub fn hamiltonian(t: f64, cfg: &FieldConfig) -> Matrix3c {
    let g = GeneratorSet::standard();
    g.a_z * c(epsilon(t, cfg), 0.0) + g.a_x * c(2.0 * j_coupling(t, cfg), 0.0)
}

/// `L(t) = -i Gamma I + eps(t) B_z + 2 J(t) B_x`, so that `i d(eta)/dt = L eta`.
pub fn liouvillian(t: f64, cfg: &FieldConfig) -> Matrix8c {
    let g = GeneratorSet::standard();
    Matrix8c::identity() * c(0.0, -cfg.gamma)
        + g.b_z * c(epsilon(t, cfg), 0.0)
        + g.b_x * c(2.0 * j_coupling(t, cfg), 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarkState {
    Plus,
    Minus,
    Zero,
}

impl StarkState {
    pub const ALL: [StarkState; 3] = [StarkState::Plus, StarkState::Minus, StarkState::Zero];

    /// Amplitudes in the (s, p, d) = (level 1, 2, 3) basis.
    pub fn vector(self) -> Vector3c {
        let s = 1.0 / 3f64.sqrt();
        let d = 1.0 / 6f64.sqrt();
        match self {
            StarkState::Plus => Vector3c::new(c(s, 0.0), c(FRAC_1_SQRT_2, 0.0), c(d, 0.0)),
            StarkState::Minus => Vector3c::new(c(s, 0.0), c(-FRAC_1_SQRT_2, 0.0), c(d, 0.0)),
            StarkState::Zero => {
                Vector3c::new(c(s, 0.0), c(0.0, 0.0), c(-s * std::f64::consts::SQRT_2, 0.0))
            }
        }
    }

    /// Eigenvalue of `M0` (the Stark matrix per unit amplitude).
    pub fn eigenvalue_factor(self) -> f64 {
        let r = (1.5f64).sqrt();
        match self {
            StarkState::Plus => -r,
            StarkState::Minus => r,
            StarkState::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Level1,
    Level2,
    Level3,
    Stark(StarkState),
    Custom(DensityMatrix),
}

impl InitialState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            InitialState::Level1 => DensityMatrix::diagonal([1.0, 0.0, 0.0]),
            InitialState::Level2 => DensityMatrix::diagonal([0.0, 1.0, 0.0]),
            InitialState::Level3 => DensityMatrix::diagonal([0.0, 0.0, 1.0]),
            InitialState::Stark(s) => DensityMatrix::pure(&s.vector()),
            InitialState::Custom(rho) => *rho,
        }
    }

    /// Config-file name.
    pub fn name(&self) -> &'static str {
        match self {
            InitialState::Level1 => "level1",
            InitialState::Level2 => "level2",
            InitialState::Level3 => "level3",
            InitialState::Stark(StarkState::Plus) => "stark_plus",
            InitialState::Stark(StarkState::Minus) => "stark_minus",
            InitialState::Stark(StarkState::Zero) => "stark_zero",
            InitialState::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown initial state {0:?} (expected level1, level2, level3, stark_plus, stark_minus, stark_zero, custom)")]
pub struct UnknownInitialState(pub String);

impl FromStr for InitialState {
    type Err = UnknownInitialState;

    /// `custom` is not accepted here; the caller supplies the matrix.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "level1" => InitialState::Level1,
            "level2" => InitialState::Level2,
            "level3" => InitialState::Level3,
            "stark_plus" => InitialState::Stark(StarkState::Plus),
            "stark_minus" => InitialState::Stark(StarkState::Minus),
            "stark_zero" => InitialState::Stark(StarkState::Zero),
            _ => return Err(UnknownInitialState(s.to_string())),
        })
    }
}
