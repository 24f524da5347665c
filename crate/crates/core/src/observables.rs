//! Per-sample diagnostics: populations, coherences, spectrum, entropy, purity.

use crate::algebra::{CoherenceVector, DensityMatrix};
use crate::tolerances::EIGEN_CLAMP;

/// Eigenvalues of `rho`, sorted descending.
pub fn spectrum(rho: &DensityMatrix) -> [f64; 3] {
    let [a, b, c] = rho.eigenvalues();
    [c, b, a]
}

/// Von Neumann entropy `-sum l ln l` in nats, with `0 ln 0 = 0`.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&spectrum(rho))
}

pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    // `+ 0.0` turns the -0 of a pure state into +0.
    eigenvalues
        .iter()
        .map(|&l| clamp_eigenvalue(l))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum::<f64>()
        + 0.0
}

// Rounding noise pushes eigenvalues of pure states slightly below zero.
fn clamp_eigenvalue(l: f64) -> f64 {
    if (-EIGEN_CLAMP..=1.0 + EIGEN_CLAMP).contains(&l) {
        l.clamp(0.0, 1.0)
    } else {
        l
    }
}

/// `Tr rho^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

pub fn coherence_norm(eta: &CoherenceVector) -> f64 {
    eta.norm()
}

/// Everything written per output sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    pub pop1: f64,
    pub pop2: f64,
    pub pop3: f64,
    pub re12: f64,
    pub im12: f64,
    pub re13: f64,
    pub im13: f64,
    pub re23: f64,
    pub im23: f64,
    pub entropy: f64,
    pub purity: f64,
    /// Descending.
    pub eigenvalues: [f64; 3],
    pub eta_norm: f64,
}

impl ObservableRecord {
    pub fn new(t: f64, rho: &DensityMatrix, eta: &CoherenceVector) -> Self {
        let eigenvalues = spectrum(rho);
        let r = |i, j| rho.get(i, j);
        ObservableRecord {
            t,
            pop1: r(0, 0).re,
            pop2: r(1, 1).re,
            pop3: r(2, 2).re,
            re12: r(0, 1).re,
            im12: r(0, 1).im,
            re13: r(0, 2).re,
            im13: r(0, 2).im,
            re23: r(1, 2).re,
            im23: r(1, 2).im,
            entropy: entropy_of_spectrum(&eigenvalues),
            purity: purity(rho),
            eigenvalues,
            eta_norm: coherence_norm(eta),
        }
    }

    /// Values in CSV column order.
    pub fn values(&self) -> [f64; 16] {
        [
            self.t,
            self.pop1,
            self.pop2,
            self.pop3,
            self.re12,
            self.im12,
            self.re13,
            self.im13,
            self.re23,
            self.im23,
            self.entropy,
            self.purity,
            self.eigenvalues[0],
            self.eigenvalues[1],
            self.eigenvalues[2],
            self.eta_norm,
        ]
    }

    pub const COLUMNS: [&'static str; 16] = [
        "t", "pop1", "pop2", "pop3", "re12", "im12", "re13", "im13", "re23", "im23", "entropy",
        "purity", "eig1", "eig2", "eig3", "eta_norm",
    ];

    /// Column value by CSV name.
    pub fn get(&self, column: &str) -> Option<f64> {
        Self::COLUMNS
            .iter()
            .position(|c| *c == column)
            .map(|k| self.values()[k])
    }
}
