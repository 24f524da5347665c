#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use trilevel::DensityMatrix;

pub fn complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `G G^dagger / Tr`, full rank with probability one.
pub fn random_density(rng: &mut impl Rng) -> DensityMatrix {
    let g = Matrix3::from_fn(|_, _| complex(rng));
    let m = g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("G G^dagger is a state")
}

pub fn random_pure(rng: &mut impl Rng) -> DensityMatrix {
    let v = Vector3::from_fn(|_, _| complex(rng));
    DensityMatrix::pure(&(v / Complex64::from(v.norm())))
}
