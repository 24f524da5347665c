//! Adaptive Dormand-Prince 5(4) integrator for small complex ODE systems.

use std::ops::ControlFlow;

use nalgebra::SVector;
use thiserror::Error;

use crate::algebra::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("exceeded {max_steps} steps at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("invalid integration interval [{t0}, {t1}]")]
    BadInterval { t0: f64, t1: f64 },
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Finished,
    /// The step observer asked to stop; `t` is the time of the last accepted step.
    Stopped { t: f64 },
}

/// Step-size controller settings. Local error is measured componentwise as
/// `|err_i| / (atol + rtol * max(|y_i|, |y_new_i|))` in the max norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size; `f64::INFINITY` for none.
    pub h_max: f64,
    /// Bound the local error by `tol * min(h, 1)` instead of `tol`. Keeps the
    /// slope of the dense output accurate to about `tol` even for tiny steps.
    pub per_unit_step: bool,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Dopri5 {
            rtol: tol,
            atol: tol,
            max_steps: 50_000_000,
            h_max: f64::INFINITY,
            per_unit_step: false,
        }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t_end`, landing exactly on every
    /// time in `stops` (sorted ascending; entries outside `(t0, t_end]` are ignored).
    ///
    /// `on_step(t, y, dy)` is called after each accepted step, including the
    /// final one at `t_end`, but not for the initial point. Returning
    /// `ControlFlow::Break` ends the integration.
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: SVector<C64, N>,
        t_end: f64,
        stops: &[f64],
        mut on_step: O,
    ) -> Result<Outcome, OdeError>
    where
        F: FnMut(f64, &SVector<C64, N>) -> SVector<C64, N>,
        O: FnMut(f64, &SVector<C64, N>, &SVector<C64, N>) -> ControlFlow<()>,
    {
        if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
            return Err(OdeError::BadInterval { t0, t1: t_end });
        }
        let mut stops: Vec<f64> = stops.iter().copied().filter(|&s| s > t0 && s < t_end).collect();
        stops.dedup();
        let mut stops = stops.into_iter().peekable();

        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self.initial_step(&mut f, t, &y, &k1, t_end - t0).min(self.h_max);
        let span = t_end - t0;
        let mut steps = 0usize;
        let order = if self.per_unit_step { 0.25 } else { 0.2 };

        loop {
            steps += 1;
            if steps > self.max_steps {
                return Err(OdeError::TooManySteps { t, max_steps: self.max_steps });
            }
            let target = stops.peek().copied().unwrap_or(t_end);
            let mut landing = false;
            if t + h >= target - 1e-13 * span.max(1.0) {
                h = target - t;
                landing = true;
            }
            if h <= f64::EPSILON * t.abs().max(1.0) * 4.0 {
                return Err(OdeError::StepSizeUnderflow { t });
            }

            let (y_new, k7, err) = dp_step(&mut f, t, &y, &k1, h);
            let mut err_norm = self.error_norm(&y, &y_new, &err);
            if self.per_unit_step {
                err_norm /= h.min(1.0);
            }
            if !err_norm.is_finite() {
                h *= 0.1;
                continue;
            }

            if err_norm <= 1.0 {
                t = if landing { target } else { t + h };
                y = y_new;
                k1 = k7;
                if landing && target < t_end {
                    stops.next();
                }
                if on_step(t, &y, &k1).is_break() {
                    return Ok(Outcome::Stopped { t });
                }
                if landing && target >= t_end {
                    return Ok(Outcome::Finished);
                }
                let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-order)).clamp(0.2, 5.0) };
                h = (h * factor).min(self.h_max);
            } else {
                h *= (0.9 * err_norm.powf(-order)).clamp(0.1, 1.0);
            }
        }
    }

    fn error_norm<const N: usize>(
        &self,
        y: &SVector<C64, N>,
        y_new: &SVector<C64, N>,
        err: &SVector<C64, N>,
    ) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            let scale = self.atol + self.rtol * y[i].norm().max(y_new[i].norm());
            worst = worst.max(err[i].norm() / scale);
        }
        worst
    }

    // Hairer, Norsett & Wanner, Solving ODEs I, sec. II.4.
    fn initial_step<const N: usize, F>(
        &self,
        f: &mut F,
        t: f64,
        y: &SVector<C64, N>,
        dy: &SVector<C64, N>,
        span: f64,
    ) -> f64
    where
        F: FnMut(f64, &SVector<C64, N>) -> SVector<C64, N>,
    {
        let scale = |i: usize| self.atol + self.rtol * y[i].norm();
        let rms = |v: &SVector<C64, N>| {
            ((0..N).map(|i| (v[i].norm() / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt()
        };
        let d0 = rms(y);
        let d1 = rms(dy);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1 = y + dy * C64::from(h0);
        let dy1 = f(t + h0, &y1);
        let d2 = rms(&(dy1 - dy)) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

// Dormand-Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat (fifth minus fourth order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand-Prince step. Returns `(y_new, f(t+h, y_new), error estimate)`.
fn dp_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &SVector<C64, N>,
    k1: &SVector<C64, N>,
    h: f64,
) -> (SVector<C64, N>, SVector<C64, N>, SVector<C64, N>)
where
    F: FnMut(f64, &SVector<C64, N>) -> SVector<C64, N>,
{
    let s = |x: f64| C64::from(x * h);
    let k2 = f(t + C2 * h, &(y + k1 * s(A21)));
    let k3 = f(t + C3 * h, &(y + k1 * s(A31) + k2 * s(A32)));
    let k4 = f(t + C4 * h, &(y + k1 * s(A41) + k2 * s(A42) + k3 * s(A43)));
    let k5 = f(
        t + C5 * h,
        &(y + k1 * s(A51) + k2 * s(A52) + k3 * s(A53) + k4 * s(A54)),
    );
    let k6 = f(
        t + h,
        &(y + k1 * s(A61) + k2 * s(A62) + k3 * s(A63) + k4 * s(A64) + k5 * s(A65)),
    );
    let y_new = y + k1 * s(B1) + k3 * s(B3) + k4 * s(B4) + k5 * s(B5) + k6 * s(B6);
    let k7 = f(t + h, &y_new);
    let err = k1 * s(E1) + k3 * s(E3) + k4 * s(E4) + k5 * s(E5) + k6 * s(E6) + k7 * s(E7);
    (y_new, k7, err)
}
