//! Runge-Kutta kernels over complex state vectors. Complex arithmetic here
//! is equivalent to running the method on the doubled real system, since the
//! stages only form linear combinations of RHS evaluations.

use num_complex::Complex64;

use crate::error::Result;

/// Right-hand side of a first-order complex ODE system.
pub trait Rhs {
    fn eval(&self, t: f64, y: &[Complex64]) -> Result<Vec<Complex64>>;
}

impl<F> Rhs for F
where
    F: Fn(f64, &[Complex64]) -> Result<Vec<Complex64>>,
{
    fn eval(&self, t: f64, y: &[Complex64]) -> Result<Vec<Complex64>> {
        self(t, y)
    }
}

fn axpy(y: &[Complex64], terms: &[(f64, &[Complex64])], h: f64) -> Vec<Complex64> {
    let mut out = y.to_vec();
    for (coeff, k) in terms {
        let ch = coeff * h;
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += ch * v;
        }
    }
    out
}

/// One classical fourth-order step.
pub fn rk4_step(f: &dyn Rhs, t: f64, y: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let k1 = f.eval(t, y)?;
    let k2 = f.eval(t + 0.5 * h, &axpy(y, &[(0.5, &k1)], h))?;
    let k3 = f.eval(t + 0.5 * h, &axpy(y, &[(0.5, &k2)], h))?;
    let k4 = f.eval(t + h, &axpy(y, &[(1.0, &k3)], h))?;
    Ok(axpy(
        y,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
        h,
    ))
}

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order weights; the seventh stage evaluates the RHS at the new point,
// so an accepted step hands its last stage to the next one (FSAL).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// B minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const SAFETY: f64 = 0.9;
const SHRINK_FLOOR: f64 = 0.2;
const GROW_CAP: f64 = 5.0;

pub struct StepAttempt {
    /// Scaled error estimate; the step is acceptable when this is <= 1.
    pub err: f64,
    pub y_new: Vec<Complex64>,
    /// Last stage, valid as the first stage at (t + h, y_new).
    pub k_last: Vec<Complex64>,
}

/// One embedded Dormand-Prince attempt. k1 must be the RHS at (t, y).
pub fn dopri5_attempt(
    f: &dyn Rhs,
    t: f64,
    y: &[Complex64],
    h: f64,
    k1: &[Complex64],
    atol: f64,
    rtol: f64,
) -> Result<StepAttempt> {
    let k2 = f.eval(t + C[0] * h, &axpy(y, &[(A2[0], k1)], h))?;
    let k3 = f.eval(t + C[1] * h, &axpy(y, &[(A3[0], k1), (A3[1], &k2)], h))?;
    let k4 = f.eval(
        t + C[2] * h,
        &axpy(y, &[(A4[0], k1), (A4[1], &k2), (A4[2], &k3)], h),
    )?;
    let k5 = f.eval(
        t + C[3] * h,
        &axpy(
            y,
            &[(A5[0], k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)],
            h,
        ),
    )?;
    let k6 = f.eval(
        t + C[4] * h,
        &axpy(
            y,
            &[
                (A6[0], k1),
                (A6[1], &k2),
                (A6[2], &k3),
                (A6[3], &k4),
                (A6[4], &k5),
            ],
            h,
        ),
    )?;
    let y_new = axpy(
        y,
        &[
            (B[0], k1),
            (B[2], &k3),
            (B[3], &k4),
            (B[4], &k5),
            (B[5], &k6),
        ],
        h,
    );
    let k7 = f.eval(t + h, &y_new)?;

    let mut sum = 0.0;
    for i in 0..y.len() {
        let e = E[0] * k1[i]
            + E[2] * k3[i]
            + E[3] * k4[i]
            + E[4] * k5[i]
            + E[5] * k6[i]
            + E[6] * k7[i];
        let scale = atol + rtol * y[i].norm().max(y_new[i].norm());
        let ratio = h.abs() * e.norm() / scale;
        sum += ratio * ratio;
    }
    let err = (sum / y.len() as f64).sqrt();
    Ok(StepAttempt {
        err,
        y_new,
        k_last: k7,
    })
}

/// Step-size update from the scaled error of a fifth-order attempt.
pub fn dopri5_h_factor(err: f64) -> f64 {
    if err == 0.0 {
        return GROW_CAP;
    }
    (SAFETY * err.powf(-0.2)).clamp(SHRINK_FLOOR, GROW_CAP)
}

/// Integrate to t_end and return only the final state. Used for dense
/// high-accuracy evolution of small linear systems.
pub fn propagate_adaptive(
    f: &dyn Rhs,
    t0: f64,
    y0: &[Complex64],
    t_end: f64,
    atol: f64,
    rtol: f64,
) -> Result<Vec<Complex64>> {
    if t_end == t0 {
        return Ok(y0.to_vec());
    }
    let span = t_end - t0;
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = f.eval(t, &y)?;
    let mut h = (span.abs() * 1e-2).min(1e-2) * dir;
    loop {
        if (t_end - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(crate::error::Error::StepUnderflow { t, h });
        }
        let attempt = dopri5_attempt(f, t, &y, h, &k1, atol, rtol)?;
        let factor = dopri5_h_factor(attempt.err);
        if attempt.err <= 1.0 {
            t += h;
            y = attempt.y_new;
            k1 = attempt.k_last;
        }
        h *= factor;
    }
}
