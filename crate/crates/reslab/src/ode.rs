//! Embedded Runge-Kutta 5(4) integration for linear time-varying systems.
//!
//! One scheme (Dormand-Prince) serves both the Hill system and the
//! transformation solve: an adaptive driver with local error control, plus a
//! fixed-step driver used to verify the order of the method.

use nalgebra::{ComplexField, DVector};

use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights coincide with the last tableau row (FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
const SAFETY: f64 = 0.9;

/// One Dormand-Prince step from `(t, y)` with step `h`.
///
/// Returns the 5th-order solution, the scaled error estimate and the stage
/// derivative at the new point (reusable as the next step's first stage).
fn dp_step<T, F>(f: &F, t: f64, y: &DVector<T>, k1: &DVector<T>, h: f64, tol: f64) -> (DVector<T>, f64, DVector<T>)
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(f64, &DVector<T>) -> DVector<T>,
{
    let mut k: Vec<DVector<T>> = Vec::with_capacity(7);
    k.push(k1.clone());
    for s in 1..6 {
        let mut stage = y.clone();
        for (j, kj) in k.iter().enumerate() {
            let w = A[s - 1][j] * h;
            if w != 0.0 {
                stage.axpy(T::from_real(w), kj, T::one());
            }
        }
        k.push(f(t + C[s] * h, &stage));
    }
    let mut y5 = y.clone();
    for (j, kj) in k.iter().enumerate() {
        let w = A[5][j] * h;
        if w != 0.0 {
            y5.axpy(T::from_real(w), kj, T::one());
        }
    }
    let k7 = f(t + h, &y5);
    k.push(k7.clone());

    // Scaled RMS norm of y5 - y4.
    let n = y.len().max(1);
    let mut acc = 0.0;
    for i in 0..y.len() {
        let mut e = T::zero();
        for (j, kj) in k.iter().enumerate() {
            let w = (B5[j] - B4[j]) * h;
            if w != 0.0 {
                e += kj[i] * T::from_real(w);
            }
        }
        let sc = tol + tol * y[i].modulus().max(y5[i].modulus());
        let r = e.modulus() / sc;
        acc += r * r;
    }
    let err = (acc / n as f64).sqrt();
    (y5, err, k7)
}

/// Advances `y0` from `t0` to `t1` with adaptive step control at local
/// tolerance `tol`. Deterministic for fixed inputs.
pub fn integrate_adaptive<T, F>(f: &F, t0: f64, t1: f64, y0: DVector<T>, tol: f64) -> Result<DVector<T>>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(f64, &DVector<T>) -> DVector<T>,
{
    if tol <= 0.0 {
        return Err(Error::Numerical("integration tolerance must be positive".into()));
    }
    if t1 < t0 {
        return Err(Error::Numerical("integration interval reversed".into()));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);

    // Initial step from the magnitude of the first derivative.
    let ynorm = rms(&y).max(1e-8);
    let fnorm = rms(&k1);
    let mut h = if fnorm > 0.0 {
        (0.01 * ynorm / fnorm).min(span)
    } else {
        span
    };
    let h_floor = span * 1e-14;

    while t < t1 {
        h = h.min(t1 - t);
        let (y_new, err, k7) = dp_step(f, t, &y, &k1, h, tol);
        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
        }
        let scale = if err == 0.0 {
            MAX_SCALE
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
        };
        h *= scale;
        if h < h_floor && t < t1 {
            return Err(Error::Numerical(
                "step size underflow: system stiff or degenerate".into(),
            ));
        }
    }
    Ok(y)
}

/// Advances `y0` over `steps` equal steps without error control.
/// Exposes the raw 5th-order method for convergence studies.
pub fn integrate_fixed<T, F>(f: &F, t0: f64, t1: f64, y0: DVector<T>, steps: usize) -> DVector<T>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(f64, &DVector<T>) -> DVector<T>,
{
    assert!(steps > 0, "fixed-step integration needs at least one step");
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    let mut t = t0;
    let mut k1 = f(t, &y);
    for _ in 0..steps {
        let (y_new, _, k7) = dp_step(f, t, &y, &k1, h, 1.0);
        y = y_new;
        k1 = k7;
        t += h;
    }
    y
}

/// Integrates adaptively and records the state at every node of `times`.
/// `times` must be non-decreasing; the first node is the initial time.
pub fn integrate_path<T, F>(
    f: &F,
    times: &[f64],
    y0: DVector<T>,
    tol: f64,
) -> Result<Vec<DVector<T>>>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(f64, &DVector<T>) -> DVector<T>,
{
    if times.is_empty() {
        return Err(Error::Numerical("empty sample grid".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0;
    out.push(y.clone());
    for w in times.windows(2) {
        y = integrate_adaptive(f, w[0], w[1], y, tol)?;
        out.push(y.clone());
    }
    Ok(out)
}

fn rms<T: ComplexField<RealField = f64> + Copy>(y: &DVector<T>) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    (y.iter().map(|v| v.modulus_squared()).sum::<f64>() / y.len() as f64).sqrt()
}
