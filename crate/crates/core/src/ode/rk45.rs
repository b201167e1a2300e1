//! Adaptive Dormand-Prince 5(4) integrator for small complex systems,
//! with exact stops at caller-supplied checkpoint times.

use crate::error::{Error, Result};
use num_complex::Complex64;

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
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Fifth-order weights minus the embedded fourth-order weights.
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct IvpOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            atol: 1e-11,
            rtol: 1e-11,
            max_steps: 1_000_000,
        }
    }
}

fn axpy(acc: &mut [Complex64], coef: f64, v: &[Complex64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += coef * b;
    }
}

/// Integrate y' = f(t, y) from (t0, y0), returning the state at each
/// checkpoint. Checkpoints must be strictly increasing and start at or
/// after t0; steps are clipped so every checkpoint is hit exactly.
pub fn integrate_dp45(
    mut f: impl FnMut(f64, &[Complex64]) -> Vec<Complex64>,
    t0: f64,
    y0: &[Complex64],
    checkpoints: &[f64],
    opts: &IvpOptions,
) -> Result<Vec<Vec<Complex64>>> {
    let n = y0.len();
    let mut out = Vec::with_capacity(checkpoints.len());
    let last = match checkpoints.last() {
        Some(&v) => v,
        None => return Ok(out),
    };
    let span = last - t0;
    if span < 0.0 {
        return Err(Error::Domain("checkpoints must not precede t0".into()));
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = (span / 100.0).max(1e-12);
    let mut steps = 0usize;

    for (ci, &target) in checkpoints.iter().enumerate() {
        if ci > 0 && target <= checkpoints[ci - 1] {
            return Err(Error::Domain("checkpoints must be strictly increasing".into()));
        }
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::ConvergenceFailure(format!(
                    "integrator exceeded {} steps at t = {t}",
                    opts.max_steps
                )));
            }
            let clipped = h.min(target - t);
            if clipped < 1e-14 * span.max(1.0) {
                return Err(Error::StepSizeUnderflow(clipped));
            }
            let hs = clipped;
            let k1 = f(t, &y);
            let mut ys = y.clone();
            axpy(&mut ys, hs * A2[0], &k1);
            let k2 = f(t + hs / 5.0, &ys);
            let mut ys = y.clone();
            axpy(&mut ys, hs * A3[0], &k1);
            axpy(&mut ys, hs * A3[1], &k2);
            let k3 = f(t + 3.0 * hs / 10.0, &ys);
            let mut ys = y.clone();
            axpy(&mut ys, hs * A4[0], &k1);
            axpy(&mut ys, hs * A4[1], &k2);
            axpy(&mut ys, hs * A4[2], &k3);
            let k4 = f(t + 4.0 * hs / 5.0, &ys);
            let mut ys = y.clone();
            axpy(&mut ys, hs * A5[0], &k1);
            axpy(&mut ys, hs * A5[1], &k2);
            axpy(&mut ys, hs * A5[2], &k3);
            axpy(&mut ys, hs * A5[3], &k4);
            let k5 = f(t + 8.0 * hs / 9.0, &ys);
            let mut ys = y.clone();
            axpy(&mut ys, hs * A6[0], &k1);
            axpy(&mut ys, hs * A6[1], &k2);
            axpy(&mut ys, hs * A6[2], &k3);
            axpy(&mut ys, hs * A6[3], &k4);
            axpy(&mut ys, hs * A6[4], &k5);
            let k6 = f(t + hs, &ys);

            let mut ynew = y.clone();
            axpy(&mut ynew, hs * B5[0], &k1);
            axpy(&mut ynew, hs * B5[2], &k3);
            axpy(&mut ynew, hs * B5[3], &k4);
            axpy(&mut ynew, hs * B5[4], &k5);
            axpy(&mut ynew, hs * B5[5], &k6);
            let k7 = f(t + hs, &ynew);

            let mut err_vec = vec![Complex64::new(0.0, 0.0); n];
            axpy(&mut err_vec, hs * ERR[0], &k1);
            axpy(&mut err_vec, hs * ERR[2], &k3);
            axpy(&mut err_vec, hs * ERR[3], &k4);
            axpy(&mut err_vec, hs * ERR[4], &k5);
            axpy(&mut err_vec, hs * ERR[5], &k6);
            axpy(&mut err_vec, hs * ERR[6], &k7);
            let mut err: f64 = 0.0;
            for i in 0..n {
                let scale = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                err = err.max(err_vec[i].norm() / scale);
            }
            steps += 1;
            if err <= 1.0 {
                t += hs;
                y = ynew;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (hs * grow).min(span);
            } else {
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
