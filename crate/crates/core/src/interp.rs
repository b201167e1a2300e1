//! Piecewise-cubic Lagrange interpolation on uniform grids, used for
//! evaluating collocation trajectories between nodes.

use num_complex::Complex64;

/// Barycentric-free 4-point Lagrange weights at offset `tau` (in grid units)
/// relative to the window start; window nodes sit at 0, 1, 2, 3.
pub fn lagrange_weights(tau: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for i in 0..4 {
        let mut p = 1.0;
        for k in 0..4 {
            if k != i {
                p *= (tau - k as f64) / (i as f64 - k as f64);
            }
        }
        w[i] = p;
    }
    w
}

/// Index of the 4-point window for interpolation near grid interval `j`
/// on a grid of `n` nodes.
pub fn window_start(j: usize, n: usize) -> usize {
    if n < 4 {
        return 0;
    }
    j.saturating_sub(1).min(n - 4)
}

/// Interpolates a vector-valued uniform-grid function at time t.
/// `values[i]` is the value at `t0 + i h`; out-of-range t is clamped.
pub fn interp_uniform(values: &[Vec<Complex64>], t0: f64, h: f64, t: f64) -> Vec<Complex64> {
    let n = values.len();
    assert!(n >= 2, "interpolation needs at least two nodes");
    if n < 4 {
        // Linear fallback for tiny grids.
        let pos = ((t - t0) / h).clamp(0.0, (n - 1) as f64);
        let j = (pos.floor() as usize).min(n - 2);
        let frac = pos - j as f64;
        return values[j]
            .iter()
            .zip(&values[j + 1])
            .map(|(a, b)| a * (1.0 - frac) + b * frac)
            .collect();
    }
    let pos = ((t - t0) / h).clamp(0.0, (n - 1) as f64);
    let j = (pos.floor() as usize).min(n - 2);
    let start = window_start(j, n);
    let tau = pos - start as f64;
    let w = lagrange_weights(tau);
    let dim = values[0].len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (k, wk) in w.iter().enumerate() {
        for (o, v) in out.iter_mut().zip(&values[start + k]) {
            *o += v * *wk;
        }
    }
    out
}

/// Scalar variant over a slice of complex samples.
pub fn interp_uniform_scalar(values: &[Complex64], t0: f64, h: f64, t: f64) -> Complex64 {
    let n = values.len();
    assert!(n >= 2);
    let pos = ((t - t0) / h).clamp(0.0, (n - 1) as f64);
    let j = (pos.floor() as usize).min(n - 2);
    if n < 4 {
        let frac = pos - j as f64;
        return values[j] * (1.0 - frac) + values[j + 1] * frac;
    }
    let start = window_start(j, n);
    let tau = pos - start as f64;
    let w = lagrange_weights(tau);
    (0..4).map(|k| values[start + k] * w[k]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let h = 0.1;
        let f = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x - 0.5 * x * x * x;
        let values: Vec<Vec<Complex64>> = (0..11)
            .map(|i| vec![Complex64::new(f(i as f64 * h), 0.0)])
            .collect();
        for k in 0..=50 {
            let t = k as f64 * 0.02;
            let v = interp_uniform(&values, 0.0, h, t);
            assert!((v[0].re - f(t)).abs() <= 1e-13, "t={t}");
        }
    }

    #[test]
    fn weights_sum_to_one() {
        for tau in [0.0, 0.3, 1.5, 2.7, 3.0] {
            let w = lagrange_weights(tau);
            let s: f64 = w.iter().sum();
            assert!((s - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn smooth_function_error_is_fourth_order() {
        let err_at = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let values: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((3.0 * i as f64 * h).sin(), 0.0))
                .collect();
            (0..=200)
                .map(|k| {
                    let t = k as f64 / 200.0;
                    (interp_uniform_scalar(&values, 0.0, h, t).re - (3.0 * t).sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let e1 = err_at(33);
        let e2 = err_at(65);
        assert!(e2 < e1 / 8.0, "e1={e1} e2={e2}");
    }
}
