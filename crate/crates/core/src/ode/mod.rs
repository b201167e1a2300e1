//! Fixed-point solvers for the matrix problem y' = Ay + g(t, y) with
//! boundary condition y(omega) = c y(0): Picard iteration on the integral
//! form, and an independent shooting formulation for cross-checking.

pub mod poincare;
pub mod rk45;

use crate::error::{Error, Result};
use crate::interp::{interp_uniform, lagrange_weights, window_start};
use crate::kernels::{GreenKernelODE, PeriodicitySpec};
use crate::linalg::{matrix_exponential, vector_norm, ComplexMatrix};
use crate::nonlin::NonlinearitySpec;
use crate::quad::gauss_legendre;
use num_complex::Complex64;

/// Gauss nodes per grid interval in the collocation quadrature.
const NODES_PER_INTERVAL: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// ||y(omega) - c y(0)||.
    pub boundary: f64,
    /// max over interior grid points of ||y' - A y - g(t, y)|| with y'
    /// from fourth-order finite differences.
    pub ode: f64,
    /// max over off-grid samples of ||extend(t + omega) - c extend(t)||.
    pub periodicity: f64,
}

/// A solution sampled on a uniform grid over [0, omega], with the
/// convergence record of the iteration that produced it.
#[derive(Clone, Debug)]
pub struct SolutionTrajectory {
    pub spec: PeriodicitySpec,
    pub grid: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
    pub iterations: usize,
    pub final_update: f64,
    pub update_history: Vec<f64>,
    pub residuals: Residuals,
}

impl SolutionTrajectory {
    /// Piecewise-cubic evaluation inside [0, omega].
    pub fn value_at(&self, t: f64) -> Vec<Complex64> {
        let h = self.grid[1] - self.grid[0];
        interp_uniform(&self.values, self.grid[0], h, t)
    }

    /// sup over grid nodes of the state norm.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| vector_norm(v, self.spec.norm))
            .fold(0.0, f64::max)
    }

    /// Largest grid-node distance to another trajectory on the same grid.
    pub fn distance_to(&self, other: &SolutionTrajectory) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                vector_norm(&diff, self.spec.norm)
            })
            .fold(0.0, f64::max)
    }
}

fn extend_unchecked(traj: &SolutionTrajectory, t: f64) -> Vec<Complex64> {
    let omega = traj.spec.omega;
    let k = (t / omega).floor();
    let tau = (t - k * omega).clamp(0.0, omega);
    let factor = traj.spec.c.powi(k as i32);
    traj.value_at(tau).into_iter().map(|v| factor * v).collect()
}

/// y(t) for any real t via y(t) = c^k y(t - k omega), k = floor(t / omega).
pub fn extend_solution(traj: &SolutionTrajectory, t: f64) -> Result<Vec<Complex64>> {
    if traj.residuals.boundary > 1e-6 {
        return Err(Error::Precondition(format!(
            "boundary residual {} too large for a well-defined extension",
            traj.residuals.boundary
        )));
    }
    Ok(extend_unchecked(traj, t))
}

/// Per-node Gauss data for the collocation quadrature: scaled nodes and the
/// three interpolation-weight sets (left edge, interior, right edge).
pub(crate) struct PanelScheme {
    pub(crate) xi: Vec<f64>,
    pub(crate) w: Vec<f64>,
    lam_left: Vec<[f64; 4]>,
    lam_mid: Vec<[f64; 4]>,
    lam_right: Vec<[f64; 4]>,
}

impl PanelScheme {
    pub(crate) fn new(nodes: usize) -> Self {
        let (x, w) = gauss_legendre(nodes);
        let xi: Vec<f64> = x.iter().map(|v| 0.5 * (v + 1.0)).collect();
        let w: Vec<f64> = w.iter().map(|v| 0.5 * v).collect();
        let lam_left = xi.iter().map(|&u| lagrange_weights(u)).collect();
        let lam_mid = xi.iter().map(|&u| lagrange_weights(1.0 + u)).collect();
        let lam_right = xi.iter().map(|&u| lagrange_weights(2.0 + u)).collect();
        Self {
            xi,
            w,
            lam_left,
            lam_mid,
            lam_right,
        }
    }

    /// Interpolation weights for a point in grid interval j of n_nodes-1.
    pub(crate) fn weights_for(&self, j: usize, n_nodes: usize, m: usize) -> (&[f64; 4], usize) {
        let w = window_start(j, n_nodes);
        let shift = j - w;
        let lam = match shift {
            0 => &self.lam_left[m],
            1 => &self.lam_mid[m],
            _ => &self.lam_right[m],
        };
        (lam, w)
    }
}

/// e^{A h (k - xi_m)} B for k = 1..=count, built from one exponential per
/// node by repeated multiplication with e^{A h}.
fn exponential_table(
    a: &ComplexMatrix,
    h: f64,
    xi: &[f64],
    b: Option<&ComplexMatrix>,
    count: usize,
) -> Result<Vec<Vec<ComplexMatrix>>> {
    let step = matrix_exponential(a, h)?;
    let mut rows: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(count);
    let mut first = Vec::with_capacity(xi.len());
    for &u in xi {
        let e = matrix_exponential(a, h * (1.0 - u))?;
        first.push(match b {
            Some(mat) => e.mul(mat),
            None => e,
        });
    }
    rows.push(first);
    for k in 1..count {
        let prev = &rows[k - 1];
        let next: Vec<ComplexMatrix> = prev.iter().map(|m| step.mul(m)).collect();
        rows.push(next);
    }
    Ok(rows)
}

/// Solve the fixed-point equation y = integral of K(t,s) g(s, y(s)) ds by
/// Picard iteration on a uniform grid of `grid_size` nodes. The quadrature
/// panels coincide with the grid intervals, so the kernel jump at s = t
/// always lands on a panel boundary.
pub fn picard_solve(
    kernel: &GreenKernelODE,
    g: &NonlinearitySpec,
    grid_size: usize,
    tol: f64,
    max_iter: usize,
    initial: Option<&SolutionTrajectory>,
) -> Result<SolutionTrajectory> {
    if grid_size < 9 {
        return Err(Error::Domain(format!(
            "grid_size must be at least 9 nodes, got {grid_size}"
        )));
    }
    if g.dim != kernel.dim() {
        return Err(Error::Dimension {
            expected: kernel.dim(),
            got: g.dim,
        });
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::Domain("need tol > 0 and max_iter >= 1".into()));
    }
    let spec = *kernel.spec();
    let omega = spec.omega;
    let dim = kernel.dim();
    let n = grid_size - 1;
    let h = omega / n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| omega * i as f64 / n as f64).collect();
    let scheme = PanelScheme::new(NODES_PER_INTERVAL);
    let table = exponential_table(kernel.matrix(), h, &scheme.xi, Some(kernel.resolvent()), n)?;
    let c = spec.c;

    let mut values: Vec<Vec<Complex64>> = match initial {
        Some(traj) => grid
            .iter()
            .map(|&t| {
                let v = traj.value_at(t.min(traj.spec.omega));
                if v.len() == dim {
                    v
                } else {
                    vec![Complex64::new(0.0, 0.0); dim]
                }
            })
            .collect(),
        None => vec![vec![Complex64::new(0.0, 0.0); dim]; grid_size],
    };

    let mut update_history = Vec::new();
    let mut converged = false;
    let mut final_update = f64::INFINITY;
    let mut iterations = 0usize;

    let mnodes = scheme.xi.len();
    for _ in 0..max_iter {
        iterations += 1;
        // Nonlinearity at every quadrature node, interpolated from the grid.
        let mut gvals: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut per_node = Vec::with_capacity(mnodes);
            for m in 0..mnodes {
                let s = (j as f64 + scheme.xi[m]) * h;
                let (lam, w) = scheme.weights_for(j, grid_size, m);
                let mut y = vec![Complex64::new(0.0, 0.0); dim];
                for r in 0..4 {
                    let coef = lam[r];
                    for (yy, vv) in y.iter_mut().zip(&values[w + r]) {
                        *yy += coef * vv;
                    }
                }
                per_node.push(g.eval(s, &y));
            }
            gvals.push(per_node);
        }

        let mut next: Vec<Vec<Complex64>> = Vec::with_capacity(grid_size);
        for i in 0..=n {
            let mut acc = vec![Complex64::new(0.0, 0.0); dim];
            for j in 0..n {
                let (k, factor) = if j < i {
                    (i - j, c)
                } else {
                    (n + i - j, Complex64::new(1.0, 0.0))
                };
                let row = &table[k - 1];
                for m in 0..mnodes {
                    let prod = row[m].matvec(&gvals[j][m]);
                    let coef = factor * (h * scheme.w[m]);
                    for (aa, pp) in acc.iter_mut().zip(&prod) {
                        *aa += coef * pp;
                    }
                }
            }
            next.push(acc);
        }

        let mut delta: f64 = 0.0;
        for i in 0..=n {
            let diff: Vec<Complex64> = next[i]
                .iter()
                .zip(&values[i])
                .map(|(a, b)| a - b)
                .collect();
            delta = delta.max(vector_norm(&diff, spec.norm));
        }
        values = next;
        update_history.push(delta);
        final_update = delta;
        if delta <= tol {
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            last_update: final_update,
        });
    }

    let mut traj = SolutionTrajectory {
        spec,
        grid,
        values,
        iterations,
        final_update,
        update_history,
        residuals: Residuals {
            boundary: 0.0,
            ode: 0.0,
            periodicity: 0.0,
        },
    };
    traj.residuals = residual_report(&traj, kernel.matrix(), g);
    Ok(traj)
}

/// Boundary, differential-equation, and extension residuals of a
/// trajectory, measured in its own norm.
pub fn residual_report(
    traj: &SolutionTrajectory,
    a: &ComplexMatrix,
    g: &NonlinearitySpec,
) -> Residuals {
    let n = traj.grid.len() - 1;
    let h = traj.grid[1] - traj.grid[0];
    let c = traj.spec.c;
    let norm = traj.spec.norm;

    let boundary = {
        let diff: Vec<Complex64> = traj.values[n]
            .iter()
            .zip(&traj.values[0])
            .map(|(yn, y0)| yn - c * y0)
            .collect();
        vector_norm(&diff, norm)
    };

    let dim = traj.values[0].len();
    let mut ode: f64 = 0.0;
    for i in 1..n {
        let mut dy = vec![Complex64::new(0.0, 0.0); dim];
        let stencil: [(i64, f64); 5] = if i == 1 {
            [(-1, -3.0), (0, -10.0), (1, 18.0), (2, -6.0), (3, 1.0)]
        } else if i == n - 1 {
            [(1, 3.0), (0, 10.0), (-1, -18.0), (-2, 6.0), (-3, -1.0)]
        } else {
            [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0), (0, 0.0)]
        };
        for (off, coef) in stencil {
            if coef == 0.0 {
                continue;
            }
            let idx = (i as i64 + off) as usize;
            for (d, v) in dy.iter_mut().zip(&traj.values[idx]) {
                *d += (coef / (12.0 * h)) * v;
            }
        }
        let ay = a.matvec(&traj.values[i]);
        let gy = g.eval(traj.grid[i], &traj.values[i]);
        let res: Vec<Complex64> = (0..dim).map(|d| dy[d] - ay[d] - gy[d]).collect();
        ode = ode.max(vector_norm(&res, norm));
    }

    let omega = traj.spec.omega;
    let mut periodicity: f64 = 0.0;
    for j in 0..33 {
        let t = (j as f64 + 0.37) * omega / 33.0;
        let lhs = extend_unchecked(traj, t + omega);
        let rhs = extend_unchecked(traj, t);
        let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(x, y)| x - c * y).collect();
        periodicity = periodicity.max(vector_norm(&diff, norm));
    }

    Residuals {
        boundary,
        ode,
        periodicity,
    }
}
