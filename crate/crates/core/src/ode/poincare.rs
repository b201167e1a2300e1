//! Shooting formulation: iterate the boundary map
//! P(y0) = R integral of e^{A(omega-s)} g(s, y(y0, s)) ds
//! whose fixed points are exactly the initial values of solutions with
//! y(omega) = c y(0). Serves as an independent cross-check of the
//! collocation solver, sharing no discretization with it beyond quadrature.

use super::rk45::{integrate_dp45, IvpOptions};
use super::{exponential_table, residual_report, PanelScheme, Residuals, SolutionTrajectory};
use crate::error::{Error, Result};
use crate::kernels::GreenKernelODE;
use crate::linalg::vector_norm;
use crate::nonlin::NonlinearitySpec;
use num_complex::Complex64;

const NODES_PER_INTERVAL: usize = 8;

struct Propagated {
    grid_states: Vec<Vec<Complex64>>,
    node_states: Vec<Vec<Vec<Complex64>>>,
}

fn propagate(
    kernel: &GreenKernelODE,
    g: &NonlinearitySpec,
    scheme: &PanelScheme,
    n: usize,
    y0: &[Complex64],
    opts: &IvpOptions,
) -> Result<Propagated> {
    let omega = kernel.spec().omega;
    let h = omega / n as f64;
    let mnodes = scheme.xi.len();
    let mut checkpoints = Vec::with_capacity(n * (mnodes + 1) + 1);
    for j in 0..n {
        checkpoints.push(j as f64 * h);
        for m in 0..mnodes {
            checkpoints.push((j as f64 + scheme.xi[m]) * h);
        }
    }
    checkpoints.push(omega);
    let a = kernel.matrix();
    let states = integrate_dp45(
        |t, y| {
            let mut v = a.matvec(y);
            for (vv, gg) in v.iter_mut().zip(g.eval(t, y)) {
                *vv += gg;
            }
            v
        },
        0.0,
        y0,
        &checkpoints,
        opts,
    )?;
    let mut grid_states = Vec::with_capacity(n + 1);
    let mut node_states = Vec::with_capacity(n);
    for j in 0..n {
        let base = j * (mnodes + 1);
        grid_states.push(states[base].clone());
        node_states.push(states[base + 1..base + 1 + mnodes].to_vec());
    }
    grid_states.push(states[n * (mnodes + 1)].clone());
    Ok(Propagated {
        grid_states,
        node_states,
    })
}

fn boundary_map(
    kernel: &GreenKernelODE,
    g: &NonlinearitySpec,
    scheme: &PanelScheme,
    table: &[Vec<crate::linalg::ComplexMatrix>],
    n: usize,
    prop: &Propagated,
) -> Vec<Complex64> {
    let omega = kernel.spec().omega;
    let h = omega / n as f64;
    let dim = kernel.dim();
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..n {
        let row = &table[n - j - 1];
        for (m, state) in prop.node_states[j].iter().enumerate() {
            let s = (j as f64 + scheme.xi[m]) * h;
            let gv = g.eval(s, state);
            let prod = row[m].matvec(&gv);
            let coef = h * scheme.w[m];
            for (aa, pp) in acc.iter_mut().zip(&prod) {
                *aa += coef * pp;
            }
        }
    }
    kernel.resolvent().matvec(&acc)
}

/// Solve the boundary-value problem by damped fixed-point iteration on the
/// shooting map, integrating each trajectory with an adaptive 5(4) pair at
/// tolerance tol/10.
pub fn poincare_solve(
    kernel: &GreenKernelODE,
    g: &NonlinearitySpec,
    grid_size: usize,
    tol: f64,
    max_iter: usize,
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
    let spec = *kernel.spec();
    let omega = spec.omega;
    let n = grid_size - 1;
    let h = omega / n as f64;
    let scheme = PanelScheme::new(NODES_PER_INTERVAL);
    let table = exponential_table(kernel.matrix(), h, &scheme.xi, None, n)?;
    let opts = IvpOptions {
        atol: tol / 10.0,
        rtol: tol / 10.0,
        max_steps: 2_000_000,
    };

    let dim = kernel.dim();
    let mut y0 = vec![Complex64::new(0.0, 0.0); dim];
    let mut update_history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0usize;
    let mut final_update = f64::INFINITY;

    for _ in 0..max_iter {
        iterations += 1;
        let prop = propagate(kernel, g, &scheme, n, &y0, &opts)?;
        let mapped = boundary_map(kernel, g, &scheme, &table, n, &prop);
        let diff: Vec<Complex64> = mapped.iter().zip(&y0).map(|(a, b)| a - b).collect();
        let delta = vector_norm(&diff, spec.norm);
        let damp = match update_history.last() {
            Some(&prev) if delta >= prev => 0.5,
            _ => 1.0,
        };
        for (yy, dd) in y0.iter_mut().zip(&diff) {
            *yy += damp * dd;
        }
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

    let prop = propagate(kernel, g, &scheme, n, &y0, &opts)?;
    let grid: Vec<f64> = (0..=n).map(|i| omega * i as f64 / n as f64).collect();
    let mut traj = SolutionTrajectory {
        spec,
        grid,
        values: prop.grid_states,
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
