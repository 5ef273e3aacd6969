//! Matrix-free conjugate-gradient Poisson solvers on the structured grid.
//!
//! Two discrete Laplacians appear in the workbench and they are not
//! interchangeable:
//!
//! * the compact 5-point operator, used by the wave stepper and static
//!   source calibration;
//! * the wide operator `div∘grad` composed from the central-difference
//!   gradient and divergence, used by the Coulomb projection. Solving with
//!   the composed operator is what lets the projected divergence drop to
//!   solver tolerance rather than truncation level.
//!
//! The wide solve freezes two boundary layers at zero so every stencil it
//! touches is purely central; the operator then splits into four decoupled
//! SPD sublattice problems and plain CG converges cleanly.

use crate::error::{Error, Result};
use crate::grid::Grid2;

/// Convergence record of a CG solve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CgStats {
    pub iterations: usize,
    pub rel_residual: f64,
}

/// Homogeneous-Dirichlet mask: which cells are unknowns.
fn unknown_mask(grid: &Grid2, frozen_layers: usize) -> Vec<bool> {
    let mut mask = vec![false; grid.len()];
    for j in frozen_layers..grid.ny - frozen_layers {
        for i in frozen_layers..grid.nx - frozen_layers {
            mask[grid.idx(i, j)] = true;
        }
    }
    mask
}

/// Compact 5-point Laplacian restricted to the unknown set (one frozen layer).
fn apply_compact(grid: &Grid2, u: &[f64], out: &mut [f64]) {
    let idx2 = 1.0 / (grid.dx * grid.dx);
    let idy2 = 1.0 / (grid.dy * grid.dy);
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let k = grid.idx(i, j);
            out[k] = (u[k - 1] - 2.0 * u[k] + u[k + 1]) * idx2
                + (u[k - grid.nx] - 2.0 * u[k] + u[k + grid.nx]) * idy2;
        }
    }
}

/// Wide Laplacian `div(grad(.))` restricted to cells at least two layers in.
fn apply_wide(grid: &Grid2, u: &[f64], out: &mut [f64]) {
    let idx2 = 1.0 / (4.0 * grid.dx * grid.dx);
    let idy2 = 1.0 / (4.0 * grid.dy * grid.dy);
    let nx = grid.nx;
    for j in 2..grid.ny - 2 {
        for i in 2..nx - 2 {
            let k = grid.idx(i, j);
            out[k] = (u[k - 2] - 2.0 * u[k] + u[k + 2]) * idx2
                + (u[k - 2 * nx] - 2.0 * u[k] + u[k + 2 * nx]) * idy2;
        }
    }
}

fn cg_solve(
    grid: &Grid2,
    rhs: &[f64],
    frozen_layers: usize,
    apply: impl Fn(&Grid2, &[f64], &mut [f64]),
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, CgStats)> {
    let n = grid.len();
    let mask = unknown_mask(grid, frozen_layers);
    // solve (-L) u = -rhs so the operator is positive definite
    let b: Vec<f64> = rhs
        .iter()
        .zip(&mask)
        .map(|(v, &m)| if m { -v } else { 0.0 })
        .collect();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((
            x,
            CgStats {
                iterations: 0,
                rel_residual: 0.0,
            },
        ));
    }
    let mut r = b.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rs_old: f64 = r.iter().map(|v| v * v).sum();
    for it in 0..max_iter {
        apply(grid, &p, &mut ap);
        // negate: CG runs on -L
        let mut p_ap = 0.0;
        for k in 0..n {
            if mask[k] {
                ap[k] = -ap[k];
                p_ap += p[k] * ap[k];
            } else {
                ap[k] = 0.0;
            }
        }
        if p_ap.abs() < 1e-300 {
            break;
        }
        let alpha = rs_old / p_ap;
        for k in 0..n {
            if mask[k] {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
        }
        let rs_new: f64 = r.iter().map(|v| v * v).sum();
        let rel = rs_new.sqrt() / b_norm;
        if rel <= rel_tol {
            return Ok((
                x,
                CgStats {
                    iterations: it + 1,
                    rel_residual: rel,
                },
            ));
        }
        let beta = rs_new / rs_old;
        for k in 0..n {
            if mask[k] {
                p[k] = r[k] + beta * p[k];
            }
        }
        rs_old = rs_new;
    }
    Err(Error::SolverDiverged {
        residual: rs_old.sqrt() / b_norm,
        iterations: max_iter,
    })
}

/// Solve the compact 5-point `laplacian(u) = rhs` with u = 0 on the boundary
/// ring. Used by the wave stepper's static source calibration.
pub fn solve_poisson_compact(
    grid: &Grid2,
    rhs: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, CgStats)> {
    cg_solve(grid, rhs, 1, apply_compact, rel_tol, max_iter)
}

/// Solve the composed `div(grad(u)) = rhs` with u = 0 on two boundary
/// layers. This is the Coulomb-projection operator.
pub fn solve_poisson_wide(
    grid: &Grid2,
    rhs: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, CgStats)> {
    cg_solve(grid, rhs, 2, apply_wide, rel_tol, max_iter)
}

/// Default relative residual for projections.
pub const DEFAULT_CG_TOL: f64 = 1e-8;

/// Default iteration cap, generous for desk-scale grids.
pub const DEFAULT_CG_MAX_ITER: usize = 20_000;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField2;
    use crate::ops::{div, grad};

    #[test]
    fn compact_solver_recovers_manufactured_solution() {
        let g = Grid2::centered_square(65, 1.0).unwrap();
        // u = sin(pi x) sin(pi y) vanishes on the unit-square boundary
        let pi = std::f64::consts::PI;
        let exact = ScalarField2::sample(&g, 0.0, |x, y| (pi * x).sin() * (pi * y).sin());
        let rhs: Vec<f64> = (0..g.len())
            .map(|k| {
                let (i, j) = (k % g.nx, k / g.nx);
                -2.0 * pi * pi * (pi * g.x(i)).sin() * (pi * g.y(j)).sin()
            })
            .collect();
        let (u, stats) = solve_poisson_compact(&g, &rhs, 1e-10, 10_000).unwrap();
        assert!(stats.rel_residual <= 1e-10);
        let mut worst = 0.0f64;
        for k in 0..g.len() {
            worst = worst.max((u[k] - exact.values[k]).abs());
        }
        // discretization error of the 5-point operator at h = 1/32
        assert!(worst < 2e-3, "worst {worst}");
    }

    #[test]
    fn wide_solver_kills_central_divergence() {
        let g = Grid2::centered_square(64, 1.0).unwrap();
        let a = crate::field::VectorField2::sample(&g, 0.0, |x, y| {
            [(2.0 * x).sin() * y, x * x - 0.3 * y]
        });
        let d = div(&a);
        let rhs: Vec<f64> = d.values.iter().map(|v| -v).collect();
        let (chi, stats) = solve_poisson_wide(&g, &rhs, 1e-10, 20_000).unwrap();
        let chi_field = ScalarField2::new(g.clone(), chi, 0.0).unwrap();
        let projected = a.add_scaled(&grad(&chi_field), 1.0).unwrap();
        let d2 = div(&projected);
        let mask = g.probe_mask();
        let before = d.max_abs_masked(&mask);
        let after = d2.max_abs_masked(&mask);
        assert!(
            after <= 1e-7 * before.max(1e-300),
            "divergence only fell from {before} to {after}"
        );
        assert!(stats.iterations > 0);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let g = Grid2::centered_square(64, 1.0).unwrap();
        let rhs = vec![1.0; g.len()];
        assert!(matches!(
            solve_poisson_compact(&g, &rhs, 1e-12, 3),
            Err(Error::SolverDiverged { .. })
        ));
    }
}
