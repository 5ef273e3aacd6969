//! Sampled scalar and vector fields, and the potential state they compose.
//!
//! `PotentialState` is the object gauge transformations act on. It carries
//! the current `(phi, A)` level and optionally the previous level, so time
//! derivatives come from a two-level backward difference. Two-level
//! diagnostics (derived E, Lorenz residual) are centered at the half step
//! `t - dt/2`, which keeps them second order in both dx and dt.

use crate::error::{Error, Result};
use crate::grid::{masked_max_abs, Grid2};

/// Scalar samples on a grid, tagged with a time level.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2 {
    pub grid: Grid2,
    pub values: Vec<f64>,
    pub time: f64,
}

impl ScalarField2 {
    pub fn new(grid: Grid2, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values, time })
    }

    pub fn zeros(grid: &Grid2, time: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            time,
        }
    }

    pub fn sample(grid: &Grid2, time: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values[grid.idx(i, j)] = f(grid.x(i), grid.y(j));
            }
        }
        Self {
            grid: grid.clone(),
            values,
            time,
        }
    }

    /// Cell-averaged sampling: each value is the mean of `subdiv^2` point
    /// samples across the cell. Use for discontinuous sources (a sharp
    /// solenoid edge) where center sampling misrepresents cell content.
    pub fn sample_cell_averaged(
        grid: &Grid2,
        time: f64,
        subdiv: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let s = subdiv.max(1);
        let mut values = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let [xc, yc] = grid.pos(i, j);
                let mut acc = 0.0;
                for a in 0..s {
                    for b in 0..s {
                        let x = xc + ((a as f64 + 0.5) / s as f64 - 0.5) * grid.dx;
                        let y = yc + ((b as f64 + 0.5) / s as f64 - 0.5) * grid.dy;
                        acc += f(x, y);
                    }
                }
                values[grid.idx(i, j)] = acc / (s * s) as f64;
            }
        }
        Self {
            grid: grid.clone(),
            values,
            time,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn max_abs_masked(&self, mask: &[bool]) -> f64 {
        masked_max_abs(&self.values, mask)
    }

    /// `self + scale * other`, keeping `self`'s time stamp.
    pub fn add_scaled(&self, other: &Self, scale: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            time: self.time,
        })
    }

    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * scale).collect(),
            time: self.time,
        }
    }

    /// Bilinear interpolation at a point inside the domain.
    pub fn interp(&self, p: [f64; 2]) -> f64 {
        let (i, j, tx, ty) = bilinear_weights(&self.grid, p);
        let g = &self.grid;
        let v00 = self.values[g.idx(i, j)];
        let v10 = self.values[g.idx(i + 1, j)];
        let v01 = self.values[g.idx(i, j + 1)];
        let v11 = self.values[g.idx(i + 1, j + 1)];
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty + v11 * tx * ty
    }

    pub fn mean_masked(&self, mask: &[bool]) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (v, &m) in self.values.iter().zip(mask) {
            if m {
                sum += v;
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// In-plane vector samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    pub grid: Grid2,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub time: f64,
}

impl VectorField2 {
    pub fn new(grid: Grid2, x: Vec<f64>, y: Vec<f64>, time: f64) -> Result<Self> {
        if x.len() != grid.len() || y.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: x.len().max(y.len()),
            });
        }
        Ok(Self { grid, x, y, time })
    }

    pub fn zeros(grid: &Grid2, time: f64) -> Self {
        Self {
            grid: grid.clone(),
            x: vec![0.0; grid.len()],
            y: vec![0.0; grid.len()],
            time,
        }
    }

    pub fn sample(grid: &Grid2, time: f64, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut x = vec![0.0; grid.len()];
        let mut y = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let v = f(grid.x(i), grid.y(j));
                let k = grid.idx(i, j);
                x[k] = v[0];
                y[k] = v[1];
            }
        }
        Self {
            grid: grid.clone(),
            x,
            y,
            time,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let k = self.grid.idx(i, j);
        [self.x[k], self.y[k]]
    }

    pub fn max_abs_masked(&self, mask: &[bool]) -> f64 {
        masked_max_abs(&self.x, mask).max(masked_max_abs(&self.y, mask))
    }

    pub fn add_scaled(&self, other: &Self, scale: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let x = self
            .x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| a + scale * b)
            .collect();
        let y = self
            .y
            .iter()
            .zip(&other.y)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            x,
            y,
            time: self.time,
        })
    }

    pub fn interp(&self, p: [f64; 2]) -> [f64; 2] {
        let (i, j, tx, ty) = bilinear_weights(&self.grid, p);
        let g = &self.grid;
        let k00 = g.idx(i, j);
        let k10 = g.idx(i + 1, j);
        let k01 = g.idx(i, j + 1);
        let k11 = g.idx(i + 1, j + 1);
        let w00 = (1.0 - tx) * (1.0 - ty);
        let w10 = tx * (1.0 - ty);
        let w01 = (1.0 - tx) * ty;
        let w11 = tx * ty;
        [
            self.x[k00] * w00 + self.x[k10] * w10 + self.x[k01] * w01 + self.x[k11] * w11,
            self.y[k00] * w00 + self.y[k10] * w10 + self.y[k01] * w01 + self.y[k11] * w11,
        ]
    }
}

fn bilinear_weights(grid: &Grid2, p: [f64; 2]) -> (usize, usize, f64, f64) {
    let fx = (p[0] - grid.x0) / grid.dx;
    let fy = (p[1] - grid.y0) / grid.dy;
    let i = (fx.floor() as isize).clamp(0, grid.nx as isize - 2) as usize;
    let j = (fy.floor() as isize).clamp(0, grid.ny as isize - 2) as usize;
    let tx = (fx - i as f64).clamp(0.0, 1.0);
    let ty = (fy - j as f64).clamp(0.0, 1.0);
    (i, j, tx, ty)
}

/// Previous time level of a potential state.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevLevel {
    pub phi: ScalarField2,
    pub a: VectorField2,
}

/// The `(phi, A)` pair gauge transformations act on.
///
/// `prev: None` declares the state static: all time derivatives vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialState {
    pub phi: ScalarField2,
    pub a: VectorField2,
    pub prev: Option<PrevLevel>,
}

impl PotentialState {
    /// A state with no time dependence.
    pub fn stationary(phi: ScalarField2, a: VectorField2) -> Result<Self> {
        check_level(&phi, &a)?;
        Ok(Self { phi, a, prev: None })
    }

    /// A state with two time levels; `prev` must be earlier than the current level.
    pub fn with_history(
        phi: ScalarField2,
        a: VectorField2,
        phi_prev: ScalarField2,
        a_prev: VectorField2,
    ) -> Result<Self> {
        check_level(&phi, &a)?;
        check_level(&phi_prev, &a_prev)?;
        if phi.grid != phi_prev.grid {
            return Err(Error::GridMismatch);
        }
        if !(a_prev.time < a.time) {
            return Err(Error::TimeMismatch {
                detail: format!(
                    "previous level at t={} is not earlier than current t={}",
                    a_prev.time, a.time
                ),
            });
        }
        Ok(Self {
            phi,
            a,
            prev: Some(PrevLevel {
                phi: phi_prev,
                a: a_prev,
            }),
        })
    }

    pub fn zero(grid: &Grid2, time: f64) -> Self {
        Self {
            phi: ScalarField2::zeros(grid, time),
            a: VectorField2::zeros(grid, time),
            prev: None,
        }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.phi.grid
    }

    pub fn time(&self) -> f64 {
        self.a.time
    }

    pub fn is_static(&self) -> bool {
        self.prev.is_none()
    }

    /// Time step between the stored levels, if the state has a history.
    pub fn dt(&self) -> Option<f64> {
        self.prev.as_ref().map(|p| self.a.time - p.a.time)
    }
}

fn check_level(phi: &ScalarField2, a: &VectorField2) -> Result<()> {
    if phi.grid != a.grid {
        return Err(Error::GridMismatch);
    }
    if (phi.time - a.time).abs() > 1e-12 * (1.0 + a.time.abs()) {
        return Err(Error::TimeMismatch {
            detail: format!("phi at t={}, A at t={}", phi.time, a.time),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2 {
        Grid2::centered_square(16, 1.0).unwrap()
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let g = grid();
        assert!(matches!(
            ScalarField2::new(g.clone(), vec![0.0; 3], 0.0),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            VectorField2::new(g.clone(), vec![0.0; g.len()], vec![0.0; 3], 0.0),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn history_requires_increasing_time() {
        let g = grid();
        let phi = ScalarField2::zeros(&g, 1.0);
        let a = VectorField2::zeros(&g, 1.0);
        let phi_prev = ScalarField2::zeros(&g, 1.0);
        let a_prev = VectorField2::zeros(&g, 1.0);
        assert!(matches!(
            PotentialState::with_history(phi, a, phi_prev, a_prev),
            Err(Error::TimeMismatch { .. })
        ));
    }

    #[test]
    fn bilinear_interp_is_exact_on_bilinear_data() {
        let g = grid();
        let f = ScalarField2::sample(&g, 0.0, |x, y| 2.0 + 3.0 * x - y + 0.5 * x * y);
        let p = [0.137, -0.442];
        let exact = 2.0 + 3.0 * p[0] - p[1] + 0.5 * p[0] * p[1];
        assert!((f.interp(p) - exact).abs() < 1e-12);
    }

    #[test]
    fn cell_averaged_sampling_matches_point_sampling_for_linear() {
        let g = grid();
        let fa = ScalarField2::sample(&g, 0.0, |x, y| 1.0 + x - 2.0 * y);
        let fb = ScalarField2::sample_cell_averaged(&g, 0.0, 4, |x, y| 1.0 + x - 2.0 * y);
        for (a, b) in fa.values.iter().zip(&fb.values) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
