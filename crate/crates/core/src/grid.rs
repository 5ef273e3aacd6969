//! Uniform 2D Cartesian grid with an optional excluded disk.
//!
//! The disk marks the solenoid interior: the region a quantum probe can
//! never enter. Differential operators still evaluate there, but norms and
//! diagnostics skip it (together with a 2-cell boundary skirt, so one-sided
//! edge stencils never pollute convergence measurements).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Disk carved out of the probe-accessible region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.cx;
        let dy = y - self.cy;
        dx * dx + dy * dy < self.radius * self.radius
    }
}

/// Uniform collocated grid; samples live at cell centers `(x0 + i*dx, y0 + j*dy)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
    pub excluded: Option<Disk>,
}

/// Cells within this many cells of the domain edge are skipped by norms.
pub const BOUNDARY_SKIRT: usize = 2;

impl Grid2 {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, x0: f64, y0: f64) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        if !(dx > 0.0) || !(dy > 0.0) {
            return Err(Error::BadSpacing { dx, dy });
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            x0,
            y0,
            excluded: None,
        })
    }

    /// Square grid centered on the origin with extent `[-half, half]` per axis.
    pub fn centered_square(n: usize, half: f64) -> Result<Self> {
        let d = 2.0 * half / (n as f64 - 1.0);
        Self::new(n, n, d, d, -half, -half)
    }

    pub fn with_excluded_disk(mut self, disk: Disk) -> Result<Self> {
        let (xmax, ymax) = (self.xmax(), self.ymax());
        let inside = disk.cx - disk.radius > self.x0
            && disk.cx + disk.radius < xmax
            && disk.cy - disk.radius > self.y0
            && disk.cy + disk.radius < ymax;
        if !inside || disk.radius < 0.0 {
            return Err(Error::DiskOutsideDomain {
                cx: disk.cx,
                cy: disk.cy,
                radius: disk.radius,
            });
        }
        self.excluded = Some(disk);
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    #[inline]
    pub fn pos(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x(i), self.y(j)]
    }

    pub fn xmax(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn ymax(&self) -> f64 {
        self.y(self.ny - 1)
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn spacing_max(&self) -> f64 {
        self.dx.max(self.dy)
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.xmax() && y >= self.y0 && y <= self.ymax()
    }

    /// Probe-accessible cells: inside the boundary skirt and outside the
    /// excluded disk dilated by two cells (so second-order stencils touching
    /// the disk stay out of the reported norms).
    pub fn probe_mask(&self) -> Vec<bool> {
        self.mask_with(BOUNDARY_SKIRT, 2.0)
    }

    /// Mask with an explicit skirt width (cells) and disk dilation (cells).
    pub fn mask_with(&self, skirt: usize, disk_dilation_cells: f64) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        let pad = disk_dilation_cells * self.spacing_max();
        for j in 0..self.ny {
            for i in 0..self.nx {
                let edge = i < skirt || j < skirt || i >= self.nx - skirt || j >= self.ny - skirt;
                if edge {
                    continue;
                }
                if let Some(d) = &self.excluded {
                    let padded = Disk {
                        radius: d.radius + pad,
                        ..*d
                    };
                    if padded.contains(self.x(i), self.y(j)) {
                        continue;
                    }
                }
                mask[self.idx(i, j)] = true;
            }
        }
        mask
    }

    /// True when the two grids describe the same geometry (disk included).
    pub fn same_geometry(&self, other: &Grid2) -> bool {
        self == other
    }
}

/// Max-norm over masked cells. Returns 0 for an all-false mask.
pub fn masked_max_abs(values: &[f64], mask: &[bool]) -> f64 {
    debug_assert_eq!(values.len(), mask.len());
    values
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_grid() {
        assert!(matches!(
            Grid2::new(4, 64, 0.1, 0.1, 0.0, 0.0),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn rejects_nonpositive_spacing() {
        assert!(matches!(
            Grid2::new(16, 16, 0.0, 0.1, 0.0, 0.0),
            Err(Error::BadSpacing { .. })
        ));
    }

    #[test]
    fn disk_must_be_strictly_inside() {
        let g = Grid2::centered_square(32, 1.0).unwrap();
        let err = g.clone().with_excluded_disk(Disk {
            cx: 0.9,
            cy: 0.0,
            radius: 0.5,
        });
        assert!(matches!(err, Err(Error::DiskOutsideDomain { .. })));
        assert!(g
            .with_excluded_disk(Disk {
                cx: 0.0,
                cy: 0.0,
                radius: 0.3,
            })
            .is_ok());
    }

    #[test]
    fn probe_mask_skips_skirt_and_disk() {
        let g = Grid2::centered_square(32, 1.0)
            .unwrap()
            .with_excluded_disk(Disk {
                cx: 0.0,
                cy: 0.0,
                radius: 0.3,
            })
            .unwrap();
        let mask = g.probe_mask();
        assert!(!mask[g.idx(0, 0)]);
        assert!(!mask[g.idx(1, 16)]);
        assert!(!mask[g.idx(16, 16)]); // disk center
        assert!(mask[g.idx(3, 3)]);
        // a cell just outside the dilated disk
        let r_pad = 0.3 + 2.0 * g.spacing_max();
        let i = ((r_pad + 2.0 * g.dx - g.x0) / g.dx).ceil() as usize;
        assert!(mask[g.idx(i, 16)]);
    }

    #[test]
    fn centered_square_spans_extent() {
        let g = Grid2::centered_square(65, 2.0).unwrap();
        assert!((g.x0 + 2.0).abs() < 1e-12);
        assert!((g.xmax() - 2.0).abs() < 1e-12);
        assert!((g.x(32)).abs() < 1e-12);
    }
}
