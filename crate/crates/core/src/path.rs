//! Polyline paths and loops on the punctured plane.
//!
//! Loops carry winding-number queries about an arbitrary center; winding
//! classes index the topology of the multiply-connected domain. Orientation
//! convention: counterclockwise positive.

use crate::analytic::{segment_distance_to_point, unwrapped_angle_sweep};
use crate::error::{Error, Result};
use rand::Rng;
use std::f64::consts::PI;

/// An open polyline with at least two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenPath {
    vertices: Vec<[f64; 2]>,
}

impl OpenPath {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::TooFewVertices {
                need: 2,
                got: vertices.len(),
            });
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn first(&self) -> [f64; 2] {
        self.vertices[0]
    }

    pub fn last(&self) -> [f64; 2] {
        *self.vertices.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v }
    }

    /// Concatenate with another path sharing this path's endpoint.
    pub fn join(&self, other: &OpenPath) -> Result<OpenPath> {
        let gap = dist(self.last(), other.first());
        if gap > 1e-9 {
            return Err(Error::EndpointMismatch { mismatch: gap });
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices()[1..]);
        OpenPath::new(v)
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    pub fn min_distance_to(&self, p: [f64; 2]) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| segment_distance_to_point(w[0], w[1], p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A closed polyline: first vertex equals last vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    path: OpenPath,
}

impl LoopPath {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let path = OpenPath::new(vertices)?;
        if dist(path.first(), path.last()) > 1e-12 {
            return Err(Error::LoopNotClosed);
        }
        if path.vertices().len() < 4 {
            return Err(Error::TooFewVertices {
                need: 4,
                got: path.vertices().len(),
            });
        }
        Ok(Self { path })
    }

    /// Close an open vertex list by appending its first vertex.
    pub fn closing(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if let Some(&first) = vertices.first() {
            vertices.push(first);
        }
        Self::new(vertices)
    }

    /// Regular polygon approximation of a circle traversed `windings` times;
    /// negative `windings` is clockwise.
    pub fn circle(center: [f64; 2], radius: f64, segments: usize, windings: i32) -> Result<Self> {
        if windings == 0 {
            return Err(Error::Invalid(
                "a circle loop needs a nonzero winding count".into(),
            ));
        }
        let n = segments.max(8);
        let total = n * windings.unsigned_abs() as usize;
        let sign = windings.signum() as f64;
        let mut v = Vec::with_capacity(total + 1);
        for k in 0..total {
            let th = sign * 2.0 * PI * k as f64 / n as f64;
            v.push([center[0] + radius * th.cos(), center[1] + radius * th.sin()]);
        }
        v.push(v[0]);
        Self::new(v)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        self.path.vertices()
    }

    pub fn as_open(&self) -> &OpenPath {
        &self.path
    }

    pub fn length(&self) -> f64 {
        self.path.length()
    }

    pub fn min_distance_to(&self, p: [f64; 2]) -> f64 {
        self.path.min_distance_to(p)
    }

    /// Signed winding number about `center`; errors if the unwrapped sweep is
    /// not close to an integer multiple of 2 pi (center on the path).
    pub fn winding_number(&self, center: [f64; 2]) -> Result<i32> {
        let sweep = unwrapped_angle_sweep(self.vertices(), center, 1e-300)?;
        let w = sweep / (2.0 * PI);
        let rounded = w.round();
        if (w - rounded).abs() > 0.25 {
            return Err(Error::NonIntegerWinding {
                cx: center[0],
                cy: center[1],
                value: w,
            });
        }
        Ok(rounded as i32)
    }

    /// True if any two non-adjacent edges intersect.
    pub fn is_self_intersecting(&self) -> bool {
        let v = self.vertices();
        let m = v.len() - 1; // edge count
        for a in 0..m {
            for b in (a + 2)..m {
                // skip the wrap-around adjacency between last and first edge
                if a == 0 && b == m - 1 {
                    continue;
                }
                if segments_intersect(v[a], v[a + 1], v[b], v[b + 1]) {
                    return true;
                }
            }
        }
        false
    }

    /// Even-odd point-in-polygon test (equivalent to winding for simple loops).
    pub fn contains_point(&self, p: [f64; 2]) -> bool {
        let v = self.vertices();
        let mut inside = false;
        for w in v.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x_cross = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Random star-shaped polyline loop of a prescribed winding about `center`.
///
/// Radii are jittered within `[r_min, r_max]`; `winding = 0` produces a small
/// loop displaced away from the center so it encloses nothing.
pub fn random_polyline_loop(
    rng: &mut impl Rng,
    center: [f64; 2],
    r_min: f64,
    r_max: f64,
    winding: i32,
    vertices_per_turn: usize,
) -> LoopPath {
    let n = vertices_per_turn.max(8);
    if winding == 0 {
        // small polygon well off the center: inner edge at ~r_min from center
        let dir = rng.gen_range(0.0..2.0 * PI);
        let rho = 0.5 * (r_min + r_max);
        let c = [center[0] + rho * dir.cos(), center[1] + rho * dir.sin()];
        let max_size = 0.4 * (rho - r_min).min(r_max - rho).max(r_min * 0.2);
        let mut v: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                let r = max_size * rng.gen_range(0.5..1.0);
                [c[0] + r * th.cos(), c[1] + r * th.sin()]
            })
            .collect();
        v.push(v[0]);
        return LoopPath::new(v).expect("generated loop is closed by construction");
    }
    let total = n * winding.unsigned_abs() as usize;
    let sign = winding.signum() as f64;
    let mut v: Vec<[f64; 2]> = (0..total)
        .map(|k| {
            let th = sign * 2.0 * PI * k as f64 / n as f64 + 0.1 * rng.gen_range(-1.0..1.0) / n as f64;
            let r = rng.gen_range(r_min..r_max);
            [center[0] + r * th.cos(), center[1] + r * th.sin()]
        })
        .collect();
    v.push(v[0]);
    LoopPath::new(v).expect("generated loop is closed by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn winding_of_unit_circle() {
        let ccw = LoopPath::circle([0.0, 0.0], 1.0, 64, 1).unwrap();
        assert_eq!(ccw.winding_number([0.0, 0.0]).unwrap(), 1);
        let cw = LoopPath::circle([0.0, 0.0], 1.0, 64, -1).unwrap();
        assert_eq!(cw.winding_number([0.0, 0.0]).unwrap(), -1);
        let far = LoopPath::closing(vec![[2.0, 2.0], [2.5, 2.0], [2.5, 2.5], [2.0, 2.5]]).unwrap();
        assert_eq!(far.winding_number([0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn double_winding_counts_twice() {
        let l = LoopPath::circle([0.0, 0.0], 1.0, 48, 2).unwrap();
        assert_eq!(l.winding_number([0.0, 0.0]).unwrap(), 2);
    }

    #[test]
    fn loops_must_close() {
        assert!(matches!(
            LoopPath::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.5]]),
            Err(Error::LoopNotClosed)
        ));
    }

    #[test]
    fn self_intersection_detected() {
        let bow = LoopPath::closing(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(bow.is_self_intersecting());
        let square =
            LoopPath::closing(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(!square.is_self_intersecting());
    }

    #[test]
    fn contains_point_square() {
        let square =
            LoopPath::closing(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(square.contains_point([0.5, 0.5]));
        assert!(!square.contains_point([1.5, 0.5]));
    }

    #[test]
    fn join_requires_shared_endpoint() {
        let p1 = OpenPath::new(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let p2 = OpenPath::new(vec![[1.0, 0.0], [2.0, 0.0]]).unwrap();
        let p3 = OpenPath::new(vec![[5.0, 0.0], [6.0, 0.0]]).unwrap();
        assert_eq!(p1.join(&p2).unwrap().vertices().len(), 3);
        assert!(matches!(p1.join(&p3), Err(Error::EndpointMismatch { .. })));
    }

    proptest! {
        #[test]
        fn random_loops_have_requested_winding(seed in 0u64..500, w in -2i32..=2) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let l = random_polyline_loop(&mut rng, [0.3, -0.2], 1.0, 2.0, w, 24);
            prop_assert_eq!(l.winding_number([0.3, -0.2]).unwrap(), w);
        }
    }
}
