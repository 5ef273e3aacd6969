//! Closed-form potentials, gauge functions, and the retarded point kernel.
//!
//! These are the exact oracles the grid machinery is tested against: the
//! thin/finite solenoid vector potential, the multivalued polar gauge
//! function that gauges the thin-solenoid potential away, plane-wave gauge
//! functions on the light cone, and a smoothed retarded Green's kernel with
//! a testable causality margin.

use crate::error::{Error, Result};
use crate::path::OpenPath;
use std::f64::consts::PI;

/// Switch-on profile: 0 before `t1`, a C2 smoothstep over `[t1, t1 + tau]`,
/// 1 afterwards. `tau = 0` degenerates to a sharp step.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Ramp {
    pub t1: f64,
    pub tau: f64,
}

impl Ramp {
    pub fn value(&self, t: f64) -> f64 {
        if t <= self.t1 {
            return 0.0;
        }
        if self.tau <= 0.0 || t >= self.t1 + self.tau {
            return 1.0;
        }
        let u = (t - self.t1) / self.tau;
        // quintic smoothstep: C2 at both ends, keeps the radiated spectrum soft
        u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }

    pub fn end(&self) -> f64 {
        self.t1 + self.tau
    }
}

/// The flux-carrying puncture of the domain.
///
/// `radius = 0` is the ideal thin solenoid; `radius > 0` closes the interior
/// with a uniform field `Bz = flux / (pi R^2)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolenoidSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub flux: f64,
    pub ramp: Ramp,
}

impl SolenoidSpec {
    pub fn new(center: [f64; 2], radius: f64, flux: f64, ramp: Ramp) -> Result<Self> {
        if radius < 0.0 {
            return Err(Error::BadSolenoid {
                detail: format!("negative radius {radius}"),
            });
        }
        if ramp.tau < 0.0 {
            return Err(Error::BadSolenoid {
                detail: format!("negative ramp duration {}", ramp.tau),
            });
        }
        Ok(Self {
            center,
            radius,
            flux,
            ramp,
        })
    }

    /// Static spec: flux on for all time.
    pub fn static_flux(center: [f64; 2], radius: f64, flux: f64) -> Self {
        Self {
            center,
            radius,
            flux,
            ramp: Ramp {
                t1: f64::NEG_INFINITY,
                tau: 0.0,
            },
        }
    }

    /// Uniform interior field for the finite solenoid.
    pub fn interior_bz(&self) -> f64 {
        if self.radius > 0.0 {
            self.flux / (PI * self.radius * self.radius)
        } else {
            0.0
        }
    }
}

/// Vector potential of the ideal thin solenoid,
/// `A = flux / (2 pi r^2) * (-(y - yc), x - xc)`.
///
/// Fails only exactly at the singular center.
pub fn thin_solenoid_a(p: [f64; 2], s: &SolenoidSpec) -> Result<[f64; 2]> {
    let dx = p[0] - s.center[0];
    let dy = p[1] - s.center[1];
    let r2 = dx * dx + dy * dy;
    if r2 == 0.0 {
        return Err(Error::SingularPoint);
    }
    let k = s.flux / (2.0 * PI * r2);
    Ok([-k * dy, k * dx])
}

/// Potential and field of a finite-radius solenoid: exterior matches the
/// thin form, interior is the uniform-field closure, A continuous at r = R.
pub fn finite_solenoid(p: [f64; 2], s: &SolenoidSpec) -> ([f64; 2], f64) {
    let dx = p[0] - s.center[0];
    let dy = p[1] - s.center[1];
    let r2 = dx * dx + dy * dy;
    let rr = s.radius * s.radius;
    if s.radius > 0.0 && r2 < rr {
        // azimuthal magnitude flux * r / (2 pi R^2)
        let k = s.flux / (2.0 * PI * rr);
        ([-k * dy, k * dx], s.interior_bz())
    } else if r2 == 0.0 {
        ([0.0, 0.0], 0.0)
    } else {
        let k = s.flux / (2.0 * PI * r2);
        ([-k * dy, k * dx], 0.0)
    }
}

/// A single `coeff * x^px * y^py` term.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolyTerm {
    pub px: u32,
    pub py: u32,
    pub coeff: f64,
}

/// Analytic gauge function with closed-form value, gradient, and time
/// derivative.
///
/// The polar kind is multivalued: its principal value jumps by the flux
/// across the branch cut along the ray `theta = pi` from its center, while
/// its gradient is single-valued and smooth away from the center (it equals
/// minus the thin-solenoid potential). The plane-wave kind satisfies the
/// dispersion relation `omega = c |k|` by construction, so it solves the
/// scalar wave equation exactly.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum GaugeChi {
    Polynomial {
        terms: Vec<PolyTerm>,
    },
    PlaneWave {
        k: [f64; 2],
        omega: f64,
        amplitude: f64,
        phase: f64,
    },
    PolarAngle {
        flux: f64,
        center: [f64; 2],
    },
    Sum(Vec<GaugeChi>),
}

impl GaugeChi {
    pub fn polynomial(terms: Vec<PolyTerm>) -> Self {
        GaugeChi::Polynomial { terms }
    }

    /// Plane wave `amplitude * sin(k.x - omega t + phase)` with
    /// `omega = c |k|` enforced.
    pub fn plane_wave(k: [f64; 2], amplitude: f64, phase: f64, c: f64) -> Result<Self> {
        let kn = (k[0] * k[0] + k[1] * k[1]).sqrt();
        if kn == 0.0 {
            return Err(Error::ZeroWaveVector);
        }
        Ok(GaugeChi::PlaneWave {
            k,
            omega: c * kn,
            amplitude,
            phase,
        })
    }

    /// `chi = -flux / (2 pi) * theta` about `center`, branch cut at theta = pi.
    pub fn polar(flux: f64, center: [f64; 2]) -> Self {
        GaugeChi::PolarAngle { flux, center }
    }

    /// Principal-branch value. For the polar kind this jumps across the cut;
    /// line integrals of the gradient must unwrap instead (see
    /// [`polar_chi_line_integral`]).
    pub fn value(&self, p: [f64; 2], t: f64) -> f64 {
        match self {
            GaugeChi::Polynomial { terms } => terms
                .iter()
                .map(|q| q.coeff * p[0].powi(q.px as i32) * p[1].powi(q.py as i32))
                .sum(),
            GaugeChi::PlaneWave {
                k,
                omega,
                amplitude,
                phase,
            } => amplitude * (k[0] * p[0] + k[1] * p[1] - omega * t + phase).sin(),
            GaugeChi::PolarAngle { flux, center } => {
                let theta = (p[1] - center[1]).atan2(p[0] - center[0]);
                -flux / (2.0 * PI) * theta
            }
            GaugeChi::Sum(parts) => parts.iter().map(|c| c.value(p, t)).sum(),
        }
    }

    /// Spatial gradient; single-valued for every kind.
    pub fn grad(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        match self {
            GaugeChi::Polynomial { terms } => {
                let mut g = [0.0, 0.0];
                for q in terms {
                    if q.px > 0 {
                        g[0] += q.coeff
                            * q.px as f64
                            * p[0].powi(q.px as i32 - 1)
                            * p[1].powi(q.py as i32);
                    }
                    if q.py > 0 {
                        g[1] += q.coeff
                            * q.py as f64
                            * p[0].powi(q.px as i32)
                            * p[1].powi(q.py as i32 - 1);
                    }
                }
                g
            }
            GaugeChi::PlaneWave {
                k,
                omega,
                amplitude,
                phase,
            } => {
                let c = amplitude * (k[0] * p[0] + k[1] * p[1] - omega * t + phase).cos();
                [c * k[0], c * k[1]]
            }
            GaugeChi::PolarAngle { flux, center } => {
                // grad theta = (-dy, dx)/r^2, so grad chi = flux/(2 pi r^2) (dy, -dx):
                // exactly minus the thin-solenoid potential.
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let r2 = dx * dx + dy * dy;
                let k = flux / (2.0 * PI * r2);
                [k * dy, -k * dx]
            }
            GaugeChi::Sum(parts) => {
                let mut g = [0.0, 0.0];
                for c in parts {
                    let gi = c.grad(p, t);
                    g[0] += gi[0];
                    g[1] += gi[1];
                }
                g
            }
        }
    }

    /// Time derivative.
    pub fn dt(&self, p: [f64; 2], t: f64) -> f64 {
        match self {
            GaugeChi::Polynomial { .. } | GaugeChi::PolarAngle { .. } => 0.0,
            GaugeChi::PlaneWave {
                k,
                omega,
                amplitude,
                phase,
            } => -amplitude * omega * (k[0] * p[0] + k[1] * p[1] - omega * t + phase).cos(),
            GaugeChi::Sum(parts) => parts.iter().map(|c| c.dt(p, t)).sum(),
        }
    }

    pub fn is_polar(&self) -> bool {
        match self {
            GaugeChi::PolarAngle { .. } => true,
            GaugeChi::Sum(parts) => parts.iter().any(|c| c.is_polar()),
            _ => false,
        }
    }

    /// Centers of any polar components (used to validate they hide inside
    /// the excluded disk before a transform touches the probe region).
    pub fn polar_centers(&self) -> Vec<[f64; 2]> {
        match self {
            GaugeChi::PolarAngle { center, .. } => vec![*center],
            GaugeChi::Sum(parts) => parts.iter().flat_map(|c| c.polar_centers()).collect(),
            _ => Vec::new(),
        }
    }
}

/// Line integral of the polar gauge-function gradient along a path, with
/// continuous unwrapping of the angle segment by segment.
///
/// Evaluating chi at the endpoints would silently drop the winding
/// contribution; unwrapping keeps it: a closed loop of winding w returns
/// `-flux * w`.
pub fn polar_chi_line_integral(chi: &GaugeChi, path: &OpenPath, eps: f64) -> Result<f64> {
    let (flux, center) = match chi {
        GaugeChi::PolarAngle { flux, center } => (*flux, *center),
        _ => {
            return Err(Error::Invalid(
                "polar_chi_line_integral needs a polar-angle gauge function".into(),
            ))
        }
    };
    let dtheta = unwrapped_angle_sweep(path.vertices(), center, eps)?;
    Ok(-flux / (2.0 * PI) * dtheta)
}

/// Total unwrapped angle swept about `center` along a polyline. Each straight
/// segment subtends less than pi as seen from any point not on it, so the
/// per-segment principal difference is the exact continuous change.
pub(crate) fn unwrapped_angle_sweep(
    vertices: &[[f64; 2]],
    center: [f64; 2],
    eps: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for (s, pair) in vertices.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if segment_distance_to_point(a, b, center) < eps {
            return Err(Error::PathNearSingularity { eps });
        }
        let t0 = (a[1] - center[1]).atan2(a[0] - center[0]);
        let t1 = (b[1] - center[1]).atan2(b[0] - center[0]);
        let mut d = t1 - t0;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        let _ = s;
        total += d;
    }
    Ok(total)
}

pub(crate) fn segment_distance_to_point(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let cx = a[0] + t * ab[0] - p[0];
    let cy = a[1] + t * ab[1] - p[1];
    (cx * cx + cy * cy).sqrt()
}

/// Smoothed retarded point kernel `-G(t - r/c) / (4 pi r)`.
///
/// `G` is a normalized Gaussian with standard deviation `eps_w / 2`, i.e.
/// `eps_w` spans two sigma: the kernel is below 1e-12 of its peak (e^-50)
/// for `t < r/c - 5 eps_w`, the causality margin the diagnostics assert.
/// The kernel is unit-strength; physical normalization belongs to the
/// scenario driving it.
pub fn retarded_point_kernel(r: f64, t: f64, c: f64, eps_w: f64) -> Result<f64> {
    if !(r > 0.0) || !(eps_w > 0.0) {
        return Err(Error::BadKernelParams { r, width: eps_w });
    }
    let sigma = 0.5 * eps_w;
    let u = t - r / c;
    let g = (-0.5 * (u / sigma) * (u / sigma)).exp() / (sigma * (2.0 * PI).sqrt());
    Ok(-g / (4.0 * PI * r))
}
