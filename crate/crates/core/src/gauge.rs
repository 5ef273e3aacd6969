//! Gauge transformations, gauge-condition projections, and the
//! equivalence-class spectrum made executable.
//!
//! Narrow moves add the gradient of a scalar function chi; Wide moves add
//! any curl-free vector C with companion scalar C0. On a simply-connected
//! domain the two coincide; around the solenoid puncture they differ by the
//! loop integrals, which is the whole point: `classify_equivalence` tells
//! pairs of potential configurations apart as IDENTICAL, NARROW_EQUIVALENT,
//! WIDE_ONLY or INEQUIVALENT from their residuals.

use crate::analytic::GaugeChi;
use crate::elliptic::{solve_poisson_wide, CgStats, DEFAULT_CG_MAX_ITER, DEFAULT_CG_TOL};
use crate::error::{Error, Result};
use crate::field::{PotentialState, PrevLevel, ScalarField2, VectorField2};
use crate::interferometry::{line_integral_a, VectorSource};
use crate::ops::{curl_z, div, grad};
use crate::path::LoopPath;
use serde::Serialize;

/// Narrow-class transform: `phi -> phi - d(chi)/dt`, `A -> A + grad(chi)`,
/// applied with chi's analytic derivatives at both stored time levels.
///
/// A polar-kind chi is only admissible when its singular center hides inside
/// the grid's excluded disk; otherwise the gradient singularity would enter
/// the probe-accessible region.
pub fn apply_narrow(s: &PotentialState, chi: &GaugeChi) -> Result<PotentialState> {
    for center in chi.polar_centers() {
        let ok = s
            .grid()
            .excluded
            .as_ref()
            .map(|d| d.contains(center[0], center[1]))
            .unwrap_or(false);
        if !ok {
            return Err(Error::PolarCenterExposed {
                cx: center[0],
                cy: center[1],
            });
        }
    }
    let level = |phi: &ScalarField2, a: &VectorField2| -> (ScalarField2, VectorField2) {
        let t = a.time;
        let g = &a.grid;
        let mut phi2 = phi.clone();
        let mut a2 = a.clone();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.idx(i, j);
                let p = g.pos(i, j);
                phi2.values[k] -= chi.dt(p, t);
                let gr = chi.grad(p, t);
                a2.x[k] += gr[0];
                a2.y[k] += gr[1];
            }
        }
        (phi2, a2)
    };
    let (phi, a) = level(&s.phi, &s.a);
    let prev = s.prev.as_ref().map(|p| {
        let (phi_prev, a_prev) = level(&p.phi, &p.a);
        PrevLevel {
            phi: phi_prev,
            a: a_prev,
        }
    });
    Ok(PotentialState { phi, a, prev })
}

/// Narrow transform backed by grid-sampled chi fields (one per stored time
/// level). Uses the discrete gradient, and the backward difference of chi
/// for the phi shift; with matching operators the derived E of the state is
/// exactly unchanged.
pub fn apply_narrow_field(
    s: &PotentialState,
    chi_now: &ScalarField2,
    chi_prev: Option<&ScalarField2>,
) -> Result<PotentialState> {
    if chi_now.grid != *s.grid() {
        return Err(Error::GridMismatch);
    }
    let dchi_dt = match (&s.prev, chi_prev) {
        (Some(_), Some(cp)) => {
            let dt = s.dt().unwrap();
            Some(chi_now.add_scaled(cp, -1.0)?.scaled(1.0 / dt))
        }
        (None, _) => None,
        (Some(_), None) => None, // chi constant in time
    };
    let a = s.a.add_scaled(&grad(chi_now), 1.0)?;
    let phi = match &dchi_dt {
        Some(rate) => s.phi.add_scaled(rate, -1.0)?,
        None => s.phi.clone(),
    };
    let prev = match &s.prev {
        None => None,
        Some(p) => {
            let a_prev = p.a.add_scaled(&grad(chi_prev.unwrap_or(chi_now)), 1.0)?;
            let phi_prev = match &dchi_dt {
                Some(rate) => p.phi.add_scaled(rate, -1.0)?,
                None => p.phi.clone(),
            };
            Some(PrevLevel {
                phi: phi_prev,
                a: a_prev,
            })
        }
    };
    Ok(PotentialState { phi, a, prev })
}

/// A Wide-class gauge element: a static curl-free vector C with companion
/// scalar C0. The companion constraint `grad(C0) = dC/dt` reduces to
/// `grad(C0) = 0` for static C, so C0 must be spatially constant.
#[derive(Debug, Clone)]
pub struct WideGaugeElement {
    pub c: VectorField2,
    pub c0: ScalarField2,
}

impl WideGaugeElement {
    /// Measured constraint residuals `(curl, companion)` on the probe mask.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let mask = self.c.grid.probe_mask();
        let curl = curl_z(&self.c).max_abs_masked(&mask);
        let comp = grad(&self.c0).max_abs_masked(&mask);
        (curl, comp)
    }
}

/// Wide-class transform `phi -> phi - C0`, `A -> A + C` after verifying the
/// element's constraints against `tol`; violation is rejected with the
/// measured residuals.
pub fn apply_wide(s: &PotentialState, g: &WideGaugeElement, tol: f64) -> Result<PotentialState> {
    if g.c.grid != *s.grid() {
        return Err(Error::GridMismatch);
    }
    let (curl_residual, companion_residual) = g.constraint_residuals();
    if curl_residual > tol || companion_residual > tol {
        return Err(Error::WideConstraint {
            curl_residual,
            companion_residual,
            tolerance: tol,
        });
    }
    let phi = s.phi.add_scaled(&g.c0, -1.0)?;
    let a = s.a.add_scaled(&g.c, 1.0)?;
    let prev = match &s.prev {
        None => None,
        Some(p) => Some(PrevLevel {
            phi: p.phi.add_scaled(&g.c0, -1.0)?,
            a: p.a.add_scaled(&g.c, 1.0)?,
        }),
    };
    Ok(PotentialState { phi, a, prev })
}

/// Pointwise Lorenz-condition residual `div A + (1/c^2) d(phi)/dt`,
/// centered at the half step for two-level states.
pub fn lorenz_residual(s: &PotentialState, c: f64) -> Result<ScalarField2> {
    match &s.prev {
        None => Ok(div(&s.a)),
        Some(p) => {
            let dt = s.dt().unwrap();
            if !(dt > 0.0) {
                return Err(Error::TimeMismatch {
                    detail: format!("non-positive dt = {dt}"),
                });
            }
            let a_mid = s.a.add_scaled(&p.a, 1.0)?;
            let mut out = div(&a_mid);
            let c2 = c * c;
            for (k, v) in out.values.iter_mut().enumerate() {
                *v = 0.5 * *v + (s.phi.values[k] - p.phi.values[k]) / (dt * c2);
            }
            out.time = s.time() - 0.5 * dt;
            Ok(out)
        }
    }
}

/// Residual Lorenz-gauge freedom: a plane-wave chi on the light cone,
/// `omega = c |k|` enforced, so it preserves the Lorenz condition.
pub fn residual_lorenz_chi(k: [f64; 2], amplitude: f64, phase: f64, c: f64) -> Result<GaugeChi> {
    GaugeChi::plane_wave(k, amplitude, phase, c)
}

/// Coulomb projection result.
#[derive(Debug, Clone)]
pub struct CoulombProjection {
    /// The projected state, `apply_narrow_field(s, chi)`.
    pub state: PotentialState,
    /// The gauge field solving `div(grad(chi)) = -div(A)` at the current level.
    pub chi: ScalarField2,
    /// Solver stats of the current-level solve.
    pub stats: CgStats,
}

/// Project a state onto the Coulomb condition `div A = 0` by solving the
/// composed-operator Poisson problem with homogeneous Dirichlet data.
///
/// The divergence of the projected A drops to solver tolerance on the probe
/// mask; outside it (boundary skirt) the projection is limited by domain
/// truncation, which is reported by the caller's diagnostics rather than
/// hidden here.
pub fn coulomb_project(s: &PotentialState) -> Result<CoulombProjection> {
    coulomb_project_with(s, DEFAULT_CG_TOL, DEFAULT_CG_MAX_ITER)
}

pub fn coulomb_project_with(
    s: &PotentialState,
    rel_tol: f64,
    max_iter: usize,
) -> Result<CoulombProjection> {
    let grid = s.grid().clone();
    let rhs_now: Vec<f64> = div(&s.a).values.iter().map(|v| -v).collect();
    let (chi_now, stats) = solve_poisson_wide(&grid, &rhs_now, rel_tol, max_iter)?;
    let chi_now = ScalarField2::new(grid.clone(), chi_now, s.time())?;
    let chi_prev = match &s.prev {
        None => None,
        Some(p) => {
            let rhs_prev: Vec<f64> = div(&p.a).values.iter().map(|v| -v).collect();
            let (chi_prev, _) = solve_poisson_wide(&grid, &rhs_prev, rel_tol, max_iter)?;
            Some(ScalarField2::new(grid.clone(), chi_prev, p.a.time)?)
        }
    };
    let state = apply_narrow_field(s, &chi_now, chi_prev.as_ref())?;
    Ok(CoulombProjection {
        state,
        chi: chi_now,
        stats,
    })
}

/// Labels of the equivalence spectrum, widest separation last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquivalenceLabel {
    #[serde(rename = "IDENTICAL")]
    Identical,
    #[serde(rename = "NARROW_EQUIVALENT")]
    NarrowEquivalent,
    #[serde(rename = "WIDE_ONLY")]
    WideOnly,
    #[serde(rename = "INEQUIVALENT")]
    Inequivalent,
}

/// One loop's contribution to a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct LoopIntegralEntry {
    pub id: String,
    pub winding: i32,
    pub value: f64,
}

/// Outcome of `classify_equivalence`, a deterministic function of the
/// measured residuals and the tolerances in effect.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceVerdict {
    pub label: EquivalenceLabel,
    pub curl_residual: f64,
    pub loop_integrals: Vec<LoopIntegralEntry>,
    pub lorenz_residuals: [f64; 2],
}

/// A loop with a stable identifier for reports.
#[derive(Debug, Clone)]
pub struct NamedLoop {
    pub id: String,
    pub path: LoopPath,
}

/// Knobs for `classify_equivalence`. `None` tolerances use the default
/// `max(1e-6, 10 h^2 ||A||_inf)`, tied to the discretization order so
/// verdicts stay grid-robust.
pub struct ClassifyOptions<'a> {
    pub c: f64,
    pub identical_tol: Option<f64>,
    pub curl_tol: Option<f64>,
    pub loop_tol: Option<f64>,
    /// Closed form of `A2 - A1` when known; loop integrals then use the
    /// adaptive quadrature on it instead of bilinear grid interpolation.
    pub analytic_diff: Option<&'a dyn Fn([f64; 2]) -> [f64; 2]>,
}

impl Default for ClassifyOptions<'_> {
    fn default() -> Self {
        Self {
            c: 1.0,
            identical_tol: None,
            curl_tol: None,
            loop_tol: None,
            analytic_diff: None,
        }
    }
}

fn default_tol(h: f64, a_scale: f64) -> f64 {
    (10.0 * h * h * a_scale).max(1e-6)
}

/// Decide how two potential configurations are related.
///
/// With `D = A2 - A1`:
/// * IDENTICAL: `max|D|` and `max|phi2 - phi1 - const|` below tolerance
///   (a global additive constant on phi is unobservable);
/// * NARROW_EQUIVALENT: `curl D ~ 0` and every loop integral of D vanishes,
///   so D is a global single-valued gradient;
/// * WIDE_ONLY: `curl D ~ 0` but some generator loop carries flux — the
///   configurations differ by a Wide move the Narrow class cannot express;
/// * INEQUIVALENT: the curl residual itself is nonzero (different fields).
///
/// When the grid carries an excluded disk, at least one supplied loop must
/// actually wind around it, otherwise the classification would be blind to
/// the puncture and unsound.
pub fn classify_equivalence(
    s1: &PotentialState,
    s2: &PotentialState,
    loops: &[NamedLoop],
    opts: &ClassifyOptions,
) -> Result<EquivalenceVerdict> {
    if s1.grid() != s2.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = s1.grid().clone();
    let mask = grid.probe_mask();
    if let Some(disk) = &grid.excluded {
        let has_generator = loops
            .iter()
            .any(|l| matches!(l.path.winding_number([disk.cx, disk.cy]), Ok(w) if w != 0));
        if !has_generator {
            return Err(Error::MissingGeneratorLoop);
        }
    }

    let diff = s2.a.add_scaled(&s1.a, -1.0)?;
    let h = grid.spacing_max();
    let a_scale = s1.a.max_abs_masked(&mask).max(s2.a.max_abs_masked(&mask));
    let identical_tol = opts.identical_tol.unwrap_or_else(|| default_tol(h, a_scale));
    let curl_tol = opts.curl_tol.unwrap_or_else(|| default_tol(h, a_scale));
    let loop_tol = opts.loop_tol.unwrap_or_else(|| default_tol(h, a_scale));

    let curl_residual = curl_z(&diff).max_abs_masked(&mask);
    let disk_center = grid.excluded.as_ref().map(|d| [d.cx, d.cy]);
    let mut loop_integrals = Vec::with_capacity(loops.len());
    for l in loops {
        let winding = disk_center
            .map(|c| l.path.winding_number(c))
            .transpose()?
            .unwrap_or(0);
        let value = match opts.analytic_diff {
            Some(f) => {
                let src = |p: [f64; 2]| f(p);
                line_integral_a(&src, l.path.as_open())?
            }
            None => line_integral_a(&diff, l.path.as_open())?,
        };
        loop_integrals.push(LoopIntegralEntry {
            id: l.id.clone(),
            winding,
            value,
        });
    }

    let lorenz_residuals = [
        lorenz_residual(s1, opts.c)?.max_abs_masked(&mask),
        lorenz_residual(s2, opts.c)?.max_abs_masked(&mask),
    ];

    // phi comparison allows a global additive constant
    let phi_diff = s2.phi.add_scaled(&s1.phi, -1.0)?;
    let phi_offset = phi_diff.mean_masked(&mask);
    let phi_dev = phi_diff
        .values
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(v, _)| (v - phi_offset).abs())
        .fold(0.0, f64::max);

    let max_d = diff.max_abs_masked(&mask);
    let label = if max_d <= identical_tol && phi_dev <= identical_tol {
        EquivalenceLabel::Identical
    } else if curl_residual <= curl_tol {
        if loop_integrals.iter().all(|e| e.value.abs() <= loop_tol) {
            EquivalenceLabel::NarrowEquivalent
        } else {
            EquivalenceLabel::WideOnly
        }
    } else {
        EquivalenceLabel::Inequivalent
    };

    Ok(EquivalenceVerdict {
        label,
        curl_residual,
        loop_integrals,
        lorenz_residuals,
    })
}
