//! Time-domain solver for the Lorenz-gauge potential wave equations with a
//! switched-on solenoid source, Coulomb-gauge companion series, and
//! signal-locality diagnostics.
//!
//! The stepper is a plain three-level leapfrog on the collocated grid with
//! the compact 5-point Laplacian and a quadratic friction sponge. The ring
//! current drives the vector potential; its amplitude is calibrated once
//! per grid by a static solve so the steady exterior loop integral equals
//! the requested flux. Statics pass through the sponge untouched, so the
//! late-time state is the static solenoid potential.

use crate::analytic::SolenoidSpec;
use crate::elliptic::{solve_poisson_compact, CgStats};
use crate::error::{Error, Result};
use crate::field::{PotentialState, ScalarField2, VectorField2};
use crate::gauge::{coulomb_project_with, CoulombProjection};
use crate::grid::Grid2;
use crate::interferometry::line_integral_a;
use crate::ops::laplacian5_into;
use crate::parallel::{for_row_slabs, thread_count};
use crate::path::LoopPath;
use serde::Serialize;

/// Default CFL bound `c dt sqrt(1/dx^2 + 1/dy^2) <= CFL_MAX`.
pub const CFL_MAX_DEFAULT: f64 = 0.5;

/// Outer boundary treatment of the stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Homogeneous Dirichlet ring behind a friction sponge of `cells` width
    /// and quadratic profile scaled by `strength`.
    Sponge { cells: usize, strength: f64 },
    /// Wrap-around domain, for convergence oracles.
    Periodic,
}

/// Configuration of the wave stepper.
#[derive(Debug, Clone)]
pub struct FdtdConfig {
    pub grid: Grid2,
    pub c: f64,
    pub dt: f64,
    pub cfl_max: f64,
    pub boundary: Boundary,
    /// Ring-current source; `None` evolves source-free initial data.
    pub source: Option<SolenoidSpec>,
    /// Radial Gaussian sigma of the ring; 0 selects the default `dx`.
    pub source_width: f64,
}

impl FdtdConfig {
    pub fn new(grid: Grid2, c: f64, dt: f64) -> Self {
        Self {
            grid,
            c,
            dt,
            cfl_max: CFL_MAX_DEFAULT,
            boundary: Boundary::Periodic,
            source: None,
            source_width: 0.0,
        }
    }

    pub fn cfl_number(&self) -> f64 {
        self.c
            * self.dt
            * (1.0 / (self.grid.dx * self.grid.dx) + 1.0 / (self.grid.dy * self.grid.dy)).sqrt()
    }
}

/// Leapfrog state: current and previous levels of phi and both components
/// of A, plus the calibrated source.
pub struct FdtdState {
    cfg: FdtdConfig,
    pub step: usize,
    phi: Vec<f64>,
    phi_prev: Vec<f64>,
    ax: Vec<f64>,
    ax_prev: Vec<f64>,
    ay: Vec<f64>,
    ay_prev: Vec<f64>,
    /// azimuthal ring forcing shape per component (unit amplitude)
    fx: Vec<f64>,
    fy: Vec<f64>,
    /// calibrated source amplitude
    pub source_amplitude: f64,
    /// per-cell sponge damping sigma
    sponge: Vec<f64>,
    scratch: Vec<f64>,
    threads: usize,
}

impl FdtdState {
    /// Build a quiescent state; rejects CFL violations at construction.
    pub fn new(cfg: FdtdConfig) -> Result<Self> {
        let cfl = cfg.cfl_number();
        if cfl > cfg.cfl_max {
            return Err(Error::CflViolation {
                value: cfl,
                limit: cfg.cfl_max,
            });
        }
        let n = cfg.grid.len();
        let (fx, fy) = match &cfg.source {
            Some(s) => ring_current_shape(&cfg.grid, s, source_sigma(&cfg)),
            None => (vec![0.0; n], vec![0.0; n]),
        };
        let sponge = match cfg.boundary {
            Boundary::Sponge { cells, strength } => sponge_profile(&cfg.grid, cells, strength),
            Boundary::Periodic => vec![0.0; n],
        };
        let mut state = Self {
            step: 0,
            phi: vec![0.0; n],
            phi_prev: vec![0.0; n],
            ax: vec![0.0; n],
            ax_prev: vec![0.0; n],
            ay: vec![0.0; n],
            ay_prev: vec![0.0; n],
            fx,
            fy,
            source_amplitude: 0.0,
            sponge,
            scratch: vec![0.0; n],
            threads: thread_count(),
            cfg,
        };
        if state.cfg.source.is_some() {
            state.source_amplitude = state.calibrate_source()?;
        }
        Ok(state)
    }

    pub fn config(&self) -> &FdtdConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.cfg.dt
    }

    /// Load initial data: `u(x, 0)` and `u(x, -dt)` per channel.
    pub fn set_initial(
        &mut self,
        phi: impl Fn(f64, f64, f64) -> f64,
        a: impl Fn(f64, f64, f64) -> [f64; 2],
    ) {
        let g = self.cfg.grid.clone();
        let dt = self.cfg.dt;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.idx(i, j);
                let [x, y] = g.pos(i, j);
                self.phi[k] = phi(x, y, 0.0);
                self.phi_prev[k] = phi(x, y, -dt);
                let a0 = a(x, y, 0.0);
                let am = a(x, y, -dt);
                self.ax[k] = a0[0];
                self.ax_prev[k] = am[0];
                self.ay[k] = a0[1];
                self.ay_prev[k] = am[1];
            }
        }
    }

    /// Static solve of the unit-amplitude ring: the steady state satisfies
    /// `c^2 lap(A) = -F`, and the calibration constant maps its exterior
    /// loop integral onto the requested flux.
    fn calibrate_source(&mut self) -> Result<f64> {
        let g = &self.cfg.grid;
        let c2 = self.cfg.c * self.cfg.c;
        let source = self.cfg.source.as_ref().unwrap();
        let rhs_x: Vec<f64> = self.fx.iter().map(|v| -v / c2).collect();
        let rhs_y: Vec<f64> = self.fy.iter().map(|v| -v / c2).collect();
        let (ax, _) = solve_poisson_compact(g, &rhs_x, 1e-10, 40_000)?;
        let (ay, _) = solve_poisson_compact(g, &rhs_y, 1e-10, 40_000)?;
        let a = VectorField2::new(g.clone(), ax, ay, 0.0)?;
        let r_cal = calibration_radius(g, source, &self.cfg.boundary);
        let loop_path = LoopPath::circle(source.center, r_cal, 256, 1)
            .expect("calibration loop is closed by construction");
        let unit_integral = line_integral_a(&a, loop_path.as_open())?;
        if unit_integral.abs() < 1e-300 {
            return Err(Error::Invalid(
                "source calibration failed: unit loop integral vanished".into(),
            ));
        }
        Ok(source.flux / unit_integral)
    }

    /// One leapfrog step of all three channels.
    pub fn step(&mut self) {
        let t = self.time();
        let ramp = self
            .cfg
            .source
            .as_ref()
            .map(|s| s.ramp.value(t))
            .unwrap_or(0.0)
            * self.source_amplitude;
        let periodic = matches!(self.cfg.boundary, Boundary::Periodic);
        let g = &self.cfg.grid;
        let dt = self.cfg.dt;
        let c2dt2 = (self.cfg.c * dt) * (self.cfg.c * dt);
        let dt2 = dt * dt;

        for (now, prev, force) in [
            (&mut self.phi, &mut self.phi_prev, None),
            (&mut self.ax, &mut self.ax_prev, Some(&self.fx)),
            (&mut self.ay, &mut self.ay_prev, Some(&self.fy)),
        ] {
            let out = &mut self.scratch;
            leapfrog_channel(
                g,
                now,
                prev,
                force.map(|f| f.as_slice()),
                ramp,
                &self.sponge,
                c2dt2,
                dt2,
                dt,
                periodic,
                self.threads,
                out,
            );
            std::mem::swap(prev, now);
            std::mem::swap(now, out);
        }
        self.step += 1;
    }

    /// Snapshot as a two-level potential state (current and previous level).
    pub fn potential_state(&self) -> PotentialState {
        let g = self.cfg.grid.clone();
        let t = self.time();
        let dt = self.cfg.dt;
        PotentialState::with_history(
            ScalarField2::new(g.clone(), self.phi.clone(), t).unwrap(),
            VectorField2::new(g.clone(), self.ax.clone(), self.ay.clone(), t).unwrap(),
            ScalarField2::new(g.clone(), self.phi_prev.clone(), t - dt).unwrap(),
            VectorField2::new(g, self.ax_prev.clone(), self.ay_prev.clone(), t - dt).unwrap(),
        )
        .expect("leapfrog levels are consistent")
    }

    /// Bilinear sample of the current A at a point.
    pub fn sample_a(&self, p: [f64; 2]) -> [f64; 2] {
        bilinear2(&self.cfg.grid, &self.ax, &self.ay, p)
    }

    /// Local sample of the derived E at a point (backward dA/dt plus the
    /// interpolated gradient of the two-level phi average).
    pub fn sample_e(&self, p: [f64; 2]) -> [f64; 2] {
        let g = &self.cfg.grid;
        let dt = self.cfg.dt;
        let a_now = bilinear2(g, &self.ax, &self.ay, p);
        let a_prev = bilinear2(g, &self.ax_prev, &self.ay_prev, p);
        let phi_mid = |q: [f64; 2]| {
            0.5 * (bilinear1(g, &self.phi, q) + bilinear1(g, &self.phi_prev, q))
        };
        let hx = g.dx;
        let hy = g.dy;
        let gpx = (phi_mid([p[0] + hx, p[1]]) - phi_mid([p[0] - hx, p[1]])) / (2.0 * hx);
        let gpy = (phi_mid([p[0], p[1] + hy]) - phi_mid([p[0], p[1] - hy])) / (2.0 * hy);
        [
            -gpx - (a_now[0] - a_prev[0]) / dt,
            -gpy - (a_now[1] - a_prev[1]) / dt,
        ]
    }
}

fn source_sigma(cfg: &FdtdConfig) -> f64 {
    if cfg.source_width > 0.0 {
        cfg.source_width
    } else {
        cfg.grid.dx
    }
}

/// Azimuthal Gaussian ring of unit amplitude at the solenoid radius.
fn ring_current_shape(grid: &Grid2, s: &SolenoidSpec, sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let mut fx = vec![0.0; n];
    let mut fy = vec![0.0; n];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = grid.idx(i, j);
            let dx = grid.x(i) - s.center[0];
            let dy = grid.y(j) - s.center[1];
            let r = (dx * dx + dy * dy).sqrt();
            if r < 1e-12 {
                continue;
            }
            let shell = (-0.5 * ((r - s.radius) / sigma).powi(2)).exp();
            fx[k] = -shell * dy / r;
            fy[k] = shell * dx / r;
        }
    }
    (fx, fy)
}

/// Quadratic sponge: zero in the interior, `strength * (depth/width)^2`
/// inside the layer.
fn sponge_profile(grid: &Grid2, cells: usize, strength: f64) -> Vec<f64> {
    let mut s = vec![0.0; grid.len()];
    if cells == 0 {
        return s;
    }
    let w = cells as f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let di = i.min(grid.nx - 1 - i) as f64;
            let dj = j.min(grid.ny - 1 - j) as f64;
            let d = di.min(dj);
            if d < w {
                let depth = (w - d) / w;
                s[grid.idx(i, j)] = strength * depth * depth;
            }
        }
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn leapfrog_channel(
    grid: &Grid2,
    now: &[f64],
    prev: &[f64],
    force: Option<&[f64]>,
    force_scale: f64,
    sponge: &[f64],
    c2dt2: f64,
    dt2: f64,
    dt: f64,
    periodic: bool,
    threads: usize,
    out: &mut [f64],
) {
    let nx = grid.nx;
    let ny = grid.ny;
    let idx2 = 1.0 / (grid.dx * grid.dx);
    let idy2 = 1.0 / (grid.dy * grid.dy);
    for_row_slabs(out, nx, ny, threads, |j0, nrows, slab| {
        for jj in 0..nrows {
            let j = j0 + jj;
            let boundary_row = j == 0 || j == ny - 1;
            for i in 0..nx {
                let k = j * nx + i;
                let o = jj * nx + i;
                if !periodic && (boundary_row || i == 0 || i == nx - 1) {
                    slab[o] = 0.0;
                    continue;
                }
                let (il, ir) = if periodic {
                    (j * nx + (i + nx - 1) % nx, j * nx + (i + 1) % nx)
                } else {
                    (k - 1, k + 1)
                };
                let (jd, ju) = if periodic {
                    (((j + ny - 1) % ny) * nx + i, ((j + 1) % ny) * nx + i)
                } else {
                    (k - nx, k + nx)
                };
                let lap = (now[il] - 2.0 * now[k] + now[ir]) * idx2
                    + (now[jd] - 2.0 * now[k] + now[ju]) * idy2;
                let f = force.map(|f| f[k] * force_scale).unwrap_or(0.0);
                let sig = sponge[k];
                let half = 0.5 * sig * dt;
                slab[o] = (2.0 * now[k] - (1.0 - half) * prev[k]
                    + c2dt2 * lap
                    + dt2 * f)
                    / (1.0 + half);
            }
        }
    });
}

fn bilinear1(grid: &Grid2, v: &[f64], p: [f64; 2]) -> f64 {
    let fx = ((p[0] - grid.x0) / grid.dx).clamp(0.0, (grid.nx - 2) as f64);
    let fy = ((p[1] - grid.y0) / grid.dy).clamp(0.0, (grid.ny - 2) as f64);
    let i = fx.floor() as usize;
    let j = fy.floor() as usize;
    let tx = fx - i as f64;
    let ty = fy - j as f64;
    let k = j * grid.nx + i;
    v[k] * (1.0 - tx) * (1.0 - ty)
        + v[k + 1] * tx * (1.0 - ty)
        + v[k + grid.nx] * (1.0 - tx) * ty
        + v[k + grid.nx + 1] * tx * ty
}

fn bilinear2(grid: &Grid2, vx: &[f64], vy: &[f64], p: [f64; 2]) -> [f64; 2] {
    [bilinear1(grid, vx, p), bilinear1(grid, vy, p)]
}

fn calibration_radius(grid: &Grid2, s: &SolenoidSpec, boundary: &Boundary) -> f64 {
    let sponge_w = match boundary {
        Boundary::Sponge { cells, .. } => *cells as f64 * grid.spacing_max(),
        Boundary::Periodic => 0.0,
    };
    let d_edge = (s.center[0] - grid.x0)
        .min(grid.xmax() - s.center[0])
        .min(s.center[1] - grid.y0)
        .min(grid.ymax() - s.center[1])
        - sponge_w;
    0.5 * (s.radius + d_edge)
}

/// Switch-on scenario configuration.
#[derive(Debug, Clone)]
pub struct SwitchOnConfig {
    pub grid: Grid2,
    pub c: f64,
    pub dt: f64,
    pub cfl_max: f64,
    pub source: SolenoidSpec,
    pub source_width: f64,
    pub sponge_cells: usize,
    pub sponge_strength: f64,
    pub t_end: f64,
    /// Steps between stored full-field frames.
    pub frame_interval: usize,
    pub probe_radii: Vec<f64>,
    /// Angular samples per probe ring.
    pub probe_angles: usize,
    /// Keep stepping after the front reaches the sponge (for steady-state
    /// checks); the contact is recorded either way.
    pub allow_sponge_contact: bool,
}

impl SwitchOnConfig {
    pub fn new(grid: Grid2, c: f64, dt: f64, source: SolenoidSpec, t_end: f64) -> Self {
        Self {
            grid,
            c,
            dt,
            cfl_max: CFL_MAX_DEFAULT,
            source,
            source_width: 0.0,
            sponge_cells: 16,
            sponge_strength: 6.0,
            t_end,
            frame_interval: 16,
            probe_radii: Vec::new(),
            probe_angles: 16,
            allow_sponge_contact: false,
        }
    }

    /// Distance from the source center to the inner sponge edge.
    pub fn sponge_clearance(&self) -> f64 {
        let g = &self.grid;
        let s = &self.source;
        (s.center[0] - g.x0)
            .min(g.xmax() - s.center[0])
            .min(s.center[1] - g.y0)
            .min(g.ymax() - s.center[1])
            - self.sponge_cells as f64 * g.spacing_max()
    }

    /// Radius of the loop the source amplitude is calibrated on. Loop
    /// integrals of the steady state recover the flux exactly there; at
    /// other radii they differ by the domain-truncation distortion.
    pub fn calibration_radius(&self) -> f64 {
        0.5 * (self.source.radius + self.sponge_clearance())
    }
}

/// One stored frame of the run.
#[derive(Debug, Clone)]
pub struct Frame {
    pub step: usize,
    pub state: PotentialState,
}

/// Fine-grained probe samples recorded every step.
#[derive(Debug, Clone)]
pub struct ProbeLog {
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
    /// `[sample][radius]` max |A| over the probe ring.
    pub a_mag: Vec<Vec<f64>>,
    /// `[sample][radius]` max |E| over the probe ring.
    pub e_mag: Vec<Vec<f64>>,
}

/// Record of the wavefront reaching the damping layer.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpongeContact {
    pub step: usize,
    pub time: f64,
}

/// Output of a switch-on run.
pub struct SwitchOnRun {
    pub config: SwitchOnConfig,
    pub frames: Vec<Frame>,
    pub probes: ProbeLog,
    pub sponge_contact: Option<SpongeContact>,
    /// True when the run stopped early because the front reached the sponge
    /// and `allow_sponge_contact` was off.
    pub truncated: bool,
    pub source_amplitude: f64,
}

impl SwitchOnRun {
    /// Mask of vacuum cells: probe mask minus the source shell and sponge.
    pub fn vacuum_mask(&self) -> Vec<bool> {
        let g = &self.config.grid;
        let mut mask = g.probe_mask();
        let s = &self.config.source;
        let sig = if self.config.source_width > 0.0 {
            self.config.source_width
        } else {
            g.dx
        };
        let r_excl = s.radius + 5.0 * sig + 2.0 * g.spacing_max();
        let sponge = self.config.sponge_cells;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.idx(i, j);
                if !mask[k] {
                    continue;
                }
                let dx = g.x(i) - s.center[0];
                let dy = g.y(j) - s.center[1];
                if (dx * dx + dy * dy).sqrt() < r_excl {
                    mask[k] = false;
                }
                let di = i.min(g.nx - 1 - i);
                let dj = j.min(g.ny - 1 - j);
                if di.min(dj) < sponge + 2 {
                    mask[k] = false;
                }
            }
        }
        mask
    }
}

/// Run the switch-on scenario: quiescent start, ramped ring current,
/// full frames at the configured cadence plus per-step probe logs.
pub fn switch_on_scenario(cfg: SwitchOnConfig) -> Result<SwitchOnRun> {
    let clearance = cfg.sponge_clearance();
    if !cfg.probe_radii.is_empty() && cfg.sponge_cells < 8 {
        return Err(Error::DampingLayerTooThin {
            got: cfg.sponge_cells,
            need: 8,
        });
    }
    for &r in &cfg.probe_radii {
        if r + 2.0 * cfg.grid.spacing_max() > clearance {
            return Err(Error::ProbeInDampingLayer { radius: r });
        }
    }
    let fdtd_cfg = FdtdConfig {
        grid: cfg.grid.clone(),
        c: cfg.c,
        dt: cfg.dt,
        cfl_max: cfg.cfl_max,
        boundary: Boundary::Sponge {
            cells: cfg.sponge_cells,
            strength: cfg.sponge_strength,
        },
        source: Some(cfg.source),
        source_width: cfg.source_width,
    };
    let mut state = FdtdState::new(fdtd_cfg)?;
    let steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let mut frames = Vec::new();
    let mut probes = ProbeLog {
        radii: cfg.probe_radii.clone(),
        times: Vec::with_capacity(steps),
        a_mag: Vec::with_capacity(steps),
        e_mag: Vec::with_capacity(steps),
    };
    let mut sponge_contact: Option<SpongeContact> = None;
    let mut truncated = false;
    let source_amplitude = state.source_amplitude;

    for step in 0..=steps {
        if step > 0 {
            state.step();
        }
        let t = state.time();
        // probe sampling every step
        if !cfg.probe_radii.is_empty() {
            let mut a_row = Vec::with_capacity(cfg.probe_radii.len());
            let mut e_row = Vec::with_capacity(cfg.probe_radii.len());
            for &r in &cfg.probe_radii {
                let mut a_best = 0.0f64;
                let mut e_best = 0.0f64;
                for q in 0..cfg.probe_angles {
                    let th = 2.0 * std::f64::consts::PI * q as f64 / cfg.probe_angles as f64;
                    let p = [
                        cfg.source.center[0] + r * th.cos(),
                        cfg.source.center[1] + r * th.sin(),
                    ];
                    let a = state.sample_a(p);
                    a_best = a_best.max((a[0] * a[0] + a[1] * a[1]).sqrt());
                    let e = state.sample_e(p);
                    e_best = e_best.max((e[0] * e[0] + e[1] * e[1]).sqrt());
                }
                a_row.push(a_best);
                e_row.push(e_best);
            }
            probes.times.push(t);
            probes.a_mag.push(a_row);
            probes.e_mag.push(e_row);
        }
        // sponge contact bookkeeping
        if sponge_contact.is_none() {
            let front = cfg.source.radius + cfg.c * (t - cfg.source.ramp.t1).max(0.0);
            if front >= clearance {
                sponge_contact = Some(SpongeContact { step, time: t });
                if !cfg.allow_sponge_contact {
                    truncated = true;
                    if step % cfg.frame_interval != 0 {
                        frames.push(Frame {
                            step,
                            state: state.potential_state(),
                        });
                    }
                }
            }
        }
        if step % cfg.frame_interval == 0 || step == steps {
            if frames.last().map(|f| f.step) != Some(step) {
                frames.push(Frame {
                    step,
                    state: state.potential_state(),
                });
            }
        }
        if truncated {
            break;
        }
    }

    Ok(SwitchOnRun {
        config: cfg,
        frames,
        probes,
        sponge_contact,
        truncated,
        source_amplitude,
    })
}

/// Gauge tag of an arrival report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GaugeLabel {
    #[serde(rename = "LORENZ")]
    Lorenz,
    #[serde(rename = "COULOMB")]
    Coulomb,
    #[serde(rename = "FIELDS")]
    Fields,
}

/// Probe channel for arrival detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeChannel {
    /// |A|, normalized by its late-time (steady) amplitude.
    VectorPotential,
    /// |E|, normalized by its peak over the run (E decays to zero at late
    /// times, so the steady value cannot serve as a reference).
    ElectricField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArrivalFlag {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "INSTANTANEOUS")]
    Instantaneous,
    #[serde(rename = "NO_ARRIVAL")]
    NoArrival,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArrivalRecord {
    pub radius: f64,
    pub t_arrival: f64,
    pub flag: ArrivalFlag,
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityEntry {
    pub threshold: f64,
    pub arrivals: Vec<f64>,
}

/// First-arrival report: per-probe times, the fitted front speed from the
/// linear regression of arrival time on radius, and the threshold
/// sensitivity at 0.5x / 1x / 2x the configured threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ArrivalReport {
    pub gauge: GaugeLabel,
    pub threshold: f64,
    pub probes: Vec<ArrivalRecord>,
    pub fitted_speed: Option<f64>,
    pub stderr: Option<f64>,
    pub sensitivity: Vec<SensitivityEntry>,
}

/// Extract first-arrival times from the per-step probe log.
pub fn signal_locality_report(
    run: &SwitchOnRun,
    channel: ProbeChannel,
    threshold: f64,
) -> Result<ArrivalReport> {
    let log = &run.probes;
    if log.times.is_empty() {
        return Err(Error::Invalid("run recorded no probe samples".into()));
    }
    let series = match channel {
        ProbeChannel::VectorPotential => &log.a_mag,
        ProbeChannel::ElectricField => &log.e_mag,
    };
    let ramp_end = run.config.source.ramp.end();
    let mut probes = Vec::with_capacity(log.radii.len());
    let mut regression: Vec<(f64, f64)> = Vec::new();
    for (ri, &radius) in log.radii.iter().enumerate() {
        let record = arrival_for(series, &log.times, ri, channel, threshold, ramp_end, radius)?;
        if record.flag == ArrivalFlag::Ok {
            regression.push((radius, record.t_arrival));
        }
        probes.push(record);
    }
    let (fitted_speed, stderr) = fit_front_speed(&regression);
    let mut sensitivity = Vec::new();
    for factor in [0.5, 1.0, 2.0] {
        let th = threshold * factor;
        let mut arrivals = Vec::with_capacity(log.radii.len());
        for (ri, &radius) in log.radii.iter().enumerate() {
            let rec = arrival_for(series, &log.times, ri, channel, th, ramp_end, radius)?;
            arrivals.push(rec.t_arrival);
        }
        sensitivity.push(SensitivityEntry {
            threshold: th,
            arrivals,
        });
    }
    Ok(ArrivalReport {
        gauge: GaugeLabel::Lorenz,
        threshold,
        probes,
        fitted_speed,
        stderr,
        sensitivity,
    })
}

fn arrival_for(
    series: &[Vec<f64>],
    times: &[f64],
    radius_index: usize,
    channel: ProbeChannel,
    threshold: f64,
    ramp_end: f64,
    radius: f64,
) -> Result<ArrivalRecord> {
    let reference = match channel {
        ProbeChannel::VectorPotential => series.last().unwrap()[radius_index],
        ProbeChannel::ElectricField => series
            .iter()
            .map(|row| row[radius_index])
            .fold(0.0, f64::max),
    };
    if reference <= 0.0 {
        return Err(Error::NoArrival { radius });
    }
    let cut = threshold * reference;
    for (s, row) in series.iter().enumerate() {
        if row[radius_index] > cut {
            let t = times[s];
            let dt_sample = if times.len() > 1 {
                times[1] - times[0]
            } else {
                0.0
            };
            let flag = if t <= ramp_end + dt_sample {
                ArrivalFlag::Instantaneous
            } else {
                ArrivalFlag::Ok
            };
            return Ok(ArrivalRecord {
                radius,
                t_arrival: t,
                flag,
            });
        }
    }
    Err(Error::NoArrival { radius })
}

/// Least-squares fit `t = a + r / v`; returns `(v, stderr_v)`.
fn fit_front_speed(points: &[(f64, f64)]) -> (Option<f64>, Option<f64>) {
    let n = points.len();
    if n < 2 {
        return (None, None);
    }
    let nf = n as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = nf * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (None, None);
    }
    let slope = (nf * sxy - sx * sy) / denom;
    if slope.abs() < 1e-300 {
        return (None, None);
    }
    let intercept = (sy - slope * sx) / nf;
    let speed = 1.0 / slope;
    if n == 2 {
        return (Some(speed), Some(0.0));
    }
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let e = p.1 - intercept - slope * p.0;
            e * e
        })
        .sum();
    let slope_var = ss_res / (nf - 2.0) * nf / denom;
    let slope_err = slope_var.max(0.0).sqrt();
    // error propagation through v = 1/slope
    (Some(speed), Some(slope_err / (slope * slope)))
}

/// One projected frame of the Coulomb companion.
pub struct CompanionFrame {
    pub step: usize,
    pub projection: CoulombProjection,
}

/// Per-frame Coulomb projection of a Lorenz run: the Coulomb-gauge
/// representative of the same physical history.
pub fn coulomb_companion(
    run: &SwitchOnRun,
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<CompanionFrame>> {
    run.frames
        .iter()
        .map(|f| {
            Ok(CompanionFrame {
                step: f.step,
                projection: coulomb_project_with(&f.state, rel_tol, max_iter)?,
            })
        })
        .collect()
}

/// Arrival report for a frame-sampled companion series (the Coulomb
/// representative only exists at frame cadence). The reference amplitude is
/// the late-time |A| per probe; an arrival at or before the first
/// post-ramp frame is flagged INSTANTANEOUS — the elliptic solve responds
/// everywhere at once, so every probe trips together.
pub fn companion_arrival_report(
    run: &SwitchOnRun,
    companion: &[CompanionFrame],
    probe_radii: &[f64],
    threshold: f64,
) -> Result<ArrivalReport> {
    if companion.is_empty() {
        return Err(Error::TooFewFrames { need: 1, got: 0 });
    }
    let dt = run.config.dt;
    let ramp_end = run.config.source.ramp.end();
    let frame_dt = run.config.frame_interval as f64 * dt;
    let center = run.config.source.center;
    let sample = |state: &PotentialState, r: f64| -> f64 {
        let mut best = 0.0f64;
        for q in 0..run.config.probe_angles.max(4) {
            let th = 2.0 * std::f64::consts::PI * q as f64 / run.config.probe_angles.max(4) as f64;
            let p = [center[0] + r * th.cos(), center[1] + r * th.sin()];
            let a = state.a.interp(p);
            best = best.max((a[0] * a[0] + a[1] * a[1]).sqrt());
        }
        best
    };
    let mut probes = Vec::with_capacity(probe_radii.len());
    let mut regression = Vec::new();
    for &radius in probe_radii {
        let reference = sample(&companion.last().unwrap().projection.state, radius);
        if reference <= 0.0 {
            return Err(Error::NoArrival { radius });
        }
        let cut = threshold * reference;
        let mut found = None;
        for f in companion {
            let t = f.projection.state.time();
            if sample(&f.projection.state, radius) > cut {
                found = Some(t);
                break;
            }
        }
        match found {
            None => return Err(Error::NoArrival { radius }),
            Some(t) => {
                let flag = if t <= ramp_end + frame_dt {
                    ArrivalFlag::Instantaneous
                } else {
                    ArrivalFlag::Ok
                };
                if flag == ArrivalFlag::Ok {
                    regression.push((radius, t));
                }
                probes.push(ArrivalRecord {
                    radius,
                    t_arrival: t,
                    flag,
                });
            }
        }
    }
    let (fitted_speed, stderr) = fit_front_speed(&regression);
    Ok(ArrivalReport {
        gauge: GaugeLabel::Coulomb,
        threshold,
        probes,
        fitted_speed,
        stderr,
        sensitivity: Vec::new(),
    })
}

/// Scalar channels a wave residual can be computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldChannel {
    Phi,
    Ax,
    Ay,
    Ex,
    Ey,
}

/// Extract a scalar channel from a sequence of potential states.
pub fn channel_series(states: &[&PotentialState], channel: FieldChannel) -> Result<Vec<ScalarField2>> {
    states
        .iter()
        .map(|s| {
            let g = s.grid().clone();
            let t = s.time();
            Ok(match channel {
                FieldChannel::Phi => s.phi.clone(),
                FieldChannel::Ax => ScalarField2::new(g, s.a.x.clone(), t)?,
                FieldChannel::Ay => ScalarField2::new(g, s.a.y.clone(), t)?,
                FieldChannel::Ex | FieldChannel::Ey => {
                    let (e, _) = crate::ops::derive_fields(s)?;
                    let values = if channel == FieldChannel::Ex { e.x } else { e.y };
                    ScalarField2::new(g, values, e.time)?
                }
            })
        })
        .collect()
}

/// Discrete wave-operator residual `u_tt - c^2 lap(u)` per interior frame,
/// masked max-norm. The frame spacing must be uniform.
pub fn wave_residual(series: &[ScalarField2], c: f64, mask: &[bool]) -> Result<Vec<(f64, f64)>> {
    if series.len() < 3 {
        return Err(Error::TooFewFrames {
            need: 3,
            got: series.len(),
        });
    }
    let grid = series[0].grid.clone();
    let dt = series[1].time - series[0].time;
    for (k, w) in series.windows(2).enumerate() {
        let step = w[1].time - w[0].time;
        if (step - dt).abs() > 1e-9 * dt.abs().max(1e-300) {
            return Err(Error::NonUniformTimes {
                index: k + 1,
                dt: step,
                expected: dt,
            });
        }
    }
    let mut lap = vec![0.0; grid.len()];
    let mut out = Vec::with_capacity(series.len() - 2);
    for k in 1..series.len() - 1 {
        laplacian5_into(&grid, &series[k].values, &mut lap);
        let mut worst = 0.0f64;
        for (idx, &m) in mask.iter().enumerate() {
            if m {
                let utt = (series[k + 1].values[idx] - 2.0 * series[k].values[idx]
                    + series[k - 1].values[idx])
                    / (dt * dt);
                worst = worst.max((utt - c * c * lap[idx]).abs());
            }
        }
        out.push((series[k].time, worst));
    }
    Ok(out)
}

/// Masked max-norm of the composed `div(grad(u))` per frame: the elliptic
/// (Laplace) residual the Coulomb scalar sector is supposed to satisfy.
pub fn laplace_residual_wide(series: &[ScalarField2], mask: &[bool]) -> Vec<(f64, f64)> {
    series
        .iter()
        .map(|u| {
            let lap = crate::ops::div(&crate::ops::grad(u));
            (u.time, lap.max_abs_masked(mask))
        })
        .collect()
}

/// Total derived-field energy of every stored frame.
pub fn energy_history(run: &SwitchOnRun, mask: &[bool]) -> Result<Vec<(f64, f64)>> {
    run.frames
        .iter()
        .map(|f| {
            let (e, bz) = crate::ops::derive_fields(&f.state)?;
            Ok((
                f.state.time(),
                crate::ops::field_energy(&e, &bz, run.config.c, mask),
            ))
        })
        .collect()
}

/// Solver stats echo for reports.
pub fn companion_stats(frames: &[CompanionFrame]) -> Vec<CgStats> {
    frames.iter().map(|f| f.projection.stats).collect()
}
