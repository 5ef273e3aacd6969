//! gaugelab: a numerical electrodynamics workbench for gauge equivalence
//! classes on multiply-connected 2D domains.
//!
//! The crate computes Aharonov-Bohm phases, holonomies and fringe shifts
//! around a flux-carrying solenoid, applies and classifies gauge
//! transformations (narrow scalar-function moves vs the wider curl-free
//! vector moves), projects potentials onto the Coulomb condition, and runs
//! time-domain simulations showing that Lorenz-gauge potentials propagate
//! at finite speed while their Coulomb-gauge representatives respond
//! instantaneously.
//!
//! Units are dimensionless desk-scale: the wave speed `c` and the coupling
//! `kappa = q/hbar` are explicit parameters, both defaulting to 1.

pub mod analytic;
pub mod csvio;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod gauge;
pub mod grid;
pub mod interferometry;
pub mod ops;
pub mod parallel;
pub mod path;
pub mod propagation;
pub mod quad;

pub use analytic::{GaugeChi, PolyTerm, Ramp, SolenoidSpec};
pub use elliptic::CgStats;
pub use error::{Error, Result};
pub use gauge::{
    apply_narrow, apply_narrow_field, apply_wide, classify_equivalence, coulomb_project,
    lorenz_residual, residual_lorenz_chi, ClassifyOptions, CoulombProjection, EquivalenceLabel,
    EquivalenceVerdict, LoopIntegralEntry, NamedLoop, WideGaugeElement,
};
pub use interferometry::{
    dirac_phase, flux_via_stokes, fringe_shift, holonomy, interference_pattern, line_integral_a,
    loop_integral_a, loop_phase_diff, winding_number, FiniteSolenoidSource, InterferometerSpec,
    PhaseResult, ThinSolenoidSource, VectorSource,
};
pub use field::{PotentialState, PrevLevel, ScalarField2, VectorField2};
pub use grid::{masked_max_abs, Disk, Grid2};
pub use ops::{curl_z, derive_fields, div, field_energy, grad, maxwell_residuals, FieldFrame,
    MaxwellResiduals};
pub use path::{random_polyline_loop, LoopPath, OpenPath};
pub use propagation::{
    coulomb_companion, signal_locality_report, switch_on_scenario, wave_residual, ArrivalFlag,
    ArrivalRecord, ArrivalReport, Boundary, CompanionFrame, FdtdConfig, FdtdState, FieldChannel,
    Frame, GaugeLabel, ProbeChannel, SwitchOnConfig, SwitchOnRun,
};
