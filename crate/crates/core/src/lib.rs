//! Simulation and analysis of a three-species predator-prey system with
//! prey-taxis and alarm-taxis on rectangular Neumann domains.
//!
//! ```text
//! u_t = d1 Δu + μ1 u(1-u) - b1 uv - b3 uw/(u+w)
//! v_t = d2 Δv - ∇·(ξ v ∇u) + μ2 v(1-v) + uv - b2 vw
//! w_t = d3 Δw - ∇·(χ w ∇(uv)) + μ3 w(1-w) + vw + c3 uw/(u+w)
//! ```

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod initial;
pub mod model;
pub mod stability;
pub mod steady_states;
pub mod stepper;

pub use diagnostics::{
    check_bounds, dissipation, fit_decay_rate, lyapunov_energy, lyapunov_entropy, BoundReport,
    BoundsConfig, DecayFit, DiagnosticsRecord, Flag,
};
pub use error::{Error, Result};
pub use grid::{Domain, FaceVelocity, Field, Gradient, Norms};
pub use initial::InitialCondition;
pub use model::{ModelParams, Triple};
pub use stability::{region_scan, stability_report, RegionScan, StabilityReport};
pub use steady_states::{catalog, SteadySelector, SteadyState};
pub use stepper::{run, stable_dt, step, RunOptions, SimState, StepControl, Stepper, Trajectory};
