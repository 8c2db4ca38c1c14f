//! Explicit solver for the rescaled 3D elastodynamics of a thin periodic slab.

pub mod diagnostics;
pub mod grid;
pub mod integrator;
pub mod mechanics;
pub mod state;

pub use diagnostics::{
    averages, bending_moment_error, cell_gradient, membrane_moment_error, rigidity_diagnostics, stress_moments,
    verify_scaling, Averages, Rigidity, ScalingPoint, StressMoments,
};
pub use grid::Grid3;
pub use integrator::{
    gradient_deviation, run_slab, slab_energy, slab_step, stable_dt, SlabEnergy, SlabIntegrator, SlabRun,
    SlabRunOptions, SlabSample, DEFAULT_C_SAFE,
};
pub use mechanics::{cell_gradients, elastic_energy, internal_force, scaled_gradient};
pub use state::{build_initial_data, from_limit_fields, kirchhoff_gradient, InitialDataSpec, LimitFields, SlabState, Vec3};
