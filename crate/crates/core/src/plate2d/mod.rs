//! Finite-difference solvers for the dynamic von Karman and linear plate equations.

pub mod bending;
pub mod grid;
pub mod membrane;
pub mod run;
mod stepper;
pub mod weak;

pub use bending::{BendingOperator, Curvatures};
pub use grid::{Boundary, Grid2};
pub use membrane::MembraneSolver;
pub use stepper::{linear_step, plate_energy, vk_step, PlateEnergy, PlateSolver, PlateState, Regime, StepReport};
pub use weak::{weak_residual_vk, Bump, BumpFamily, Trajectory, WeakResidual};
pub use run::{choose_step, write_series, ExactMode, PlateRun, PlateRunOptions, PlateSample, StepChoice};
