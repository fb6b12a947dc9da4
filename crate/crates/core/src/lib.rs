//! Solvers and bound calculators for the 1D pressureless Euler-alignment
//! system on the periodic domain (-1/2, 1/2] with integrable influence
//! kernels, including weakly singular power laws |x|^(-alpha).
//!
//! The crate provides:
//!
//! - [`kernels`]: influence functions, level-set integrals and cell-averaged
//!   convolution weights with exact handling of the integrable singularity;
//! - [`bounds`]: the optimized uniform density bound beta, the G bound gamma
//!   and the regime classification, with closed forms for power-law kernels;
//! - [`eulerian`]: a conservative finite-volume solver for the equivalent
//!   (rho, G) system with velocity recovered from u_x = G - psi*rho;
//! - [`lagrangian`]: a particle integrator for the characteristic ODE system,
//!   used as a cross-validation oracle;
//! - [`harness`]: verification campaigns tying the bounds to the solvers;
//! - [`config`]: the TOML run-configuration schema shared by the CLI.

// Validation guards are written `!(x > 0.0)` so NaN fails closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod eulerian;
pub mod harness;
pub mod kernels;
pub mod lagrangian;
pub mod numerics;
pub mod presets;

pub use bounds::{BoundInputs, BoundReport, Regime};
pub use config::{KernelConfig, RunConfig};
pub use diagnostics::{DiagnosticsRow, Outcome, RunDiagnostics};
pub use error::{Error, Result};
pub use eulerian::{EulerianRun, EulerianState, SimConfig};
pub use kernels::{ConvolutionWeights, Kernel};
pub use lagrangian::{IntegrateOptions, LagrangianRun, ParticleSystem};
pub use presets::DataPreset;
