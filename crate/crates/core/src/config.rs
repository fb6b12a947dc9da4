//! Run-configuration schema. Structured TOML with strict keys: unknown keys
//! are rejected at parse time and semantic validation accumulates every
//! violation instead of stopping at the first.
//!
//! ```toml
//! [kernel]
//! kind = "powerlaw"        # or "constant", "tabulated"
//! alpha = 0.5              # powerlaw only
//! # sup_norm = 1.0         # constant only
//! # table_radii  = [0.01, 0.05, 0.1]   # tabulated only
//! # table_values = [50.0, 5.0, 0.5]
//!
//! [data]
//! preset = "sine"          # "flat", "sine", "bump_shear"
//! mass = 1.0
//! amplitude = 0.1
//! mode = 1
//!
//! [solver]
//! scheme = "eulerian"      # or "lagrangian"
//! grid = 256               # N (grid cells) or n (particles)
//! cfl = 0.4                # eulerian
//! dt = 1e-3                # lagrangian
//! t_end = 10.0
//! order = 1                # 1 or 2 (eulerian)
//! rho_cap = 1e6
//! g_floor = -1e6
//! output_stride = 10
//!
//! [output]
//! diagnostics = "diag.csv"
//! snapshots = "snap.csv"
//! snapshot_times = [0.0, 5.0, 10.0]
//! trajectory = "traj.csv"
//! trajectory_stride = 100
//!
//! [bound]                  # used by the `bound` subcommand
//! mass = 1.0
//! c0 = 1.0
//! rho_sup_norm = 0.0
//! g0_sup_norm = 0.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eulerian::{SchemeOrder, SimConfig};
use crate::kernels::Kernel;
use crate::lagrangian::IntegrateOptions;
use crate::presets::DataPreset;

/// Kernel description block: the serializable face of [`Kernel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kind: KernelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Powerlaw,
    Constant,
    Tabulated,
}

impl KernelConfig {
    pub fn power_law(alpha: f64) -> Self {
        KernelConfig {
            kind: KernelKind::Powerlaw,
            alpha: Some(alpha),
            sup_norm: None,
            table_radii: None,
            table_values: None,
        }
    }

    pub fn constant(value: f64) -> Self {
        KernelConfig {
            kind: KernelKind::Constant,
            alpha: None,
            sup_norm: Some(value),
            table_radii: None,
            table_values: None,
        }
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Self {
        KernelConfig {
            kind: KernelKind::Tabulated,
            alpha: None,
            sup_norm: None,
            table_radii: Some(radii),
            table_values: Some(values),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.kind == KernelKind::Constant
    }

    /// Short label for CSV columns, e.g. `powerlaw(alpha=0.5)`.
    pub fn describe(&self) -> String {
        match self.kind {
            KernelKind::Powerlaw => format!("powerlaw(alpha={})", self.alpha.unwrap_or(f64::NAN)),
            KernelKind::Constant => format!("constant({})", self.sup_norm.unwrap_or(f64::NAN)),
            KernelKind::Tabulated => format!(
                "tabulated({} points)",
                self.table_radii.as_ref().map_or(0, |r| r.len())
            ),
        }
    }

    fn collect_errors(&self, errs: &mut Vec<String>) {
        match self.kind {
            KernelKind::Powerlaw => {
                match self.alpha {
                    Some(a) if a > 0.0 && a < 1.0 && a.is_finite() => {}
                    Some(a) => errs.push(format!(
                        "kernel.alpha = {a} must lie in the open interval (0, 1)"
                    )),
                    None => errs.push("kernel.kind = powerlaw requires kernel.alpha".into()),
                }
                if self.sup_norm.is_some() {
                    errs.push("kernel.sup_norm does not apply to powerlaw kernels".into());
                }
                if self.table_radii.is_some() || self.table_values.is_some() {
                    errs.push("kernel.table_* does not apply to powerlaw kernels".into());
                }
            }
            KernelKind::Constant => {
                match self.sup_norm {
                    Some(v) if v >= 0.0 && v.is_finite() => {}
                    Some(v) => errs.push(format!("kernel.sup_norm = {v} must be >= 0")),
                    None => errs.push("kernel.kind = constant requires kernel.sup_norm".into()),
                }
                if self.alpha.is_some() {
                    errs.push("kernel.alpha does not apply to constant kernels".into());
                }
                if self.table_radii.is_some() || self.table_values.is_some() {
                    errs.push("kernel.table_* does not apply to constant kernels".into());
                }
            }
            KernelKind::Tabulated => {
                match (&self.table_radii, &self.table_values) {
                    (Some(r), Some(v)) => {
                        if let Err(e) = Kernel::tabulated(r.clone(), v.clone()) {
                            errs.push(format!("kernel table invalid: {e}"));
                        }
                    }
                    _ => errs.push(
                        "kernel.kind = tabulated requires kernel.table_radii and kernel.table_values"
                            .into(),
                    ),
                }
                if self.alpha.is_some() || self.sup_norm.is_some() {
                    errs.push("kernel.alpha/sup_norm do not apply to tabulated kernels".into());
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        self.collect_errors(&mut errs);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn to_kernel(&self) -> Result<Kernel> {
        self.validate()?;
        match self.kind {
            KernelKind::Powerlaw => Kernel::power_law(self.alpha.unwrap()),
            KernelKind::Constant => Kernel::constant(self.sup_norm.unwrap()),
            KernelKind::Tabulated => Kernel::tabulated(
                self.table_radii.clone().unwrap(),
                self.table_values.clone().unwrap(),
            ),
        }
    }
}

/// Initial-data block.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub preset: String,
    pub mass: Option<f64>,
    pub amplitude: Option<f64>,
    pub mode: Option<u32>,
    pub height: Option<f64>,
    pub half_width: Option<f64>,
    pub shear: Option<f64>,
    pub well_half_width: Option<f64>,
}

impl DataConfig {
    fn collect_errors(&self, errs: &mut Vec<String>) {
        match self.to_preset() {
            Ok(_) => {}
            Err(Error::Config(inner)) => errs.extend(inner),
            Err(e) => errs.push(e.to_string()),
        }
    }

    pub fn to_preset(&self) -> Result<DataPreset> {
        let preset = match self.preset.as_str() {
            "flat" => DataPreset::Flat {
                mass: self.mass.unwrap_or(1.0),
            },
            "sine" => DataPreset::SineVelocity {
                mass: self.mass.unwrap_or(1.0),
                amplitude: self.amplitude.unwrap_or(0.1),
                mode: self.mode.unwrap_or(1),
            },
            "bump_shear" => DataPreset::BumpWithShear {
                height: self.height.unwrap_or(1.0),
                half_width: self.half_width.unwrap_or(0.1),
                shear: self.shear.unwrap_or(0.2),
                well_half_width: self.well_half_width.unwrap_or(0.35),
            },
            other => {
                return Err(Error::config(format!(
                    "data.preset = \"{other}\" is not one of flat, sine, bump_shear"
                )))
            }
        };
        preset.validate()?;
        Ok(preset)
    }
}

/// Solver block with defaults matching the CLI contract.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub scheme: Option<String>,
    pub grid: Option<usize>,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub order: Option<u8>,
    pub rho_cap: Option<f64>,
    pub g_floor: Option<f64>,
    pub output_stride: Option<usize>,
}

/// Which solver a simulate run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Eulerian,
    Lagrangian,
}

impl SolverConfig {
    pub fn scheme(&self) -> Result<Scheme> {
        match self.scheme.as_deref() {
            None | Some("eulerian") => Ok(Scheme::Eulerian),
            Some("lagrangian") => Ok(Scheme::Lagrangian),
            Some(other) => Err(Error::config(format!(
                "solver.scheme = \"{other}\" is not one of eulerian, lagrangian"
            ))),
        }
    }

    /// Materialize the Eulerian configuration with defaults filled.
    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let config = SimConfig {
            n: self.grid.unwrap_or(256),
            cfl: self.cfl.unwrap_or(0.4),
            t_end: self.t_end.unwrap_or(10.0),
            order: SchemeOrder::from_int(self.order.unwrap_or(1))?,
            rho_cap: self.rho_cap.unwrap_or(1e6),
            g_floor: self.g_floor.unwrap_or(-1e6),
            output_stride: self.output_stride.unwrap_or(10),
        };
        config.validate()?;
        Ok(config)
    }

    /// Materialize the Lagrangian options with defaults filled.
    pub fn to_integrate_options(&self, trajectory_stride: usize) -> Result<IntegrateOptions> {
        let opts = IntegrateOptions {
            dt: self.dt.unwrap_or(1e-3),
            t_end: self.t_end.unwrap_or(10.0),
            rho_cap: self.rho_cap.unwrap_or(1e6),
            output_stride: self.output_stride.unwrap_or(10),
            record_trajectory: false,
            trajectory_stride,
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn particles(&self) -> usize {
        self.grid.unwrap_or(256)
    }

    fn collect_errors(&self, errs: &mut Vec<String>) {
        if let Err(e) = self.scheme() {
            push_config(errs, e);
            return;
        }
        match self.scheme().unwrap() {
            Scheme::Eulerian => {
                if let Err(e) = self.to_sim_config() {
                    push_config(errs, e);
                }
            }
            Scheme::Lagrangian => {
                if self.particles() < 2 {
                    errs.push(format!(
                        "solver.grid = {} must be >= 2 particles",
                        self.particles()
                    ));
                }
                if let Err(e) = self.to_integrate_options(100) {
                    push_config(errs, e);
                }
            }
        }
    }
}

fn push_config(errs: &mut Vec<String>, e: Error) {
    match e {
        Error::Config(inner) => errs.extend(inner),
        other => errs.push(other.to_string()),
    }
}

/// Output block.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub diagnostics: Option<String>,
    pub snapshots: Option<String>,
    pub snapshot_times: Option<Vec<f64>>,
    pub trajectory: Option<String>,
    pub trajectory_stride: Option<usize>,
}

/// Inputs for the `bound` subcommand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub mass: Option<f64>,
    pub c0: Option<f64>,
    pub rho_sup_norm: Option<f64>,
    pub g0_sup_norm: Option<f64>,
}

/// The full run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: KernelConfig,
    pub data: Option<DataConfig>,
    pub solver: Option<SolverConfig>,
    pub output: Option<OutputConfig>,
    pub bound: Option<BoundConfig>,
}

impl RunConfig {
    /// Validate every block, accumulating all violations.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        self.kernel.collect_errors(&mut errs);
        if let Some(data) = &self.data {
            data.collect_errors(&mut errs);
        }
        if let Some(solver) = &self.solver {
            solver.collect_errors(&mut errs);
        }
        if let Some(bound) = &self.bound {
            if let Some(m) = bound.mass {
                if !(m > 0.0) || !m.is_finite() {
                    errs.push(format!("bound.mass = {m} must be > 0"));
                }
            }
            if let Some(c0) = bound.c0 {
                if !(c0 > 0.0) || !c0.is_finite() {
                    errs.push(format!("bound.c0 = {c0} must be > 0"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Parse and fully validate a TOML run configuration.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config_str(&text)
}

/// Parse and validate configuration text.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        toml::from_str(text).map_err(|e| Error::config(format!("config parse error: {e}")))?;
    config.validate()?;
    Ok(config)
}
