//! Closed-form initial-data presets. Each preset exposes analytic values of
//! C0 = inf G0/rho0, inf G0 and the data sup norms so that campaign
//! classification never depends on discretization.
//!
//! For uniform-density presets psi*rho0 == M |psi|_1 for every kernel; the
//! vacuum bump preset has the same property when the kernel is constant.
//! Outside those cases no closed form exists and `analytics` returns `None`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::periodic_wrap;

/// Initial data (rho0, u0) on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum DataPreset {
    /// rho0 == mass, u0 == 0. Exact steady state.
    Flat { mass: f64 },
    /// rho0 == mass, u0 = amplitude sin(2 pi mode x).
    SineVelocity {
        mass: f64,
        amplitude: f64,
        mode: u32,
    },
    /// Compactly supported density bump with a velocity field that stretches
    /// it: rho0 = height cos^4(pi x / (2 half_width)) inside |x| <= half_width
    /// and zero outside; u0' equals shear times the bump shape on the bump
    /// and a compensating antipodal well so u0 stays periodic. The only
    /// preset able to realize C0 > |psi|_1 (which requires vacuum).
    BumpWithShear {
        height: f64,
        half_width: f64,
        shear: f64,
        well_half_width: f64,
    },
}

/// Closed-form classification values of a preset/kernel pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PresetAnalytics {
    pub mass: f64,
    pub c0: f64,
    pub inf_g0: f64,
    pub rho0_sup: f64,
    pub g0_sup: f64,
}

/// cos^4(pi s / 2) on |s| <= 1, zero outside.
fn bump_shape(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let c = (0.5 * PI * s).cos();
        let c2 = c * c;
        c2 * c2
    }
}

/// Antiderivative of `bump_shape` from 0, clamped to +-3/8 outside [-1, 1].
fn bump_shape_antideriv(s: f64) -> f64 {
    if s <= -1.0 {
        -0.375
    } else if s >= 1.0 {
        0.375
    } else {
        0.375 * s + (PI * s).sin() / (2.0 * PI) + (2.0 * PI * s).sin() / (16.0 * PI)
    }
}

impl DataPreset {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        match self {
            DataPreset::Flat { mass } => {
                if !(mass > &0.0) || !mass.is_finite() {
                    errs.push(format!("flat preset: mass = {mass} must be > 0"));
                }
            }
            DataPreset::SineVelocity {
                mass,
                amplitude,
                mode,
            } => {
                if !(mass > &0.0) || !mass.is_finite() {
                    errs.push(format!("sine preset: mass = {mass} must be > 0"));
                }
                if !amplitude.is_finite() {
                    errs.push("sine preset: amplitude must be finite".into());
                }
                if *mode == 0 {
                    errs.push("sine preset: mode must be >= 1".into());
                }
            }
            DataPreset::BumpWithShear {
                height,
                half_width,
                shear,
                well_half_width,
            } => {
                if !(height > &0.0) || !height.is_finite() {
                    errs.push(format!("bump preset: height = {height} must be > 0"));
                }
                if !(half_width > &0.0) || !(well_half_width > &0.0) {
                    errs.push("bump preset: widths must be > 0".into());
                }
                if half_width + well_half_width >= 0.5 {
                    errs.push(format!(
                        "bump preset: half_width + well_half_width = {} must stay below 1/2",
                        half_width + well_half_width
                    ));
                }
                if !shear.is_finite() {
                    errs.push("bump preset: shear must be finite".into());
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Total mass, in closed form.
    pub fn mass(&self) -> f64 {
        match self {
            DataPreset::Flat { mass } => *mass,
            DataPreset::SineVelocity { mass, .. } => *mass,
            DataPreset::BumpWithShear {
                height, half_width, ..
            } => 0.75 * height * half_width,
        }
    }

    pub fn rho0_sup(&self) -> f64 {
        match self {
            DataPreset::Flat { mass } | DataPreset::SineVelocity { mass, .. } => *mass,
            DataPreset::BumpWithShear { height, .. } => *height,
        }
    }

    pub fn rho0(&self, x: f64) -> f64 {
        match self {
            DataPreset::Flat { mass } | DataPreset::SineVelocity { mass, .. } => *mass,
            DataPreset::BumpWithShear {
                height, half_width, ..
            } => height * bump_shape(periodic_wrap(x) / half_width),
        }
    }

    pub fn u0(&self, x: f64) -> f64 {
        match self {
            DataPreset::Flat { .. } => 0.0,
            DataPreset::SineVelocity {
                amplitude, mode, ..
            } => amplitude * (2.0 * PI * *mode as f64 * x).sin(),
            DataPreset::BumpWithShear {
                half_width,
                shear,
                well_half_width,
                ..
            } => {
                let (w, w2) = (*half_width, *well_half_width);
                let well_depth = shear * w / w2;
                let xw = periodic_wrap(x);
                let bump_part =
                    shear * w * (bump_shape_antideriv(xw / w) + 0.375);
                // Antiderivative of the antipodal well from -1/2.
                let well_part = if xw <= 0.0 {
                    w2 * bump_shape_antideriv((xw + 0.5) / w2)
                } else {
                    0.75 * w2 + w2 * bump_shape_antideriv((xw - 0.5) / w2)
                };
                bump_part - well_depth * well_part
            }
        }
    }

    /// Closed-form u0'.
    pub fn du0(&self, x: f64) -> f64 {
        match self {
            DataPreset::Flat { .. } => 0.0,
            DataPreset::SineVelocity {
                amplitude, mode, ..
            } => {
                let k = 2.0 * PI * *mode as f64;
                amplitude * k * (k * x).cos()
            }
            DataPreset::BumpWithShear {
                half_width,
                shear,
                well_half_width,
                ..
            } => {
                let xw = periodic_wrap(x);
                let well_depth = shear * half_width / well_half_width;
                shear * bump_shape(xw / half_width)
                    - well_depth * bump_shape(periodic_wrap(xw - 0.5) / well_half_width)
            }
        }
    }

    /// Whether rho0 is constant (making psi*rho0 uniform for every kernel).
    pub fn is_uniform_density(&self) -> bool {
        matches!(
            self,
            DataPreset::Flat { .. } | DataPreset::SineVelocity { .. }
        )
    }

    /// Closed-form classification values, available when psi*rho0 is the
    /// constant M |psi|_1: uniform-density presets under any kernel, the
    /// bump preset only under a constant kernel.
    pub fn analytics(&self, l1: f64, kernel_is_constant: bool) -> Option<PresetAnalytics> {
        let mass = self.mass();
        let conv = mass * l1;
        match self {
            DataPreset::Flat { mass } => Some(PresetAnalytics {
                mass: *mass,
                c0: l1,
                inf_g0: conv,
                rho0_sup: *mass,
                g0_sup: conv,
            }),
            DataPreset::SineVelocity {
                mass,
                amplitude,
                mode,
            } => {
                let peak = 2.0 * PI * *mode as f64 * amplitude.abs();
                Some(PresetAnalytics {
                    mass: *mass,
                    c0: (conv - peak) / mass,
                    inf_g0: conv - peak,
                    rho0_sup: *mass,
                    g0_sup: conv + peak,
                })
            }
            DataPreset::BumpWithShear {
                height,
                half_width,
                shear,
                well_half_width,
            } => {
                if !kernel_is_constant {
                    return None;
                }
                let well_depth = shear * half_width / well_half_width;
                // G0/rho0 = shear/height + conv/(height f) is minimized where
                // the bump shape f peaks.
                let c0 = (shear + conv) / height;
                let candidates = [conv, conv + shear, conv - well_depth];
                let inf_g0 = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
                let g0_sup = candidates
                    .iter()
                    .map(|v| v.abs())
                    .fold(0.0f64, f64::max);
                Some(PresetAnalytics {
                    mass,
                    c0,
                    inf_g0,
                    rho0_sup: *height,
                    g0_sup,
                })
            }
        }
    }

    /// Closed-form G0 = u0' + psi*rho0, under the same conditions as
    /// [`DataPreset::analytics`].
    pub fn g0_fn(
        &self,
        l1: f64,
        kernel_is_constant: bool,
    ) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        if !self.is_uniform_density() && !kernel_is_constant {
            return None;
        }
        let conv = self.mass() * l1;
        let preset = self.clone();
        Some(Box::new(move |x| preset.du0(x) + conv))
    }
}
