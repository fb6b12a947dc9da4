//! Run diagnostics shared by the Eulerian and Lagrangian solvers: sup-norm
//! time series, conservation drift, the ratio monitor and the outcome
//! classification.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    /// Reached t_end with every field below its cap.
    CompletedGlobal,
    /// Particle density exceeded the cap at time t.
    BlowupDetected { t: f64 },
    /// Grid sup norm crossed the density cap or G fell below the floor at t.
    CapExceeded { t: f64 },
}

impl Outcome {
    /// Time at which a cap was hit, for either blow-up variant.
    pub fn cap_hit_time(&self) -> Option<f64> {
        match self {
            Outcome::CompletedGlobal => None,
            Outcome::BlowupDetected { t } | Outcome::CapExceeded { t } => Some(*t),
        }
    }
}

/// One diagnostics sample.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub rho_inf: f64,
    pub g_inf: f64,
    pub g_min: f64,
    /// min of G/rho over cells or particles with rho above threshold;
    /// NaN when the support is empty.
    pub ratio_min: f64,
    pub mass_drift: f64,
    pub momentum_drift: f64,
}

/// Time series plus running extrema for a single run.
#[derive(Debug, Clone, Serialize)]
pub struct RunDiagnostics {
    pub rows: Vec<DiagnosticsRow>,
    pub outcome: Outcome,
    /// Running maxima/minima over every step, not just recorded rows.
    pub max_rho_inf: f64,
    pub max_g_inf: f64,
    pub min_g: f64,
    pub min_ratio: f64,
    pub max_mass_drift: f64,
    pub max_momentum_drift: f64,
    /// Largest per-particle drift of G_i/rho_i from its initial value
    /// (Lagrangian runs only).
    pub ratio_drift: Option<f64>,
    /// Periodic-distance floor activations (Lagrangian runs only).
    pub degeneracy_events: u64,
    pub final_time: f64,
    pub steps: u64,
}

impl RunDiagnostics {
    /// The (rho_inf over time) series for solver cross-comparison.
    pub fn rho_inf_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.rho_inf)).collect()
    }

    /// CSV with the header `t,rho_inf,G_inf,G_min,ratio_min,mass_drift,momentum_drift`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,rho_inf,G_inf,G_min,ratio_min,mass_drift,momentum_drift")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.t, r.rho_inf, r.g_inf, r.g_min, r.ratio_min, r.mass_drift, r.momentum_drift
            )?;
        }
        Ok(())
    }
}

/// Accumulates rows and running extrema during a run.
#[derive(Debug)]
pub(crate) struct Recorder {
    rows: Vec<DiagnosticsRow>,
    max_rho_inf: f64,
    max_g_inf: f64,
    min_g: f64,
    min_ratio: f64,
    max_mass_drift: f64,
    max_momentum_drift: f64,
    ratio_drift: Option<f64>,
    degeneracy_events: u64,
    steps: u64,
    last_recorded_step: Option<u64>,
}

impl Recorder {
    pub fn new() -> Self {
        Recorder {
            rows: Vec::new(),
            max_rho_inf: f64::NEG_INFINITY,
            max_g_inf: f64::NEG_INFINITY,
            min_g: f64::INFINITY,
            min_ratio: f64::INFINITY,
            max_mass_drift: 0.0,
            max_momentum_drift: 0.0,
            ratio_drift: None,
            degeneracy_events: 0,
            steps: 0,
            last_recorded_step: None,
        }
    }

    /// Update extrema from a sample; store the row when `record` is set.
    pub fn observe(&mut self, row: DiagnosticsRow, record: bool) {
        self.max_rho_inf = self.max_rho_inf.max(row.rho_inf);
        self.max_g_inf = self.max_g_inf.max(row.g_inf);
        self.min_g = self.min_g.min(row.g_min);
        if row.ratio_min.is_finite() {
            self.min_ratio = self.min_ratio.min(row.ratio_min);
        }
        self.max_mass_drift = self.max_mass_drift.max(row.mass_drift);
        self.max_momentum_drift = self.max_momentum_drift.max(row.momentum_drift);
        if record {
            self.last_recorded_step = Some(self.steps);
            self.rows.push(row);
        }
    }

    pub fn count_step(&mut self) {
        self.steps += 1;
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Whether the current step was already recorded (avoids a duplicate
    /// final row).
    pub fn step_recorded(&self) -> bool {
        self.last_recorded_step == Some(self.steps)
    }

    pub fn note_ratio_drift(&mut self, drift: f64) {
        let cur = self.ratio_drift.unwrap_or(0.0);
        self.ratio_drift = Some(cur.max(drift));
    }

    pub fn add_degeneracies(&mut self, n: u64) {
        self.degeneracy_events += n;
    }

    pub fn finish(self, outcome: Outcome, final_time: f64) -> RunDiagnostics {
        RunDiagnostics {
            rows: self.rows,
            outcome,
            max_rho_inf: self.max_rho_inf,
            max_g_inf: self.max_g_inf,
            min_g: self.min_g,
            min_ratio: self.min_ratio,
            max_mass_drift: self.max_mass_drift,
            max_momentum_drift: self.max_momentum_drift,
            ratio_drift: self.ratio_drift,
            degeneracy_events: self.degeneracy_events,
            final_time,
            steps: self.steps,
        }
    }
}
