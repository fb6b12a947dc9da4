//! Verification campaigns: threshold dichotomy sweeps, bound-violation
//! assertions, blow-up refinement studies and Eulerian/Lagrangian
//! cross-comparison, with machine-readable reports.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundInputs, BoundReport, Regime};
use crate::config::KernelConfig;
use crate::diagnostics::Outcome;
use crate::error::{Error, Result};
use crate::eulerian::{self, EulerianRun, SchemeOrder, SimConfig};
use crate::kernels::Kernel;
use crate::lagrangian::{self, IntegrateOptions, LagrangianRun};
use crate::numerics::interp_series;
use crate::presets::{DataPreset, PresetAnalytics};

/// What a campaign verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Subcritical,
    Supercritical,
    MaxPrinciple,
    BoundedKernel,
    CrossValidate,
    BlowupRefinement,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scenario::Subcritical => "subcritical",
            Scenario::Supercritical => "supercritical",
            Scenario::MaxPrinciple => "max-principle",
            Scenario::BoundedKernel => "bounded-kernel",
            Scenario::CrossValidate => "cross-validate",
            Scenario::BlowupRefinement => "blowup-refinement",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subcritical" => Ok(Scenario::Subcritical),
            "supercritical" => Ok(Scenario::Supercritical),
            "max-principle" | "max_principle" => Ok(Scenario::MaxPrinciple),
            "bounded-kernel" | "bounded_kernel" => Ok(Scenario::BoundedKernel),
            "cross-validate" | "cross_validate" | "compare" => Ok(Scenario::CrossValidate),
            "blowup-refinement" | "blowup_refinement" => Ok(Scenario::BlowupRefinement),
            other => Err(Error::config(format!(
                "unknown scenario \"{other}\"; expected one of subcritical, supercritical, \
                 max-principle, bounded-kernel, cross-validate, blowup-refinement"
            ))),
        }
    }
}

/// One resolution-ladder rung: grid cells or particle count, plus the
/// Lagrangian step (the Eulerian step follows the CFL number).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub resolution: usize,
    pub dt: f64,
}

/// A verification campaign: scenario, kernel, closed-form preset, ladder
/// and tolerances. Serializes bit-exactly so every report is reproducible
/// from its recorded inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub name: String,
    pub scenario: Scenario,
    pub kernel: KernelConfig,
    pub preset: DataPreset,
    pub ladder: Vec<Rung>,
    pub t_end: f64,
    pub order: u8,
    pub cfl: f64,
    /// Grid blow-up proxy cap; grid sup norms cannot exceed ~mass/dx, so
    /// supercritical campaigns set this well below that saturation level.
    pub rho_cap_eulerian: f64,
    /// Particle densities are ODE states and genuinely diverge; this is the
    /// real blow-up cap.
    pub rho_cap_lagrangian: f64,
    pub g_floor: f64,
    pub tol_rho: f64,
    pub tol_g: f64,
}

impl Campaign {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.ladder.is_empty() {
            errs.push("ladder must have at least one rung".into());
        }
        for w in self.ladder.windows(2) {
            if w[1].resolution <= w[0].resolution {
                errs.push("ladder resolutions must be strictly increasing".into());
                break;
            }
        }
        for r in &self.ladder {
            if !(r.dt > 0.0) {
                errs.push(format!("rung dt = {} must be > 0", r.dt));
            }
        }
        if !(self.t_end > 0.0) {
            errs.push(format!("t_end = {} must be > 0", self.t_end));
        }
        if self.order != 1 && self.order != 2 {
            errs.push(format!("order = {} must be 1 or 2", self.order));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            errs.push(format!("cfl = {} must lie in (0, 0.5]", self.cfl));
        }
        if !(self.tol_rho >= 0.0 && self.tol_g >= 0.0) {
            errs.push("tolerances must be >= 0".into());
        }
        if let Err(e) = self.kernel.validate() {
            match e {
                Error::Config(inner) => errs.extend(inner),
                other => errs.push(other.to_string()),
            }
        }
        if let Err(e) = self.preset.validate() {
            match e {
                Error::Config(inner) => errs.extend(inner),
                other => errs.push(other.to_string()),
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn kernel_and_analytics(&self) -> Result<(Kernel, PresetAnalytics)> {
        let kernel = self.kernel.to_kernel()?;
        let l1 = kernel.l1_norm();
        let analytics = self
            .preset
            .analytics(l1, self.kernel.is_constant())
            .ok_or_else(|| {
                Error::Campaign(format!(
                    "campaign \"{}\": preset has no closed-form classification under this kernel",
                    self.name
                ))
            })?;
        Ok((kernel, analytics))
    }

    fn sim_config(&self, rung: &Rung) -> SimConfig {
        SimConfig {
            n: rung.resolution,
            cfl: self.cfl,
            t_end: self.t_end,
            order: if self.order == 1 {
                SchemeOrder::First
            } else {
                SchemeOrder::SecondMinmod
            },
            rho_cap: self.rho_cap_eulerian,
            g_floor: self.g_floor,
            output_stride: 10,
        }
    }

    fn integrate_options(&self, rung: &Rung) -> IntegrateOptions {
        IntegrateOptions {
            dt: rung.dt,
            t_end: self.t_end,
            rho_cap: self.rho_cap_lagrangian,
            output_stride: 10,
            record_trajectory: false,
            trajectory_stride: 100,
        }
    }

    pub fn run_eulerian(&self, rung: &Rung) -> Result<EulerianRun> {
        let kernel = self.kernel.to_kernel()?;
        let preset = self.preset.clone();
        let config = self.sim_config(rung);
        let p = preset.clone();
        eulerian::run(&config, move |x| p.rho0(x), move |x| preset.u0(x), &kernel)
    }

    pub fn run_lagrangian(&self, rung: &Rung) -> Result<LagrangianRun> {
        let kernel = self.kernel.to_kernel()?;
        let l1 = kernel.l1_norm();
        let g0 = self
            .preset
            .g0_fn(l1, self.kernel.is_constant())
            .ok_or_else(|| {
                Error::Campaign(format!(
                    "campaign \"{}\": preset has no closed-form G0 for particle seeding",
                    self.name
                ))
            })?;
        let preset = self.preset.clone();
        let sys = lagrangian::seed_particles(
            |x| preset.rho0(x),
            |x| preset.u0(x),
            g0,
            rung.resolution,
        )?;
        lagrangian::integrate(sys, &kernel, &self.integrate_options(rung))
    }
}

/// One named check inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    /// The invariant this assertion checks.
    pub invariant: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

/// Result of a campaign, serializable for CI consumption.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub scenario: Scenario,
    pub campaign: Campaign,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "campaign {} [{}]: {}\n",
            self.campaign.name,
            self.scenario,
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        for a in &self.assertions {
            out.push_str(&format!(
                "  [{}] {}: measured {:.6e} vs threshold {:.6e} — {}\n",
                if a.passed { "ok" } else { "FAIL" },
                a.invariant,
                a.measured,
                a.threshold,
                a.detail
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

fn check_le(
    assertions: &mut Vec<Assertion>,
    invariant: impl Into<String>,
    measured: f64,
    threshold: f64,
    detail: impl Into<String>,
) {
    assertions.push(Assertion {
        invariant: invariant.into(),
        passed: measured <= threshold,
        measured,
        threshold,
        detail: detail.into(),
    });
}

fn check_bool(
    assertions: &mut Vec<Assertion>,
    invariant: impl Into<String>,
    passed: bool,
    measured: f64,
    detail: impl Into<String>,
) {
    assertions.push(Assertion {
        invariant: invariant.into(),
        passed,
        measured,
        threshold: f64::NAN,
        detail: detail.into(),
    });
}

/// Exact-equality check for formula reproduction.
fn check_bits(
    assertions: &mut Vec<Assertion>,
    invariant: impl Into<String>,
    measured: f64,
    expected: f64,
    detail: impl Into<String>,
) {
    assertions.push(Assertion {
        invariant: invariant.into(),
        passed: measured == expected,
        measured,
        threshold: expected,
        detail: detail.into(),
    });
}

/// Bounds for a subcritical campaign from its closed-form analytics.
pub fn campaign_bounds(campaign: &Campaign) -> Result<(BoundReport, PresetAnalytics)> {
    let (kernel, analytics) = campaign.kernel_and_analytics()?;
    if !(analytics.c0 > 0.0) {
        return Err(Error::Campaign(format!(
            "campaign \"{}\": C0 = {} must be positive for bound computation",
            campaign.name, analytics.c0
        )));
    }
    let inputs = BoundInputs::new(analytics.mass, analytics.c0, kernel)?
        .with_data_sups(analytics.rho0_sup, analytics.g0_sup)?;
    Ok((bounds::compute_report(&inputs), analytics))
}

/// Threshold-dichotomy verification.
///
/// Subcritical: runs both solvers across the ladder, asserting global
/// completion everywhere and the uniform sup-norm bounds at the finest rung.
/// Supercritical: asserts cap-hitting at every rung on both solvers, a
/// Cauchy cap-hit-time sequence for the particle oracle, and 10% agreement
/// between the two finest rungs.
pub fn verify_threshold(campaign: &Campaign) -> Result<VerificationReport> {
    campaign.validate()?;
    match campaign.scenario {
        Scenario::Subcritical | Scenario::BoundedKernel => verify_subcritical(campaign),
        Scenario::Supercritical | Scenario::BlowupRefinement => verify_supercritical(campaign),
        other => Err(Error::Campaign(format!(
            "verify_threshold expects a threshold scenario, got {other}"
        ))),
    }
}

fn verify_subcritical(campaign: &Campaign) -> Result<VerificationReport> {
    let (_, analytics) = campaign.kernel_and_analytics()?;
    if analytics.inf_g0 <= 0.0 {
        return Err(Error::Campaign(format!(
            "campaign \"{}\" labelled subcritical but closed-form inf G0 = {} <= 0",
            campaign.name, analytics.inf_g0
        )));
    }
    let (report, analytics) = campaign_bounds(campaign)?;
    let mut assertions = Vec::new();
    let mut notes = Vec::new();
    notes.push(format!(
        "bounds: beta = {}, gamma = {}, regime = {}, C0 = {}, inf G0 = {}",
        report.beta, report.gamma, report.regime, analytics.c0, analytics.inf_g0
    ));

    if campaign.scenario == Scenario::BoundedKernel {
        let sup = campaign
            .kernel
            .to_kernel()?
            .sup_norm()
            .ok_or_else(|| Error::Campaign("bounded-kernel scenario needs a bounded kernel".into()))?;
        check_bool(
            &mut assertions,
            "regime-is-bounded-kernel",
            report.regime == Regime::BoundedKernel,
            0.0,
            format!("regime = {}", report.regime),
        );
        check_bits(
            &mut assertions,
            "beta-formula-bit-exact",
            report.beta,
            analytics.mass * sup / analytics.c0,
            "beta = M |psi|_inf / C0",
        );
        check_bits(
            &mut assertions,
            "gamma-formula-bit-exact",
            report.gamma,
            analytics.mass * sup,
            "gamma = M |psi|_inf",
        );
    }

    let finest = *campaign.ladder.last().unwrap();
    for (ri, rung) in campaign.ladder.iter().enumerate() {
        let is_finest = ri + 1 == campaign.ladder.len();
        let eul = campaign.run_eulerian(rung)?;
        if eul.init.inf_g0 <= 0.0 {
            return Err(Error::Campaign(format!(
                "campaign \"{}\" labelled subcritical but discrete inf G0 = {} at N = {}",
                campaign.name, eul.init.inf_g0, rung.resolution
            )));
        }
        check_bool(
            &mut assertions,
            format!("eulerian-completes-N{}", rung.resolution),
            eul.diagnostics.outcome == Outcome::CompletedGlobal,
            eul.diagnostics.final_time,
            format!("outcome {:?}", eul.diagnostics.outcome),
        );
        let lag = campaign.run_lagrangian(rung)?;
        check_bool(
            &mut assertions,
            format!("lagrangian-completes-n{}", rung.resolution),
            lag.diagnostics.outcome == Outcome::CompletedGlobal,
            lag.diagnostics.final_time,
            format!("outcome {:?}", lag.diagnostics.outcome),
        );
        if is_finest {
            let rho_limit = (1.0 + campaign.tol_rho) * analytics.rho0_sup.max(report.beta);
            let g_limit = (1.0 + campaign.tol_g) * analytics.g0_sup.max(report.gamma);
            check_le(
                &mut assertions,
                "eulerian-rho-sup-bound",
                eul.diagnostics.max_rho_inf,
                rho_limit,
                format!("running |rho|_inf vs (1+tol) max(|rho0|_inf, beta) at N = {}", finest.resolution),
            );
            check_le(
                &mut assertions,
                "eulerian-G-sup-bound",
                eul.diagnostics.max_g_inf,
                g_limit,
                "running |G|_inf vs (1+tol) max(|G0|_inf, gamma)",
            );
            check_le(
                &mut assertions,
                "eulerian-G-stays-nonnegative",
                -eul.diagnostics.min_g,
                1e-6,
                "min G >= -1e-6 when inf G0 > 0",
            );
            check_le(
                &mut assertions,
                "eulerian-mass-conservation",
                eul.diagnostics.max_mass_drift,
                1e-12,
                "relative mass drift",
            );
            check_le(
                &mut assertions,
                "eulerian-momentum-conservation",
                eul.diagnostics.max_momentum_drift,
                1e-6,
                "momentum drift (normalized by max(|P0|, M))",
            );
            check_le(
                &mut assertions,
                "lagrangian-rho-sup-bound",
                lag.diagnostics.max_rho_inf,
                rho_limit,
                "running max rho_i vs (1+tol) max(|rho0|_inf, beta)",
            );
            check_le(
                &mut assertions,
                "lagrangian-G-sup-bound",
                lag.diagnostics.max_g_inf,
                g_limit,
                "running max |G_i| vs (1+tol) max(|G0|_inf, gamma)",
            );
            check_le(
                &mut assertions,
                "lagrangian-momentum-conservation",
                lag.diagnostics.max_momentum_drift,
                1e-10,
                "momentum drift (normalized by max(|P0|, M))",
            );
            check_le(
                &mut assertions,
                "lagrangian-G-sign-preserved",
                -lag.diagnostics.min_g,
                1e-10,
                "min G_i >= -1e-10 when all G_i(0) > 0",
            );
            if let Some(drift) = lag.diagnostics.ratio_drift {
                notes.push(format!("lagrangian ratio drift at finest rung: {drift:e}"));
            }
            notes.push(format!(
                "finest-rung sup norms: eulerian |rho|_inf = {}, lagrangian max rho_i = {}, limit = {rho_limit}",
                eul.diagnostics.max_rho_inf, lag.diagnostics.max_rho_inf
            ));
        }
    }

    Ok(VerificationReport {
        scenario: campaign.scenario,
        campaign: campaign.clone(),
        assertions,
        notes,
    })
}

fn verify_supercritical(campaign: &Campaign) -> Result<VerificationReport> {
    let (kernel, analytics) = campaign.kernel_and_analytics()?;
    let _ = kernel;
    if analytics.inf_g0 >= 0.0 {
        return Err(Error::Campaign(format!(
            "campaign \"{}\" labelled supercritical but closed-form inf G0 = {} >= 0",
            campaign.name, analytics.inf_g0
        )));
    }
    let mut assertions = Vec::new();
    let mut notes = Vec::new();
    // Riccati comparison: along the worst characteristic the density obeys
    // drho/dt > (|G0|/rho0) rho^2, so blow-up happens no later than 1/|G0|.
    notes.push(format!(
        "Riccati comparison upper bound on the blow-up time: 1/|inf G0| = {}",
        1.0 / analytics.inf_g0.abs()
    ));

    let mut eul_hits = Vec::new();
    let mut lag_hits = Vec::new();
    for rung in &campaign.ladder {
        let eul = campaign.run_eulerian(rung)?;
        if eul.init.inf_g0 >= 0.0 {
            return Err(Error::Campaign(format!(
                "campaign \"{}\" labelled supercritical but discrete inf G0 = {} at N = {}",
                campaign.name, eul.init.inf_g0, rung.resolution
            )));
        }
        let hit = eul.diagnostics.outcome.cap_hit_time();
        check_bool(
            &mut assertions,
            format!("eulerian-cap-exceeded-N{}", rung.resolution),
            hit.is_some(),
            hit.unwrap_or(f64::NAN),
            format!("outcome {:?}", eul.diagnostics.outcome),
        );
        if let Some(t) = hit {
            eul_hits.push(t);
        }

        let lag = campaign.run_lagrangian(rung)?;
        let hit = lag.diagnostics.outcome.cap_hit_time();
        check_bool(
            &mut assertions,
            format!("lagrangian-blowup-detected-n{}", rung.resolution),
            hit.is_some(),
            hit.unwrap_or(f64::NAN),
            format!("outcome {:?}", lag.diagnostics.outcome),
        );
        if let Some(t) = hit {
            lag_hits.push(t);
        }
    }
    notes.push(format!("eulerian cap-hit times: {eul_hits:?}"));
    notes.push(format!("lagrangian cap-hit times: {lag_hits:?}"));

    if lag_hits.len() >= 3 {
        let n = lag_hits.len();
        let d1 = (lag_hits[n - 2] - lag_hits[n - 3]).abs();
        let d2 = (lag_hits[n - 1] - lag_hits[n - 2]).abs();
        check_le(
            &mut assertions,
            "lagrangian-hit-time-cauchy",
            d2,
            d1 / 1.5,
            format!("successive differences shrink by >= 1.5x: {d1:e} -> {d2:e}"),
        );
    }
    if lag_hits.len() >= 2 {
        let n = lag_hits.len();
        let rel = (lag_hits[n - 1] - lag_hits[n - 2]).abs() / lag_hits[n - 1];
        check_le(
            &mut assertions,
            "lagrangian-hit-time-finest-agreement",
            rel,
            0.10,
            "two finest rungs agree within 10%",
        );
    }
    if eul_hits.len() >= 2 {
        let n = eul_hits.len();
        let rel = (eul_hits[n - 1] - eul_hits[n - 2]).abs() / eul_hits[n - 1];
        check_le(
            &mut assertions,
            "eulerian-hit-time-finest-agreement",
            rel,
            0.10,
            "two finest rungs agree within 10% (proxy cap)",
        );
    }

    Ok(VerificationReport {
        scenario: campaign.scenario,
        campaign: campaign.clone(),
        assertions,
        notes,
    })
}

/// Maximum-principle verification: C0 > |psi|_1 forces beta = 0 and the
/// density sup never exceeds its initial value (2% discrete slack).
pub fn verify_max_principle(campaign: &Campaign) -> Result<VerificationReport> {
    campaign.validate()?;
    let (report, analytics) = campaign_bounds(campaign)?;
    let l1 = campaign.kernel.to_kernel()?.l1_norm();
    if analytics.c0 <= l1 {
        return Err(Error::Campaign(format!(
            "campaign \"{}\": max principle needs C0 > |psi|_1, got C0 = {} vs {}",
            campaign.name, analytics.c0, l1
        )));
    }
    let mut assertions = Vec::new();
    let mut notes = Vec::new();
    check_bool(
        &mut assertions,
        "beta-is-zero",
        report.beta == 0.0 && report.regime == Regime::MaxPrinciple,
        report.beta,
        format!("regime = {}", report.regime),
    );
    let finest = *campaign.ladder.last().unwrap();
    let eul = campaign.run_eulerian(&finest)?;
    if eul.init.c0 <= l1 {
        return Err(Error::Campaign(format!(
            "campaign \"{}\": discrete C0 = {} fell below |psi|_1 = {l1}",
            campaign.name, eul.init.c0
        )));
    }
    notes.push(format!(
        "discrete C0 = {}, analytic C0 = {}, |psi|_1 = {l1}",
        eul.init.c0, analytics.c0
    ));
    check_le(
        &mut assertions,
        "rho-max-principle",
        eul.diagnostics.max_rho_inf,
        (1.0 + campaign.tol_rho) * analytics.rho0_sup,
        format!(
            "running |rho|_inf <= (1 + {}) |rho0|_inf at N = {}",
            campaign.tol_rho, finest.resolution
        ),
    );
    check_bool(
        &mut assertions,
        "eulerian-completes",
        eul.diagnostics.outcome == Outcome::CompletedGlobal,
        eul.diagnostics.final_time,
        format!("outcome {:?}", eul.diagnostics.outcome),
    );

    Ok(VerificationReport {
        scenario: campaign.scenario,
        campaign: campaign.clone(),
        assertions,
        notes,
    })
}

/// Relative sup-distance between two (t, value) series on their common range.
fn series_disagreement(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let t_lo = a[0].0.max(b[0].0);
    let t_hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    let samples = 256;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..=samples {
        let t = t_lo + (t_hi - t_lo) * i as f64 / samples as f64;
        let va = interp_series(a, t);
        let vb = interp_series(b, t);
        worst = worst.max((va - vb).abs());
        scale = scale.max(va.abs()).max(vb.abs());
    }
    worst / scale.max(f64::MIN_POSITIVE)
}

/// Eulerian/Lagrangian cross-validation: the |rho|_inf time series agree
/// within 3% at the finest rung and the disagreement shrinks along the
/// ladder.
pub fn cross_validate(campaign: &Campaign) -> Result<VerificationReport> {
    campaign.validate()?;
    let (_, analytics) = campaign.kernel_and_analytics()?;
    if analytics.inf_g0 <= 0.0 {
        return Err(Error::Campaign(format!(
            "campaign \"{}\": cross-validation needs a smooth subcritical preset",
            campaign.name
        )));
    }
    let mut assertions = Vec::new();
    let mut notes = Vec::new();
    let mut disagreements = Vec::new();
    for rung in &campaign.ladder {
        let eul = campaign.run_eulerian(rung)?;
        let lag = campaign.run_lagrangian(rung)?;
        let d = series_disagreement(
            &eul.diagnostics.rho_inf_series(),
            &lag.diagnostics.rho_inf_series(),
        );
        disagreements.push(d);
        notes.push(format!(
            "rung {}: |rho|_inf disagreement = {d:e}",
            rung.resolution
        ));
    }
    check_le(
        &mut assertions,
        "cross-agreement-finest",
        *disagreements.last().unwrap(),
        0.03,
        "sup-norm time-series agreement within 3% at the finest rung",
    );
    for i in 1..disagreements.len() {
        check_le(
            &mut assertions,
            format!(
                "cross-agreement-shrinks-{}-to-{}",
                campaign.ladder[i - 1].resolution,
                campaign.ladder[i].resolution
            ),
            disagreements[i],
            disagreements[i - 1] + 1e-12,
            "disagreement shrinks under refinement",
        );
    }
    Ok(VerificationReport {
        scenario: campaign.scenario,
        campaign: campaign.clone(),
        assertions,
        notes,
    })
}

/// Dispatch a campaign to its verifier.
pub fn run_campaign(campaign: &Campaign) -> Result<VerificationReport> {
    match campaign.scenario {
        Scenario::Subcritical
        | Scenario::BoundedKernel
        | Scenario::Supercritical
        | Scenario::BlowupRefinement => verify_threshold(campaign),
        Scenario::MaxPrinciple => verify_max_principle(campaign),
        Scenario::CrossValidate => cross_validate(campaign),
    }
}

/// One row of the beta-surface sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub kernel: String,
    pub mass: f64,
    pub c0: f64,
    pub k0: Option<f64>,
    pub k_star: Option<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub regime: String,
    pub beta_analytic: Option<f64>,
    pub numeric_analytic_gap: Option<f64>,
}

/// Tabulate k0, k*, beta, gamma and the regime over kernel x mass x C0.
/// Power-law rows also carry the analytic beta and the numeric/analytic gap.
pub fn sweep_beta_surface(
    kernels: &[KernelConfig],
    masses: &[f64],
    c0s: &[f64],
) -> Result<Vec<SweepRow>> {
    if kernels.is_empty() || masses.is_empty() || c0s.is_empty() {
        return Err(Error::config("sweep grids must be nonempty"));
    }
    let mut rows = Vec::new();
    for kc in kernels {
        let kernel = kc.to_kernel()?;
        for &mass in masses {
            for &c0 in c0s {
                let inputs = BoundInputs::new(mass, c0, kernel.clone())?;
                let report = bounds::compute_report(&inputs);
                let (beta_analytic, gap) = match (kc.kind, kc.alpha) {
                    (crate::config::KernelKind::Powerlaw, Some(alpha)) => {
                        match bounds::beta_analytic_powerlaw(alpha, mass, c0) {
                            Ok(a) => {
                                let numeric = bounds::compute_beta_numeric(&inputs)?.0;
                                let gap = (numeric - a.beta).abs() / a.beta;
                                (Some(a.beta), Some(gap))
                            }
                            Err(_) => (None, None),
                        }
                    }
                    _ => (None, None),
                };
                rows.push(SweepRow {
                    kernel: kc.describe(),
                    mass,
                    c0,
                    k0: report.k0,
                    k_star: report.k_star,
                    beta: report.beta,
                    gamma: report.gamma,
                    regime: report.regime.to_string(),
                    beta_analytic,
                    numeric_analytic_gap: gap,
                });
            }
        }
    }
    Ok(rows)
}

/// Sweep CSV with the header
/// `alpha_or_kind,M,C0,k0,k_star,beta,gamma,regime,beta_analytic,numeric_analytic_gap`.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "alpha_or_kind,M,C0,k0,k_star,beta,gamma,regime,beta_analytic,numeric_analytic_gap"
    )?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.kernel,
            r.mass,
            r.c0,
            opt(r.k0),
            opt(r.k_star),
            r.beta,
            r.gamma,
            r.regime,
            opt(r.beta_analytic),
            opt(r.numeric_analytic_gap)
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Default campaigns
// ---------------------------------------------------------------------------

/// The standard resolution ladder (grid cells / particles, Lagrangian dt).
pub fn default_ladder() -> Vec<Rung> {
    vec![
        Rung { resolution: 128, dt: 1.6e-2 },
        Rung { resolution: 256, dt: 8e-3 },
        Rung { resolution: 512, dt: 4e-3 },
    ]
}

fn base_campaign(name: String, scenario: Scenario, kernel: KernelConfig, preset: DataPreset) -> Campaign {
    Campaign {
        name,
        scenario,
        kernel,
        preset,
        ladder: default_ladder(),
        t_end: 10.0,
        order: 2,
        cfl: 0.3,
        rho_cap_eulerian: 1e6,
        rho_cap_lagrangian: 1e6,
        g_floor: -1e6,
        tol_rho: 0.05,
        tol_g: 0.05,
    }
}

/// Kernels of the subcritical verification matrix.
pub fn matrix_kernels() -> Vec<KernelConfig> {
    vec![
        KernelConfig::power_law(0.25),
        KernelConfig::power_law(0.5),
        KernelConfig::power_law(0.75),
        KernelConfig::constant(1.0),
        // Spike: tall integrable peak, bounded but strongly localized.
        KernelConfig::tabulated(vec![0.01, 0.05, 0.1], vec![50.0, 5.0, 0.5]),
    ]
}

/// Initial-data presets of the subcritical matrix.
pub fn matrix_presets() -> Vec<DataPreset> {
    vec![
        DataPreset::SineVelocity {
            mass: 1.0,
            amplitude: 0.1,
            mode: 1,
        },
        DataPreset::SineVelocity {
            mass: 1.0,
            amplitude: 0.06,
            mode: 2,
        },
    ]
}

/// The full subcritical preset matrix: 5 kernels x 2 data presets.
pub fn subcritical_matrix() -> Vec<Campaign> {
    let mut out = Vec::new();
    for kernel in matrix_kernels() {
        for preset in matrix_presets() {
            let pname = match &preset {
                DataPreset::SineVelocity { amplitude, mode, .. } => {
                    format!("sine-a{amplitude}-m{mode}")
                }
                _ => "preset".into(),
            };
            out.push(base_campaign(
                format!("subcritical-{}-{pname}", kernel.describe()),
                Scenario::Subcritical,
                kernel.clone(),
                preset,
            ));
        }
    }
    out
}

/// Supercritical campaigns (inf G0 < 0): strong and mild seeds.
pub fn supercritical_campaigns() -> Vec<Campaign> {
    let mut strong = base_campaign(
        "supercritical-powerlaw(alpha=0.5)-sine-a-2".into(),
        Scenario::Supercritical,
        KernelConfig::power_law(0.5),
        DataPreset::SineVelocity {
            mass: 1.0,
            amplitude: -2.0,
            mode: 1,
        },
    );
    strong.rho_cap_eulerian = 8.0;
    let mut mild = base_campaign(
        "supercritical-constant(1)-sine-a-0.5".into(),
        Scenario::Supercritical,
        KernelConfig::constant(1.0),
        DataPreset::SineVelocity {
            mass: 1.0,
            amplitude: -0.5,
            mode: 1,
        },
    );
    mild.rho_cap_eulerian = 8.0;
    vec![strong, mild]
}

/// Max-principle campaign: tiny constant kernel against the vacuum bump.
/// C0 = (shear + |psi|_1 M)/height > |psi|_1 while the vacuum shear well is
/// weak enough that its shock sits far beyond t_end.
pub fn max_principle_campaign() -> Campaign {
    let mut c = base_campaign(
        "max-principle-constant(0.1)-bump".into(),
        Scenario::MaxPrinciple,
        KernelConfig::constant(0.1),
        DataPreset::BumpWithShear {
            height: 1.0,
            half_width: 0.1,
            shear: 0.2,
            well_half_width: 0.35,
        },
    );
    c.tol_rho = 0.02;
    c
}

/// Bounded-kernel campaign: constant kernel, bit-exact case-table formulas.
pub fn bounded_kernel_campaign() -> Campaign {
    base_campaign(
        "bounded-kernel-constant(1)-sine-a0.1".into(),
        Scenario::BoundedKernel,
        KernelConfig::constant(1.0),
        DataPreset::SineVelocity {
            mass: 1.0,
            amplitude: 0.1,
            mode: 1,
        },
    )
}

/// Cross-validation campaign on the smooth subcritical benchmark.
pub fn cross_validate_campaign() -> Campaign {
    let mut c = base_campaign(
        "cross-validate-powerlaw(alpha=0.5)-sine-a0.1".into(),
        Scenario::CrossValidate,
        KernelConfig::power_law(0.5),
        DataPreset::SineVelocity {
            mass: 1.0,
            amplitude: 0.1,
            mode: 1,
        },
    );
    c.t_end = 5.0;
    c
}

/// Blow-up refinement study: the strong supercritical seed on an extended
/// ladder.
pub fn blowup_refinement_campaign() -> Campaign {
    let mut c = base_campaign(
        "blowup-refinement-powerlaw(alpha=0.5)-sine-a-2".into(),
        Scenario::BlowupRefinement,
        KernelConfig::power_law(0.5),
        DataPreset::SineVelocity {
            mass: 1.0,
            amplitude: -2.0,
            mode: 1,
        },
    );
    c.rho_cap_eulerian = 8.0;
    c.ladder = vec![
        Rung { resolution: 64, dt: 3.2e-2 },
        Rung { resolution: 128, dt: 1.6e-2 },
        Rung { resolution: 256, dt: 8e-3 },
        Rung { resolution: 512, dt: 4e-3 },
    ];
    c
}

/// Every default campaign for a scenario name.
pub fn default_campaigns(scenario: Scenario) -> Vec<Campaign> {
    match scenario {
        Scenario::Subcritical => subcritical_matrix(),
        Scenario::Supercritical => supercritical_campaigns(),
        Scenario::MaxPrinciple => vec![max_principle_campaign()],
        Scenario::BoundedKernel => vec![bounded_kernel_campaign()],
        Scenario::CrossValidate => vec![cross_validate_campaign()],
        Scenario::BlowupRefinement => vec![blowup_refinement_campaign()],
    }
}
