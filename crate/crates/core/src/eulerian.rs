//! Conservative finite-volume solver for the equivalent system
//!
//!   rho_t + (rho u)_x = 0,
//!   G_t   + (u G)_x   = 0,
//!   u_x = G - psi*rho,
//!
//! on a uniform periodic grid. Both transported quantities use the same
//! local Lax-Friedrichs (Rusanov) flux so the ratio G/rho advects
//! consistently; the velocity is recovered each stage by integrating
//! G - psi*rho and pinning the constant through conservation of momentum.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsRow, Outcome, Recorder, RunDiagnostics};
use crate::error::{Error, Result};
use crate::kernels::{ConvolutionWeights, Kernel};
use crate::numerics::{compensated_dot, compensated_sum, derivative_periodic_4th, minmod};

/// Wave-speed regularization in the CFL condition.
const CFL_EPS: f64 = 1e-14;
/// Absolute step cap; keeps near-stationary states from striding over t_end
/// in a handful of steps.
const DT_MAX: f64 = 0.05;
/// Cells with rho below this are treated as vacuum by the ratio monitor.
const RATIO_SUPPORT_THRESHOLD: f64 = 1e-8;
/// Support threshold when classifying initial data.
const INIT_SUPPORT_THRESHOLD: f64 = 1e-12;
/// Negative rounding dust below this magnitude (relative to the density sup)
/// is clipped to zero.
const NEGATIVE_DUST_REL: f64 = 1e-13;

/// Spatial order of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeOrder {
    /// First-order upwinded Rusanov fluxes, forward Euler in time.
    First,
    /// Minmod-limited linear reconstruction with Heun time stepping.
    SecondMinmod,
}

impl SchemeOrder {
    pub fn from_int(order: u8) -> Result<Self> {
        match order {
            1 => Ok(SchemeOrder::First),
            2 => Ok(SchemeOrder::SecondMinmod),
            other => Err(Error::config(format!(
                "scheme order must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Grid solver configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub order: SchemeOrder,
    pub rho_cap: f64,
    pub g_floor: f64,
    pub output_stride: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 256,
            cfl: 0.4,
            t_end: 10.0,
            order: SchemeOrder::First,
            rho_cap: 1e6,
            g_floor: -1e6,
            output_stride: 10,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.n < 32 || !self.n.is_multiple_of(2) {
            errs.push(format!("grid size n = {} must be even and >= 32", self.n));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            errs.push(format!("cfl = {} must lie in (0, 0.5]", self.cfl));
        }
        if !(self.t_end > 0.0) {
            errs.push(format!("t_end = {} must be > 0", self.t_end));
        }
        if !(self.rho_cap > 0.0) {
            errs.push(format!("rho_cap = {} must be > 0", self.rho_cap));
        }
        if self.output_stride == 0 {
            errs.push("output_stride must be >= 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Grid state: cell averages of rho and G, the recovered velocity, and the
/// conserved scalars captured at initialization.
#[derive(Debug, Clone)]
pub struct EulerianState {
    pub t: f64,
    pub dx: f64,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    pub u: Vec<f64>,
    /// Mass at t = 0.
    pub mass0: f64,
    /// Momentum at t = 0; the velocity recovery pins sum(rho u dx) to this.
    pub momentum0: f64,
}

impl EulerianState {
    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn mass(&self) -> f64 {
        compensated_sum(self.rho.iter().cloned()) * self.dx
    }

    pub fn momentum(&self) -> f64 {
        compensated_dot(&self.rho, &self.u) * self.dx
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|i| (i as f64 + 0.5) * self.dx - 0.5).collect()
    }

    fn rho_inf(&self) -> f64 {
        self.rho.iter().cloned().fold(0.0, f64::max)
    }

    fn g_extrema(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &g in &self.g {
            lo = lo.min(g);
            hi = hi.max(g);
        }
        (lo, hi)
    }

    fn ratio_min(&self, threshold: f64) -> f64 {
        let mut m = f64::INFINITY;
        for (r, g) in self.rho.iter().zip(&self.g) {
            if *r > threshold {
                m = m.min(g / r);
            }
        }
        if m.is_finite() {
            m
        } else {
            f64::NAN
        }
    }
}

/// Scalars classifying the initial data.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InitSummary {
    /// min of G0/rho0 over cells with rho0 above the support threshold.
    pub c0: f64,
    /// min of G0 over every cell.
    pub inf_g0: f64,
    pub rho0_sup: f64,
    pub g0_sup: f64,
    pub mass: f64,
    pub momentum: f64,
}

/// Field snapshot at a requested time.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSnapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    pub u: Vec<f64>,
}

impl FieldSnapshot {
    /// CSV with the header `x,rho,G,u`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,rho,G,u")?;
        for i in 0..self.x.len() {
            writeln!(w, "{},{},{},{}", self.x[i], self.rho[i], self.g[i], self.u[i])?;
        }
        Ok(())
    }
}

/// Everything a completed run produces.
#[derive(Debug, Clone)]
pub struct EulerianRun {
    pub init: InitSummary,
    pub diagnostics: RunDiagnostics,
    pub final_state: EulerianState,
    pub snapshots: Vec<FieldSnapshot>,
}

/// Sample primitive initial data (rho0, u0) on an n-cell grid and derive
/// G0 = D_x u0 + psi*rho0 with a fourth-order periodic difference.
///
/// Initial data always enters in primitive variables so the periodic
/// compatibility (G - psi*rho has zero mean) holds by construction.
pub fn init_from_primitive(
    rho0: impl Fn(f64) -> f64,
    u0: impl Fn(f64) -> f64,
    kernel: &Kernel,
    n: usize,
) -> Result<(EulerianState, InitSummary)> {
    let weights = kernel.cell_weights(n)?;
    init_with_weights(rho0, u0, &weights)
}

pub(crate) fn init_with_weights(
    rho0: impl Fn(f64) -> f64,
    u0: impl Fn(f64) -> f64,
    weights: &ConvolutionWeights,
) -> Result<(EulerianState, InitSummary)> {
    let n = weights.n();
    let dx = weights.dx();
    let mut rho = vec![0.0; n];
    let mut u_sampled = vec![0.0; n];
    for i in 0..n {
        let x = (i as f64 + 0.5) * dx - 0.5;
        let r = rho0(x);
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!(
                "initial density rho0({x}) = {r} must be finite and >= 0"
            )));
        }
        rho[i] = r;
        u_sampled[i] = u0(x);
    }
    let conv = weights.convolve(&rho)?;
    let du = derivative_periodic_4th(&u_sampled, dx);
    let g: Vec<f64> = du.iter().zip(&conv).map(|(d, c)| d + c).collect();

    let mass0 = compensated_sum(rho.iter().cloned()) * dx;
    if mass0 <= 0.0 {
        return Err(Error::DegenerateState(
            "initial data carries no mass".into(),
        ));
    }
    let momentum0 = compensated_dot(&rho, &u_sampled) * dx;

    let mut c0 = f64::INFINITY;
    let mut inf_g0 = f64::INFINITY;
    let mut rho0_sup: f64 = 0.0;
    let mut g0_sup: f64 = 0.0;
    for i in 0..n {
        if rho[i] > INIT_SUPPORT_THRESHOLD {
            c0 = c0.min(g[i] / rho[i]);
        }
        inf_g0 = inf_g0.min(g[i]);
        rho0_sup = rho0_sup.max(rho[i]);
        g0_sup = g0_sup.max(g[i].abs());
    }

    // The state carries the recovered velocity so u is consistent with the
    // discrete constraint from the first step on.
    let u = recover_velocity(&g, &rho, weights, momentum0)?;
    let state = EulerianState {
        t: 0.0,
        dx,
        rho,
        g,
        u,
        mass0,
        momentum0,
    };
    let summary = InitSummary {
        c0,
        inf_g0,
        rho0_sup,
        g0_sup,
        mass: mass0,
        momentum: momentum0,
    };
    Ok((state, summary))
}

/// Recover u from u_x = G - psi*rho: project the residual mean out of the
/// integrand, integrate with the cumulative trapezoid rule, then fix the
/// constant so sum(rho u dx) equals `p0` exactly.
pub fn recover_velocity(
    g: &[f64],
    rho: &[f64],
    weights: &ConvolutionWeights,
    p0: f64,
) -> Result<Vec<f64>> {
    let n = weights.n();
    if g.len() != n || rho.len() != n {
        return Err(Error::config(format!(
            "recover_velocity length mismatch: n = {n}, G = {}, rho = {}",
            g.len(),
            rho.len()
        )));
    }
    let mut conv = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut utilde = vec![0.0; n];
    recover_velocity_into(g, rho, weights, p0, &mut conv, &mut s, &mut utilde)?;
    Ok(utilde)
}

/// Buffer-reusing velocity recovery; `utilde` holds the result.
fn recover_velocity_into(
    g: &[f64],
    rho: &[f64],
    weights: &ConvolutionWeights,
    p0: f64,
    conv: &mut [f64],
    s: &mut [f64],
    utilde: &mut [f64],
) -> Result<()> {
    let n = weights.n();
    let dx = weights.dx();
    weights.convolve_into(rho, conv)?;
    for i in 0..n {
        s[i] = g[i] - conv[i];
    }
    let mean = compensated_sum(s.iter().cloned()) / n as f64;
    for v in s.iter_mut() {
        *v -= mean;
    }
    // Cyclic trapezoid closure is exact once the mean is removed.
    utilde[0] = 0.0;
    for i in 1..n {
        utilde[i] = utilde[i - 1] + 0.5 * dx * (s[i - 1] + s[i]);
    }
    let mass = compensated_sum(rho.iter().cloned()) * dx;
    if mass <= 0.0 {
        return Err(Error::DegenerateState(
            "cannot pin the velocity constant: state carries no mass".into(),
        ));
    }
    let weighted = compensated_dot(rho, utilde) * dx;
    let c = (p0 - weighted) / mass;
    for v in utilde.iter_mut() {
        *v += c;
    }
    Ok(())
}

/// Rusanov flux divergence for rho and G sharing one reconstruction.
///
/// Interface i sits between cells i and i+1 (periodic); the wave speed is
/// max(|u_i|, |u_{i+1}|).
#[allow(clippy::too_many_arguments)] // field arrays plus caller-owned scratch
pub(crate) fn flux_divergence(
    rho: &[f64],
    g: &[f64],
    u: &[f64],
    dx: f64,
    order: SchemeOrder,
    flux_rho: &mut [f64],
    flux_g: &mut [f64],
    slopes: &mut [f64],
    out_drho: &mut [f64],
    out_dg: &mut [f64],
) {
    let n = rho.len();
    let (srho, rest) = slopes.split_at_mut(n);
    let (sg, su) = rest.split_at_mut(n);
    match order {
        SchemeOrder::First => {
            srho.fill(0.0);
            sg.fill(0.0);
            su.fill(0.0);
        }
        SchemeOrder::SecondMinmod => {
            for i in 0..n {
                let ip = (i + 1) % n;
                let im = (i + n - 1) % n;
                srho[i] = minmod(rho[i] - rho[im], rho[ip] - rho[i]);
                sg[i] = minmod(g[i] - g[im], g[ip] - g[i]);
                su[i] = minmod(u[i] - u[im], u[ip] - u[i]);
            }
        }
    }
    for i in 0..n {
        let ip = (i + 1) % n;
        let rl = rho[i] + 0.5 * srho[i];
        let rr = rho[ip] - 0.5 * srho[ip];
        let gl = g[i] + 0.5 * sg[i];
        let gr = g[ip] - 0.5 * sg[ip];
        let ul = u[i] + 0.5 * su[i];
        let ur = u[ip] - 0.5 * su[ip];
        let a = u[i].abs().max(u[ip].abs());
        flux_rho[i] = 0.5 * (rl * ul + rr * ur) - 0.5 * a * (rr - rl);
        flux_g[i] = 0.5 * (gl * ul + gr * ur) - 0.5 * a * (gr - gl);
    }
    for i in 0..n {
        let im = (i + n - 1) % n;
        out_drho[i] = -(flux_rho[i] - flux_rho[im]) / dx;
        out_dg[i] = -(flux_g[i] - flux_g[im]) / dx;
    }
}

/// Scratch buffers for the stepper.
struct Workspace {
    conv: Vec<f64>,
    s: Vec<f64>,
    utilde: Vec<f64>,
    flux_rho: Vec<f64>,
    flux_g: Vec<f64>,
    slopes: Vec<f64>,
    drho1: Vec<f64>,
    dg1: Vec<f64>,
    drho2: Vec<f64>,
    dg2: Vec<f64>,
    rho_stage: Vec<f64>,
    g_stage: Vec<f64>,
    u_stage: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            conv: vec![0.0; n],
            s: vec![0.0; n],
            utilde: vec![0.0; n],
            flux_rho: vec![0.0; n],
            flux_g: vec![0.0; n],
            slopes: vec![0.0; 3 * n],
            drho1: vec![0.0; n],
            dg1: vec![0.0; n],
            drho2: vec![0.0; n],
            dg2: vec![0.0; n],
            rho_stage: vec![0.0; n],
            g_stage: vec![0.0; n],
            u_stage: vec![0.0; n],
        }
    }
}

fn advance(
    state: &mut EulerianState,
    weights: &ConvolutionWeights,
    dt: f64,
    order: SchemeOrder,
    ws: &mut Workspace,
) -> Result<()> {
    let n = state.n();
    let dx = state.dx;
    let u_max = state.u.iter().fold(0.0f64, |m, u| m.max(u.abs())) + CFL_EPS;
    let dt_stable = 0.5 * dx / u_max;
    if dt > dt_stable * (1.0 + 1e-12) {
        return Err(Error::StepSize {
            dt,
            dt_max: dt_stable,
        });
    }

    flux_divergence(
        &state.rho,
        &state.g,
        &state.u,
        dx,
        order,
        &mut ws.flux_rho,
        &mut ws.flux_g,
        &mut ws.slopes,
        &mut ws.drho1,
        &mut ws.dg1,
    );

    match order {
        SchemeOrder::First => {
            for i in 0..n {
                state.rho[i] += dt * ws.drho1[i];
                state.g[i] += dt * ws.dg1[i];
            }
        }
        SchemeOrder::SecondMinmod => {
            for i in 0..n {
                ws.rho_stage[i] = state.rho[i] + dt * ws.drho1[i];
                ws.g_stage[i] = state.g[i] + dt * ws.dg1[i];
            }
            recover_velocity_into(
                &ws.g_stage,
                &ws.rho_stage,
                weights,
                state.momentum0,
                &mut ws.conv,
                &mut ws.s,
                &mut ws.utilde,
            )?;
            ws.u_stage.copy_from_slice(&ws.utilde);
            flux_divergence(
                &ws.rho_stage,
                &ws.g_stage,
                &ws.u_stage,
                dx,
                order,
                &mut ws.flux_rho,
                &mut ws.flux_g,
                &mut ws.slopes,
                &mut ws.drho2,
                &mut ws.dg2,
            );
            for i in 0..n {
                state.rho[i] += 0.5 * dt * (ws.drho1[i] + ws.drho2[i]);
                state.g[i] += 0.5 * dt * (ws.dg1[i] + ws.dg2[i]);
            }
        }
    }

    // Clip negative rounding dust; anything larger propagates and the
    // positivity tests catch it.
    let rho_sup = state.rho_inf();
    let dust = NEGATIVE_DUST_REL * rho_sup.max(1.0);
    for r in state.rho.iter_mut() {
        if *r < 0.0 && *r > -dust {
            *r = 0.0;
        }
    }

    recover_velocity_into(
        &state.g,
        &state.rho,
        weights,
        state.momentum0,
        &mut ws.conv,
        &mut ws.s,
        &mut ws.utilde,
    )?;
    state.u.copy_from_slice(&ws.utilde);
    state.t += dt;
    Ok(())
}

/// Advance the state by one conservative step of size `dt`.
///
/// Errors with [`Error::StepSize`] when dt exceeds the stability bound
/// 0.5 dx / max|u|.
pub fn step(
    state: &mut EulerianState,
    weights: &ConvolutionWeights,
    dt: f64,
    order: SchemeOrder,
) -> Result<()> {
    let mut ws = Workspace::new(state.n());
    advance(state, weights, dt, order, &mut ws)
}

fn diagnostics_row(state: &EulerianState) -> DiagnosticsRow {
    let (g_min, g_max) = state.g_extrema();
    let mass = state.mass();
    let momentum = state.momentum();
    DiagnosticsRow {
        t: state.t,
        rho_inf: state.rho_inf(),
        g_inf: g_max.abs().max(g_min.abs()),
        g_min,
        ratio_min: state.ratio_min(RATIO_SUPPORT_THRESHOLD),
        mass_drift: (mass - state.mass0).abs() / state.mass0,
        momentum_drift: (momentum - state.momentum0).abs()
            / state.momentum0.abs().max(state.mass0),
    }
}

/// Run to t_end recording diagnostics every `output_stride` steps.
pub fn run(
    config: &SimConfig,
    rho0: impl Fn(f64) -> f64,
    u0: impl Fn(f64) -> f64,
    kernel: &Kernel,
) -> Result<EulerianRun> {
    run_with_snapshots(config, rho0, u0, kernel, &[])
}

/// As [`run`], additionally capturing field snapshots at the requested times
/// (each recorded at the first step crossing it).
pub fn run_with_snapshots(
    config: &SimConfig,
    rho0: impl Fn(f64) -> f64,
    u0: impl Fn(f64) -> f64,
    kernel: &Kernel,
    snapshot_times: &[f64],
) -> Result<EulerianRun> {
    config.validate()?;
    let weights = kernel.cell_weights(config.n)?;
    let (mut state, init) = init_with_weights(rho0, u0, &weights)?;
    let mut ws = Workspace::new(config.n);
    let mut recorder = Recorder::new();
    let mut snapshots = Vec::new();
    let mut snap_times: Vec<f64> = snapshot_times.to_vec();
    snap_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut next_snap = 0;

    let take_snapshot = |state: &EulerianState| FieldSnapshot {
        t: state.t,
        x: state.cell_centers(),
        rho: state.rho.clone(),
        g: state.g.clone(),
        u: state.u.clone(),
    };

    recorder.observe(diagnostics_row(&state), true);
    while next_snap < snap_times.len() && snap_times[next_snap] <= state.t {
        snapshots.push(take_snapshot(&state));
        next_snap += 1;
    }

    let horizon = config.t_end * (1.0 - 1e-12);
    let outcome = loop {
        let row = diagnostics_row(&state);
        let g_min = row.g_min;
        if row.rho_inf > config.rho_cap || g_min < config.g_floor {
            break Outcome::CapExceeded { t: state.t };
        }
        if state.t >= horizon {
            break Outcome::CompletedGlobal;
        }
        let u_max = state.u.iter().fold(0.0f64, |m, u| m.max(u.abs())) + CFL_EPS;
        let dt = (config.cfl * state.dx / u_max)
            .min(DT_MAX)
            .min(config.t_end - state.t);
        advance(&mut state, &weights, dt, config.order, &mut ws)?;
        recorder.count_step();
        let record = recorder.steps().is_multiple_of(config.output_stride as u64);
        recorder.observe(diagnostics_row(&state), record);
        while next_snap < snap_times.len() && snap_times[next_snap] <= state.t {
            snapshots.push(take_snapshot(&state));
            next_snap += 1;
        }
    };

    if !recorder.step_recorded() {
        recorder.observe(diagnostics_row(&state), true);
    }
    let final_time = state.t;
    Ok(EulerianRun {
        init,
        diagnostics: recorder.finish(outcome, final_time),
        final_state: state,
        snapshots,
    })
}
