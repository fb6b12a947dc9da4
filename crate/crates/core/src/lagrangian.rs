//! Particle oracle for the characteristic ODE system
//!
//!   dx_i/dt   = u_i,
//!   du_i/dt   = sum_j m_j psi(d(x_i, x_j)) (u_j - u_i),
//!   drho_i/dt = -rho_i (G_i - (psi*rho)_i),
//!   dG_i/dt   = -G_i   (G_i - (psi*rho)_i),
//!
//! with (psi*rho)_i quadratured as sum_{j != i} m_j psi(d_ij) plus an exact
//! cell-averaged self weight. The ratio G_i/rho_i is conserved by the exact
//! flow and, because both equations share the same bracket, by every
//! Runge-Kutta stage up to rounding.

use crate::diagnostics::{DiagnosticsRow, Outcome, Recorder, RunDiagnostics};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numerics::{compensated_dot, compensated_sum, periodic_distance, periodic_wrap};

/// Floor on the periodic distance when evaluating a kernel between
/// near-coincident particles; activations are counted as degeneracy events.
const DISTANCE_FLOOR: f64 = 1e-10;
/// Smallest step the rejection cascade may reach before aborting.
const DT_MIN: f64 = 1e-9;
/// Particles with initial density above this carry the ratio invariant.
const RATIO_SUPPORT_THRESHOLD: f64 = 1e-12;

/// Lagrangian markers carrying (x, u, rho, G) with fixed mass weights.
#[derive(Debug, Clone)]
pub struct ParticleSystem {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    pub m: Vec<f64>,
}

impl ParticleSystem {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.m.iter().cloned())
    }

    pub fn total_momentum(&self) -> f64 {
        compensated_dot(&self.m, &self.u)
    }
}

/// Time derivatives of a particle system.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub dx: Vec<f64>,
    pub du: Vec<f64>,
    pub drho: Vec<f64>,
    pub dg: Vec<f64>,
}

impl Derivatives {
    fn zeros(n: usize) -> Self {
        Derivatives {
            dx: vec![0.0; n],
            du: vec![0.0; n],
            drho: vec![0.0; n],
            dg: vec![0.0; n],
        }
    }
}

/// Seed n equispaced particles from closed-form initial fields.
/// Mass weights are the midpoint-rule values rho0(x_i)/n.
pub fn seed_particles(
    rho0: impl Fn(f64) -> f64,
    u0: impl Fn(f64) -> f64,
    g0: impl Fn(f64) -> f64,
    n: usize,
) -> Result<ParticleSystem> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "particle count n = {n} must be >= 2"
        )));
    }
    let mut sys = ParticleSystem {
        x: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        rho: Vec::with_capacity(n),
        g: Vec::with_capacity(n),
        m: Vec::with_capacity(n),
    };
    for i in 0..n {
        let x = (i as f64 + 0.5) / n as f64 - 0.5;
        let r = rho0(x);
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!(
                "initial density rho0({x}) = {r} must be finite and >= 0"
            )));
        }
        sys.x.push(x);
        sys.u.push(u0(x));
        sys.rho.push(r);
        sys.g.push(g0(x));
        sys.m.push(r / n as f64);
    }
    if sys.total_mass() <= 0.0 {
        return Err(Error::DegenerateState(
            "all particle masses are zero".into(),
        ));
    }
    Ok(sys)
}

/// Cell-averaged self weight: n times the kernel integral over the particle's
/// own cell of width 1/n.
pub fn self_weight(kernel: &Kernel, n: usize) -> f64 {
    kernel
        .ball_integral(0.5 / n as f64)
        .expect("radius is positive")
        * n as f64
}

/// Right side of the particle system. Returns the derivatives and the number
/// of distance-floor activations.
pub fn rhs(sys: &ParticleSystem, kernel: &Kernel) -> (Derivatives, u64) {
    let mut d = Derivatives::zeros(sys.len());
    let w_self = self_weight(kernel, sys.len());
    let mut conv = vec![0.0; sys.len()];
    let degeneracies = rhs_into(sys, kernel, w_self, &mut d, &mut conv);
    (d, degeneracies)
}

/// Buffer-reusing right side; the pair loop is symmetric so the alignment
/// force is conservative by construction.
#[allow(clippy::needless_range_loop)] // several arrays share each index
fn rhs_into(
    sys: &ParticleSystem,
    kernel: &Kernel,
    w_self: f64,
    d: &mut Derivatives,
    conv: &mut [f64],
) -> u64 {
    let n = sys.len();
    let mut degeneracies = 0u64;
    d.du.fill(0.0);
    for (c, m) in conv.iter_mut().zip(&sys.m) {
        *c = m * w_self;
    }
    for i in 0..n {
        let (xi, ui, mi) = (sys.x[i], sys.u[i], sys.m[i]);
        for j in (i + 1)..n {
            let mut dist = periodic_distance(xi, sys.x[j]);
            if dist < DISTANCE_FLOOR {
                dist = DISTANCE_FLOOR;
                degeneracies += 1;
            }
            let p = kernel.psi(dist);
            let mj = sys.m[j];
            conv[i] += mj * p;
            conv[j] += mi * p;
            let dv = sys.u[j] - ui;
            d.du[i] += mj * p * dv;
            d.du[j] -= mi * p * dv;
        }
    }
    for i in 0..n {
        d.dx[i] = sys.u[i];
        let bracket = sys.g[i] - conv[i];
        d.drho[i] = -sys.rho[i] * bracket;
        d.dg[i] = -sys.g[i] * bracket;
    }
    degeneracies
}

/// Integration options for [`integrate`].
#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub t_end: f64,
    pub rho_cap: f64,
    pub output_stride: usize,
    pub record_trajectory: bool,
    pub trajectory_stride: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            dt: 1e-3,
            t_end: 10.0,
            rho_cap: 1e6,
            output_stride: 10,
            record_trajectory: false,
            trajectory_stride: 100,
        }
    }
}

impl IntegrateOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.dt > 0.0) {
            errs.push(format!("dt = {} must be > 0", self.dt));
        }
        if !(self.t_end > 0.0) {
            errs.push(format!("t_end = {} must be > 0", self.t_end));
        }
        if !(self.rho_cap > 0.0) {
            errs.push(format!("rho_cap = {} must be > 0", self.rho_cap));
        }
        if self.output_stride == 0 || self.trajectory_stride == 0 {
            errs.push("strides must be >= 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Full particle state at one recorded time.
#[derive(Debug, Clone)]
pub struct TrajectoryFrame {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
}

/// Result of a particle integration.
#[derive(Debug, Clone)]
pub struct LagrangianRun {
    pub diagnostics: RunDiagnostics,
    pub trajectory: Vec<TrajectoryFrame>,
    pub final_state: ParticleSystem,
}

struct Rk4Workspace {
    k1: Derivatives,
    k2: Derivatives,
    k3: Derivatives,
    k4: Derivatives,
    stage: ParticleSystem,
    candidate: ParticleSystem,
    conv: Vec<f64>,
}

impl Rk4Workspace {
    fn new(sys: &ParticleSystem) -> Self {
        let n = sys.len();
        Rk4Workspace {
            k1: Derivatives::zeros(n),
            k2: Derivatives::zeros(n),
            k3: Derivatives::zeros(n),
            k4: Derivatives::zeros(n),
            stage: sys.clone(),
            candidate: sys.clone(),
            conv: vec![0.0; n],
        }
    }
}

fn set_stage(stage: &mut ParticleSystem, base: &ParticleSystem, k: &Derivatives, h: f64) {
    let n = base.len();
    for i in 0..n {
        stage.x[i] = base.x[i] + h * k.dx[i];
        stage.u[i] = base.u[i] + h * k.du[i];
        stage.rho[i] = base.rho[i] + h * k.drho[i];
        stage.g[i] = base.g[i] + h * k.dg[i];
    }
}

/// Classical fourth-order step into `ws.candidate`. Returns the degeneracy
/// count, or `None` when the first-stage density change would overshoot.
fn try_rk4_step(
    sys: &ParticleSystem,
    kernel: &Kernel,
    w_self: f64,
    dt: f64,
    ws: &mut Rk4Workspace,
) -> Option<u64> {
    let n = sys.len();
    let mut degen = 0;
    degen += rhs_into(sys, kernel, w_self, &mut ws.k1, &mut ws.conv);
    // Density overshoot guard on the first-stage derivative.
    for i in 0..n {
        if sys.rho[i] > 0.0 && ws.k1.drho[i].abs() * dt > sys.rho[i] {
            return None;
        }
    }
    set_stage(&mut ws.stage, sys, &ws.k1, 0.5 * dt);
    degen += rhs_into(&ws.stage, kernel, w_self, &mut ws.k2, &mut ws.conv);
    set_stage(&mut ws.stage, sys, &ws.k2, 0.5 * dt);
    degen += rhs_into(&ws.stage, kernel, w_self, &mut ws.k3, &mut ws.conv);
    set_stage(&mut ws.stage, sys, &ws.k3, dt);
    degen += rhs_into(&ws.stage, kernel, w_self, &mut ws.k4, &mut ws.conv);

    let sixth = dt / 6.0;
    for i in 0..n {
        ws.candidate.x[i] = periodic_wrap(
            sys.x[i]
                + sixth * (ws.k1.dx[i] + 2.0 * ws.k2.dx[i] + 2.0 * ws.k3.dx[i] + ws.k4.dx[i]),
        );
        ws.candidate.u[i] = sys.u[i]
            + sixth * (ws.k1.du[i] + 2.0 * ws.k2.du[i] + 2.0 * ws.k3.du[i] + ws.k4.du[i]);
        ws.candidate.rho[i] = sys.rho[i]
            + sixth
                * (ws.k1.drho[i] + 2.0 * ws.k2.drho[i] + 2.0 * ws.k3.drho[i] + ws.k4.drho[i]);
        ws.candidate.g[i] = sys.g[i]
            + sixth * (ws.k1.dg[i] + 2.0 * ws.k2.dg[i] + 2.0 * ws.k3.dg[i] + ws.k4.dg[i]);
    }
    for i in 0..n {
        let c = &ws.candidate;
        if !(c.rho[i] >= 0.0) || !c.rho[i].is_finite() || !c.u[i].is_finite()
            || !c.g[i].is_finite()
        {
            return None;
        }
    }
    Some(degen)
}

#[allow(clippy::needless_range_loop)] // several arrays share each index
fn diagnostics_row(
    sys: &ParticleSystem,
    t: f64,
    mass0: f64,
    momentum0: f64,
    ratio0: &[f64],
) -> (DiagnosticsRow, f64) {
    let mut rho_max = f64::NEG_INFINITY;
    let mut g_abs_max = f64::NEG_INFINITY;
    let mut g_min = f64::INFINITY;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_drift: f64 = 0.0;
    for i in 0..sys.len() {
        rho_max = rho_max.max(sys.rho[i]);
        g_abs_max = g_abs_max.max(sys.g[i].abs());
        g_min = g_min.min(sys.g[i]);
        if ratio0[i].is_finite() {
            let q = sys.g[i] / sys.rho[i];
            ratio_min = ratio_min.min(q);
            ratio_drift = ratio_drift.max((q - ratio0[i]).abs());
        }
    }
    let mass = sys.total_mass();
    let momentum = sys.total_momentum();
    let row = DiagnosticsRow {
        t,
        rho_inf: rho_max,
        g_inf: g_abs_max,
        g_min,
        ratio_min: if ratio_min.is_finite() { ratio_min } else { f64::NAN },
        mass_drift: (mass - mass0).abs() / mass0,
        momentum_drift: (momentum - momentum0).abs() / momentum0.abs().max(mass0),
    };
    (row, ratio_drift)
}

/// Integrate the system to t_end with classical RK4 and local step halving.
///
/// A step is rejected when the first-stage density change would exceed the
/// density itself or the update leaves the finite/nonnegative range; the
/// step is then retried at dt/2 down to 1e-9, after which the run aborts
/// with [`Error::NumericalAbort`]. Halts with `BlowupDetected` as soon as
/// any particle density exceeds `rho_cap`.
pub fn integrate(
    sys: ParticleSystem,
    kernel: &Kernel,
    opts: &IntegrateOptions,
) -> Result<LagrangianRun> {
    opts.validate()?;
    if sys.is_empty() {
        return Err(Error::DegenerateState("no particles".into()));
    }
    let mut sys = sys;
    let w_self = self_weight(kernel, sys.len());
    let mass0 = sys.total_mass();
    if mass0 <= 0.0 {
        return Err(Error::DegenerateState(
            "all particle masses are zero".into(),
        ));
    }
    let momentum0 = sys.total_momentum();
    let ratio0: Vec<f64> = sys
        .rho
        .iter()
        .zip(&sys.g)
        .map(|(r, g)| {
            if *r > RATIO_SUPPORT_THRESHOLD {
                g / r
            } else {
                f64::NAN
            }
        })
        .collect();

    let mut ws = Rk4Workspace::new(&sys);
    let mut recorder = Recorder::new();
    let mut trajectory = Vec::new();
    let mut t = 0.0;

    let frame = |sys: &ParticleSystem, t: f64| TrajectoryFrame {
        t,
        x: sys.x.clone(),
        u: sys.u.clone(),
        rho: sys.rho.clone(),
        g: sys.g.clone(),
    };

    let (row0, drift0) = diagnostics_row(&sys, t, mass0, momentum0, &ratio0);
    recorder.observe(row0, true);
    recorder.note_ratio_drift(drift0);
    if opts.record_trajectory {
        trajectory.push(frame(&sys, t));
    }

    // Relative horizon guard: rounding in t += dt must not leave a sliver
    // smaller than the minimum step.
    let horizon = opts.t_end * (1.0 - 1e-12);
    let outcome = loop {
        if sys.rho.iter().any(|r| *r > opts.rho_cap) {
            break Outcome::BlowupDetected { t };
        }
        if t >= horizon {
            break Outcome::CompletedGlobal;
        }
        let mut dt = opts.dt.min(opts.t_end - t);
        loop {
            if dt < DT_MIN {
                return Err(Error::NumericalAbort { t, dt_min: DT_MIN });
            }
            match try_rk4_step(&sys, kernel, w_self, dt, &mut ws) {
                Some(degen) => {
                    recorder.add_degeneracies(degen);
                    break;
                }
                None => dt *= 0.5,
            }
        }
        std::mem::swap(&mut sys, &mut ws.candidate);
        t += dt;
        recorder.count_step();
        let record = recorder.steps().is_multiple_of(opts.output_stride as u64);
        let (row, drift) = diagnostics_row(&sys, t, mass0, momentum0, &ratio0);
        recorder.observe(row, record);
        recorder.note_ratio_drift(drift);
        if opts.record_trajectory && recorder.steps().is_multiple_of(opts.trajectory_stride as u64) {
            trajectory.push(frame(&sys, t));
        }
    };

    if !recorder.step_recorded() {
        let (row, drift) = diagnostics_row(&sys, t, mass0, momentum0, &ratio0);
        recorder.observe(row, true);
        recorder.note_ratio_drift(drift);
    }
    if opts.record_trajectory
        && trajectory.last().map(|f| f.t) != Some(t)
    {
        trajectory.push(frame(&sys, t));
    }
    Ok(LagrangianRun {
        diagnostics: recorder.finish(outcome, t),
        trajectory,
        final_state: sys,
    })
}

/// Trajectory CSV: header `t,x_0..,u_0..,rho_0..,G_0..` as per-particle blocks.
pub fn write_trajectory_csv<W: std::io::Write>(
    frames: &[TrajectoryFrame],
    mut w: W,
) -> std::io::Result<()> {
    let n = frames.first().map(|f| f.x.len()).unwrap_or(0);
    let mut header = String::from("t");
    for tag in ["x", "u", "rho", "G"] {
        for i in 0..n {
            header.push_str(&format!(",{tag}_{i}"));
        }
    }
    writeln!(w, "{header}")?;
    for f in frames {
        let mut line = format!("{}", f.t);
        for arr in [&f.x, &f.u, &f.rho, &f.g] {
            for v in arr.iter() {
                line.push_str(&format!(",{v}"));
            }
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn l1(alpha: f64) -> f64 {
        2.0f64.powf(alpha) / (1.0 - alpha)
    }

    #[test]
    fn seed_uniform_density_masses() {
        let sys = seed_particles(|_| 1.0, |_| 0.0, |_| 1.0, 10).unwrap();
        for &m in &sys.m {
            assert!((m - 0.1).abs() < 1e-16);
        }
        assert!((sys.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn seed_rejects_tiny_systems_and_vacuum() {
        assert!(seed_particles(|_| 1.0, |_| 0.0, |_| 1.0, 1).is_err());
        assert!(matches!(
            seed_particles(|_| 0.0, |_| 0.0, |_| 1.0, 8),
            Err(Error::DegenerateState(_))
        ));
    }

    #[test]
    fn seed_mass_quadrature_second_order_envelope() {
        // Kinked density: midpoint-rule mass converges at order 2.
        let rho0 = |x: f64| 1.0 + (1.0 - x.abs() / 0.25).max(0.0);
        let exact = 1.0 + 0.25;
        for &n in &[50usize, 100, 200, 400] {
            let sys = seed_particles(rho0, |_| 0.0, |_| 1.0, n).unwrap();
            let err = (sys.total_mass() - exact).abs();
            let envelope = 1.0 / (n * n) as f64;
            assert!(err <= envelope, "n = {n}: err {err:e} > {envelope:e}");
        }
    }

    #[test]
    fn seed_proportional_g_gives_constant_ratio() {
        let c = 2.5;
        let sys = seed_particles(
            |x| 1.0 + 0.3 * (2.0 * PI * x).cos(),
            |_| 0.0,
            move |x| c * (1.0 + 0.3 * (2.0 * PI * x).cos()),
            64,
        )
        .unwrap();
        for i in 0..sys.len() {
            assert!((sys.g[i] / sys.rho[i] - c).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_flock_is_equilibrium_for_constant_kernel() {
        // Constant kernel makes the pair quadrature exact: derivatives vanish.
        let mass = 1.0;
        let kernel = Kernel::constant(1.0).unwrap();
        let g0 = mass * 1.0;
        let sys = seed_particles(|_| mass, |_| 0.25, move |_| g0, 32).unwrap();
        let (d, degen) = rhs(&sys, &kernel);
        assert_eq!(degen, 0);
        for i in 0..sys.len() {
            assert!(d.du[i].abs() < 1e-14);
            assert!(d.drho[i].abs() < 1e-13, "drho = {:e}", d.drho[i]);
            assert!(d.dg[i].abs() < 1e-13);
        }
    }

    #[test]
    fn flat_flock_quadrature_error_shrinks_with_n() {
        // Singular kernel: the equilibrium defect is the O(n^(alpha-1))
        // quadrature error of the pair sum.
        let kernel = Kernel::power_law(0.5).unwrap();
        let g0 = l1(0.5);
        let defect = |n: usize| {
            let sys = seed_particles(|_| 1.0, |_| 0.0, move |_| g0, n).unwrap();
            let (d, _) = rhs(&sys, &kernel);
            d.drho.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()))
        };
        let d64 = defect(64);
        let d256 = defect(256);
        assert!(d256 < d64, "defect must shrink: {d64:e} -> {d256:e}");
        assert!(d256 < 5e-2);
    }

    #[test]
    fn coincident_particles_with_singular_kernel_log_degeneracies() {
        let kernel = Kernel::power_law(0.5).unwrap();
        let sys = ParticleSystem {
            x: vec![0.1, 0.1, -0.3],
            u: vec![0.0, 0.0, 0.0],
            rho: vec![1.0, 1.0, 1.0],
            g: vec![1.0, 1.0, 1.0],
            m: vec![0.3, 0.3, 0.4],
        };
        let (d, degeneracies) = rhs(&sys, &kernel);
        assert_eq!(degeneracies, 1, "one coincident pair");
        assert!(d.drho.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn two_body_alignment_hand_value() {
        let kernel = Kernel::constant(1.0).unwrap();
        let v = 0.3;
        let sys = ParticleSystem {
            x: vec![-0.2, 0.2],
            u: vec![v, -v],
            rho: vec![1.0, 1.0],
            g: vec![1.0, 1.0],
            m: vec![0.5, 0.5],
        };
        let (d, _) = rhs(&sys, &kernel);
        // du_1 = m psi(0.4) (u_2 - u_1) = 0.5 * 1 * (-2v)
        assert!((d.du[0] - 0.5 * (-2.0 * v)).abs() < 1e-15);
        assert!((d.du[1] - 0.5 * (2.0 * v)).abs() < 1e-15);
        // Momentum of the right side vanishes.
        let p: f64 = sys.m.iter().zip(&d.du).map(|(m, du)| m * du).sum();
        assert!(p.abs() < 1e-16);
    }

    #[test]
    fn single_particle_logistic_closed_form() {
        // n = 1: conv = m w_self is constant; drho/dt = rho (conv - q rho)
        // with q = G0/rho0 is logistic with rate conv and capacity conv/q.
        let kernel = Kernel::constant(1.0).unwrap();
        let (rho0, g0) = (0.5, 0.25);
        let q = g0 / rho0;
        let sys = ParticleSystem {
            x: vec![0.0],
            u: vec![0.0],
            rho: vec![rho0],
            g: vec![g0],
            m: vec![1.0],
        };
        let conv = 1.0 * self_weight(&kernel, 1); // = |psi|_1 = 1
        assert!((conv - 1.0).abs() < 1e-12);
        let opts = IntegrateOptions {
            dt: 1e-3,
            t_end: 3.0,
            ..IntegrateOptions::default()
        };
        let out = integrate(sys, &kernel, &opts).unwrap();
        let t = out.diagnostics.final_time;
        let exact = conv * rho0 * (conv * t).exp()
            / (conv + q * rho0 * ((conv * t).exp() - 1.0));
        let got = out.final_state.rho[0];
        assert!(
            (got - exact).abs() < 1e-10,
            "rho({t}) = {got} vs logistic {exact}"
        );
        // The carried ratio never drifts.
        assert!(out.diagnostics.ratio_drift.unwrap() < 1e-12);
    }

    #[test]
    fn subcritical_conserves_ratio_and_momentum() {
        let kernel = Kernel::power_law(0.5).unwrap();
        let g0 = move |x: f64| 0.1 * 2.0 * PI * (2.0 * PI * x).cos() + l1(0.5);
        let sys =
            seed_particles(|_| 1.0, |x| 0.1 * (2.0 * PI * x).sin(), g0, 64).unwrap();
        let opts = IntegrateOptions {
            dt: 1e-3,
            t_end: 1.0,
            ..IntegrateOptions::default()
        };
        let out = integrate(sys, &kernel, &opts).unwrap();
        assert_eq!(out.diagnostics.outcome, Outcome::CompletedGlobal);
        assert!(out.diagnostics.ratio_drift.unwrap() < 1e-6);
        assert!(out.diagnostics.max_momentum_drift < 1e-10);
        assert!(out.diagnostics.min_g > -1e-10, "G sign preserved");
    }

    #[test]
    fn velocity_extrema_contract() {
        let kernel = Kernel::constant(1.0).unwrap();
        let g0 = move |x: f64| 0.2 * 2.0 * PI * (2.0 * PI * x).cos() + 1.0;
        let sys =
            seed_particles(|_| 1.0, |x| 0.2 * (2.0 * PI * x).sin(), g0, 48).unwrap();
        let opts = IntegrateOptions {
            dt: 1e-3,
            t_end: 2.0,
            record_trajectory: true,
            trajectory_stride: 50,
            ..IntegrateOptions::default()
        };
        let out = integrate(sys, &kernel, &opts).unwrap();
        let mut prev_max = f64::INFINITY;
        let mut prev_min = f64::NEG_INFINITY;
        for fr in &out.trajectory {
            let umax = fr.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let umin = fr.u.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(umax <= prev_max + 1e-8, "max u grew: {umax} > {prev_max}");
            assert!(umin >= prev_min - 1e-8, "min u fell: {umin} < {prev_min}");
            prev_max = umax;
            prev_min = umin;
        }
    }

    #[test]
    fn negative_g_seed_blows_up_and_earlier_for_stronger_seeds() {
        let kernel = Kernel::power_law(0.5).unwrap();
        let hit_time = |amp: f64| {
            let g0 = move |x: f64| amp * 2.0 * PI * (2.0 * PI * x).cos() + l1(0.5);
            let sys = seed_particles(
                |_| 1.0,
                move |x| amp * (2.0 * PI * x).sin(),
                g0,
                64,
            )
            .unwrap();
            let opts = IntegrateOptions {
                dt: 1e-3,
                t_end: 20.0,
                rho_cap: 1e6,
                ..IntegrateOptions::default()
            };
            let out = integrate(sys, &kernel, &opts).unwrap();
            match out.diagnostics.outcome {
                Outcome::BlowupDetected { t } => t,
                other => panic!("expected blow-up, got {other:?}"),
            }
        };
        let t_weak = hit_time(-1.0);
        let t_strong = hit_time(-2.0);
        assert!(t_strong < t_weak, "{t_strong} !< {t_weak}");
    }

    #[test]
    fn unbounded_growth_without_cap_aborts_at_dt_min() {
        let kernel = Kernel::power_law(0.5).unwrap();
        let g0 = move |x: f64| -2.0 * 2.0 * PI * (2.0 * PI * x).cos() + l1(0.5);
        let sys = seed_particles(
            |_| 1.0,
            move |x| -2.0 * (2.0 * PI * x).sin(),
            g0,
            32,
        )
        .unwrap();
        let opts = IntegrateOptions {
            dt: 1e-2,
            t_end: 20.0,
            rho_cap: f64::INFINITY,
            ..IntegrateOptions::default()
        };
        match integrate(sys, &kernel, &opts) {
            Err(Error::NumericalAbort { .. }) => {}
            other => panic!("expected numerical abort, got {other:?}"),
        }
    }

    #[test]
    fn trajectory_csv_has_block_header() {
        let frames = vec![TrajectoryFrame {
            t: 0.0,
            x: vec![0.1, 0.2],
            u: vec![0.0, 0.0],
            rho: vec![1.0, 1.0],
            g: vec![1.0, 1.0],
        }];
        let mut buf = Vec::new();
        write_trajectory_csv(&frames, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x_0,x_1,u_0,u_1,rho_0,rho_1,G_0,G_1"));
    }
}
