//! `alignsim`: bounds, simulations and verification campaigns for the 1D
//! pressureless Euler-alignment system on the torus.
//!
//! Exit codes: 0 success, 1 verification assertion failure, 2 usage or
//! configuration error, 3 numerical abort (minimum step reached).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use euler_alignment::bounds::{self, BoundInputs, BoundReport};
use euler_alignment::config::{self, KernelConfig, RunConfig, Scheme};
use euler_alignment::error::Error;
use euler_alignment::harness::{self, Campaign, Rung, Scenario, VerificationReport};
use euler_alignment::lagrangian;
use euler_alignment::Kernel;

#[derive(Parser)]
#[command(
    name = "alignsim",
    about = "Euler-alignment solvers and density-bound calculators on the periodic domain",
    arg_required_else_help = true,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the uniform density/G bounds for a kernel and data scalars.
    Bound(BoundArgs),
    /// Run one simulation from a config file.
    Simulate(SimulateArgs),
    /// Run a verification scenario; exits 0 iff every assertion passes.
    Verify(VerifyArgs),
    /// Tabulate k0, k*, beta and gamma over a parameter grid.
    Sweep(SweepArgs),
    /// Cross-validate the Eulerian and Lagrangian solvers.
    Compare(CompareArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Config file providing [kernel] and [bound] blocks.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Power-law exponent (quick flag; overrides the config kernel).
    #[arg(long)]
    alpha: Option<f64>,
    /// Constant-kernel value (quick flag).
    #[arg(long)]
    sup_norm: Option<f64>,
    /// Total mass M.
    #[arg(long)]
    mass: Option<f64>,
    /// Ratio threshold C0 = inf G0/rho0.
    #[arg(long)]
    c0: Option<f64>,
    /// Sup norm of the initial density.
    #[arg(long)]
    rho_sup: Option<f64>,
    /// Sup norm of the initial G.
    #[arg(long)]
    g_sup: Option<f64>,
    /// Also append the report as a CSV row to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the scheme from the config: eulerian or lagrangian.
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario: subcritical, supercritical, max-principle, bounded-kernel,
    /// cross-validate, blowup-refinement, or all.
    #[arg(long)]
    scenario: String,
    /// Optional config file supplying the kernel and data preset; the
    /// default campaign set is used otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shrink ladders and horizons for a quick smoke run.
    #[arg(long)]
    fast: bool,
    /// Write the structured reports (JSON) here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Power-law exponents.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.5, 0.75, 0.9])]
    alphas: Vec<f64>,
    /// Optionally add a constant kernel of this value to the family.
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
    masses: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.5, 1.0, 2.0, 4.0])]
    c0s: Vec<f64>,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Optional config file supplying the kernel and data preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::NumericalAbort { .. } => 3,
        _ => 2,
    }
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

fn cmd_bound(args: BoundArgs) -> Result<ExitCode, Error> {
    let file_config = args
        .config
        .as_ref()
        .map(config::parse_config)
        .transpose()?;

    let kernel_config = if let Some(alpha) = args.alpha {
        KernelConfig::power_law(alpha)
    } else if let Some(value) = args.sup_norm {
        KernelConfig::constant(value)
    } else if let Some(cfg) = &file_config {
        cfg.kernel.clone()
    } else {
        return Err(Error::config(
            "bound needs --alpha, --sup-norm, or --config with a [kernel] block",
        ));
    };
    kernel_config.validate()?;

    let bound_block = file_config.as_ref().and_then(|c| c.bound.clone());
    let mass = args
        .mass
        .or(bound_block.as_ref().and_then(|b| b.mass))
        .unwrap_or(1.0);
    let c0 = args
        .c0
        .or(bound_block.as_ref().and_then(|b| b.c0))
        .unwrap_or(1.0);
    let rho_sup = args
        .rho_sup
        .or(bound_block.as_ref().and_then(|b| b.rho_sup_norm))
        .unwrap_or(0.0);
    let g_sup = args
        .g_sup
        .or(bound_block.as_ref().and_then(|b| b.g0_sup_norm))
        .unwrap_or(0.0);

    let kernel = kernel_config.to_kernel()?;
    let inputs = BoundInputs::new(mass, c0, kernel.clone())?.with_data_sups(rho_sup, g_sup)?;
    let report = bounds::compute_report(&inputs);
    let rough = bounds::rough_bound_step1(&inputs);
    print_bound_report(&kernel_config, &kernel, &inputs, &report, rough);

    if let Some(path) = &args.csv {
        let fresh = !path.exists();
        let mut w = BufWriter::new(
            File::options().create(true).append(true).open(path)?,
        );
        if fresh {
            writeln!(w, "alpha_or_kind,M,C0,k0,k_star,beta,gamma,regime")?;
        }
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            kernel_config.describe(),
            mass,
            c0,
            opt(report.k0),
            opt(report.k_star),
            report.beta,
            report.gamma,
            report.regime
        )?;
        println!("csv row appended to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn print_bound_report(
    kc: &KernelConfig,
    kernel: &Kernel,
    inputs: &BoundInputs,
    report: &BoundReport,
    rough: f64,
) {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    println!("kernel        {}", kc.describe());
    println!("mass M        {}", inputs.mass);
    println!("C0            {}", inputs.c0);
    println!("|psi|_1       {}", kernel.l1_norm());
    println!("regime        {}", report.regime);
    println!("k0            {}", opt(report.k0));
    println!("k*            {}", opt(report.k_star));
    println!("beta          {}", report.beta);
    println!("gamma         {}", report.gamma);
    println!("rho bound     {}   (= max(|rho0|_inf, beta))", report.rho_bound);
    println!("G bound       {}   (= max(|G0|_inf, gamma))", report.g_bound);
    println!("rough bound   {}   (first-pass, always >= the refined bound)", rough);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let mut cfg = config::parse_config(&args.config)?;
    if let Some(scheme) = args.scheme {
        cfg.solver.get_or_insert_with(Default::default).scheme = Some(scheme);
        cfg.validate()?;
    }
    let data = cfg
        .data
        .as_ref()
        .ok_or_else(|| Error::config("simulate requires a [data] block"))?;
    let solver = cfg.solver.clone().unwrap_or_default();
    let output = cfg.output.clone().unwrap_or_default();
    let preset = data.to_preset()?;
    let kernel = cfg.kernel.to_kernel()?;

    match solver.scheme()? {
        Scheme::Eulerian => {
            let sim = solver.to_sim_config()?;
            let snap_times = output.snapshot_times.clone().unwrap_or_default();
            let p = preset.clone();
            let q = preset.clone();
            let run = euler_alignment::eulerian::run_with_snapshots(
                &sim,
                move |x| p.rho0(x),
                move |x| q.u0(x),
                &kernel,
                &snap_times,
            )?;
            println!(
                "eulerian N = {}, t_end = {}: outcome {:?} after {} steps",
                sim.n, sim.t_end, run.diagnostics.outcome, run.diagnostics.steps
            );
            println!(
                "init: mass {} momentum {} C0 {} inf G0 {}",
                run.init.mass, run.init.momentum, run.init.c0, run.init.inf_g0
            );
            println!(
                "running maxima: |rho|_inf {} |G|_inf {} min G {} mass drift {:e} momentum drift {:e}",
                run.diagnostics.max_rho_inf,
                run.diagnostics.max_g_inf,
                run.diagnostics.min_g,
                run.diagnostics.max_mass_drift,
                run.diagnostics.max_momentum_drift
            );
            if let Some(path) = &output.diagnostics {
                run.diagnostics.write_csv(BufWriter::new(File::create(path)?))?;
                println!("diagnostics csv written to {path}");
            }
            if let Some(path) = &output.snapshots {
                let mut w = BufWriter::new(File::create(path)?);
                for snap in &run.snapshots {
                    writeln!(w, "# t = {}", snap.t)?;
                    snap.write_csv(&mut w)?;
                }
                println!("{} snapshots written to {path}", run.snapshots.len());
            }
        }
        Scheme::Lagrangian => {
            let mut opts = solver.to_integrate_options(
                output.trajectory_stride.unwrap_or(100),
            )?;
            opts.record_trajectory = output.trajectory.is_some();
            let l1 = kernel.l1_norm();
            let g0 = preset
                .g0_fn(l1, cfg.kernel.is_constant())
                .ok_or_else(|| {
                    Error::config(
                        "this preset/kernel pair has no closed-form G0 for particle seeding",
                    )
                })?;
            let sys = lagrangian::seed_particles(
                |x| preset.rho0(x),
                |x| preset.u0(x),
                g0,
                solver.particles(),
            )?;
            let run = lagrangian::integrate(sys, &kernel, &opts)?;
            println!(
                "lagrangian n = {}, t_end = {}: outcome {:?} after {} steps",
                solver.particles(),
                opts.t_end,
                run.diagnostics.outcome,
                run.diagnostics.steps
            );
            println!(
                "running maxima: max rho_i {} max |G_i| {} min G_i {} ratio drift {:?} degeneracies {}",
                run.diagnostics.max_rho_inf,
                run.diagnostics.max_g_inf,
                run.diagnostics.min_g,
                run.diagnostics.ratio_drift,
                run.diagnostics.degeneracy_events
            );
            if let Some(path) = &output.diagnostics {
                run.diagnostics.write_csv(BufWriter::new(File::create(path)?))?;
                println!("diagnostics csv written to {path}");
            }
            if let Some(path) = &output.trajectory {
                lagrangian::write_trajectory_csv(
                    &run.trajectory,
                    BufWriter::new(File::create(path)?),
                )?;
                println!("trajectory csv written to {path}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify / compare
// ---------------------------------------------------------------------------

fn campaigns_for(scenario: Scenario, cfg: Option<&RunConfig>) -> Result<Vec<Campaign>, Error> {
    let mut campaigns = match cfg {
        None => harness::default_campaigns(scenario),
        Some(cfg) => {
            let data = cfg
                .data
                .as_ref()
                .ok_or_else(|| Error::config("verify --config requires a [data] block"))?;
            let mut campaign = harness::default_campaigns(scenario)
                .into_iter()
                .next()
                .expect("every scenario has a default");
            campaign.name = format!("{scenario}-from-config");
            campaign.kernel = cfg.kernel.clone();
            campaign.preset = data.to_preset()?;
            if let Some(solver) = &cfg.solver {
                if let Some(t_end) = solver.t_end {
                    campaign.t_end = t_end;
                }
                if let Some(grid) = solver.grid {
                    campaign.ladder = vec![Rung {
                        resolution: grid,
                        dt: solver.dt.unwrap_or(4e-3),
                    }];
                }
            }
            vec![campaign]
        }
    };
    for c in &mut campaigns {
        c.validate()?;
    }
    Ok(campaigns)
}

fn shrink_for_fast(c: &mut Campaign) {
    c.ladder.retain(|r| r.resolution <= 256);
    if c.ladder.is_empty() {
        c.ladder = vec![Rung { resolution: 128, dt: 1.6e-2 }];
    }
    match c.scenario {
        // Blow-up happens early; keep the horizon.
        Scenario::Supercritical | Scenario::BlowupRefinement => {}
        _ => c.t_end = c.t_end.min(2.0),
    }
}

fn run_reports(campaigns: Vec<Campaign>) -> Result<(Vec<VerificationReport>, bool), Error> {
    let mut reports = Vec::new();
    let mut all_passed = true;
    for campaign in &campaigns {
        let report = harness::run_campaign(campaign)?;
        print!("{}", report.render_text());
        all_passed &= report.passed();
        reports.push(report);
    }
    Ok((reports, all_passed))
}

fn write_reports(path: &PathBuf, reports: &[VerificationReport]) -> Result<(), Error> {
    let json = serde_json_vec(reports);
    std::fs::write(path, json)?;
    println!("reports written to {}", path.display());
    Ok(())
}

fn serde_json_vec(reports: &[VerificationReport]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in reports.iter().enumerate() {
        out.push_str(&r.to_json());
        if i + 1 < reports.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push(']');
    out
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let cfg = args.config.as_ref().map(config::parse_config).transpose()?;
    let scenarios: Vec<Scenario> = if args.scenario == "all" {
        vec![
            Scenario::Subcritical,
            Scenario::Supercritical,
            Scenario::MaxPrinciple,
            Scenario::BoundedKernel,
            Scenario::CrossValidate,
            Scenario::BlowupRefinement,
        ]
    } else {
        vec![args.scenario.parse()?]
    };
    let mut campaigns = Vec::new();
    for s in scenarios {
        campaigns.extend(campaigns_for(s, cfg.as_ref())?);
    }
    if args.fast {
        for c in &mut campaigns {
            shrink_for_fast(c);
        }
    }
    let (reports, all_passed) = run_reports(campaigns)?;
    if let Some(path) = &args.report {
        write_reports(path, &reports)?;
    }
    println!(
        "verify: {}/{} campaigns passed",
        reports.iter().filter(|r| r.passed()).count(),
        reports.len()
    );
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, Error> {
    let cfg = args.config.as_ref().map(config::parse_config).transpose()?;
    let mut campaigns = campaigns_for(Scenario::CrossValidate, cfg.as_ref())?;
    if args.fast {
        for c in &mut campaigns {
            shrink_for_fast(c);
        }
    }
    let (reports, all_passed) = run_reports(campaigns)?;
    if let Some(path) = &args.report {
        write_reports(path, &reports)?;
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let mut kernels: Vec<KernelConfig> =
        args.alphas.iter().map(|&a| KernelConfig::power_law(a)).collect();
    if let Some(c) = args.constant {
        kernels.push(KernelConfig::constant(c));
    }
    for k in &kernels {
        k.validate()?;
    }
    let rows = harness::sweep_beta_surface(&kernels, &args.masses, &args.c0s)?;
    match &args.csv {
        Some(path) => {
            harness::write_sweep_csv(&rows, BufWriter::new(File::create(path)?))?;
            println!("{} rows written to {}", rows.len(), path.display());
        }
        None => {
            harness::write_sweep_csv(&rows, std::io::stdout().lock())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
