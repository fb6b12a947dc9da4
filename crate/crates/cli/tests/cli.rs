//! End-to-end CLI tests against the compiled `alignsim` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn alignsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alignsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("alignsim-test-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bound_headline_example() {
    let out = alignsim(&["bound", "--alpha", "0.5", "--mass", "1", "--c0", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("beta          16"), "{text}");
    assert!(text.contains("k*            8"), "{text}");
    assert!(text.contains("k0            4"), "{text}");
    assert!(text.contains("optimized-analytic"), "{text}");
}

#[test]
fn bound_writes_csv() {
    let dir = scratch_dir("bound-csv");
    let csv = dir.join("bounds.csv");
    let out = alignsim(&[
        "bound",
        "--alpha",
        "0.5",
        "--mass",
        "1",
        "--c0",
        "1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha_or_kind,M,C0,k0,k_star,beta,gamma,regime"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("powerlaw(alpha=0.5),1,1,4,8,16,"), "{row}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn no_arguments_exits_2_with_usage() {
    let out = alignsim(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = alignsim(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_alpha_exits_2_and_names_the_interval() {
    let out = alignsim(&["bound", "--alpha", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("(0, 1)"), "{}", stderr(&out));
}

#[test]
fn config_errors_are_accumulated() {
    let dir = scratch_dir("badcfg");
    let cfg = dir.join("bad.toml");
    fs::write(
        &cfg,
        r#"
[kernel]
kind = "powerlaw"
alpha = 1.7

[data]
preset = "sine"

[solver]
grid = 33
"#,
    )
    .unwrap();
    let out = alignsim(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("alpha"), "{err}");
    assert!(err.contains("33"), "{err}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_eulerian_writes_deterministic_csv() {
    let dir = scratch_dir("simulate");
    let cfg = dir.join("run.toml");
    let diag = dir.join("diag.csv");
    let snap = dir.join("snap.csv");
    fs::write(
        &cfg,
        format!(
            r#"
[kernel]
kind = "powerlaw"
alpha = 0.5

[data]
preset = "sine"
mass = 1.0
amplitude = 0.1
mode = 1

[solver]
scheme = "eulerian"
grid = 64
t_end = 1.0
order = 2

[output]
diagnostics = "{}"
snapshots = "{}"
snapshot_times = [0.0, 1.0]
"#,
            diag.display(),
            snap.display()
        ),
    )
    .unwrap();
    let out = alignsim(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("CompletedGlobal"));

    let first = fs::read_to_string(&diag).unwrap();
    assert!(first.starts_with(
        "t,rho_inf,G_inf,G_min,ratio_min,mass_drift,momentum_drift"
    ));
    let snap_text = fs::read_to_string(&snap).unwrap();
    assert!(snap_text.contains("x,rho,G,u"));

    // Identical config implies bit-identical outputs.
    let out = alignsim(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let second = fs::read_to_string(&diag).unwrap();
    assert_eq!(first, second, "outputs must be deterministic");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_lagrangian_scheme_flag_overrides() {
    let dir = scratch_dir("simulate-lag");
    let cfg = dir.join("run.toml");
    let traj = dir.join("traj.csv");
    fs::write(
        &cfg,
        format!(
            r#"
[kernel]
kind = "constant"
sup_norm = 1.0

[data]
preset = "sine"
mass = 1.0
amplitude = 0.1
mode = 1

[solver]
grid = 32
dt = 1e-3
t_end = 0.5

[output]
trajectory = "{}"
trajectory_stride = 100
"#,
            traj.display()
        ),
    )
    .unwrap();
    let out = alignsim(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--scheme",
        "lagrangian",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("lagrangian n = 32"));
    let text = fs::read_to_string(&traj).unwrap();
    assert!(text.starts_with("t,x_0"), "{}", &text[..40.min(text.len())]);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_max_principle_fast_passes_with_report() {
    let dir = scratch_dir("verify");
    let report = dir.join("report.json");
    let out = alignsim(&[
        "verify",
        "--scenario",
        "max-principle",
        "--fast",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS"), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(json.as_array().unwrap().iter().all(|r| r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .all(|a| a["passed"].as_bool().unwrap())));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_unknown_scenario_exits_2() {
    let out = alignsim(&["verify", "--scenario", "warp-drive"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_emits_headline_row() {
    let out = alignsim(&[
        "sweep",
        "--alphas",
        "0.5",
        "--masses",
        "1",
        "--c0s",
        "1,4",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha_or_kind,M,C0,k0,k_star,beta,gamma,regime,beta_analytic,numeric_analytic_gap"
    );
    let headline = lines.next().unwrap();
    assert!(headline.starts_with("powerlaw(alpha=0.5),1,1,4,8,16,"), "{headline}");
    // C0 = 4 > |psi|_1: the max-principle row has beta = 0.
    let mp = lines.next().unwrap();
    assert!(mp.contains(",0,"), "{mp}");
    assert!(mp.contains("max-principle"), "{mp}");
}

#[test]
fn compare_fast_exits_0() {
    let out = alignsim(&["compare", "--fast"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("cross-agreement-finest"));
}

#[test]
fn compare_under_resolved_grid_fails_with_exit_1() {
    // At 32 cells/particles the solver disagreement genuinely exceeds the
    // 3% gate; the assertion failure must map to exit code 1.
    let dir = scratch_dir("compare-coarse");
    let cfg = dir.join("coarse.toml");
    fs::write(
        &cfg,
        r#"
[kernel]
kind = "powerlaw"
alpha = 0.5

[data]
preset = "sine"
mass = 1.0
amplitude = 0.1
mode = 1

[solver]
grid = 32
dt = 6.4e-2
t_end = 5.0
"#,
    )
    .unwrap();
    let out = alignsim(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn bound_reads_kernel_and_scalars_from_config() {
    let dir = scratch_dir("bound-cfg");
    let cfg = dir.join("bound.toml");
    fs::write(
        &cfg,
        r#"
[kernel]
kind = "tabulated"
table_radii = [0.01, 0.05, 0.1]
table_values = [50.0, 5.0, 0.5]

[bound]
mass = 1.0
c0 = 2.0
rho_sup_norm = 1.0
"#,
    )
    .unwrap();
    let out = alignsim(&["bound", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    // Bounded kernel: beta = M sup / C0 = 50 / 2 = 25.
    assert!(text.contains("bounded-kernel"), "{text}");
    assert!(text.contains("beta          25"), "{text}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_numerical_abort_exits_3() {
    // Supercritical particle run with an unreachable cap: the step-halving
    // cascade bottoms out at dt_min and the run aborts.
    let dir = scratch_dir("abort");
    let cfg = dir.join("abort.toml");
    fs::write(
        &cfg,
        r#"
[kernel]
kind = "powerlaw"
alpha = 0.5

[data]
preset = "sine"
mass = 1.0
amplitude = -2.0
mode = 1

[solver]
scheme = "lagrangian"
grid = 32
dt = 1e-2
t_end = 20.0
rho_cap = 1e300
"#,
    )
    .unwrap();
    let out = alignsim(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("numerical abort"), "{}", stderr(&out));
    fs::remove_dir_all(&dir).ok();
}
