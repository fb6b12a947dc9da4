//! Uniform solution bounds from the structure of the influence kernel.
//!
//! The density bound beta is the infimum of g(k) = M k / (C0 - I(k)) over
//! thresholds k whose level set {psi >= k} has kernel weight I(k) strictly
//! below C0 = inf G0/rho0. The case split:
//!
//! - C0 > |psi|_1: beta = 0 (maximum principle on rho),
//! - psi bounded: beta = M |psi|_inf / C0,
//! - otherwise: minimize g over (k0, inf), with k0 = sup{k : I(k) >= C0}.
//!
//! The G bound gamma is M |psi|_inf for bounded kernels and
//! |psi|_1 max(|rho0|_inf, beta) otherwise. The uniform bounds are then
//! max(|rho0|_inf, beta) and max(|G0|_inf, gamma).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numerics::{golden_min, log_spaced};

/// Number of log-spaced scan points for the numeric minimization of g.
const SCAN_POINTS: usize = 512;
/// Scan window above k0, multiplicative.
const SCAN_SPAN: f64 = 1e6;
/// Relative tolerance of the golden-section refinement.
const GOLDEN_REL_TOL: f64 = 1e-8;
/// Relative tolerance of the k0 bisection.
const BISECT_REL_TOL: f64 = 1e-10;

/// Inputs the bound machinery needs: conserved mass, the ratio threshold
/// C0 = inf G0/rho0 over the support of rho0, the kernel, and the sup norms
/// of the initial data.
#[derive(Debug, Clone)]
pub struct BoundInputs {
    pub mass: f64,
    pub c0: f64,
    pub kernel: Kernel,
    pub rho0_sup: f64,
    pub g0_sup: f64,
}

impl BoundInputs {
    pub fn new(mass: f64, c0: f64, kernel: Kernel) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidInput(format!(
                "total mass M = {mass} must be finite and > 0"
            )));
        }
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "ratio threshold C0 = {c0} must be finite and > 0"
            )));
        }
        Ok(BoundInputs {
            mass,
            c0,
            kernel,
            rho0_sup: 0.0,
            g0_sup: 0.0,
        })
    }

    /// Attach sup norms of the initial data (both default to 0).
    pub fn with_data_sups(mut self, rho0_sup: f64, g0_sup: f64) -> Result<Self> {
        if !(rho0_sup >= 0.0) || !(g0_sup >= 0.0) {
            return Err(Error::InvalidInput(
                "initial-data sup norms must be >= 0".into(),
            ));
        }
        self.rho0_sup = rho0_sup;
        self.g0_sup = g0_sup;
        Ok(self)
    }
}

/// Which branch of the case table produced beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// C0 exceeds the kernel weight: rho never exceeds its initial sup.
    MaxPrinciple,
    /// Bounded kernel: the empty level set at k = |psi|_inf is optimal.
    BoundedKernel,
    /// Scan plus golden-section minimization of g.
    OptimizedNumeric,
    /// Closed-form power-law minimizer, cross-checked against the numeric path.
    OptimizedAnalytic,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::MaxPrinciple => "max-principle",
            Regime::BoundedKernel => "bounded-kernel",
            Regime::OptimizedNumeric => "optimized-numeric",
            Regime::OptimizedAnalytic => "optimized-analytic",
        };
        f.write_str(s)
    }
}

/// The computed bounds and the quantities behind them.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub beta: f64,
    pub gamma: f64,
    /// Boundary of the admissible threshold range; absent when every k >= 0
    /// is admissible (C0 > |psi|_1).
    pub k0: Option<f64>,
    /// Minimizer of g when one is attained.
    pub k_star: Option<f64>,
    pub regime: Regime,
    /// max(|rho0|_inf, beta)
    pub rho_bound: f64,
    /// max(|G0|_inf, gamma)
    pub g_bound: f64,
}

/// k0 = sup{k : I(k) >= C0}, located by bisection on the nonincreasing I.
///
/// Returns `None` when C0 > |psi|_1 (no admissibility boundary; every k is
/// admissible). Step discontinuities of I are resolved to the jump location.
pub fn compute_k0(inputs: &BoundInputs) -> Option<f64> {
    let l1 = inputs.kernel.l1_norm();
    if inputs.c0 > l1 {
        return None;
    }
    let level = |k: f64| inputs.kernel.level_set_integral(k).expect("k >= 0");
    let mut hi = 1.0;
    let mut doublings = 0;
    while level(hi) >= inputs.c0 {
        hi *= 2.0;
        doublings += 1;
        assert!(doublings < 4000, "level-set integral failed to drop below C0");
    }
    let mut lo = 0.0;
    for _ in 0..4000 {
        if hi - lo <= BISECT_REL_TOL * hi.max(1e-280) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if level(mid) < inputs.c0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// g(k) = M k / (C0 - I(k)) for admissible k (I(k) < C0).
pub fn g_of_k(inputs: &BoundInputs, k: f64) -> Result<f64> {
    let level = inputs.kernel.level_set_integral(k)?;
    if level >= inputs.c0 {
        return Err(Error::InadmissibleK {
            k,
            level_integral: level,
            c0: inputs.c0,
        });
    }
    Ok(inputs.mass * k / (inputs.c0 - level))
}

/// g(k) as a total function for scanning: +inf when inadmissible.
fn g_or_inf(inputs: &BoundInputs, k: f64) -> f64 {
    match inputs.kernel.level_set_integral(k) {
        Ok(level) if level < inputs.c0 => inputs.mass * k / (inputs.c0 - level),
        _ => f64::INFINITY,
    }
}

/// Numeric minimization of g over the admissible range (k0, k0 * 1e6]:
/// dense log-spaced scan followed by golden-section refinement in the best
/// bracket. Returns (beta, k_star).
///
/// Requires C0 <= |psi|_1; with C0 above the kernel weight the infimum is 0
/// at k = 0 and no scan is needed.
pub fn compute_beta_numeric(inputs: &BoundInputs) -> Result<(f64, f64)> {
    let l1 = inputs.kernel.l1_norm();
    if inputs.c0 > l1 {
        return Err(Error::Domain(format!(
            "numeric minimization undefined for C0 = {} > |psi|_1 = {l1}; beta is 0",
            inputs.c0
        )));
    }
    let k0 = compute_k0(inputs).expect("C0 <= |psi|_1 guarantees k0 exists");
    let lo = if k0 > 0.0 { k0 * (1.0 + 1e-6) } else { 1e-9 };
    let hi = lo * SCAN_SPAN;
    let grid = log_spaced(lo, hi, SCAN_POINTS);
    let mut best = usize::MAX;
    let mut best_g = f64::INFINITY;
    for (i, &k) in grid.iter().enumerate() {
        let g = g_or_inf(inputs, k);
        if g < best_g {
            best_g = g;
            best = i;
        }
    }
    if best == usize::MAX {
        return Err(Error::Domain(
            "no admissible k found in the scan window".into(),
        ));
    }
    let bracket_lo = grid[best.saturating_sub(1)];
    let bracket_hi = grid[(best + 1).min(grid.len() - 1)];
    let (k_star, beta) = golden_min(
        |k| g_or_inf(inputs, k),
        bracket_lo,
        bracket_hi,
        GOLDEN_REL_TOL,
    );
    if beta <= best_g {
        Ok((beta, k_star))
    } else {
        Ok((best_g, grid[best]))
    }
}

/// Closed-form power-law quantities, valid while the level set of the
/// minimizer stays inside the torus.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawBeta {
    pub beta: f64,
    pub k_star: f64,
    pub k0: f64,
}

/// Why the analytic power-law path declined and the caller must fall back
/// to the numeric minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticFallback {
    /// C0 > |psi|_1: the maximum-principle case applies instead.
    C0ExceedsL1 { c0: f64, l1: f64 },
    /// The unclamped level-set formula is invalid at the closed-form
    /// minimizer: k_star^(-1/alpha) exceeds the torus half-width.
    LevelSetClamped { k_star: f64, radius: f64 },
}

impl std::fmt::Display for AnalyticFallback {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalyticFallback::C0ExceedsL1 { c0, l1 } => {
                write!(f, "C0 = {c0} exceeds |psi|_1 = {l1}")
            }
            AnalyticFallback::LevelSetClamped { k_star, radius } => write!(
                f,
                "level set of k* = {k_star} has radius {radius} > 1/2; formula clamped"
            ),
        }
    }
}

/// Closed forms for psi = |x|^(-alpha):
///
///   k0     = (2 / (C0 (1-alpha)))^(alpha/(1-alpha))
///   k_star = (2 / (C0 alpha (1-alpha)))^(alpha/(1-alpha))
///   beta   = (2/alpha)^(alpha/(1-alpha)) M / (C0 (1-alpha))^(1/(1-alpha))
pub fn beta_analytic_powerlaw(
    alpha: f64,
    mass: f64,
    c0: f64,
) -> std::result::Result<PowerLawBeta, AnalyticFallback> {
    assert!(
        alpha > 0.0 && alpha < 1.0 && mass > 0.0 && c0 > 0.0,
        "beta_analytic_powerlaw preconditions"
    );
    let l1 = 2.0f64.powf(alpha) / (1.0 - alpha);
    if c0 > l1 {
        return Err(AnalyticFallback::C0ExceedsL1 { c0, l1 });
    }
    let expo = alpha / (1.0 - alpha);
    let k0 = (2.0 / (c0 * (1.0 - alpha))).powf(expo);
    let k_star = (2.0 / (c0 * alpha * (1.0 - alpha))).powf(expo);
    let radius = k_star.powf(-1.0 / alpha);
    if radius > 0.5 {
        return Err(AnalyticFallback::LevelSetClamped { k_star, radius });
    }
    let beta =
        (2.0 / alpha).powf(expo) * mass / (c0 * (1.0 - alpha)).powf(1.0 / (1.0 - alpha));
    assert!(k_star > k0, "unique minimizer must sit above k0");
    Ok(PowerLawBeta { beta, k_star, k0 })
}

/// beta per the case table. Returns (beta, k_star if attained, regime).
pub fn compute_beta(inputs: &BoundInputs) -> (f64, Option<f64>, Regime) {
    let l1 = inputs.kernel.l1_norm();
    if inputs.c0 > l1 {
        return (0.0, None, Regime::MaxPrinciple);
    }
    if let Some(sup) = inputs.kernel.sup_norm() {
        // Limit k -> sup_norm with an empty level set; infimum not attained.
        return (inputs.mass * sup / inputs.c0, None, Regime::BoundedKernel);
    }
    let (beta_num, k_num) =
        compute_beta_numeric(inputs).expect("C0 <= |psi|_1 and unbounded kernel");
    if let Kernel::PowerLaw { alpha } = inputs.kernel {
        match beta_analytic_powerlaw(alpha, inputs.mass, inputs.c0) {
            Ok(a) => {
                let rel = (a.beta - beta_num).abs() / a.beta.abs().max(f64::MIN_POSITIVE);
                assert!(
                    rel <= 1e-6,
                    "analytic/numeric beta disagree: {} vs {beta_num} (rel {rel:e})",
                    a.beta
                );
                return (a.beta, Some(a.k_star), Regime::OptimizedAnalytic);
            }
            Err(_) => return (beta_num, Some(k_num), Regime::OptimizedNumeric),
        }
    }
    (beta_num, Some(k_num), Regime::OptimizedNumeric)
}

/// gamma: M |psi|_inf for bounded kernels, |psi|_1 max(|rho0|_inf, beta)
/// otherwise.
pub fn compute_gamma(inputs: &BoundInputs, beta: f64) -> f64 {
    match inputs.kernel.sup_norm() {
        Some(sup) => inputs.mass * sup,
        None => inputs.kernel.l1_norm() * inputs.rho0_sup.max(beta),
    }
}

/// The first-pass bound max(|rho0|_inf, 2 M k / C0) over the smallest
/// verified k with 4 I(k) < C0. Always at least as large as the refined
/// bound; exposed for cross-checks only.
pub fn rough_bound_step1(inputs: &BoundInputs) -> f64 {
    let level = |k: f64| inputs.kernel.level_set_integral(k).expect("k >= 0");
    let quarter = inputs.c0 / 4.0;
    if level(0.0) < quarter {
        return inputs.rho0_sup;
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while level(hi) >= quarter {
        hi *= 2.0;
        doublings += 1;
        assert!(doublings < 4000, "level-set integral failed to drop below C0/4");
    }
    let mut lo = 0.0;
    for _ in 0..4000 {
        if hi - lo <= BISECT_REL_TOL * hi.max(1e-280) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if level(mid) < quarter {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // hi is the smallest scanned k verified admissible.
    inputs.rho0_sup.max(2.0 * inputs.mass * hi / inputs.c0)
}

/// Assemble the full report: beta, gamma, thresholds and uniform bounds.
pub fn compute_report(inputs: &BoundInputs) -> BoundReport {
    let (beta, k_star, regime) = compute_beta(inputs);
    let gamma = compute_gamma(inputs, beta);
    let k0 = match (regime, &inputs.kernel) {
        // Report the closed-form k0 whenever the analytic path produced beta.
        (Regime::OptimizedAnalytic, Kernel::PowerLaw { alpha }) => {
            beta_analytic_powerlaw(*alpha, inputs.mass, inputs.c0)
                .ok()
                .map(|a| a.k0)
        }
        _ => compute_k0(inputs),
    };
    BoundReport {
        beta,
        gamma,
        k0,
        k_star,
        regime,
        rho_bound: inputs.rho0_sup.max(beta),
        g_bound: inputs.g0_sup.max(gamma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powerlaw_inputs(alpha: f64, mass: f64, c0: f64) -> BoundInputs {
        BoundInputs::new(mass, c0, Kernel::power_law(alpha).unwrap()).unwrap()
    }

    #[test]
    fn inputs_reject_nonpositive_mass_or_c0() {
        let k = Kernel::constant(1.0).unwrap();
        assert!(BoundInputs::new(0.0, 1.0, k.clone()).is_err());
        assert!(BoundInputs::new(1.0, 0.0, k.clone()).is_err());
        assert!(BoundInputs::new(-1.0, 1.0, k).is_err());
    }

    #[test]
    fn k0_power_law_closed_form() {
        // alpha = 1/2, C0 = 2: k0 = (2/(C0 (1-alpha)))^(alpha/(1-alpha)) = 2.
        let inputs = powerlaw_inputs(0.5, 1.0, 2.0);
        let k0 = compute_k0(&inputs).unwrap();
        assert!((k0 - 2.0).abs() < 1e-8, "k0 = {k0}");
        // Bisection agrees with the closed form over a grid.
        for &(alpha, c0) in &[(0.25, 0.5), (0.5, 1.0), (0.75, 2.0), (0.9, 0.2)] {
            let inputs = powerlaw_inputs(alpha, 1.0, c0);
            let expect = (2.0 / (c0 * (1.0 - alpha))).powf(alpha / (1.0 - alpha));
            let got = compute_k0(&inputs).unwrap();
            assert!(
                (got - expect).abs() <= 1e-8 * expect,
                "alpha={alpha} c0={c0}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn k0_step_kernel_returns_jump_location() {
        // psi == 1: I(k) = 1 for k <= 1, 0 beyond; the sup of the jump is 1.
        let inputs = BoundInputs::new(1.0, 0.5, Kernel::constant(1.0).unwrap()).unwrap();
        let k0 = compute_k0(&inputs).unwrap();
        assert!((k0 - 1.0).abs() < 1e-9, "k0 = {k0}");
    }

    #[test]
    fn k0_absent_above_l1() {
        let inputs = BoundInputs::new(1.0, 10.0, Kernel::constant(1.0).unwrap()).unwrap();
        assert!(compute_k0(&inputs).is_none());
    }

    #[test]
    fn g_of_k_closed_values() {
        // M=1, C0=1, powerlaw 1/2, k=8: I = 1/2, g = 8/(1 - 0.5) = 16.
        let inputs = powerlaw_inputs(0.5, 1.0, 1.0);
        assert!((g_of_k(&inputs, 8.0).unwrap() - 16.0).abs() < 1e-12);
        // Empty level set: psi == 1, C0 = 2, k = 1.5: g = 1.5/2.
        let inputs = BoundInputs::new(1.0, 2.0, Kernel::constant(1.0).unwrap()).unwrap();
        assert!((g_of_k(&inputs, 1.5).unwrap() - 0.75).abs() < 1e-15);
        // Linearity in M.
        let a = g_of_k(&powerlaw_inputs(0.5, 1.0, 1.0), 8.0).unwrap();
        let b = g_of_k(&powerlaw_inputs(0.5, 2.0, 1.0), 8.0).unwrap();
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn g_of_k_rejects_inadmissible() {
        let inputs = powerlaw_inputs(0.5, 1.0, 1.0);
        // I(2) = 4/2 = 2 >= C0 = 1.
        assert!(matches!(
            g_of_k(&inputs, 2.0),
            Err(Error::InadmissibleK { .. })
        ));
    }

    #[test]
    fn analytic_power_law_headline_values() {
        let a = beta_analytic_powerlaw(0.5, 1.0, 1.0).unwrap();
        assert_eq!(a.beta, 16.0);
        assert_eq!(a.k_star, 8.0);
        assert_eq!(a.k0, 4.0);
        // M=3, C0=2: beta = 16 * 3 / 4 = 12.
        let a = beta_analytic_powerlaw(0.5, 3.0, 2.0).unwrap();
        assert!((a.beta - 12.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_minimizer_ratio_for_half() {
        // k_star / k0 = (1/alpha)^(alpha/(1-alpha)) = 2 for alpha = 1/2.
        for &(m, c0) in &[(1.0, 0.3), (2.5, 1.0), (0.7, 2.0)] {
            let a = beta_analytic_powerlaw(0.5, m, c0).unwrap();
            assert!((a.k_star / a.k0 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_flags_c0_above_l1() {
        // l1 = 2^0.5/0.5 ~ 2.83
        assert!(matches!(
            beta_analytic_powerlaw(0.5, 1.0, 5.0),
            Err(AnalyticFallback::C0ExceedsL1 { .. })
        ));
    }

    #[test]
    fn analytic_matches_g_at_k_star() {
        // Internal consistency: beta = g(k_star) using the level-set integral.
        for &(alpha, c0) in &[(0.25, 0.5), (0.5, 1.0), (0.75, 1.0)] {
            let a = beta_analytic_powerlaw(alpha, 1.0, c0).unwrap();
            let inputs = powerlaw_inputs(alpha, 1.0, c0);
            let g = g_of_k(&inputs, a.k_star).unwrap();
            assert!(
                (g - a.beta).abs() <= 1e-10 * a.beta,
                "alpha={alpha} c0={c0}: g(k*) = {g} vs beta = {}",
                a.beta
            );
        }
    }

    #[test]
    fn beta_case_table() {
        // (i) C0 > |psi|_1 with psi == 1: max principle.
        let inputs = BoundInputs::new(1.0, 3.0, Kernel::constant(1.0).unwrap()).unwrap();
        let (beta, k, regime) = compute_beta(&inputs);
        assert_eq!(beta, 0.0);
        assert_eq!(k, None);
        assert_eq!(regime, Regime::MaxPrinciple);

        // (ii) bounded kernel below its weight: M sup / C0 bitwise.
        let inputs = BoundInputs::new(1.0, 0.5, Kernel::constant(1.0).unwrap()).unwrap();
        let (beta, _, regime) = compute_beta(&inputs);
        assert_eq!(beta, 1.0 * 1.0 / 0.5);
        assert_eq!(regime, Regime::BoundedKernel);

        // (iii) power law: analytic with numeric cross-check.
        let inputs = powerlaw_inputs(0.5, 1.0, 1.0);
        let (beta, k_star, regime) = compute_beta(&inputs);
        assert_eq!(beta, 16.0);
        assert_eq!(k_star, Some(8.0));
        assert_eq!(regime, Regime::OptimizedAnalytic);
    }

    #[test]
    fn numeric_optimizer_matches_analytic_grid() {
        for &alpha in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            for &c0 in &[0.2, 0.5, 1.0] {
                for &mass in &[1.0, 3.0] {
                    let analytic = match beta_analytic_powerlaw(alpha, mass, c0) {
                        Ok(a) => a,
                        Err(_) => continue,
                    };
                    let inputs = powerlaw_inputs(alpha, mass, c0);
                    let (beta_num, k_num) = compute_beta_numeric(&inputs).unwrap();
                    let rel = (beta_num - analytic.beta).abs() / analytic.beta;
                    assert!(
                        rel <= 1e-6,
                        "alpha={alpha} c0={c0} M={mass}: numeric {beta_num} vs {} (rel {rel:e})",
                        analytic.beta
                    );
                    let krel = (k_num - analytic.k_star).abs() / analytic.k_star;
                    assert!(krel <= 1e-3, "minimizer location rel err {krel:e}");
                }
            }
        }
    }

    #[test]
    fn gamma_case_table() {
        // Bounded: gamma = M |psi|_inf.
        let inputs = BoundInputs::new(2.0, 0.5, Kernel::constant(1.0).unwrap()).unwrap();
        assert_eq!(compute_gamma(&inputs, 4.0), 2.0);

        // Unbounded: |psi|_1 max(|rho0|_inf, beta).
        let inputs = powerlaw_inputs(0.5, 1.0, 1.0)
            .with_data_sups(0.9, 0.0)
            .unwrap();
        let gamma = compute_gamma(&inputs, 16.0);
        let expect = 32.0 * 2.0f64.sqrt();
        assert!((gamma - expect).abs() < 1e-12 * expect);

        // Data term dominates when rho0 sup exceeds beta.
        let inputs = powerlaw_inputs(0.5, 1.0, 1.0)
            .with_data_sups(20.0, 0.0)
            .unwrap();
        let gamma = compute_gamma(&inputs, 16.0);
        let l1 = 2.0 * 2.0f64.sqrt();
        assert!((gamma - l1 * 20.0).abs() < 1e-12 * gamma);
    }

    #[test]
    fn rough_bound_dominates_refined() {
        // alpha=1/2, M=1, C0=1: admissibility needs I < 1/4 i.e. k > 16;
        // rough bound 2*16/1 = 32 >= beta = 16.
        let inputs = powerlaw_inputs(0.5, 1.0, 1.0);
        let rough = rough_bound_step1(&inputs);
        assert!((rough - 32.0).abs() < 1e-6, "rough = {rough}");
        let (beta, _, _) = compute_beta(&inputs);
        assert!(rough >= beta);

        // C0 > 4 |psi|_1: k = 0 admissible, bound is the data sup.
        let inputs = BoundInputs::new(1.0, 5.0, Kernel::constant(1.0).unwrap())
            .unwrap()
            .with_data_sups(0.7, 0.0)
            .unwrap();
        assert_eq!(rough_bound_step1(&inputs), 0.7);

        // Dominance on a parameter grid.
        for &(alpha, c0) in &[(0.25, 0.5), (0.5, 2.0), (0.75, 1.0)] {
            let inputs = powerlaw_inputs(alpha, 1.0, c0);
            let (beta, _, _) = compute_beta(&inputs);
            assert!(rough_bound_step1(&inputs) >= beta);
        }
    }

    #[test]
    fn report_assembles_uniform_bounds() {
        let inputs = powerlaw_inputs(0.5, 1.0, 1.0)
            .with_data_sups(0.9, 3.5)
            .unwrap();
        let report = compute_report(&inputs);
        assert_eq!(report.beta, 16.0);
        assert_eq!(report.k_star, Some(8.0));
        assert_eq!(report.k0, Some(4.0));
        assert_eq!(report.regime, Regime::OptimizedAnalytic);
        assert_eq!(report.rho_bound, 16.0);
        assert_eq!(report.g_bound, report.gamma.max(3.5));
    }

    #[test]
    fn beta_monotone_nonincreasing_in_c0() {
        let mut prev = f64::INFINITY;
        for &c0 in &[0.2, 0.4, 0.8, 1.2, 1.6, 2.0] {
            let inputs = powerlaw_inputs(0.5, 1.0, c0);
            let (beta, _, _) = compute_beta(&inputs);
            assert!(beta <= prev + 1e-12, "beta not monotone at C0 = {c0}");
            prev = beta;
        }
    }

    #[test]
    fn max_principle_branch_for_light_power_law() {
        // alpha = 0.1: |psi|_1 = 2^0.1/0.9; C0 twice that lands in the
        // max-principle branch, as does a 1.0001 boundary probe.
        let l1 = 2.0f64.powf(0.1) / 0.9;
        for &c0 in &[2.0 * l1, 1.0001 * l1] {
            let inputs = powerlaw_inputs(0.1, 1.0, c0);
            let (beta, _, regime) = compute_beta(&inputs);
            assert_eq!(beta, 0.0);
            assert_eq!(regime, Regime::MaxPrinciple);
        }
    }

    #[test]
    fn boundary_c0_equal_l1_uses_optimized_path() {
        let alpha = 0.5f64;
        let l1 = 2.0f64.powf(alpha) / (1.0 - alpha);
        let inputs = powerlaw_inputs(alpha, 1.0, l1);
        let (_, _, regime) = compute_beta(&inputs);
        assert!(
            regime == Regime::OptimizedAnalytic || regime == Regime::OptimizedNumeric,
            "strict inequality required for the max principle, got {regime:?}"
        );
    }
}
