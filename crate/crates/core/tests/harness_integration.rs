//! Integration checks for the verification harness beyond the acceptance
//! criteria: cross-validation ladder, bounded-kernel scenario dispatch and
//! report serialization.

use euler_alignment::harness::{self, Rung, Scenario};

#[test]
fn cross_validation_ladder_shrinks_and_agrees() {
    let campaign = harness::cross_validate_campaign();
    let report = harness::cross_validate(&campaign).unwrap();
    assert!(report.passed(), "{}", report.render_text());
    let finest = report
        .assertions
        .iter()
        .find(|a| a.invariant == "cross-agreement-finest")
        .unwrap();
    assert!(finest.measured <= 0.03);
    // Shrink assertions for each ladder step.
    let shrink_count = report
        .assertions
        .iter()
        .filter(|a| a.invariant.starts_with("cross-agreement-shrinks"))
        .count();
    assert_eq!(shrink_count, campaign.ladder.len() - 1);
}

#[test]
fn bounded_kernel_scenario_checks_formulas() {
    let mut campaign = harness::bounded_kernel_campaign();
    campaign.ladder = vec![Rung {
        resolution: 256,
        dt: 8e-3,
    }];
    campaign.t_end = 2.0;
    let report = harness::run_campaign(&campaign).unwrap();
    assert!(report.passed(), "{}", report.render_text());
    for invariant in [
        "regime-is-bounded-kernel",
        "beta-formula-bit-exact",
        "gamma-formula-bit-exact",
    ] {
        assert!(report.assertions.iter().any(|a| a.invariant == invariant && a.passed));
    }
}

#[test]
fn blowup_refinement_reports_comparison_bound() {
    // Blow-up happens within t ~ 0.1, so the full four-rung study is cheap.
    let campaign = harness::blowup_refinement_campaign();
    let report = harness::run_campaign(&campaign).unwrap();
    assert!(report.passed(), "{}", report.render_text());
    assert!(report
        .notes
        .iter()
        .any(|n| n.contains("Riccati comparison")));
    // Lagrangian blow-up happens no later than the per-particle comparison
    // bound (the alignment term only accelerates it).
    let hit = report
        .assertions
        .iter()
        .filter(|a| a.invariant.starts_with("lagrangian-blowup-detected"))
        .map(|a| a.measured)
        .fold(f64::NEG_INFINITY, f64::max);
    let note = report
        .notes
        .iter()
        .find(|n| n.contains("Riccati"))
        .unwrap();
    let riccati: f64 = note.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!(
        hit <= riccati,
        "worst hit time {hit} exceeded the comparison bound {riccati}"
    );
}

#[test]
fn reports_serialize_with_campaign_embedded() {
    let mut campaign = harness::max_principle_campaign();
    campaign.ladder = vec![Rung {
        resolution: 128,
        dt: 1e-2,
    }];
    campaign.t_end = 1.0;
    let report = harness::verify_max_principle(&campaign).unwrap();
    let json = report.to_json();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["scenario"], "max-principle");
    assert_eq!(value["campaign"]["name"], campaign.name);
    assert!(value["assertions"].as_array().unwrap().len() >= 2);
    // The embedded campaign deserializes back bit-exactly.
    let back: harness::Campaign =
        serde_json::from_value(value["campaign"].clone()).unwrap();
    assert_eq!(back, campaign);
}

#[test]
fn flat_preset_cross_validates_exactly() {
    // A constant kernel makes the particle pair sums exact, so both solvers
    // hold the flat state to rounding. (Under a singular kernel the particle
    // quadrature error O(n^(alpha-1)) makes the flat flock only approximately
    // stationary.)
    use euler_alignment::config::KernelConfig;
    use euler_alignment::presets::DataPreset;
    let mut campaign = harness::cross_validate_campaign();
    campaign.name = "cross-validate-flat".into();
    campaign.kernel = KernelConfig::constant(1.0);
    campaign.preset = DataPreset::Flat { mass: 1.0 };
    campaign.ladder = vec![
        Rung { resolution: 64, dt: 1e-2 },
        Rung { resolution: 128, dt: 1e-2 },
    ];
    campaign.t_end = 1.0;
    let report = harness::cross_validate(&campaign).unwrap();
    assert!(report.passed(), "{}", report.render_text());
    let finest = report
        .assertions
        .iter()
        .find(|a| a.invariant == "cross-agreement-finest")
        .unwrap();
    // Both solvers hold the flat state to rounding.
    assert!(finest.measured < 1e-10, "disagreement {}", finest.measured);
}

#[test]
fn zero_kernel_degenerates_to_burgers_threshold() {
    // psi == 0 removes the alignment force; G = u_x and any negative slope
    // seeds a blow-up, matching the pressureless Burgers threshold.
    use euler_alignment::config::KernelConfig;
    use euler_alignment::presets::DataPreset;
    let mut campaign = harness::supercritical_campaigns().remove(0);
    campaign.name = "supercritical-zero-kernel".into();
    campaign.kernel = KernelConfig::constant(0.0);
    campaign.preset = DataPreset::SineVelocity {
        mass: 1.0,
        amplitude: -0.5,
        mode: 1,
    };
    campaign.ladder = vec![
        Rung { resolution: 128, dt: 1.6e-2 },
        Rung { resolution: 256, dt: 8e-3 },
    ];
    let report = harness::verify_threshold(&campaign).unwrap();
    for a in &report.assertions {
        if a.invariant.starts_with("lagrangian-blowup-detected")
            || a.invariant.starts_with("eulerian-cap-exceeded")
        {
            assert!(a.passed, "{}: {}", a.invariant, a.detail);
        }
    }
}

#[test]
fn default_campaign_sets_cover_every_scenario() {
    for scenario in [
        Scenario::Subcritical,
        Scenario::Supercritical,
        Scenario::MaxPrinciple,
        Scenario::BoundedKernel,
        Scenario::CrossValidate,
        Scenario::BlowupRefinement,
    ] {
        let campaigns = harness::default_campaigns(scenario);
        assert!(!campaigns.is_empty());
        for c in &campaigns {
            c.validate().unwrap();
            assert_eq!(c.scenario, scenario);
        }
    }
    assert_eq!(harness::subcritical_matrix().len(), 10);
}
