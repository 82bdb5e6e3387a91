//! Property tests for the algebraic invariants of the closed forms and
//! the unit converters.

use d2dse_core::*;
use proptest::prelude::*;

const LN_2: f64 = core::f64::consts::LN_2;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Parameters drawn over the physically sensible ranges.
fn arb_params() -> impl Strategy<Value = SystemParams> {
    (
        0.7e9..6.0e9f64, // carrier
        1.0..100.0f64,   // far field
        1.01..10.0f64,   // pair separation / far field
        2.1..6.0f64,     // pathloss exponent
        0.0..12.0f64,    // shadowing
        2u32..64,        // antennas
        0.5..6.0f64,     // clean CUE rate
    )
        .prop_map(|(fc, d0, sep, alpha, sigma, n, r0c)| SystemParams {
            carrier_hz: fc,
            far_field_m: d0,
            pair_separation_m: d0 * sep,
            pathloss_exp: alpha,
            shadowing_db: sigma,
            noise_w: units::dbm_to_watt(-114.0),
            tx_antennas: n,
            cue_se_clean: r0c,
        })
}

/// A density and a bound-feasible ASE target for the given parameters.
fn feasible_point(p: &SystemParams, lambda_km2: f64, frac: f64) -> (f64, f64) {
    let dc = DerivedConstants::from_params(p).unwrap();
    let density = units::per_km2_to_per_m2(lambda_km2);
    let target = frac * ase_limit(density, p, &dc).unwrap();
    (density, target)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shadowing_moment_product_identity(p in arb_params()) {
        let dc = DerivedConstants::from_params(&p).unwrap();
        let ln10 = core::f64::consts::LN_10;
        let want = (p.shadowing_db * p.shadowing_db * ln10 * ln10 / 100.0).exp();
        prop_assert!(rel(dc.c0 * dc.c1, want) < 1e-12);
    }

    #[test]
    fn pathloss_monotone_and_continuous(p in arb_params(), a in 0.0..5000.0f64, b in 0.0..5000.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(p.pathloss(lo) <= p.pathloss(hi));
        let d0 = p.far_field_m;
        prop_assert!((p.pathloss(d0 * (1.0 + 1e-12)) - 1.0).abs() < 1e-9);
        prop_assert_eq!(p.pathloss(d0 * (1.0 - 1e-12)), 1.0);
    }

    #[test]
    fn converters_round_trip(x in -150.0..80.0f64, v in 1e-12..1e12f64) {
        prop_assert!(rel(units::watt_to_dbm(units::dbm_to_watt(x)).unwrap(), x.abs().max(1e-300) * x.signum()) < 1e-12 || (units::watt_to_dbm(units::dbm_to_watt(x)).unwrap() - x).abs() < 1e-9);
        prop_assert!((units::linear_to_db(units::db_to_linear(x)).unwrap() - x).abs() < 1e-9);
        prop_assert!(rel(units::per_m2_to_per_km2(units::per_km2_to_per_m2(v)), v) < 1e-12);
        prop_assert!(rel(units::ase_per_m2_to_per_km2(units::ase_per_km2_to_per_m2(v)), v) < 1e-12);
        prop_assert!(rel(units::dbm_to_watt(units::watt_to_dbm(v).unwrap()), v) < 1e-12);
    }

    #[test]
    fn solver_round_trip_and_bound_consistency(
        p in arb_params(),
        lambda_km2 in 5.0..5000.0f64,
        frac in 0.02..0.95f64,
    ) {
        let dc = DerivedConstants::from_params(&p).unwrap();
        let (density, target) = feasible_point(&p, lambda_km2, frac);
        let snr = required_tx_snr(density, target, &p, &dc).unwrap();
        let op = OperatingPoint::new(density, snr).unwrap();

        // Solving then evaluating the ASE bound returns the target.
        prop_assert!(rel(ase_lower_bound(&op, &p, &dc).unwrap(), target) < 1e-9);

        // CUE SE through the solver equals the direct fixed-ASE form.
        let via_bound = cue_se_bound(&op, &p, &dc);
        let direct = cue_se_at_target_ase(density, target, &p, &dc).unwrap();
        prop_assert!(rel(via_bound, direct.se) < 1e-9);
    }

    #[test]
    fn ase_bound_monotone_in_snr_and_below_ceiling(
        p in arb_params(),
        lambda_km2 in 5.0..5000.0f64,
        snr_db in -20.0..110.0f64,
        step_db in 0.1..30.0f64,
    ) {
        let dc = DerivedConstants::from_params(&p).unwrap();
        let density = units::per_km2_to_per_m2(lambda_km2);
        let lo = OperatingPoint::new(density, units::db_to_linear(snr_db)).unwrap();
        let hi = OperatingPoint::new(density, units::db_to_linear(snr_db + step_db)).unwrap();
        let (b_lo, b_hi) = (
            ase_lower_bound(&lo, &p, &dc).unwrap(),
            ase_lower_bound(&hi, &p, &dc).unwrap(),
        );
        prop_assert!(b_lo < b_hi);
        let ceiling = ase_limit(density, &p, &dc).unwrap();
        prop_assert!(b_hi < ceiling);
        // The ceiling is the large-SNR limit of the bound. The gap closes
        // like 1/(density * intf_area * snr), so probe where that is 1e-8.
        let probe = 1e8 / (density * dc.mean_intf_area_m2);
        let huge = OperatingPoint::new(density, probe).unwrap();
        prop_assert!(rel(ase_lower_bound(&huge, &p, &dc).unwrap(), ceiling) < 1e-6);
    }

    #[test]
    fn sinr_demand_decreases_with_density(
        p in arb_params(),
        lambda_km2 in 5.0..5000.0f64,
        target_km2 in 1.0..50.0f64,
        factor in 1.01..10.0f64,
    ) {
        let _ = p;
        let density = units::per_km2_to_per_m2(lambda_km2);
        let target = units::ase_per_km2_to_per_m2(target_km2);
        let g1 = analytic::sinr_demand(density, target);
        let g2 = analytic::sinr_demand(density * factor, target);
        prop_assert!(g2 < g1);
        // And it never drops below its dense-limit floor.
        prop_assert!(g2 > target * LN_2);
    }

    #[test]
    fn cue_se_rises_with_density_toward_the_limit(
        p in arb_params(),
        lambda_km2 in 5.0..5000.0f64,
        frac in 0.02..0.9f64,
        factor in 1.01..10.0f64,
    ) {
        let dc = DerivedConstants::from_params(&p).unwrap();
        let (density, target) = feasible_point(&p, lambda_km2, frac);
        let a = cue_se_at_target_ase(density, target, &p, &dc).unwrap().se;
        // A denser network is always feasible for the same target.
        let b = cue_se_at_target_ase(density * factor, target, &p, &dc).unwrap().se;
        prop_assert!(b >= a);
        match cue_se_dense_limit(target, &p, &dc) {
            Ok(lim) => prop_assert!(b < lim.se),
            Err(_) => prop_assert!(false, "finite-density feasible but limit infeasible"),
        }
    }

    #[test]
    fn dense_limit_decreases_with_target(
        p in arb_params(),
        target_km2 in 0.1..20.0f64,
        factor in 1.01..3.0f64,
    ) {
        let dc = DerivedConstants::from_params(&p).unwrap();
        let t1 = units::ase_per_km2_to_per_m2(target_km2);
        let t2 = t1 * factor;
        if let (Ok(a), Ok(b)) = (
            cue_se_dense_limit(t1, &p, &dc),
            cue_se_dense_limit(t2, &p, &dc),
        ) {
            prop_assert!(b.se < a.se);
        }
    }

    #[test]
    fn dense_limit_ratio_law(
        p in arb_params(),
        per_antenna in 1e-7..2e-5f64,
        other_n in 2u32..64,
    ) {
        let dc = DerivedConstants::from_params(&p).unwrap();
        let mut p2 = p;
        p2.tx_antennas = other_n;
        let dc2 = DerivedConstants::from_params(&p2).unwrap();
        let t1 = per_antenna * (p.tx_antennas as f64 - 1.0);
        let t2 = per_antenna * (other_n as f64 - 1.0);
        let r1 = cue_se_dense_limit(t1, &p, &dc);
        let r2 = cue_se_dense_limit(t2, &p2, &dc2);
        match (r1, r2) {
            (Ok(a), Ok(b)) => prop_assert!(rel(a.se, b.se) < 1e-12, "{} vs {}", a.se, b.se),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "feasibility must agree under the ratio law"),
        }
    }
}
