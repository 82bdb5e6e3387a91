//! Browser bindings for the underlay spectral-efficiency model.
//!
//! Three operations back the demo page: a CUE-SE-vs-density curve at a
//! fixed D2D ASE target, the dense-network-limit curve vs the target, and
//! a single operating-point readout with an optional seeded Monte Carlo
//! check. Inputs and outputs are JSON strings so the JS side stays free
//! of bindings boilerplate; errors come back as `{"error", "category"}`
//! objects rather than exceptions.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

use d2dse_core::{
    ase_limit, cue_se_at_target_ase, cue_se_dense_limit, mc_cue_se, mc_d2d_ase,
    min_feasible_density, required_tx_snr, units, DerivedConstants, Error, McConfig,
    OperatingPoint, SamplerMode, SystemParams,
};

/// Parameter overrides in presentation units; anything absent keeps the
/// reference configuration.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsIn {
    fc_ghz: Option<f64>,
    d0_m: Option<f64>,
    pair_m: Option<f64>,
    alpha_d: Option<f64>,
    sigma_db: Option<f64>,
    noise_dbm: Option<f64>,
    n: Option<u32>,
    r0c: Option<f64>,
}

fn parse_params(json: &str) -> Result<SystemParams, Error> {
    let input: ParamsIn = if json.trim().is_empty() {
        ParamsIn::default()
    } else {
        serde_json::from_str(json)
            .map_err(|e| Error::ParameterDomain(format!("params JSON: {e}")))?
    };
    let d = SystemParams::default();
    let p = SystemParams {
        carrier_hz: input.fc_ghz.map_or(d.carrier_hz, |v| v * 1e9),
        far_field_m: input.d0_m.unwrap_or(d.far_field_m),
        pair_separation_m: input.pair_m.unwrap_or(d.pair_separation_m),
        pathloss_exp: input.alpha_d.unwrap_or(d.pathloss_exp),
        shadowing_db: input.sigma_db.unwrap_or(d.shadowing_db),
        noise_w: input.noise_dbm.map_or(d.noise_w, units::dbm_to_watt),
        tx_antennas: input.n.unwrap_or(d.tx_antennas),
        cue_se_clean: input.r0c.unwrap_or(d.cue_se_clean),
    };
    p.validate()?;
    Ok(p)
}

#[derive(Serialize)]
struct ErrorOut {
    error: String,
    category: &'static str,
}

fn to_json<T: Serialize>(value: Result<T, Error>) -> String {
    match value {
        Ok(v) => serde_json::to_string(&v).expect("serializable"),
        Err(e) => serde_json::to_string(&ErrorOut {
            error: e.to_string(),
            category: e.category(),
        })
        .expect("serializable"),
    }
}

fn geometric(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, Error> {
    if !(lo > 0.0 && hi > lo && (2..=4096).contains(&points)) {
        return Err(Error::ParameterDomain(
            "grid needs 0 < lo < hi and 2..=4096 points".into(),
        ));
    }
    let ratio = (hi / lo).powf(1.0 / (points as f64 - 1.0));
    Ok((0..points).map(|i| lo * ratio.powi(i as i32)).collect())
}

#[derive(Serialize)]
struct LambdaSweepOut {
    lambda_per_km2: Vec<f64>,
    se_bpshz: Vec<Option<f64>>,
    gamma_d_db: Vec<Option<f64>>,
    pd_dbm: Vec<Option<f64>>,
    feasible: Vec<bool>,
    dense_limit_se_bpshz: Option<f64>,
    min_feasible_lambda_per_km2: Option<f64>,
}

fn lambda_sweep_impl(
    params_json: &str,
    r0d_per_km2: f64,
    lo_per_km2: f64,
    hi_per_km2: f64,
    points: usize,
) -> Result<LambdaSweepOut, Error> {
    let p = parse_params(params_json)?;
    let dc = DerivedConstants::from_params(&p)?;
    let target = units::ase_per_km2_to_per_m2(r0d_per_km2);
    let grid = geometric(lo_per_km2, hi_per_km2, points)?;
    let mut out = LambdaSweepOut {
        lambda_per_km2: grid.clone(),
        se_bpshz: Vec::new(),
        gamma_d_db: Vec::new(),
        pd_dbm: Vec::new(),
        feasible: Vec::new(),
        dense_limit_se_bpshz: cue_se_dense_limit(target, &p, &dc).ok().map(|r| r.se),
        min_feasible_lambda_per_km2: min_feasible_density(target, &p, &dc)
            .ok()
            .map(units::per_m2_to_per_km2),
    };
    for lam_km2 in &grid {
        let density = units::per_km2_to_per_m2(*lam_km2);
        match required_tx_snr(density, target, &p, &dc) {
            Ok(snr) => {
                out.feasible.push(true);
                out.se_bpshz
                    .push(Some(cue_se_at_target_ase(density, target, &p, &dc)?.se));
                out.gamma_d_db.push(Some(units::linear_to_db(snr)?));
                out.pd_dbm.push(Some(units::watt_to_dbm(snr * p.noise_w)?));
            }
            Err(_) => {
                out.feasible.push(false);
                out.se_bpshz.push(None);
                out.gamma_d_db.push(None);
                out.pd_dbm.push(None);
            }
        }
    }
    Ok(out)
}

/// CUE per-user SE vs D2D density at a fixed ASE target (analytic curve,
/// plus the dense limit it approaches).
#[wasm_bindgen]
pub fn lambda_sweep(
    params_json: &str,
    r0d_per_km2: f64,
    lambda_min_per_km2: f64,
    lambda_max_per_km2: f64,
    points: usize,
) -> String {
    to_json(lambda_sweep_impl(
        params_json,
        r0d_per_km2,
        lambda_min_per_km2,
        lambda_max_per_km2,
        points,
    ))
}

#[derive(Serialize)]
struct AseSweepOut {
    r0d_per_km2: Vec<f64>,
    dense_limit_se_bpshz: Vec<Option<f64>>,
    feasible: Vec<bool>,
    max_feasible_r0d_per_km2: f64,
}

fn ase_sweep_impl(
    params_json: &str,
    lo_per_km2: f64,
    hi_per_km2: f64,
    points: usize,
) -> Result<AseSweepOut, Error> {
    let p = parse_params(params_json)?;
    let dc = DerivedConstants::from_params(&p)?;
    let grid = geometric(lo_per_km2, hi_per_km2, points)?;
    let n1 = p.tx_antennas as f64 - 1.0;
    let max_target = n1 / (dc.ase_load_area_m2 * core::f64::consts::LN_2);
    let mut out = AseSweepOut {
        r0d_per_km2: grid.clone(),
        dense_limit_se_bpshz: Vec::new(),
        feasible: Vec::new(),
        max_feasible_r0d_per_km2: units::ase_per_m2_to_per_km2(max_target),
    };
    for target_km2 in &grid {
        let target = units::ase_per_km2_to_per_m2(*target_km2);
        match cue_se_dense_limit(target, &p, &dc) {
            Ok(r) => {
                out.feasible.push(true);
                out.dense_limit_se_bpshz.push(Some(r.se));
            }
            Err(_) => {
                out.feasible.push(false);
                out.dense_limit_se_bpshz.push(None);
            }
        }
    }
    Ok(out)
}

/// Dense-network CUE SE limit vs the D2D ASE target, for the parameter
/// set's antenna count.
#[wasm_bindgen]
pub fn ase_sweep(
    params_json: &str,
    r0d_min_per_km2: f64,
    r0d_max_per_km2: f64,
    points: usize,
) -> String {
    to_json(ase_sweep_impl(
        params_json,
        r0d_min_per_km2,
        r0d_max_per_km2,
        points,
    ))
}

#[derive(Serialize)]
struct McOut {
    cue_se_bpshz: f64,
    cue_se_stderr: f64,
    realized_ase_per_km2: f64,
    realized_ase_stderr: f64,
    trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct OperatingPointOut {
    lambda_per_km2: f64,
    r0d_per_km2: f64,
    feasible: bool,
    kappa: Option<f64>,
    se_bpshz: Option<f64>,
    gamma_d_db: Option<f64>,
    pd_dbm: Option<f64>,
    ceiling_ase_per_km2: f64,
    dense_limit_se_bpshz: Option<f64>,
    mc: Option<McOut>,
}

fn operating_point_impl(
    params_json: &str,
    lambda_per_km2: f64,
    r0d_per_km2: f64,
    mc_trials: u64,
    seed: u64,
) -> Result<OperatingPointOut, Error> {
    let p = parse_params(params_json)?;
    let dc = DerivedConstants::from_params(&p)?;
    let density = units::per_km2_to_per_m2(lambda_per_km2);
    let target = units::ase_per_km2_to_per_m2(r0d_per_km2);
    let mut out = OperatingPointOut {
        lambda_per_km2,
        r0d_per_km2,
        feasible: false,
        kappa: None,
        se_bpshz: None,
        gamma_d_db: None,
        pd_dbm: None,
        ceiling_ase_per_km2: units::ase_per_m2_to_per_km2(ase_limit(density, &p, &dc)?),
        dense_limit_se_bpshz: cue_se_dense_limit(target, &p, &dc).ok().map(|r| r.se),
        mc: None,
    };
    let Ok(snr) = required_tx_snr(density, target, &p, &dc) else {
        return Ok(out);
    };
    let r = cue_se_at_target_ase(density, target, &p, &dc)?;
    out.feasible = true;
    out.kappa = Some(r.interference_fraction);
    out.se_bpshz = Some(r.se);
    out.gamma_d_db = Some(units::linear_to_db(snr)?);
    out.pd_dbm = Some(units::watt_to_dbm(snr * p.noise_w)?);

    if mc_trials > 0 {
        let cfg = McConfig {
            trials: mc_trials,
            seed,
            truncation_eps: 1e-3,
            sampler_mode: SamplerMode::Reduced,
            workers: 1,
        };
        let op = OperatingPoint::new(density, snr)?;
        let cue = mc_cue_se(&op, &p, &cfg)?;
        let ase = mc_d2d_ase(&op, &p, &cfg)?;
        out.mc = Some(McOut {
            cue_se_bpshz: cue.mean,
            cue_se_stderr: cue.std_err.unwrap_or(0.0),
            realized_ase_per_km2: units::ase_per_m2_to_per_km2(ase.mean),
            realized_ase_stderr: units::ase_per_m2_to_per_km2(ase.std_err.unwrap_or(0.0)),
            trials: mc_trials,
            seed,
        });
    }
    Ok(out)
}

/// Full readout at one (density, ASE-target) point: interference fraction,
/// CUE SE, required power, ceilings, and optionally a seeded Monte Carlo
/// check of both ergodic rates (`mc_trials = 0` skips it).
#[wasm_bindgen]
pub fn operating_point(
    params_json: &str,
    lambda_per_km2: f64,
    r0d_per_km2: f64,
    mc_trials: u64,
    seed: u64,
) -> String {
    to_json(operating_point_impl(
        params_json,
        lambda_per_km2,
        r0d_per_km2,
        mc_trials,
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_sweep_reference_point() {
        let v: serde_json::Value =
            serde_json::from_str(&lambda_sweep("{}", 25.0, 100.0, 2000.0, 16)).unwrap();
        assert!(v.get("error").is_none());
        let se = v["se_bpshz"].as_array().unwrap();
        assert_eq!(se.len(), 16);
        assert!((se[0].as_f64().unwrap() - 2.515835215462814).abs() < 1e-9);
        let vals: Vec<f64> = se.iter().map(|x| x.as_f64().unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        let lim = v["dense_limit_se_bpshz"].as_f64().unwrap();
        assert!(vals.iter().all(|x| *x < lim));
    }

    #[test]
    fn ase_sweep_marks_the_ceiling() {
        let v: serde_json::Value =
            serde_json::from_str(&ase_sweep("{\"n\": 4}", 5.0, 120.0, 24)).unwrap();
        let max = v["max_feasible_r0d_per_km2"].as_f64().unwrap();
        assert!((max - 83.785).abs() < 0.01, "max {max}");
        let feas = v["feasible"].as_array().unwrap();
        assert!(feas.iter().any(|f| f.as_bool().unwrap()));
        assert!(feas.iter().any(|f| !f.as_bool().unwrap()));
    }

    #[test]
    fn operating_point_with_mc_is_consistent() {
        let v: serde_json::Value =
            serde_json::from_str(&operating_point("", 200.0, 25.0, 400, 9)).unwrap();
        assert!(v["feasible"].as_bool().unwrap());
        let se = v["se_bpshz"].as_f64().unwrap();
        let mc = &v["mc"];
        let cue = mc["cue_se_bpshz"].as_f64().unwrap();
        let cue_se_err = mc["cue_se_stderr"].as_f64().unwrap();
        assert!(cue > se - 3.0 * cue_se_err, "simulation under the bound");
        // Realized ASE covers the target the power was sized for.
        let ase = mc["realized_ase_per_km2"].as_f64().unwrap();
        let ase_err = mc["realized_ase_stderr"].as_f64().unwrap();
        assert!(ase > 25.0 - 3.0 * ase_err);
    }

    #[test]
    fn infeasible_point_reports_cleanly() {
        let v: serde_json::Value =
            serde_json::from_str(&operating_point("", 100.0, 100.0, 0, 0)).unwrap();
        assert!(!v["feasible"].as_bool().unwrap());
        assert!(v["se_bpshz"].is_null());
        assert!((v["ceiling_ase_per_km2"].as_f64().unwrap() - 66.05794179787757).abs() < 1e-6);
    }

    #[test]
    fn bad_params_become_error_objects() {
        let v: serde_json::Value =
            serde_json::from_str(&lambda_sweep("{\"alpha_d\": 2.0}", 25.0, 100.0, 2000.0, 8))
                .unwrap();
        assert_eq!(v["category"], "domain");
        assert!(v["error"].as_str().unwrap().contains("pathloss_exp"));

        let v: serde_json::Value =
            serde_json::from_str(&lambda_sweep("{\"bogus\": 1}", 25.0, 100.0, 2000.0, 8)).unwrap();
        assert_eq!(v["category"], "domain");
    }
}
