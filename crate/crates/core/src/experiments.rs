//! Sweep harness: CUE per-user SE against density (at a fixed D2D ASE
//! target) or against the ASE target itself (dense-network limit), with
//! optional Monte Carlo columns, emitted as CSV or JSON.

use std::io::Write;

use serde::Serialize;

use crate::analytic::{
    ase_limit, cue_se_at_target_ase, cue_se_dense_limit, min_feasible_density, required_tx_snr,
};
use crate::error::{Error, Result};
use crate::model::{DerivedConstants, OperatingPoint, SystemParams};
use crate::montecarlo::{mc_cue_se, mc_required_tx_snr, McConfig};
use crate::units::{ase_per_km2_to_per_m2, linear_to_db, per_km2_to_per_m2, watt_to_dbm};

/// Which variable the grid sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Density sweep at a fixed ASE target.
    LambdaSweep,
    /// ASE-target sweep of the dense-network limit.
    AseSweep,
}

impl SweepKind {
    fn label(self) -> &'static str {
        match self {
            SweepKind::LambdaSweep => "lambda_sweep",
            SweepKind::AseSweep => "ase_sweep",
        }
    }

    fn unit(self) -> &'static str {
        match self {
            SweepKind::LambdaSweep => "km^-2",
            SweepKind::AseSweep => "bits/s/Hz/km^2",
        }
    }
}

/// Transmit power the Monte Carlo column runs at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum McPowerSource {
    /// The closed-form required-SNR solver (same power the analytic column
    /// assumes). The Monte Carlo column then measures only the Jensen gap
    /// of the CUE-side bound, which is small.
    Solver,
    /// Per-point bisection of the realized ASE
    /// ([`crate::montecarlo::mc_required_tx_snr`]): the power an operator
    /// would actually provision. This reproduces the reference simulation
    /// curves and is the default.
    Calibrated,
}

/// One sweep: grid, fixed parameters and optional Monte Carlo settings.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Strictly increasing, SI units (m⁻² for a density sweep,
    /// bits/s/Hz/m² for an ASE sweep).
    pub grid: Vec<f64>,
    pub params: SystemParams,
    /// Fixed ASE target for a density sweep, bits/s/Hz/m².
    pub ase_target: Option<f64>,
    /// Density stand-in for the dense-network limit (ASE-sweep Monte
    /// Carlo points run here), m⁻².
    pub dense_density: f64,
    pub mc: Option<McConfig>,
    pub mc_power: McPowerSource,
}

/// Default density stand-in for "dense": 2000 km⁻².
pub const DEFAULT_DENSE_DENSITY: f64 = 2e-3;

fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (points as f64 - 1.0));
    (0..points).map(|i| lo * ratio.powi(i as i32)).collect()
}

impl SweepSpec {
    /// Density sweep preset: 16 geometric points over 50..2000 km⁻² at a
    /// 25 bits/s/Hz/km² ASE target.
    pub fn lambda_sweep_default(params: SystemParams) -> Self {
        SweepSpec {
            kind: SweepKind::LambdaSweep,
            grid: geometric_grid(per_km2_to_per_m2(50.0), per_km2_to_per_m2(2000.0), 16),
            params,
            ase_target: Some(ase_per_km2_to_per_m2(25.0)),
            dense_density: DEFAULT_DENSE_DENSITY,
            mc: None,
            mc_power: McPowerSource::Calibrated,
        }
    }

    /// ASE sweep preset: 24 geometric points over 5..120 bits/s/Hz/km².
    pub fn ase_sweep_default(params: SystemParams) -> Self {
        SweepSpec {
            kind: SweepKind::AseSweep,
            grid: geometric_grid(ase_per_km2_to_per_m2(5.0), ase_per_km2_to_per_m2(120.0), 24),
            params,
            ase_target: None,
            dense_density: DEFAULT_DENSE_DENSITY,
            mc: None,
            mc_power: McPowerSource::Calibrated,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.grid.is_empty() {
            return Err(Error::InvalidSweep("grid is empty".into()));
        }
        if !self.grid.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidSweep(
                "grid values must be positive and finite".into(),
            ));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSweep(
                "grid must be strictly increasing".into(),
            ));
        }
        if self.kind == SweepKind::LambdaSweep && self.ase_target.is_none() {
            return Err(Error::InvalidSweep(
                "density sweep needs a fixed ase_target".into(),
            ));
        }
        if !(self.dense_density > 0.0 && self.dense_density.is_finite()) {
            return Err(Error::InvalidSweep("dense_density must be positive".into()));
        }
        if let Some(mc) = &self.mc {
            mc.validate()?;
        }
        Ok(())
    }
}

/// One emitted record, already in presentation units (km², dB, dBm).
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub sweep_kind: SweepKind,
    pub sweep_value: f64,
    pub unit: &'static str,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "R0_d_per_km2")]
    pub r0_d_per_km2: f64,
    pub lambda_per_km2: f64,
    pub gamma_d_db: Option<f64>,
    pub pd_dbm: Option<f64>,
    pub feasible: bool,
    pub analytic_se_bpshz: Option<f64>,
    pub mc_mean_bpshz: Option<f64>,
    pub mc_stderr_bpshz: Option<f64>,
    pub limit_ase_per_km2: Option<f64>,
}

/// Salt separating the calibration RNG streams from the estimate streams
/// within a row.
const CALIBRATION_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn row_mc_config(base: &McConfig, row: usize) -> McConfig {
    McConfig {
        seed: base.seed.wrapping_add(row as u64),
        ..*base
    }
}

/// Monte Carlo CUE SE for one feasible grid point, at the configured
/// power source.
fn mc_columns(
    spec: &SweepSpec,
    density: f64,
    target: f64,
    solver_snr: f64,
    row: usize,
) -> Result<(Option<f64>, Option<f64>)> {
    let Some(base) = &spec.mc else {
        return Ok((None, None));
    };
    let cfg = row_mc_config(base, row);
    let snr = match spec.mc_power {
        McPowerSource::Solver => solver_snr,
        McPowerSource::Calibrated => {
            let cal_cfg = McConfig {
                seed: cfg.seed ^ CALIBRATION_SEED_SALT,
                ..cfg
            };
            mc_required_tx_snr(density, target, &spec.params, &cal_cfg)?
        }
    };
    let op = OperatingPoint::new(density, snr)?;
    let est = mc_cue_se(&op, &spec.params, &cfg)?;
    Ok((Some(est.mean), est.std_err))
}

/// Density sweep at a fixed ASE target. Rows come back in grid order;
/// infeasible densities are flagged and carry no SNR, power or Monte
/// Carlo fields. Errors if no grid point is feasible.
pub fn run_lambda_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if spec.kind != SweepKind::LambdaSweep {
        return Err(Error::InvalidSweep(
            "spec kind is not a density sweep".into(),
        ));
    }
    let p = &spec.params;
    let dc = DerivedConstants::from_params(p)?;
    let target = spec.ase_target.expect("validated");

    let mut rows = Vec::with_capacity(spec.grid.len());
    let mut any_feasible = false;
    for (i, &density) in spec.grid.iter().enumerate() {
        let limit = ase_limit(density, p, &dc)?;
        let mut row = SweepRow {
            sweep_kind: spec.kind,
            sweep_value: crate::units::per_m2_to_per_km2(density),
            unit: spec.kind.unit(),
            n: p.tx_antennas,
            r0_d_per_km2: crate::units::ase_per_m2_to_per_km2(target),
            lambda_per_km2: crate::units::per_m2_to_per_km2(density),
            gamma_d_db: None,
            pd_dbm: None,
            feasible: false,
            analytic_se_bpshz: None,
            mc_mean_bpshz: None,
            mc_stderr_bpshz: None,
            limit_ase_per_km2: Some(crate::units::ase_per_m2_to_per_km2(limit)),
        };
        if let Ok(snr) = required_tx_snr(density, target, p, &dc) {
            any_feasible = true;
            row.feasible = true;
            row.gamma_d_db = Some(linear_to_db(snr)?);
            row.pd_dbm = Some(watt_to_dbm(snr * p.noise_w)?);
            row.analytic_se_bpshz = Some(cue_se_at_target_ase(density, target, p, &dc)?.se);
            let (mean, stderr) = mc_columns(spec, density, target, snr, i)?;
            row.mc_mean_bpshz = mean;
            row.mc_stderr_bpshz = stderr;
        }
        rows.push(row);
    }
    if !any_feasible {
        let min_density = min_feasible_density(target, p, &dc)?;
        return Err(Error::InfeasibleGrid(format!(
            "no grid density supports the ASE target; minimum feasible density is {:.6} km^-2",
            crate::units::per_m2_to_per_km2(min_density)
        )));
    }
    Ok(rows)
}

/// ASE-target sweep of the dense-network limit. The analytic column is
/// the limit; Monte Carlo points run at the dense stand-in density, with
/// feasibility rechecked there. Errors if no grid point admits a positive
/// limit.
pub fn run_ase_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if spec.kind != SweepKind::AseSweep {
        return Err(Error::InvalidSweep("spec kind is not an ASE sweep".into()));
    }
    let p = &spec.params;
    let dc = DerivedConstants::from_params(p)?;
    let proxy = spec.dense_density;
    let proxy_limit = ase_limit(proxy, p, &dc)?;

    let mut rows = Vec::with_capacity(spec.grid.len());
    let mut any_feasible = false;
    for (i, &target) in spec.grid.iter().enumerate() {
        let mut row = SweepRow {
            sweep_kind: spec.kind,
            sweep_value: crate::units::ase_per_m2_to_per_km2(target),
            unit: spec.kind.unit(),
            n: p.tx_antennas,
            r0_d_per_km2: crate::units::ase_per_m2_to_per_km2(target),
            lambda_per_km2: crate::units::per_m2_to_per_km2(proxy),
            gamma_d_db: None,
            pd_dbm: None,
            feasible: false,
            analytic_se_bpshz: None,
            mc_mean_bpshz: None,
            mc_stderr_bpshz: None,
            limit_ase_per_km2: Some(crate::units::ase_per_m2_to_per_km2(proxy_limit)),
        };
        if let Ok(limit_se) = cue_se_dense_limit(target, p, &dc) {
            any_feasible = true;
            row.feasible = true;
            row.analytic_se_bpshz = Some(limit_se.se);
            // SNR and Monte Carlo need feasibility at the finite stand-in
            // density, which is stricter than the dense-limit check.
            if let Ok(snr) = required_tx_snr(proxy, target, p, &dc) {
                row.gamma_d_db = Some(linear_to_db(snr)?);
                row.pd_dbm = Some(watt_to_dbm(snr * p.noise_w)?);
                let (mean, stderr) = mc_columns(spec, proxy, target, snr, i)?;
                row.mc_mean_bpshz = mean;
                row.mc_stderr_bpshz = stderr;
            }
        }
        rows.push(row);
    }
    if !any_feasible {
        let n1 = p.tx_antennas as f64 - 1.0;
        let max_target = n1 / (dc.ase_load_area_m2 * core::f64::consts::LN_2);
        return Err(Error::InfeasibleGrid(format!(
            "no grid target admits a positive dense-network SE; maximum is {:.6} bits/s/Hz/km^2",
            crate::units::ase_per_m2_to_per_km2(max_target)
        )));
    }
    Ok(rows)
}

/// Output format for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

/// Exact CSV column set, in order.
pub const CSV_HEADER: &str = "sweep_kind,sweep_value,unit,N,R0_d_per_km2,lambda_per_km2,\
gamma_d_db,pd_dbm,feasible,analytic_se_bpshz,mc_mean_bpshz,mc_stderr_bpshz,limit_ase_per_km2";

/// Formats a float with 9 significant digits.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn sig9_opt(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

/// Writes rows as CSV (exact [`CSV_HEADER`] schema, floats with 9
/// significant digits, missing fields empty) or as a JSON array of row
/// objects with the same field names.
pub fn emit<W: Write>(rows: &[SweepRow], format: EmitFormat, out: &mut W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidSweep("no rows to emit".into()));
    }
    match format {
        EmitFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.sweep_kind.label(),
                    sig9(r.sweep_value),
                    r.unit,
                    r.n,
                    sig9(r.r0_d_per_km2),
                    sig9(r.lambda_per_km2),
                    sig9_opt(r.gamma_d_db),
                    sig9_opt(r.pd_dbm),
                    r.feasible,
                    sig9_opt(r.analytic_se_bpshz),
                    sig9_opt(r.mc_mean_bpshz),
                    sig9_opt(r.mc_stderr_bpshz),
                    sig9_opt(r.limit_ase_per_km2),
                )?;
            }
        }
        EmitFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writeln!(out)?;
        }
    }
    Ok(())
}
