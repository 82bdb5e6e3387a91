//! `d2dse`: spectral-efficiency analysis of a D2D underlay in a cellular
//! downlink. Closed-form bounds, Monte Carlo estimates and sweep tables.
//!
//! Exit codes: 0 success, 2 usage or parameter-domain error,
//! 3 infeasibility, 4 I/O error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use d2dse_core::{
    ase_limit, ase_lower_bound, cue_se_at_target_ase, cue_se_bound, emit, mc_cue_se, mc_d2d_ase,
    mc_mean_interference, mc_required_tx_snr, required_tx_snr, run_ase_sweep, run_lambda_sweep,
    units, DerivedConstants, EmitFormat, Error, McConfig, McPowerSource, OperatingPoint,
    SamplerMode, SweepRow, SweepSpec, SystemParams,
};

/// Environment variable overriding the default Monte Carlo seed.
const SEED_ENV: &str = "D2DSE_SEED";

/// Keeps power-calibration draws off the estimator's RNG streams when one
/// seed drives both (same constant the sweep runner uses internally).
const CAL_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Parser)]
#[command(
    name = "d2dse",
    version,
    about = "D2D-underlay area spectral efficiency and cellular per-user SE: \
             closed forms, Monte Carlo, sweeps"
)]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,

    /// JSON config file with the same keys as the parameter flags
    /// (fc_ghz, d0_m, pair_m, alpha_d, sigma_db, noise_dbm, n, r0c).
    /// Flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

/// System parameters in presentation units; defaults are the reference
/// urban micro-cell configuration.
#[derive(Args)]
struct ParamArgs {
    /// Carrier frequency, GHz [default: 2]
    #[arg(long, global = true, value_name = "GHZ")]
    fc_ghz: Option<f64>,
    /// Far-field reference distance, m [default: 35]
    #[arg(long, global = true, value_name = "M")]
    d0_m: Option<f64>,
    /// D2D pair separation, m [default: 50]
    #[arg(long, global = true, value_name = "M")]
    pair_m: Option<f64>,
    /// Pathloss exponent [default: 4]
    #[arg(long, global = true)]
    alpha_d: Option<f64>,
    /// Lognormal shadowing std dev, dB [default: 3]
    #[arg(long, global = true, value_name = "DB")]
    sigma_db: Option<f64>,
    /// Noise power, dBm [default: -114]
    #[arg(long, global = true, value_name = "DBM", allow_hyphen_values = true)]
    noise_dbm: Option<f64>,
    /// D2D Tx antenna count [default: 4] (before the subcommand)
    #[arg(long)]
    n: Option<u32>,
    /// Interference-free CUE SE, bits/s/Hz [default: 3]
    #[arg(long, global = true)]
    r0c: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    fc_ghz: Option<f64>,
    d0_m: Option<f64>,
    pair_m: Option<f64>,
    alpha_d: Option<f64>,
    sigma_db: Option<f64>,
    noise_dbm: Option<f64>,
    n: Option<u32>,
    r0c: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived model constants.
    Constants,
    /// D2D area spectral efficiency at an operating point, or its
    /// interference-limited ceiling.
    Ase(AseArgs),
    /// CUE per-user SE under D2D interference, at a fixed ASE target or a
    /// given transmit power.
    Cue(CueArgs),
    /// Monte Carlo estimates of the exact ergodic quantities.
    Mc {
        #[command(subcommand)]
        kind: McCommand,
    },
    /// Sweep tables (CSV/JSON) pairing analytic curves with Monte Carlo.
    Sweep {
        #[command(subcommand)]
        preset: SweepCommand,
    },
}

#[derive(Args)]
struct AseArgs {
    /// D2D Tx density, km^-2.
    #[arg(long)]
    lambda_per_km2: f64,
    /// Transmit SNR, dB.
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    gamma_d_db: Option<f64>,
    /// Transmit power, dBm.
    #[arg(long, value_name = "DBM", allow_hyphen_values = true)]
    pd_dbm: Option<f64>,
    /// Print the interference-limited ceiling instead (no power needed).
    #[arg(long)]
    limit: bool,
}

#[derive(Args)]
struct CueArgs {
    /// D2D Tx density, km^-2.
    #[arg(long)]
    lambda_per_km2: f64,
    /// Fixed D2D ASE target, bits/s/Hz/km^2.
    #[arg(long, value_name = "ASE")]
    target_ase: Option<f64>,
    /// Transmit SNR, dB.
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    gamma_d_db: Option<f64>,
    /// Transmit power, dBm.
    #[arg(long, value_name = "DBM", allow_hyphen_values = true)]
    pd_dbm: Option<f64>,
}

#[derive(Subcommand)]
enum McCommand {
    /// Realized D2D area spectral efficiency.
    Ase(McArgs),
    /// Realized CUE per-user SE.
    Cue(McArgs),
    /// Mean aggregate interference power at a victim receiver.
    Interference(McArgs),
}

#[derive(Args)]
struct McArgs {
    /// D2D Tx density, km^-2.
    #[arg(long)]
    lambda_per_km2: f64,
    /// Transmit SNR, dB.
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    gamma_d_db: Option<f64>,
    /// Transmit power, dBm.
    #[arg(long, value_name = "DBM", allow_hyphen_values = true)]
    pd_dbm: Option<f64>,
    /// Size the power for this ASE target, bits/s/Hz/km^2 (closed-form
    /// solver, or the realized-rate calibrator with --calibrate).
    #[arg(long, value_name = "ASE")]
    target_ase: Option<f64>,
    /// With --target-ase: calibrate the power against the realized ASE
    /// instead of the closed-form bound.
    #[arg(long)]
    calibrate: bool,
    /// Trial count.
    #[arg(long, default_value_t = 20_000)]
    trials: u64,
    /// RNG seed (falls back to $D2DSE_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Interference truncation tolerance.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Fading sampler.
    #[arg(long, value_enum, default_value_t = ModeArg::Reduced)]
    mode: ModeArg,
    /// Worker threads (does not affect results).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum SweepCommand {
    /// CUE SE vs density at a fixed ASE target (default grid
    /// 50..2000 km^-2, 16 geometric points).
    Fig2 {
        /// Fixed D2D ASE target, bits/s/Hz/km^2.
        #[arg(long, default_value_t = 25.0)]
        r0d: f64,
        #[command(flatten)]
        common: SweepArgs,
    },
    /// Dense-network CUE SE limit vs ASE target (default grid
    /// 5..120 bits/s/Hz/km^2, 24 geometric points).
    Fig3 {
        /// Antenna counts, one curve family each (repeatable).
        #[arg(long = "n", value_name = "N", num_args = 1)]
        antenna_counts: Vec<u32>,
        /// Density stand-in for the dense limit, km^-2.
        #[arg(long, default_value_t = 2000.0)]
        dense_lambda_per_km2: f64,
        #[command(flatten)]
        common: SweepArgs,
    },
    /// Explicit grid.
    Custom {
        /// Sweep variable.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Comma-separated grid values (km^-2 for lambda,
        /// bits/s/Hz/km^2 for ase).
        #[arg(long)]
        grid: String,
        /// Fixed ASE target for a lambda sweep, bits/s/Hz/km^2.
        #[arg(long)]
        r0d: Option<f64>,
        /// Density stand-in for an ase sweep, km^-2.
        #[arg(long, default_value_t = 2000.0)]
        dense_lambda_per_km2: f64,
        #[command(flatten)]
        common: SweepArgs,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Monte Carlo column on feasible rows.
    #[arg(long, value_enum, default_value_t = OnOff::Off)]
    mc: OnOff,
    /// Power the MC column runs at: the closed-form solver's, or
    /// calibrated against the realized ASE (reproduces the reference
    /// simulation curves).
    #[arg(long, value_enum, default_value_t = PowerArg::Calibrated)]
    mc_power: PowerArg,
    /// Trial count per MC point.
    #[arg(long, default_value_t = 20_000)]
    trials: u64,
    /// RNG seed (falls back to $D2DSE_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Interference truncation tolerance.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Fading sampler.
    #[arg(long, value_enum, default_value_t = ModeArg::Reduced)]
    mode: ModeArg,
    /// Worker threads (does not affect results).
    #[arg(long)]
    workers: Option<usize>,
    /// Output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum PowerArg {
    Solver,
    Calibrated,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Reduced,
    FullVector,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Lambda,
    Ase,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<ModeArg> for SamplerMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Reduced => SamplerMode::Reduced,
            ModeArg::FullVector => SamplerMode::FullVector,
        }
    }
}

fn fail(err: Error) -> ! {
    // Infeasible ASE values are SI internally; present them in km² units.
    match &err {
        Error::InfeasibleAse { target, limit } => eprintln!(
            "error[infeasible]: ASE target {:.6} bits/s/Hz/km^2 is at or above the \
             interference-limited ceiling {:.6} bits/s/Hz/km^2",
            units::ase_per_m2_to_per_km2(*target),
            units::ase_per_m2_to_per_km2(*limit),
        ),
        other => eprintln!("error[{}]: {other}", other.category()),
    }
    let code = match err.category() {
        "infeasible" => 3,
        "io" => 4,
        _ => 2,
    };
    std::process::exit(code)
}

fn usage(msg: &str) -> ! {
    eprintln!("error[usage]: {msg}");
    std::process::exit(2)
}

fn main() {
    let cli = Cli::parse();
    let params = match resolve_params(&cli) {
        Ok(p) => p,
        Err(e) => fail(e),
    };
    let result = match &cli.command {
        Command::Constants => run_constants(&params, cli.json),
        Command::Ase(a) => run_ase(&params, a, cli.json),
        Command::Cue(a) => run_cue(&params, a, cli.json),
        Command::Mc { kind } => run_mc(&params, kind, cli.json),
        Command::Sweep { preset } => run_sweep(params, preset),
    };
    if let Err(e) = result {
        fail(e);
    }
}

fn resolve_params(cli: &Cli) -> Result<SystemParams, Error> {
    let mut file = FileConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        file = serde_json::from_str(&text)
            .map_err(|e| Error::ParameterDomain(format!("config file: {e}")))?;
    }
    let a = &cli.params;
    let defaults = SystemParams::default();
    let fc_ghz = a
        .fc_ghz
        .or(file.fc_ghz)
        .unwrap_or(defaults.carrier_hz / 1e9);
    let noise_dbm = match a.noise_dbm.or(file.noise_dbm) {
        Some(v) => v,
        None => units::watt_to_dbm(defaults.noise_w)?,
    };
    let p = SystemParams {
        carrier_hz: fc_ghz * 1e9,
        far_field_m: a.d0_m.or(file.d0_m).unwrap_or(defaults.far_field_m),
        pair_separation_m: a
            .pair_m
            .or(file.pair_m)
            .unwrap_or(defaults.pair_separation_m),
        pathloss_exp: a.alpha_d.or(file.alpha_d).unwrap_or(defaults.pathloss_exp),
        shadowing_db: a
            .sigma_db
            .or(file.sigma_db)
            .unwrap_or(defaults.shadowing_db),
        noise_w: units::dbm_to_watt(noise_dbm),
        tx_antennas: a.n.or(file.n).unwrap_or(defaults.tx_antennas),
        cue_se_clean: a.r0c.or(file.r0c).unwrap_or(defaults.cue_se_clean),
    };
    p.validate()?;
    Ok(p)
}

fn seed_or_env(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

fn mc_config(
    trials: u64,
    seed: Option<u64>,
    eps: f64,
    mode: ModeArg,
    workers: Option<usize>,
) -> McConfig {
    let mut cfg = McConfig {
        trials,
        seed: seed_or_env(seed),
        truncation_eps: eps,
        sampler_mode: mode.into(),
        ..McConfig::default()
    };
    if let Some(w) = workers {
        cfg.workers = w;
    }
    cfg
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable output")
    );
}

#[derive(Serialize)]
struct ConstantsOut {
    wavelength_m: f64,
    c0: f64,
    c1: f64,
    mean_intf_area_m2: f64,
    ase_load_area_m2: f64,
}

fn run_constants(p: &SystemParams, json: bool) -> Result<(), Error> {
    let dc = DerivedConstants::from_params(p)?;
    let out = ConstantsOut {
        wavelength_m: dc.wavelength_m,
        c0: dc.c0,
        c1: dc.c1,
        mean_intf_area_m2: dc.mean_intf_area_m2,
        ase_load_area_m2: dc.ase_load_area_m2,
    };
    if json {
        print_json(&out);
    } else {
        println!("wavelength      {:.6} m", out.wavelength_m);
        println!("c0              {:.9e}", out.c0);
        println!("c1              {:.9e}", out.c1);
        println!("mean_intf_area  {:.9e} m^2", out.mean_intf_area_m2);
        println!("ase_load_area   {:.9e} m^2", out.ase_load_area_m2);
    }
    Ok(())
}

/// Resolves exactly one transmit-power source into a linear SNR.
fn snr_from_power_flags(
    p: &SystemParams,
    gamma_d_db: Option<f64>,
    pd_dbm: Option<f64>,
) -> Option<f64> {
    match (gamma_d_db, pd_dbm) {
        (Some(db), None) => Some(units::db_to_linear(db)),
        (None, Some(dbm)) => Some(units::dbm_to_watt(dbm) / p.noise_w),
        (None, None) => None,
        _ => usage("give at most one of --gamma-d-db and --pd-dbm"),
    }
}

#[derive(Serialize)]
struct AseOut {
    lambda_per_km2: f64,
    gamma_d_db: Option<f64>,
    pd_dbm: Option<f64>,
    ase_per_km2: Option<f64>,
    limit_ase_per_km2: f64,
}

fn run_ase(p: &SystemParams, a: &AseArgs, json: bool) -> Result<(), Error> {
    let dc = DerivedConstants::from_params(p)?;
    let density = units::per_km2_to_per_m2(a.lambda_per_km2);
    let limit = units::ase_per_m2_to_per_km2(ase_limit(density, p, &dc)?);
    let snr = snr_from_power_flags(p, a.gamma_d_db, a.pd_dbm);
    let mut out = AseOut {
        lambda_per_km2: a.lambda_per_km2,
        gamma_d_db: None,
        pd_dbm: None,
        ase_per_km2: None,
        limit_ase_per_km2: limit,
    };
    if !a.limit {
        let Some(snr) = snr else {
            usage("ase needs --gamma-d-db or --pd-dbm (or --limit for the ceiling)")
        };
        let op = OperatingPoint::new(density, snr)?;
        out.gamma_d_db = Some(units::linear_to_db(snr)?);
        out.pd_dbm = Some(units::watt_to_dbm(op.tx_power_w(p))?);
        out.ase_per_km2 = Some(units::ase_per_m2_to_per_km2(ase_lower_bound(&op, p, &dc)?));
    }
    if json {
        print_json(&out);
    } else if let Some(ase) = out.ase_per_km2 {
        println!("ase        {:.6} bits/s/Hz/km^2", ase);
        println!("ceiling    {:.6} bits/s/Hz/km^2", out.limit_ase_per_km2);
    } else {
        println!("ceiling    {:.6} bits/s/Hz/km^2", out.limit_ase_per_km2);
    }
    Ok(())
}

#[derive(Serialize)]
struct CueOut {
    lambda_per_km2: f64,
    target_ase_per_km2: Option<f64>,
    se_bpshz: f64,
    kappa: f64,
    gamma_d_db: f64,
    pd_dbm: f64,
    dense_limit_se_bpshz: Option<f64>,
}

fn run_cue(p: &SystemParams, a: &CueArgs, json: bool) -> Result<(), Error> {
    let dc = DerivedConstants::from_params(p)?;
    let density = units::per_km2_to_per_m2(a.lambda_per_km2);
    let direct_snr = snr_from_power_flags(p, a.gamma_d_db, a.pd_dbm);
    let out = match (a.target_ase, direct_snr) {
        (Some(target_km2), None) => {
            let target = units::ase_per_km2_to_per_m2(target_km2);
            let snr = if target == 0.0 {
                1.0
            } else {
                required_tx_snr(density, target, p, &dc)?
            };
            let r = cue_se_at_target_ase(density, target, p, &dc)?;
            CueOut {
                lambda_per_km2: a.lambda_per_km2,
                target_ase_per_km2: Some(target_km2),
                se_bpshz: r.se,
                kappa: r.interference_fraction,
                gamma_d_db: units::linear_to_db(snr)?,
                pd_dbm: units::watt_to_dbm(snr * p.noise_w)?,
                dense_limit_se_bpshz: d2dse_core::cue_se_dense_limit(target, p, &dc)
                    .ok()
                    .map(|r| r.se),
            }
        }
        (None, Some(snr)) => {
            let op = OperatingPoint::new(density, snr)?;
            let se = cue_se_bound(&op, p, &dc);
            let x = dc.mean_intf_area_m2 * density * snr;
            CueOut {
                lambda_per_km2: a.lambda_per_km2,
                target_ase_per_km2: None,
                se_bpshz: se,
                kappa: x / (1.0 + x),
                gamma_d_db: units::linear_to_db(snr)?,
                pd_dbm: units::watt_to_dbm(op.tx_power_w(p))?,
                dense_limit_se_bpshz: None,
            }
        }
        _ => usage("cue needs exactly one of --target-ase, --gamma-d-db, --pd-dbm"),
    };
    if json {
        print_json(&out);
    } else {
        println!("se         {:.6} bits/s/Hz", out.se_bpshz);
        println!("kappa      {:.6}", out.kappa);
        println!("gamma_d    {:.4} dB", out.gamma_d_db);
        println!("pd         {:.4} dBm", out.pd_dbm);
        if let Some(lim) = out.dense_limit_se_bpshz {
            println!("dense_se   {:.6} bits/s/Hz", lim);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct McOut {
    kind: &'static str,
    unit: &'static str,
    mean: f64,
    std_err: Option<f64>,
    ci95_lo: Option<f64>,
    ci95_hi: Option<f64>,
    trials: u64,
    seed: u64,
    lambda_per_km2: f64,
    gamma_d_db: f64,
}

fn run_mc(p: &SystemParams, kind: &McCommand, json: bool) -> Result<(), Error> {
    let dc = DerivedConstants::from_params(p)?;
    let (label, a) = match kind {
        McCommand::Ase(a) => ("ase", a),
        McCommand::Cue(a) => ("cue", a),
        McCommand::Interference(a) => ("interference", a),
    };
    let density = units::per_km2_to_per_m2(a.lambda_per_km2);
    let cfg = mc_config(a.trials, a.seed, a.eps, a.mode, a.workers);

    let snr = match (
        snr_from_power_flags(p, a.gamma_d_db, a.pd_dbm),
        a.target_ase,
    ) {
        (Some(snr), None) => snr,
        (None, Some(target_km2)) => {
            let target = units::ase_per_km2_to_per_m2(target_km2);
            if a.calibrate {
                let cal = McConfig {
                    seed: cfg.seed ^ CAL_SEED_SALT,
                    ..cfg
                };
                mc_required_tx_snr(density, target, p, &cal)?
            } else {
                required_tx_snr(density, target, p, &dc)?
            }
        }
        (None, None) if density == 0.0 => 1.0,
        (Some(_), Some(_)) => usage("give either a power flag or --target-ase, not both"),
        (None, None) => usage("mc needs --gamma-d-db, --pd-dbm or --target-ase"),
    };

    let op = OperatingPoint::new(density, snr)?;
    let (est, unit) = match kind {
        McCommand::Ase(_) => {
            let mut e = mc_d2d_ase(&op, p, &cfg)?;
            e.mean = units::ase_per_m2_to_per_km2(e.mean);
            e.std_err = e.std_err.map(units::ase_per_m2_to_per_km2);
            e.ci95_lo = e.ci95_lo.map(units::ase_per_m2_to_per_km2);
            e.ci95_hi = e.ci95_hi.map(units::ase_per_m2_to_per_km2);
            (e, "bits/s/Hz/km^2")
        }
        McCommand::Cue(_) => (mc_cue_se(&op, p, &cfg)?, "bits/s/Hz"),
        McCommand::Interference(_) => (mc_mean_interference(&op, p, &cfg)?, "W"),
    };
    let out = McOut {
        kind: label,
        unit,
        mean: est.mean,
        std_err: est.std_err,
        ci95_lo: est.ci95_lo,
        ci95_hi: est.ci95_hi,
        trials: est.trials_used,
        seed: cfg.seed,
        lambda_per_km2: a.lambda_per_km2,
        gamma_d_db: units::linear_to_db(snr)?,
    };
    if json {
        print_json(&out);
    } else {
        println!("mean       {:.9e} {}", out.mean, out.unit);
        match (out.std_err, out.ci95_lo, out.ci95_hi) {
            (Some(se), Some(lo), Some(hi)) => {
                println!("std_err    {se:.3e}");
                println!("ci95       [{lo:.9e}, {hi:.9e}]");
            }
            _ => println!("std_err    unavailable (need >= 2 trials)"),
        }
        println!("trials     {}", out.trials);
        println!("seed       {}", out.seed);
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Error> {
    let vals: Result<Vec<f64>, _> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse())
        .collect();
    vals.map_err(|e| Error::InvalidSweep(format!("grid: {e}")))
}

fn run_sweep(params: SystemParams, preset: &SweepCommand) -> Result<(), Error> {
    let (rows, common) = match preset {
        SweepCommand::Fig2 { r0d, common } => {
            let mut spec = SweepSpec::lambda_sweep_default(params);
            spec.ase_target = Some(units::ase_per_km2_to_per_m2(*r0d));
            apply_mc(&mut spec, common);
            (run_lambda_sweep(&spec)?, common)
        }
        SweepCommand::Fig3 {
            antenna_counts,
            dense_lambda_per_km2,
            common,
        } => {
            let counts = if antenna_counts.is_empty() {
                vec![4, 8]
            } else {
                antenna_counts.clone()
            };
            let mut rows: Vec<SweepRow> = Vec::new();
            for n in counts {
                let mut p = params;
                p.tx_antennas = n;
                let mut spec = SweepSpec::ase_sweep_default(p);
                spec.dense_density = units::per_km2_to_per_m2(*dense_lambda_per_km2);
                apply_mc(&mut spec, common);
                rows.extend(run_ase_sweep(&spec)?);
            }
            (rows, common)
        }
        SweepCommand::Custom {
            kind,
            grid,
            r0d,
            dense_lambda_per_km2,
            common,
        } => {
            let grid = parse_grid(grid)?;
            let mut spec = match kind {
                KindArg::Lambda => {
                    let mut s = SweepSpec::lambda_sweep_default(params);
                    s.grid = grid.iter().map(|v| units::per_km2_to_per_m2(*v)).collect();
                    let Some(r0d) = r0d else {
                        usage("custom lambda sweep needs --r0d")
                    };
                    s.ase_target = Some(units::ase_per_km2_to_per_m2(*r0d));
                    s
                }
                KindArg::Ase => {
                    let mut s = SweepSpec::ase_sweep_default(params);
                    s.grid = grid
                        .iter()
                        .map(|v| units::ase_per_km2_to_per_m2(*v))
                        .collect();
                    s
                }
            };
            spec.dense_density = units::per_km2_to_per_m2(*dense_lambda_per_km2);
            apply_mc(&mut spec, common);
            let rows = match kind {
                KindArg::Lambda => run_lambda_sweep(&spec)?,
                KindArg::Ase => run_ase_sweep(&spec)?,
            };
            (rows, common)
        }
    };

    let format = match common.format {
        FormatArg::Csv => EmitFormat::Csv,
        FormatArg::Json => EmitFormat::Json,
    };
    match &common.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            emit(&rows, format, &mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            emit(&rows, format, &mut stdout.lock())?;
        }
    }
    Ok(())
}

fn apply_mc(spec: &mut SweepSpec, common: &SweepArgs) {
    if common.mc == OnOff::On {
        spec.mc = Some(mc_config(
            common.trials,
            common.seed,
            common.eps,
            common.mode,
            common.workers,
        ));
    }
    spec.mc_power = match common.mc_power {
        PowerArg::Solver => McPowerSource::Solver,
        PowerArg::Calibrated => McPowerSource::Calibrated,
    };
}
