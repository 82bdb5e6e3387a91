//! Closed-form rate expressions: the D2D area-spectral-efficiency lower
//! bound and its interference-limited ceiling, the required-SNR solver at
//! a fixed ASE target, and the CUE per-user SE under D2D interference
//! together with its dense-network limit.
//!
//! All functions are pure, take SI inputs (m⁻², bits/s/Hz/m², linear SNR)
//! and are safe to call concurrently.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DerivedConstants, OperatingPoint, SystemParams};

const LN_2: f64 = core::f64::consts::LN_2;

/// Relative margin kept between a feasible target and the ceiling, so the
/// solver never returns the astronomical SNR values next to the pole.
pub const DEFAULT_FEASIBILITY_MARGIN: f64 = 1e-9;

/// D2D ASE bound and ceiling at one operating point, bits/s/Hz/m².
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AseBoundResult {
    /// Achievable ASE at the given finite transmit SNR.
    pub bound: f64,
    /// Interference-limited ceiling for the same density (SNR -> infinity).
    pub ceiling: f64,
}

/// CUE per-user SE at a fixed D2D ASE target.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CueSeResult {
    /// Per-user SE of a cellular user, bits/s/Hz.
    pub se: f64,
    /// Fraction of the interference-free SINR eaten by D2D interference.
    pub interference_fraction: f64,
    /// Interference-free SINR `2^cue_se_clean - 1`.
    pub sinr_free: f64,
}

/// Interference-free CUE SINR: `2^se - 1`. Exact at integer rates.
pub fn interference_free_sinr(cue_se_clean: f64) -> f64 {
    cue_se_clean.exp2() - 1.0
}

/// Per-area SINR demand `density * (2^(target/density) - 1)`.
///
/// Strictly decreasing in the density at a fixed target; evaluated through
/// `exp_m1` so the dense regime (`target/density << 1`) keeps full
/// precision.
pub fn sinr_demand(density_per_m2: f64, ase_target: f64) -> f64 {
    density_per_m2 * (ase_target / density_per_m2 * LN_2).exp_m1()
}

/// Interference fraction `kappa` at a density and ASE target.
pub fn interference_fraction(
    density_per_m2: f64,
    ase_target: f64,
    p: &SystemParams,
    dc: &DerivedConstants,
) -> f64 {
    sinr_demand(density_per_m2, ase_target) * dc.ase_load_area_m2 / (p.tx_antennas as f64 - 1.0)
}

fn require_positive_density(density: f64) -> Result<()> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "density_per_m2 must be positive for ASE expressions, got {density}"
        )));
    }
    Ok(())
}

/// Achievable D2D ASE at an operating point, bits/s/Hz/m².
///
/// Requires a positive density (the per-pair rate divides by it).
pub fn ase_lower_bound(
    op: &OperatingPoint,
    p: &SystemParams,
    dc: &DerivedConstants,
) -> Result<f64> {
    require_positive_density(op.density_per_m2)?;
    let n1 = p.tx_antennas as f64 - 1.0;
    let ratio = (p.far_field_m / p.pair_separation_m).powf(p.pathloss_exp);
    let intf = op.density_per_m2 * dc.mean_intf_area_m2 * op.tx_snr;
    let x = n1 * ratio * op.tx_snr / (dc.c1 * (1.0 + intf));
    Ok(op.density_per_m2 * x.ln_1p() / LN_2)
}

/// Interference-limited ASE ceiling at a density, bits/s/Hz/m².
pub fn ase_limit(density_per_m2: f64, p: &SystemParams, dc: &DerivedConstants) -> Result<f64> {
    require_positive_density(density_per_m2)?;
    let alpha = p.pathloss_exp;
    let n1 = p.tx_antennas as f64 - 1.0;
    let d0 = p.far_field_m;
    let denom = density_per_m2
        * core::f64::consts::PI
        * d0
        * d0
        * dc.c0
        * dc.c1
        * (d0 / p.pair_separation_m).powf(-alpha);
    let x = n1 * (1.0 - 2.0 / alpha) / denom;
    Ok(density_per_m2 * x.ln_1p() / LN_2)
}

/// Bound and ceiling together.
pub fn ase_bounds(
    op: &OperatingPoint,
    p: &SystemParams,
    dc: &DerivedConstants,
) -> Result<AseBoundResult> {
    Ok(AseBoundResult {
        bound: ase_lower_bound(op, p, dc)?,
        ceiling: ase_limit(op.density_per_m2, p, dc)?,
    })
}

/// Transmit SNR required to reach `ase_target` at `density`, with the
/// default feasibility margin.
pub fn required_tx_snr(
    density_per_m2: f64,
    ase_target: f64,
    p: &SystemParams,
    dc: &DerivedConstants,
) -> Result<f64> {
    required_tx_snr_with_margin(
        density_per_m2,
        ase_target,
        p,
        dc,
        DEFAULT_FEASIBILITY_MARGIN,
    )
}

/// Transmit SNR required to reach `ase_target` at `density`.
///
/// Feasible only while the interference fraction stays below `1 - margin`;
/// at the boundary the solution diverges (the pole of the inversion), so
/// the margin keeps callers away from meaningless astronomical SNRs.
pub fn required_tx_snr_with_margin(
    density_per_m2: f64,
    ase_target: f64,
    p: &SystemParams,
    dc: &DerivedConstants,
    margin: f64,
) -> Result<f64> {
    require_positive_density(density_per_m2)?;
    if !(ase_target > 0.0 && ase_target.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "ase_target must be positive, got {ase_target}"
        )));
    }
    let kappa = interference_fraction(density_per_m2, ase_target, p, dc);
    if kappa >= 1.0 - margin {
        return Err(Error::InfeasibleAse {
            target: ase_target,
            limit: ase_limit(density_per_m2, p, dc)?,
        });
    }
    let n1 = p.tx_antennas as f64 - 1.0;
    let gain_ratio = (p.far_field_m / p.pair_separation_m).powf(p.pathloss_exp);
    let demand = sinr_demand(density_per_m2, ase_target);
    let inv = (n1 / dc.c1) * gain_ratio / demand - dc.mean_intf_area_m2;
    Ok(1.0 / (density_per_m2 * inv))
}

/// CUE per-user SE at an operating point, bits/s/Hz.
///
/// Total on valid operating points; a zero density returns the clean rate.
pub fn cue_se_bound(op: &OperatingPoint, p: &SystemParams, dc: &DerivedConstants) -> f64 {
    let sinr_free = interference_free_sinr(p.cue_se_clean);
    let intf = dc.mean_intf_area_m2 * op.density_per_m2 * op.tx_snr;
    (sinr_free / (1.0 + intf)).ln_1p() / LN_2
}

/// CUE per-user SE when the D2D network holds a fixed ASE target.
///
/// Algebraically identical to solving for the required SNR and evaluating
/// [`cue_se_bound`] there; infeasible targets propagate the solver error.
pub fn cue_se_at_target_ase(
    density_per_m2: f64,
    ase_target: f64,
    p: &SystemParams,
    dc: &DerivedConstants,
) -> Result<CueSeResult> {
    require_positive_density(density_per_m2)?;
    if !(ase_target >= 0.0 && ase_target.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "ase_target must be >= 0, got {ase_target}"
        )));
    }
    let kappa = if ase_target == 0.0 {
        0.0
    } else {
        let k = interference_fraction(density_per_m2, ase_target, p, dc);
        if k >= 1.0 - DEFAULT_FEASIBILITY_MARGIN {
            return Err(Error::InfeasibleAse {
                target: ase_target,
                limit: ase_limit(density_per_m2, p, dc)?,
            });
        }
        k
    };
    assert!(
        kappa < 1.0,
        "interference fraction must stay below 1 on feasible inputs"
    );
    let sinr_free = interference_free_sinr(p.cue_se_clean);
    Ok(CueSeResult {
        se: (sinr_free * (1.0 - kappa)).ln_1p() / LN_2,
        interference_fraction: kappa,
        sinr_free,
    })
}

/// Dense-network limit of the CUE per-user SE at a fixed ASE target.
///
/// Depends on the target and antenna count only through
/// `ase_target / (tx_antennas - 1)`. Errors when no positive SE survives.
pub fn cue_se_dense_limit(
    ase_target: f64,
    p: &SystemParams,
    dc: &DerivedConstants,
) -> Result<CueSeResult> {
    if !(ase_target >= 0.0 && ase_target.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "ase_target must be >= 0, got {ase_target}"
        )));
    }
    let kappa = dc.ase_load_area_m2 * ase_target * LN_2 / (p.tx_antennas as f64 - 1.0);
    if kappa >= 1.0 {
        return Err(Error::NoPositiveLimit { kappa_inf: kappa });
    }
    let sinr_free = interference_free_sinr(p.cue_se_clean);
    Ok(CueSeResult {
        se: (sinr_free * (1.0 - kappa)).ln_1p() / LN_2,
        interference_fraction: kappa,
        sinr_free,
    })
}

/// Mean aggregate interference power at a victim receiver, W.
pub fn mean_interference_w(op: &OperatingPoint, p: &SystemParams, dc: &DerivedConstants) -> f64 {
    dc.mean_intf_area_m2 * op.density_per_m2 * op.tx_power_w(p)
}

/// Smallest density whose interference-limited ceiling reaches
/// `ase_target` (the ceiling is strictly increasing in the density).
///
/// Errors when no density works, i.e. the target exceeds the global
/// ceiling `(tx_antennas - 1) / (ase_load_area_m2 * ln 2)`.
pub fn min_feasible_density(
    ase_target: f64,
    p: &SystemParams,
    dc: &DerivedConstants,
) -> Result<f64> {
    if !(ase_target > 0.0 && ase_target.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "ase_target must be positive, got {ase_target}"
        )));
    }
    let n1 = p.tx_antennas as f64 - 1.0;
    let kappa_inf = dc.ase_load_area_m2 * ase_target * LN_2 / n1;
    if kappa_inf >= 1.0 {
        return Err(Error::NoPositiveLimit { kappa_inf });
    }
    // Ceiling(density) = density * log2(1 + u) with u = (N-1)/(density * Theta).
    // Setting it equal to the target reduces to ln(1+u)/u = kappa_inf, with
    // ln(1+u)/u strictly decreasing from 1 to 0; bisect on log10(u).
    let f = |u: f64| u.ln_1p() / u - kappa_inf;
    let (mut lo, mut hi) = (1e-300_f64, 1e300_f64);
    for _ in 0..200 {
        let mid = (lo.ln() + hi.ln()) / 2.0;
        let mid = mid.exp();
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = (lo.ln() + hi.ln()) / 2.0;
    Ok(n1 / (u.exp() * dc.ase_load_area_m2))
}
