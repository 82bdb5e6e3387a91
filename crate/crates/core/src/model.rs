//! System parameters, derived constants and the large-scale channel law.
//!
//! A link at distance `r` has gain
//! `beta = (wavelength / 4 pi d0)^2 / pathloss(r) * exp(-X ln10 / 10)`
//! where `pathloss(r) = max(1, r/d0)^alpha` and `X ~ Normal(0, sigma_db^2)`
//! is the shadowing term in dB. The two moment constants exported here are
//! `E[beta] = c0 / pathloss(r)` and `E[1/beta] = c1 * pathloss(r)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::dbm_to_watt;

/// Propagation constant used for wavelength derivation, m/s (kept at the
/// round value so derived constants are reproducible bit-for-bit).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

const LN10_OVER_10: f64 = core::f64::consts::LN_10 / 10.0;

/// Physical and layout constants of the underlay scenario.
///
/// Immutable after construction; validate with [`SystemParams::validate`]
/// or derive constants via [`DerivedConstants::from_params`], which
/// validates first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Far-field reference distance d0, m.
    pub far_field_m: f64,
    /// Fixed Tx-Rx separation of a device pair, m. Must exceed `far_field_m`.
    pub pair_separation_m: f64,
    /// Pathloss exponent beyond the far-field clamp. Must exceed 2 or the
    /// aggregate-interference integral diverges.
    pub pathloss_exp: f64,
    /// Lognormal shadowing standard deviation, dB. 0 disables shadowing.
    pub shadowing_db: f64,
    /// Receiver noise power, W.
    pub noise_w: f64,
    /// Antenna count at each device transmitter. Must be >= 2 (formulas
    /// divide by `tx_antennas - 1`).
    pub tx_antennas: u32,
    /// Interference-free per-user SE of a cellular user, bits/s/Hz.
    pub cue_se_clean: f64,
}

impl Default for SystemParams {
    /// Urban micro-cell reference configuration: 2 GHz carrier, 35 m far
    /// field, 50 m pair separation, exponent 4, 3 dB shadowing, -114 dBm
    /// noise, 4 Tx antennas, 3 bits/s/Hz clean CUE rate.
    fn default() -> Self {
        SystemParams {
            carrier_hz: 2.0e9,
            far_field_m: 35.0,
            pair_separation_m: 50.0,
            pathloss_exp: 4.0,
            shadowing_db: 3.0,
            noise_w: dbm_to_watt(-114.0),
            tx_antennas: 4,
            cue_se_clean: 3.0,
        }
    }
}

impl SystemParams {
    /// Checks every domain constraint, naming the violated one.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ParameterDomain(msg));
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return fail(format!(
                "carrier_hz must be positive, got {}",
                self.carrier_hz
            ));
        }
        if !(self.far_field_m > 0.0 && self.far_field_m.is_finite()) {
            return fail(format!(
                "far_field_m must be positive, got {}",
                self.far_field_m
            ));
        }
        if !(self.pair_separation_m > self.far_field_m && self.pair_separation_m.is_finite()) {
            return fail(format!(
                "pair_separation_m must exceed far_field_m ({} <= {})",
                self.pair_separation_m, self.far_field_m
            ));
        }
        if !(self.pathloss_exp > 2.0 && self.pathloss_exp.is_finite()) {
            return fail(format!(
                "pathloss_exp must exceed 2 (aggregate interference diverges otherwise), got {}",
                self.pathloss_exp
            ));
        }
        if !(self.shadowing_db >= 0.0 && self.shadowing_db.is_finite()) {
            return fail(format!(
                "shadowing_db must be >= 0, got {}",
                self.shadowing_db
            ));
        }
        if !(self.noise_w > 0.0 && self.noise_w.is_finite()) {
            return fail(format!("noise_w must be positive, got {}", self.noise_w));
        }
        if self.tx_antennas < 2 {
            return fail(format!(
                "tx_antennas must be >= 2 (formulas divide by tx_antennas - 1), got {}",
                self.tx_antennas
            ));
        }
        if !(self.cue_se_clean > 0.0 && self.cue_se_clean.is_finite()) {
            return fail(format!(
                "cue_se_clean must be positive, got {}",
                self.cue_se_clean
            ));
        }
        Ok(())
    }

    /// Carrier wavelength, m.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Distance-dependent pathloss `max(1, r/d0)^alpha`, clamped to 1
    /// inside the far field. Total on r >= 0.
    pub fn pathloss(&self, r_m: f64) -> f64 {
        (r_m / self.far_field_m).max(1.0).powf(self.pathloss_exp)
    }

    /// Free-space amplitude gain squared at the far-field distance,
    /// `(wavelength / 4 pi d0)^2`.
    pub fn reference_gain(&self) -> f64 {
        let a = self.wavelength_m() / (4.0 * core::f64::consts::PI * self.far_field_m);
        a * a
    }
}

/// Draws one shadowed large-scale link gain at distance `r_m`.
///
/// With `shadowing_db == 0` the result is deterministic (the standard
/// normal is still consumed so stream layouts do not depend on the
/// parameter).
pub fn sample_link_gain<R: Rng + ?Sized>(p: &SystemParams, r_m: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let shadow = (-(p.shadowing_db * z) * LN10_OVER_10).exp();
    p.reference_gain() / p.pathloss(r_m) * shadow
}

/// Constants computed once from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// Carrier wavelength, m.
    pub wavelength_m: f64,
    /// Mean-gain constant: `E[link gain] = c0 / pathloss(r)`.
    pub c0: f64,
    /// Mean inverse-gain constant: `E[1 / link gain] = c1 * pathloss(r)`.
    pub c1: f64,
    /// Area factor turning `density * tx_power` into mean aggregate
    /// interference power, m²: `E[I] = mean_intf_area_m2 * density * P`.
    pub mean_intf_area_m2: f64,
    /// Area factor turning the per-area rate demand into the CUE
    /// interference fraction, m²: `kappa = demand * ase_load_area_m2 / (N-1)`
    /// with `demand = density * (2^(ase/density) - 1)`.
    pub ase_load_area_m2: f64,
}

impl DerivedConstants {
    /// Validates `p` and evaluates the defining formulas.
    ///
    /// The shadowing moment factor is `exp(sigma_db^2 (ln 10)^2 / 200)`,
    /// entering both `c0` and `c1`, so `c0 * c1` equals
    /// `exp(sigma_db^2 (ln 10)^2 / 100)` independently of geometry.
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        p.validate()?;
        let ln10 = core::f64::consts::LN_10;
        let moment = (p.shadowing_db * p.shadowing_db * ln10 * ln10 / 200.0).exp();
        let c0 = p.reference_gain() * moment;
        let c1 = moment / p.reference_gain();
        let alpha = p.pathloss_exp;
        let d0 = p.far_field_m;
        let mean_intf_area_m2 = core::f64::consts::PI * d0 * d0 * c0 * alpha / (alpha - 2.0);
        let ase_load_area_m2 = mean_intf_area_m2 * c1 * (p.pair_separation_m / d0).powf(alpha);
        Ok(DerivedConstants {
            wavelength_m: p.wavelength_m(),
            c0,
            c1,
            mean_intf_area_m2,
            ase_load_area_m2,
        })
    }
}

/// The free variables of every rate expression: transmitter density and
/// transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// D2D transmitter density, m⁻². May be zero (no interferers).
    pub density_per_m2: f64,
    /// D2D transmit SNR, `P_D / noise_w`, linear.
    pub tx_snr: f64,
}

impl OperatingPoint {
    pub fn new(density_per_m2: f64, tx_snr: f64) -> Result<Self> {
        if !(density_per_m2 >= 0.0 && density_per_m2.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "density_per_m2 must be >= 0, got {density_per_m2}"
            )));
        }
        if !(tx_snr > 0.0 && tx_snr.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "tx_snr must be positive, got {tx_snr}"
            )));
        }
        Ok(OperatingPoint {
            density_per_m2,
            tx_snr,
        })
    }

    /// Transmit power in watts for the given noise floor.
    pub fn tx_power_w(&self, p: &SystemParams) -> f64 {
        self.tx_snr * p.noise_w
    }
}
