//! Boundary unit conversions.
//!
//! Everything inside the library is strict SI: watts, metres, m⁻²,
//! bits/s/Hz/m². dBm, dB and km⁻² exist only at the presentation layer,
//! and these converters are the only place the factors live.

use crate::error::{Error, Result};

/// dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm. Errors on non-positive power.
pub fn watt_to_dbm(w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "watt_to_dbm requires a positive power, got {w}"
        )));
    }
    Ok(10.0 * (w * 1e3).log10())
}

/// dB to linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear ratio to dB. Errors on non-positive ratios.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "linear_to_db requires a positive ratio, got {x}"
        )));
    }
    Ok(10.0 * x.log10())
}

/// Density per km² to per m².
pub fn per_km2_to_per_m2(x: f64) -> f64 {
    x / 1e6
}

/// Density per m² to per km².
pub fn per_m2_to_per_km2(x: f64) -> f64 {
    x * 1e6
}

/// Area spectral efficiency, bits/s/Hz/km² to bits/s/Hz/m².
pub fn ase_per_km2_to_per_m2(x: f64) -> f64 {
    x / 1e6
}

/// Area spectral efficiency, bits/s/Hz/m² to bits/s/Hz/km².
pub fn ase_per_m2_to_per_km2(x: f64) -> f64 {
    x * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_reference_points() {
        assert!((dbm_to_watt(-114.0) - 3.9810717055349725e-15).abs() / 3.98e-15 < 1e-12);
        assert_eq!(dbm_to_watt(30.0), 1.0);
        assert_eq!(watt_to_dbm(1.0).unwrap(), 30.0);
    }

    #[test]
    fn density_factor() {
        assert_eq!(per_km2_to_per_m2(100.0), 1e-4);
        assert_eq!(per_m2_to_per_km2(1e-4), 100.0);
        assert_eq!(ase_per_km2_to_per_m2(25.0), 2.5e-5);
    }

    #[test]
    fn non_positive_power_rejected() {
        assert!(watt_to_dbm(0.0).is_err());
        assert!(watt_to_dbm(-1.0).is_err());
        assert!(linear_to_db(0.0).is_err());
    }
}
