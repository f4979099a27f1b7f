//! Unit conversions at the configuration boundary.
//!
//! All internal arithmetic is carried out in watts and linear SNR ratios;
//! dBm and dB appear only while parsing configuration and when labelling
//! sweep axes.

/// `x` dBm -> watts: `10^(x/10)` milliwatts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// watts -> dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// `x` dB -> linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// linear power ratio -> dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
