//! Physical-layer parameters shared by every stage of the pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transmission parameters, all in linear units (watts, hertz, ratios).
///
/// dBm / dB inputs are converted once at the configuration boundary; see
/// [`crate::units`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Path loss exponent (alpha).
    pub path_loss_exponent: f64,
    /// Noise power at every receiver, watts.
    pub noise_power: f64,
    /// Per-slot power budget shared by a source and its relays, watts.
    pub power_budget: f64,
    /// Common system bandwidth, hertz.
    pub bandwidth: f64,
    /// Minimum SNR for a relay to decode the broadcast, linear ratio.
    pub snr_threshold: f64,
}

impl PhysicalParams {
    pub fn new(
        path_loss_exponent: f64,
        noise_power: f64,
        power_budget: f64,
        bandwidth: f64,
        snr_threshold: f64,
    ) -> Result<Self> {
        let params = Self {
            path_loss_exponent,
            noise_power,
            power_budget,
            bandwidth,
            snr_threshold,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("path_loss_exponent", self.path_loss_exponent),
            ("noise_power", self.noise_power),
            ("power_budget", self.power_budget),
            ("bandwidth", self.bandwidth),
            ("snr_threshold", self.snr_threshold),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be strictly positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Farthest distance at which a relay can still be fed at the decoding
    /// threshold without exceeding the power budget:
    /// `(P0 / (gamma * sigma^2))^(1/alpha)`.
    pub fn effective_radius(&self) -> f64 {
        (self.power_budget / (self.snr_threshold * self.noise_power))
            .powf(1.0 / self.path_loss_exponent)
    }
}

impl Default for PhysicalParams {
    /// Baseline values: alpha = 2, sigma^2 = -60 dBm, P0 = 10 dBm,
    /// W = 100 kHz, gamma = 10 dB.
    fn default() -> Self {
        Self {
            path_loss_exponent: 2.0,
            noise_power: 1e-9,
            power_budget: 1e-2,
            bandwidth: 1e5,
            snr_threshold: 10.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_radius_is_one_kilometre() {
        assert_relative_eq!(PhysicalParams::default().effective_radius(), 1000.0, max_relative = 1e-12);
    }

    #[test]
    fn radius_at_18_dbm() {
        let params = PhysicalParams {
            power_budget: crate::units::dbm_to_watts(18.0),
            ..PhysicalParams::default()
        };
        assert_relative_eq!(params.effective_radius(), 2511.8864315095802, max_relative = 1e-9);
    }

    #[test]
    fn radius_unit_solution() {
        let params = PhysicalParams {
            power_budget: 10.0 * 1e-9,
            ..PhysicalParams::default()
        };
        assert_relative_eq!(params.effective_radius(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_non_positive_fields() {
        assert!(PhysicalParams::new(2.0, 0.0, 1e-2, 1e5, 10.0).is_err());
        assert!(PhysicalParams::new(-2.0, 1e-9, 1e-2, 1e5, 10.0).is_err());
        assert!(PhysicalParams::new(2.0, 1e-9, f64::NAN, 1e5, 10.0).is_err());
    }
}
