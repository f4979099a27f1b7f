//! Line-of-sight channel realization.
//!
//! Air-to-air links are modelled as pure LoS: `h = d^(-alpha/2) * e^(j*theta)`
//! with an independent uniform phase per link per trial. Only magnitudes are
//! distance-determined, so regenerating with the same seed reproduces the
//! exact same complex gains.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Scenario};
use crate::rng;

/// One complex LoS gain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexGain(Complex64);

impl ComplexGain {
    /// Build from the pair distance and a phase in `[0, 2*pi)`.
    pub fn from_link(dist: f64, path_loss_exponent: f64, phase: f64) -> Self {
        let magnitude = dist.powf(-path_loss_exponent / 2.0);
        Self(Complex64::from_polar(magnitude, phase))
    }

    pub fn as_complex(&self) -> Complex64 {
        self.0
    }

    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    /// `|h|^2`, the quantity every SNR expression consumes.
    pub fn magnitude_sq(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn phase(&self) -> f64 {
        self.0.arg().rem_euclid(TAU)
    }
}

/// All complex gains of one trial.
///
/// UT-UT gains are reciprocal (`h[k][j] == h[j][k]`); the diagonal is unused
/// and kept at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    ut_ur: Vec<Vec<ComplexGain>>,
    ut_ue: Vec<Vec<ComplexGain>>,
    ut_ut: Vec<Vec<ComplexGain>>,
}

impl ChannelSet {
    /// Gain of the UT `k` -> UR `i` link.
    pub fn ut_ur(&self, k: usize, i: usize) -> ComplexGain {
        self.ut_ur[k][i]
    }

    /// Gain of the UT `k` -> UE `s` link.
    pub fn ut_ue(&self, k: usize, s: usize) -> ComplexGain {
        self.ut_ue[k][s]
    }

    /// Gain of the UT `k` -> UT `j` link, `k != j`.
    pub fn ut_ut(&self, k: usize, j: usize) -> ComplexGain {
        debug_assert_ne!(k, j, "diagonal UT-UT gain is undefined");
        self.ut_ut[k][j]
    }

    pub fn n_ut(&self) -> usize {
        self.ut_ur.len()
    }

    pub fn n_ur(&self) -> usize {
        self.ut_ur[0].len()
    }

    pub fn n_ue(&self) -> usize {
        self.ut_ue[0].len()
    }
}

/// Received SNR as a linear ratio: `P * |h|^2 / sigma^2`.
pub fn snr(tx_power: f64, gain_sq: f64, noise: f64) -> f64 {
    tx_power * gain_sq / noise
}

/// Realize every link gain for a scenario. Pure in `(scenario, seed)`.
///
/// Phase draw order: UT-UR row major, then UT-UE row major, then the upper
/// triangle of UT-UT (k < j), mirrored to keep reciprocity.
pub fn realize_channels(scenario: &Scenario, seed: u64) -> Result<ChannelSet> {
    let mut rng = rng::stream_rng(seed, rng::stream::CHANNELS);
    let alpha = scenario.params.path_loss_exponent;
    let (n, m, s) = (scenario.n_ut(), scenario.n_ur(), scenario.n_ue());

    let link = |dist: f64, a: String, b: String, rng: &mut rand_chacha::ChaCha12Rng| {
        if dist <= 0.0 {
            return Err(Error::DegenerateGeometry { a, b });
        }
        Ok(ComplexGain::from_link(dist, alpha, rng.random_range(0.0..TAU)))
    };

    let mut ut_ur = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = Vec::with_capacity(m);
        for i in 0..m {
            let d = distance(&scenario.ut_positions[k], &scenario.ur_positions[i]);
            row.push(link(d, format!("UT{k}"), format!("UR{i}"), &mut rng)?);
        }
        ut_ur.push(row);
    }

    let mut ut_ue = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = Vec::with_capacity(s);
        for e in 0..s {
            let d = distance(&scenario.ut_positions[k], &scenario.ue_positions[e]);
            row.push(link(d, format!("UT{k}"), format!("UE{e}"), &mut rng)?);
        }
        ut_ue.push(row);
    }

    let zero = ComplexGain(Complex64::new(0.0, 0.0));
    let mut ut_ut = vec![vec![zero; n]; n];
    for k in 0..n {
        for j in (k + 1)..n {
            let d = distance(&scenario.ut_positions[k], &scenario.ut_positions[j]);
            let gain = link(d, format!("UT{k}"), format!("UT{j}"), &mut rng)?;
            ut_ut[k][j] = gain;
            ut_ut[j][k] = gain;
        }
    }

    Ok(ChannelSet { ut_ur, ut_ue, ut_ut })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_scenario, DeploymentRegion, Position3D, ScenarioConfig};
    use crate::params::PhysicalParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn default_config() -> ScenarioConfig {
        ScenarioConfig {
            n_ut: 12,
            n_ur: 3,
            n_ue: 2,
            quota: 4,
            region: DeploymentRegion::default(),
            params: PhysicalParams::default(),
        }
    }

    #[test]
    fn magnitude_follows_path_loss() {
        assert_relative_eq!(ComplexGain::from_link(1.0, 2.0, 0.3).magnitude(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            ComplexGain::from_link(1000.0, 2.0, 1.0).magnitude_sq(),
            1e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            ComplexGain::from_link(500.0, 2.0, 2.0).magnitude_sq(),
            4e-6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn snr_arithmetic() {
        assert_relative_eq!(snr(0.01, 1e-6, 1e-9), 10.0, max_relative = 1e-12);
        assert_eq!(snr(0.01, 0.0, 1e-9), 0.0);
        assert_relative_eq!(snr(0.01, 4e-6, 1e-9), 40.0, max_relative = 1e-12);
    }

    #[test]
    fn channels_are_seed_deterministic() {
        let scenario = sample_scenario(&default_config(), 11).unwrap();
        let a = realize_channels(&scenario, 5).unwrap();
        let b = realize_channels(&scenario, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, realize_channels(&scenario, 6).unwrap());
    }

    #[test]
    fn ut_ut_gains_are_reciprocal() {
        let scenario = sample_scenario(&default_config(), 3).unwrap();
        let channels = realize_channels(&scenario, 3).unwrap();
        for k in 0..scenario.n_ut() {
            for j in 0..scenario.n_ut() {
                if k != j {
                    assert_eq!(channels.ut_ut(k, j), channels.ut_ut(j, k));
                }
            }
        }
    }

    #[test]
    fn magnitudes_match_recomputed_distances() {
        let scenario = sample_scenario(&default_config(), 17).unwrap();
        let channels = realize_channels(&scenario, 17).unwrap();
        let alpha = scenario.params.path_loss_exponent;
        for k in 0..scenario.n_ut() {
            for i in 0..scenario.n_ur() {
                let d = distance(&scenario.ut_positions[k], &scenario.ur_positions[i]);
                assert_relative_eq!(
                    channels.ut_ur(k, i).magnitude(),
                    d.powf(-alpha / 2.0),
                    max_relative = 1e-12
                );
            }
            for s in 0..scenario.n_ue() {
                let d = distance(&scenario.ut_positions[k], &scenario.ue_positions[s]);
                assert_relative_eq!(
                    channels.ut_ue(k, s).magnitude(),
                    d.powf(-alpha / 2.0),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn colocated_nodes_are_rejected() {
        let p = Position3D::new(10.0, 10.0, 10.0).unwrap();
        let scenario = Scenario::new(
            vec![p, p],
            vec![Position3D::new(0.0, 0.0, 600.0).unwrap()],
            vec![Position3D::new(5.0, 5.0, 5.0).unwrap()],
            PhysicalParams::default(),
            vec![2],
        )
        .unwrap();
        assert!(matches!(
            realize_channels(&scenario, 1),
            Err(Error::DegenerateGeometry { .. })
        ));
    }

    proptest! {
        /// distance <= effective radius exactly when the broadcast-power rule
        /// fits inside the budget.
        #[test]
        fn radius_consistency(d in 1.0f64..4000.0) {
            let params = PhysicalParams::default();
            let gain = ComplexGain::from_link(d, params.path_loss_exponent, 0.0);
            let required = params.snr_threshold * params.noise_power / gain.magnitude_sq();
            let radius = params.effective_radius();
            // Skip the knife edge where both predicates flip.
            if (required - params.power_budget).abs() > 1e-9 * params.power_budget {
                prop_assert_eq!(d <= radius, required <= params.power_budget);
            }
        }

        #[test]
        fn phases_live_in_the_unit_circle(seed in 0u64..500) {
            let scenario = sample_scenario(&default_config(), seed).unwrap();
            let channels = realize_channels(&scenario, seed).unwrap();
            let phase = channels.ut_ur(0, 0).phase();
            prop_assert!((0.0..TAU).contains(&phase));
        }
    }
}
