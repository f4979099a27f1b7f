//! Preference construction for the association game.
//!
//! The UT side scores a UR by the direct-transmission secrecy rate
//! (bits/s/Hz). The UR side carries two views: the set utility
//! `U_i^{T_i} = (W/|T_i|) sum_j log2(1+snr_ji)` used when deciding, and the
//! per-UT reference preference `RP_i^k = W log2(1+snr_ki)` (bits/s), which
//! depends on that UT alone. The set utility equals the average of the
//! members' reference preferences, which is what the algorithms exploit.

use std::collections::BTreeSet;

use crate::beamforming::direct_secrecy_rate;
use crate::channel::{snr, ChannelSet};
use crate::geometry::Scenario;
use crate::params::PhysicalParams;

/// Preference state for one instance. The UT table starts at the physical
/// secrecy rates and is only ever decreased, by exact multiples of the
/// rejection penalty; the pristine values are kept for the swap phase and
/// welfare reporting.
#[derive(Clone, Debug)]
pub struct PreferenceTables {
    /// N x M, penalised during the preliminary phase.
    ut_pref: Vec<Vec<f64>>,
    /// N x M, untouched physical values.
    ut_pref_original: Vec<Vec<f64>>,
    /// M x N reference preferences.
    ur_ref_pref: Vec<Vec<f64>>,
    /// N x M, how often UR i has rejected UT k.
    rejection_counts: Vec<Vec<u32>>,
    delta: f64,
}

impl PreferenceTables {
    /// Build from explicit tables. `ut_pref` is N x M, `ur_ref_pref` M x N.
    /// The rejection penalty is one M-th of the largest UT preference, with
    /// a positive fallback when the whole table is zero (a zero penalty
    /// would let a rejected UT re-propose to the same full UR forever).
    pub fn from_tables(ut_pref: Vec<Vec<f64>>, ur_ref_pref: Vec<Vec<f64>>) -> Self {
        let n = ut_pref.len();
        let m = ur_ref_pref.len();
        assert!(ut_pref.iter().all(|row| row.len() == m));
        assert!(ur_ref_pref.iter().all(|row| row.len() == n));
        let max_pref = ut_pref
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max);
        let delta = if max_pref > 0.0 { max_pref / m as f64 } else { 1.0 };
        Self {
            ut_pref_original: ut_pref.clone(),
            rejection_counts: vec![vec![0; m]; n],
            ut_pref,
            ur_ref_pref,
            delta,
        }
    }

    pub fn n_ut(&self) -> usize {
        self.ut_pref.len()
    }

    pub fn n_ur(&self) -> usize {
        self.ur_ref_pref.len()
    }

    /// Physical (unpenalised) preference of UT `k` for UR `i`.
    pub fn ut_utility(&self, k: usize, i: usize) -> f64 {
        self.ut_pref_original[k][i]
    }

    /// Working preference including accumulated rejection penalties.
    pub fn penalized(&self, k: usize, i: usize) -> f64 {
        self.ut_pref[k][i]
    }

    /// Reference preference of UR `i` for UT `k`.
    pub fn reference(&self, i: usize, k: usize) -> f64 {
        self.ur_ref_pref[i][k]
    }

    pub fn rejections(&self, k: usize, i: usize) -> u32 {
        self.rejection_counts[k][i]
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Record a rejection of UT `k` by UR `i`.
    pub(crate) fn record_rejection(&mut self, k: usize, i: usize) {
        self.rejection_counts[k][i] += 1;
        self.ut_pref[k][i] -= self.delta;
    }

    /// Average reference preference of a set; equals the UR set utility.
    pub fn set_average(&self, i: usize, set: &BTreeSet<usize>) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        set.iter().map(|&k| self.ur_ref_pref[i][k]).sum::<f64>() / set.len() as f64
    }
}

/// Physical preference tables of one realized instance.
pub fn build_preferences(scenario: &Scenario, channels: &ChannelSet) -> PreferenceTables {
    let params = &scenario.params;
    let n = scenario.n_ut();
    let m = scenario.n_ur();

    let ut_pref: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..m).map(|i| direct_secrecy_rate(k, i, channels, params)).collect())
        .collect();
    let ur_ref_pref: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let gamma =
                        snr(params.power_budget, channels.ut_ur(k, i).magnitude_sq(), params.noise_power);
                    params.bandwidth * (1.0 + gamma).log2()
                })
                .collect()
        })
        .collect();

    PreferenceTables::from_tables(ut_pref, ur_ref_pref)
}

/// Average receiving rate of UR `i` over its partner set, bits/s. Empty sets
/// score zero by convention.
pub fn ur_set_utility(
    i: usize,
    set: &BTreeSet<usize>,
    channels: &ChannelSet,
    params: &PhysicalParams,
) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    let total: f64 = set
        .iter()
        .map(|&j| {
            let gamma = snr(params.power_budget, channels.ut_ur(j, i).magnitude_sq(), params.noise_power);
            params.bandwidth * (1.0 + gamma).log2()
        })
        .sum();
    total / set.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::realize_channels;
    use crate::geometry::{sample_scenario, DeploymentRegion, Position3D, Scenario, ScenarioConfig};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn fixed_scenario(ue_positions: Vec<Position3D>) -> (Scenario, ChannelSet) {
        let scenario = Scenario::new(
            vec![Position3D::new(0.0, 0.0, 0.0).unwrap(), Position3D::new(400.0, 0.0, 0.0).unwrap()],
            vec![
                Position3D::new(0.0, 0.0, 1000.0).unwrap(),
                Position3D::new(400.0, 0.0, 800.0).unwrap(),
            ],
            ue_positions,
            PhysicalParams::default(),
            vec![2, 2],
        )
        .unwrap();
        let channels = realize_channels(&scenario, 5).unwrap();
        (scenario, channels)
    }

    #[test]
    fn distant_eavesdropper_removes_the_clamp() {
        let (scenario, channels) =
            fixed_scenario(vec![Position3D::new(1e8, 1e8, 0.0).unwrap()]);
        let prefs = build_preferences(&scenario, &channels);
        let gamma = snr(
            scenario.params.power_budget,
            channels.ut_ur(0, 0).magnitude_sq(),
            scenario.params.noise_power,
        );
        assert_relative_eq!(prefs.ut_utility(0, 0), (1.0 + gamma).log2(), max_relative = 1e-9);
    }

    #[test]
    fn reference_preference_hand_value() {
        // 1 km vertical link at the baseline parameters: SNR 10.
        let (_, channels) = fixed_scenario(vec![Position3D::new(1e8, 1e8, 0.0).unwrap()]);
        let params = PhysicalParams::default();
        let gamma = snr(params.power_budget, channels.ut_ur(0, 0).magnitude_sq(), params.noise_power);
        assert_relative_eq!(gamma, 10.0, max_relative = 1e-12);
        let value = params.bandwidth * (1.0 + gamma).log2();
        assert_relative_eq!(value, 345943.1618637297, max_relative = 1e-12);
    }

    #[test]
    fn eavesdropper_on_top_of_ur_keeps_ordering_defined() {
        // A UE exactly at UR 0's position floors every UT's preference for
        // UR 0 without breaking comparability of the rest of the row.
        let (scenario, channels) =
            fixed_scenario(vec![Position3D::new(0.0, 0.0, 999.0).unwrap()]);
        let prefs = build_preferences(&scenario, &channels);
        for k in 0..2 {
            let row: Vec<f64> = (0..2).map(|i| prefs.ut_utility(k, i)).collect();
            assert!(row.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }

    #[test]
    fn set_utility_singleton_and_equal_pair() {
        let (scenario, channels) = fixed_scenario(vec![Position3D::new(1e8, 1e8, 0.0).unwrap()]);
        let params = &scenario.params;
        let single: BTreeSet<usize> = [0].into_iter().collect();
        let prefs = build_preferences(&scenario, &channels);
        assert_relative_eq!(
            ur_set_utility(0, &single, &channels, params),
            prefs.reference(0, 0),
            max_relative = 1e-12
        );
        assert_eq!(ur_set_utility(0, &BTreeSet::new(), &channels, params), 0.0);
    }

    #[test]
    fn set_average_matches_physical_set_utility() {
        let config = ScenarioConfig {
            n_ut: 6,
            n_ur: 2,
            n_ue: 2,
            quota: 3,
            region: DeploymentRegion::default(),
            params: PhysicalParams::default(),
        };
        let scenario = sample_scenario(&config, 8).unwrap();
        let channels = realize_channels(&scenario, 8).unwrap();
        let prefs = build_preferences(&scenario, &channels);
        let set: BTreeSet<usize> = [0, 3, 5].into_iter().collect();
        assert_relative_eq!(
            prefs.set_average(1, &set),
            ur_set_utility(1, &set, &channels, &scenario.params),
            max_relative = 1e-12
        );
    }

    #[test]
    fn delta_is_positive_even_for_zero_tables() {
        let prefs = PreferenceTables::from_tables(vec![vec![0.0; 3]; 4], vec![vec![1.0; 4]; 3]);
        assert!(prefs.delta() > 0.0);
    }

    proptest! {
        /// Adding a member whose rate is below the current average strictly
        /// lowers the average.
        #[test]
        fn below_average_member_lowers_set_utility(seed in 0u64..200) {
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let values: Vec<f64> = (0..6).map(|_| rng.random_range(0.1..10.0)).collect();
            let prefs = PreferenceTables::from_tables(
                vec![vec![0.0; 1]; 6],
                vec![values.clone()],
            );
            let set: BTreeSet<usize> = [0, 1, 2].into_iter().collect();
            let average = prefs.set_average(0, &set);
            for extra in 3..6 {
                let mut grown = set.clone();
                grown.insert(extra);
                if values[extra] < average {
                    prop_assert!(prefs.set_average(0, &grown) < average);
                }
            }
        }
    }
}
