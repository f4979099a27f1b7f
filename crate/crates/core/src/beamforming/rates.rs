//! Secrecy rates, broadcast costs, and the three-branch utility law of a
//! coalition transmission slot.
//!
//! A slot splits into two half-slots. In the broadcast half the source feeds
//! its relays at power `P_b = gamma * sigma^2 / |h_far|^2` (just enough for
//! the furthest group member to decode), leaking
//! `c_k = 1/2 max_s log2(1 + P_b |h_ks|^2 / sigma^2)` toward the worst
//! eavesdropper. In the transmission half the whole group null-steers,
//! earning `C_k = 1/2 log2(a + |w' h_TR|^2 / sigma^2)` where
//! `a = 1 + P_b |h_ki|^2 / sigma^2` credits what the receiver already heard
//! during the broadcast.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::beamforming::{null_steering_weights, BeamformingProblem, BeamformingSolution};
use crate::channel::{snr, ChannelSet};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::utility::Utility;

/// Secrecy rate of UT `k` transmitting directly to UR `i` over the whole
/// slot: `[log2(1 + P0 |h_ki|^2 / s^2) - max_s log2(1 + P0 |h_ks|^2 / s^2)]+`.
pub fn direct_secrecy_rate(k: usize, i: usize, channels: &ChannelSet, params: &PhysicalParams) -> f64 {
    let own = (1.0 + snr(params.power_budget, channels.ut_ur(k, i).magnitude_sq(), params.noise_power))
        .log2();
    let eaves = (0..channels.n_ue())
        .map(|s| {
            (1.0 + snr(params.power_budget, channels.ut_ue(k, s).magnitude_sq(), params.noise_power))
                .log2()
        })
        .fold(0.0, f64::max);
    (own - eaves).max(0.0)
}

/// Minimum broadcast power so every member of `group` decodes at the SNR
/// threshold: set by the furthest (weakest-channel) ally.
///
/// Errors with [`Error::NoRelays`] for singleton groups, where no broadcast
/// phase exists.
pub fn broadcast_power(
    k: usize,
    group: &BTreeSet<usize>,
    channels: &ChannelSet,
    params: &PhysicalParams,
) -> Result<f64> {
    debug_assert!(group.contains(&k), "group of UT {k} must contain it");
    let weakest = group
        .iter()
        .filter(|&&j| j != k)
        .map(|&j| channels.ut_ut(k, j).magnitude_sq())
        .fold(f64::INFINITY, f64::min);
    if weakest.is_infinite() {
        return Err(Error::NoRelays(k));
    }
    Ok(params.snr_threshold * params.noise_power / weakest)
}

/// Secrecy leaked during the broadcast half-slot: the worst eavesdropper's
/// rate at power `p_b`.
pub fn broadcast_cost(k: usize, p_b: f64, channels: &ChannelSet, params: &PhysicalParams) -> f64 {
    debug_assert!(p_b >= 0.0);
    let worst = (0..channels.n_ue())
        .map(|s| (1.0 + snr(p_b, channels.ut_ue(k, s).magnitude_sq(), params.noise_power)).log2())
        .fold(0.0, f64::max);
    0.5 * worst
}

/// Rate earned in the transmission half-slot toward receiver `i`, including
/// the broadcast-phase side benefit at the receiver.
pub fn cooperative_payoff(
    k: usize,
    i: usize,
    solution: &BeamformingSolution,
    p_b: f64,
    channels: &ChannelSet,
    params: &PhysicalParams,
) -> f64 {
    let broadcast_bonus = 1.0 + snr(p_b, channels.ut_ur(k, i).magnitude_sq(), params.noise_power);
    0.5 * (broadcast_bonus + solution.array_gain / params.noise_power).log2()
}

/// Which branch of the utility law a transmission landed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransmissionMode {
    /// Singleton group: plain direct transmission for the whole slot.
    Direct,
    /// Two-phase decode-and-forward with null-steering beamforming.
    Cooperative,
    /// Group cannot transmit: over budget, too few members to null every
    /// eavesdropper, or no gain survives the nulling.
    Infeasible,
}

/// Full breakdown of UT `k`'s slot under a given group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoalitionTransmission {
    pub source: usize,
    pub group: Vec<usize>,
    pub receiver: usize,
    pub mode: TransmissionMode,
    /// Broadcast-phase power, watts; zero for direct or size-infeasible slots.
    pub broadcast_power: f64,
    /// `C_k` (cooperative) or the direct rate; zero when infeasible.
    pub payoff: f64,
    /// `c_k`; zero for direct or infeasible slots.
    pub cost: f64,
    pub utility: Utility,
}

/// Evaluate the slot of UT `k` transmitting to UR `receiver` with group
/// members `group` (which must contain `k`; ascending index order is used
/// for the weight vector).
///
/// Branch precedence: a singleton group always transmits directly; larger
/// groups must both satisfy the member-count bound `|F_k| >= S + 1` and fit
/// the broadcast power inside the budget, otherwise the slot is infeasible.
/// Degenerate beamforming instances (rank-deficient eavesdropper channels or
/// a receiver channel inside their span) are also infeasible.
pub fn coalition_transmission(
    k: usize,
    group: &BTreeSet<usize>,
    receiver: usize,
    channels: &ChannelSet,
    params: &PhysicalParams,
) -> CoalitionTransmission {
    debug_assert!(group.contains(&k), "group of UT {k} must contain it");
    let members: Vec<usize> = group.iter().copied().collect();
    let n_ue = channels.n_ue();

    let base = |mode, p_b, payoff, cost, utility| CoalitionTransmission {
        source: k,
        group: members.clone(),
        receiver,
        mode,
        broadcast_power: p_b,
        payoff,
        cost,
        utility,
    };

    if members.len() == 1 {
        let rate = direct_secrecy_rate(k, receiver, channels, params);
        return base(TransmissionMode::Direct, 0.0, rate, 0.0, Utility::finite(rate));
    }

    if members.len() < n_ue + 1 {
        return base(TransmissionMode::Infeasible, 0.0, 0.0, 0.0, Utility::NegInfinity);
    }

    let p_b = broadcast_power(k, group, channels, params)
        .expect("non-singleton group has relays");
    if p_b > params.power_budget {
        return base(TransmissionMode::Infeasible, p_b, 0.0, 0.0, Utility::NegInfinity);
    }

    let problem = BeamformingProblem {
        h_tr: members.iter().map(|&j| channels.ut_ur(j, receiver).as_complex()).collect(),
        h_te: (0..n_ue)
            .map(|s| members.iter().map(|&j| channels.ut_ue(j, s).as_complex()).collect())
            .collect(),
        power_budget: params.power_budget,
    };
    let solution = match null_steering_weights(&problem) {
        Ok(solution) => solution,
        Err(Error::ZeroProjection) | Err(Error::SingularProjector) => {
            return base(TransmissionMode::Infeasible, p_b, 0.0, 0.0, Utility::NegInfinity);
        }
        Err(e) => panic!("beamforming failed on validated inputs: {e}"),
    };

    let payoff = cooperative_payoff(k, receiver, &solution, p_b, channels, params);
    let cost = broadcast_cost(k, p_b, channels, params);
    let utility = Utility::finite((payoff - cost).max(0.0));
    base(TransmissionMode::Cooperative, p_b, payoff, cost, utility)
}

/// The utility law alone.
pub fn coalition_utility(
    k: usize,
    group: &BTreeSet<usize>,
    receiver: usize,
    channels: &ChannelSet,
    params: &PhysicalParams,
) -> Utility {
    coalition_transmission(k, group, receiver, channels, params).utility
}
