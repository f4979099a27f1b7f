//! The two-phase matching algorithm and the pairwise-stability checker.
//!
//! Phase I is round based: every unmatched UT proposes to its currently
//! best-rated UR; each UR first seats repeat applicants (best reference
//! preference first), then filters first-time applicants through the
//! selection rule; each rejection costs the proposer a fixed penalty on
//! that UR. Accepted partners are never evicted, so with enough total seats
//! every UT eventually lands.
//!
//! Phase II repeatedly executes approved swaps. A swap of two UTs (one of
//! which may be an open seat) is approved when none of the four touched
//! agents loses and at least one strictly gains; the result is a pairwise
//! stable matching.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::matching::{Matching, PreferenceTables};

/// Hard caps; both bounds are loose multiples of the theoretical limits and
/// exist only to turn a logic bug into a diagnostic instead of a hang.
const PHASE1_ROUND_CAP: usize = 1_000_000;
const PHASE2_SWAP_CAP: usize = 1_000_000;

/// Counterpart of a swap: another UT, or an open seat at the target UR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapTarget {
    Ut(usize),
    Seat,
}

/// A concrete swap, reported as a witness of instability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapProposal {
    pub ut_s: usize,
    pub target: SwapTarget,
    /// Current UR of `ut_s`.
    pub ur_h: usize,
    /// UR on the other side of the swap.
    pub ur_g: usize,
}

/// Phase I: produce a preliminary matching in which every UT is assigned.
///
/// Mutates `prefs`: rejection counts and penalties accumulate there. Errors
/// with [`Error::Infeasible`] when the quotas cannot seat every UT.
pub fn phase1_preliminary(prefs: &mut PreferenceTables, scenario: &Scenario) -> Result<Matching> {
    let n = prefs.n_ut();
    let m = prefs.n_ur();
    let quotas = scenario.quotas.clone();
    let seats_total: usize = quotas.iter().sum();
    if seats_total < n {
        return Err(Error::Infeasible { seats: seats_total, uts: n });
    }

    let mut partners: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    let mut unmatched: BTreeSet<usize> = (0..n).collect();

    for _round in 0..PHASE1_ROUND_CAP {
        if unmatched.is_empty() {
            break;
        }

        // Simultaneous proposals: each unmatched UT targets its current
        // best-rated UR, ties broken toward the lowest index.
        let mut applicants: Vec<Vec<usize>> = vec![Vec::new(); m];
        for &k in &unmatched {
            let target = (0..m)
                .max_by(|&a, &b| {
                    prefs
                        .penalized(k, a)
                        .partial_cmp(&prefs.penalized(k, b))
                        .unwrap()
                        .then(b.cmp(&a))
                })
                .expect("at least one UR");
            applicants[target].push(k);
        }

        let mut rejected: Vec<(usize, usize)> = Vec::new();
        for i in 0..m {
            if applicants[i].is_empty() {
                continue;
            }
            let mut seats = quotas[i] - partners[i].len();
            if seats == 0 {
                rejected.extend(applicants[i].iter().map(|&k| (k, i)));
                continue;
            }

            let (mut repeats, first_timers): (Vec<usize>, Vec<usize>) =
                applicants[i].iter().partition(|&&k| prefs.rejections(k, i) >= 1);

            // Repeat applicants fill seats first, best reference value first.
            repeats.sort_by(|&a, &b| {
                prefs.reference(i, b).partial_cmp(&prefs.reference(i, a)).unwrap().then(a.cmp(&b))
            });
            if repeats.len() >= seats {
                for &k in &repeats[..seats] {
                    partners[i].insert(k);
                    unmatched.remove(&k);
                }
                rejected.extend(repeats[seats..].iter().map(|&k| (k, i)));
                rejected.extend(first_timers.iter().map(|&k| (k, i)));
                continue;
            }
            for &k in &repeats {
                partners[i].insert(k);
                unmatched.remove(&k);
                seats -= 1;
            }

            let admitted = select_first_time(i, &first_timers, &partners[i], prefs, seats);
            for &k in &admitted {
                partners[i].insert(k);
                unmatched.remove(&k);
            }
            rejected.extend(first_timers.iter().filter(|k| !admitted.contains(k)).map(|&k| (k, i)));
            debug_assert!(partners[i].len() <= quotas[i]);
        }

        for (k, i) in rejected {
            prefs.record_rejection(k, i);
        }
    }

    if !unmatched.is_empty() {
        return Err(Error::NonConvergence {
            algorithm: "preliminary matching",
            rounds: PHASE1_ROUND_CAP,
        });
    }

    let mut assignment = vec![0usize; n];
    for (i, set) in partners.iter().enumerate() {
        for &k in set {
            assignment[k] = i;
        }
    }
    Matching::new(assignment, quotas)
}

/// Selection rule for first-time applicants at UR `i`.
///
/// Applicants are considered in descending reference-preference order; each
/// is admitted while its reference value is at least the current set
/// utility (recomputed after every admission) and a seat remains, and the
/// scan stops at the first failure.
pub fn select_first_time(
    i: usize,
    applicants: &[usize],
    current: &BTreeSet<usize>,
    prefs: &PreferenceTables,
    seats: usize,
) -> Vec<usize> {
    let mut order: Vec<usize> = applicants.to_vec();
    order.sort_by(|&a, &b| {
        prefs.reference(i, b).partial_cmp(&prefs.reference(i, a)).unwrap().then(a.cmp(&b))
    });

    let mut admitted = Vec::new();
    let mut working = current.clone();
    for &k in order.iter().take(seats) {
        if prefs.reference(i, k) >= prefs.set_average(i, &working) {
            admitted.push(k);
            working.insert(k);
        } else {
            break;
        }
    }
    admitted
}

/// Utilities of the four agents touched by a swap, before and after.
/// `None` means the proposal is structurally invalid (same UR, no seat).
fn swap_deltas(
    matching: &Matching,
    prefs: &PreferenceTables,
    s: usize,
    target: SwapTarget,
    g: usize,
) -> Option<Vec<(f64, f64)>> {
    let h = matching.ur_of(s);
    if h == g {
        return None;
    }
    let t_h = matching.partners(h);
    let t_g = matching.partners(g);

    match target {
        SwapTarget::Ut(t) => {
            if matching.ur_of(t) != g {
                return None;
            }
            let mut new_h = t_h.clone();
            new_h.remove(&s);
            new_h.insert(t);
            let mut new_g = t_g.clone();
            new_g.remove(&t);
            new_g.insert(s);
            Some(vec![
                (prefs.ut_utility(s, h), prefs.ut_utility(s, g)),
                (prefs.ut_utility(t, g), prefs.ut_utility(t, h)),
                (prefs.set_average(h, t_h), prefs.set_average(h, &new_h)),
                (prefs.set_average(g, t_g), prefs.set_average(g, &new_g)),
            ])
        }
        SwapTarget::Seat => {
            if matching.seats(g) == 0 {
                return None;
            }
            let mut new_h = t_h.clone();
            new_h.remove(&s);
            let mut new_g = t_g.clone();
            new_g.insert(s);
            // The seat itself is an agent of constant zero utility; it never
            // vetoes and never supplies the strict improvement.
            Some(vec![
                (prefs.ut_utility(s, h), prefs.ut_utility(s, g)),
                (prefs.set_average(h, t_h), prefs.set_average(h, &new_h)),
                (prefs.set_average(g, t_g), prefs.set_average(g, &new_g)),
            ])
        }
    }
}

fn approved(deltas: &[(f64, f64)]) -> bool {
    deltas.iter().all(|&(old, new)| new >= old) && deltas.iter().any(|&(old, new)| new > old)
}

/// First approved swap in deterministic scan order: `s` ascending, then real
/// partners `t > s`, then seats by UR index.
fn find_approved_swap(matching: &Matching, prefs: &PreferenceTables) -> Option<SwapProposal> {
    let n = matching.n_ut();
    let m = matching.n_ur();
    for s in 0..n {
        let h = matching.ur_of(s);
        for t in (s + 1)..n {
            let g = matching.ur_of(t);
            if g == h {
                continue;
            }
            if let Some(deltas) = swap_deltas(matching, prefs, s, SwapTarget::Ut(t), g) {
                if approved(&deltas) {
                    return Some(SwapProposal { ut_s: s, target: SwapTarget::Ut(t), ur_h: h, ur_g: g });
                }
            }
        }
        for g in 0..m {
            if g == h || matching.seats(g) == 0 {
                continue;
            }
            if let Some(deltas) = swap_deltas(matching, prefs, s, SwapTarget::Seat, g) {
                if approved(&deltas) {
                    return Some(SwapProposal { ut_s: s, target: SwapTarget::Seat, ur_h: h, ur_g: g });
                }
            }
        }
    }
    None
}

/// Phase II: execute approved swaps until none remains.
///
/// Uses the pristine preference values; Phase I penalties are bookkeeping,
/// not physical utility. Every executed swap strictly raises at least one
/// agent's utility and lowers none, so the loop terminates.
pub fn phase2_swap_stabilize(
    matching: &Matching,
    prefs: &PreferenceTables,
) -> Result<Matching> {
    let mut current = matching.clone();
    for _ in 0..PHASE2_SWAP_CAP {
        match find_approved_swap(&current, prefs) {
            Some(swap) => match swap.target {
                SwapTarget::Ut(t) => current.swap_uts(swap.ut_s, t),
                SwapTarget::Seat => current.move_to_seat(swap.ut_s, swap.ur_g),
            },
            None => return Ok(current),
        }
    }
    Err(Error::NonConvergence { algorithm: "swap stabilisation", rounds: PHASE2_SWAP_CAP })
}

/// Pairwise stability test. Returns the first approved swap as a witness
/// when the matching is unstable.
pub fn is_pairwise_stable(
    matching: &Matching,
    prefs: &PreferenceTables,
) -> (bool, Option<SwapProposal>) {
    match find_approved_swap(matching, prefs) {
        Some(swap) => (false, Some(swap)),
        None => (true, None),
    }
}
