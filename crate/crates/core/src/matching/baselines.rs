//! Baseline association schemes: classical deferred acceptance and a
//! seeded random quota-respecting assignment.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::matching::{Matching, PreferenceTables};
use crate::rng;

/// Deferred acceptance over fixed preference lists.
///
/// UTs propose down their physical preference order; each UR tentatively
/// keeps its best partners by reference preference up to quota, releasing
/// the rest. Ties break toward the lower index on both sides.
pub fn da_baseline(prefs: &PreferenceTables, scenario: &Scenario) -> Result<Matching> {
    let n = prefs.n_ut();
    let m = prefs.n_ur();
    let quotas = scenario.quotas.clone();
    let seats: usize = quotas.iter().sum();
    if seats < n {
        return Err(Error::Infeasible { seats, uts: n });
    }

    // Fixed proposal order per UT: descending utility, index as tiebreak.
    let lists: Vec<Vec<usize>> = (0..n)
        .map(|k| {
            let mut urs: Vec<usize> = (0..m).collect();
            urs.sort_by(|&a, &b| {
                prefs.ut_utility(k, b).partial_cmp(&prefs.ut_utility(k, a)).unwrap().then(a.cmp(&b))
            });
            urs
        })
        .collect();

    let mut next_choice = vec![0usize; n];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut free: Vec<usize> = (0..n).collect();

    while let Some(k) = free.pop() {
        let Some(&target) = lists[k].get(next_choice[k]) else {
            return Err(Error::Internal(format!("UT {k} exhausted its proposal list")));
        };
        held[target].push(k);
        if held[target].len() > quotas[target] {
            held[target].sort_by(|&a, &b| {
                prefs
                    .reference(target, b)
                    .partial_cmp(&prefs.reference(target, a))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let bumped = held[target].pop().expect("over-quota pool is nonempty");
            next_choice[bumped] += 1;
            free.push(bumped);
        }
    }

    let mut assignment = vec![0usize; n];
    for (i, pool) in held.iter().enumerate() {
        for &k in pool {
            assignment[k] = i;
        }
    }
    Matching::new(assignment, quotas)
}

/// Uniform random quota-respecting assignment: the quota seats are laid out
/// as a list, shuffled, and dealt to the UTs in index order. Pure in
/// `(scenario, seed)`.
pub fn random_baseline(scenario: &Scenario, seed: u64) -> Result<Matching> {
    let n = scenario.n_ut();
    let seats_total: usize = scenario.quotas.iter().sum();
    if seats_total < n {
        return Err(Error::Infeasible { seats: seats_total, uts: n });
    }
    let mut seats: Vec<usize> = scenario
        .quotas
        .iter()
        .enumerate()
        .flat_map(|(i, &q)| std::iter::repeat_n(i, q))
        .collect();
    let mut rng = rng::stream_rng(seed, rng::stream::RANDOM_MATCHING);
    seats.shuffle(&mut rng);
    Matching::new(seats[..n].to_vec(), scenario.quotas.clone())
}
