//! Transmission-stage baselines: alone, full-group, and disjoint
//! merge/split coalitions.

use std::collections::BTreeSet;

use crate::channel::ChannelSet;
use crate::coalition::{evaluate_structure, CoalitionStructure, GroupUtility};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;

const DCS_OP_CAP: usize = 100_000;

/// Every UT transmits alone for its whole slot.
pub fn as_baseline(n_ut: usize) -> CoalitionStructure {
    CoalitionStructure::singletons(n_ut)
}

/// Full-group relay sets: each UT enlists every UT inside its effective
/// circle. Groups are defined per UT (not through coalition unions), and a
/// neighbourhood too small to null all eavesdroppers falls back to the
/// singleton.
pub fn fgs_groups(channels: &ChannelSet, params: &PhysicalParams) -> Vec<BTreeSet<usize>> {
    let n = channels.n_ut();
    let s = channels.n_ue();
    let in_radius = |k: usize, j: usize| {
        params.snr_threshold * params.noise_power / channels.ut_ut(k, j).magnitude_sq()
            <= params.power_budget
    };
    (0..n)
        .map(|k| {
            let mut group: BTreeSet<usize> =
                (0..n).filter(|&j| j != k && in_radius(k, j)).collect();
            group.insert(k);
            if group.len() < s + 1 {
                group = [k].into_iter().collect();
            }
            group
        })
        .collect()
}

/// The full-group scheme as a structure (deduplicated group sets), for
/// reporting and serialisation; its utility is defined over [`fgs_groups`].
pub fn fgs_baseline(channels: &ChannelSet, params: &PhysicalParams) -> CoalitionStructure {
    let groups = fgs_groups(channels, params);
    CoalitionStructure::from_coalitions(channels.n_ut(), groups)
        .expect("per-UT groups cover every UT")
}

fn disjoint_total(
    partition: &[BTreeSet<usize>],
    n_ut: usize,
    utilities: &impl GroupUtility,
) -> crate::utility::Utility {
    let structure = CoalitionStructure::from_coalitions(n_ut, partition.to_vec())
        .expect("partitions cover every UT");
    evaluate_structure(&structure, utilities).total
}

/// All index subsets of `{0..count}` with sizes in `[2, limit]`, in
/// lexicographic order.
fn merge_candidates(count: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while let Some((prefix, from)) = stack.pop() {
        for next in (from..count).rev() {
            let mut grown = prefix.clone();
            grown.push(next);
            if grown.len() >= 2 {
                out.push(grown.clone());
            }
            if grown.len() < limit {
                stack.push((grown, next + 1));
            }
        }
    }
    out.sort();
    out
}

/// Disjoint coalition scheme: from singletons, greedily execute any merge of
/// at most `q` coalitions that strictly raises the total utility, then any
/// 2-way split that does, until neither exists. The partition stays disjoint
/// throughout, so each UT's group is exactly its own coalition.
pub fn dcs_baseline(
    n_ut: usize,
    q: usize,
    utilities: &impl GroupUtility,
) -> Result<CoalitionStructure> {
    if !(2..=6).contains(&q) {
        return Err(Error::Config(format!("merge arity q must be in [2, 6], got {q}")));
    }
    let mut partition: Vec<BTreeSet<usize>> =
        (0..n_ut).map(|k| [k].into_iter().collect()).collect();
    let mut total = disjoint_total(&partition, n_ut, utilities);

    for _ in 0..DCS_OP_CAP {
        let mut executed = false;

        // Merge pass: first strictly improving merge of <= q coalitions.
        'merge: for subset in merge_candidates(partition.len(), q) {
            let mut merged: BTreeSet<usize> = BTreeSet::new();
            for &idx in &subset {
                merged.extend(partition[idx].iter().copied());
            }
            let mut candidate: Vec<BTreeSet<usize>> = partition
                .iter()
                .enumerate()
                .filter(|(idx, _)| !subset.contains(idx))
                .map(|(_, set)| set.clone())
                .collect();
            candidate.push(merged);
            let candidate_total = disjoint_total(&candidate, n_ut, utilities);
            if candidate_total > total {
                partition = candidate;
                total = candidate_total;
                executed = true;
                break 'merge;
            }
        }
        if executed {
            continue;
        }

        // Split pass: first strictly improving 2-way split.
        'split: for idx in 0..partition.len() {
            let members: Vec<usize> = partition[idx].iter().copied().collect();
            if members.len() < 2 {
                continue;
            }
            // Fix the first member in part A to halve the symmetric masks.
            for mask in 0..(1u32 << (members.len() - 1)) {
                let mut part_a: BTreeSet<usize> = [members[0]].into_iter().collect();
                let mut part_b: BTreeSet<usize> = BTreeSet::new();
                for (bit, &member) in members[1..].iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        part_a.insert(member);
                    } else {
                        part_b.insert(member);
                    }
                }
                if part_b.is_empty() {
                    continue;
                }
                let mut candidate: Vec<BTreeSet<usize>> = partition
                    .iter()
                    .enumerate()
                    .filter(|(other, _)| *other != idx)
                    .map(|(_, set)| set.clone())
                    .collect();
                candidate.push(part_a);
                candidate.push(part_b);
                let candidate_total = disjoint_total(&candidate, n_ut, utilities);
                if candidate_total > total {
                    partition = candidate;
                    total = candidate_total;
                    executed = true;
                    break 'split;
                }
            }
        }

        if !executed {
            return CoalitionStructure::from_coalitions(n_ut, partition);
        }
    }
    Err(Error::NonConvergence { algorithm: "disjoint merge/split", rounds: DCS_OP_CAP })
}

/// DCS over the merge arities `q = 2..=6`, keeping the best total.
pub fn dcs_best(
    n_ut: usize,
    utilities: &impl GroupUtility,
) -> Result<(CoalitionStructure, crate::utility::Utility)> {
    let mut best: Option<(CoalitionStructure, crate::utility::Utility)> = None;
    for q in 2..=6 {
        let structure = dcs_baseline(n_ut, q, utilities)?;
        let total = evaluate_structure(&structure, utilities).total;
        let replace = match &best {
            None => true,
            Some((_, best_total)) => total > *best_total,
        };
        if replace {
            best = Some((structure, total));
        }
    }
    Ok(best.expect("at least one arity evaluated"))
}
