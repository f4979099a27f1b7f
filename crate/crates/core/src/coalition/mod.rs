//! Stage 2: overlapping coalition structures for relay selection.
//!
//! A coalition structure is a covering family of UT sets; a UT may sit in
//! several coalitions at once. The group `F_k` that actually beamforms in
//! UT `k`'s slot is the union of every coalition containing `k`, so joining
//! a coalition is a mutual-assistance pact with all of its members.
//!
//! Structure dynamics ([`ocf_iterate`]) and baselines only ever need the
//! map `(k, F_k) -> utility`; that map is abstracted as [`GroupUtility`] so
//! the game logic can be exercised against scripted utility tables while
//! production code plugs in the physical evaluator backed by the
//! beamforming kernel.

mod baselines;
mod ocf;

pub use baselines::{as_baseline, dcs_baseline, dcs_best, fgs_baseline, fgs_groups};
pub use ocf::{check_stability, initialize_structure, ocf_iterate, OcfMove, OcfOutcome};

use std::cell::RefCell;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use crate::beamforming::coalition_utility;
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::params::PhysicalParams;
use crate::utility::Utility;

/// An overlapping coalition structure over `n_ut` players.
///
/// Normalised on construction: empty coalitions are dropped, duplicates are
/// deduplicated keeping the earliest, every UT appears somewhere, and the
/// per-UT groups `F_k` are precomputed (recomputed on every mutation, so the
/// cache can never go stale).
#[derive(Clone, Debug)]
pub struct CoalitionStructure {
    coalitions: Vec<BTreeSet<usize>>,
    groups: Vec<BTreeSet<usize>>,
    n_ut: usize,
}

impl CoalitionStructure {
    pub fn from_coalitions(n_ut: usize, raw: Vec<BTreeSet<usize>>) -> Result<Self> {
        let mut coalitions: Vec<BTreeSet<usize>> = Vec::with_capacity(raw.len());
        for set in raw {
            if set.is_empty() {
                continue;
            }
            if let Some(&max) = set.iter().next_back() {
                if max >= n_ut {
                    return Err(Error::Internal(format!(
                        "coalition member {max} out of range for {n_ut} UTs"
                    )));
                }
            }
            if !coalitions.contains(&set) {
                coalitions.push(set);
            }
        }
        let groups = Self::recompute_groups(n_ut, &coalitions)?;
        Ok(Self { coalitions, groups, n_ut })
    }

    /// One singleton per UT.
    pub fn singletons(n_ut: usize) -> Self {
        let coalitions: Vec<BTreeSet<usize>> =
            (0..n_ut).map(|k| [k].into_iter().collect()).collect();
        let groups = coalitions.clone();
        Self { coalitions, groups, n_ut }
    }

    fn recompute_groups(n_ut: usize, coalitions: &[BTreeSet<usize>]) -> Result<Vec<BTreeSet<usize>>> {
        let mut groups = vec![BTreeSet::new(); n_ut];
        for set in coalitions {
            for &k in set {
                groups[k].extend(set.iter().copied());
            }
        }
        for (k, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::Internal(format!("UT {k} is not covered by any coalition")));
            }
        }
        Ok(groups)
    }

    pub fn n_ut(&self) -> usize {
        self.n_ut
    }

    pub fn coalitions(&self) -> &[BTreeSet<usize>] {
        &self.coalitions
    }

    /// Indices of the coalitions containing UT `k`.
    pub fn containing(&self, k: usize) -> Vec<usize> {
        (0..self.coalitions.len()).filter(|&x| self.coalitions[x].contains(&k)).collect()
    }

    /// The group `F_k`: union of every coalition containing `k`.
    pub fn group_of(&self, k: usize) -> &BTreeSet<usize> {
        &self.groups[k]
    }

    pub fn groups(&self) -> &[BTreeSet<usize>] {
        &self.groups
    }

    /// Coalition list as sorted index lists, itself sorted; the canonical
    /// set-list identity used for equality, hashing, and serialisation.
    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let mut lists: Vec<Vec<usize>> =
            self.coalitions.iter().map(|set| set.iter().copied().collect()).collect();
        lists.sort();
        lists
    }

    pub fn canonical_hash(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        self.canonical().hash(&mut hasher);
        hasher.finish()
    }

    /// UT `k` leaves coalition `at`. Leaving the only coalition covering `k`
    /// replaces the membership by the singleton `{k}`. Returns `None` when
    /// the move would not change the structure.
    pub fn quit(&self, k: usize, at: usize) -> Option<Self> {
        debug_assert!(self.coalitions[at].contains(&k));
        let mut raw = self.coalitions.clone();
        raw[at].remove(&k);
        if !raw.iter().any(|set| set.contains(&k)) {
            raw.push([k].into_iter().collect());
        }
        self.replaced(raw)
    }

    /// UT `k` joins coalition `at` (which must not already contain it).
    pub fn join(&self, k: usize, at: usize) -> Option<Self> {
        debug_assert!(!self.coalitions[at].contains(&k));
        let mut raw = self.coalitions.clone();
        raw[at].insert(k);
        self.replaced(raw)
    }

    /// UT `k` moves from coalition `from` to coalition `to` in one step.
    pub fn switch(&self, k: usize, from: usize, to: usize) -> Option<Self> {
        debug_assert!(self.coalitions[from].contains(&k));
        debug_assert!(!self.coalitions[to].contains(&k));
        let mut raw = self.coalitions.clone();
        raw[from].remove(&k);
        raw[to].insert(k);
        self.replaced(raw)
    }

    fn replaced(&self, raw: Vec<BTreeSet<usize>>) -> Option<Self> {
        let next = Self::from_coalitions(self.n_ut, raw)
            .expect("moves preserve coverage and member range");
        if next.canonical() == self.canonical() {
            None
        } else {
            Some(next)
        }
    }
}

impl PartialEq for CoalitionStructure {
    fn eq(&self, other: &Self) -> bool {
        self.n_ut == other.n_ut && self.canonical() == other.canonical()
    }
}

impl Eq for CoalitionStructure {}

/// Per-UT utilities and their sentinel-absorbing sum.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureUtility {
    pub per_ut: Vec<Utility>,
    pub total: Utility,
}

/// The map `(k, F_k) -> v_k` the game dynamics run on.
pub trait GroupUtility {
    fn utility(&self, k: usize, group: &BTreeSet<usize>) -> Utility;
}

impl<F> GroupUtility for F
where
    F: Fn(usize, &BTreeSet<usize>) -> Utility,
{
    fn utility(&self, k: usize, group: &BTreeSet<usize>) -> Utility {
        self(k, group)
    }
}

/// Physical group utility: the three-branch law over the realized channels,
/// memoised per `(k, F_k)` because the dynamics revisit the same groups
/// constantly.
pub struct Evaluator<'a> {
    matching: &'a Matching,
    channels: &'a ChannelSet,
    params: &'a PhysicalParams,
    cache: RefCell<HashMap<(usize, Vec<usize>), Utility>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(matching: &'a Matching, channels: &'a ChannelSet, params: &'a PhysicalParams) -> Self {
        Self { matching, channels, params, cache: RefCell::new(HashMap::new()) }
    }
}

impl GroupUtility for Evaluator<'_> {
    fn utility(&self, k: usize, group: &BTreeSet<usize>) -> Utility {
        let key = (k, group.iter().copied().collect::<Vec<usize>>());
        if let Some(&hit) = self.cache.borrow().get(&key) {
            return hit;
        }
        let value =
            coalition_utility(k, group, self.matching.ur_of(k), self.channels, self.params);
        self.cache.borrow_mut().insert(key, value);
        value
    }
}

/// Evaluate a structure under a utility map: `v_k` for each UT from its
/// group, summed with sentinel absorption.
pub fn evaluate_structure(
    structure: &CoalitionStructure,
    utilities: &impl GroupUtility,
) -> StructureUtility {
    evaluate_groups(structure.groups(), utilities)
}

/// Evaluate explicit per-UT groups (used by the full-group baseline, whose
/// groups are defined directly rather than through a structure).
pub fn evaluate_groups(
    groups: &[BTreeSet<usize>],
    utilities: &impl GroupUtility,
) -> StructureUtility {
    let per_ut: Vec<Utility> =
        groups.iter().enumerate().map(|(k, group)| utilities.utility(k, group)).collect();
    let total = per_ut.iter().copied().sum();
    StructureUtility { per_ut, total }
}
