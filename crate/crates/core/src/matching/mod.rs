//! Stage 1: many-to-one association of UTs to URs.
//!
//! UTs rank URs by the secrecy rate they would get under direct
//! transmission; URs rank UTs by the link rate they would receive. The
//! proposed matching algorithm runs a two-phase protocol: a preliminary
//! round-based interaction in which accepted partners are never evicted and
//! repeat applicants take precedence, followed by swap operations executed
//! until the matching is pairwise stable. Deferred acceptance and a random
//! quota-respecting assignment serve as baselines.

mod baselines;
mod pma;
mod prefs;
mod welfare;

pub use baselines::{da_baseline, random_baseline};
pub use pma::{
    is_pairwise_stable, phase1_preliminary, phase2_swap_stabilize, select_first_time,
    SwapProposal, SwapTarget,
};
pub use prefs::{build_preferences, ur_set_utility, PreferenceTables};
pub use welfare::social_welfare;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A total many-to-one matching: every UT is assigned to exactly one UR and
/// no UR exceeds its quota.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    /// UT index -> UR index.
    assignment: Vec<usize>,
    /// UR index -> its partner set T_i.
    partners: Vec<BTreeSet<usize>>,
    quotas: Vec<usize>,
}

impl Matching {
    pub fn new(assignment: Vec<usize>, quotas: Vec<usize>) -> Result<Self> {
        let n_ur = quotas.len();
        let mut partners = vec![BTreeSet::new(); n_ur];
        for (ut, &ur) in assignment.iter().enumerate() {
            if ur >= n_ur {
                return Err(Error::Internal(format!("UT {ut} assigned to unknown UR {ur}")));
            }
            partners[ur].insert(ut);
        }
        let matching = Self { assignment, partners, quotas };
        matching.check_quotas()?;
        Ok(matching)
    }

    fn check_quotas(&self) -> Result<()> {
        for (ur, set) in self.partners.iter().enumerate() {
            if set.len() > self.quotas[ur] {
                return Err(Error::Internal(format!(
                    "UR {ur} holds {} partners over quota {}",
                    set.len(),
                    self.quotas[ur]
                )));
            }
        }
        Ok(())
    }

    pub fn n_ut(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_ur(&self) -> usize {
        self.quotas.len()
    }

    /// The UR serving UT `k`.
    pub fn ur_of(&self, k: usize) -> usize {
        self.assignment[k]
    }

    pub fn partners(&self, i: usize) -> &BTreeSet<usize> {
        &self.partners[i]
    }

    pub fn quota(&self, i: usize) -> usize {
        self.quotas[i]
    }

    /// Open seats e_i at UR `i`.
    pub fn seats(&self, i: usize) -> usize {
        self.quotas[i] - self.partners[i].len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Exchange the URs of two UTs currently at different URs.
    pub(crate) fn swap_uts(&mut self, s: usize, t: usize) {
        let (h, g) = (self.assignment[s], self.assignment[t]);
        debug_assert_ne!(h, g, "swap requires distinct URs");
        self.partners[h].remove(&s);
        self.partners[g].remove(&t);
        self.partners[h].insert(t);
        self.partners[g].insert(s);
        self.assignment[s] = g;
        self.assignment[t] = h;
        debug_assert!(self.check_quotas().is_ok());
    }

    /// Move UT `s` to an open seat at UR `g`.
    pub(crate) fn move_to_seat(&mut self, s: usize, g: usize) {
        let h = self.assignment[s];
        debug_assert_ne!(h, g);
        debug_assert!(self.seats(g) >= 1, "no open seat at UR {g}");
        self.partners[h].remove(&s);
        self.partners[g].insert(s);
        self.assignment[s] = g;
        debug_assert!(self.check_quotas().is_ok());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates_quotas() {
        let m = Matching::new(vec![0, 0, 1], vec![2, 2]).unwrap();
        assert_eq!(m.ur_of(2), 1);
        assert_eq!(m.partners(0).len(), 2);
        assert_eq!(m.seats(1), 1);
        assert!(Matching::new(vec![0, 0, 0], vec![2, 2]).is_err());
        assert!(Matching::new(vec![0, 5], vec![2, 2]).is_err());
    }

    #[test]
    fn swap_and_seat_moves_keep_consistency() {
        let mut m = Matching::new(vec![0, 1, 1], vec![2, 2]).unwrap();
        m.swap_uts(0, 1);
        assert_eq!(m.ur_of(0), 1);
        assert_eq!(m.ur_of(1), 0);
        m.move_to_seat(2, 0);
        assert_eq!(m.ur_of(2), 0);
        assert_eq!(m.partners(1).len(), 1);
    }
}
