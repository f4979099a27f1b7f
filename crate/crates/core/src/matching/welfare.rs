//! Social welfare of an association.
//!
//! UT utilities (bits/s/Hz) and UR set utilities (bits/s) are not
//! commensurable, so each family is normalised by its per-instance maximum
//! before summing: welfare = sum_k U_k / max U  +  sum_i U_i^{T_i} / max RP.
//! A family whose maximum is zero contributes zero.

use crate::matching::{Matching, PreferenceTables};

pub fn social_welfare(matching: &Matching, prefs: &PreferenceTables) -> f64 {
    let n = matching.n_ut();
    let m = matching.n_ur();

    let ut_max = (0..n)
        .flat_map(|k| (0..m).map(move |i| (k, i)))
        .map(|(k, i)| prefs.ut_utility(k, i))
        .fold(0.0, f64::max);
    let ur_max = (0..m)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .map(|(i, k)| prefs.reference(i, k))
        .fold(0.0, f64::max);

    let ut_sum: f64 = (0..n).map(|k| prefs.ut_utility(k, matching.ur_of(k))).sum();
    let ur_sum: f64 = (0..m).map(|i| prefs.set_average(i, matching.partners(i))).sum();

    let ut_term = if ut_max > 0.0 { ut_sum / ut_max } else { 0.0 };
    let ur_term = if ur_max > 0.0 { ur_sum / ur_max } else { 0.0 };
    ut_term + ur_term
}
