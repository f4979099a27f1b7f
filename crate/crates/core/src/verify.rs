//! Randomized invariant suites behind the CLI `verify` subcommand.
//!
//! Each suite checks an algorithm against an independent route:
//!
//! * beamforming — closed-form weights must saturate the power budget,
//!   null every eavesdropper, and dominate a cloud of random feasible
//!   weight vectors sampled through a normal-equations projector built by
//!   Gauss-Jordan elimination (a different algorithm than the production
//!   Gram-Schmidt path);
//! * matching — the two-phase algorithm's output must pass the pairwise
//!   stability checker, and the checker must agree with exhaustive swap
//!   enumeration on small instances;
//! * coalition — the formation dynamics must terminate at a structure the
//!   stability checker confirms, with a non-decreasing total-utility trace
//!   and no revisited structure.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::beamforming::{null_steering_weights, BeamformingProblem};
use crate::channel::realize_channels;
use crate::coalition::{
    check_stability, evaluate_structure, initialize_structure, ocf_iterate, Evaluator,
};
use crate::error::Result;
use crate::geometry::{sample_scenario, DeploymentRegion, ScenarioConfig};
use crate::matching::{
    build_preferences, is_pairwise_stable, phase1_preliminary, phase2_swap_stabilize, Matching,
    PreferenceTables,
};
use crate::params::PhysicalParams;
use crate::rng;

/// Outcome of one suite: how much ran and everything that failed.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn random_vector(rng: &mut ChaCha12Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// A random instance with `s` in `[0, 4]` and `n` in `[s+1, 8]`.
pub fn random_problem(seed: u64, power: f64) -> BeamformingProblem {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let s = rng.random_range(0..=4usize);
    let n = rng.random_range((s + 1)..=8usize);
    BeamformingProblem {
        h_tr: random_vector(&mut rng, n),
        h_te: (0..s).map(|_| random_vector(&mut rng, n)).collect(),
        power_budget: power,
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Projector onto the orthogonal complement of a column span, built from
/// the normal equations with Gauss-Jordan elimination. Independent of the
/// production Gram-Schmidt route on purpose.
pub struct NormalEquationProjector {
    columns: Vec<Vec<Complex64>>,
    gram_inv: Vec<Vec<Complex64>>,
}

impl NormalEquationProjector {
    pub fn new(columns: &[Vec<Complex64>]) -> Self {
        let s = columns.len();
        let mut gram = vec![vec![Complex64::new(0.0, 0.0); s]; s];
        for a in 0..s {
            for b in 0..s {
                gram[a][b] = dot(&columns[a], &columns[b]);
            }
        }
        let mut aug: Vec<Vec<Complex64>> = (0..s)
            .map(|r| {
                let mut row = gram[r].clone();
                row.extend((0..s).map(|c| Complex64::new(if c == r { 1.0 } else { 0.0 }, 0.0)));
                row
            })
            .collect();
        for col in 0..s {
            let pivot_row = (col..s)
                .max_by(|&a, &b| aug[a][col].norm().partial_cmp(&aug[b][col].norm()).unwrap())
                .unwrap();
            aug.swap(col, pivot_row);
            let pivot = aug[col][col];
            for x in &mut aug[col] {
                *x /= pivot;
            }
            for r in 0..s {
                if r != col {
                    let factor = aug[r][col];
                    for c in 0..2 * s {
                        let delta = factor * aug[col][c];
                        aug[r][c] -= delta;
                    }
                }
            }
        }
        let gram_inv: Vec<Vec<Complex64>> = (0..s).map(|r| aug[r][s..].to_vec()).collect();
        Self { columns: columns.to_vec(), gram_inv }
    }

    /// `(I - U) v`.
    pub fn reject(&self, v: &[Complex64]) -> Vec<Complex64> {
        let s = self.columns.len();
        let hv: Vec<Complex64> = (0..s).map(|a| dot(&self.columns[a], v)).collect();
        let coeffs: Vec<Complex64> =
            (0..s).map(|a| (0..s).map(|b| self.gram_inv[a][b] * hv[b]).sum()).collect();
        let mut out = v.to_vec();
        for (a, coeff) in coeffs.iter().enumerate() {
            for (o, h) in out.iter_mut().zip(&self.columns[a]) {
                *o -= coeff * h;
            }
        }
        out
    }
}

/// Nullspace-sampled weight vector at full power, or `None` for a
/// degenerate draw.
pub fn random_feasible_weights(
    problem: &BeamformingProblem,
    projector: &NormalEquationProjector,
    rng: &mut ChaCha12Rng,
) -> Option<Vec<Complex64>> {
    let raw = random_vector(rng, problem.h_tr.len());
    let mut w = if problem.h_te.is_empty() { raw } else { projector.reject(&raw) };
    let w_norm = norm(&w);
    if w_norm < 1e-9 {
        return None;
    }
    let scale = problem.power_budget.sqrt() / w_norm;
    for x in &mut w {
        *x *= scale;
    }
    Some(w)
}

/// Null constraint, power saturation, and dominance over random feasible
/// weights, on `instances` random problems.
pub fn beamforming_suite(seed: u64, instances: usize, weights_per_instance: usize) -> SuiteReport {
    let power = PhysicalParams::default().power_budget;
    let mut checks = 0;
    let mut violations = Vec::new();
    for index in 0..instances {
        let instance_seed = rng::mix(seed, &[0xbea3, index as u64]);
        let problem = random_problem(instance_seed, power);
        let solution = match null_steering_weights(&problem) {
            Ok(solution) => solution,
            Err(e) => {
                violations.push(format!("instance {index}: solver failed: {e}"));
                continue;
            }
        };

        checks += 1;
        let total_power: f64 = solution.weights.iter().map(|w| w.norm_sqr()).sum();
        if (total_power - power).abs() > 1e-9 * power {
            violations.push(format!(
                "instance {index}: power {total_power} vs budget {power}"
            ));
        }

        checks += 1;
        let col_scale = problem.h_te.iter().map(|c| norm(c)).fold(0.0, f64::max);
        if solution.residual_leakage > 1e-9 * power.sqrt() * col_scale.max(1.0) {
            violations.push(format!(
                "instance {index}: leakage {} above tolerance",
                solution.residual_leakage
            ));
        }

        checks += 1;
        let projector = NormalEquationProjector::new(&problem.h_te);
        let mut rng = ChaCha12Rng::seed_from_u64(rng::mix(instance_seed, &[0xfeed]));
        let bound = solution.array_gain * (1.0 + 1e-9);
        for _ in 0..weights_per_instance {
            let Some(w) = random_feasible_weights(&problem, &projector, &mut rng) else {
                continue;
            };
            let gain = dot(&w, &problem.h_tr).norm_sqr();
            if gain > bound {
                violations.push(format!(
                    "instance {index}: random feasible gain {gain} beats {}",
                    solution.array_gain
                ));
                break;
            }
        }
    }
    SuiteReport { name: "beamforming optimality", instances, checks, violations }
}

fn default_scenario_config(n_ut: usize, n_ur: usize, n_ue: usize, quota: usize) -> ScenarioConfig {
    ScenarioConfig {
        n_ut,
        n_ur,
        n_ue,
        quota,
        region: DeploymentRegion::default(),
        params: PhysicalParams::default(),
    }
}

/// Exhaustive approval scan over every swap pair and seat, written directly
/// against the stability definition. Returns true iff a blocking swap
/// exists.
fn exhaustive_swap_search(matching: &Matching, prefs: &PreferenceTables) -> bool {
    let n = matching.n_ut();
    let m = matching.n_ur();
    let ur_value = |i: usize, set: &std::collections::BTreeSet<usize>| -> f64 {
        if set.is_empty() {
            0.0
        } else {
            set.iter().map(|&k| prefs.reference(i, k)).sum::<f64>() / set.len() as f64
        }
    };
    let approved = |pairs: &[(f64, f64)]| {
        pairs.iter().all(|&(old, new)| new >= old) && pairs.iter().any(|&(old, new)| new > old)
    };
    for s in 0..n {
        let h = matching.ur_of(s);
        for t in 0..n {
            let g = matching.ur_of(t);
            if s == t || g == h {
                continue;
            }
            let mut th = matching.partners(h).clone();
            let mut tg = matching.partners(g).clone();
            th.remove(&s);
            th.insert(t);
            tg.remove(&t);
            tg.insert(s);
            if approved(&[
                (prefs.ut_utility(s, h), prefs.ut_utility(s, g)),
                (prefs.ut_utility(t, g), prefs.ut_utility(t, h)),
                (ur_value(h, matching.partners(h)), ur_value(h, &th)),
                (ur_value(g, matching.partners(g)), ur_value(g, &tg)),
            ]) {
                return true;
            }
        }
        for g in 0..m {
            if g == h || matching.seats(g) == 0 {
                continue;
            }
            let mut th = matching.partners(h).clone();
            th.remove(&s);
            let mut tg = matching.partners(g).clone();
            tg.insert(s);
            if approved(&[
                (prefs.ut_utility(s, h), prefs.ut_utility(s, g)),
                (ur_value(h, matching.partners(h)), ur_value(h, &th)),
                (ur_value(g, matching.partners(g)), ur_value(g, &tg)),
            ]) {
                return true;
            }
        }
    }
    false
}

/// Pairwise stability of the two-phase algorithm's output on full-size
/// instances, plus checker-vs-enumeration agreement on small ones.
pub fn matching_suite(seed: u64, instances: usize, small_instances: usize) -> Result<SuiteReport> {
    let mut checks = 0;
    let mut violations = Vec::new();

    for index in 0..instances {
        let instance_seed = rng::mix(seed, &[0x3a7c, index as u64]);
        let config = default_scenario_config(12, 3, 2, 4);
        let scenario = sample_scenario(&config, instance_seed)?;
        let channels = realize_channels(&scenario, instance_seed)?;
        let prefs = build_preferences(&scenario, &channels);
        let mut working = prefs.clone();
        let preliminary = phase1_preliminary(&mut working, &scenario)?;
        let stable = phase2_swap_stabilize(&preliminary, &prefs)?;
        checks += 1;
        let (ok, witness) = is_pairwise_stable(&stable, &prefs);
        if !ok {
            violations.push(format!("instance {index}: unstable output, witness {witness:?}"));
        }
    }

    for index in 0..small_instances {
        let instance_seed = rng::mix(seed, &[0x5a11, index as u64]);
        let n = 3 + (index % 4); // 3..=6
        let m = 2 + (index % 2); // 2..=3
        let config = default_scenario_config(n, m, 2, n);
        let scenario = sample_scenario(&config, instance_seed)?;
        let channels = realize_channels(&scenario, instance_seed)?;
        let prefs = build_preferences(&scenario, &channels);
        // Random total assignment, then compare checker vs enumeration.
        let mut rng = ChaCha12Rng::seed_from_u64(rng::mix(instance_seed, &[7]));
        let assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
        let matching = Matching::new(assignment, scenario.quotas.clone())?;
        checks += 1;
        let (checker_stable, _) = is_pairwise_stable(&matching, &prefs);
        let enumeration_found_swap = exhaustive_swap_search(&matching, &prefs);
        if checker_stable == enumeration_found_swap {
            violations.push(format!(
                "small instance {index}: checker stable={checker_stable} but enumeration found_swap={enumeration_found_swap}"
            ));
        }
    }

    Ok(SuiteReport {
        name: "matching stability",
        instances: instances + small_instances,
        checks,
        violations,
    })
}

/// Termination, verified terminal stability, monotone utility trace, and
/// zero revisits of the coalition dynamics on default-size instances.
pub fn coalition_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let mut checks = 0;
    let mut violations = Vec::new();
    for index in 0..instances {
        let instance_seed = rng::mix(seed, &[0xc0a1, index as u64]);
        let config = default_scenario_config(12, 3, 2, 4);
        let scenario = sample_scenario(&config, instance_seed)?;
        let channels = realize_channels(&scenario, instance_seed)?;
        let prefs = build_preferences(&scenario, &channels);
        let mut working = prefs.clone();
        let preliminary = phase1_preliminary(&mut working, &scenario)?;
        let matching = phase2_swap_stabilize(&preliminary, &prefs)?;
        let evaluator = Evaluator::new(&matching, &channels, &scenario.params);
        let initial = initialize_structure(&channels, &scenario.params)?;

        checks += 1;
        let outcome = match ocf_iterate(&initial, &evaluator, instance_seed) {
            Ok(outcome) => outcome,
            Err(e) => {
                violations.push(format!("instance {index}: dynamics failed: {e}"));
                continue;
            }
        };

        checks += 1;
        if !check_stability(&outcome.structure, &evaluator).0 {
            violations.push(format!("instance {index}: terminal structure unstable"));
        }
        checks += 1;
        if outcome.trace.windows(2).any(|pair| pair[1] < pair[0]) {
            violations.push(format!("instance {index}: utility trace decreased"));
        }
        checks += 1;
        if outcome.revisits != 0 {
            violations.push(format!("instance {index}: {} revisited structures", outcome.revisits));
        }
        checks += 1;
        if !evaluate_structure(&outcome.structure, &evaluator).total.is_finite() {
            violations.push(format!("instance {index}: terminal utility is -inf"));
        }
    }
    Ok(SuiteReport { name: "coalition stability", instances, checks, violations })
}
