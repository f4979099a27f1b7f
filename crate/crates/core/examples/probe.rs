use uavsec::coalition::*;
use uavsec::harness::*;
use uavsec::*;

fn main() {
    let config = ExperimentConfig::default();
    let point = config.resolve_points().unwrap().into_iter().next().unwrap();
    let mut max_rounds = 0;
    let mut revisits = 0;
    let mut failures = 0;
    let mut below = 0;
    for trial in 0..300u64 {
        let seed = uavsec::rng::trial_seed(1, trial);
        let scenario = sample_scenario(&point.scenario, seed).unwrap();
        let channels = realize_channels(&scenario, seed).unwrap();
        let mut prefs = matching::build_preferences(&scenario, &channels);
        let pristine = prefs.clone();
        let prelim = matching::phase1_preliminary(&mut prefs, &scenario).unwrap();
        let matched = matching::phase2_swap_stabilize(&prelim, &pristine).unwrap();
        let eval = Evaluator::new(&matched, &channels, &scenario.params);
        let initial = initialize_structure(&channels, &scenario.params).unwrap();
        match ocf_iterate(&initial, &eval, seed) {
            Ok(out) => {
                max_rounds = max_rounds.max(out.rounds);
                revisits += out.revisits;
                let ocfa = evaluate_structure(&out.structure, &eval).total;
                let alone = evaluate_structure(&as_baseline(12), &eval).total;
                if ocfa < alone { below += 1; }
            }
            Err(e) => { failures += 1; println!("trial {trial}: {e}"); }
        }
    }
    println!("trials=300 max_rounds={max_rounds} revisits={revisits} failures={failures} ocfa_below_as={below}");
}
