//! Property tests over randomly generated scenarios: dominance axioms,
//! existence guarantees, the anticipation floor, and outcome-signature
//! closure of the minimising sets.

use proptest::prelude::*;

use valor_core::oracle::{random_scenario, InstanceCaps};
use valor_core::responsibility::{self, ResponsibilityKind};
use valor_core::strategy::{
    anticipated_regret, enumerate_opposing, enumerate_strategies, non_dominated_set,
    regret_minimising_set, weakly_dominates, JointStrategy,
};
use valor_core::system::Scenario;
use valor_core::values::{self, OutcomeSet};

fn scenario_for(seed: u64) -> Scenario {
    random_scenario(seed, &InstanceCaps::default()).expect("default caps always generate")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dominance_is_reflexive_and_transitive(seed in any::<u64>()) {
        let scenario = scenario_for(seed);
        for agent in scenario.agent_ids() {
            let all = enumerate_strategies(&scenario, agent).unwrap();
            let dom: Vec<Vec<bool>> = all
                .iter()
                .map(|s| {
                    all.iter()
                        .map(|c| weakly_dominates(&scenario, agent, s, c).unwrap())
                        .collect()
                })
                .collect();
            for (i, row) in dom.iter().enumerate() {
                prop_assert!(row[i], "reflexivity");
                for j in 0..all.len() {
                    for k in 0..all.len() {
                        if dom[i][j] && dom[j][k] {
                            prop_assert!(dom[i][k], "transitivity");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn a_non_dominated_strategy_always_exists(seed in any::<u64>()) {
        let scenario = scenario_for(seed);
        for agent in scenario.agent_ids() {
            prop_assert!(!non_dominated_set(&scenario, agent).unwrap().is_empty());
            prop_assert!(!regret_minimising_set(&scenario, agent).unwrap().is_empty());
            prop_assert!(!responsibility::recommend(&scenario, agent).unwrap().is_empty());
        }
    }

    #[test]
    fn anticipated_regret_never_beats_the_empty_set(seed in any::<u64>()) {
        let scenario = scenario_for(seed);
        let empty = OutcomeSet::empty();
        for agent in scenario.agent_ids() {
            for strategy in enumerate_strategies(&scenario, agent).unwrap() {
                let regret = anticipated_regret(&scenario, agent, &strategy).unwrap();
                prop_assert!(values::leq(&regret.regret, &empty, &scenario.values));
                for kind in [ResponsibilityKind::Passive, ResponsibilityKind::Inexcusable] {
                    let worst =
                        responsibility::anticipate(&scenario, agent, &strategy, kind).unwrap();
                    prop_assert!(values::leq(&worst.outcome, &empty, &scenario.values));
                }
            }
        }
    }

    #[test]
    fn mutual_dominators_share_their_outcome_rows(seed in any::<u64>()) {
        let scenario = scenario_for(seed);
        for agent in scenario.agent_ids() {
            let all = enumerate_strategies(&scenario, agent).unwrap();
            let opposing = enumerate_opposing(&scenario, agent).unwrap();
            let row = |s: &valor_core::strategy::Strategy| -> Vec<OutcomeSet> {
                opposing
                    .iter()
                    .map(|opp| {
                        let history = scenario.play(&opp.with(s.clone())).unwrap();
                        values::satset(&history, &scenario.values)
                    })
                    .collect()
            };
            for s in &all {
                for c in &all {
                    if weakly_dominates(&scenario, agent, s, c).unwrap()
                        && weakly_dominates(&scenario, agent, c, s).unwrap()
                    {
                        let rs = row(s);
                        let rc = row(c);
                        for (a, b) in rs.iter().zip(&rc) {
                            prop_assert!(values::equivalent(a, b, &scenario.values));
                        }
                    }
                }
            }
        }
    }

    /// Strategies with identical outcome rows are interchangeable for the
    /// minimising sets: each signature class is entirely in or out.
    #[test]
    fn minimising_sets_are_signature_closed(seed in any::<u64>()) {
        let scenario = scenario_for(seed);
        for agent in scenario.agent_ids() {
            let all = enumerate_strategies(&scenario, agent).unwrap();
            let opposing = enumerate_opposing(&scenario, agent).unwrap();
            let signature = |s: &valor_core::strategy::Strategy| -> Vec<OutcomeSet> {
                opposing
                    .iter()
                    .map(|opp| {
                        let joint: JointStrategy = opp.with(s.clone());
                        values::satset(&scenario.play(&joint).unwrap(), &scenario.values)
                    })
                    .collect()
            };
            let minimising = regret_minimising_set(&scenario, agent).unwrap();
            for s in &all {
                for c in &all {
                    if signature(s) == signature(c) {
                        prop_assert_eq!(minimising.contains(s), minimising.contains(c));
                    }
                }
            }
        }
    }
}
