//! The shipped fixture grids, exercised operation by operation.

mod common;

use std::collections::BTreeSet;

use common::load_fixture;
use valor_core::ltlf::parse_formula;
use valor_core::responsibility::{self, ResponsibilityKind};
use valor_core::scenario::{canonical_toml, load_str, scenario_to_doc, LoadedScenario};
use valor_core::strategy::{self, JointStrategy, Strategy};
use valor_core::system::AgentId;
use valor_core::values::{self, OutcomeSet, Sign, SignedValue};

const ANNA: AgentId = AgentId(0);
const BEN: AgentId = AgentId(1);

fn named(loaded: &LoadedScenario, agent: AgentId, name: &str) -> Strategy {
    loaded.resolve_strategy(agent, name).unwrap_or_else(|e| panic!("{e}"))
}

fn joint(loaded: &LoadedScenario, anna: &str, ben: &str) -> JointStrategy {
    JointStrategy::new(vec![named(loaded, ANNA, anna), named(loaded, BEN, ben)])
}

/// Outcome set by signed value names, `+name` or `-name`.
fn outcome(loaded: &LoadedScenario, literals: &[&str]) -> OutcomeSet {
    OutcomeSet::from_signed(literals.iter().map(|l| {
        let (sign, name) = l.split_at(1);
        let value = loaded
            .scenario
            .values
            .find(name)
            .unwrap_or_else(|| panic!("value {name} in fixture"));
        SignedValue {
            value,
            sign: if sign == "+" { Sign::Satisfied } else { Sign::Violated },
        }
    }))
    .unwrap()
}

#[test]
fn matrix_plays_reproduce_every_cell() {
    for name in [
        "table1a.toml",
        "table1b.toml",
        "table1c.toml",
        "table2.toml",
        "table3.toml",
        "table4.toml",
        "table5.toml",
        "table6.toml",
        "compensation.toml",
    ] {
        let loaded = load_fixture(name);
        let text = std::fs::read_to_string(common::fixture_path(name)).unwrap();
        let doc: toml::Value = toml::from_str(&text).unwrap();
        let rows = doc["row_labels"].as_array().unwrap();
        let cols = doc["col_labels"].as_array().unwrap();
        let cells = doc["cells"].as_array().unwrap();
        for (r, row_label) in rows.iter().enumerate() {
            for (c, col_label) in cols.iter().enumerate() {
                let js = joint(
                    &loaded,
                    row_label.as_str().unwrap(),
                    col_label.as_str().unwrap(),
                );
                let history = loaded.scenario.play(&js).unwrap();
                let sat = values::satset(&history, &loaded.scenario.values);
                let satisfied: BTreeSet<String> = sat
                    .iter()
                    .filter(|s| s.sign == Sign::Satisfied)
                    .map(|s| loaded.scenario.values.name_of(s.value).to_string())
                    .collect();
                let expected: BTreeSet<String> = cells[r].as_array().unwrap()[c]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|v| v.as_str().unwrap().to_string())
                    .collect();
                assert_eq!(satisfied, expected, "{name} cell ({r},{c})");
            }
        }
    }
}

#[test]
fn table3_satsets_and_regret() {
    let loaded = load_fixture("table3.toml");
    let both = loaded.scenario.play(&joint(&loaded, "sigma_A", "sigma_B")).unwrap();
    assert_eq!(
        values::satset(&both, &loaded.scenario.values),
        outcome(&loaded, &["+omega1", "+omega2"])
    );
    let h1 = loaded.scenario.play(&joint(&loaded, "sigma_A", "sigma_B_p")).unwrap();
    let h2 = loaded.scenario.play(&joint(&loaded, "sigma_A_p", "sigma_B_p")).unwrap();
    assert_eq!(
        values::relative_regret(&h1, &h2, &loaded.scenario.values),
        outcome(&loaded, &["-omega1", "-omega2"])
    );
    assert!(values::relative_regret(&h1, &h1, &loaded.scenario.values).is_empty());
}

#[test]
fn table6_plays_and_dominance() {
    let loaded = load_fixture("table6.toml");
    let h = loaded.scenario.play(&joint(&loaded, "sigma_A", "sigma_B_p")).unwrap();
    assert!(h.final_state().has("omega1"));
    assert_eq!(h.final_state().len(), 1);
    let h = loaded.scenario.play(&joint(&loaded, "sigma_A_p", "sigma_B")).unwrap();
    assert!(h.final_state().is_empty());

    let a = named(&loaded, ANNA, "sigma_A");
    let a_p = named(&loaded, ANNA, "sigma_A_p");
    assert!(strategy::weakly_dominates(&loaded.scenario, ANNA, &a_p, &a).unwrap());
    assert!(!strategy::weakly_dominates(&loaded.scenario, ANNA, &a, &a_p).unwrap());
    assert!(strategy::weakly_dominates(&loaded.scenario, ANNA, &a, &a).unwrap());
}

#[test]
fn table5_strict_dominance_and_non_dominated() {
    let loaded = load_fixture("table5.toml");
    let a = named(&loaded, ANNA, "sigma_A");
    let a_p = named(&loaded, ANNA, "sigma_A_p");
    assert!(strategy::weakly_dominates(&loaded.scenario, ANNA, &a_p, &a).unwrap());
    // strict improvement in every column
    for ben in ["sigma_B", "sigma_B_p", "sigma_B_pp"] {
        let worse = loaded.scenario.play(&joint(&loaded, "sigma_A_p", ben)).unwrap();
        let better = loaded.scenario.play(&joint(&loaded, "sigma_A", ben)).unwrap();
        assert!(values::strictly_less(
            &values::satset(&worse, &loaded.scenario.values),
            &values::satset(&better, &loaded.scenario.values),
            &loaded.scenario.values
        ));
    }
    assert!(strategy::non_dominated(&loaded.scenario, ANNA, &a).unwrap());
    assert!(!strategy::non_dominated(&loaded.scenario, ANNA, &a_p).unwrap());
}

#[test]
fn table3_both_rows_non_dominated() {
    let loaded = load_fixture("table3.toml");
    for name in ["sigma_A", "sigma_A_p"] {
        assert!(
            strategy::non_dominated(&loaded.scenario, ANNA, &named(&loaded, ANNA, name)).unwrap()
        );
    }
}

#[test]
fn enumeration_counts_match_labels() {
    let table3 = load_fixture("table3.toml");
    assert_eq!(strategy::enumerate_strategies(&table3.scenario, ANNA).unwrap().len(), 2);
    let table4 = load_fixture("table4.toml");
    assert_eq!(strategy::enumerate_strategies(&table4.scenario, ANNA).unwrap().len(), 3);
    assert_eq!(strategy::enumerate_strategies(&table4.scenario, BEN).unwrap().len(), 3);
    let table5 = load_fixture("table5.toml");
    assert_eq!(strategy::enumerate_joint(&table5.scenario, &[BEN]).unwrap().len(), 3);
    assert_eq!(strategy::enumerate_joint(&table5.scenario, &[]).unwrap().len(), 1);
}

#[test]
fn table3_anticipated_regret_with_witness() {
    let loaded = load_fixture("table3.toml");
    let regret =
        strategy::anticipated_regret(&loaded.scenario, ANNA, &named(&loaded, ANNA, "sigma_A"))
            .unwrap();
    assert_eq!(regret.regret, outcome(&loaded, &["-omega1", "-omega2"]));
    assert_eq!(regret.opponents.get(BEN), Some(&named(&loaded, BEN, "sigma_B_p")));
    assert_eq!(regret.alternative, named(&loaded, ANNA, "sigma_A_p"));
}

#[test]
fn table6_regret_minimisation() {
    let loaded = load_fixture("table6.toml");
    let a = named(&loaded, ANNA, "sigma_A");
    let regret = strategy::anticipated_regret(&loaded.scenario, ANNA, &a).unwrap();
    assert!(regret.regret.is_empty());
    let a_p = named(&loaded, ANNA, "sigma_A_p");
    let regret = strategy::anticipated_regret(&loaded.scenario, ANNA, &a_p).unwrap();
    assert_eq!(regret.regret, outcome(&loaded, &["-omega1"]));
    assert_eq!(strategy::regret_minimising_set(&loaded.scenario, ANNA).unwrap(), vec![a]);
}

#[test]
fn table3_regret_minimising_keeps_both_rows() {
    let loaded = load_fixture("table3.toml");
    assert_eq!(strategy::regret_minimising_set(&loaded.scenario, ANNA).unwrap().len(), 2);
}

#[test]
fn table2_responsibility_via() {
    let loaded = load_fixture("table2.toml");
    let js = joint(&loaded, "sigma_A_p", "sigma_B");
    let via = responsibility::responsible_via(
        &loaded.scenario,
        &js,
        ANNA,
        &named(&loaded, ANNA, "sigma_A"),
    )
    .unwrap();
    // omega3 is unsatisfied either way, so it does not appear
    assert_eq!(via, outcome(&loaded, &["-omega1", "-omega2"]));
}

#[test]
fn table3_responsibility_and_excuses() {
    let loaded = load_fixture("table3.toml");
    let js = joint(&loaded, "sigma_A", "sigma_B_p");
    let accuser = named(&loaded, ANNA, "sigma_A_p");
    let via =
        responsibility::responsible_via(&loaded.scenario, &js, ANNA, &accuser).unwrap();
    assert_eq!(via, outcome(&loaded, &["-omega1", "-omega2"]));

    let weak = responsibility::weak_excuse(&loaded.scenario, &js, ANNA, &accuser)
        .unwrap()
        .expect("column sigma_B vindicates sigma_A");
    assert_eq!(weak.witness.get(BEN), Some(&named(&loaded, BEN, "sigma_B")));

    let strong = responsibility::strong_excuse(&loaded.scenario, &js, ANNA, &accuser).unwrap();
    assert!(strong.is_some(), "symmetric loss and gain admit a strong excuse");

    // self-accusation yields the empty set and no excuse
    let own = named(&loaded, ANNA, "sigma_A");
    assert!(responsibility::weak_excuse(&loaded.scenario, &js, ANNA, &own).unwrap().is_none());
}

#[test]
fn table6_accusations_and_liability() {
    let loaded = load_fixture("table6.toml");
    let js = joint(&loaded, "sigma_A_p", "sigma_B_p");
    let not_omega1 = parse_formula("!F omega1").unwrap();
    let accusers =
        responsibility::accusations(&loaded.scenario, &js, ANNA, &not_omega1).unwrap();
    assert_eq!(accusers, vec![named(&loaded, ANNA, "sigma_A")]);
    let witness = responsibility::liable(&loaded.scenario, &js, ANNA, &not_omega1).unwrap();
    assert_eq!(witness, Some(named(&loaded, ANNA, "sigma_A")));
    // no weak excuse for the accusation
    assert!(responsibility::weak_excuse(
        &loaded.scenario,
        &js,
        ANNA,
        &named(&loaded, ANNA, "sigma_A")
    )
    .unwrap()
    .is_none());
}

#[test]
fn table3_liability_fails_without_dominance() {
    let loaded = load_fixture("table3.toml");
    let js = joint(&loaded, "sigma_A", "sigma_B_p");
    let not_omega1 = parse_formula("!F omega1").unwrap();
    assert_eq!(responsibility::liable(&loaded.scenario, &js, ANNA, &not_omega1).unwrap(), None);
}

#[test]
fn table6_inexcusable_attribution_and_anticipation() {
    let loaded = load_fixture("table6.toml");
    let js = joint(&loaded, "sigma_A_p", "sigma_B_p");
    let set = responsibility::inexcusable_attributions(&loaded.scenario, &js, ANNA).unwrap();
    assert!(set.contains(&outcome(&loaded, &["-omega1"])));

    let worst = responsibility::anticipate(
        &loaded.scenario,
        ANNA,
        &named(&loaded, ANNA, "sigma_A_p"),
        ResponsibilityKind::Inexcusable,
    )
    .unwrap();
    assert_eq!(worst.outcome, outcome(&loaded, &["-omega1"]));
    assert_eq!(worst.opponents.get(BEN), Some(&named(&loaded, BEN, "sigma_B_p")));
    assert_eq!(worst.accusation, named(&loaded, ANNA, "sigma_A"));

    let worst = responsibility::anticipate(
        &loaded.scenario,
        ANNA,
        &named(&loaded, ANNA, "sigma_A"),
        ResponsibilityKind::Inexcusable,
    )
    .unwrap();
    assert!(worst.outcome.is_empty());
}

#[test]
fn table4_recommendation_is_nonempty() {
    let loaded = load_fixture("table4.toml");
    let recommended = responsibility::recommend(&loaded.scenario, ANNA).unwrap();
    assert!(!recommended.is_empty());
    assert_eq!(recommended.len(), 3, "the cycle leaves every row undominated");
}

#[test]
fn compensation_grid_tells_the_two_value_story() {
    let loaded = load_fixture("compensation.toml");
    let sigma = named(&loaded, ANNA, "sigma");
    let comparisons =
        responsibility::rival_comparisons(&loaded.scenario, ANNA, &sigma).unwrap();
    assert_eq!(comparisons.len(), 1);
    let versus = &comparisons[0];
    assert_eq!(versus.rival, named(&loaded, ANNA, "sigma_p"));
    assert_eq!(versus.own_regret, outcome(&loaded, &["-omega1", "+omega2"]));
    assert_eq!(versus.rival_regret, outcome(&loaded, &["-omega1"]));
}

#[test]
fn shopping_centre_loads_and_plays() {
    let loaded = load_fixture("shopping_centre.toml");
    assert_eq!(loaded.scenario.values.level_count(), 1);
    assert_eq!(loaded.scenario.values.value_count(), 5);
    assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);

    let anna = loaded.resolve_strategy(ANNA, "water_then_empty").unwrap();
    let ben = loaded.resolve_strategy(BEN, "always_wander").unwrap();
    let history = loaded.scenario.play(&JointStrategy::new(vec![anna, ben])).unwrap();
    let sat = values::satset(&history, &loaded.scenario.values);
    assert_eq!(
        sat,
        outcome(
            &loaded,
            &[
                "+plants_watered",
                "+bins_emptied",
                "-windows_cleaned",
                "-litter_collected",
                "-floor_swept"
            ]
        )
    );

    // blocking the watering on the first step spoils that task
    let blocker = loaded.resolve_strategy(BEN, "0").unwrap();
    let anna = loaded.resolve_strategy(ANNA, "water_then_empty").unwrap();
    let history = loaded.scenario.play(&JointStrategy::new(vec![anna, blocker])).unwrap();
    let sat = values::satset(&history, &loaded.scenario.values);
    assert!(sat.contains(&SignedValue {
        value: loaded.scenario.values.find("plants_watered").unwrap(),
        sign: Sign::Violated,
    }));
}

#[test]
fn checker_passes_on_the_fixture_grids() {
    for name in ["table3.toml", "table4.toml", "table5.toml", "table6.toml"] {
        let loaded = load_fixture(name);
        let report = valor_core::oracle::check_instance(&loaded.scenario);
        assert!(
            report.passed(),
            "{name}: {:?}",
            report.claims.iter().filter(|c| !c.passed).collect::<Vec<_>>()
        );
    }
}

#[test]
fn table4_triggers_the_strong_excuse_cycle_finding() {
    let loaded = load_fixture("table4.toml");
    let report = valor_core::oracle::check_instance(&loaded.scenario);
    assert!(report
        .findings
        .iter()
        .any(|f| f.contains("strong-excuse preference cycle")));
}

#[test]
fn table5_surfaces_the_vacuous_membership_divergence() {
    // Positive via-sets are admitted as inexcusable by design; on this
    // grid they contain violated values the agent is not liable for, and
    // the checker reports the divergence without failing.
    let loaded = load_fixture("table5.toml");
    let report = valor_core::oracle::check_instance(&loaded.scenario);
    assert!(report.passed());
    assert!(report
        .findings
        .iter()
        .any(|f| f.contains("liability and vacuous-inclusion membership diverge")));
}

#[test]
fn fixtures_round_trip_through_canonical_serialization() {
    for name in ["table3.toml", "table6.toml", "shopping_centre.toml"] {
        let loaded = load_fixture(name);
        let doc = scenario_to_doc(&loaded.scenario, &loaded.name, &loaded.strategies);
        let reloaded = load_str(&canonical_toml(&doc)).unwrap();
        assert_eq!(reloaded.scenario, loaded.scenario, "{name}");
        assert_eq!(reloaded.strategies, loaded.strategies, "{name}");
    }
}
