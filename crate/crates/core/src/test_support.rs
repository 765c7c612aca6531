//! Test-only helpers shared across module tests.

use crate::ltlf::parse_formula;
use crate::system::{
    ActionId, AgentId, Scenario, State, TransitionRule, TransitionSystem, DEFAULT_STRATEGY_CAP,
};
use crate::values::ValueBase;

/// One-shot two-agent scenario from a payoff-style grid: cell `(r, c)`
/// lists the 1-based value indices satisfied when the row agent plays its
/// `r`-th action and the column agent its `c`-th. Values are `F p<i>` in a
/// single level.
pub(crate) fn matrix_scenario(value_count: usize, cells: &[&[&[usize]]]) -> Scenario {
    let rows = cells.len();
    let cols = cells[0].len();
    assert!(cells.iter().all(|r| r.len() == cols), "grid must be rectangular");
    let action_count = rows.max(cols);

    let propositions: Vec<String> = (1..=value_count).map(|i| format!("p{i}")).collect();
    let actions: Vec<String> = (0..action_count).map(|i| format!("m{i}")).collect();
    let mut rules = Vec::new();
    for (r, row) in cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            rules.push(TransitionRule {
                from: None,
                when: vec![Some(ActionId(r)), Some(ActionId(c))],
                to: State::from_props(cell.iter().map(|i| format!("p{i}"))),
            });
        }
    }
    let system = TransitionSystem {
        propositions,
        agents: vec!["anna".into(), "ben".into()],
        actions,
        availability: vec![
            (0..rows).map(ActionId).collect(),
            (0..cols).map(ActionId).collect(),
        ],
        rules,
    };
    let values = ValueBase::new(vec![(1..=value_count)
        .map(|i| (format!("w{i}"), parse_formula(&format!("F p{i}")).unwrap()))
        .collect()])
    .unwrap();
    Scenario::new(system, State::empty(), 1, values, DEFAULT_STRATEGY_CAP).unwrap()
}

pub(crate) const ANNA: AgentId = AgentId(0);
pub(crate) const BEN: AgentId = AgentId(1);

/// The two-by-two grid where each agent can either secure both values or
/// spoil them, depending on the other's move.
pub(crate) fn coordination_table() -> Scenario {
    matrix_scenario(2, &[&[&[1, 2], &[]], &[&[], &[1, 2]]])
}

/// Three-by-three grid with the cyclic best-response structure.
pub(crate) fn cyclic_table() -> Scenario {
    matrix_scenario(
        3,
        &[
            &[&[1, 2, 3], &[1, 2], &[]],
            &[&[], &[1, 2, 3], &[1, 2]],
            &[&[1, 2], &[], &[1, 2, 3]],
        ],
    )
}

/// Three-by-three grid where the first row strictly dominates the second.
pub(crate) fn garden_table() -> Scenario {
    matrix_scenario(
        5,
        &[
            &[&[1, 2, 3, 4], &[1, 2, 3, 5], &[1, 2, 4, 5]],
            &[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3]],
            &[&[5], &[4], &[3]],
        ],
    )
}

/// Two-by-two grid with one weakly dominant row.
pub(crate) fn dominance_table() -> Scenario {
    matrix_scenario(1, &[&[&[], &[1]], &[&[], &[]]])
}
