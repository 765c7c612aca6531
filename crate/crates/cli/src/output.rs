//! Rendering helpers shared by the subcommands: signed outcome sets,
//! strategy labels, history transcripts and their structured mirrors.
//!
//! Structured output is JSON with sorted keys; identical inputs always
//! produce identical bytes.

use serde_json::{json, Value};

use valor_core::scenario::LoadedScenario;
use valor_core::strategy::{JointStrategy, Strategy};
use valor_core::system::History;
use valor_core::values::{OutcomeSet, ScoreVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

pub fn outcome_text(loaded: &LoadedScenario, set: &OutcomeSet) -> String {
    format!("{}", set.display(&loaded.scenario.values))
}

pub fn outcome_json(loaded: &LoadedScenario, set: &OutcomeSet) -> Value {
    Value::Array(
        set.iter()
            .map(|signed| {
                json!(format!(
                    "{}{}",
                    signed.sign.prefix(),
                    loaded.scenario.values.name_of(signed.value)
                ))
            })
            .collect(),
    )
}

pub fn score_json(score: &ScoreVector) -> Value {
    json!(score.0)
}

pub fn strategy_json(loaded: &LoadedScenario, strategy: &Strategy) -> Value {
    json!({
        "agent": loaded.scenario.system.agents[strategy.owner().0],
        "label": loaded.strategy_label(strategy),
        "choices": strategy
            .choices()
            .iter()
            .map(|a| loaded.scenario.system.action_name(*a))
            .collect::<Vec<_>>(),
    })
}

/// `agent=label` pairs in agent order.
pub fn joint_text(loaded: &LoadedScenario, joint: &JointStrategy) -> String {
    let parts: Vec<String> = joint
        .strategies()
        .iter()
        .map(|s| {
            format!(
                "{}={}",
                loaded.scenario.system.agents[s.owner().0],
                loaded.strategy_label(s)
            )
        })
        .collect();
    format!("({})", parts.join(", "))
}

pub fn joint_json(loaded: &LoadedScenario, joint: &JointStrategy) -> Value {
    Value::Array(joint.strategies().iter().map(|s| strategy_json(loaded, s)).collect())
}

pub fn history_text(loaded: &LoadedScenario, history: &History) -> Vec<String> {
    let mut lines = Vec::new();
    for (t, state) in history.states().iter().enumerate() {
        lines.push(format!("  t{t}: {state}"));
        if t < history.horizon() {
            let joint = &history.actions()[t];
            let parts: Vec<String> = loaded
                .scenario
                .system
                .agents
                .iter()
                .enumerate()
                .map(|(i, agent)| {
                    format!(
                        "{agent}={}",
                        loaded
                            .scenario
                            .system
                            .action_name(joint.action(valor_core::system::AgentId(i)))
                    )
                })
                .collect();
            lines.push(format!("     -- {}", parts.join(", ")));
        }
    }
    lines
}

pub fn history_json(loaded: &LoadedScenario, history: &History) -> Value {
    json!({
        "states": history
            .states()
            .iter()
            .map(|s| s.props().collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "actions": history
            .actions()
            .iter()
            .map(|joint| {
                loaded
                    .scenario
                    .system
                    .agents
                    .iter()
                    .enumerate()
                    .map(|(i, agent)| {
                        (
                            agent.clone(),
                            loaded
                                .scenario
                                .system
                                .action_name(joint.action(valor_core::system::AgentId(i)))
                                .to_string(),
                        )
                    })
                    .collect::<std::collections::BTreeMap<_, _>>()
            })
            .collect::<Vec<_>>(),
    })
}

pub fn print_structured(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json renders"));
}
