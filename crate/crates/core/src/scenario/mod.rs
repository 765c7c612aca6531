//! Scenario files, the matrix-to-scenario compiler and canonical
//! serialization.
//!
//! Two document kinds share one loader: full scenario documents and
//! one-shot matrix documents (detected by the presence of `cells`). A
//! matrix compiles to a horizon-1 scenario with one proposition per value,
//! `F <name>` values, an action per strategy label, and named strategies
//! bijective with the labels. Unequal row and column counts are handled by
//! per-agent action availability, never by padding.

mod docs;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

pub use docs::{
    ChoiceDoc, FromPattern, LevelDoc, MatrixDoc, ScenarioDoc, StrategyDoc, TransitionDoc, ValueDoc,
};

use crate::ltlf::{parse_formula, ParseError};
use crate::strategy::Strategy;
use crate::system::{
    ActionId, AgentId, ModelError, Scenario, State, TransitionRule, TransitionSystem,
    DEFAULT_STRATEGY_CAP,
};
use crate::values::{check_value_base, ConsistencyWarning, ValueBase, ValueError};

/// A strategy listed by name in a scenario document or synthesized from a
/// matrix label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedStrategy {
    pub name: String,
    pub strategy: Strategy,
}

/// A validated scenario together with its document, named strategies and
/// the value-base consistency warnings gathered at load time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedScenario {
    pub name: String,
    pub scenario: Scenario,
    pub strategies: Vec<NamedStrategy>,
    pub warnings: Vec<ConsistencyWarning>,
    pub doc: ScenarioDoc,
}

impl LoadedScenario {
    /// Looks up a strategy by name (restricted to `agent`) or by index
    /// into the agent's enumeration.
    pub fn resolve_strategy(&self, agent: AgentId, selector: &str) -> Result<Strategy, LoadError> {
        if let Some(named) = self
            .strategies
            .iter()
            .find(|n| n.name == selector && n.strategy.owner() == agent)
        {
            return Ok(named.strategy.clone());
        }
        if let Ok(index) = selector.parse::<usize>() {
            let all = crate::strategy::enumerate_strategies(&self.scenario, agent)?;
            if let Some(strategy) = all.get(index) {
                return Ok(strategy.clone());
            }
        }
        Err(LoadError::UnknownStrategy {
            agent: self.scenario.system.agents[agent.0].clone(),
            selector: selector.to_string(),
        })
    }

    /// The display name of a strategy: its document name if any, else its
    /// enumeration index.
    pub fn strategy_label(&self, strategy: &Strategy) -> String {
        if let Some(named) = self.strategies.iter().find(|n| &n.strategy == strategy) {
            return named.name.clone();
        }
        match crate::strategy::enumerate_strategies(&self.scenario, strategy.owner()) {
            Ok(all) => all
                .iter()
                .position(|s| s == strategy)
                .map(|i| format!("#{i}"))
                .unwrap_or_else(|| "#?".to_string()),
            Err(_) => "#?".to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("document does not parse: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("duplicate {kind} '{name}'")]
    Duplicate { kind: &'static str, name: String },
    #[error("unknown {kind} '{name}'")]
    UnknownReference { kind: &'static str, name: String },
    #[error("value '{name}': {source}")]
    Formula {
        name: String,
        #[source]
        source: ParseError,
    },
    #[error("transition 'from' must be \"*\" or a list of propositions, got {got:?}")]
    BadFromPattern { got: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("strategy '{name}': {detail}")]
    BadStrategy { name: String, detail: String },
    #[error("matrix must have at least one row, one column and one value")]
    EmptyMatrix,
    #[error("matrix cells must form a {rows} x {cols} grid")]
    RaggedMatrix { rows: usize, cols: usize },
    #[error("no strategy '{selector}' for agent '{agent}'")]
    UnknownStrategy { agent: String, selector: String },
}

/// Loads a scenario or matrix document from a file.
pub fn load_path(path: impl AsRef<Path>) -> Result<LoadedScenario, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_str(&text)
}

/// Loads a scenario or matrix document from TOML text. Matrix documents
/// are recognised by their `cells` field.
pub fn load_str(text: &str) -> Result<LoadedScenario, LoadError> {
    let value: toml::Value = toml::from_str(text)?;
    if value.get("cells").is_some() {
        let doc: MatrixDoc = toml::from_str(text)?;
        compile_matrix(&doc)
    } else {
        let doc: ScenarioDoc = toml::from_str(text)?;
        load_doc(&doc)
    }
}

fn unique<'a>(kind: &'static str, names: impl Iterator<Item = &'a str>) -> Result<(), LoadError> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(LoadError::Duplicate { kind, name: name.to_string() });
        }
    }
    Ok(())
}

/// Validates a scenario document and builds the semantic scenario, its
/// named strategies and the consistency warnings.
pub fn load_doc(doc: &ScenarioDoc) -> Result<LoadedScenario, LoadError> {
    unique("agent", doc.agents.iter().map(String::as_str))?;
    unique("proposition", doc.propositions.iter().map(String::as_str))?;
    unique("action", doc.actions.iter().map(String::as_str))?;

    let action_id = |name: &str| -> Result<ActionId, LoadError> {
        doc.actions
            .iter()
            .position(|a| a == name)
            .map(ActionId)
            .ok_or_else(|| LoadError::UnknownReference { kind: "action", name: name.to_string() })
    };
    let agent_id = |name: &str| -> Result<AgentId, LoadError> {
        doc.agents
            .iter()
            .position(|a| a == name)
            .map(AgentId)
            .ok_or_else(|| LoadError::UnknownReference { kind: "agent", name: name.to_string() })
    };
    let prop_ok = |name: &str| -> Result<(), LoadError> {
        if doc.propositions.iter().any(|p| p == name) {
            Ok(())
        } else {
            Err(LoadError::UnknownReference { kind: "proposition", name: name.to_string() })
        }
    };

    for agent in doc.availability.keys() {
        agent_id(agent)?;
    }
    let mut availability = Vec::with_capacity(doc.agents.len());
    for agent in &doc.agents {
        match doc.availability.get(agent) {
            Some(actions) => {
                let ids = actions
                    .iter()
                    .map(|a| action_id(a))
                    .collect::<Result<Vec<_>, _>>()?;
                availability.push(ids);
            }
            None => availability.push((0..doc.actions.len()).map(ActionId).collect()),
        }
    }

    let mut rules = Vec::with_capacity(doc.transitions.len());
    for transition in &doc.transitions {
        let from = match &transition.from {
            FromPattern::Any(s) if s == "*" => None,
            FromPattern::Any(s) => {
                return Err(LoadError::BadFromPattern { got: s.clone() });
            }
            FromPattern::Props(props) => {
                for p in props {
                    prop_ok(p)?;
                }
                Some(State::from_props(props.iter().cloned()))
            }
        };
        let mut when = vec![None; doc.agents.len()];
        for (agent, action) in &transition.when {
            let a = agent_id(agent)?;
            if action == "*" {
                continue;
            }
            when[a.0] = Some(action_id(action)?);
        }
        for p in &transition.to {
            prop_ok(p)?;
        }
        rules.push(TransitionRule {
            from,
            when,
            to: State::from_props(transition.to.iter().cloned()),
        });
    }

    let mut levels = Vec::with_capacity(doc.levels.len());
    for level in &doc.levels {
        let mut parsed = Vec::with_capacity(level.values.len());
        for value in &level.values {
            let formula = parse_formula(&value.formula).map_err(|source| LoadError::Formula {
                name: value.name.clone(),
                source,
            })?;
            parsed.push((value.name.clone(), formula));
        }
        levels.push(parsed);
    }
    let values = ValueBase::new(levels)?;

    for p in &doc.start {
        prop_ok(p)?;
    }
    let system = TransitionSystem {
        propositions: doc.propositions.clone(),
        agents: doc.agents.clone(),
        actions: doc.actions.clone(),
        availability,
        rules,
    };
    let scenario = Scenario::new(
        system,
        State::from_props(doc.start.iter().cloned()),
        doc.horizon,
        values,
        doc.strategy_cap.unwrap_or(DEFAULT_STRATEGY_CAP),
    )?;

    let mut strategies = Vec::with_capacity(doc.strategies.len());
    unique("strategy", doc.strategies.iter().map(|s| s.name.as_str()))?;
    for strategy_doc in &doc.strategies {
        let agent = agent_id(&strategy_doc.agent)?;
        strategies.push(NamedStrategy {
            name: strategy_doc.name.clone(),
            strategy: resolve_strategy_doc(&scenario, agent, strategy_doc)?,
        });
    }

    let warnings = check_value_base(&scenario).warnings;
    Ok(LoadedScenario {
        name: doc.name.clone(),
        scenario,
        strategies,
        warnings,
        doc: doc.clone(),
    })
}

fn resolve_strategy_doc(
    scenario: &Scenario,
    agent: AgentId,
    doc: &StrategyDoc,
) -> Result<Strategy, LoadError> {
    let space = scenario.decision_space(agent)?;
    let mut choices: Vec<Option<ActionId>> = vec![None; space.node_count() as usize];
    for choice in &doc.choices {
        let mut path = Vec::with_capacity(choice.at.len());
        for step in &choice.at {
            for agent_name in step.keys() {
                if !scenario.system.agents.iter().any(|a| a == agent_name) {
                    return Err(LoadError::UnknownReference {
                        kind: "agent",
                        name: agent_name.clone(),
                    });
                }
            }
            let profile = space
                .profile_index_from(|other| {
                    let name = &scenario.system.agents[other.0];
                    step.get(name).and_then(|a| scenario.system.action_id(a))
                })
                .ok_or_else(|| LoadError::BadStrategy {
                    name: doc.name.clone(),
                    detail: format!(
                        "step {step:?} must give one available action for every other agent"
                    ),
                })?;
            path.push(profile);
        }
        let node = space.node_at(&path).ok_or_else(|| LoadError::BadStrategy {
            name: doc.name.clone(),
            detail: format!("path of length {} exceeds the horizon", path.len()),
        })?;
        let action = scenario.system.action_id(&choice.action).ok_or_else(|| {
            LoadError::UnknownReference { kind: "action", name: choice.action.clone() }
        })?;
        if !space.own_actions().contains(&action) {
            return Err(LoadError::BadStrategy {
                name: doc.name.clone(),
                detail: format!("action '{}' is not available to the agent", choice.action),
            });
        }
        let slot = &mut choices[node as usize];
        if slot.is_some() {
            return Err(LoadError::BadStrategy {
                name: doc.name.clone(),
                detail: "two choices address the same decision node".into(),
            });
        }
        *slot = Some(action);
    }
    let choices: Vec<ActionId> = choices
        .into_iter()
        .enumerate()
        .map(|(node, c)| {
            c.ok_or_else(|| LoadError::BadStrategy {
                name: doc.name.clone(),
                detail: format!("no choice for decision node {node}"),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(Strategy::new(agent, choices))
}

/// Compiles a one-shot matrix into a scenario with named strategies.
pub fn compile_matrix(doc: &MatrixDoc) -> Result<LoadedScenario, LoadError> {
    let rows = doc.row_labels.len();
    let cols = doc.col_labels.len();
    let value_names: Vec<String> = doc.levels.iter().flatten().cloned().collect();
    if rows == 0 || cols == 0 || value_names.is_empty() {
        return Err(LoadError::EmptyMatrix);
    }
    if doc.row_agent == doc.col_agent {
        return Err(LoadError::Duplicate { kind: "agent", name: doc.row_agent.clone() });
    }
    unique("value", value_names.iter().map(String::as_str))?;
    unique("row label", doc.row_labels.iter().map(String::as_str))?;
    unique("column label", doc.col_labels.iter().map(String::as_str))?;
    if doc.cells.len() != rows || doc.cells.iter().any(|r| r.len() != cols) {
        return Err(LoadError::RaggedMatrix { rows, cols });
    }

    let action_count = rows.max(cols);
    let actions: Vec<String> = (0..action_count).map(|i| format!("m{i}")).collect();
    let mut rules = Vec::with_capacity(rows * cols);
    for (r, row) in doc.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            for value in cell {
                if !value_names.iter().any(|v| v == value) {
                    return Err(LoadError::UnknownReference {
                        kind: "value",
                        name: value.clone(),
                    });
                }
            }
            rules.push(TransitionRule {
                from: None,
                when: vec![Some(ActionId(r)), Some(ActionId(c))],
                to: State::from_props(cell.iter().cloned()),
            });
        }
    }
    let system = TransitionSystem {
        propositions: value_names.clone(),
        agents: vec![doc.row_agent.clone(), doc.col_agent.clone()],
        actions,
        availability: vec![(0..rows).map(ActionId).collect(), (0..cols).map(ActionId).collect()],
        rules,
    };
    let values = ValueBase::new(
        doc.levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|name| {
                        let formula = parse_formula(&format!("F {name}"))
                            .expect("value names are identifiers");
                        (name.clone(), formula)
                    })
                    .collect()
            })
            .collect(),
    )?;
    let scenario = Scenario::new(system, State::empty(), 1, values, DEFAULT_STRATEGY_CAP)?;

    let mut strategies = Vec::with_capacity(rows + cols);
    for (r, label) in doc.row_labels.iter().enumerate() {
        strategies.push(NamedStrategy {
            name: label.clone(),
            strategy: Strategy::new(AgentId(0), vec![ActionId(r)]),
        });
    }
    for (c, label) in doc.col_labels.iter().enumerate() {
        strategies.push(NamedStrategy {
            name: label.clone(),
            strategy: Strategy::new(AgentId(1), vec![ActionId(c)]),
        });
    }
    unique("strategy", strategies.iter().map(|s| s.name.as_str()))?;

    let warnings = check_value_base(&scenario).warnings;
    let doc = scenario_to_doc(&scenario, &doc.name, &strategies);
    Ok(LoadedScenario {
        name: doc.name.clone(),
        scenario,
        strategies,
        warnings,
        doc,
    })
}

/// Rebuilds a document from a semantic scenario, e.g. to serialize a
/// randomly generated instance or to re-emit a compiled matrix.
pub fn scenario_to_doc(
    scenario: &Scenario,
    name: &str,
    strategies: &[NamedStrategy],
) -> ScenarioDoc {
    let system = &scenario.system;
    let availability: BTreeMap<String, Vec<String>> = system
        .agents
        .iter()
        .zip(&system.availability)
        .map(|(agent, avail)| {
            (
                agent.clone(),
                avail.iter().map(|a| system.action_name(*a).to_string()).collect(),
            )
        })
        .collect();
    let transitions = system
        .rules
        .iter()
        .map(|rule| TransitionDoc {
            from: match &rule.from {
                None => FromPattern::Any("*".into()),
                Some(state) => FromPattern::Props(state.props().map(str::to_string).collect()),
            },
            to: rule.to.props().map(str::to_string).collect(),
            when: rule
                .when
                .iter()
                .enumerate()
                .filter_map(|(agent, action)| {
                    action.map(|a| {
                        (system.agents[agent].clone(), system.action_name(a).to_string())
                    })
                })
                .collect(),
        })
        .collect();
    let levels = (0..scenario.values.level_count())
        .map(|n| LevelDoc {
            values: scenario
                .values
                .level(n)
                .iter()
                .map(|v| ValueDoc { name: v.name.clone(), formula: v.formula.to_string() })
                .collect(),
        })
        .collect();
    let strategies = strategies
        .iter()
        .map(|named| {
            let agent = named.strategy.owner();
            let space = scenario.decision_space(agent).expect("strategy space exists");
            let choices = named
                .strategy
                .choices()
                .iter()
                .enumerate()
                .map(|(node, action)| ChoiceDoc {
                    action: system.action_name(*action).to_string(),
                    at: space
                        .path_of(node as u64)
                        .into_iter()
                        .map(|profile| {
                            space
                                .profile_actions(profile)
                                .into_iter()
                                .map(|(other, action)| {
                                    (
                                        system.agents[other.0].clone(),
                                        system.action_name(action).to_string(),
                                    )
                                })
                                .collect()
                        })
                        .collect(),
                })
                .collect();
            StrategyDoc { name: named.name.clone(), agent: system.agents[agent.0].clone(), choices }
        })
        .collect();
    ScenarioDoc {
        name: name.to_string(),
        agents: system.agents.clone(),
        propositions: system.propositions.clone(),
        actions: system.actions.clone(),
        start: scenario.start.props().map(str::to_string).collect(),
        horizon: scenario.horizon,
        strategy_cap: Some(scenario.strategy_cap),
        availability,
        levels,
        transitions,
        strategies,
    }
}

/// The canonical TOML encoding of a document: identical documents always
/// produce identical bytes.
pub fn canonical_toml(doc: &ScenarioDoc) -> String {
    toml::to_string_pretty(doc).expect("scenario documents always serialize")
}
