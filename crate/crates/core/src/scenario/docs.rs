//! On-disk document schemas for scenarios and one-shot matrices.
//!
//! Documents are TOML. Serialization is canonical: struct fields are
//! emitted in a fixed order, maps are sorted, and arrays keep their
//! declared order, so writing the same document twice yields identical
//! bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A full scenario: declarations, transition table, start state, horizon,
/// value levels and optional named strategies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    pub agents: Vec<String>,
    pub propositions: Vec<String>,
    pub actions: Vec<String>,
    /// Propositions holding in the start state.
    pub start: Vec<String>,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy_cap: Option<u64>,
    /// Per-agent action availability; agents not listed may use every
    /// action.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub availability: BTreeMap<String, Vec<String>>,
    /// Value levels in priority order, most important first.
    pub levels: Vec<LevelDoc>,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strategies: Vec<StrategyDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDoc {
    pub values: Vec<ValueDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueDoc {
    pub name: String,
    pub formula: String,
}

/// One transition row. `from = "*"` matches any state; agents omitted
/// from `when` match any action. The most specific matching row wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: FromPattern,
    pub to: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub when: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FromPattern {
    /// `"*"`: any state.
    Any(String),
    /// A concrete state given by its propositions.
    Props(Vec<String>),
}

/// An explicit strategy: one action per decision node, nodes addressed by
/// the sequence of the other agents' joint actions leading to them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDoc {
    pub name: String,
    pub agent: String,
    pub choices: Vec<ChoiceDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceDoc {
    pub action: String,
    /// Path of opposing joint actions (one map per elapsed step) leading
    /// to the decision node; empty for the root.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub at: Vec<BTreeMap<String, String>>,
}

/// A one-shot normal-form scenario: a grid of value-name sets indexed by
/// a row agent's and a column agent's strategy labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub name: String,
    pub row_agent: String,
    pub col_agent: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Value names per priority level, most important first.
    pub levels: Vec<Vec<String>>,
    /// `cells[row][col]` lists the value names satisfied by that profile.
    pub cells: Vec<Vec<Vec<String>>>,
}
