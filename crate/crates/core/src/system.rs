//! States, joint actions, histories, the deterministic transition system
//! and the play function.
//!
//! A scenario bundles a transition system with a start state, a finite
//! horizon of at least one step and a prioritised value base. States are
//! subsets of the declared propositions; the transition table may contain
//! wildcard rows, with the most specific matching row winning. Everything
//! is immutable after construction and all operations are pure.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::strategy::{JointStrategy, Strategy};
use crate::values::ValueBase;

/// Index of an agent in the scenario's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

/// Index of an action name in the scenario's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

/// Default ceiling on the number of strategies enumerated per agent.
pub const DEFAULT_STRATEGY_CAP: u64 = 1_000_000;

/// Ceiling on decision-node counts and on the state/action combinations
/// walked during load-time validation.
const STRUCTURE_CAP: u64 = 1_000_000;

/// A state: the set of propositions that hold in it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct State(BTreeSet<String>);

impl State {
    pub fn empty() -> Self {
        State(BTreeSet::new())
    }

    pub fn from_props<I, S>(props: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        State(props.into_iter().map(Into::into).collect())
    }

    pub fn has(&self, prop: &str) -> bool {
        self.0.contains(prop)
    }

    pub fn props(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// One action per agent, indexed by agent declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointAction(Vec<ActionId>);

impl JointAction {
    pub fn new(actions: Vec<ActionId>) -> Self {
        JointAction(actions)
    }

    pub fn action(&self, agent: AgentId) -> ActionId {
        self.0[agent.0]
    }

    pub fn agent_count(&self) -> usize {
        self.0.len()
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.0
    }
}

/// A finite alternating record of `k+1` states and `k` joint actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct History {
    states: Vec<State>,
    actions: Vec<JointAction>,
}

impl History {
    pub fn new(states: Vec<State>, actions: Vec<JointAction>) -> Result<Self, ModelError> {
        if states.len() != actions.len() + 1 {
            return Err(ModelError::MalformedHistory {
                states: states.len(),
                actions: actions.len(),
            });
        }
        Ok(History { states, actions })
    }

    /// Number of steps, i.e. the history's `k`.
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn state(&self, t: usize) -> &State {
        &self.states[t]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn actions(&self) -> &[JointAction] {
        &self.actions
    }

    pub fn final_state(&self) -> &State {
        self.states.last().expect("a history has at least one state")
    }

    /// The history made of the first `upto+1` states and `upto` actions.
    pub fn prefix(&self, upto: usize) -> Result<History, ModelError> {
        if upto > self.horizon() {
            return Err(ModelError::PrefixOutOfRange { upto, horizon: self.horizon() });
        }
        Ok(History {
            states: self.states[..=upto].to_vec(),
            actions: self.actions[..upto].to_vec(),
        })
    }
}

/// One row of the transition table. `None` entries are wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRule {
    pub from: Option<State>,
    /// One entry per agent, in declaration order; `None` matches anything.
    pub when: Vec<Option<ActionId>>,
    pub to: State,
}

impl TransitionRule {
    fn matches(&self, state: &State, joint: &JointAction) -> bool {
        if let Some(from) = &self.from {
            if from != state {
                return false;
            }
        }
        self.when
            .iter()
            .zip(joint.actions())
            .all(|(pattern, actual)| pattern.is_none_or(|want| want == *actual))
    }

    fn specificity(&self) -> usize {
        self.from.is_some() as usize + self.when.iter().filter(|w| w.is_some()).count()
    }
}

/// Deterministic transition system over declared propositions, agents and
/// actions, with optional per-agent action availability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    pub propositions: Vec<String>,
    pub agents: Vec<String>,
    pub actions: Vec<String>,
    /// Actions an agent may choose, in declaration order; one set per agent.
    pub availability: Vec<Vec<ActionId>>,
    pub rules: Vec<TransitionRule>,
}

impl TransitionSystem {
    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name).map(AgentId)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(ActionId)
    }

    pub fn agent_name(&self, id: AgentId) -> &str {
        &self.agents[id.0]
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.actions[id.0]
    }

    /// The unique successor of `(state, joint)` under the table, with the
    /// most specific matching row winning.
    pub fn successor(&self, state: &State, joint: &JointAction) -> Result<State, ModelError> {
        let mut best: Option<(&TransitionRule, usize)> = None;
        let mut ambiguous = false;
        for rule in &self.rules {
            if !rule.matches(state, joint) {
                continue;
            }
            let spec = rule.specificity();
            match best {
                None => best = Some((rule, spec)),
                Some((chosen, best_spec)) => {
                    if spec > best_spec {
                        best = Some((rule, spec));
                        ambiguous = false;
                    } else if spec == best_spec && chosen.to != rule.to {
                        ambiguous = true;
                    }
                }
            }
        }
        match best {
            Some(_) if ambiguous => Err(ModelError::AmbiguousTransition {
                state: state.clone(),
                joint: self.describe_joint(joint),
            }),
            Some((rule, _)) => Ok(rule.to.clone()),
            None => Err(ModelError::MissingTransition {
                state: state.clone(),
                joint: self.describe_joint(joint),
            }),
        }
    }

    fn describe_joint(&self, joint: &JointAction) -> String {
        let parts: Vec<String> = self
            .agents
            .iter()
            .zip(joint.actions())
            .map(|(agent, action)| format!("{agent}={}", self.action_name(*action)))
            .collect();
        format!("({})", parts.join(", "))
    }

    /// Every availability-respecting joint action, agent-major, in
    /// declaration order.
    pub fn joint_actions(&self) -> Vec<JointAction> {
        let mut out = vec![Vec::new()];
        for avail in &self.availability {
            let mut next = Vec::with_capacity(out.len() * avail.len());
            for prefix in &out {
                for &action in avail {
                    let mut p = prefix.clone();
                    p.push(action);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(JointAction::new).collect()
    }

    /// All `2^|propositions|` states, in bitmask order over declaration
    /// indices.
    pub fn all_states(&self) -> Vec<State> {
        let n = self.propositions.len();
        (0..1usize << n)
            .map(|mask| {
                State::from_props(
                    self.propositions
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, p)| p.clone()),
                )
            })
            .collect()
    }
}

/// A transition system together with a start state, a horizon and a
/// prioritised value base: the complete model a single analysis runs on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub system: TransitionSystem,
    pub start: State,
    pub horizon: usize,
    pub values: ValueBase,
    /// Ceiling on strategies enumerated per agent; exceeded counts error
    /// out rather than silently sampling.
    pub strategy_cap: u64,
}

impl Scenario {
    /// Validates and builds a scenario. The transition table must resolve
    /// every declared state against every availability-respecting joint
    /// action to exactly one successor.
    pub fn new(
        system: TransitionSystem,
        start: State,
        horizon: usize,
        values: ValueBase,
        strategy_cap: u64,
    ) -> Result<Self, ModelError> {
        if horizon == 0 {
            return Err(ModelError::HorizonZero);
        }
        if system.agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        if system.actions.is_empty() {
            return Err(ModelError::NoActions);
        }
        if system.availability.len() != system.agents.len() {
            return Err(ModelError::AvailabilityShape);
        }
        for (agent, avail) in system.agents.iter().zip(&system.availability) {
            if avail.is_empty() {
                return Err(ModelError::EmptyAvailability { agent: agent.clone() });
            }
            for action in avail {
                if action.0 >= system.actions.len() {
                    return Err(ModelError::UndeclaredAction { agent: agent.clone() });
                }
            }
        }
        let declared: BTreeSet<&str> = system.propositions.iter().map(String::as_str).collect();
        for prop in start.props() {
            if !declared.contains(prop) {
                return Err(ModelError::UndeclaredProposition { prop: prop.to_string() });
            }
        }
        for rule in &system.rules {
            for state in rule.from.iter().chain(Some(&rule.to)) {
                for prop in state.props() {
                    if !declared.contains(prop) {
                        return Err(ModelError::UndeclaredProposition { prop: prop.to_string() });
                    }
                }
            }
            if rule.when.len() != system.agents.len() {
                return Err(ModelError::AvailabilityShape);
            }
        }
        for value in values.iter() {
            for prop in value.formula.propositions() {
                if !declared.contains(prop) {
                    return Err(ModelError::UndeclaredProposition { prop: prop.to_string() });
                }
            }
        }

        let scenario = Scenario { system, start, horizon, values, strategy_cap };
        scenario.check_total_and_deterministic()?;
        Ok(scenario)
    }

    fn check_total_and_deterministic(&self) -> Result<(), ModelError> {
        if self.system.propositions.len() > 20 {
            return Err(ModelError::ValidationTooLarge);
        }
        let joints = self.system.joint_actions();
        let states = self.system.all_states();
        let combos = (states.len() as u64).saturating_mul(joints.len() as u64);
        if combos > STRUCTURE_CAP {
            return Err(ModelError::ValidationTooLarge);
        }
        for state in &states {
            for joint in &joints {
                self.system.successor(state, joint)?;
            }
        }
        Ok(())
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.system.agents.len()).map(AgentId)
    }

    /// The tree of decision points agent `agent` can face, encoded
    /// arithmetically. See [`DecisionSpace`].
    pub fn decision_space(&self, agent: AgentId) -> Result<DecisionSpace, ModelError> {
        DecisionSpace::build(self, agent)
    }

    /// Plays a full joint strategy from the start state for `horizon`
    /// steps and returns the unique resulting history.
    pub fn play(&self, joint: &JointStrategy) -> Result<History, ModelError> {
        PlayContext::new(self)?.play(joint)
    }
}

/// The decision points of one agent up to the horizon.
///
/// Because the transition table is deterministic and an agent knows its
/// own past choices, a decision point is identified by the sequence of the
/// other agents' joint actions observed so far. Nodes are numbered
/// breadth-first with children ordered by opposing-profile index, which
/// fixes the enumeration order of strategies.
#[derive(Debug, Clone)]
pub struct DecisionSpace {
    owner: AgentId,
    horizon: usize,
    own_actions: Vec<ActionId>,
    others: Vec<AgentId>,
    others_availability: Vec<Vec<ActionId>>,
    /// Cartesian product of the other agents' available actions,
    /// agent-major in declaration order. Contains one empty profile when
    /// there are no other agents.
    opposing_profiles: Vec<Vec<ActionId>>,
    /// `level_offsets[t]` is the id of the first depth-`t` node;
    /// `level_offsets[horizon]` is the total node count.
    level_offsets: Vec<u64>,
    strategy_count: u64,
}

impl DecisionSpace {
    fn build(scenario: &Scenario, owner: AgentId) -> Result<Self, ModelError> {
        let system = &scenario.system;
        if owner.0 >= system.agents.len() {
            return Err(ModelError::UnknownAgent { index: owner.0 });
        }
        let others: Vec<AgentId> = scenario.agent_ids().filter(|a| *a != owner).collect();
        let others_availability: Vec<Vec<ActionId>> =
            others.iter().map(|o| system.availability[o.0].clone()).collect();
        let mut opposing_profiles = vec![Vec::new()];
        for avail in &others_availability {
            let mut next = Vec::with_capacity(opposing_profiles.len() * avail.len());
            for prefix in &opposing_profiles {
                for &action in avail {
                    let mut p = prefix.clone();
                    p.push(action);
                    next.push(p);
                }
            }
            opposing_profiles = next;
        }

        let branching = opposing_profiles.len() as u64;
        let mut level_offsets = Vec::with_capacity(scenario.horizon + 1);
        let mut offset: u64 = 0;
        let mut level_width: u64 = 1;
        for _ in 0..scenario.horizon {
            level_offsets.push(offset);
            offset = offset
                .checked_add(level_width)
                .filter(|&n| n <= STRUCTURE_CAP)
                .ok_or(ModelError::CapExceeded {
                    agent: system.agents[owner.0].clone(),
                    what: "decision nodes".into(),
                    cap: STRUCTURE_CAP,
                })?;
            level_width = level_width.saturating_mul(branching);
        }
        level_offsets.push(offset);

        let own_actions = system.availability[owner.0].clone();
        let strategy_count = checked_pow(own_actions.len() as u64, offset).ok_or_else(|| {
            ModelError::CapExceeded {
                agent: system.agents[owner.0].clone(),
                what: "strategies".into(),
                cap: scenario.strategy_cap,
            }
        })?;
        if strategy_count > scenario.strategy_cap {
            return Err(ModelError::CapExceeded {
                agent: system.agents[owner.0].clone(),
                what: "strategies".into(),
                cap: scenario.strategy_cap,
            });
        }

        Ok(DecisionSpace {
            owner,
            horizon: scenario.horizon,
            own_actions,
            others,
            others_availability,
            opposing_profiles,
            level_offsets,
            strategy_count,
        })
    }

    pub fn owner(&self) -> AgentId {
        self.owner
    }

    pub fn node_count(&self) -> u64 {
        self.level_offsets[self.horizon]
    }

    /// Exactly `|own actions| ^ node_count`.
    pub fn strategy_count(&self) -> u64 {
        self.strategy_count
    }

    pub fn own_actions(&self) -> &[ActionId] {
        &self.own_actions
    }

    pub fn branching(&self) -> usize {
        self.opposing_profiles.len()
    }

    pub fn opposing_profiles(&self) -> &[Vec<ActionId>] {
        &self.opposing_profiles
    }

    pub fn others(&self) -> &[AgentId] {
        &self.others
    }

    /// Index of the other agents' part of `joint` among the opposing
    /// profiles.
    pub fn profile_index(&self, joint: &JointAction) -> usize {
        let mut index = 0usize;
        for (other, avail) in self.others.iter().zip(&self.others_availability) {
            let action = joint.action(*other);
            let pos = avail
                .iter()
                .position(|a| *a == action)
                .expect("joint action uses an unavailable action");
            index = index * avail.len() + pos;
        }
        index
    }

    /// Node id reached from `node` at depth `depth` after observing the
    /// opposing profile with index `profile`.
    pub fn child(&self, node: u64, depth: usize, profile: usize) -> u64 {
        let in_level = node - self.level_offsets[depth];
        self.level_offsets[depth + 1] + in_level * self.branching() as u64 + profile as u64
    }

    /// Node id addressed by a path of opposing-profile indices from the
    /// root. An empty path addresses the root.
    pub fn node_at(&self, path: &[usize]) -> Option<u64> {
        if path.len() >= self.level_offsets.len() {
            return None;
        }
        let mut node = self.level_offsets[0];
        for (depth, &profile) in path.iter().enumerate() {
            if profile >= self.branching() {
                return None;
            }
            node = self.child(node, depth, profile);
        }
        Some(node)
    }

    /// The opposing-profile path leading to `node` (inverse of
    /// [`DecisionSpace::node_at`]).
    pub fn path_of(&self, node: u64) -> Vec<usize> {
        let depth = (0..self.horizon)
            .find(|&t| node < self.level_offsets[t + 1])
            .expect("node id within the space");
        let mut in_level = node - self.level_offsets[depth];
        let branching = self.branching() as u64;
        let mut path = vec![0usize; depth];
        for slot in path.iter_mut().rev() {
            *slot = (in_level % branching) as usize;
            in_level /= branching;
        }
        path
    }

    /// Profile index from an explicit per-agent action lookup; `None` if
    /// some other agent is missing or chose an unavailable action.
    pub fn profile_index_from(
        &self,
        mut lookup: impl FnMut(AgentId) -> Option<ActionId>,
    ) -> Option<usize> {
        let mut index = 0usize;
        for (other, avail) in self.others.iter().zip(&self.others_availability) {
            let action = lookup(*other)?;
            let pos = avail.iter().position(|a| *a == action)?;
            index = index * avail.len() + pos;
        }
        Some(index)
    }

    /// The opposing profile with the given index, as (agent, action)
    /// pairs in declaration order.
    pub fn profile_actions(&self, profile: usize) -> Vec<(AgentId, ActionId)> {
        self.others
            .iter()
            .copied()
            .zip(self.opposing_profiles[profile].iter().copied())
            .collect()
    }
}

fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Precomputed per-agent decision spaces for repeated plays on one
/// scenario.
pub struct PlayContext<'a> {
    scenario: &'a Scenario,
    spaces: Vec<DecisionSpace>,
}

impl<'a> PlayContext<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self, ModelError> {
        let spaces = scenario
            .agent_ids()
            .map(|a| scenario.decision_space(a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PlayContext { scenario, spaces })
    }

    pub fn space(&self, agent: AgentId) -> &DecisionSpace {
        &self.spaces[agent.0]
    }

    /// The unique history obtained by letting every agent follow its
    /// strategy from the start state.
    pub fn play(&self, joint: &JointStrategy) -> Result<History, ModelError> {
        let n = self.scenario.system.agents.len();
        let mut per_agent: Vec<&Strategy> = Vec::with_capacity(n);
        for agent in self.scenario.agent_ids() {
            let strategy = joint.get(agent).ok_or(ModelError::IncompleteJointStrategy {
                agent: self.scenario.system.agents[agent.0].clone(),
            })?;
            let space = &self.spaces[agent.0];
            if strategy.choices().len() as u64 != space.node_count() {
                return Err(ModelError::MalformedStrategy {
                    agent: self.scenario.system.agents[agent.0].clone(),
                    reason: format!(
                        "strategy covers {} decision nodes, expected {}",
                        strategy.choices().len(),
                        space.node_count()
                    ),
                });
            }
            for choice in strategy.choices() {
                if !space.own_actions().contains(choice) {
                    return Err(ModelError::MalformedStrategy {
                        agent: self.scenario.system.agents[agent.0].clone(),
                        reason: format!(
                            "chooses unavailable action '{}'",
                            self.scenario.system.action_name(*choice)
                        ),
                    });
                }
            }
            per_agent.push(strategy);
        }

        let mut states = Vec::with_capacity(self.scenario.horizon + 1);
        let mut actions = Vec::with_capacity(self.scenario.horizon);
        states.push(self.scenario.start.clone());
        let mut in_level = vec![0u64; n];
        for t in 0..self.scenario.horizon {
            let chosen: Vec<ActionId> = (0..n)
                .map(|i| {
                    let node = self.spaces[i].level_offsets[t] + in_level[i];
                    per_agent[i].choices()[node as usize]
                })
                .collect();
            let joint_action = JointAction::new(chosen);
            let next = self.scenario.system.successor(states.last().unwrap(), &joint_action)?;
            for i in 0..n {
                let profile = self.spaces[i].profile_index(&joint_action);
                in_level[i] = in_level[i] * self.spaces[i].branching() as u64 + profile as u64;
            }
            actions.push(joint_action);
            states.push(next);
        }
        Ok(History { states, actions })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a history needs one more state than actions, got {states} states and {actions} actions")]
    MalformedHistory { states: usize, actions: usize },
    #[error("prefix index {upto} exceeds history horizon {horizon}")]
    PrefixOutOfRange { upto: usize, horizon: usize },
    #[error("no transition row matches state {state} under joint action {joint}")]
    MissingTransition { state: State, joint: String },
    #[error("transition table is ambiguous for state {state} under joint action {joint}")]
    AmbiguousTransition { state: State, joint: String },
    #[error("the horizon must be at least 1")]
    HorizonZero,
    #[error("a scenario needs at least one agent")]
    NoAgents,
    #[error("a scenario needs at least one action")]
    NoActions,
    #[error("availability table does not match the declared agents")]
    AvailabilityShape,
    #[error("agent '{agent}' has no available actions")]
    EmptyAvailability { agent: String },
    #[error("agent '{agent}' lists an undeclared action")]
    UndeclaredAction { agent: String },
    #[error("proposition '{prop}' is not declared")]
    UndeclaredProposition { prop: String },
    #[error("agent index {index} is out of range")]
    UnknownAgent { index: usize },
    #[error("scenario too large to validate exhaustively")]
    ValidationTooLarge,
    #[error("{what} for agent '{agent}' exceed the cap of {cap}")]
    CapExceeded { agent: String, what: String, cap: u64 },
    #[error("joint strategy is missing a strategy for agent '{agent}'")]
    IncompleteJointStrategy { agent: String },
    #[error("malformed strategy for agent '{agent}': {reason}")]
    MalformedStrategy { agent: String, reason: String },
}
