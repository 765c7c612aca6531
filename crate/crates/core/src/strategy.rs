//! Finite strategies, exhaustive enumeration, weak dominance and symbolic
//! regret.
//!
//! A strategy assigns an available action to every decision node of its
//! owner's [`DecisionSpace`](crate::system::DecisionSpace). Enumeration is
//! deterministic: node-major, actions in declaration order, so repeated
//! runs produce identical listings and identical tie-breaks.

use std::collections::BTreeSet;

use crate::system::{ActionId, AgentId, ModelError, PlayContext, Scenario};
use crate::values::{self, OutcomeSet, ScoreVector};

/// One agent's choice of an available action at every decision node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strategy {
    owner: AgentId,
    choices: Vec<ActionId>,
}

impl Strategy {
    pub fn new(owner: AgentId, choices: Vec<ActionId>) -> Self {
        Strategy { owner, choices }
    }

    pub fn owner(&self) -> AgentId {
        self.owner
    }

    /// Chosen action per decision node, in node order.
    pub fn choices(&self) -> &[ActionId] {
        &self.choices
    }
}

/// A strategy per member of a coalition. The coalition may be empty, a
/// proper subset of the agents, or all of them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointStrategy {
    strategies: Vec<Strategy>,
}

impl JointStrategy {
    /// Builds a joint strategy from per-agent strategies. Owners must be
    /// distinct.
    pub fn new(mut strategies: Vec<Strategy>) -> Self {
        strategies.sort_by_key(|s| s.owner());
        for pair in strategies.windows(2) {
            assert!(
                pair[0].owner() != pair[1].owner(),
                "joint strategy contains two strategies for one agent"
            );
        }
        JointStrategy { strategies }
    }

    pub fn empty() -> Self {
        JointStrategy { strategies: Vec::new() }
    }

    pub fn members(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.strategies.iter().map(|s| s.owner())
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn get(&self, agent: AgentId) -> Option<&Strategy> {
        self.strategies.iter().find(|s| s.owner() == agent)
    }

    /// A copy with `strategy` inserted, replacing any existing strategy
    /// of the same owner.
    pub fn with(&self, strategy: Strategy) -> JointStrategy {
        let mut strategies: Vec<Strategy> = self
            .strategies
            .iter()
            .filter(|s| s.owner() != strategy.owner())
            .cloned()
            .collect();
        strategies.push(strategy);
        JointStrategy::new(strategies)
    }

    /// A copy without `agent`'s strategy.
    pub fn without(&self, agent: AgentId) -> JointStrategy {
        JointStrategy {
            strategies: self
                .strategies
                .iter()
                .filter(|s| s.owner() != agent)
                .cloned()
                .collect(),
        }
    }
}

/// All strategies of `agent`, in deterministic lexicographic order over
/// choice vectors. The count is exactly
/// `|available actions| ^ |decision nodes|`.
pub fn enumerate_strategies(scenario: &Scenario, agent: AgentId) -> Result<Vec<Strategy>, ModelError> {
    let space = scenario.decision_space(agent)?;
    let actions = space.own_actions();
    let nodes = space.node_count() as usize;
    let count = space.strategy_count();
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; nodes];
    for _ in 0..count {
        out.push(Strategy::new(agent, digits.iter().map(|&d| actions[d]).collect()));
        // increment, last node fastest, so choice vectors ascend
        // lexicographically
        let mut pos = nodes;
        while pos > 0 {
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < actions.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(out)
}

/// All joint strategies for a coalition: the cartesian product of the
/// members' enumerations, later members varying fastest.
pub fn enumerate_joint(
    scenario: &Scenario,
    coalition: &[AgentId],
) -> Result<Vec<JointStrategy>, ModelError> {
    let mut members: Vec<AgentId> = coalition.to_vec();
    members.sort();
    members.dedup();
    let mut per_member = Vec::with_capacity(members.len());
    let mut total: u64 = 1;
    for &agent in &members {
        let strategies = enumerate_strategies(scenario, agent)?;
        total = total
            .checked_mul(strategies.len() as u64)
            .filter(|&t| t <= scenario.strategy_cap)
            .ok_or_else(|| ModelError::CapExceeded {
                agent: scenario.system.agents[agent.0].clone(),
                what: "joint strategies".into(),
                cap: scenario.strategy_cap,
            })?;
        per_member.push(strategies);
    }
    let mut out = vec![JointStrategy::empty()];
    for strategies in &per_member {
        let mut next = Vec::with_capacity(out.len() * strategies.len());
        for joint in &out {
            for strategy in strategies {
                next.push(joint.with(strategy.clone()));
            }
        }
        out = next;
    }
    Ok(out)
}

/// The agents other than `agent`, in declaration order.
pub fn opponents_of(scenario: &Scenario, agent: AgentId) -> Vec<AgentId> {
    scenario.agent_ids().filter(|a| *a != agent).collect()
}

/// All joint strategies for everyone except `agent`.
pub fn enumerate_opposing(
    scenario: &Scenario,
    agent: AgentId,
) -> Result<Vec<JointStrategy>, ModelError> {
    enumerate_joint(scenario, &opponents_of(scenario, agent))
}

/// Precomputed outcome sets for one agent: the satisfaction set of every
/// (own strategy, opposing joint strategy) pair. Shared by the dominance,
/// regret and responsibility analyses.
pub struct OutcomeTable<'a> {
    pub scenario: &'a Scenario,
    pub agent: AgentId,
    pub own: Vec<Strategy>,
    pub opposing: Vec<JointStrategy>,
    sats: Vec<OutcomeSet>,
    scores: Vec<ScoreVector>,
}

impl<'a> OutcomeTable<'a> {
    pub fn build(scenario: &'a Scenario, agent: AgentId) -> Result<Self, ModelError> {
        let own = enumerate_strategies(scenario, agent)?;
        let opposing = enumerate_opposing(scenario, agent)?;
        let context = PlayContext::new(scenario)?;
        let mut sats = Vec::with_capacity(own.len() * opposing.len());
        let mut scores = Vec::with_capacity(own.len() * opposing.len());
        for strategy in &own {
            for opp in &opposing {
                let history = context.play(&opp.with(strategy.clone()))?;
                let sat = values::satset(&history, &scenario.values);
                scores.push(
                    values::score_vector(&sat, &scenario.values)
                        .expect("satset references its own base"),
                );
                sats.push(sat);
            }
        }
        Ok(OutcomeTable { scenario, agent, own, opposing, sats, scores })
    }

    pub fn satset(&self, own: usize, opposing: usize) -> &OutcomeSet {
        &self.sats[own * self.opposing.len() + opposing]
    }

    pub fn score(&self, own: usize, opposing: usize) -> &ScoreVector {
        &self.scores[own * self.opposing.len() + opposing]
    }

    /// Outcome row of an arbitrary strategy (not necessarily one of the
    /// enumerated ones, e.g. a named strategy from a scenario file).
    pub fn row_for(&self, strategy: &Strategy) -> Result<Vec<OutcomeSet>, ModelError> {
        let context = PlayContext::new(self.scenario)?;
        self.opposing
            .iter()
            .map(|opp| {
                let history = context.play(&opp.with(strategy.clone()))?;
                Ok(values::satset(&history, &self.scenario.values))
            })
            .collect()
    }

    /// Index of `strategy` in the enumeration, if its choices match one.
    pub fn index_of(&self, strategy: &Strategy) -> Option<usize> {
        self.own.iter().position(|s| s == strategy)
    }

    /// `own[a]` never beats `own[b]` anywhere: the weak dominance test on
    /// enumerated indices.
    pub fn dominated_by(&self, a: usize, b: usize) -> bool {
        (0..self.opposing.len()).all(|o| self.score(a, o) <= self.score(b, o))
    }
}

/// Does `challenger` do at least as well as `strategy` against every
/// opposing joint strategy? (`strategy <= challenger` in the dominance
/// order.)
pub fn weakly_dominates(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
    challenger: &Strategy,
) -> Result<bool, ModelError> {
    let opposing = enumerate_opposing(scenario, agent)?;
    let context = PlayContext::new(scenario)?;
    for opp in &opposing {
        let ours = values::satset(&context.play(&opp.with(strategy.clone()))?, &scenario.values);
        let theirs =
            values::satset(&context.play(&opp.with(challenger.clone()))?, &scenario.values);
        if !values::leq(&ours, &theirs, &scenario.values) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// No other strategy weakly dominates `strategy` while doing strictly
/// better somewhere.
pub fn non_dominated(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
) -> Result<bool, ModelError> {
    let table = OutcomeTable::build(scenario, agent)?;
    let row = table.row_for(strategy)?;
    let row_scores: Vec<ScoreVector> = row
        .iter()
        .map(|s| values::score_vector(s, &scenario.values).expect("satset scores"))
        .collect();
    for challenger in 0..table.own.len() {
        let dominated = (0..table.opposing.len())
            .all(|o| row_scores[o] <= *table.score(challenger, o));
        let asymmetric = (0..table.opposing.len())
            .any(|o| row_scores[o] < *table.score(challenger, o));
        if dominated && asymmetric {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All non-dominated strategies of `agent`, in enumeration order.
pub fn non_dominated_set(scenario: &Scenario, agent: AgentId) -> Result<Vec<Strategy>, ModelError> {
    let table = OutcomeTable::build(scenario, agent)?;
    let mut out = Vec::new();
    for candidate in 0..table.own.len() {
        let mut keep = true;
        for challenger in 0..table.own.len() {
            if table.dominated_by(candidate, challenger)
                && !table.dominated_by(challenger, candidate)
            {
                keep = false;
                break;
            }
        }
        if keep {
            out.push(table.own[candidate].clone());
        }
    }
    Ok(out)
}

/// The worst relative regret a strategy can anticipate, with one witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnticipatedRegret {
    /// The worst-case regret set.
    pub regret: OutcomeSet,
    /// Score of the regret class; equal scores mean equally bad regrets.
    pub score: ScoreVector,
    /// The opposing joint strategy realising the worst case.
    pub opponents: JointStrategy,
    /// The alternative strategy the agent would regret not having played.
    pub alternative: Strategy,
}

/// Worst (least preferred) relative regret of `strategy` over every
/// opposing joint strategy and every alternative of the agent, including
/// the strategy itself. Ties are resolved by enumeration order: opposing
/// strategies outermost, alternatives innermost, first witness kept.
pub fn anticipated_regret(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
) -> Result<AnticipatedRegret, ModelError> {
    let witnesses = regret_candidates(scenario, agent, strategy)?;
    Ok(pick_worst(witnesses, scenario))
}

/// Every candidate tied for the worst regret class, in enumeration order.
pub fn anticipated_regret_witnesses(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
) -> Result<Vec<AnticipatedRegret>, ModelError> {
    let candidates = regret_candidates(scenario, agent, strategy)?;
    let worst = pick_worst(candidates.clone(), scenario);
    Ok(candidates.into_iter().filter(|c| c.score == worst.score).collect())
}

fn regret_candidates(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
) -> Result<Vec<AnticipatedRegret>, ModelError> {
    let table = OutcomeTable::build(scenario, agent)?;
    let row = table.row_for(strategy)?;
    let mut out = Vec::with_capacity(table.opposing.len() * table.own.len());
    for (o, opp) in table.opposing.iter().enumerate() {
        for (a, alternative) in table.own.iter().enumerate() {
            let regret = row[o].difference(table.satset(a, o));
            let score = values::score_vector(&regret, &scenario.values)
                .expect("regret references its own base");
            out.push(AnticipatedRegret {
                regret,
                score,
                opponents: opp.clone(),
                alternative: alternative.clone(),
            });
        }
    }
    Ok(out)
}

fn pick_worst(candidates: Vec<AnticipatedRegret>, _scenario: &Scenario) -> AnticipatedRegret {
    let mut iter = candidates.into_iter();
    let mut worst = iter.next().expect("at least the strategy itself is a candidate");
    for candidate in iter {
        if candidate.score < worst.score {
            worst = candidate;
        }
    }
    worst
}

/// All strategies whose anticipated regret is maximal under the preorder,
/// i.e. no alternative anticipates a strictly better worst case.
pub fn regret_minimising_set(scenario: &Scenario, agent: AgentId) -> Result<Vec<Strategy>, ModelError> {
    let table = OutcomeTable::build(scenario, agent)?;
    let mut regrets = Vec::with_capacity(table.own.len());
    for s in 0..table.own.len() {
        let mut worst: Option<ScoreVector> = None;
        for o in 0..table.opposing.len() {
            for a in 0..table.own.len() {
                let regret = table.satset(s, o).difference(table.satset(a, o));
                let score = values::score_vector(&regret, &scenario.values)
                    .expect("regret references its own base");
                if worst.as_ref().is_none_or(|w| score < *w) {
                    worst = Some(score);
                }
            }
        }
        regrets.push(worst.expect("non-empty quantification"));
    }
    let best = regrets.iter().max().expect("at least one strategy").clone();
    Ok(table
        .own
        .iter()
        .zip(&regrets)
        .filter(|(_, r)| **r == best)
        .map(|(s, _)| s.clone())
        .collect())
}

/// Representatives of distinct outcome signatures: the first strategy of
/// each group that realises the same satisfaction set against every
/// opposing joint strategy.
pub fn dedupe_by_outcome(scenario: &Scenario, agent: AgentId) -> Result<Vec<Strategy>, ModelError> {
    let table = OutcomeTable::build(scenario, agent)?;
    let mut seen: BTreeSet<Vec<OutcomeSet>> = BTreeSet::new();
    let mut out = Vec::new();
    for (i, strategy) in table.own.iter().enumerate() {
        let signature: Vec<OutcomeSet> =
            (0..table.opposing.len()).map(|o| table.satset(i, o).clone()).collect();
        if seen.insert(signature) {
            out.push(strategy.clone());
        }
    }
    Ok(out)
}
