//! Responsibility attribution and anticipation.
//!
//! Everything here is counterfactual: fixing the other agents' strategies,
//! what would an alternative choice of the agent have changed? The outcome
//! difference `satset(actual) \ satset(counterfactual)` is the agent's
//! responsibility via that alternative. Passive responsibility quantifies
//! the alternative existentially; the inexcusable variant additionally
//! requires that no opposing joint strategy would have vindicated the
//! agent's actual choice against the accusing alternative (a weak excuse).
//! Anticipation takes the worst attributable outcome over every opposing
//! joint strategy before execution, which is what strategy selection
//! minimises.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ltlf::{holds, Formula};
use crate::strategy::{enumerate_opposing, JointStrategy, OutcomeTable, Strategy};
use crate::system::{AgentId, ModelError, PlayContext, Scenario};
use crate::values::{self, OutcomeSet, ScoreVector};

/// Which notion of responsibility an analysis quantifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResponsibilityKind {
    Passive,
    Inexcusable,
}

impl ResponsibilityKind {
    pub fn label(self) -> &'static str {
        match self {
            ResponsibilityKind::Passive => "passive",
            ResponsibilityKind::Inexcusable => "inexcusable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExcuseKind {
    Weak,
    Strong,
}

/// A vindicating opposing joint strategy for a challenged choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excuse {
    pub kind: ExcuseKind,
    pub witness: JointStrategy,
}

/// The full record of one via-strategy attribution under a fixed joint
/// strategy: the outcome difference, its score, whether it is negative,
/// the blocking weak excuse if one exists, and whether the attribution is
/// admitted as inexcusable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribution {
    pub agent: AgentId,
    pub outcome: OutcomeSet,
    pub score: ScoreVector,
    /// The accusing alternative strategy.
    pub via: Strategy,
    /// The joint strategy actually played.
    pub context: JointStrategy,
    /// Whether the outcome is at most as good as the empty set.
    pub negative: bool,
    /// A weak excuse against the accusation, when one exists. Only
    /// negative attributions are excusable.
    pub weak_excuse: Option<JointStrategy>,
    /// Admitted as inexcusable: either the excuse clause does not apply
    /// (non-negative outcome) or no weak excuse exists.
    pub inexcusable: bool,
}

/// Worst-case responsibility anticipated for a strategy, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anticipated {
    pub kind: ResponsibilityKind,
    pub outcome: OutcomeSet,
    pub score: ScoreVector,
    /// Opposing joint strategy realising the worst case.
    pub opponents: JointStrategy,
    /// The accusing alternative in that worst case.
    pub accusation: Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResponsibilityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("strategy belongs to agent index {actual}, expected {expected}")]
    WrongOwner { expected: usize, actual: usize },
    #[error("formula '{formula}' is not satisfied by the played history")]
    ValueNotSatisfied { formula: String },
    #[error("excuses are defined only for negative responsibility; the attribution is strictly better than the empty outcome")]
    NotNegative,
}

fn owned_by(strategy: &Strategy, agent: AgentId) -> Result<(), ResponsibilityError> {
    if strategy.owner() != agent {
        return Err(ResponsibilityError::WrongOwner {
            expected: agent.0,
            actual: strategy.owner().0,
        });
    }
    Ok(())
}

/// What `agent` is responsible for via `alternative` under `joint`: the
/// satisfaction-set difference between the actual play and the play where
/// only the agent's own strategy is swapped.
pub fn responsible_via(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
    alternative: &Strategy,
) -> Result<OutcomeSet, ResponsibilityError> {
    owned_by(alternative, agent)?;
    let context = PlayContext::new(scenario)?;
    let actual = values::satset(&context.play(joint)?, &scenario.values);
    let counterfactual = values::satset(
        &context.play(&joint.with(alternative.clone()))?,
        &scenario.values,
    );
    Ok(actual.difference(&counterfactual))
}

/// One attribution record per alternative strategy of `agent`, in
/// enumeration order.
pub fn attributions(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
) -> Result<Vec<Attribution>, ResponsibilityError> {
    let own = joint.get(agent).ok_or(ModelError::IncompleteJointStrategy {
        agent: scenario.system.agents[agent.0].clone(),
    })?;
    let table = OutcomeTable::build(scenario, agent)?;
    let own_row = table.row_for(own)?;
    let context = PlayContext::new(scenario)?;
    let actual = values::satset(&context.play(joint)?, &scenario.values);
    let empty = OutcomeSet::empty();

    let mut out = Vec::with_capacity(table.own.len());
    for (a, alternative) in table.own.iter().enumerate() {
        let counterfactual = values::satset(
            &context.play(&joint.with(alternative.clone()))?,
            &scenario.values,
        );
        let outcome = actual.difference(&counterfactual);
        let score = values::score_vector(&outcome, &scenario.values)
            .expect("attribution references its own base");
        let negative = values::leq(&outcome, &empty, &scenario.values);
        let weak_excuse = if negative {
            (0..table.opposing.len())
                .find(|&o| values::strictly_less(table.satset(a, o), &own_row[o], &scenario.values))
                .map(|o| table.opposing[o].clone())
        } else {
            None
        };
        let inexcusable = !negative || weak_excuse.is_none();
        out.push(Attribution {
            agent,
            outcome,
            score,
            via: alternative.clone(),
            context: joint.clone(),
            negative,
            weak_excuse,
            inexcusable,
        });
    }
    Ok(out)
}

/// The set of outcome sets `agent` is passively responsible for under
/// `joint`: one per alternative strategy, deduplicated.
pub fn passive_attributions(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
) -> Result<BTreeSet<OutcomeSet>, ResponsibilityError> {
    let own = enumerate_strategies_of(scenario, agent)?;
    let context = PlayContext::new(scenario)?;
    let actual = values::satset(&context.play(joint)?, &scenario.values);
    let mut out = BTreeSet::new();
    for alternative in &own {
        let counterfactual = values::satset(
            &context.play(&joint.with(alternative.clone()))?,
            &scenario.values,
        );
        out.insert(actual.difference(&counterfactual));
    }
    Ok(out)
}

fn enumerate_strategies_of(
    scenario: &Scenario,
    agent: AgentId,
) -> Result<Vec<Strategy>, ModelError> {
    crate::strategy::enumerate_strategies(scenario, agent)
}

/// The outcome sets admitted as inexcusable passive responsibility: the
/// via-attribution exists and either the excuse clause is vacuous (the
/// outcome is strictly better than empty) or no weak excuse exists.
pub fn inexcusable_attributions(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
) -> Result<BTreeSet<OutcomeSet>, ResponsibilityError> {
    Ok(attributions(scenario, joint, agent)?
        .into_iter()
        .filter(|a| a.inexcusable)
        .map(|a| a.outcome)
        .collect())
}

/// All alternative strategies under which the played history would have
/// violated `value`. Precondition: the actual play satisfies `value`.
pub fn accusations(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
    value: &Formula,
) -> Result<Vec<Strategy>, ResponsibilityError> {
    let context = PlayContext::new(scenario)?;
    let actual = context.play(joint)?;
    if !holds(value, &actual) {
        return Err(ResponsibilityError::ValueNotSatisfied { formula: value.to_string() });
    }
    let negated = value.clone().not();
    let mut out = Vec::new();
    for alternative in enumerate_strategies_of(scenario, agent)? {
        let counterfactual = context.play(&joint.with(alternative.clone()))?;
        if holds(&negated, &counterfactual) {
            out.push(alternative);
        }
    }
    Ok(out)
}

/// Liability of `agent` for `value` under `joint`: the play satisfies
/// `value` and some accusing alternative both prevents it and weakly
/// dominates the agent's actual strategy. Returns the first such accuser.
pub fn liable(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
    value: &Formula,
) -> Result<Option<Strategy>, ResponsibilityError> {
    let context = PlayContext::new(scenario)?;
    let actual = context.play(joint)?;
    if !holds(value, &actual) {
        return Ok(None);
    }
    let own = joint.get(agent).ok_or(ModelError::IncompleteJointStrategy {
        agent: scenario.system.agents[agent.0].clone(),
    })?;
    let negated = value.clone().not();
    for alternative in enumerate_strategies_of(scenario, agent)? {
        let counterfactual = context.play(&joint.with(alternative.clone()))?;
        if holds(&negated, &counterfactual)
            && crate::strategy::weakly_dominates(scenario, agent, own, &alternative)?
        {
            return Ok(Some(alternative));
        }
    }
    Ok(None)
}

/// A weak excuse for picking the actual strategy over `alternative`: an
/// opposing joint strategy under which the actual strategy does strictly
/// better. Defined only when the via-attribution is at most as good as
/// the empty outcome.
pub fn weak_excuse(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
    alternative: &Strategy,
) -> Result<Option<Excuse>, ResponsibilityError> {
    let outcome = responsible_via(scenario, joint, agent, alternative)?;
    if !values::leq(&outcome, &OutcomeSet::empty(), &scenario.values) {
        return Err(ResponsibilityError::NotNegative);
    }
    let own = joint.get(agent).ok_or(ModelError::IncompleteJointStrategy {
        agent: scenario.system.agents[agent.0].clone(),
    })?;
    let context = PlayContext::new(scenario)?;
    for opposing in enumerate_opposing(scenario, agent)? {
        let ours = values::satset(&context.play(&opposing.with(own.clone()))?, &scenario.values);
        let theirs = values::satset(
            &context.play(&opposing.with(alternative.clone()))?,
            &scenario.values,
        );
        if values::strictly_less(&theirs, &ours, &scenario.values) {
            return Ok(Some(Excuse { kind: ExcuseKind::Weak, witness: opposing }));
        }
    }
    Ok(None)
}

/// A strong excuse: an opposing joint strategy under which sticking with
/// the actual strategy gains strictly more than nothing, and at least as
/// much as the accusation's margin in the actual context. The first
/// comparison is strict and the second non-strict, the weakest reading
/// under which every strong excuse is a weak excuse.
pub fn strong_excuse(
    scenario: &Scenario,
    joint: &JointStrategy,
    agent: AgentId,
    alternative: &Strategy,
) -> Result<Option<Excuse>, ResponsibilityError> {
    let outcome = responsible_via(scenario, joint, agent, alternative)?;
    if !values::leq(&outcome, &OutcomeSet::empty(), &scenario.values) {
        return Err(ResponsibilityError::NotNegative);
    }
    let own = joint.get(agent).ok_or(ModelError::IncompleteJointStrategy {
        agent: scenario.system.agents[agent.0].clone(),
    })?;
    let context = PlayContext::new(scenario)?;
    let actual = values::satset(&context.play(joint)?, &scenario.values);
    let accused = values::satset(
        &context.play(&joint.with(alternative.clone()))?,
        &scenario.values,
    );
    let loss = accused.difference(&actual);
    let empty = OutcomeSet::empty();
    for opposing in enumerate_opposing(scenario, agent)? {
        let ours = values::satset(&context.play(&opposing.with(own.clone()))?, &scenario.values);
        let theirs = values::satset(
            &context.play(&opposing.with(alternative.clone()))?,
            &scenario.values,
        );
        let gain = ours.difference(&theirs);
        if values::strictly_less(&empty, &gain, &scenario.values)
            && values::leq(&loss, &gain, &scenario.values)
        {
            return Ok(Some(Excuse { kind: ExcuseKind::Strong, witness: opposing }));
        }
    }
    Ok(None)
}

/// Worst responsibility of the given kind that `strategy` can anticipate
/// over every opposing joint strategy, with one witness. Ties are broken
/// by enumeration order (opponents outermost, accusations innermost).
pub fn anticipate(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
    kind: ResponsibilityKind,
) -> Result<Anticipated, ResponsibilityError> {
    let candidates = anticipation_candidates(scenario, agent, strategy, kind)?;
    Ok(pick_worst(candidates))
}

/// Every candidate tied for the anticipated class, in enumeration order.
pub fn anticipate_witnesses(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
    kind: ResponsibilityKind,
) -> Result<Vec<Anticipated>, ResponsibilityError> {
    let candidates = anticipation_candidates(scenario, agent, strategy, kind)?;
    let worst = pick_worst(candidates.clone());
    Ok(candidates.into_iter().filter(|c| c.score == worst.score).collect())
}

fn anticipation_candidates(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
    kind: ResponsibilityKind,
) -> Result<Vec<Anticipated>, ResponsibilityError> {
    owned_by(strategy, agent)?;
    let table = OutcomeTable::build(scenario, agent)?;
    let row = table.row_for(strategy)?;
    let empty = OutcomeSet::empty();
    // A weak excuse against accusation `a` does not depend on the
    // opposing joint strategy actually faced, only on the pair of rows.
    let has_excuse: Vec<bool> = (0..table.own.len())
        .map(|a| {
            (0..table.opposing.len())
                .any(|o| values::strictly_less(table.satset(a, o), &row[o], &scenario.values))
        })
        .collect();

    let mut out = Vec::new();
    for (o, opposing) in table.opposing.iter().enumerate() {
        for (a, accusation) in table.own.iter().enumerate() {
            let outcome = row[o].difference(table.satset(a, o));
            let admitted = match kind {
                ResponsibilityKind::Passive => true,
                ResponsibilityKind::Inexcusable => {
                    !values::leq(&outcome, &empty, &scenario.values) || !has_excuse[a]
                }
            };
            if !admitted {
                continue;
            }
            let score = values::score_vector(&outcome, &scenario.values)
                .expect("attribution references its own base");
            out.push(Anticipated {
                kind,
                outcome,
                score,
                opponents: opposing.clone(),
                accusation: accusation.clone(),
            });
        }
    }
    Ok(out)
}

fn pick_worst(candidates: Vec<Anticipated>) -> Anticipated {
    let mut iter = candidates.into_iter();
    // The agent's own strategy always attributes the empty outcome, so
    // the candidate list is never empty.
    let mut worst = iter.next().expect("self-attribution is always present");
    for candidate in iter {
        if candidate.score < worst.score {
            worst = candidate;
        }
    }
    worst
}

/// All strategies whose anticipated responsibility of the given kind is
/// maximal under the preorder, in enumeration order.
pub fn responsibility_minimising_set(
    scenario: &Scenario,
    agent: AgentId,
    kind: ResponsibilityKind,
) -> Result<Vec<Strategy>, ResponsibilityError> {
    let table = OutcomeTable::build(scenario, agent)?;
    let empty = OutcomeSet::empty();
    let mut anticipated: Vec<ScoreVector> = Vec::with_capacity(table.own.len());
    for s in 0..table.own.len() {
        let has_excuse: Vec<bool> = (0..table.own.len())
            .map(|a| {
                (0..table.opposing.len()).any(|o| {
                    values::strictly_less(table.satset(a, o), table.satset(s, o), &scenario.values)
                })
            })
            .collect();
        let mut worst: Option<ScoreVector> = None;
        for o in 0..table.opposing.len() {
            for a in 0..table.own.len() {
                let outcome = table.satset(s, o).difference(table.satset(a, o));
                let admitted = match kind {
                    ResponsibilityKind::Passive => true,
                    ResponsibilityKind::Inexcusable => {
                        !values::leq(&outcome, &empty, &scenario.values) || !has_excuse[a]
                    }
                };
                if !admitted {
                    continue;
                }
                let score = values::score_vector(&outcome, &scenario.values)
                    .expect("attribution references its own base");
                if worst.as_ref().is_none_or(|w| score < *w) {
                    worst = Some(score);
                }
            }
        }
        anticipated.push(worst.expect("self-attribution is always present"));
    }
    let best = anticipated.iter().max().expect("at least one strategy").clone();
    Ok(table
        .own
        .iter()
        .zip(&anticipated)
        .filter(|(_, score)| **score == best)
        .map(|(s, _)| s.clone())
        .collect())
}

/// Strategies minimising both passive and inexcusable responsibility:
/// the intersection of the two minimising sets, which is never empty.
pub fn recommend(scenario: &Scenario, agent: AgentId) -> Result<Vec<Strategy>, ResponsibilityError> {
    let passive = responsibility_minimising_set(scenario, agent, ResponsibilityKind::Passive)?;
    let inexcusable =
        responsibility_minimising_set(scenario, agent, ResponsibilityKind::Inexcusable)?;
    Ok(passive.into_iter().filter(|s| inexcusable.contains(s)).collect())
}

/// The union, over every opposing joint strategy, of the single values
/// the agent could be blamed for violating. This reproduces the
/// over-approximation that motivates taking worst single-history sets
/// instead; it is a diagnostic, not a supported notion of anticipation.
pub fn naive_union_diagnostic(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
) -> Result<OutcomeSet, ResponsibilityError> {
    owned_by(strategy, agent)?;
    let table = OutcomeTable::build(scenario, agent)?;
    let row = table.row_for(strategy)?;
    let mut out = OutcomeSet::empty();
    for o in 0..table.opposing.len() {
        for violated in row[o].violated() {
            let satisfied = crate::values::SignedValue::satisfied(violated.value);
            let preventable =
                (0..table.own.len()).any(|a| table.satset(a, o).contains(&satisfied));
            if preventable {
                out.insert(*violated).expect("only violated signs are inserted");
            }
        }
    }
    Ok(out)
}

/// Comparison of `strategy` against one rival: each side's worst-case
/// regret relative to the other. Feeds the narrative explanation output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RivalComparison {
    pub rival: Strategy,
    /// Worst regret of the strategy relative to the rival, with witness.
    pub own_regret: OutcomeSet,
    pub own_score: ScoreVector,
    pub own_witness: JointStrategy,
    /// Worst regret of the rival relative to the strategy, with witness.
    pub rival_regret: OutcomeSet,
    pub rival_score: ScoreVector,
    pub rival_witness: JointStrategy,
    /// Whether the rival weakly dominates the strategy, and vice versa.
    pub rival_dominates: bool,
    pub dominates_rival: bool,
}

/// Pairwise worst-case regret of `strategy` against every other strategy
/// of the agent, in enumeration order.
pub fn rival_comparisons(
    scenario: &Scenario,
    agent: AgentId,
    strategy: &Strategy,
) -> Result<Vec<RivalComparison>, ResponsibilityError> {
    owned_by(strategy, agent)?;
    let table = OutcomeTable::build(scenario, agent)?;
    let row = table.row_for(strategy)?;
    let row_scores: Vec<ScoreVector> = row
        .iter()
        .map(|s| values::score_vector(s, &scenario.values).expect("satset scores"))
        .collect();
    let mut out = Vec::new();
    for (r, rival) in table.own.iter().enumerate() {
        if rival == strategy {
            continue;
        }
        let mut own_best: Option<(OutcomeSet, ScoreVector, usize)> = None;
        let mut rival_best: Option<(OutcomeSet, ScoreVector, usize)> = None;
        for o in 0..table.opposing.len() {
            let ours = row[o].difference(table.satset(r, o));
            let ours_score = values::score_vector(&ours, &scenario.values)
                .expect("regret references its own base");
            if own_best.as_ref().is_none_or(|(_, s, _)| ours_score < *s) {
                own_best = Some((ours, ours_score, o));
            }
            let theirs = table.satset(r, o).difference(&row[o]);
            let theirs_score = values::score_vector(&theirs, &scenario.values)
                .expect("regret references its own base");
            if rival_best.as_ref().is_none_or(|(_, s, _)| theirs_score < *s) {
                rival_best = Some((theirs, theirs_score, o));
            }
        }
        let (own_regret, own_score, own_o) = own_best.expect("non-empty opposition");
        let (rival_regret, rival_score, rival_o) = rival_best.expect("non-empty opposition");
        let rival_dominates =
            (0..table.opposing.len()).all(|o| row_scores[o] <= *table.score(r, o));
        let dominates_rival =
            (0..table.opposing.len()).all(|o| *table.score(r, o) <= row_scores[o]);
        out.push(RivalComparison {
            rival: rival.clone(),
            own_regret,
            own_score,
            own_witness: table.opposing[own_o].clone(),
            rival_regret,
            rival_score,
            rival_witness: table.opposing[rival_o].clone(),
            rival_dominates,
            dominates_rival,
        });
    }
    Ok(out)
}
