//! Randomized brute-force re-verification of the library's analyses.
//!
//! The checker generates small random scenarios, plays every joint
//! strategy, and recomputes dominance, regret, excuses, attributions,
//! liability, anticipation and the minimising sets directly from plays,
//! satisfaction sets and set differences. It never calls the analysis
//! functions it validates for its own side of a comparison, and it uses
//! its own two-clause implementation of the preference comparison. On top
//! of the library-vs-checker agreement claims it verifies the structural
//! facts the analyses rely on: consistency and completeness of
//! attributions, excuse acceptance, the liability equivalence, the
//! anticipation floor, the equality of the minimising sets with the
//! regret-minimising and non-dominated sets, the non-empty overlap, and
//! the set-difference order preservation with its score identity.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ltlf::{holds, Formula};
use crate::responsibility::{self, ResponsibilityKind};
use crate::scenario::{canonical_toml, scenario_to_doc, LoadError};
use crate::strategy::{self, JointStrategy, Strategy};
use crate::system::{
    ActionId, AgentId, History, ModelError, PlayContext, Scenario, State, TransitionRule,
    TransitionSystem,
};
use crate::values::{satset, OutcomeSet, SignedValue, ValueBase, ValueRef};

/// Size limits for generated instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceCaps {
    pub max_agents: usize,
    pub max_propositions: usize,
    pub max_actions: usize,
    pub max_horizon: usize,
    pub max_formula_depth: usize,
    pub max_levels: usize,
    pub max_values_per_level: usize,
    /// Per-agent strategy-count ceiling generated instances must respect.
    pub strategy_ceiling: u64,
    /// Draw value formulas as raw random trees instead of from the
    /// template pool.
    pub pure_random: bool,
}

impl Default for InstanceCaps {
    fn default() -> Self {
        InstanceCaps {
            max_agents: 2,
            max_propositions: 3,
            max_actions: 2,
            max_horizon: 2,
            max_formula_depth: 2,
            max_levels: 2,
            max_values_per_level: 2,
            strategy_ceiling: 1_000_000,
            pure_random: false,
        }
    }
}

impl InstanceCaps {
    fn validate(&self) -> Result<(), OracleError> {
        let positive = [
            self.max_agents,
            self.max_propositions,
            self.max_actions,
            self.max_horizon,
            self.max_formula_depth,
            self.max_levels,
            self.max_values_per_level,
        ];
        if positive.contains(&0) || self.strategy_ceiling == 0 {
            return Err(OracleError::BadCaps);
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("every cap must be positive")]
    BadCaps,
    #[error("cannot satisfy the caps: {reason}")]
    Unsatisfiable { reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Load(#[from] LoadError),
}

/// Verdict for one named claim over a whole instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimResult {
    pub name: &'static str,
    pub passed: bool,
    /// First failure found, when any.
    pub detail: String,
}

/// A failed claim together with the instance that produced it, serialized
/// in the scenario file format so the run can be replayed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub claim: String,
    pub detail: String,
    pub scenario_toml: String,
}

/// Outcome of checking one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub seed: Option<u64>,
    pub descriptor: String,
    pub claims: Vec<ClaimResult>,
    /// Non-fatal observations, e.g. where the liability equivalence and
    /// the artifact's vacuous-inclusion reading diverge.
    pub findings: Vec<String>,
    pub counterexample: Option<Counterexample>,
    /// Set when the instance was skipped instead of checked.
    pub skipped: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

/// Aggregate over a batch of seeded instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub base_seed: u64,
    pub instances: Vec<CheckReport>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(CheckReport::passed)
    }

    pub fn failures(&self) -> usize {
        self.instances.iter().filter(|r| !r.passed()).count()
    }

    /// Deterministic text rendering, identical across repeated runs with
    /// the same inputs.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "fuzz: {} instances from base seed {}", self.instances.len(), self.base_seed);
        for report in &self.instances {
            let seed = report.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
            if let Some(reason) = &report.skipped {
                let _ = writeln!(out, "seed {seed}: SKIPPED ({reason})");
                continue;
            }
            let verdict = if report.passed() { "pass" } else { "FAIL" };
            let _ = writeln!(
                out,
                "seed {seed}: {verdict} ({} claims, {} findings) [{}]",
                report.claims.len(),
                report.findings.len(),
                report.descriptor
            );
            for claim in report.claims.iter().filter(|c| !c.passed) {
                let _ = writeln!(out, "  claim {}: {}", claim.name, claim.detail);
            }
            for finding in &report.findings {
                let _ = writeln!(out, "  finding: {finding}");
            }
        }
        let _ = writeln!(
            out,
            "result: {}/{} passed",
            self.instances.len() - self.failures(),
            self.instances.len()
        );
        out
    }
}

/// Generates a random valid scenario, deterministic in `seed`.
pub fn random_scenario(seed: u64, caps: &InstanceCaps) -> Result<Scenario, OracleError> {
    caps.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n_agents = rng.gen_range(1..=caps.max_agents);
    let n_props = rng.gen_range(1..=caps.max_propositions);
    let mut n_actions = rng.gen_range(1..=caps.max_actions);
    let mut horizon = rng.gen_range(1..=caps.max_horizon);

    // shrink until the per-agent strategy count respects the ceiling
    loop {
        match strategy_count(n_agents, n_actions, horizon) {
            Some(count) if count <= caps.strategy_ceiling => break,
            _ if horizon > 1 => horizon -= 1,
            _ if n_actions > 1 => n_actions -= 1,
            _ => {
                return Err(OracleError::Unsatisfiable {
                    reason: format!(
                        "ceiling {} admits no instance with {} agents",
                        caps.strategy_ceiling, n_agents
                    ),
                });
            }
        }
    }

    let propositions: Vec<String> = (1..=n_props).map(|i| format!("p{i}")).collect();
    let agents: Vec<String> = (1..=n_agents).map(|i| format!("a{i}")).collect();
    let actions: Vec<String> = (1..=n_actions).map(|i| format!("m{i}")).collect();
    let availability: Vec<Vec<ActionId>> =
        vec![(0..n_actions).map(ActionId).collect(); n_agents];

    let random_state = |rng: &mut ChaCha8Rng| -> State {
        let mask: u32 = rng.gen_range(0..(1u32 << n_props));
        State::from_props(
            propositions
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| p.clone()),
        )
    };

    // full transition table: every state against every joint action
    let mut rules = Vec::new();
    let mut joint = vec![0usize; n_agents];
    for state_mask in 0..(1u32 << n_props) {
        let from = State::from_props(
            propositions
                .iter()
                .enumerate()
                .filter(|(i, _)| state_mask & (1 << i) != 0)
                .map(|(_, p)| p.clone()),
        );
        joint.iter_mut().for_each(|j| *j = 0);
        loop {
            rules.push(TransitionRule {
                from: Some(from.clone()),
                when: joint.iter().map(|&j| Some(ActionId(j))).collect(),
                to: random_state(&mut rng),
            });
            if !advance(&mut joint, n_actions) {
                break;
            }
        }
    }

    let start = random_state(&mut rng);

    let n_levels = rng.gen_range(1..=caps.max_levels);
    let mut levels = Vec::with_capacity(n_levels);
    let mut used: Vec<Formula> = Vec::new();
    let mut value_index = 0;
    for _ in 0..n_levels {
        let n_values = rng.gen_range(1..=caps.max_values_per_level);
        let mut level = Vec::with_capacity(n_values);
        for _ in 0..n_values {
            value_index += 1;
            let mut formula = random_value_formula(&mut rng, &propositions, caps);
            // avoid syntactic duplicates when the pool allows it
            for _ in 0..20 {
                if !used.contains(&formula.normalize()) {
                    break;
                }
                formula = random_value_formula(&mut rng, &propositions, caps);
            }
            used.push(formula.normalize());
            level.push((format!("w{value_index}"), formula));
        }
        levels.push(level);
    }
    let values = ValueBase::new(levels).expect("generated levels are non-empty and uniquely named");

    let system = TransitionSystem { propositions, agents, actions, availability, rules };
    Ok(Scenario::new(system, start, horizon, values, caps.strategy_ceiling)?)
}

fn strategy_count(n_agents: usize, n_actions: usize, horizon: usize) -> Option<u64> {
    let branching = (n_actions as u64).checked_pow(n_agents.saturating_sub(1) as u32)?;
    let mut nodes: u64 = 0;
    let mut width: u64 = 1;
    for _ in 0..horizon {
        nodes = nodes.checked_add(width)?;
        width = width.checked_mul(branching)?;
    }
    let mut count: u64 = 1;
    for _ in 0..nodes {
        count = count.checked_mul(n_actions as u64)?;
        if count > 1_000_000_000 {
            return None;
        }
    }
    Some(count)
}

fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn random_value_formula(rng: &mut ChaCha8Rng, props: &[String], caps: &InstanceCaps) -> Formula {
    if caps.pure_random {
        return random_tree(rng, props, caps.max_formula_depth);
    }
    let atom = |rng: &mut ChaCha8Rng| Formula::atom(props[rng.gen_range(0..props.len())].clone());
    // templates by minimum depth budget
    let depth = caps.max_formula_depth;
    let mut pool: Vec<u8> = vec![0, 1, 2, 3, 4, 5];
    if depth >= 3 {
        pool.extend([6, 7, 8, 9]);
    }
    match pool[rng.gen_range(0..pool.len())] {
        0 => atom(rng).eventually(),
        1 => atom(rng).henceforth(),
        2 => atom(rng).next(),
        3 => atom(rng).until(atom(rng)),
        4 => atom(rng).and(atom(rng)),
        5 => atom(rng).or(atom(rng)),
        6 => atom(rng).not().eventually(),
        7 => atom(rng).not().henceforth(),
        8 => atom(rng).not().until(atom(rng)),
        _ => atom(rng).and(atom(rng)).eventually(),
    }
}

fn random_tree(rng: &mut ChaCha8Rng, props: &[String], budget: usize) -> Formula {
    let atom = Formula::atom(props[rng.gen_range(0..props.len())].clone());
    if budget <= 1 {
        return atom;
    }
    match rng.gen_range(0..8u8) {
        0 => atom,
        1 => random_tree(rng, props, budget - 1).not(),
        2 => random_tree(rng, props, budget - 1).next(),
        3 => random_tree(rng, props, budget - 1).eventually(),
        4 => random_tree(rng, props, budget - 1).henceforth(),
        5 => random_tree(rng, props, budget - 1).and(random_tree(rng, props, budget - 1)),
        6 => random_tree(rng, props, budget - 1).or(random_tree(rng, props, budget - 1)),
        _ => random_tree(rng, props, budget - 1).until(random_tree(rng, props, budget - 1)),
    }
}

// Grid caps for a single instance check; instances beyond them are
// skipped rather than silently sampled.
const GRID_CAP: usize = 65_536;

/// Every play of the instance, indexed by one strategy index per agent.
struct Grid {
    counts: Vec<usize>,
    strides: Vec<usize>,
    own: Vec<Vec<Strategy>>,
    sats: Vec<OutcomeSet>,
    histories: Vec<History>,
}

impl Grid {
    fn build(scenario: &Scenario) -> Result<Grid, String> {
        let mut own = Vec::new();
        for agent in scenario.agent_ids() {
            own.push(
                strategy::enumerate_strategies(scenario, agent)
                    .map_err(|e| format!("enumeration: {e}"))?,
            );
        }
        let counts: Vec<usize> = own.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        if total == 0 || total > GRID_CAP {
            return Err(format!("{total} joint strategies exceed the checking cap"));
        }
        let mut strides = vec![1usize; counts.len()];
        for i in (0..counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        let context = PlayContext::new(scenario).map_err(|e| format!("plays: {e}"))?;
        let mut sats = Vec::with_capacity(total);
        let mut histories = Vec::with_capacity(total);
        let mut tuple = vec![0usize; counts.len()];
        loop {
            let joint = JointStrategy::new(
                tuple.iter().enumerate().map(|(i, &s)| own[i][s].clone()).collect(),
            );
            let history = context.play(&joint).map_err(|e| format!("plays: {e}"))?;
            sats.push(satset(&history, &scenario.values));
            histories.push(history);
            if !advance_mixed(&mut tuple, &counts) {
                break;
            }
        }
        Ok(Grid { counts, strides, own, sats, histories })
    }

    fn flat(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(&self.strides).map(|(t, s)| t * s).sum()
    }

    fn sat(&self, tuple: &[usize]) -> &OutcomeSet {
        &self.sats[self.flat(tuple)]
    }

    fn history(&self, tuple: &[usize]) -> &History {
        &self.histories[self.flat(tuple)]
    }

    fn joint(&self, tuple: &[usize]) -> JointStrategy {
        JointStrategy::new(
            tuple.iter().enumerate().map(|(i, &s)| self.own[i][s].clone()).collect(),
        )
    }

    fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut tuple = vec![0usize; self.counts.len()];
        loop {
            out.push(tuple.clone());
            if !advance_mixed(&mut tuple, &self.counts) {
                break;
            }
        }
        out
    }

    /// Tuples ranging over every agent except `agent`, whose slot is 0
    /// and must be substituted before use.
    fn opposing_tuples(&self, agent: usize) -> Vec<Vec<usize>> {
        let mut capped = self.counts.clone();
        capped[agent] = 1;
        let mut out = Vec::new();
        let mut tuple = vec![0usize; capped.len()];
        loop {
            out.push(tuple.clone());
            if !advance_mixed(&mut tuple, &capped) {
                break;
            }
        }
        out
    }
}

fn advance_mixed(tuple: &mut [usize], counts: &[usize]) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < counts[i] {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

fn with(tuple: &[usize], agent: usize, value: usize) -> Vec<usize> {
    let mut out = tuple.to_vec();
    out[agent] = value;
    out
}

// The checker's own comparison, written from the two comparison clauses:
// some level strictly decides with all earlier levels equal, or every
// level is equal.
fn clause_scores(set: &OutcomeSet, base: &ValueBase) -> Vec<i64> {
    (0..base.level_count())
        .map(|level| {
            let mut score = 0i64;
            for index in 0..base.level(level).len() {
                let value = ValueRef { level, index };
                if set.contains(&SignedValue::satisfied(value)) {
                    score += 1;
                }
                if set.contains(&SignedValue::violated(value)) {
                    score -= 1;
                }
            }
            score
        })
        .collect()
}

fn clauses_leq(x: &OutcomeSet, y: &OutcomeSet, base: &ValueBase) -> bool {
    let sx = clause_scores(x, base);
    let sy = clause_scores(y, base);
    for n in 0..sx.len() {
        if sx[n] != sy[n] {
            return sx[n] < sy[n];
        }
    }
    true
}

fn clauses_lt(x: &OutcomeSet, y: &OutcomeSet, base: &ValueBase) -> bool {
    clauses_leq(x, y, base) && !clauses_leq(y, x, base)
}

/// Claim accumulator: a claim passes for the instance iff every one of
/// its sub-checks passed; the first failing detail is kept.
struct Claims {
    list: Vec<ClaimResult>,
}

impl Claims {
    fn new() -> Self {
        Claims { list: Vec::new() }
    }

    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        match self.list.iter_mut().find(|c| c.name == name) {
            Some(existing) => {
                if !ok && existing.passed {
                    existing.passed = false;
                    existing.detail = detail();
                }
            }
            None => self.list.push(ClaimResult {
                name,
                passed: ok,
                detail: if ok { String::new() } else { detail() },
            }),
        }
    }
}

/// Exhaustively checks one instance. See the module docs for the claim
/// list; a failed claim carries a replayable counterexample.
pub fn check_instance(scenario: &Scenario) -> CheckReport {
    check_instance_with_seed(scenario, None)
}

fn check_instance_with_seed(scenario: &Scenario, seed: Option<u64>) -> CheckReport {
    let base = &scenario.values;
    let descriptor = describe(scenario);

    let grid = match Grid::build(scenario) {
        Ok(grid) => grid,
        Err(reason) => {
            return CheckReport {
                seed,
                descriptor,
                claims: Vec::new(),
                findings: Vec::new(),
                counterexample: None,
                skipped: Some(reason),
            };
        }
    };

    let mut claims = Claims::new();
    let mut findings = Vec::new();
    let empty = OutcomeSet::empty();
    let n = grid.counts.len();
    let value_refs: Vec<ValueRef> = base.iter_refs().map(|(r, _)| r).collect();
    let all_tuples = grid.tuples();

    // oracle dominance per agent: dom[i][s][c] = s never beats c
    let mut dominance: Vec<Vec<Vec<bool>>> = Vec::with_capacity(n);
    for i in 0..n {
        let opposing = grid.opposing_tuples(i);
        let count = grid.counts[i];
        let mut dom = vec![vec![true; count]; count];
        for s in 0..count {
            for c in 0..count {
                dom[s][c] = opposing.iter().all(|o| {
                    clauses_leq(grid.sat(&with(o, i, s)), grid.sat(&with(o, i, c)), base)
                });
            }
        }
        dominance.push(dom);
    }

    for i in 0..n {
        let agent = AgentId(i);
        let opposing = grid.opposing_tuples(i);
        let count = grid.counts[i];

        // has_excuse[s][c]: some opposing choice makes s strictly beat c.
        // Computed from the excuse definition itself, not as the
        // complement of dominance; their complementarity is part of what
        // the liability equivalence tests.
        let has_excuse: Vec<Vec<bool>> = (0..count)
            .map(|s| {
                (0..count)
                    .map(|c| {
                        opposing.iter().any(|o| {
                            clauses_lt(grid.sat(&with(o, i, c)), grid.sat(&with(o, i, s)), base)
                        })
                    })
                    .collect()
            })
            .collect();

        // ---- attribution claims over every joint strategy ----
        for tuple in &all_tuples {
            let actual_sat = grid.sat(tuple);
            let actual_history = grid.history(tuple);
            let joint = grid.joint(tuple);
            let own_index = tuple[i];

            let mut passive_set: BTreeSet<OutcomeSet> = BTreeSet::new();
            let mut inexcusable_set: BTreeSet<OutcomeSet> = BTreeSet::new();
            for a in 0..count {
                let counter_tuple = with(tuple, i, a);
                let counter_sat = grid.sat(&counter_tuple);
                let counter_history = grid.history(&counter_tuple);
                let attribution = actual_sat.difference(counter_sat);

                // consistency: the play realises every literal of the
                // attribution and the counterfactual play inverts it
                let consistent = attribution.iter().all(|signed| {
                    let value = &base.get(signed.value).expect("grid value").formula;
                    let on_actual = holds(value, actual_history);
                    let on_counter = holds(value, counter_history);
                    let expected = signed.sign == crate::values::Sign::Satisfied;
                    on_actual == expected && on_counter == !expected
                });
                claims.check("passive_consistency", consistent, || {
                    format!("agent {i}, joint {tuple:?}, alternative {a}")
                });

                // completeness: values outside the attribution agree on
                // both plays
                let complete = value_refs
                    .iter()
                    .filter(|r| {
                        !attribution.contains(&SignedValue::satisfied(**r))
                            && !attribution.contains(&SignedValue::violated(**r))
                    })
                    .all(|r| {
                        let value = &base.get(*r).expect("grid value").formula;
                        holds(value, actual_history) == holds(value, counter_history)
                    });
                claims.check("passive_completeness", complete, || {
                    format!("agent {i}, joint {tuple:?}, alternative {a}")
                });

                passive_set.insert(attribution.clone());
                let negative = clauses_leq(&attribution, &empty, base);
                if !negative || !has_excuse[own_index][a] {
                    inexcusable_set.insert(attribution);
                }
            }

            let library_passive = responsibility::passive_attributions(scenario, &joint, agent)
                .expect("library passive attribution");
            claims.check("library_passive_attributions", library_passive == passive_set, || {
                format!("agent {i}, joint {tuple:?}")
            });

            let library_inexcusable =
                responsibility::inexcusable_attributions(scenario, &joint, agent)
                    .expect("library inexcusable attribution");
            claims.check(
                "library_inexcusable_attributions",
                library_inexcusable == inexcusable_set,
                || format!("agent {i}, joint {tuple:?}"),
            );

            // ---- excuse claims ----
            for a in 0..count {
                let attribution = actual_sat.difference(grid.sat(&with(tuple, i, a)));
                if !clauses_leq(&attribution, &empty, base) {
                    continue;
                }
                let weak = has_excuse[own_index][a];
                // strong excuse: gains strictly positive and at least the
                // accusation's margin
                let loss = grid.sat(&with(tuple, i, a)).difference(actual_sat);
                let strong = opposing.iter().any(|o| {
                    let ours = grid.sat(&with(o, i, own_index));
                    let theirs = grid.sat(&with(o, i, a));
                    let gain = ours.difference(theirs);
                    clauses_lt(&empty, &gain, base) && clauses_leq(&loss, &gain, base)
                });
                claims.check("strong_excuse_implies_weak", !strong || weak, || {
                    format!("agent {i}, joint {tuple:?}, alternative {a}")
                });

                let library_weak =
                    responsibility::weak_excuse(scenario, &joint, agent, &grid.own[i][a])
                        .expect("library weak excuse")
                        .is_some();
                let library_strong =
                    responsibility::strong_excuse(scenario, &joint, agent, &grid.own[i][a])
                        .expect("library strong excuse")
                        .is_some();
                claims.check(
                    "library_excuses",
                    library_weak == weak && library_strong == strong,
                    || format!("agent {i}, joint {tuple:?}, alternative {a}"),
                );
            }

            // ---- accusations, liability and its equivalence ----
            for value in &value_refs {
                let named = base.get(*value).expect("grid value");
                let satisfied = actual_sat.contains(&SignedValue::satisfied(*value));
                let query =
                    if satisfied { named.formula.clone() } else { named.formula.clone().not() };
                let target_sign = if satisfied {
                    SignedValue::violated(*value)
                } else {
                    SignedValue::satisfied(*value)
                };
                let oracle_accusers: BTreeSet<usize> = (0..count)
                    .filter(|&a| grid.sat(&with(tuple, i, a)).contains(&target_sign))
                    .collect();
                let library_accusers: BTreeSet<usize> =
                    responsibility::accusations(scenario, &joint, agent, &query)
                        .expect("library accusations")
                        .iter()
                        .map(|s| {
                            grid.own[i].iter().position(|x| x == s).expect("enumerated accuser")
                        })
                        .collect();
                claims.check("library_accusations", library_accusers == oracle_accusers, || {
                    format!("agent {i}, joint {tuple:?}, value {}", named.name)
                });

                // liability of the agent for the violation of the value
                if !satisfied {
                    let oracle_liable = (0..count).any(|a| {
                        grid.sat(&with(tuple, i, a)).contains(&SignedValue::satisfied(*value))
                            && dominance[i][own_index][a]
                    });
                    // inexcusable membership in the defined-range reading
                    let defined_range_member = (0..count).any(|a| {
                        let x = actual_sat.difference(grid.sat(&with(tuple, i, a)));
                        x.contains(&SignedValue::violated(*value)) && !has_excuse[own_index][a]
                    });
                    claims.check(
                        "liability_equivalence",
                        oracle_liable == defined_range_member,
                        || format!("agent {i}, joint {tuple:?}, value {}", named.name),
                    );

                    let library_liable =
                        responsibility::liable(scenario, &joint, agent, &query)
                            .expect("library liability")
                            .is_some();
                    claims.check("library_liability", library_liable == oracle_liable, || {
                        format!("agent {i}, joint {tuple:?}, value {}", named.name)
                    });

                    // the artifact admits vacuously-inexcusable positive
                    // sets; where that membership diverges from liability
                    // it is reported, not failed
                    let artifact_member = (0..count).any(|a| {
                        let x = actual_sat.difference(grid.sat(&with(tuple, i, a)));
                        if !x.contains(&SignedValue::violated(*value)) {
                            return false;
                        }
                        let negative = clauses_leq(&x, &empty, base);
                        !negative || !has_excuse[own_index][a]
                    });
                    if artifact_member != oracle_liable {
                        findings.push(format!(
                            "liability and vacuous-inclusion membership diverge for agent {i}, joint {tuple:?}, value {}",
                            named.name
                        ));
                    }
                }
            }
        }

        // ---- anticipation, minimisation, dominance sets ----
        let worst_class = |s: usize, kind: ResponsibilityKind| -> Vec<i64> {
            let mut worst: Option<Vec<i64>> = None;
            for o in &opposing {
                for a in 0..count {
                    let x = grid.sat(&with(o, i, s)).difference(grid.sat(&with(o, i, a)));
                    if kind == ResponsibilityKind::Inexcusable {
                        let negative = clauses_leq(&x, &empty, base);
                        if negative && has_excuse[s][a] {
                            continue;
                        }
                    }
                    let score = clause_scores(&x, base);
                    if worst.as_ref().is_none_or(|w| score < *w) {
                        worst = Some(score);
                    }
                }
            }
            worst.expect("self-attribution is always admitted")
        };

        let empty_score = clause_scores(&empty, base);
        let mut passive_worst = Vec::with_capacity(count);
        let mut inexcusable_worst = Vec::with_capacity(count);
        for s in 0..count {
            let passive = worst_class(s, ResponsibilityKind::Passive);
            let inexcusable = worst_class(s, ResponsibilityKind::Inexcusable);
            claims.check(
                "anticipation_floor",
                passive <= empty_score && inexcusable <= empty_score,
                || format!("agent {i}, strategy {s}"),
            );

            let library_passive = responsibility::anticipate(
                scenario,
                agent,
                &grid.own[i][s],
                ResponsibilityKind::Passive,
            )
            .expect("library anticipation");
            let library_inexcusable = responsibility::anticipate(
                scenario,
                agent,
                &grid.own[i][s],
                ResponsibilityKind::Inexcusable,
            )
            .expect("library anticipation");
            let library_regret =
                strategy::anticipated_regret(scenario, agent, &grid.own[i][s])
                    .expect("library regret");
            claims.check(
                "library_anticipation",
                library_passive.score.0 == passive
                    && library_inexcusable.score.0 == inexcusable
                    && library_regret.score.0 == passive,
                || format!("agent {i}, strategy {s}"),
            );

            passive_worst.push(passive);
            inexcusable_worst.push(inexcusable);
        }

        let argmax = |scores: &[Vec<i64>]| -> BTreeSet<usize> {
            let best = scores.iter().max().expect("non-empty").clone();
            scores
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == best)
                .map(|(idx, _)| idx)
                .collect()
        };
        let passive_min = argmax(&passive_worst);
        let inexcusable_min = argmax(&inexcusable_worst);
        let non_dominated: BTreeSet<usize> = (0..count)
            .filter(|&s| !(0..count).any(|c| dominance[i][s][c] && !dominance[i][c][s]))
            .collect();

        claims.check(
            "passive_min_equals_regret_min",
            passive_min
                == to_indices(
                    &strategy::regret_minimising_set(scenario, agent).expect("library regret set"),
                    &grid.own[i],
                )
                && passive_min
                    == to_indices(
                        &responsibility::responsibility_minimising_set(
                            scenario,
                            agent,
                            ResponsibilityKind::Passive,
                        )
                        .expect("library passive set"),
                        &grid.own[i],
                    ),
            || format!("agent {i}"),
        );
        claims.check(
            "inexcusable_min_equals_non_dominated",
            inexcusable_min == non_dominated
                && inexcusable_min
                    == to_indices(
                        &responsibility::responsibility_minimising_set(
                            scenario,
                            agent,
                            ResponsibilityKind::Inexcusable,
                        )
                        .expect("library inexcusable set"),
                        &grid.own[i],
                    )
                && non_dominated
                    == to_indices(
                        &strategy::non_dominated_set(scenario, agent)
                            .expect("library non-dominated set"),
                        &grid.own[i],
                    ),
            || format!("agent {i}"),
        );

        let overlap: BTreeSet<usize> =
            passive_min.intersection(&inexcusable_min).copied().collect();
        claims.check("recommendation_nonempty", !overlap.is_empty(), || {
            format!("agent {i}")
        });
        claims.check(
            "library_recommendation",
            overlap
                == to_indices(
                    &responsibility::recommend(scenario, agent).expect("library recommendation"),
                    &grid.own[i],
                ),
            || format!("agent {i}"),
        );

        // library dominance agrees pairwise
        let library_dominance_ok = (0..count).all(|s| {
            (0..count).all(|c| {
                strategy::weakly_dominates(scenario, agent, &grid.own[i][s], &grid.own[i][c])
                    .expect("library dominance")
                    == dominance[i][s][c]
            })
        });
        claims.check("library_dominance", library_dominance_ok, || format!("agent {i}"));

        // naive union agrees with the single-value reading
        for s in 0..count {
            let mut union = OutcomeSet::empty();
            for o in &opposing {
                let sat_here = grid.sat(&with(o, i, s));
                for value in &value_refs {
                    let violated = SignedValue::violated(*value);
                    if sat_here.contains(&violated)
                        && (0..count).any(|a| {
                            grid.sat(&with(o, i, a)).contains(&SignedValue::satisfied(*value))
                        })
                    {
                        let _ = union.insert(violated);
                    }
                }
            }
            let library_union =
                responsibility::naive_union_diagnostic(scenario, agent, &grid.own[i][s])
                    .expect("library naive union");
            claims.check("library_naive_union", library_union == union, || {
                format!("agent {i}, strategy {s}")
            });
        }

        // strong-excuse preference diagnostic: `c` is forced-preferred to
        // `s` when some context attributes a strictly negative outcome to
        // `s` via `c` and no strong excuse vindicates `s`. This relation
        // can be cyclic; cycles are reported, they fail nothing.
        let mut forced = vec![vec![false; count]; count];
        for s in 0..count {
            for c in 0..count {
                if s == c {
                    continue;
                }
                forced[s][c] = opposing.iter().any(|o| {
                    let x = grid.sat(&with(o, i, s)).difference(grid.sat(&with(o, i, c)));
                    if !clauses_lt(&x, &empty, base) {
                        return false;
                    }
                    let loss = grid.sat(&with(o, i, c)).difference(grid.sat(&with(o, i, s)));
                    let strong = opposing.iter().any(|o2| {
                        let gain = grid
                            .sat(&with(o2, i, s))
                            .difference(grid.sat(&with(o2, i, c)));
                        clauses_lt(&empty, &gain, base) && clauses_leq(&loss, &gain, base)
                    });
                    !strong
                });
            }
        }
        if let Some(cycle) = find_cycle(&forced) {
            let path: Vec<String> = cycle.iter().map(|s| format!("#{s}")).collect();
            findings.push(format!(
                "strong-excuse preference cycle for agent {i}: {}",
                path.join(" -> ")
            ));
        }

        // single-agent reduction: dominance, regret and outcome order all
        // collapse to the satset ranking
        if n == 1 {
            let best_outcome: BTreeSet<usize> = {
                let scores: Vec<Vec<i64>> = (0..count)
                    .map(|s| clause_scores(grid.sat(&with(&[0], 0, s)), base))
                    .collect();
                argmax(&scores)
            };
            claims.check(
                "single_agent_reduction",
                best_outcome == non_dominated && best_outcome == passive_min,
                || "single-agent collapse".to_string(),
            );
        }
    }

    // ---- order claims over the satsets realised by the instance ----
    let mut distinct: Vec<OutcomeSet> = Vec::new();
    for sat in &grid.sats {
        if !distinct.contains(sat) {
            distinct.push(sat.clone());
        }
    }
    for x in &distinct {
        for y in &distinct {
            claims.check(
                "order_agreement",
                clauses_leq(x, y, base) == crate::values::leq(x, y, base),
                || format!("sets {x:?} vs {y:?}"),
            );
            for z in &distinct {
                let direct = clauses_leq(x, y, base);
                let differenced = clauses_leq(&x.difference(z), &y.difference(z), base);
                claims.check("difference_order_preservation", direct == differenced, || {
                    format!("sets {x:?}, {y:?} minus {z:?}")
                });
            }
        }
    }
    for x in &distinct {
        for z in &distinct {
            let lhs = clause_scores(&x.difference(z), base);
            let sx = clause_scores(x, base);
            let sz = clause_scores(z, base);
            let identity =
                (0..lhs.len()).all(|level| 2 * lhs[level] == sx[level] - sz[level]);
            claims.check("difference_score_identity", identity, || {
                format!("sets {x:?} minus {z:?}")
            });
        }
    }

    let counterexample = claims.list.iter().find(|c| !c.passed).map(|c| Counterexample {
        claim: c.name.to_string(),
        detail: c.detail.clone(),
        scenario_toml: canonical_toml(&scenario_to_doc(scenario, "counterexample", &[])),
    });

    CheckReport {
        seed,
        descriptor,
        claims: claims.list,
        findings,
        counterexample,
        skipped: None,
    }
}

/// First directed cycle of the relation, as the node path from the cycle
/// entry back to itself; deterministic depth-first order.
fn find_cycle(edges: &[Vec<bool>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let n = edges.len();
    let mut marks = vec![Mark::White; n];
    let mut stack: Vec<usize> = Vec::new();

    fn visit(
        node: usize,
        edges: &[Vec<bool>],
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        marks[node] = Mark::Gray;
        stack.push(node);
        for next in 0..edges.len() {
            if !edges[node][next] {
                continue;
            }
            match marks[next] {
                Mark::Gray => {
                    let entry = stack.iter().position(|&s| s == next).expect("gray on stack");
                    let mut cycle: Vec<usize> = stack[entry..].to_vec();
                    cycle.push(next);
                    return Some(cycle);
                }
                Mark::White => {
                    if let Some(cycle) = visit(next, edges, marks, stack) {
                        return Some(cycle);
                    }
                }
                Mark::Black => {}
            }
        }
        stack.pop();
        marks[node] = Mark::Black;
        None
    }

    for start in 0..n {
        if marks[start] == Mark::White {
            if let Some(cycle) = visit(start, edges, &mut marks, &mut stack) {
                return Some(cycle);
            }
        }
    }
    None
}

fn to_indices(strategies: &[Strategy], own: &[Strategy]) -> BTreeSet<usize> {
    strategies
        .iter()
        .map(|s| own.iter().position(|x| x == s).expect("strategy from the enumeration"))
        .collect()
}

fn describe(scenario: &Scenario) -> String {
    let counts: Vec<String> = scenario
        .agent_ids()
        .map(|a| {
            scenario
                .decision_space(a)
                .map(|s| s.strategy_count().to_string())
                .unwrap_or_else(|_| "?".into())
        })
        .collect();
    format!(
        "agents={} props={} actions={} horizon={} levels={} values={} strategies=[{}]",
        scenario.system.agents.len(),
        scenario.system.propositions.len(),
        scenario.system.actions.len(),
        scenario.horizon,
        scenario.values.level_count(),
        scenario.values.value_count(),
        counts.join(",")
    )
}

/// Generates and checks one seeded instance.
pub fn check_seeded(seed: u64, caps: &InstanceCaps) -> Result<CheckReport, OracleError> {
    let scenario = random_scenario(seed, caps)?;
    Ok(check_instance_with_seed(&scenario, Some(seed)))
}

/// Runs `count` seeded instances starting at `base_seed`. With `jobs > 1`
/// the instances run on a local thread pool; reports are merged in seed
/// order either way.
pub fn fuzz(
    count: usize,
    caps: &InstanceCaps,
    base_seed: u64,
    jobs: usize,
) -> Result<FuzzReport, OracleError> {
    caps.validate()?;
    let seeds: Vec<u64> = (0..count).map(|i| base_seed.wrapping_add(i as u64)).collect();
    let instances: Vec<CheckReport> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            seeds
                .par_iter()
                .map(|&seed| check_seeded(seed, caps))
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        seeds
            .iter()
            .map(|&seed| check_seeded(seed, caps))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(FuzzReport { base_seed, instances })
}

/// Reloads a counterexample's scenario and re-runs the checker on it.
pub fn replay(counterexample: &Counterexample) -> Result<CheckReport, OracleError> {
    let loaded = crate::scenario::load_str(&counterexample.scenario_toml)?;
    Ok(check_instance(&loaded.scenario))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{coordination_table, cyclic_table};

    #[test]
    fn same_seed_gives_identical_scenarios() {
        let caps = InstanceCaps::default();
        let a = random_scenario(7, &caps).unwrap();
        let b = random_scenario(7, &caps).unwrap();
        assert_eq!(a, b);
        let c = random_scenario(8, &caps).unwrap();
        assert_ne!(a, c, "different seeds should differ in general");
    }

    #[test]
    fn generated_strategy_counts_respect_structure() {
        // 2 agents, 2 actions, horizon 2: 3 decision nodes, 8 strategies.
        assert_eq!(strategy_count(2, 2, 2), Some(8));
        assert_eq!(strategy_count(3, 2, 2), Some(32));
        assert_eq!(strategy_count(1, 1, 5), Some(1));
    }

    #[test]
    fn single_action_instances_pass_trivially() {
        let caps = InstanceCaps { max_actions: 1, ..InstanceCaps::default() };
        let report = check_seeded(3, &caps).unwrap();
        assert!(report.passed(), "{:?}", report.claims);
    }

    #[test]
    fn fixture_grids_pass_all_claims() {
        for scenario in [coordination_table(), cyclic_table()] {
            let report = check_instance(&scenario);
            assert!(
                report.passed(),
                "{:?}",
                report.claims.iter().filter(|c| !c.passed).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn cyclic_grid_triggers_the_cycle_diagnostic() {
        let report = check_instance(&cyclic_table());
        assert!(report.passed());
        assert!(
            report.findings.iter().any(|f| f.contains("strong-excuse preference cycle")),
            "{:?}",
            report.findings
        );
        // symmetric excusable grids have no forced preference at all
        let report = check_instance(&coordination_table());
        assert!(report
            .findings
            .iter()
            .all(|f| !f.contains("strong-excuse preference cycle")));
    }

    #[test]
    fn small_fuzz_batch_is_deterministic() {
        let caps = InstanceCaps::default();
        let a = fuzz(5, &caps, 42, 1).unwrap();
        let b = fuzz(5, &caps, 42, 1).unwrap();
        assert_eq!(a.render_text(), b.render_text());
        assert!(a.passed(), "{}", a.render_text());
    }

    #[test]
    fn parallel_fuzz_matches_sequential() {
        let caps = InstanceCaps::default();
        let sequential = fuzz(4, &caps, 11, 1).unwrap();
        let parallel = fuzz(4, &caps, 11, 3).unwrap();
        assert_eq!(sequential.render_text(), parallel.render_text());
    }

    #[test]
    fn replayed_instances_reach_the_same_verdict() {
        let caps = InstanceCaps::default();
        let scenario = random_scenario(19, &caps).unwrap();
        let report = check_instance(&scenario);
        let fake = Counterexample {
            claim: "replay".into(),
            detail: String::new(),
            scenario_toml: canonical_toml(&scenario_to_doc(&scenario, "replay", &[])),
        };
        let replayed = replay(&fake).unwrap();
        assert_eq!(report.passed(), replayed.passed());
        assert_eq!(report.claims, replayed.claims);
    }

    #[test]
    fn zeroed_caps_are_rejected() {
        let caps = InstanceCaps { max_agents: 0, ..InstanceCaps::default() };
        assert!(matches!(random_scenario(0, &caps), Err(OracleError::BadCaps)));
    }
}
