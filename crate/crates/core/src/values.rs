//! Prioritised value bases, signed outcome sets, per-level scores and the
//! quantitative lexicographic preorder.
//!
//! A value base is an ordered sequence of levels, each holding named
//! formulas; level 0 is the most important. For a history, [`satset`]
//! records one signed literal per value: `+v` when the value's formula
//! holds on the history and `-v` when it does not. Outcome sets are
//! compared by their per-level scores `|satisfied| - |violated|`, first
//! differing level deciding, which makes the preorder total.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ltlf::{holds, Formula};
use crate::system::{History, Scenario};

/// A named formula inside a value base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedValue {
    pub name: String,
    pub formula: Formula,
}

/// Position of a value: priority level and declaration index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueRef {
    pub level: usize,
    pub index: usize,
}

/// Whether a signed literal records satisfaction or violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Satisfied,
    Violated,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Satisfied => Sign::Violated,
            Sign::Violated => Sign::Satisfied,
        }
    }

    pub fn prefix(self) -> char {
        match self {
            Sign::Satisfied => '+',
            Sign::Violated => '-',
        }
    }
}

/// A signed reference to a value: `+v` or `-v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedValue {
    pub value: ValueRef,
    pub sign: Sign,
}

impl SignedValue {
    pub fn satisfied(value: ValueRef) -> Self {
        SignedValue { value, sign: Sign::Satisfied }
    }

    pub fn violated(value: ValueRef) -> Self {
        SignedValue { value, sign: Sign::Violated }
    }
}

/// An ordered sequence of value levels, most important first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueBase {
    levels: Vec<Vec<NamedValue>>,
}

impl ValueBase {
    /// Builds a value base, rejecting empty bases and duplicate names.
    pub fn new(levels: Vec<Vec<(String, Formula)>>) -> Result<Self, ValueError> {
        let levels: Vec<Vec<NamedValue>> = levels
            .into_iter()
            .map(|level| {
                level
                    .into_iter()
                    .map(|(name, formula)| NamedValue { name, formula })
                    .collect()
            })
            .collect();
        let mut seen = BTreeSet::new();
        for value in levels.iter().flatten() {
            if !seen.insert(value.name.clone()) {
                return Err(ValueError::DuplicateName { name: value.name.clone() });
            }
        }
        if levels.iter().all(|l| l.is_empty()) {
            return Err(ValueError::Empty);
        }
        Ok(ValueBase { levels })
    }

    /// Number of priority levels.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &[NamedValue] {
        &self.levels[n]
    }

    /// Total number of values across all levels.
    pub fn value_count(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    pub fn get(&self, r: ValueRef) -> Option<&NamedValue> {
        self.levels.get(r.level)?.get(r.index)
    }

    pub fn find(&self, name: &str) -> Option<ValueRef> {
        for (level, values) in self.levels.iter().enumerate() {
            if let Some(index) = values.iter().position(|v| v.name == name) {
                return Some(ValueRef { level, index });
            }
        }
        None
    }

    /// All values in canonical (level, index) order.
    pub fn iter(&self) -> impl Iterator<Item = &NamedValue> {
        self.levels.iter().flatten()
    }

    /// All values with their references, in canonical order.
    pub fn iter_refs(&self) -> impl Iterator<Item = (ValueRef, &NamedValue)> {
        self.levels.iter().enumerate().flat_map(|(level, values)| {
            values
                .iter()
                .enumerate()
                .map(move |(index, v)| (ValueRef { level, index }, v))
        })
    }

    pub fn name_of(&self, r: ValueRef) -> &str {
        &self.get(r).expect("value reference out of range").name
    }
}

/// A set of signed value references, canonically ordered by
/// (level, declaration index, sign). Never contains both signs of the
/// same value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OutcomeSet {
    items: BTreeSet<SignedValue>,
}

impl OutcomeSet {
    pub fn empty() -> Self {
        OutcomeSet::default()
    }

    pub fn from_signed<I: IntoIterator<Item = SignedValue>>(items: I) -> Result<Self, ValueError> {
        let mut set = OutcomeSet::empty();
        for item in items {
            set.insert(item)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, item: SignedValue) -> Result<(), ValueError> {
        let conflicting = SignedValue { value: item.value, sign: item.sign.flip() };
        if self.items.contains(&conflicting) {
            return Err(ValueError::ConflictingSigns { value: item.value });
        }
        self.items.insert(item);
        Ok(())
    }

    pub fn contains(&self, item: &SignedValue) -> bool {
        self.items.contains(item)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SignedValue> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Plain set difference; the result of differencing valid sets is
    /// valid.
    pub fn difference(&self, other: &OutcomeSet) -> OutcomeSet {
        OutcomeSet { items: self.items.difference(&other.items).copied().collect() }
    }

    /// The violated-sign part of the set.
    pub fn violated(&self) -> impl Iterator<Item = &SignedValue> {
        self.items.iter().filter(|s| s.sign == Sign::Violated)
    }

    /// Renders the set with value names, e.g. `{+w1, -w2}`.
    pub fn display<'a>(&'a self, base: &'a ValueBase) -> OutcomeSetDisplay<'a> {
        OutcomeSetDisplay { set: self, base }
    }
}

pub struct OutcomeSetDisplay<'a> {
    set: &'a OutcomeSet,
    base: &'a ValueBase,
}

impl fmt::Display for OutcomeSetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, item) in self.set.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{}", item.sign.prefix(), self.base.name_of(item.value))?;
        }
        write!(f, "}}")
    }
}

/// Per-level scores `|satisfied| - |violated|`; ordering is
/// lexicographic with the most important level first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScoreVector(pub Vec<i64>);

impl fmt::Display for ScoreVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// The maximal satisfied subset of signed values: one literal per
/// declared value.
pub fn satset(history: &History, base: &ValueBase) -> OutcomeSet {
    let mut out = OutcomeSet::empty();
    for (value_ref, value) in base.iter_refs() {
        let sign = if holds(&value.formula, history) { Sign::Satisfied } else { Sign::Violated };
        out.items.insert(SignedValue { value: value_ref, sign });
    }
    out
}

/// Per-level score of an outcome set.
pub fn score_vector(set: &OutcomeSet, base: &ValueBase) -> Result<ScoreVector, ValueError> {
    let mut scores = vec![0i64; base.level_count()];
    for item in set.iter() {
        if base.get(item.value).is_none() {
            return Err(ValueError::UnknownValue { value: item.value });
        }
        match item.sign {
            Sign::Satisfied => scores[item.value.level] += 1,
            Sign::Violated => scores[item.value.level] -= 1,
        }
    }
    Ok(ScoreVector(scores))
}

fn score_or_panic(set: &OutcomeSet, base: &ValueBase) -> ScoreVector {
    score_vector(set, base).expect("outcome set references a value outside the base")
}

/// The quantitative lexicographic comparison: `x` is at most as good as
/// `y` iff the score vectors compare that way.
pub fn leq(x: &OutcomeSet, y: &OutcomeSet, base: &ValueBase) -> bool {
    score_or_panic(x, base) <= score_or_panic(y, base)
}

/// `x` strictly below `y`: `x ⪯ y` and not `y ⪯ x`.
pub fn strictly_less(x: &OutcomeSet, y: &OutcomeSet, base: &ValueBase) -> bool {
    score_or_panic(x, base) < score_or_panic(y, base)
}

/// Both directions of the preorder hold, i.e. equal score vectors.
pub fn equivalent(x: &OutcomeSet, y: &OutcomeSet, base: &ValueBase) -> bool {
    score_or_panic(x, base) == score_or_panic(y, base)
}

/// The regret felt after `actual` when considering `counterfactual`:
/// everything `actual` realised that the counterfactual would not have.
pub fn relative_regret(actual: &History, counterfactual: &History, base: &ValueBase) -> OutcomeSet {
    satset(actual, base).difference(&satset(counterfactual, base))
}

/// One warning emitted by the value-base consistency diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyWarning {
    /// Two values with structurally identical normalised formulas.
    SyntacticDuplicate { first: String, second: String },
    /// One value is syntactically the negation of another.
    SyntacticNegation { first: String, second: String },
    /// Two values disagree on every history this scenario can produce.
    ModelNegation { first: String, second: String },
    /// The exhaustive model-relative check was skipped.
    CheckSkipped { reason: String },
}

impl fmt::Display for ConsistencyWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsistencyWarning::SyntacticDuplicate { first, second } => {
                write!(f, "values '{first}' and '{second}' have identical formulas")
            }
            ConsistencyWarning::SyntacticNegation { first, second } => {
                write!(f, "value '{second}' is the negation of '{first}'")
            }
            ConsistencyWarning::ModelNegation { first, second } => write!(
                f,
                "values '{first}' and '{second}' disagree on every reachable history of this scenario"
            ),
            ConsistencyWarning::CheckSkipped { reason } => {
                write!(f, "model-relative consistency check skipped: {reason}")
            }
        }
    }
}

/// Result of [`check_value_base`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConsistencyReport {
    pub warnings: Vec<ConsistencyWarning>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Upper bound on the action sequences walked by the model-relative
/// consistency check.
const CONSISTENCY_SEQUENCE_CAP: u64 = 1_000_000;

/// Diagnoses the scenario's value base: syntactic duplicates and negation
/// pairs, plus pairs of values that behave as each other's negation on
/// every history the scenario can produce. Warnings only; loading
/// proceeds regardless.
pub fn check_value_base(scenario: &Scenario) -> ConsistencyReport {
    let base = &scenario.values;
    let mut report = ConsistencyReport::default();

    let values: Vec<(ValueRef, &NamedValue)> = base.iter_refs().collect();
    let normalized: Vec<Formula> = values.iter().map(|(_, v)| v.formula.normalize()).collect();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if normalized[i] == normalized[j] {
                report.warnings.push(ConsistencyWarning::SyntacticDuplicate {
                    first: values[i].1.name.clone(),
                    second: values[j].1.name.clone(),
                });
            } else if normalized[j] == normalized[i].clone().not()
                || normalized[i] == normalized[j].clone().not()
            {
                report.warnings.push(ConsistencyWarning::SyntacticNegation {
                    first: values[i].1.name.clone(),
                    second: values[j].1.name.clone(),
                });
            }
        }
    }

    // Model-relative part: walk every availability-respecting action
    // sequence of length `horizon` and record, per pair, whether the two
    // values ever agree on a history.
    let joints = scenario.system.joint_actions();
    let sequences = (joints.len() as u64).checked_pow(scenario.horizon as u32);
    match sequences {
        Some(count) if count <= CONSISTENCY_SEQUENCE_CAP => {}
        _ => {
            report.warnings.push(ConsistencyWarning::CheckSkipped {
                reason: format!(
                    "{} action sequences exceed the diagnostic cap of {}",
                    sequences.map(|c| c.to_string()).unwrap_or_else(|| "overflowing".into()),
                    CONSISTENCY_SEQUENCE_CAP
                ),
            });
            return report;
        }
    }

    let n = values.len();
    let mut agree_somewhere = vec![false; n * n];
    let mut indices = vec![0usize; scenario.horizon];
    loop {
        let mut states = vec![scenario.start.clone()];
        let mut actions = Vec::with_capacity(scenario.horizon);
        let mut ok = true;
        for &ji in &indices {
            let joint = joints[ji].clone();
            match scenario.system.successor(states.last().unwrap(), &joint) {
                Ok(next) => {
                    states.push(next);
                    actions.push(joint);
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let history = History::new(states, actions).expect("fold produces a valid history");
            let truth: Vec<bool> =
                values.iter().map(|(_, v)| holds(&v.formula, &history)).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    if truth[i] == truth[j] {
                        agree_somewhere[i * n + j] = true;
                    }
                }
            }
        }
        // advance the mixed-radix counter over action sequences
        let mut pos = indices.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < joints.len() {
                break;
            }
            indices[pos] = 0;
        }
        if indices.iter().all(|&i| i == 0) {
            break;
        }
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if !agree_somewhere[i * n + j] {
                report.warnings.push(ConsistencyWarning::ModelNegation {
                    first: values[i].1.name.clone(),
                    second: values[j].1.name.clone(),
                });
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("value base must contain at least one value")]
    Empty,
    #[error("duplicate value name '{name}'")]
    DuplicateName { name: String },
    #[error("outcome set would contain both signs of value at level {} index {}", value.level, value.index)]
    ConflictingSigns { value: ValueRef },
    #[error("unknown value reference (level {}, index {})", value.level, value.index)]
    UnknownValue { value: ValueRef },
}
