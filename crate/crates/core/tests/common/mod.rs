//! Shared helpers for the integration suites: an independent reference
//! evaluator for temporal formulas, seeded generators, and fixture
//! loading.

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use valor_core::ltlf::Formula;
use valor_core::scenario::{self, LoadedScenario};
use valor_core::system::{History, JointAction, State};

/// Reference evaluator, deliberately different from the library path: no
/// normalisation, no memoisation, and the temporal operators are computed
/// through their one-step unfolding recurrences instead of quantifier
/// loops.
pub fn naive_eval(formula: &Formula, states: &[State], t: usize) -> bool {
    let k = states.len() - 1;
    match formula {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(p) => states[t].has(p),
        Formula::Not(a) => !naive_eval(a, states, t),
        Formula::And(a, b) => naive_eval(a, states, t) && naive_eval(b, states, t),
        Formula::Or(a, b) => naive_eval(a, states, t) || naive_eval(b, states, t),
        Formula::Implies(a, b) => !naive_eval(a, states, t) || naive_eval(b, states, t),
        Formula::Next(a) => t < k && naive_eval(a, states, t + 1),
        // a U b  <=>  b  or  (a and there is a next instant where a U b)
        Formula::Until(a, b) => {
            naive_eval(b, states, t)
                || (naive_eval(a, states, t) && t < k && naive_eval(formula, states, t + 1))
        }
        // F a  <=>  a or X F a
        Formula::Eventually(a) => {
            naive_eval(a, states, t) || (t < k && naive_eval(formula, states, t + 1))
        }
        // G a  <=>  a and (last instant or X G a)
        Formula::Henceforth(a) => {
            naive_eval(a, states, t) && (t == k || naive_eval(formula, states, t + 1))
        }
    }
}

pub const TEST_PROPS: [&str; 3] = ["p", "q", "r"];

/// Random formula over [`TEST_PROPS`] with at most `depth` tree levels.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let atom = |rng: &mut ChaCha8Rng| Formula::atom(TEST_PROPS[rng.gen_range(0..TEST_PROPS.len())]);
    if depth <= 1 {
        return match rng.gen_range(0..5u8) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => atom(rng),
        };
    }
    match rng.gen_range(0..9u8) {
        0 => atom(rng),
        1 => random_formula(rng, depth - 1).not(),
        2 => random_formula(rng, depth - 1).and(random_formula(rng, depth - 1)),
        3 => random_formula(rng, depth - 1).or(random_formula(rng, depth - 1)),
        4 => random_formula(rng, depth - 1).implies(random_formula(rng, depth - 1)),
        5 => random_formula(rng, depth - 1).next(),
        6 => random_formula(rng, depth - 1).until(random_formula(rng, depth - 1)),
        7 => random_formula(rng, depth - 1).eventually(),
        _ => random_formula(rng, depth - 1).henceforth(),
    }
}

/// Random trace over [`TEST_PROPS`] with 1 to `max_len` states, padded
/// with empty joint actions so it can be wrapped in a [`History`].
pub fn random_history(rng: &mut ChaCha8Rng, max_len: usize) -> History {
    let len = rng.gen_range(1..=max_len);
    let states: Vec<State> = (0..len)
        .map(|_| {
            State::from_props(
                TEST_PROPS
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .map(|p| p.to_string()),
            )
        })
        .collect();
    let actions = vec![JointAction::new(Vec::new()); states.len() - 1];
    History::new(states, actions).expect("generated lengths line up")
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> LoadedScenario {
    scenario::load_path(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name} must load: {e}"))
}
