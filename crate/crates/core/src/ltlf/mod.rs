//! Temporal formulas over finite traces: syntax tree, normalisation,
//! printing and evaluation.
//!
//! The core connectives are atoms, negation, conjunction, `X` (next) and
//! `U` (until), plus a dedicated truth constant. Everything else is sugar
//! that [`Formula::normalize`] expands: `G p` becomes `!(true U !p)`,
//! `F p` becomes `!G !p`, disjunction and implication reduce through
//! negation and conjunction. Evaluation is two-valued and quantifies only
//! over the instants of the given finite history.

mod parser;

pub use parser::{parse_formula, ParseError};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::system::History;

/// A temporal formula over named propositions.
///
/// `Top`, `Atom`, `Not`, `And`, `Next` and `Until` form the core fragment;
/// the remaining variants are derived connectives kept for convenient
/// construction and readable printing. [`Formula::normalize`] rewrites any
/// tree into the core fragment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Henceforth(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn next(self) -> Self {
        Formula::Next(Box::new(self))
    }

    pub fn until(self, other: Self) -> Self {
        Formula::Until(Box::new(self), Box::new(other))
    }

    pub fn eventually(self) -> Self {
        Formula::Eventually(Box::new(self))
    }

    pub fn henceforth(self) -> Self {
        Formula::Henceforth(Box::new(self))
    }

    /// Rewrites the formula into the core fragment.
    ///
    /// The expansions are fixed: `false = !true`, `a | b = !(!a & !b)`,
    /// `a -> b = !a | b`, `G a = !(true U !a)` and `F a = !G !a`. No other
    /// simplification (in particular no double-negation elimination) is
    /// performed, so the result of a given tree is unique.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Top.not(),
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Not(a) => a.normalize().not(),
            Formula::And(a, b) => a.normalize().and(b.normalize()),
            Formula::Or(a, b) => a.normalize().not().and(b.normalize().not()).not(),
            Formula::Implies(a, b) => Formula::Or(Box::new(a.as_ref().clone().not()), b.clone()).normalize(),
            Formula::Next(a) => a.normalize().next(),
            Formula::Until(a, b) => a.normalize().until(b.normalize()),
            Formula::Henceforth(a) => Formula::Top.until(a.normalize().not()).not(),
            Formula::Eventually(a) => Formula::Henceforth(Box::new(a.as_ref().clone().not())).normalize().not(),
        }
    }

    /// Collects every proposition name mentioned in the formula.
    pub fn propositions(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_props(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_props<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(p) => out.push(p),
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Eventually(a)
            | Formula::Henceforth(a) => a.collect_props(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("instant {instant} is out of range for a history of horizon {horizon}")]
    InstantOutOfRange { instant: usize, horizon: usize },
}

/// Evaluates `formula` on `history` at instant `t` (`0 <= t <= horizon`).
///
/// `X a` is false at the final instant (there is no successor), an atom
/// holds iff the proposition is in the state at `t`, and `a U b` quantifies
/// over the instants from `t` to the horizon inclusive. Results are
/// memoised per (subformula, instant) pair for the duration of the call.
pub fn eval_at(formula: &Formula, history: &History, t: usize) -> Result<bool, EvalError> {
    let horizon = history.horizon();
    if t > horizon {
        return Err(EvalError::InstantOutOfRange { instant: t, horizon });
    }
    let mut memo = Memo::default();
    Ok(eval_rec(formula, history, t, &mut memo))
}

/// Evaluates `formula` on the whole history, i.e. at instant `0`.
pub fn holds(formula: &Formula, history: &History) -> bool {
    eval_at(formula, history, 0).expect("instant 0 is always in range")
}

type Memo = HashMap<(usize, usize), bool>;

fn eval_rec(formula: &Formula, history: &History, t: usize, memo: &mut Memo) -> bool {
    let key = (formula as *const Formula as usize, t);
    if let Some(&cached) = memo.get(&key) {
        return cached;
    }
    let k = history.horizon();
    let result = match formula {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(p) => history.state(t).has(p),
        Formula::Not(a) => !eval_rec(a, history, t, memo),
        Formula::And(a, b) => eval_rec(a, history, t, memo) && eval_rec(b, history, t, memo),
        Formula::Or(a, b) => eval_rec(a, history, t, memo) || eval_rec(b, history, t, memo),
        Formula::Implies(a, b) => !eval_rec(a, history, t, memo) || eval_rec(b, history, t, memo),
        Formula::Next(a) => t < k && eval_rec(a, history, t + 1, memo),
        Formula::Until(a, b) => (t..=k).any(|t2| {
            eval_rec(b, history, t2, memo) && (t..t2).all(|t1| eval_rec(a, history, t1, memo))
        }),
        Formula::Eventually(a) => (t..=k).any(|t2| eval_rec(a, history, t2, memo)),
        Formula::Henceforth(a) => (t..=k).all(|t2| eval_rec(a, history, t2, memo)),
    };
    memo.insert(key, result);
    result
}

// Precedence levels used by the printer; larger binds tighter.
const PREC_IMPLIES: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNTIL: u8 = 3;
const PREC_UNARY: u8 = 4;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, PREC_IMPLIES, f)
    }
}

fn fmt_prec(formula: &Formula, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = own_prec(formula);
    if prec < parent {
        write!(f, "(")?;
        fmt_node(formula, f)?;
        write!(f, ")")
    } else {
        fmt_node(formula, f)
    }
}

fn own_prec(formula: &Formula) -> u8 {
    match formula {
        Formula::Implies(_, _) => PREC_IMPLIES,
        Formula::Or(_, _) => PREC_OR,
        Formula::And(_, _) => PREC_AND,
        Formula::Until(_, _) => PREC_UNTIL,
        // A negation that prints as a disjunction binds like one.
        Formula::Not(_) => match sugared(formula) {
            Sugar::Or(_, _) => PREC_OR,
            _ => PREC_UNARY,
        },
        _ => PREC_UNARY,
    }
}

/// Sugared reading of a core-form node, used only for printing.
enum Sugar<'a> {
    False,
    Eventually(&'a Formula),
    Henceforth(&'a Formula),
    Or(&'a Formula, &'a Formula),
    Plain,
}

fn sugared(formula: &Formula) -> Sugar<'_> {
    if let Formula::Not(inner) = formula {
        if matches!(inner.as_ref(), Formula::Top) {
            return Sugar::False;
        }
        // F a in core form: !!(true U !!a)
        if let Formula::Not(inner2) = inner.as_ref() {
            if let Formula::Until(l, r) = inner2.as_ref() {
                if matches!(l.as_ref(), Formula::Top) {
                    if let Formula::Not(r1) = r.as_ref() {
                        if let Formula::Not(a) = r1.as_ref() {
                            return Sugar::Eventually(a);
                        }
                    }
                }
            }
        }
        // G a in core form: !(true U !a)
        if let Formula::Until(l, r) = inner.as_ref() {
            if matches!(l.as_ref(), Formula::Top) {
                if let Formula::Not(a) = r.as_ref() {
                    return Sugar::Henceforth(a);
                }
            }
        }
        if let Some((a, b)) = or_pattern(formula) {
            return Sugar::Or(a, b);
        }
    }
    Sugar::Plain
}

// a | b in core form: !(!a & !b)
fn or_pattern(formula: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = formula {
        if let Formula::And(l, r) = inner.as_ref() {
            if let (Formula::Not(a), Formula::Not(b)) = (l.as_ref(), r.as_ref()) {
                return Some((a, b));
            }
        }
    }
    None
}

fn fmt_node(formula: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match formula {
        Formula::Top => write!(f, "true"),
        Formula::Bottom => write!(f, "false"),
        Formula::Atom(p) => write!(f, "{p}"),
        Formula::Not(inner) => match sugared(formula) {
            Sugar::False => write!(f, "false"),
            Sugar::Eventually(a) => {
                write!(f, "F ")?;
                fmt_prec(a, PREC_UNARY, f)
            }
            Sugar::Henceforth(a) => {
                write!(f, "G ")?;
                fmt_prec(a, PREC_UNARY, f)
            }
            Sugar::Or(a, b) => {
                fmt_prec(a, PREC_OR, f)?;
                write!(f, " | ")?;
                fmt_prec(b, PREC_OR + 1, f)
            }
            Sugar::Plain => {
                write!(f, "!")?;
                fmt_prec(inner, PREC_UNARY, f)
            }
        },
        Formula::And(a, b) => {
            fmt_prec(a, PREC_AND, f)?;
            write!(f, " & ")?;
            fmt_prec(b, PREC_AND + 1, f)
        }
        Formula::Or(a, b) => {
            fmt_prec(a, PREC_OR, f)?;
            write!(f, " | ")?;
            fmt_prec(b, PREC_OR + 1, f)
        }
        Formula::Implies(a, b) => {
            fmt_prec(a, PREC_IMPLIES + 1, f)?;
            write!(f, " -> ")?;
            fmt_prec(b, PREC_IMPLIES, f)
        }
        Formula::Next(a) => {
            write!(f, "X ")?;
            fmt_prec(a, PREC_UNARY, f)
        }
        Formula::Until(a, b) => {
            fmt_prec(a, PREC_UNTIL + 1, f)?;
            write!(f, " U ")?;
            fmt_prec(b, PREC_UNTIL, f)
        }
        Formula::Eventually(a) => {
            write!(f, "F ")?;
            fmt_prec(a, PREC_UNARY, f)
        }
        Formula::Henceforth(a) => {
            write!(f, "G ")?;
            fmt_prec(a, PREC_UNARY, f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::tests::trace;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn henceforth_normalizes_to_core() {
        let g = Formula::atom("p").henceforth();
        let expected = Formula::Top.until(Formula::atom("p").not()).not();
        assert_eq!(g.normalize(), expected);
        assert_eq!(parse_formula("G p").unwrap(), expected);
    }

    #[test]
    fn eventually_normalizes_through_henceforth() {
        let f = Formula::atom("p").eventually();
        let expected = Formula::Top
            .until(Formula::atom("p").not().not())
            .not()
            .not();
        assert_eq!(f.normalize(), expected);
    }

    #[test]
    fn next_is_false_at_last_instant() {
        let h = trace(&[&["p"], &["p"]]);
        let f = p().next();
        assert_eq!(eval_at(&f, &h, 1).unwrap(), false);
        assert_eq!(eval_at(&f, &h, 0).unwrap(), true);
    }

    #[test]
    fn henceforth_at_last_instant_equals_operand() {
        let h = trace(&[&[], &["p"]]);
        let k = h.horizon();
        let g = p().henceforth();
        assert_eq!(eval_at(&g, &h, k).unwrap(), eval_at(&p(), &h, k).unwrap());
    }

    #[test]
    fn henceforth_over_all_true_trace() {
        let h = trace(&[&["p"], &["p"], &["p"]]);
        assert!(eval_at(&p().henceforth(), &h, 0).unwrap());
    }

    #[test]
    fn until_recursion_on_three_states() {
        let h = trace(&[&["p"], &["p"], &["q"]]);
        assert!(eval_at(&p().until(q()), &h, 0).unwrap());
        assert!(holds(&p().until(q()).not().not(), &h));
    }

    #[test]
    fn until_needs_the_right_operand_somewhere() {
        let h = trace(&[&["p"], &["p"], &["p"]]);
        assert!(holds(&p().until(q()).not(), &h));
    }

    #[test]
    fn eventually_examples() {
        assert!(holds(&p().eventually(), &trace(&[&[], &["p"], &[]])));
        assert!(!holds(&p().eventually(), &trace(&[&[], &[], &[]])));
    }

    #[test]
    fn out_of_range_instant_is_an_error() {
        let h = trace(&[&[], &[]]);
        assert!(matches!(
            eval_at(&p(), &h, 2),
            Err(EvalError::InstantOutOfRange { instant: 2, horizon: 1 })
        ));
    }

    #[test]
    fn display_round_trips_core_patterns() {
        for text in [
            "F p1",
            "G p",
            "p U q U r",
            "!p & q",
            "p | q | r",
            "X (p & q)",
            "true",
            "false",
            "!(p U q)",
            "G (p | q)",
            "F G p",
        ] {
            let parsed = parse_formula(text).unwrap();
            let printed = parsed.to_string();
            let reparsed = parse_formula(&printed)
                .unwrap_or_else(|e| panic!("reparse of {printed:?}: {e}"));
            assert_eq!(reparsed, parsed, "round trip through {printed:?}");
        }
    }

    #[test]
    fn display_round_trips_sugar_trees() {
        let trees = [
            p().implies(q()),
            p().or(q()).henceforth(),
            p().eventually().not(),
            Formula::Bottom.until(p()),
            p().and(q().or(p())),
        ];
        for t in trees {
            let printed = t.to_string();
            let reparsed = parse_formula(&printed).unwrap();
            assert_eq!(reparsed, t.normalize(), "round trip of {printed:?}");
        }
    }
}
