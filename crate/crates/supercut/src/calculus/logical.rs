use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::proof::{Axiom, Justification, Proof};
use crate::syntax::{Formula, Sequent, Side};

/// The connective-side pairs that the logical rules act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    AndLeft,
    AndRight,
    OrLeft,
    OrRight,
    NegLeft,
    NegRight,
    TopLeft,
    BotRight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Intro,
    Elim,
}

/// Class tag of a logical step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleClass {
    Intro,
    Elim,
    Axiom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogicalRuleId {
    pub kind: RuleKind,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct NoMatch(pub String);

impl RuleKind {
    pub const ALL: [RuleKind; 8] = [
        RuleKind::AndLeft,
        RuleKind::AndRight,
        RuleKind::OrLeft,
        RuleKind::OrRight,
        RuleKind::NegLeft,
        RuleKind::NegRight,
        RuleKind::TopLeft,
        RuleKind::BotRight,
    ];

    pub fn side(self) -> Side {
        match self {
            RuleKind::AndLeft | RuleKind::OrLeft | RuleKind::NegLeft | RuleKind::TopLeft => Side::Left,
            _ => Side::Right,
        }
    }

    /// The rule whose principal formula is `f` on `side`, if any.
    /// `T` on the right and `F` on the left are axioms instead.
    pub fn for_formula(side: Side, f: &Formula) -> Option<RuleKind> {
        Some(match (side, f) {
            (Side::Left, Formula::And(..)) => RuleKind::AndLeft,
            (Side::Right, Formula::And(..)) => RuleKind::AndRight,
            (Side::Left, Formula::Or(..)) => RuleKind::OrLeft,
            (Side::Right, Formula::Or(..)) => RuleKind::OrRight,
            (Side::Left, Formula::Neg(..)) => RuleKind::NegLeft,
            (Side::Right, Formula::Neg(..)) => RuleKind::NegRight,
            (Side::Left, Formula::Top) => RuleKind::TopLeft,
            (Side::Right, Formula::Bot) => RuleKind::BotRight,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            RuleKind::AndLeft => "and-left",
            RuleKind::AndRight => "and-right",
            RuleKind::OrLeft => "or-left",
            RuleKind::OrRight => "or-right",
            RuleKind::NegLeft => "neg-left",
            RuleKind::NegRight => "neg-right",
            RuleKind::TopLeft => "top-left",
            RuleKind::BotRight => "bot-right",
        }
    }

    /// Premises of the introduction rule whose conclusion is `rest` plus `principal`
    /// on this rule's side. `None` when `principal` has the wrong shape.
    pub fn intro_premises(self, rest: &Sequent, principal: &Formula) -> Option<Vec<Sequent>> {
        if RuleKind::for_formula(self.side(), principal) != Some(self) {
            return None;
        }
        let with = |side, f: &Formula| rest.clone().with(side, f.clone());
        Some(match principal {
            Formula::And(a, b) if self == RuleKind::AndLeft => vec![with(Side::Left, a).with(Side::Left, (**b).clone())],
            Formula::Or(a, b) if self == RuleKind::OrRight => vec![with(Side::Right, a).with(Side::Right, (**b).clone())],
            Formula::And(a, b) | Formula::Or(a, b) => {
                let side = self.side();
                vec![with(side, a), with(side, b)]
            }
            Formula::Neg(a) => vec![with(self.side().flip(), a)],
            Formula::Top | Formula::Bot => vec![rest.clone()],
            Formula::Atom(_) => unreachable!("atoms have no rule"),
        })
    }
}

impl LogicalRuleId {
    pub fn intro(kind: RuleKind) -> Self {
        LogicalRuleId { kind, direction: Direction::Intro }
    }

    pub fn elim(kind: RuleKind) -> Self {
        LogicalRuleId { kind, direction: Direction::Elim }
    }

    pub fn all() -> impl Iterator<Item = LogicalRuleId> {
        RuleKind::ALL.into_iter().flat_map(|k| [LogicalRuleId::intro(k), LogicalRuleId::elim(k)])
    }

    pub fn class(self) -> RuleClass {
        match self.direction {
            Direction::Intro => RuleClass::Intro,
            Direction::Elim => RuleClass::Elim,
        }
    }

    pub fn inverse(self) -> Self {
        let direction = match self.direction {
            Direction::Intro => Direction::Elim,
            Direction::Elim => Direction::Intro,
        };
        LogicalRuleId { kind: self.kind, direction }
    }

    pub fn arity(self) -> usize {
        match (self.direction, self.kind) {
            (Direction::Intro, RuleKind::AndRight | RuleKind::OrLeft) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for LogicalRuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Intro => "intro",
            Direction::Elim => "elim",
        };
        write!(f, "{}-{}", self.kind.name(), dir)
    }
}

impl FromStr for LogicalRuleId {
    type Err = NoMatch;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LogicalRuleId::all().find(|r| r.to_string() == s).ok_or_else(|| NoMatch(format!("unknown rule '{s}'")))
    }
}

fn principal_candidates(s: &Sequent, kind: RuleKind) -> Vec<&Formula> {
    let mut seen = BTreeSet::new();
    s.side(kind.side())
        .iter()
        .filter(|f| RuleKind::for_formula(kind.side(), f) == Some(kind) && seen.insert(*f))
        .collect()
}

/// Check that `premises / conclusion` is an instance of `rule`; returns the principal formula.
pub fn match_logical(rule: LogicalRuleId, premises: &[Sequent], conclusion: &Sequent) -> Result<Formula, NoMatch> {
    if premises.len() != rule.arity() {
        return Err(NoMatch(format!("arity: {rule} takes {} premise(s), got {}", rule.arity(), premises.len())));
    }
    let side = rule.kind.side();
    match rule.direction {
        Direction::Intro => {
            for principal in principal_candidates(conclusion, rule.kind) {
                let rest = conclusion.without(side, principal).expect("candidate is present");
                if rule.kind.intro_premises(&rest, principal).as_deref() == Some(premises) {
                    return Ok(principal.clone());
                }
            }
        }
        Direction::Elim => {
            let premise = &premises[0];
            for principal in principal_candidates(premise, rule.kind) {
                let rest = premise.without(side, principal).expect("candidate is present");
                let branches = rule.kind.intro_premises(&rest, principal).expect("shape checked");
                if branches.contains(conclusion) {
                    return Ok(principal.clone());
                }
            }
        }
    }
    Err(NoMatch(format!("not an instance of {rule}")))
}

/// Whether `s` is closed by an axiom: `T` on the right or `F` on the left.
pub fn axiom_for(s: &Sequent) -> Option<Axiom> {
    if s.right.contains(&Formula::Top) {
        Some(Axiom::TopRight)
    } else if s.left.contains(&Formula::Bot) {
        Some(Axiom::BotLeft)
    } else {
        None
    }
}

/// The non-atomic members of `s`, left side first, in multiset order.
pub fn decomposable(s: &Sequent) -> Vec<(Side, &Formula)> {
    let left = s.left.iter().filter(|f| !f.is_atomic()).map(|f| (Side::Left, f));
    let right = s.right.iter().filter(|f| !f.is_atomic()).map(|f| (Side::Right, f));
    left.chain(right).collect()
}

/// The atomic sequents elimination-derivable from `s`.
pub fn at_set(s: &Sequent) -> BTreeSet<Sequent> {
    at_set_with(s, &mut |_| 0)
}

/// Like [`at_set`], decomposing the candidate chosen by `pick` at each step.
pub fn at_set_with(s: &Sequent, pick: &mut dyn FnMut(&[(Side, &Formula)]) -> usize) -> BTreeSet<Sequent> {
    let mut out = BTreeSet::new();
    at_set_into(s, pick, &mut out);
    out
}

fn at_set_into(s: &Sequent, pick: &mut dyn FnMut(&[(Side, &Formula)]) -> usize, out: &mut BTreeSet<Sequent>) {
    if axiom_for(s).is_some() {
        return;
    }
    let candidates = decomposable(s);
    if candidates.is_empty() {
        out.insert(s.clone());
        return;
    }
    let (side, f) = candidates[pick(&candidates) % candidates.len()];
    let kind = RuleKind::for_formula(side, f).expect("not an axiom");
    let rest = s.without(side, f).expect("present");
    for p in kind.intro_premises(&rest, f).expect("shape") {
        at_set_into(&p, pick, out);
    }
}

/// Build a proof of `c` from introduction rules and axioms only, with leaves
/// `Premise(i)` pointing into `available`.
pub fn intro_derive(c: &Sequent, available: &[Sequent]) -> Option<Proof> {
    if let Some(ax) = axiom_for(c) {
        return Some(Proof::leaf(c.clone(), Justification::Axiom(ax)));
    }
    let candidates = decomposable(c);
    let Some(&(side, f)) = candidates.first() else {
        let i = available.iter().position(|a| a == c)?;
        return Some(Proof::leaf(c.clone(), Justification::Premise(i)));
    };
    let kind = RuleKind::for_formula(side, f).expect("not an axiom");
    let rest = c.without(side, f).expect("present");
    let children = kind
        .intro_premises(&rest, f)
        .expect("shape")
        .iter()
        .map(|p| intro_derive(p, available))
        .collect::<Option<Vec<_>>>()?;
    Some(Proof::new(c.clone(), Justification::Logical(LogicalRuleId::intro(kind)), children))
}

/// Elimination steps from `s` down to its member `target` of `at_set(s)`,
/// with `leaf` as the proof of `s`.
pub fn elim_path(s: &Sequent, target: &Sequent, leaf: Proof) -> Option<Proof> {
    if axiom_for(s).is_some() {
        return None;
    }
    let candidates = decomposable(s);
    let Some(&(side, f)) = candidates.first() else {
        return (s == target).then_some(leaf);
    };
    let kind = RuleKind::for_formula(side, f).expect("not an axiom");
    let rest = s.without(side, f).expect("present");
    for p in kind.intro_premises(&rest, f).expect("shape") {
        if at_set(&p).contains(target) {
            let step = Proof::new(p.clone(), Justification::Logical(LogicalRuleId::elim(kind)), vec![leaf]);
            return elim_path(&p, target, step);
        }
    }
    None
}
