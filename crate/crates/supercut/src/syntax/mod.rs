//! Formulas, multisets and sequents over the De Morgan signature.

mod parse;
mod subst;
mod translate;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse_formula, parse_sequent, ParseError};
pub use subst::{
    decompose_substitution, is_atomic_subst, is_balanced, is_balanced_subst, is_non_conflicting,
    polarity, FreshNames, Polarity, PolarityReport, Substitution,
};
pub use translate::{rho, set_to_formula, tau};

/// Prefix reserved for generated atom names. The parser never accepts it.
pub const FRESH_PREFIX: char = '_';

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Self {
        Atom(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_fresh(&self) -> bool {
        self.0.starts_with(FRESH_PREFIX)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Top,
    Bot,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Atom::new(name))
    }

    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Connective depth: atoms and constants have depth zero.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::Neg(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 1,
            Formula::Neg(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Top | Formula::Bot => {}
            Formula::Neg(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    pub(crate) fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => {}
            Formula::Neg(a) => a.collect_subformulas(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
        }
    }

    /// Rename atoms according to `f`; atoms for which `f` returns `None` stay.
    pub fn rename(&self, f: &impl Fn(&Atom) -> Option<Atom>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(f(a).unwrap_or_else(|| a.clone())),
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::Neg(a) => Formula::neg(a.rename(f)),
            Formula::And(a, b) => Formula::and(a.rename(f), b.rename(f)),
            Formula::Or(a, b) => Formula::or(a.rename(f), b.rename(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Top => f.write_str("T"),
            Formula::Bot => f.write_str("F"),
            Formula::Neg(a) => {
                f.write_str("~")?;
                a.write_operand(f, 3)
            }
            // left-associative: the right operand needs strictly higher precedence
            Formula::And(a, b) => {
                a.write_operand(f, 2)?;
                f.write_str(" & ")?;
                b.write_operand(f, 3)
            }
            Formula::Or(a, b) => {
                a.write_operand(f, 1)?;
                f.write_str(" | ")?;
                b.write_operand(f, 2)
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

/// A finite multiset of formulas, stored sorted so that equality is order-insensitive.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset(Vec<Formula>);

impl Multiset {
    pub fn new() -> Self {
        Multiset(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Formula] {
        &self.0
    }

    pub fn insert(&mut self, f: Formula) {
        let at = self.0.partition_point(|g| g <= &f);
        self.0.insert(at, f);
    }

    pub fn with(mut self, f: Formula) -> Self {
        self.insert(f);
        self
    }

    /// Remove one occurrence; returns whether it was present.
    pub fn remove(&mut self, f: &Formula) -> bool {
        match self.0.binary_search(f) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn without(&self, f: &Formula) -> Option<Self> {
        let mut m = self.clone();
        m.remove(f).then_some(m)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.binary_search(f).is_ok()
    }

    pub fn count(&self, f: &Formula) -> usize {
        let lo = self.0.partition_point(|g| g < f);
        let hi = self.0.partition_point(|g| g <= f);
        hi - lo
    }

    pub fn sum(&self, other: &Multiset) -> Multiset {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort();
        Multiset(v)
    }

    /// `self - other` when `other` is a sub-multiset of `self`.
    pub fn minus(&self, other: &Multiset) -> Option<Multiset> {
        let mut out = Vec::with_capacity(self.len());
        let mut j = 0;
        for f in &self.0 {
            if j < other.0.len() && other.0[j] == *f {
                j += 1;
            } else if j < other.0.len() && other.0[j] < *f {
                return None;
            } else {
                out.push(f.clone());
            }
        }
        (j == other.0.len()).then_some(Multiset(out))
    }

    pub fn is_submultiset(&self, other: &Multiset) -> bool {
        other.minus(self).is_some()
    }

    /// The underlying set, as a multiset without repetitions.
    pub fn support(&self) -> Multiset {
        let mut v = self.0.clone();
        v.dedup();
        Multiset(v)
    }

    pub fn is_atomic(&self) -> bool {
        self.0.iter().all(Formula::is_atomic)
    }

    pub fn map(&self, f: impl Fn(&Formula) -> Formula) -> Multiset {
        self.0.iter().map(f).collect()
    }

    pub fn into_vec(self) -> Vec<Formula> {
        self.0
    }
}

impl FromIterator<Formula> for Multiset {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let mut v: Vec<Formula> = iter.into_iter().collect();
        v.sort();
        Multiset(v)
    }
}

impl<'a> IntoIterator for &'a Multiset {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A pair of finite multisets written `left |- right`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub left: Multiset,
    pub right: Multiset,
}

impl Sequent {
    pub fn new(left: impl IntoIterator<Item = Formula>, right: impl IntoIterator<Item = Formula>) -> Self {
        Sequent { left: left.into_iter().collect(), right: right.into_iter().collect() }
    }

    pub fn from_sides(left: Multiset, right: Multiset) -> Self {
        Sequent { left, right }
    }

    pub fn empty() -> Self {
        Sequent::default()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.left.is_atomic() && self.right.is_atomic()
    }

    pub fn side(&self, side: Side) -> &Multiset {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Multiset {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    pub fn with(mut self, side: Side, f: Formula) -> Self {
        self.side_mut(side).insert(f);
        self
    }

    pub fn without(&self, side: Side, f: &Formula) -> Option<Self> {
        let mut s = self.clone();
        s.side_mut(side).remove(f).then_some(s)
    }

    pub fn sum(&self, other: &Sequent) -> Sequent {
        Sequent { left: self.left.sum(&other.left), right: self.right.sum(&other.right) }
    }

    pub fn minus(&self, other: &Sequent) -> Option<Sequent> {
        Some(Sequent { left: self.left.minus(&other.left)?, right: self.right.minus(&other.right)? })
    }

    pub fn is_subsequent(&self, other: &Sequent) -> bool {
        self.left.is_submultiset(&other.left) && self.right.is_submultiset(&other.right)
    }

    pub fn support(&self) -> Sequent {
        Sequent { left: self.left.support(), right: self.right.support() }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for f in self.left.iter().chain(self.right.iter()) {
            f.collect_atoms(&mut out);
        }
        out
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(self.right.iter())
    }

    pub fn rename(&self, f: &impl Fn(&Atom) -> Option<Atom>) -> Sequent {
        Sequent { left: self.left.map(|g| g.rename(f)), right: self.right.map(|g| g.rename(f)) }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |m: &Multiset| m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        if !self.left.is_empty() {
            write!(f, "{} ", join(&self.left))?;
        }
        f.write_str("|-")?;
        if !self.right.is_empty() {
            write!(f, " {}", join(&self.right))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for Sequent {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequent(s)
    }
}

pub fn atoms_of<'a>(seqs: impl IntoIterator<Item = &'a Sequent>) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    for s in seqs {
        out.extend(s.atoms());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn atoms_of_formulas_and_sequents() {
        assert_eq!(f("~p | q").atoms(), [Atom::new("p"), Atom::new("q")].into());
        assert!(Formula::Top.atoms().is_empty());
        let s: Sequent = "p, q |- r".parse().unwrap();
        assert_eq!(s.atoms().len(), 3);
    }

    #[test]
    fn subformula_closure() {
        assert_eq!(f("p & q").subformulas(), [f("p & q"), f("p"), f("q")].into());
        assert_eq!(f("~T").subformulas(), [f("~T"), Formula::Top].into());
        assert_eq!(f("p").subformulas(), [f("p")].into());
    }

    #[test]
    fn rendering_uses_minimal_parentheses() {
        assert_eq!(f("(p & ~p) | (q & ~q)").to_string(), "p & ~p | q & ~q");
        assert_eq!(f("p & (q & r)").to_string(), "p & (q & r)");
        assert_eq!(f("(p & q) & r").to_string(), "p & q & r");
        assert_eq!(f("~(p | q)").to_string(), "~(p | q)");
    }

    #[test]
    fn sequent_rendering_of_empty_sides() {
        assert_eq!(Sequent::empty().to_string(), "|-");
        assert_eq!(Sequent::new([], [f("p")]).to_string(), "|- p");
        assert_eq!(Sequent::new([f("p")], []).to_string(), "p |-");
    }

    #[test]
    fn multiset_arithmetic() {
        let a: Multiset = [f("p"), f("p"), f("q")].into_iter().collect();
        let b: Multiset = [f("p")].into_iter().collect();
        assert_eq!(a.count(&f("p")), 2);
        assert_eq!(a.minus(&b).unwrap().count(&f("p")), 1);
        assert!(b.minus(&a).is_none());
        assert_eq!(a.support().len(), 2);
        assert!(b.is_submultiset(&a));
    }
}
