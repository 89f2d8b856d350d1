//! Proof trees, the proof checker and shape predicates.

mod format;
mod shape;

use std::fmt;

pub use format::{from_json, from_text, parse_label, to_dot, to_json, to_text, FormatError};
pub use shape::{
    has_subformula_property, is_analytic_synthetic, is_analytic_synthetic_local, is_structurally_atomic,
    is_structurally_atomic_node,
    phase_split, PhaseSplit,
};

use crate::calculus::{
    axiom_for, match_logical, match_structural, sigma_expand, Calculus, Instantiation, LogicalRuleId, RuleClass,
};
use crate::syntax::{is_balanced_subst, is_non_conflicting, Sequent, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `G |- D, T`
    TopRight,
    /// `F, G |- D`
    BotLeft,
}

impl Axiom {
    pub fn label(self) -> &'static str {
        match self {
            Axiom::TopRight => "top-right",
            Axiom::BotLeft => "bot-left",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Premise(usize),
    Axiom(Axiom),
    Logical(LogicalRuleId),
    /// A structural rule, or with `sigma` one of its sigma-expansions.
    Structural { rule: String, sigma: Option<Substitution> },
}

impl Justification {
    pub fn structural(rule: &str) -> Self {
        Justification::Structural { rule: rule.to_string(), sigma: None }
    }

    pub fn class(&self) -> NodeClass {
        match self {
            Justification::Premise(_) => NodeClass::Premise,
            Justification::Axiom(_) => NodeClass::Axiom,
            Justification::Logical(r) => match r.class() {
                RuleClass::Intro => NodeClass::Intro,
                _ => NodeClass::Elim,
            },
            Justification::Structural { .. } => NodeClass::Structural,
        }
    }

    pub fn structural_name(&self) -> Option<&str> {
        match self {
            Justification::Structural { rule, .. } => Some(rule),
            _ => None,
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Premise(i) => write!(f, "premise {i}"),
            Justification::Axiom(a) => f.write_str(a.label()),
            Justification::Logical(r) => write!(f, "{r}"),
            Justification::Structural { rule, sigma: None } => f.write_str(rule),
            Justification::Structural { rule, sigma: Some(s) } => write!(f, "{rule} {s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeClass {
    Premise,
    Axiom,
    Intro,
    Elim,
    Structural,
}

pub type Path = Vec<usize>;

#[derive(Clone, PartialEq, Eq)]
pub struct Proof {
    pub conclusion: Sequent,
    pub just: Justification,
    pub children: Vec<Proof>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at node {path:?}: {reason}")]
pub struct CheckError {
    pub path: Path,
    pub reason: String,
}

impl Proof {
    pub fn new(conclusion: Sequent, just: Justification, children: Vec<Proof>) -> Self {
        Proof { conclusion, just, children }
    }

    pub fn leaf(conclusion: Sequent, just: Justification) -> Self {
        Proof::new(conclusion, just, Vec::new())
    }

    pub fn premise(conclusion: Sequent, index: usize) -> Self {
        Proof::leaf(conclusion, Justification::Premise(index))
    }

    pub fn structural(rule: &str, conclusion: Sequent, children: Vec<Proof>) -> Self {
        Proof::new(conclusion, Justification::structural(rule), children)
    }

    pub fn class(&self) -> NodeClass {
        self.just.class()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Proof::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Proof::height).max().unwrap_or(0)
    }

    /// Every node with its path, parents before children, children left to right.
    pub fn nodes(&self) -> Vec<(Path, &Proof)> {
        let mut out = Vec::new();
        self.collect_nodes(&mut Vec::new(), &mut out);
        out
    }

    fn collect_nodes<'a>(&'a self, path: &mut Path, out: &mut Vec<(Path, &'a Proof)>) {
        out.push((path.clone(), self));
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.collect_nodes(path, out);
            path.pop();
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Proof> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get(i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Proof> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get_mut(i)?.at_mut(rest),
        }
    }

    /// Indices of the premise leaves.
    pub fn premise_indices(&self) -> std::collections::BTreeSet<usize> {
        self.nodes()
            .into_iter()
            .filter_map(|(_, n)| match n.just {
                Justification::Premise(i) => Some(i),
                _ => None,
            })
            .collect()
    }

    /// Conclusions of the premise leaves.
    pub fn premise_leaves(&self) -> std::collections::BTreeSet<Sequent> {
        self.nodes()
            .into_iter()
            .filter(|(_, n)| matches!(n.just, Justification::Premise(_)))
            .map(|(_, n)| n.conclusion.clone())
            .collect()
    }

    pub fn count_class(&self, class: NodeClass) -> usize {
        self.nodes().iter().filter(|(_, n)| n.class() == class).count()
    }

    pub fn count_rule(&self, name: &str) -> usize {
        self.nodes().iter().filter(|(_, n)| n.just.structural_name() == Some(name)).count()
    }

    /// Rewrite premise indices, e.g. after restricting the premise list.
    pub fn map_premises(&self, f: &impl Fn(usize) -> usize) -> Proof {
        let just = match self.just {
            Justification::Premise(i) => Justification::Premise(f(i)),
            ref other => other.clone(),
        };
        Proof::new(self.conclusion.clone(), just, self.children.iter().map(|c| c.map_premises(f)).collect())
    }

    /// Replace each premise leaf by the proof `f` returns for its index.
    pub fn graft(&self, f: &impl Fn(usize) -> Proof) -> Proof {
        match self.just {
            Justification::Premise(i) => f(i),
            _ => Proof::new(
                self.conclusion.clone(),
                self.just.clone(),
                self.children.iter().map(|c| c.graft(f)).collect(),
            ),
        }
    }
}

impl fmt::Debug for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self))
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self))
    }
}

/// Re-match every node against `calc`; the first failure in leftmost-innermost order is reported.
pub fn check(p: &Proof, calc: &Calculus, premises: &[Sequent]) -> Result<(), CheckError> {
    check_at(p, calc, premises, &mut Vec::new())
}

fn check_at(p: &Proof, calc: &Calculus, premises: &[Sequent], path: &mut Path) -> Result<(), CheckError> {
    for (i, c) in p.children.iter().enumerate() {
        path.push(i);
        check_at(c, calc, premises, path)?;
        path.pop();
    }
    check_node(p, calc, premises).map_err(|reason| CheckError { path: path.clone(), reason })
}

/// Check one inference step, assuming its children are correct.
pub fn check_node(p: &Proof, calc: &Calculus, premises: &[Sequent]) -> Result<(), String> {
    let kids: Vec<Sequent> = p.children.iter().map(|c| c.conclusion.clone()).collect();
    match &p.just {
        Justification::Premise(i) => {
            if !kids.is_empty() {
                return Err("arity: premise leaves have no children".into());
            }
            match premises.get(*i) {
                Some(s) if *s == p.conclusion => Ok(()),
                Some(s) => Err(format!("premise {i} is '{s}', not '{}'", p.conclusion)),
                None => Err(format!("no premise with index {i}")),
            }
        }
        Justification::Axiom(a) => {
            if !kids.is_empty() {
                return Err("arity: axioms have no children".into());
            }
            let ok = match a {
                Axiom::TopRight => p.conclusion.right.contains(&crate::syntax::Formula::Top),
                Axiom::BotLeft => p.conclusion.left.contains(&crate::syntax::Formula::Bot),
            };
            if ok {
                Ok(())
            } else {
                Err(format!("'{}' is not an instance of {}", p.conclusion, a.label()))
            }
        }
        Justification::Logical(r) => match_logical(*r, &kids, &p.conclusion).map(|_| ()).map_err(|e| e.0),
        Justification::Structural { rule, sigma } => {
            let Some(schema) = calc.rule(rule) else {
                return Err(format!("rule not in calculus: {rule}"));
            };
            match sigma {
                None => match_structural(&schema, &kids, &p.conclusion, false).map(|_| ()).map_err(|e| e.0),
                Some(s) => {
                    let atoms = schema.schema_atoms();
                    if !is_balanced_subst(s, &atoms) || !is_non_conflicting(s, &atoms) {
                        return Err(format!("{s} is not balanced and non-conflicting"));
                    }
                    let expanded = sigma_expand(&schema, &Instantiation::default(), s);
                    if expanded.iter().any(|r| match_structural(r, &kids, &p.conclusion, false).is_ok()) {
                        Ok(())
                    } else if expanded.iter().all(|r| r.premises.len() != kids.len()) {
                        Err(format!("arity: no expansion of {rule} under {s} has {} premise(s)", kids.len()))
                    } else {
                        Err(format!("not an instance of {rule} expanded by {s}"))
                    }
                }
            }
        }
    }
}

/// Whether `s` is closed by an axiom.
pub fn is_axiom(s: &Sequent) -> bool {
    axiom_for(s).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{builtin_calculus, CalculusName, IDENTITY};

    fn seq(s: &str) -> Sequent {
        s.parse().unwrap()
    }

    #[test]
    fn identity_depends_on_the_calculus() {
        let p = Proof::structural(IDENTITY, seq("p |- p"), vec![]);
        assert!(check(&p, &builtin_calculus(CalculusName::GLP), &[]).is_ok());
        let e = check(&p, &builtin_calculus(CalculusName::GB), &[]).unwrap_err();
        assert!(e.reason.contains("rule not in calculus"));
        assert!(e.path.is_empty());
    }

    #[test]
    fn arity_errors() {
        let gb = builtin_calculus(CalculusName::GB);
        let leaf = Proof::premise(seq("|- p"), 0);
        let p = Proof::new(seq("|- p & q"), Justification::Logical("and-right-intro".parse().unwrap()), vec![leaf]);
        let e = check(&p, &gb, &[seq("|- p")]).unwrap_err();
        assert!(e.reason.starts_with("arity"), "{e}");
    }

    #[test]
    fn first_failure_is_leftmost_innermost() {
        let gb = builtin_calculus(CalculusName::GB);
        let bad = Proof::premise(seq("|- r"), 0);
        let also_bad = Proof::premise(seq("|- s"), 0);
        let p = Proof::new(
            seq("|- p & q"),
            Justification::Logical("and-right-intro".parse().unwrap()),
            vec![bad, also_bad],
        );
        let e = check(&p, &gb, &[seq("|- p")]).unwrap_err();
        assert_eq!(e.path, vec![0]);
    }

    #[test]
    fn axioms_with_context() {
        let gb = builtin_calculus(CalculusName::GB);
        assert!(check(&Proof::leaf(seq("p |- q, T"), Justification::Axiom(Axiom::TopRight)), &gb, &[]).is_ok());
        assert!(check(&Proof::leaf(seq("p |- q"), Justification::Axiom(Axiom::TopRight)), &gb, &[]).is_err());
        assert!(check(&Proof::leaf(seq("F |-"), Justification::Axiom(Axiom::BotLeft)), &gb, &[]).is_ok());
    }

    #[test]
    fn expansion_nodes() {
        let getl = builtin_calculus(CalculusName::GETL);
        let sigma = Substitution::new().with("p", "a & b".parse().unwrap());
        let kids = vec![Proof::premise(seq("|- p"), 0), Proof::premise(seq("|- q"), 1), Proof::premise(seq("p, q, r |- s"), 2)];
        let node = Proof::new(
            seq("r |- s"),
            Justification::Structural { rule: "limited-cut-left".into(), sigma: Some(sigma) },
            kids,
        );
        let prem = [seq("|- p"), seq("|- q"), seq("p, q, r |- s")];
        assert!(check(&node, &getl, &prem).is_ok());
        let unbalanced = Substitution::new().with("p", "a & ~a".parse().unwrap());
        let mut bad = node.clone();
        bad.just = Justification::Structural { rule: "limited-cut-left".into(), sigma: Some(unbalanced) };
        assert!(check(&bad, &getl, &prem).is_err());
    }
}
