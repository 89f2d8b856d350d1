use std::collections::BTreeSet;

use super::{NodeClass, Path, Proof};
use crate::syntax::{Formula, Sequent};

/// Every structural step has atomic premises and an atomic conclusion.
pub fn is_structurally_atomic(p: &Proof) -> bool {
    p.nodes().iter().all(|(_, n)| is_structurally_atomic_node(n))
}

/// The root step is not structural, or it is on atomic sequents only.
pub fn is_structurally_atomic_node(n: &Proof) -> bool {
    n.class() != NodeClass::Structural || (n.conclusion.is_atomic() && n.children.iter().all(|c| c.conclusion.is_atomic()))
}

/// On every branch, all eliminations lie above all introductions.
pub fn is_analytic_synthetic(p: &Proof) -> bool {
    fn go(p: &Proof) -> Option<bool> {
        // Some(has an introduction in this subtree), None on violation
        let mut has_intro = false;
        for c in &p.children {
            has_intro |= go(c)?;
        }
        if p.class() == NodeClass::Elim && has_intro {
            return None;
        }
        Some(has_intro || p.class() == NodeClass::Intro)
    }
    go(p).is_some()
}

/// No elimination step directly follows an introduction step.
pub fn is_analytic_synthetic_local(p: &Proof) -> bool {
    p.nodes()
        .iter()
        .all(|(_, n)| n.class() != NodeClass::Elim || n.children.iter().all(|c| c.class() != NodeClass::Intro))
}

/// Every formula in the proof is a subformula of a premise or of the conclusion.
pub fn has_subformula_property(p: &Proof, premises: &[Sequent]) -> bool {
    let mut allowed: BTreeSet<Formula> = BTreeSet::new();
    for s in premises.iter().chain(std::iter::once(&p.conclusion)) {
        for f in s.formulas() {
            allowed.extend(f.subformulas());
        }
    }
    p.nodes().iter().all(|(_, n)| n.conclusion.formulas().all(|f| allowed.contains(f)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhaseSplit {
    pub elim: Vec<Path>,
    pub structural: Vec<Path>,
    pub intro: Vec<Path>,
}

/// Partition the rule nodes of a normal proof into its three zones.
pub fn phase_split(p: &Proof) -> Result<PhaseSplit, String> {
    if !is_structurally_atomic(p) {
        return Err("proof is not structurally atomic".into());
    }
    if !is_analytic_synthetic(p) {
        return Err("proof is not analytic-synthetic".into());
    }
    let mut out = PhaseSplit::default();
    for (path, n) in p.nodes() {
        match n.class() {
            NodeClass::Elim => out.elim.push(path),
            NodeClass::Structural => out.structural.push(path),
            NodeClass::Intro => out.intro.push(path),
            NodeClass::Premise | NodeClass::Axiom => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{LogicalRuleId, RuleKind, CUT, WEAKENING_LEFT};
    use crate::proof::Justification;

    fn seq(s: &str) -> Sequent {
        s.parse().unwrap()
    }

    fn logical(id: LogicalRuleId, c: &str, kids: Vec<Proof>) -> Proof {
        Proof::new(seq(c), Justification::Logical(id), kids)
    }

    #[test]
    fn analytic_synthetic_examples() {
        let leaf = Proof::premise(seq("|- p & q"), 0);
        let elim = logical(LogicalRuleId::elim(RuleKind::AndRight), "|- p", vec![leaf]);
        let intro = logical(LogicalRuleId::intro(RuleKind::OrRight), "|- p | q", vec![
            Proof::structural(WEAKENING_LEFT, seq("|- p, q"), vec![]),
        ]);
        let good = logical(LogicalRuleId::intro(RuleKind::NegLeft), "~p |-", vec![elim.clone()]);
        assert!(is_analytic_synthetic(&good));
        let bad = logical(LogicalRuleId::elim(RuleKind::OrRight), "|- p, q", vec![intro]);
        assert!(!is_analytic_synthetic(&bad));
        assert!(!is_analytic_synthetic_local(&bad));
        assert!(is_analytic_synthetic(&Proof::structural(CUT, seq("|-"), vec![])));
    }

    #[test]
    fn structural_atomicity() {
        let id = Proof::structural("identity", seq("p & q |- p & q"), vec![]);
        assert!(!is_structurally_atomic(&id));
        let cut = Proof::structural(CUT, seq("a |- b"), vec![Proof::premise(seq("a |- p"), 0), Proof::premise(seq("p |- b"), 1)]);
        assert!(is_structurally_atomic(&cut));
    }

    #[test]
    fn subformula_property() {
        let w = Proof::structural(WEAKENING_LEFT, seq("r, p |- q"), vec![Proof::premise(seq("p |- q"), 0)]);
        let r_cut = Proof::structural(
            CUT,
            seq("p |- q"),
            vec![Proof::structural("weakening-right", seq("p |- q, r"), vec![Proof::premise(seq("p |- q"), 0)]), w],
        );
        assert!(!has_subformula_property(&r_cut, &[seq("p |- q")]));
        assert!(has_subformula_property(&Proof::premise(seq("p |- q"), 0), &[seq("p |- q")]));
    }

    #[test]
    fn zones() {
        let leaf = Proof::premise(seq("|- p"), 0);
        let z = phase_split(&leaf).unwrap();
        assert!(z.elim.is_empty() && z.structural.is_empty() && z.intro.is_empty());
        let intro = logical(LogicalRuleId::intro(RuleKind::OrRight), "|- p | q", vec![
            Proof::structural(WEAKENING_LEFT, seq("|- p, q"), vec![leaf]),
        ]);
        let z = phase_split(&intro).unwrap();
        assert_eq!(z.intro, vec![Vec::<usize>::new()]);
        assert_eq!(z.structural, vec![vec![0]]);
    }
}
