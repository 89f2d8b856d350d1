use super::{elim, Context, Pass, RewriteTrace, TransformError};
use crate::calculus::{axiom_for, match_logical, Calculus};
use crate::proof::{Justification, NodeClass, Path, Proof};
use crate::syntax::Sequent;

/// Move every elimination above every introduction on its branch.
/// Expects a structurally atomic proof.
pub fn make_analytic_synthetic(p: &Proof, calc: &Calculus) -> Result<Proof, TransformError> {
    reorder_with(p, &Context::new(calc, &[]), &mut RewriteTrace::default())
}

pub(crate) fn reorder_with(p: &Proof, ctx: &Context, trace: &mut RewriteTrace) -> Result<Proof, TransformError> {
    if !crate::proof::is_structurally_atomic(p) {
        return Err(TransformError::Precondition("proof is not structurally atomic".into()));
    }
    super::run_pass(p, Pass::Reorder, ctx, trace, next_site)
}

/// An elimination directly below an introduction, or below an axiom. The
/// deepest one wins, leftmost among equals.
pub(super) fn next_site(p: &Proof) -> Option<Path> {
    fn is_site(n: &Proof) -> bool {
        next_site_at_root(n).is_some()
    }
    // pre-order visits equal depths left to right, so only a strictly deeper site replaces the best
    fn go(n: &Proof, path: &mut Path, best: &mut Option<Path>) {
        if is_site(n) && best.as_ref().is_none_or(|b| path.len() > b.len()) {
            *best = Some(path.clone());
        }
        for (i, c) in n.children.iter().enumerate() {
            path.push(i);
            go(c, path, best);
            path.pop();
        }
    }
    let mut best = None;
    go(p, &mut Vec::new(), &mut best);
    best
}

pub(crate) fn reorder_node(node: &Proof) -> Result<Proof, String> {
    let Justification::Logical(e_rule) = node.just else {
        return Err("not an elimination".into());
    };
    let below = &node.children[0];
    if below.class() == NodeClass::Axiom {
        let ax = axiom_for(&node.conclusion).ok_or("elimination removed the axiom's constant")?;
        return Ok(Proof::leaf(node.conclusion.clone(), Justification::Axiom(ax)));
    }
    // The eliminated formula was the one just introduced.
    if let Some(k) = below.children.iter().position(|c| c.conclusion == node.conclusion) {
        return Ok(below.children[k].clone());
    }
    // Otherwise it sits in the context: eliminate it in each premise first.
    let principal = match_logical(e_rule, std::slice::from_ref(&below.conclusion), &node.conclusion).map_err(|e| e.0)?;
    let side = e_rule.kind.side();
    let kept = below.conclusion.without(side, &principal).expect("principal present");
    let added: Sequent = node.conclusion.minus(&kept).ok_or("elimination does not extend its context")?;
    let kids = below
        .children
        .iter()
        .map(|c| {
            let rest = c.conclusion.without(side, &principal).ok_or("eliminated formula missing from a premise")?;
            Ok(elim(e_rule.kind, c.clone(), rest.sum(&added)))
        })
        .collect::<Result<Vec<_>, String>>()?;
    debug_assert!(matches!(below.just, Justification::Logical(r) if r.class() == crate::calculus::RuleClass::Intro));
    Ok(Proof::new(node.conclusion.clone(), below.just.clone(), kids))
}

/// Apply reorder steps to an elimination right away, following it into the
/// premises it is permuted into. Nodes that are not sites are returned as they are.
pub(super) fn push_down(node: Proof) -> Proof {
    if next_site_at_root(&node).is_none() {
        return node;
    }
    let side_case = node.children[0].class() == NodeClass::Intro
        && node.children[0].children.iter().all(|c| c.conclusion != node.conclusion);
    match reorder_node(&node) {
        Ok(r) if side_case => {
            let Proof { conclusion, just, children } = r;
            Proof::new(conclusion, just, children.into_iter().map(push_down).collect())
        }
        Ok(r) => r,
        Err(_) => node,
    }
}

fn next_site_at_root(n: &Proof) -> Option<()> {
    (n.class() == NodeClass::Elim
        && match n.children[0].class() {
            NodeClass::Intro => true,
            NodeClass::Axiom => axiom_for(&n.conclusion).is_some(),
            _ => false,
        })
    .then_some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{builtin_calculus, CalculusName, RuleKind};
    use crate::proof::{check, is_analytic_synthetic};
    use crate::transform::intro;

    fn seq(s: &str) -> Sequent {
        s.parse().unwrap()
    }

    #[test]
    fn principal_pair_cancels() {
        let prem = [seq("p, q |- r")];
        let i = intro(RuleKind::AndLeft, vec![Proof::premise(prem[0].clone(), 0)], seq("p & q |- r"));
        let p = elim(RuleKind::AndLeft, i, seq("p, q |- r"));
        let calc = builtin_calculus(CalculusName::GB);
        let q = make_analytic_synthetic(&p, &calc).unwrap();
        assert_eq!(q, Proof::premise(prem[0].clone(), 0));
    }

    #[test]
    fn side_pair_permutes() {
        let prem = [seq("p |- r, s & t"), seq("q |- r, s & t")];
        let i = intro(
            RuleKind::OrLeft,
            vec![Proof::premise(prem[0].clone(), 0), Proof::premise(prem[1].clone(), 1)],
            seq("p | q |- r, s & t"),
        );
        let p = elim(RuleKind::AndRight, i, seq("p | q |- r, t"));
        let calc = builtin_calculus(CalculusName::GB);
        check(&p, &calc, &prem).unwrap();
        let q = make_analytic_synthetic(&p, &calc).unwrap();
        check(&q, &calc, &prem).unwrap_or_else(|e| panic!("{e}\n{q}"));
        assert!(is_analytic_synthetic(&q));
        assert_eq!(q.just.to_string(), "or-left-intro");
    }
}
