use std::collections::BTreeSet;

use super::InterpolationError;
use crate::calculus::{
    classify, match_structural, sigma_expand, Calculus, Instantiation, StructuralRule, CONTRACTION_LEFT,
    CONTRACTION_RIGHT, IDENTITY, WEAKENING_LEFT, WEAKENING_RIGHT,
};
use crate::engine::weaken_to;
use crate::proof::{Justification, NodeClass, Path, Proof};
use crate::syntax::{Atom, Formula, Sequent, Side};

fn precondition(msg: impl Into<String>) -> InterpolationError {
    InterpolationError::Precondition(msg.into())
}

/// Nodes with only eliminations and structural steps above and only
/// introductions below. Branches closed by an axiom contribute nothing.
pub fn critical_paths(p: &Proof) -> Result<Vec<Path>, InterpolationError> {
    fn go(p: &Proof, path: &mut Path, out: &mut Vec<Path>) -> Result<(), InterpolationError> {
        match p.class() {
            NodeClass::Intro => {
                for (i, c) in p.children.iter().enumerate() {
                    path.push(i);
                    go(c, path, out)?;
                    path.pop();
                }
            }
            NodeClass::Axiom => {}
            _ if p.count_class(NodeClass::Intro) > 0 => {
                return Err(precondition(format!("introduction above a {} step", p.just)))
            }
            _ => out.push(path.clone()),
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut out)?;
    Ok(out)
}

pub fn critical_nodes(p: &Proof) -> Result<BTreeSet<Sequent>, InterpolationError> {
    Ok(critical_paths(p)?.iter().map(|path| p.at(path).expect("own path").conclusion.clone()).collect())
}

/// The schema a structural step instantiates, and the values it uses.
fn step_instance(node: &Proof, calc: &Calculus) -> Result<(StructuralRule, Instantiation), InterpolationError> {
    let Justification::Structural { rule, sigma } = &node.just else {
        return Err(precondition("not a structural step"));
    };
    let schema = calc.rule(rule).ok_or_else(|| precondition(format!("rule not in calculus: {rule}")))?;
    let kids: Vec<Sequent> = node.children.iter().map(|c| c.conclusion.clone()).collect();
    let candidates = match sigma {
        None => vec![schema],
        Some(s) => sigma_expand(&schema, &Instantiation::default(), s),
    };
    candidates
        .into_iter()
        .find_map(|r| match_structural(&r, &kids, &node.conclusion, false).ok().map(|i| (r, i)))
        .ok_or_else(|| precondition(format!("{} does not match its rule", node.just)))
}

/// A proof of `node.conclusion - remove` with the removed occurrences traced
/// up through the structural steps that carried them.
fn restrict(node: &Proof, remove: &Sequent, calc: &Calculus) -> Result<Proof, InterpolationError> {
    if remove.is_empty() {
        return Ok(node.clone());
    }
    let target = node.conclusion.minus(remove).ok_or_else(|| precondition("removal exceeds the sequent"))?;
    let name = node.just.structural_name().ok_or_else(|| {
        precondition(format!("foreign atom in '{}' reaches a {} step", node.conclusion, node.just))
    })?;
    let side_of = |l: &str| if l == WEAKENING_LEFT || l == CONTRACTION_LEFT { Side::Left } else { Side::Right };
    match name {
        WEAKENING_LEFT | WEAKENING_RIGHT => {
            let side = side_of(name);
            let child = &node.children[0];
            let added = node.conclusion.minus(&child.conclusion).expect("weakening adds");
            let w = added.side(side).iter().next().expect("one formula").clone();
            if remove.side(side).contains(&w) {
                let rest = remove.without(side, &w).expect("present");
                restrict(child, &rest, calc)
            } else {
                let inner = restrict(child, remove, calc)?;
                Ok(Proof::structural(name, target, vec![inner]))
            }
        }
        CONTRACTION_LEFT | CONTRACTION_RIGHT => {
            let side = side_of(name);
            let child = &node.children[0];
            let extra = child.conclusion.minus(&node.conclusion).expect("contraction removes");
            let f = extra.side(side).iter().next().expect("one formula").clone();
            if remove.side(side).contains(&f) {
                restrict(child, &remove.clone().with(side, f), calc)
            } else {
                let inner = restrict(child, remove, calc)?;
                Ok(Proof::structural(name, target, vec![inner]))
            }
        }
        IDENTITY => Err(precondition("Identity is not a generalized cut rule")),
        _ => {
            let (rule, inst) = step_instance(node, calc)?;
            let mut reduced = inst.clone();
            for side in [Side::Left, Side::Right] {
                for f in remove.side(side).iter() {
                    let slot = rule
                        .conclusion
                        .slots(side)
                        .find(|x| reduced.slots.get(*x).is_some_and(|m| m.contains(f)))
                        .cloned()
                        .ok_or_else(|| precondition(format!("'{f}' is not in a context of {}", node.just)))?;
                    reduced.slots.get_mut(&slot).expect("slot").remove(f);
                }
            }
            let (prem, concl) = rule.instantiate(&reduced);
            if concl != target {
                return Err(precondition(format!("cannot remove '{remove}' from {}", node.just)));
            }
            let kids = node
                .children
                .iter()
                .zip(&prem)
                .map(|(c, p)| {
                    let rem = c.conclusion.minus(p).expect("slot shrinks");
                    restrict(c, &rem, calc)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Proof::new(target, node.just.clone(), kids))
        }
    }
}

fn foreign_occurrences(s: &Sequent, keep: &BTreeSet<Atom>) -> Sequent {
    let pick = |m: &crate::syntax::Multiset| -> Vec<Formula> {
        m.iter().filter(|f| f.as_atom().is_some_and(|a| !keep.contains(a))).cloned().collect()
    };
    Sequent::new(pick(&s.left), pick(&s.right))
}

/// Rebuild the node at each path without atoms outside `keep`, then weaken
/// back to the original sequent.
pub(crate) fn prune_at(
    p: &Proof,
    paths: &[Path],
    keep: &BTreeSet<Atom>,
    calc: &Calculus,
) -> Result<Proof, InterpolationError> {
    let mut out = p.clone();
    for path in paths {
        let node = p.at(path).expect("boundary path");
        let remove = foreign_occurrences(&node.conclusion, keep);
        if remove.is_empty() {
            continue;
        }
        let inner = restrict(node, &remove, calc)?;
        *out.at_mut(path).expect("boundary path") = weaken_to(inner, &node.conclusion);
    }
    Ok(out)
}

/// Remove, below every critical node, the atoms not among `premise_atoms`.
/// Their occurrences can only come from weakening, which is moved below.
pub fn prune_foreign_atoms(
    p: &Proof,
    premise_atoms: &BTreeSet<Atom>,
    calc: &Calculus,
) -> Result<Proof, InterpolationError> {
    for r in &calc.specific {
        let c = classify(r);
        if !c.is_generalized_cut || c.introduces_new_variables {
            return Err(InterpolationError::Unsupported(format!("{} is not a generalized cut rule", r.name)));
        }
    }
    if p.count_rule(IDENTITY) > 0 {
        return Err(InterpolationError::Unsupported("Identity is not a generalized cut rule".into()));
    }
    prune_at(p, &critical_paths(p)?, premise_atoms, calc)
}

/// Follow weakenings by formulas with atoms outside `keep` upwards.
pub(crate) fn below_foreign_weakening(p: &Proof, path: &Path, keep: &BTreeSet<Atom>) -> Path {
    let mut path = path.clone();
    loop {
        let node = p.at(&path).expect("path");
        let is_w = matches!(node.just.structural_name(), Some(WEAKENING_LEFT) | Some(WEAKENING_RIGHT));
        if !is_w {
            return path;
        }
        let added = node.conclusion.minus(&node.children[0].conclusion).expect("weakening adds");
        if added.atoms().iter().all(|a| keep.contains(a)) {
            return path;
        }
        path.push(0);
    }
}
