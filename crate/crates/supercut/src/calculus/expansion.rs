use std::collections::BTreeSet;

use super::logical::at_set;
use super::structural::{Instantiation, SchemaItem, SchemaSequent, StructuralRule};
use crate::syntax::{rho, Atom, Formula, Sequent, Side, Substitution};

/// A substitution together with one of the rules it expands to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub sigma: Substitution,
    pub rule: StructuralRule,
}

/// Ground `schema` by `ground`, apply `sigma` and split into atomic parts.
/// Slots not fixed by `ground` are carried along unchanged.
fn expand_sequent(schema: &SchemaSequent, ground: &Instantiation, sigma: &Substitution) -> Vec<SchemaSequent> {
    let mut formulas = schema.fixed(&ground.atoms);
    let mut kept: [Vec<SchemaItem>; 2] = [Vec::new(), Vec::new()];
    for (k, side) in [Side::Left, Side::Right].into_iter().enumerate() {
        for slot in schema.slots(side) {
            match ground.slots.get(slot) {
                Some(content) => *formulas.side_mut(side) = formulas.side(side).sum(content),
                None => kept[k].push(SchemaItem::Slot(slot.clone())),
            }
        }
    }
    at_set(&sigma.apply_sequent(&formulas))
        .into_iter()
        .map(|member| {
            let base = SchemaSequent::from_atomic(&member);
            let mut left = base.left;
            let mut right = base.right;
            left.extend(kept[0].iter().cloned());
            right.extend(kept[1].iter().cloned());
            SchemaSequent::new(left, right)
        })
        .collect()
}

/// The sigma-expansions of `rule` after grounding it by `ground`.
pub fn sigma_expand(rule: &StructuralRule, ground: &Instantiation, sigma: &Substitution) -> Vec<StructuralRule> {
    let premises: Vec<SchemaSequent> = rule
        .premises
        .iter()
        .flat_map(|p| expand_sequent(p, ground, sigma))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    expand_sequent(&rule.conclusion, ground, sigma)
        .into_iter()
        .map(|c| StructuralRule::new(&rule.name, premises.clone(), c))
        .collect()
}

const LEAF: &str = "_";

/// Shapes of connective depth at most `depth`, with every leaf a placeholder.
fn shapes(depth: usize) -> Vec<Formula> {
    let leaf = Formula::atom(LEAF);
    if depth == 0 {
        return vec![leaf];
    }
    let smaller = shapes(depth - 1);
    let mut out = vec![leaf];
    out.extend(smaller.iter().map(|s| Formula::neg(s.clone())));
    for a in &smaller {
        for b in &smaller {
            out.push(Formula::and(a.clone(), b.clone()));
            out.push(Formula::or(a.clone(), b.clone()));
        }
    }
    out
}

fn number_leaves(shape: &Formula, next: &mut usize) -> Formula {
    match shape {
        Formula::Atom(_) => {
            *next += 1;
            Formula::atom(&format!("v{next}"))
        }
        Formula::Neg(a) => Formula::neg(number_leaves(a, next)),
        Formula::And(a, b) => {
            let a = number_leaves(a, next);
            Formula::and(a, number_leaves(b, next))
        }
        Formula::Or(a, b) => {
            let a = number_leaves(a, next);
            Formula::or(a, number_leaves(b, next))
        }
        other => other.clone(),
    }
}

/// Expansions of `rule` under substitutions sending each schema atom to a shape of
/// depth at most `depth_bound` over fresh, pairwise distinct atoms. Such substitutions
/// are balanced and non-conflicting. Results are deduplicated up to renaming of schema
/// atoms. Each rule keeps the premise order `sigma_expand` gives it. Mapping the
/// schema atoms into a concrete universe is left to the caller.
pub fn balanced_expansions(rule: &StructuralRule, depth_bound: usize) -> Vec<Expansion> {
    let atoms: Vec<Atom> = rule.schema_atoms().into_iter().collect();
    let shapes = shapes(depth_bound);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut choice = vec![0usize; atoms.len()];
    loop {
        let mut next = 0;
        let sigma: Substitution =
            atoms.iter().zip(&choice).map(|(a, &i)| (a.clone(), number_leaves(&shapes[i], &mut next))).collect();
        for r in sigma_expand(rule, &Instantiation::default(), &sigma) {
            if seen.insert(r.canonical()) {
                out.push(Expansion { sigma: sigma.clone(), rule: r });
            }
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < shapes.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Atomic structural rules equivalent to the Hilbert-style rule `premises / conclusion`.
pub fn hilbert_to_structural(premises: &[Formula], conclusion: Option<&Formula>) -> Vec<StructuralRule> {
    let prem: Vec<SchemaSequent> = premises
        .iter()
        .flat_map(|f| at_set(&rho(f)))
        .collect::<BTreeSet<Sequent>>()
        .iter()
        .map(SchemaSequent::from_atomic)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let goal = conclusion.map(rho).unwrap_or_else(Sequent::empty);
    at_set(&goal)
        .iter()
        .enumerate()
        .map(|(i, c)| StructuralRule::new(&format!("hilbert-{}", i + 1), prem.clone(), SchemaSequent::from_atomic(c)))
        .collect()
}
