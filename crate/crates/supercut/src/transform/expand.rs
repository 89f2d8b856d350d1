use std::collections::BTreeSet;

use super::{cut_on, elim, identity, intro, Context, Pass, RewriteTrace, TransformError};
use crate::calculus::{
    axiom_for, match_structural, sigma_expand, Calculus, Instantiation, RuleKind, StructuralRule, CONTRACTION_LEFT,
    CONTRACTION_RIGHT, CUT, IDENTITY, WEAKENING_LEFT, WEAKENING_RIGHT,
};
use crate::engine::{contract_to, weaken_to, PoolRule, Saturation, PLACEHOLDER_ATOM};
use crate::proof::{is_structurally_atomic_node, Justification, NodeClass, Path, Proof};
use crate::syntax::{
    atoms_of, decompose_substitution, is_atomic_subst, Atom, Formula, FreshNames, Sequent, Side, Substitution,
};

/// Replace every structural step on non-atomic sequents by atomic ones plus
/// logical rules, innermost first.
pub fn expand_structural(p: &Proof, calc: &Calculus) -> Result<Proof, TransformError> {
    expand_with(p, &Context::new(calc, &[]), &mut RewriteTrace::default())
}

pub(crate) fn expand_with(p: &Proof, ctx: &Context, trace: &mut RewriteTrace) -> Result<Proof, TransformError> {
    super::run_pass(p, Pass::Expand, ctx, trace, next_site)
}

pub(super) fn next_site(p: &Proof) -> Option<Path> {
    super::find_postorder(p, &|n| !is_structurally_atomic_node(n))
}

pub(crate) fn expand_node(node: &Proof, ctx: &Context) -> Result<Proof, String> {
    let Justification::Structural { rule: name, sigma } = &node.just else {
        return Err("not a structural step".into());
    };
    let schema = ctx.calc.rule(name).ok_or_else(|| format!("rule not in calculus: {name}"))?;
    let kids: Vec<Sequent> = node.children.iter().map(|c| c.conclusion.clone()).collect();
    let basic = [IDENTITY, CUT, WEAKENING_LEFT, WEAKENING_RIGHT, CONTRACTION_LEFT, CONTRACTION_RIGHT];
    if sigma.is_none() && basic.contains(&name.as_str()) {
        let inst = match_structural(&schema, &kids, &node.conclusion, false).map_err(|e| e.0)?;
        let main = inst.atoms.values().next().cloned().ok_or("rule without a main formula")?;
        if !main.is_atomic() {
            return Ok(reduce(name, &main, node));
        }
        return lift(node.clone(), &main, ctx);
    }
    let pool = expansion_pool(&schema, sigma.as_ref(), &kids, &node.conclusion)?;
    sandwich(node, pool, ctx.max_facts)
}

/// A basic structural step on an atomic main formula with compound context:
/// permute it above the logical steps it meets, where the context formulas
/// are handled, and fall back to saturation where it cannot move.
fn lift(node: Proof, main: &Formula, ctx: &Context) -> Result<Proof, String> {
    if is_structurally_atomic_node(&node) {
        return Ok(node);
    }
    if let Some(ax) = axiom_for(&node.conclusion) {
        if node.children.iter().any(|c| c.class() == NodeClass::Axiom) {
            return Ok(Proof::leaf(node.conclusion, Justification::Axiom(ax)));
        }
    }
    let name = node.just.structural_name().expect("structural").to_string();
    let movable = |c: &Proof| matches!(c.class(), NodeClass::Intro | NodeClass::Elim);
    let lifted = match name.as_str() {
        WEAKENING_LEFT | WEAKENING_RIGHT | CONTRACTION_LEFT | CONTRACTION_RIGHT if movable(&node.children[0]) => {
            let side = if name == WEAKENING_LEFT || name == CONTRACTION_LEFT { Side::Left } else { Side::Right };
            let weakening = name == WEAKENING_LEFT || name == WEAKENING_RIGHT;
            let child = &node.children[0];
            let adjust = |s: &Sequent| if weakening { Some(s.clone().with(side, main.clone())) } else { s.without(side, main) };
            let targets: Option<Vec<Sequent>> = child.children.iter().map(|g| adjust(&g.conclusion)).collect();
            let enough = |g: &Proof| weakening || g.conclusion.side(side).count(main) >= 2;
            match targets {
                Some(t) if child.children.iter().all(enough) => {
                    let kids = child
                        .children
                        .iter()
                        .zip(t)
                        .map(|(g, t)| lift(Proof::structural(&name, t, vec![g.clone()]), main, ctx))
                        .collect::<Result<Vec<_>, _>>()?;
                    Some(Proof::new(node.conclusion.clone(), child.just.clone(), kids))
                }
                _ => None,
            }
        }
        CUT => {
            let (l, r) = (&node.children[0], &node.children[1]);
            let has = |c: &Proof, side| c.children.iter().all(|g: &Proof| g.conclusion.side(side).contains(main));
            if movable(l) && has(l, Side::Right) {
                let kids = l
                    .children
                    .iter()
                    .map(|g| lift(cut_on(g.clone(), r.clone(), main), main, ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Proof::new(node.conclusion.clone(), l.just.clone(), kids))
            } else if movable(r) && has(r, Side::Left) {
                let kids = r
                    .children
                    .iter()
                    .map(|g| lift(cut_on(l.clone(), g.clone(), main), main, ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Proof::new(node.conclusion.clone(), r.just.clone(), kids))
            } else {
                None
            }
        }
        _ => None,
    };
    match lifted {
        Some(p) => Ok(p),
        None => {
            let schema = ctx.calc.rule(&name).ok_or_else(|| format!("rule not in calculus: {name}"))?;
            let pool = if name == IDENTITY || name == CUT { vec![PoolRule { rule: schema, sigma: None }] } else { vec![] };
            sandwich(&node, pool, ctx.max_facts)
        }
    }
}

/// Local reduction of a basic structural step on the compound formula `main`.
fn reduce(name: &str, main: &Formula, node: &Proof) -> Proof {
    let concl = &node.conclusion;
    match name {
        IDENTITY => reduce_identity(main),
        CUT => {
            let [l, r] = [node.children[0].clone(), node.children[1].clone()];
            reduce_cut(main, l, r, concl)
        }
        WEAKENING_LEFT | WEAKENING_RIGHT => {
            let side = if name == WEAKENING_LEFT { Side::Left } else { Side::Right };
            let child = node.children[0].clone();
            match RuleKind::for_formula(side, main) {
                None => axiom(concl),
                Some(kind) => {
                    let prem = kind.intro_premises(&child.conclusion, main).expect("shape");
                    intro(kind, prem.iter().map(|s| weaken_to(child.clone(), s)).collect(), concl.clone())
                }
            }
        }
        _ => {
            let side = if name == CONTRACTION_LEFT { Side::Left } else { Side::Right };
            let child = &node.children[0];
            let Some(kind) = RuleKind::for_formula(side, main) else {
                return axiom(concl);
            };
            let rest = concl.without(side, main).expect("contracted formula");
            let targets = kind.intro_premises(&rest, main).expect("shape");
            let mut kids = Vec::new();
            for (j, target) in targets.iter().enumerate() {
                let once = &kind.intro_premises(&child.conclusion.without(side, main).expect("two copies"), main)
                    .expect("shape")[j];
                let e1 = elim_now(kind, child.clone(), once.clone());
                let twice = &kind.intro_premises(&once.without(side, main).expect("one copy"), main).expect("shape")[j];
                kids.push(contract_to(elim_now(kind, e1, twice.clone()), target));
            }
            intro(kind, kids, concl.clone())
        }
    }
}

/// An elimination on `premise`, already permuted past the introductions it meets.
fn elim_now(kind: RuleKind, premise: Proof, conclusion: Sequent) -> Proof {
    super::reorder::push_down(elim(kind, premise, conclusion))
}

fn axiom(s: &Sequent) -> Proof {
    Proof::leaf(s.clone(), Justification::Axiom(axiom_for(s).expect("axiom sequent")))
}

fn reduce_identity(main: &Formula) -> Proof {
    let concl = Sequent::new([main.clone()], [main.clone()]);
    if axiom_for(&concl).is_some() {
        return axiom(&concl);
    }
    let kl = RuleKind::for_formula(Side::Left, main).expect("compound");
    let kr = RuleKind::for_formula(Side::Right, main).expect("compound");
    let outer = kl.intro_premises(&Sequent::new([], [main.clone()]), main).expect("shape");
    let mut kids = Vec::new();
    for l in &outer {
        if axiom_for(l).is_some() {
            kids.push(axiom(l));
            continue;
        }
        let inner = kr.intro_premises(&l.without(Side::Right, main).expect("main on the right"), main).expect("shape");
        let leaves = inner
            .iter()
            .map(|s| {
                if axiom_for(s).is_some() {
                    return axiom(s);
                }
                let shared = s.left.iter().find(|f| s.right.contains(f)).expect("a component on both sides");
                weaken_to(identity(shared), s)
            })
            .collect();
        kids.push(intro(kr, leaves, l.clone()));
    }
    intro(kl, kids, concl)
}

fn reduce_cut(main: &Formula, left: Proof, right: Proof, concl: &Sequent) -> Proof {
    let rest_l = left.conclusion.without(Side::Right, main).expect("cut formula");
    let rest_r = right.conclusion.without(Side::Left, main).expect("cut formula");
    match main {
        Formula::Top => weaken_to(elim_now(RuleKind::TopLeft, right, rest_r), concl),
        Formula::Bot => weaken_to(elim_now(RuleKind::BotRight, left, rest_l), concl),
        Formula::Neg(a) => {
            let l = elim_now(RuleKind::NegRight, left, rest_l.with(Side::Left, (**a).clone()));
            let r = elim_now(RuleKind::NegLeft, right, rest_r.with(Side::Right, (**a).clone()));
            cut_on(r, l, a)
        }
        Formula::And(a, b) => {
            let la = elim_now(RuleKind::AndRight, left.clone(), rest_l.clone().with(Side::Right, (**a).clone()));
            let lb = elim_now(RuleKind::AndRight, left, rest_l.with(Side::Right, (**b).clone()));
            let r = elim_now(RuleKind::AndLeft, right, rest_r.with(Side::Left, (**a).clone()).with(Side::Left, (**b).clone()));
            let first = cut_on(la, r, a);
            contract_to(cut_on(lb, first, b), concl)
        }
        Formula::Or(a, b) => {
            let l = elim_now(RuleKind::OrRight, left, rest_l.with(Side::Right, (**a).clone()).with(Side::Right, (**b).clone()));
            let ra = elim_now(RuleKind::OrLeft, right.clone(), rest_r.clone().with(Side::Left, (**a).clone()));
            let rb = elim_now(RuleKind::OrLeft, right, rest_r.with(Side::Left, (**b).clone()));
            let first = cut_on(l, ra, a);
            contract_to(cut_on(first, rb, b), concl)
        }
        Formula::Atom(_) => unreachable!("atomic cuts are not reduced"),
    }
}

/// Decompose the step's premises into atoms, saturate with `pool`, and
/// rebuild the conclusion by introductions.
/// Saturate over the children's At-sets and prove the conclusion from them.
/// The children enter as placeholders; each is then put back with the
/// eliminations above it permuted into it, so only the branches used are copied.
fn sandwich(node: &Proof, pool: Vec<PoolRule>, max_facts: usize) -> Result<Proof, String> {
    let seeds: Vec<(Sequent, Proof)> =
        node.children.iter().enumerate().map(|(i, c)| (c.conclusion.clone(), Proof::premise(c.conclusion.clone(), i))).collect();
    let mut universe: BTreeSet<Atom> = atoms_of(seeds.iter().map(|(s, _)| s));
    universe.extend(node.conclusion.atoms());
    if universe.is_empty() {
        universe.insert(Atom::new(PLACEHOLDER_ATOM));
    }
    let sat = Saturation::new(seeds, universe.into_iter().collect(), pool, max_facts).map_err(|e| e.to_string())?;
    let skeleton = sat.prove(&node.conclusion).ok_or("no atomic derivation of the conclusion")?;
    Ok(fill(skeleton, &node.children))
}

fn fill(p: Proof, children: &[Proof]) -> Proof {
    let Proof { conclusion, just, children: kids } = p;
    if let Justification::Premise(i) = just {
        return children[i].clone();
    }
    let kids = kids.into_iter().map(|k| fill(k, children)).collect();
    super::reorder::push_down(Proof::new(conclusion, just, kids))
}

/// Pool for a step of a specific rule: the rule itself when its schema atoms
/// are instantiated by atoms, otherwise the expansions by the balanced part
/// of the instantiating substitution.
fn expansion_pool(
    schema: &StructuralRule,
    sigma: Option<&Substitution>,
    kids: &[Sequent],
    concl: &Sequent,
) -> Result<Vec<PoolRule>, String> {
    let atoms = schema.schema_atoms();
    let composite: Substitution = match sigma {
        None => {
            let inst = match_structural(schema, kids, concl, false).map_err(|e| e.0)?;
            inst.atoms.into_iter().collect()
        }
        Some(s) => {
            let inst = sigma_expand(schema, &Instantiation::default(), s)
                .iter()
                .find_map(|r| match_structural(r, kids, concl, false).ok())
                .ok_or("not an instance of any expansion")?;
            let outer: Substitution = inst.atoms.into_iter().collect();
            atoms.iter().map(|p| (p.clone(), outer.apply(&s.image(p)))).collect()
        }
    };
    if is_atomic_subst(&composite, &atoms) {
        return Ok(vec![PoolRule { rule: schema.clone(), sigma: None }]);
    }
    let (bnc, _) = decompose_substitution(&composite, &atoms, &mut FreshNames::new());
    let bnc = plain_leaves(&bnc);
    Ok(sigma_expand(schema, &Instantiation::default(), &bnc)
        .into_iter()
        .map(|rule| PoolRule { rule, sigma: Some(bnc.clone()) })
        .collect())
}

/// Rename the reserved leaf names of a substitution to `v1`, `v2`, ... so
/// that rule labels stay parseable.
fn plain_leaves(s: &Substitution) -> Substitution {
    let leaves: Vec<Atom> = s.iter().flat_map(|(_, f)| f.atoms()).collect::<BTreeSet<_>>().into_iter().collect();
    let rename = |a: &Atom| leaves.iter().position(|b| b == a).map(|i| Atom::new(&format!("v{}", i + 1)));
    s.iter().map(|(p, f)| (p.clone(), f.rename(&rename))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{builtin_calculus, CalculusName, LIMITED_CUT_LEFT};
    use crate::proof::{check, is_structurally_atomic, NodeClass};

    fn seq(s: &str) -> Sequent {
        s.parse().unwrap()
    }

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn expanded(p: &Proof, name: CalculusName, prem: &[Sequent]) -> Proof {
        let calc = builtin_calculus(name);
        check(p, &calc, prem).unwrap_or_else(|e| panic!("input: {e}\n{p}"));
        let q = expand_structural(p, &calc).unwrap();
        check(&q, &calc, prem).unwrap_or_else(|e| panic!("{e}\n{q}"));
        assert_eq!(q.conclusion, p.conclusion);
        assert!(is_structurally_atomic(&q), "{q}");
        assert!(q.premise_leaves().is_subset(&p.premise_leaves()));
        q
    }

    #[test]
    fn compound_cut_becomes_cuts_on_components() {
        let prem = [seq("|- p & q"), seq("p & q |- r")];
        let p = Proof::structural(CUT, seq("|- r"), vec![Proof::premise(prem[0].clone(), 0), Proof::premise(prem[1].clone(), 1)]);
        let q = expanded(&p, CalculusName::GK, &prem);
        let cut_formulas: BTreeSet<Formula> = q
            .nodes()
            .into_iter()
            .filter(|(_, n)| n.just.structural_name() == Some(CUT))
            .map(|(_, n)| {
                let inst = match_structural(&crate::calculus::named_rule(CUT).unwrap(), &[n.children[0].conclusion.clone(), n.children[1].conclusion.clone()], &n.conclusion, false).unwrap();
                inst.atoms.values().next().unwrap().clone()
            })
            .collect();
        assert_eq!(cut_formulas, [f("p"), f("q")].into_iter().collect());
    }

    #[test]
    fn weakening_by_conjunction_ends_in_intro() {
        let prem = [seq("r |- s")];
        let p = Proof::structural(WEAKENING_LEFT, seq("p & q, r |- s"), vec![Proof::premise(prem[0].clone(), 0)]);
        let q = expanded(&p, CalculusName::GB, &prem);
        assert_eq!(q.count_class(NodeClass::Elim), 0);
        assert_eq!(q.just.to_string(), "and-left-intro");
    }

    #[test]
    fn identity_and_contraction_on_compounds() {
        for s in ["p & ~q", "p | (q & T)", "~~p", "T", "F", "(p | q) & ~(r | F)"] {
            let p = Proof::structural(IDENTITY, Sequent::new([f(s)], [f(s)]), vec![]);
            expanded(&p, CalculusName::GLP, &[]);
        }
        let prem = [seq("p | ~q, p | ~q |- r & s, r & s")];
        let p = Proof::structural(CONTRACTION_LEFT, seq("p | ~q |- r & s, r & s"), vec![Proof::premise(prem[0].clone(), 0)]);
        let p = Proof::structural(CONTRACTION_RIGHT, seq("p | ~q |- r & s"), vec![p]);
        expanded(&p, CalculusName::GB, &prem);
    }

    #[test]
    fn compound_cuts_of_each_shape() {
        for c in ["~p", "p | q", "T", "F", "~(p & q) | r"] {
            let prem = [Sequent::new([f("a")], [f(c), f("b")]), Sequent::new([f(c), f("d")], [f("e")])];
            let concl = seq("a, d |- b, e");
            let p = Proof::structural(CUT, concl, vec![Proof::premise(prem[0].clone(), 0), Proof::premise(prem[1].clone(), 1)]);
            expanded(&p, CalculusName::GK, &prem);
        }
    }

    #[test]
    fn atomic_rule_with_compound_context() {
        let prem = [seq("|- p"), seq("p, q & r |- s | t")];
        let rule = crate::calculus::named_rule(LIMITED_CUT_LEFT).unwrap();
        let p = Proof::structural(&rule.name, seq("q & r |- s | t"), vec![Proof::premise(prem[0].clone(), 0), Proof::premise(prem[1].clone(), 1)]);
        expanded(&p, CalculusName::GETL, &prem);
    }

    #[test]
    fn compound_limited_cut_uses_an_expansion() {
        let prem = [seq("|- ~p | q"), seq("~p | q |- r")];
        let p = Proof::structural(LIMITED_CUT_LEFT, seq("|- r"), vec![Proof::premise(prem[0].clone(), 0), Proof::premise(prem[1].clone(), 1)]);
        let q = expanded(&p, CalculusName::GETL, &prem);
        assert!(q.nodes().iter().any(|(_, n)| matches!(&n.just, Justification::Structural { sigma: Some(_), .. })), "{q}");
    }
}
