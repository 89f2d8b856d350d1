use super::{cut_on, identity, postorder, Context, Pass, RewriteTrace, TraceEntry, TransformError};
use crate::calculus::{
    builtin_calculus, match_structural, named_rule, CalculusName, CONTRACTION_LEFT, CONTRACTION_RIGHT, CUT, IDENTITY,
    WEAKENING_LEFT, WEAKENING_RIGHT,
};
use crate::engine::weaken_to;
use crate::proof::{NodeClass, Path, Proof};
use crate::syntax::{Formula, Sequent, Side};

fn is_rule(p: &Proof, name: &str) -> bool {
    p.just.structural_name() == Some(name)
}

fn contains_rule(p: &Proof, name: &str) -> bool {
    p.count_rule(name) > 0
}

fn cut_formula(p: &Proof) -> Result<Formula, TransformError> {
    let kids: Vec<Sequent> = p.children.iter().map(|c| c.conclusion.clone()).collect();
    let inst = match_structural(&named_rule(CUT).expect("cut"), &kids, &p.conclusion, false)
        .map_err(|e| TransformError::Precondition(e.0))?;
    Ok(inst.atoms.into_values().next().expect("cut formula"))
}

fn contracted(p: &Proof) -> (Side, Formula) {
    let side = if is_rule(p, CONTRACTION_LEFT) { Side::Left } else { Side::Right };
    let extra = p.children[0].conclusion.minus(&p.conclusion).expect("contraction removes a copy");
    (side, extra.side(side).iter().next().expect("one formula").clone())
}

/// Remove every cut from a normal classical proof without premises: each
/// atomic structural block is rebuilt from one Identity and weakenings.
pub fn eliminate_cuts(p: &Proof) -> Result<Proof, TransformError> {
    eliminate_cuts_traced(p).map(|(q, _)| q)
}

pub fn eliminate_cuts_traced(p: &Proof) -> Result<(Proof, RewriteTrace), TransformError> {
    if !p.premise_indices().is_empty() {
        return Err(TransformError::Precondition("proof uses premises".into()));
    }
    if p.count_class(NodeClass::Elim) > 0 || !crate::proof::is_structurally_atomic(p) {
        return Err(TransformError::Precondition("proof is not normal".into()));
    }
    let calc = builtin_calculus(CalculusName::GCL);
    let mut trace = RewriteTrace::default();
    let q = super::run_pass(p, Pass::EliminateCuts, &Context::new(&calc, &[]), &mut trace, |p| {
        structural_roots(p).into_iter().find(|path| contains_rule(p.at(path).expect("own path"), CUT))
    })?;
    Ok((q, trace))
}

/// Structural nodes whose parent is not structural, in pre-order.
fn structural_roots(p: &Proof) -> Vec<Path> {
    fn go(p: &Proof, parent_structural: bool, path: &mut Path, out: &mut Vec<Path>) {
        let here = p.class() == NodeClass::Structural;
        if here && !parent_structural {
            out.push(path.clone());
        }
        for (i, c) in p.children.iter().enumerate() {
            path.push(i);
            go(c, here, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(p, false, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn identity_for(p: &Proof) -> Result<Proof, TransformError> {
    let s = &p.conclusion;
    let shared = s
        .left
        .iter()
        .find(|f| s.right.contains(f))
        .ok_or_else(|| TransformError::Precondition(format!("'{s}' shares no atom across its sides")))?;
    Ok(weaken_to(identity(shared), s))
}

/// Turn a refutation from atomic premises into one where, on every branch,
/// contractions lie above cuts whenever the contracted copies come from a
/// single cut premise, with weakening and Identity removed.
pub fn simplify_refutation(p: &Proof) -> Result<Proof, TransformError> {
    simplify_refutation_traced(p).map(|(q, _)| q)
}

pub fn simplify_refutation_traced(p: &Proof) -> Result<(Proof, RewriteTrace), TransformError> {
    if !p.conclusion.is_empty() {
        return Err(TransformError::Precondition(format!("'{}' is not the empty sequent", p.conclusion)));
    }
    let allowed = [IDENTITY, CUT, WEAKENING_LEFT, WEAKENING_RIGHT, CONTRACTION_LEFT, CONTRACTION_RIGHT];
    for (_, n) in p.nodes() {
        let ok = match n.class() {
            NodeClass::Premise => n.conclusion.is_atomic(),
            NodeClass::Structural => n.just.structural_name().is_some_and(|r| allowed.contains(&r)),
            _ => false,
        };
        if !ok || !n.conclusion.is_atomic() {
            return Err(TransformError::Precondition(format!("unexpected step {} on '{}'", n.just, n.conclusion)));
        }
    }
    let calc = builtin_calculus(CalculusName::GCL);
    let ctx = Context::new(&calc, &[]);
    let mut trace = RewriteTrace::default();
    let q = strengthen(p)?;
    trace.0.push(TraceEntry { pass: Pass::Strengthen, path: vec![], rule: p.just.to_string() });
    let q = super::run_pass(&q, Pass::PushContraction, &ctx, &mut trace, push_site)?;
    Ok((q, trace))
}

/// The step rebuilt without weakening or Identity, proving a sub-multiset of
/// its conclusion; at the root that is the conclusion itself.
pub(crate) fn strengthen(p: &Proof) -> Result<Proof, TransformError> {
    let s = strengthen_sub(p)?;
    if s.conclusion == p.conclusion {
        Ok(s)
    } else {
        Ok(weaken_to(s, &p.conclusion))
    }
}

fn strengthen_sub(p: &Proof) -> Result<Proof, TransformError> {
    match p.class() {
        NodeClass::Premise => return Ok(p.clone()),
        NodeClass::Structural => {}
        _ => return Err(TransformError::Precondition(format!("unexpected step {}", p.just))),
    }
    let name = p.just.structural_name().expect("structural");
    Ok(match name {
        IDENTITY => p.clone(),
        WEAKENING_LEFT | WEAKENING_RIGHT => strengthen_sub(&p.children[0])?,
        CONTRACTION_LEFT | CONTRACTION_RIGHT => {
            let (side, f) = contracted(p);
            let s = strengthen_sub(&p.children[0])?;
            if s.conclusion.side(side).count(&f) >= 2 {
                let c = s.conclusion.without(side, &f).expect("present");
                Proof::structural(name, c, vec![s])
            } else {
                s
            }
        }
        CUT => {
            let a = cut_formula(p)?;
            let l = strengthen_sub(&p.children[0])?;
            let r = strengthen_sub(&p.children[1])?;
            if is_rule(&l, IDENTITY) || !r.conclusion.left.contains(&a) {
                r
            } else if is_rule(&r, IDENTITY) || !l.conclusion.right.contains(&a) {
                l
            } else {
                cut_on(l, r, &a)
            }
        }
        other => return Err(TransformError::Precondition(format!("unexpected rule {other}"))),
    })
}

/// A contraction directly below a cut whose copies both come from one premise.
fn push_site(p: &Proof) -> Option<Path> {
    p.nodes().into_iter().find(|(_, n)| push_target(n).is_some()).map(|(path, _)| path)
}

fn push_target(n: &Proof) -> Option<usize> {
    if !is_rule(n, CONTRACTION_LEFT) && !is_rule(n, CONTRACTION_RIGHT) {
        return None;
    }
    let k = &n.children[0];
    if !is_rule(k, CUT) {
        return None;
    }
    let (side, f) = contracted(n);
    let a = cut_formula(k).ok()?;
    (0..2).find(|&i| {
        let c = &k.children[i].conclusion;
        let cut_side = if i == 0 { Side::Right } else { Side::Left };
        let mut n = c.side(side).count(&f);
        if side == cut_side && f == a {
            n -= 1;
        }
        n >= 2
    })
}

pub(crate) fn push_contraction(n: &Proof) -> Result<Proof, TransformError> {
    let i = push_target(n).ok_or_else(|| TransformError::Replay("no contraction to push".into()))?;
    let (side, f) = contracted(n);
    let k = &n.children[0];
    let a = cut_formula(k)?;
    let mut kids = k.children.clone();
    let c = kids[i].conclusion.without(side, &f).expect("two copies");
    kids[i] = Proof::structural(n.just.structural_name().expect("contraction"), c, vec![kids[i].clone()]);
    let [l, r] = [kids[0].clone(), kids[1].clone()];
    Ok(cut_on(l, r, &a))
}

/// No contraction has a cut above it.
pub fn is_contraction_then_cut(p: &Proof) -> bool {
    p.nodes().iter().all(|(_, n)| {
        !(is_rule(n, CONTRACTION_LEFT) || is_rule(n, CONTRACTION_RIGHT)) || !contains_rule(n, CUT)
    })
}

/// Make sure no branch of a normal classical proof has both Identity and Cut.
pub fn separate_identity_cut(p: &Proof) -> Result<Proof, TransformError> {
    separate_identity_cut_traced(p).map(|(q, _)| q)
}

pub fn separate_identity_cut_traced(p: &Proof) -> Result<(Proof, RewriteTrace), TransformError> {
    if !crate::proof::is_structurally_atomic(p) || !crate::proof::is_analytic_synthetic(p) {
        return Err(TransformError::Precondition("proof is not normal".into()));
    }
    let calc = builtin_calculus(CalculusName::GCL);
    let mut trace = RewriteTrace::default();
    let q = super::run_pass(p, Pass::Separate, &Context::new(&calc, &[]), &mut trace, separate_site)?;
    Ok((q, trace))
}

fn separate_site(p: &Proof) -> Option<Path> {
    postorder(p).into_iter().find(|path| {
        let n = p.at(path).expect("own path");
        is_rule(n, CUT) && n.children.iter().any(|c| contains_rule(c, IDENTITY))
    })
}

/// The atom of an Identity leaf reached from the root through weakenings and
/// contractions only.
fn identity_atom(p: &Proof) -> Option<Formula> {
    if is_rule(p, IDENTITY) {
        return p.conclusion.left.iter().next().cloned();
    }
    let wc = [WEAKENING_LEFT, WEAKENING_RIGHT, CONTRACTION_LEFT, CONTRACTION_RIGHT];
    if p.just.structural_name().is_some_and(|r| wc.contains(&r)) {
        return identity_atom(&p.children[0]);
    }
    None
}

pub(crate) fn separate_node(n: &Proof) -> Result<Proof, TransformError> {
    let a = cut_formula(n)?;
    let t = (0..2)
        .find(|&i| identity_atom(&n.children[i]).is_some())
        .ok_or_else(|| TransformError::Precondition("Identity above a cut is not reached through W and C".into()))?;
    let atom = identity_atom(&n.children[t]).expect("found");
    if atom == a {
        let other = n.children[1 - t].clone();
        if !other.conclusion.is_subsequent(&n.conclusion) {
            return Err(TransformError::Precondition("cut premise does not weaken to the conclusion".into()));
        }
        Ok(weaken_to(other, &n.conclusion))
    } else {
        Ok(weaken_to(identity(&atom), &n.conclusion))
    }
}
