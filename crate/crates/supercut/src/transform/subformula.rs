use super::{Context, Pass, RewriteTrace, TraceEntry, TransformError};
use crate::calculus::{at_set, elim_path, intro_derive};
use crate::proof::{Justification, Proof};
use crate::syntax::{atoms_of, Atom, Sequent};

/// Rename atoms foreign to `premises` and `c` into a resident atom, or, when
/// there is none, rebuild the proof without atoms at all. Expects a proof
/// that is structurally atomic and analytic-synthetic.
pub fn enforce_subformula(p: &Proof, premises: &[Sequent], c: &Sequent) -> Proof {
    debug_assert_eq!(&p.conclusion, c);
    enforce_at_root(p, premises)
}

pub(crate) fn enforce_with(p: &Proof, ctx: &Context, trace: &mut RewriteTrace) -> Result<Proof, TransformError> {
    if foreign_atoms(p, ctx.premises).is_empty() {
        return Ok(p.clone());
    }
    let q = enforce_at_root(p, ctx.premises);
    trace.0.push(TraceEntry { pass: Pass::Subformula, path: vec![], rule: p.just.to_string() });
    Ok(q)
}

fn resident_atoms(p: &Proof, premises: &[Sequent]) -> Vec<Atom> {
    let mut atoms = atoms_of(premises);
    atoms.extend(p.conclusion.atoms());
    atoms.into_iter().collect()
}

fn foreign_atoms(p: &Proof, premises: &[Sequent]) -> Vec<Atom> {
    let resident = resident_atoms(p, premises);
    atoms_of(p.nodes().iter().map(|(_, n)| &n.conclusion)).into_iter().filter(|a| !resident.contains(a)).collect()
}

pub(crate) fn enforce_at_root(p: &Proof, premises: &[Sequent]) -> Proof {
    let foreign = foreign_atoms(p, premises);
    if foreign.is_empty() {
        return p.clone();
    }
    if let Some(q) = resident_atoms(p, premises).into_iter().next() {
        let rename = |a: &Atom| foreign.contains(a).then(|| q.clone());
        return rename_proof(p, &rename);
    }
    without_atoms(p, premises).unwrap_or_else(|| p.clone())
}

fn rename_proof(p: &Proof, f: &impl Fn(&Atom) -> Option<Atom>) -> Proof {
    Proof::new(p.conclusion.rename(f), p.just.clone(), p.children.iter().map(|c| rename_proof(c, f)).collect())
}

/// Neither the premises nor the conclusion mention an atom: every At-set
/// member is the empty sequent, obtained from some premise whose At-set has it.
fn without_atoms(p: &Proof, premises: &[Sequent]) -> Option<Proof> {
    let c = &p.conclusion;
    let members: Vec<Sequent> = at_set(c).into_iter().collect();
    if members.is_empty() {
        return intro_derive(c, &[]);
    }
    let empty = Sequent::empty();
    let used = p.premise_indices();
    let i = used.into_iter().chain(0..premises.len()).find(|&i| at_set(&premises[i]).contains(&empty))?;
    let base = elim_path(&premises[i], &empty, Proof::leaf(premises[i].clone(), Justification::Premise(i)))?;
    Some(intro_derive(c, &[empty])?.graft(&|_| base.clone()))
}
