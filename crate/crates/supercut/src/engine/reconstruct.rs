use std::collections::HashMap;

use super::saturate::{Origin, Saturation};
use crate::calculus::{
    at_set, elim_path, intro_derive, CONTRACTION_LEFT, CONTRACTION_RIGHT, WEAKENING_LEFT, WEAKENING_RIGHT,
};
use crate::proof::{Justification, Proof};
use crate::syntax::{Multiset, Sequent, Side};

/// Extend `p` by single weakening steps until it proves `target`.
pub fn weaken_to(p: Proof, target: &Sequent) -> Proof {
    let extra = target.minus(&p.conclusion).unwrap_or_else(|| panic!("cannot weaken {} to {target}", p.conclusion));
    let mut cur = p;
    for (side, name, items) in [(Side::Left, WEAKENING_LEFT, &extra.left), (Side::Right, WEAKENING_RIGHT, &extra.right)] {
        for f in items.iter() {
            let concl = cur.conclusion.clone().with(side, f.clone());
            cur = Proof::structural(name, concl, vec![cur]);
        }
    }
    cur
}

/// Contract repeated members until each occurs once.
pub fn contract_to_support(p: Proof) -> Proof {
    let mut cur = p;
    for (side, name) in [(Side::Left, CONTRACTION_LEFT), (Side::Right, CONTRACTION_RIGHT)] {
        loop {
            let dup = cur.conclusion.side(side).iter().find(|f| cur.conclusion.side(side).count(f) > 1).cloned();
            let Some(f) = dup else { break };
            let concl = cur.conclusion.without(side, &f).expect("present");
            cur = Proof::structural(name, concl, vec![cur]);
        }
    }
    cur
}

/// Contract a multiset side down to `target` (a sub-multiset with the same support).
pub fn contract_to(p: Proof, target: &Sequent) -> Proof {
    let mut cur = p;
    for (side, name) in [(Side::Left, CONTRACTION_LEFT), (Side::Right, CONTRACTION_RIGHT)] {
        loop {
            let have: &Multiset = cur.conclusion.side(side);
            let want = target.side(side);
            let Some(f) = have.iter().find(|f| have.count(f) > want.count(f)).cloned() else { break };
            let concl = cur.conclusion.without(side, &f).expect("present");
            cur = Proof::structural(name, concl, vec![cur]);
        }
    }
    cur
}

impl Saturation {
    /// A proof of the fact's set sequent.
    pub(crate) fn fact_proof(&self, id: usize, memo: &mut HashMap<usize, Proof>) -> Proof {
        if let Some(p) = memo.get(&id) {
            return p.clone();
        }
        let fact = &self.facts[id];
        let proof = match &fact.origin {
            Origin::Seed { premise, member } => {
                let path = elim_path(&self.premises[*premise], member, self.premise_proofs[*premise].clone())
                    .expect("seed is an At-set member");
                contract_to_support(path)
            }
            Origin::Rule { rule, atoms, parents, slots } => {
                let inst = self.instance(*rule, atoms, slots);
                let pool_rule = &self.pool[*rule];
                let (prem, concl) = pool_rule.rule.instantiate(&inst);
                let children =
                    parents.iter().zip(&prem).map(|(&pid, target)| weaken_to(self.fact_proof(pid, memo), target)).collect();
                let just = Justification::Structural { rule: pool_rule.rule.name.clone(), sigma: pool_rule.sigma.clone() };
                contract_to_support(Proof::new(concl, just, children))
            }
        };
        debug_assert_eq!(proof.conclusion, self.sequent(fact.seq));
        memo.insert(id, proof.clone());
        proof
    }

    /// A proof of an atomic sequent from a subsuming fact.
    pub fn prove_atomic(&self, target: &Sequent, memo: &mut HashMap<usize, Proof>) -> Option<Proof> {
        let id = self.witness(self.mask(target)?)?;
        Some(weaken_to(self.fact_proof(id, memo), target))
    }

    /// A proof of `c` in three zones: eliminations, atomic structural steps, introductions.
    pub fn prove(&self, c: &Sequent) -> Option<Proof> {
        if let Some(i) = self.premises.iter().position(|s| s == c) {
            return Some(self.premise_proofs[i].clone());
        }
        let members: Vec<Sequent> = at_set(c).into_iter().collect();
        let skeleton = intro_derive(c, &members)?;
        let mut memo = HashMap::new();
        let mut leaves = Vec::new();
        for m in &members {
            leaves.push(self.prove_atomic(m, &mut memo)?);
        }
        Some(skeleton.graft(&|i| leaves[i].clone()))
    }
}
