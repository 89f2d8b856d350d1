use std::collections::BTreeMap;

use super::EngineError;
use crate::calculus::{at_set, SchemaSequent, StructuralRule};
use crate::proof::Proof;
use crate::syntax::{Atom, Formula, Multiset, Sequent, Side, Substitution};

/// An atomic sequent read as a pair of atom sets over the universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetSequent {
    pub left: u64,
    pub right: u64,
}

impl SetSequent {
    /// `self` yields `other` by weakening.
    pub fn subsumes(self, other: SetSequent) -> bool {
        self.left & !other.left == 0 && self.right & !other.right == 0
    }

    fn meets(self, other: SetSequent) -> bool {
        self.left & other.left != 0 || self.right & other.right != 0
    }
}

/// A rule available to saturation, with the substitution it was expanded by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolRule {
    pub rule: StructuralRule,
    pub sigma: Option<Substitution>,
}

#[derive(Clone, Debug)]
struct CompiledSeq {
    left: Vec<usize>,
    right: Vec<usize>,
    slots_left: Vec<usize>,
    slots_right: Vec<usize>,
}

impl CompiledSeq {
    fn has_slots(&self) -> bool {
        !self.slots_left.is_empty() || !self.slots_right.is_empty()
    }

    fn fixed(&self, assignment: &[usize]) -> SetSequent {
        let mask = |v: &[usize]| v.iter().fold(0u64, |m, &i| m | 1 << assignment[i]);
        SetSequent { left: mask(&self.left), right: mask(&self.right) }
    }
}

#[derive(Clone, Debug)]
struct CompiledRule {
    n_atoms: usize,
    n_slots: usize,
    premises: Vec<CompiledSeq>,
    conclusion: CompiledSeq,
}

fn compile(rule: &StructuralRule) -> Result<CompiledRule, EngineError> {
    let atoms: Vec<Atom> = rule.schema_atoms().into_iter().collect();
    let slots: Vec<_> = rule.slots().into_iter().collect();
    let mut slot_side: BTreeMap<usize, Side> = BTreeMap::new();
    let mut one = |s: &SchemaSequent| -> Result<CompiledSeq, EngineError> {
        let idx = |side| s.atoms(side).map(|a| atoms.iter().position(|b| b == a).expect("schema atom")).collect();
        let mut slot_idx = |side| -> Result<Vec<usize>, EngineError> {
            s.slots(side)
                .map(|x| {
                    let k = slots.iter().position(|y| y == x).expect("slot");
                    if *slot_side.entry(k).or_insert(side) != side {
                        return Err(EngineError::Unsupported(format!("slot {} of {} occurs on both sides", x.0, rule.name)));
                    }
                    Ok(k)
                })
                .collect()
        };
        Ok(CompiledSeq {
            left: idx(Side::Left),
            right: idx(Side::Right),
            slots_left: slot_idx(Side::Left)?,
            slots_right: slot_idx(Side::Right)?,
        })
    };
    let premises = rule.premises.iter().map(&mut one).collect::<Result<Vec<_>, _>>()?;
    let conclusion = one(&rule.conclusion)?;
    let in_premises: Vec<usize> =
        premises.iter().flat_map(|p| p.slots_left.iter().chain(&p.slots_right).copied()).collect();
    if conclusion.slots_left.iter().chain(&conclusion.slots_right).any(|k| !in_premises.contains(k)) {
        return Err(EngineError::Unsupported(format!("{} has a context only in its conclusion", rule.name)));
    }
    Ok(CompiledRule { n_atoms: atoms.len(), n_slots: slots.len(), premises, conclusion })
}

#[derive(Clone, Debug)]
pub(crate) enum Origin {
    Seed { premise: usize, member: Sequent },
    Rule { rule: usize, atoms: Vec<usize>, parents: Vec<usize>, slots: Vec<u64> },
}

#[derive(Clone, Debug)]
pub(crate) struct Fact {
    pub seq: SetSequent,
    pub origin: Origin,
    pub live: bool,
}

/// Saturated set of atomic facts derivable from a list of proved sequents.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub(crate) universe: Vec<Atom>,
    pub(crate) premises: Vec<Sequent>,
    pub(crate) premise_proofs: Vec<Proof>,
    pub(crate) pool: Vec<PoolRule>,
    compiled: Vec<CompiledRule>,
    pub(crate) facts: Vec<Fact>,
    max_facts: usize,
}

impl Saturation {
    /// `premises` are pairs of a sequent and a proof of it; atoms outside `universe` are an error.
    pub fn new(
        premises: Vec<(Sequent, Proof)>,
        universe: Vec<Atom>,
        pool: Vec<PoolRule>,
        max_facts: usize,
    ) -> Result<Saturation, EngineError> {
        if universe.len() > 64 {
            return Err(EngineError::TooManyAtoms(universe.len()));
        }
        let compiled = pool.iter().map(|r| compile(&r.rule)).collect::<Result<Vec<_>, _>>()?;
        let (premises, premise_proofs): (Vec<Sequent>, Vec<Proof>) = premises.into_iter().unzip();
        let mut sat =
            Saturation { universe, premises, premise_proofs, pool, compiled, facts: Vec::new(), max_facts };
        for (i, s) in sat.premises.clone().iter().enumerate() {
            for member in at_set(s) {
                let seq = sat.mask(&member).ok_or_else(|| EngineError::Unsupported(format!("premise {s} leaves the universe")))?;
                sat.add(seq, Origin::Seed { premise: i, member })?;
            }
        }
        sat.run()?;
        Ok(sat)
    }

    pub fn universe(&self) -> &[Atom] {
        &self.universe
    }

    /// The set form of an atomic sequent, if all its atoms are in the universe.
    pub fn mask(&self, s: &Sequent) -> Option<SetSequent> {
        let side = |m: &Multiset| -> Option<u64> {
            m.iter().try_fold(0u64, |acc, f| {
                let a = f.as_atom()?;
                Some(acc | 1 << self.universe.iter().position(|b| b == a)?)
            })
        };
        Some(SetSequent { left: side(&s.left)?, right: side(&s.right)? })
    }

    pub fn sequent(&self, s: SetSequent) -> Sequent {
        let side = |m: u64| -> Multiset {
            (0..self.universe.len()).filter(|i| m >> i & 1 == 1).map(|i| Formula::Atom(self.universe[i].clone())).collect()
        };
        Sequent::from_sides(side(s.left), side(s.right))
    }

    /// The set forms of the At-set members of `c`.
    pub fn at_masks(&self, c: &Sequent) -> Option<Vec<SetSequent>> {
        at_set(c).iter().map(|m| self.mask(m)).collect()
    }

    /// A live fact that yields `s` by weakening.
    pub fn witness(&self, s: SetSequent) -> Option<usize> {
        self.facts.iter().position(|f| f.live && f.seq.subsumes(s))
    }

    pub fn covers(&self, masks: &[SetSequent]) -> bool {
        masks.iter().all(|&m| self.facts.iter().any(|f| f.live && f.seq.subsumes(m)))
    }

    pub fn derivable(&self, c: &Sequent) -> Option<bool> {
        Some(self.covers(&self.at_masks(c)?))
    }

    pub fn live_facts(&self) -> Vec<Sequent> {
        self.facts.iter().filter(|f| f.live).map(|f| self.sequent(f.seq)).collect()
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    /// Insert unless subsumed; returns whether it was new.
    fn add(&mut self, seq: SetSequent, origin: Origin) -> Result<bool, EngineError> {
        if self.witness(seq).is_some() {
            return Ok(false);
        }
        for f in self.facts.iter_mut() {
            if f.live && seq.subsumes(f.seq) {
                f.live = false;
            }
        }
        self.facts.push(Fact { seq, origin, live: true });
        if self.facts.len() > self.max_facts {
            return Err(EngineError::ResourceLimit(self.max_facts));
        }
        Ok(true)
    }

    fn run(&mut self) -> Result<(), EngineError> {
        let n = self.universe.len();
        loop {
            let mut changed = false;
            for ri in 0..self.compiled.len() {
                let rule = self.compiled[ri].clone();
                if rule.n_atoms > 0 && n == 0 {
                    continue;
                }
                let mut assignment = vec![0usize; rule.n_atoms];
                loop {
                    changed |= self.fire(ri, &rule, &assignment)?;
                    if !odometer(&mut assignment, n) {
                        break;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn fire(&mut self, ri: usize, rule: &CompiledRule, assignment: &[usize]) -> Result<bool, EngineError> {
        let mut parents = vec![usize::MAX; rule.premises.len()];
        let mut slotted: Vec<(usize, SetSequent, Vec<usize>)> = Vec::new();
        for (k, p) in rule.premises.iter().enumerate() {
            let fixed = p.fixed(assignment);
            if p.has_slots() {
                let cands: Vec<usize> =
                    (0..self.facts.len()).filter(|&i| self.facts[i].live && self.facts[i].seq.meets(fixed)).collect();
                if cands.is_empty() {
                    return Ok(false);
                }
                slotted.push((k, fixed, cands));
            } else {
                match self.witness(fixed) {
                    Some(i) => parents[k] = i,
                    None => return Ok(false),
                }
            }
        }
        let concl_fixed = rule.conclusion.fixed(assignment);
        let mut changed = false;
        let mut choice = vec![0usize; slotted.len()];
        loop {
            let mut slots = vec![0u64; rule.n_slots];
            for (j, (k, fixed, cands)) in slotted.iter().enumerate() {
                let fact = self.facts[cands[choice[j]]].seq;
                let p = &rule.premises[*k];
                if let Some(&s) = p.slots_left.first() {
                    slots[s] |= fact.left & !fixed.left;
                }
                if let Some(&s) = p.slots_right.first() {
                    slots[s] |= fact.right & !fixed.right;
                }
                parents[*k] = cands[choice[j]];
            }
            let mut concl = concl_fixed;
            for &s in &rule.conclusion.slots_left {
                concl.left |= slots[s];
            }
            for &s in &rule.conclusion.slots_right {
                concl.right |= slots[s];
            }
            let origin = Origin::Rule { rule: ri, atoms: assignment.to_vec(), parents: parents.clone(), slots };
            changed |= self.add(concl, origin)?;
            let mut j = 0;
            loop {
                if j == choice.len() {
                    return Ok(changed);
                }
                choice[j] += 1;
                if choice[j] < slotted[j].2.len() {
                    break;
                }
                choice[j] = 0;
                j += 1;
            }
        }
    }

    /// The rule instance recorded for a rule-derived fact: schema atoms and slot contents.
    pub(crate) fn instance(&self, rule: usize, atoms: &[usize], slots: &[u64]) -> crate::calculus::Instantiation {
        let r = &self.pool[rule].rule;
        let schema_atoms: Vec<Atom> = r.schema_atoms().into_iter().collect();
        let slot_names: Vec<_> = r.slots().into_iter().collect();
        let atom = |i: usize| Formula::Atom(self.universe[i].clone());
        crate::calculus::Instantiation {
            atoms: schema_atoms.into_iter().zip(atoms.iter().map(|&i| atom(i))).collect(),
            slots: slot_names
                .into_iter()
                .zip(slots.iter().map(|&m| (0..self.universe.len()).filter(|i| m >> i & 1 == 1).map(atom).collect()))
                .collect(),
        }
    }
}

fn odometer(values: &mut [usize], size: usize) -> bool {
    for v in values.iter_mut() {
        *v += 1;
        if *v < size {
            return true;
        }
        *v = 0;
    }
    false
}
