//! Derivability by saturation over atomic set-sequents, with proof reconstruction.

mod reconstruct;
mod saturate;

pub use reconstruct::{contract_to, contract_to_support, weaken_to};
pub use saturate::{PoolRule, Saturation, SetSequent};

use crate::calculus::{balanced_expansions, Calculus, CUT, IDENTITY};
use crate::proof::Proof;
use crate::syntax::{atoms_of, Atom, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("fact budget of {0} exceeded")]
    ResourceLimit(usize),
    #[error("{0} atoms exceed the limit of 64")]
    TooManyAtoms(usize),
}

impl EngineError {
    pub fn is_resource(&self) -> bool {
        matches!(self, EngineError::ResourceLimit(_) | EngineError::TooManyAtoms(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    /// Shape depth for the expansions of rules other than Identity and Cut.
    pub depth_bound: usize,
    pub max_facts: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { depth_bound: 2, max_facts: 200_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: bool,
    pub proof: Option<Proof>,
    /// Whether a negative verdict is conclusive.
    pub complete: bool,
}

/// Name of the atom added when a query mentions no atoms at all.
pub const PLACEHOLDER_ATOM: &str = "_z";

/// The rules saturation works with: Identity and Cut as they are, every
/// other specific rule through its bounded family of balanced expansions.
pub fn rule_pool(calc: &Calculus, opts: &EngineOptions) -> Vec<PoolRule> {
    let mut pool = Vec::new();
    for r in &calc.specific {
        if r.name == IDENTITY || r.name == CUT {
            pool.push(PoolRule { rule: r.clone(), sigma: None });
            continue;
        }
        for e in balanced_expansions(r, opts.depth_bound) {
            let atomic = e.sigma.iter().all(|(_, f)| f.is_atomic());
            let sigma = (!atomic).then_some(e.sigma);
            let rule = if atomic { r.clone() } else { e.rule };
            pool.push(PoolRule { rule, sigma });
        }
    }
    pool
}

/// A saturated premise set answering many derivability queries.
#[derive(Clone, Debug)]
pub struct Prover {
    saturation: Saturation,
    complete: bool,
}

impl Prover {
    /// Saturate `premises` over the atoms of the premises plus `extra_atoms`.
    pub fn new(
        premises: &[Sequent],
        extra_atoms: impl IntoIterator<Item = Atom>,
        calc: &Calculus,
        opts: &EngineOptions,
    ) -> Result<Prover, EngineError> {
        let mut universe = atoms_of(premises);
        universe.extend(extra_atoms);
        if universe.is_empty() {
            universe.insert(Atom::new(PLACEHOLDER_ATOM));
        }
        let seeds = premises.iter().enumerate().map(|(i, s)| (s.clone(), Proof::premise(s.clone(), i))).collect();
        let saturation = Saturation::new(seeds, universe.into_iter().collect(), rule_pool(calc, opts), opts.max_facts)?;
        Ok(Prover { saturation, complete: calc.is_exact() })
    }

    pub fn saturation(&self) -> &Saturation {
        &self.saturation
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn derivable(&self, c: &Sequent) -> Result<bool, EngineError> {
        self.saturation
            .derivable(c)
            .ok_or_else(|| EngineError::Unsupported(format!("'{c}' mentions atoms outside the prover's universe")))
    }

    pub fn prove(&self, c: &Sequent) -> Result<Option<Proof>, EngineError> {
        if !self.derivable(c)? {
            return Ok(None);
        }
        Ok(Some(self.saturation.prove(c).expect("derivable goals have proofs")))
    }

    /// Set forms of the At-set of `c`, for repeated [`Prover::covers`] queries.
    pub fn at_masks(&self, c: &Sequent) -> Option<Vec<SetSequent>> {
        self.saturation.at_masks(c)
    }

    pub fn covers(&self, masks: &[SetSequent]) -> bool {
        self.saturation.covers(masks)
    }
}

pub fn derives(premises: &[Sequent], c: &Sequent, calc: &Calculus, opts: &EngineOptions) -> Result<Outcome, EngineError> {
    let prover = Prover::new(premises, c.atoms(), calc, opts)?;
    let proof = prover.prove(c)?;
    Ok(Outcome { verdict: proof.is_some(), proof, complete: prover.complete })
}

pub fn refutes(premises: &[Sequent], calc: &Calculus, opts: &EngineOptions) -> Result<Outcome, EngineError> {
    derives(premises, &Sequent::empty(), calc, opts)
}
