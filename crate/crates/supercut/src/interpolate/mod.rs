//! Interpolants read off normal proofs, with semantic certificates.

mod prune;

use std::collections::BTreeSet;

pub use prune::{critical_nodes, critical_paths, prune_foreign_atoms};

use crate::calculus::{builtin_calculus, Calculus, CalculusName, IDENTITY};
use crate::engine::{derives, EngineError, EngineOptions};
use crate::proof::{check, Justification, NodeClass, Path, Proof};
use crate::semantics::{builtin, holds, LogicName, SemanticsError};
use crate::syntax::{atoms_of, set_to_formula, tau, Atom, Formula, Sequent};
use crate::transform::{normalize, separate_identity_cut, TransformError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpolationError {
    #[error("entailment fails in {0}")]
    NotValid(LogicName),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no proof found within the engine bounds")]
    NotFound,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Evidence for one direction of an interpolation claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// Calculus the proofs are checked in; `None` when only the oracle vouches.
    pub calculus: Option<CalculusName>,
    pub premises: Vec<Sequent>,
    pub proofs: Vec<Proof>,
    pub oracle: bool,
}

impl Certificate {
    fn oracle(verdict: bool) -> Self {
        Certificate { calculus: None, premises: vec![], proofs: vec![], oracle: verdict }
    }

    /// Every proof checks and the oracle agrees.
    pub fn is_valid(&self) -> bool {
        let proofs_ok = match self.calculus {
            None => true,
            Some(c) => {
                let calc = builtin_calculus(c);
                self.proofs.iter().all(|p| check(p, &calc, &self.premises).is_ok())
            }
        };
        proofs_ok && self.oracle
    }
}

#[derive(Clone, Debug)]
pub struct InterpolationResult {
    pub interpolant_sequents: Vec<Sequent>,
    pub interpolant_formula: Formula,
    pub left_logic: LogicName,
    pub right_logic: LogicName,
    pub left_certificate: Certificate,
    pub right_certificate: Certificate,
    /// The normal proof the interpolant was read from.
    pub proof: Option<Proof>,
}

impl InterpolationResult {
    pub fn verify(&self, phi: &Formula, psi: &Formula) -> bool {
        verify_interpolant(phi, &self.interpolant_formula, psi, self.left_logic, self.right_logic)
    }
}

/// Variable condition plus `phi |-L1 chi` and `chi |-L2 psi`, by the oracle.
pub fn verify_interpolant(phi: &Formula, chi: &Formula, psi: &Formula, l1: LogicName, l2: LogicName) -> bool {
    let shared: BTreeSet<Atom> = phi.atoms().intersection(&psi.atoms()).cloned().collect();
    chi.atoms().is_subset(&shared)
        && holds(&builtin(l1), std::slice::from_ref(phi), Some(chi))
        && holds(&builtin(l2), std::slice::from_ref(chi), Some(psi))
}

fn logic_of(calc: CalculusName) -> LogicName {
    match calc {
        CalculusName::GB => LogicName::B,
        CalculusName::GLP => LogicName::LP,
        CalculusName::GK => LogicName::K,
        CalculusName::GETL => LogicName::ETL,
        CalculusName::GECQ => LogicName::ECQ,
        CalculusName::GCL => LogicName::CL,
    }
}

/// Prune the boundary at `paths`, read the interpolant off it, and build
/// both certificates.
struct Extracted {
    sequents: Vec<Sequent>,
    left: Vec<Proof>,
    right: Proof,
    proof: Proof,
}

fn extract(p: &Proof, paths: &[Path], keep: &BTreeSet<Atom>, calc: &Calculus) -> Result<Extracted, InterpolationError> {
    let pruned = prune::prune_at(p, paths, keep, calc)?;
    let inner: Vec<Path> = paths.iter().map(|path| prune::below_foreign_weakening(&pruned, path, keep)).collect();
    let sequents: Vec<Sequent> = inner
        .iter()
        .map(|path| pruned.at(path).expect("path").conclusion.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let left = inner.iter().map(|path| pruned.at(path).expect("path").clone()).collect();
    let mut right = pruned.clone();
    for path in &inner {
        let node = right.at_mut(path).expect("path");
        let i = sequents.iter().position(|s| *s == node.conclusion).expect("collected");
        *node = Proof::leaf(node.conclusion.clone(), Justification::Premise(i));
    }
    Ok(Extracted { sequents, left, right, proof: pruned })
}

/// Interpolate between premises and a conclusion derivable in a calculus
/// whose specific rules are all generalized cut rules. The interpolant
/// sequents follow from the premises in `calc` and yield `c` in GB.
pub fn interpolate_sequents(
    premises: &[Sequent],
    c: &Sequent,
    calc: CalculusName,
    opts: &EngineOptions,
) -> Result<InterpolationResult, InterpolationError> {
    let calculus = builtin_calculus(calc);
    if calculus.has_specific(IDENTITY) {
        return Err(InterpolationError::Unsupported(format!("{calc} has Identity, not a generalized cut rule")));
    }
    let out = derives(premises, c, &calculus, opts)?;
    let Some(proof) = out.proof else {
        return Err(if out.complete { InterpolationError::NotValid(logic_of(calc)) } else { InterpolationError::NotFound });
    };
    let proof = normalize(&proof, &calculus, premises, c)?;
    let keep = atoms_of(premises);
    let paths = critical_paths(&proof)?;
    let ex = extract(&proof, &paths, &keep, &calculus)?;
    let chi = set_to_formula(&ex.sequents);
    let left_logic = logic_of(calc);
    let prem_formulas: Vec<Formula> = premises.iter().map(tau).collect();
    let left_oracle = holds(&builtin(left_logic), &prem_formulas, Some(&chi));
    let right_oracle = holds(&builtin(LogicName::B), std::slice::from_ref(&chi), Some(&tau(c)));
    Ok(InterpolationResult {
        interpolant_formula: chi,
        left_logic,
        right_logic: LogicName::B,
        left_certificate: Certificate {
            calculus: Some(calc),
            premises: premises.to_vec(),
            proofs: ex.left,
            oracle: left_oracle,
        },
        right_certificate: Certificate {
            calculus: Some(CalculusName::GB),
            premises: ex.sequents.clone(),
            proofs: vec![ex.right],
            oracle: right_oracle,
        },
        interpolant_sequents: ex.sequents,
        proof: Some(ex.proof),
    })
}

fn rho(f: &Formula) -> Sequent {
    Sequent::new([], [f.clone()])
}

/// An interpolant for `phi |- psi` in `logic`, with the logic pair it is
/// certified for: (B, B), (K, B), (ETL, B), (B, LP), (ECQ, B) or (K, LP).
pub fn interpolate_formulas(
    phi: &Formula,
    psi: &Formula,
    logic: LogicName,
    opts: &EngineOptions,
) -> Result<InterpolationResult, InterpolationError> {
    if logic == LogicName::KLEQ {
        return Err(InterpolationError::Unsupported("no interpolation procedure for KLEQ".into()));
    }
    if !holds(&builtin(logic), std::slice::from_ref(phi), Some(psi)) {
        return Err(InterpolationError::NotValid(logic));
    }
    match logic {
        LogicName::B => interpolate_sequents(&[rho(phi)], &rho(psi), CalculusName::GB, opts),
        LogicName::K => interpolate_sequents(&[rho(phi)], &rho(psi), CalculusName::GK, opts),
        LogicName::ETL => interpolate_sequents(&[rho(phi)], &rho(psi), CalculusName::GETL, opts),
        LogicName::LP => {
            let dual = interpolate_formulas(&Formula::neg(psi.clone()), &Formula::neg(phi.clone()), LogicName::K, opts)?;
            let chi = Formula::neg(dual.interpolant_formula.clone());
            let left = holds(&builtin(LogicName::B), std::slice::from_ref(phi), Some(&chi));
            let right = holds(&builtin(LogicName::LP), std::slice::from_ref(&chi), Some(psi));
            Ok(InterpolationResult {
                interpolant_sequents: vec![rho(&chi)],
                interpolant_formula: chi,
                left_logic: LogicName::B,
                right_logic: LogicName::LP,
                left_certificate: Certificate::oracle(left),
                right_certificate: Certificate::oracle(right),
                proof: dual.proof,
            })
        }
        LogicName::ECQ => {
            if holds(&builtin(LogicName::ECQ), std::slice::from_ref(phi), None) {
                let chi = Formula::Bot;
                let right = holds(&builtin(LogicName::B), std::slice::from_ref(&chi), Some(psi));
                return Ok(InterpolationResult {
                    interpolant_sequents: vec![Sequent::empty()],
                    interpolant_formula: chi,
                    left_logic: LogicName::ECQ,
                    right_logic: LogicName::B,
                    left_certificate: Certificate::oracle(true),
                    right_certificate: Certificate::oracle(right),
                    proof: None,
                });
            }
            let mut r = match interpolate_sequents(&[rho(phi)], &rho(psi), CalculusName::GB, opts) {
                Ok(r) => r,
                Err(InterpolationError::NotValid(_)) => {
                    interpolate_sequents(&[rho(phi)], &rho(psi), CalculusName::GECQ, opts)?
                }
                Err(e) => return Err(e),
            };
            r.left_logic = LogicName::ECQ;
            r.left_certificate.oracle = holds(&builtin(LogicName::ECQ), std::slice::from_ref(phi), Some(&r.interpolant_formula));
            Ok(r)
        }
        LogicName::CL => milne_interpolate(phi, psi, opts),
        LogicName::KLEQ => unreachable!("rejected above"),
    }
}

/// Split a classical entailment into a K step and an LP step: the middle
/// formula is read off the boundary between the Cut part and the Identity
/// part of a normal classical proof.
pub fn milne_interpolate(phi: &Formula, psi: &Formula, opts: &EngineOptions) -> Result<InterpolationResult, InterpolationError> {
    if !holds(&builtin(LogicName::CL), std::slice::from_ref(phi), Some(psi)) {
        return Err(InterpolationError::NotValid(LogicName::CL));
    }
    let calc = builtin_calculus(CalculusName::GCL);
    let premises = [rho(phi)];
    let c = rho(psi);
    let out = derives(&premises, &c, &calc, opts)?;
    let proof = out.proof.ok_or(InterpolationError::NotFound)?;
    let proof = normalize(&proof, &calc, &premises, &c)?;
    let proof = separate_identity_cut(&proof)?;
    let paths = separating_paths(&proof);
    let ex = extract(&proof, &paths, &phi.atoms(), &calc)?;
    let chi = set_to_formula(&ex.sequents);
    let left_oracle = holds(&builtin(LogicName::K), std::slice::from_ref(phi), Some(&chi));
    let right_oracle = holds(&builtin(LogicName::LP), std::slice::from_ref(&chi), Some(psi));
    Ok(InterpolationResult {
        interpolant_formula: chi,
        left_logic: LogicName::K,
        right_logic: LogicName::LP,
        left_certificate: Certificate {
            calculus: Some(CalculusName::GK),
            premises: premises.to_vec(),
            proofs: ex.left,
            oracle: left_oracle,
        },
        right_certificate: Certificate {
            calculus: Some(CalculusName::GLP),
            premises: ex.sequents.clone(),
            proofs: vec![ex.right],
            oracle: right_oracle,
        },
        interpolant_sequents: ex.sequents,
        proof: Some(ex.proof),
    })
}

/// Maximal subtrees free of introductions and Identity, below which only
/// introductions occur.
fn separating_paths(p: &Proof) -> Vec<Path> {
    fn go(p: &Proof, path: &mut Path, out: &mut Vec<Path>) {
        match p.class() {
            NodeClass::Intro => {
                for (i, c) in p.children.iter().enumerate() {
                    path.push(i);
                    go(c, path, out);
                    path.pop();
                }
            }
            NodeClass::Axiom => {}
            _ if p.count_rule(IDENTITY) > 0 => {}
            _ => out.push(path.clone()),
        }
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut out);
    out
}
