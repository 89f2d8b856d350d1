mod common;

use common::*;
use rand::Rng;
use supercut::interpolate::{interpolate_formulas, milne_interpolate, verify_interpolant, InterpolationError};
use supercut::semantics::{builtin, holds, LogicName};
use supercut::syntax::Formula;

fn valid_pairs(logic: LogicName, seed: u64, count: usize, atoms: usize) -> Vec<(Formula, Formula)> {
    let oracle = builtin(logic);
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let phi = random_formula(&mut r, atoms, 3, true);
        let psi = match r.gen_range(0..3) {
            0 => Formula::or(random_formula(&mut r, atoms, 2, true), phi.clone()),
            1 => random_formula(&mut r, atoms, 3, true),
            _ => Formula::and(random_formula(&mut r, atoms, 1, true), phi.clone()),
        };
        if holds(&oracle, std::slice::from_ref(&phi), Some(&psi)) {
            out.push((phi, psi));
        }
    }
    out
}

fn run(logic: LogicName, seed: u64, count: usize) {
    let opts = Default::default();
    for (phi, psi) in valid_pairs(logic, seed, count, 3) {
        let r = interpolate_formulas(&phi, &psi, logic, &opts).unwrap_or_else(|e| panic!("{logic} {phi} |- {psi}: {e}"));
        assert!(
            verify_interpolant(&phi, &r.interpolant_formula, &psi, r.left_logic, r.right_logic),
            "{logic}: {} for {phi} |- {psi}",
            r.interpolant_formula
        );
        assert!(r.verify(&phi, &psi));
        assert!(r.left_certificate.is_valid() && r.right_certificate.is_valid(), "{logic}: {phi} |- {psi}");
    }
}

#[test]
fn belnap_pairs() {
    run(LogicName::B, 21, 60);
}

#[test]
fn kleene_pairs() {
    run(LogicName::K, 22, 60);
}

#[test]
fn exactly_true_pairs() {
    run(LogicName::ETL, 23, 40);
}

#[test]
fn paradox_pairs_by_duality() {
    run(LogicName::LP, 24, 40);
}

#[test]
fn ecq_pairs() {
    run(LogicName::ECQ, 25, 40);
}

#[test]
fn classical_pairs() {
    run(LogicName::CL, 26, 60);
}

#[test]
fn milne_on_classical_pairs() {
    let opts = Default::default();
    for (phi, psi) in valid_pairs(LogicName::CL, 27, 60, 3) {
        let r = milne_interpolate(&phi, &psi, &opts).unwrap_or_else(|e| panic!("{phi} |- {psi}: {e}"));
        assert!(verify_interpolant(&phi, &r.interpolant_formula, &psi, LogicName::K, LogicName::LP));
    }
}

#[test]
fn invalid_pairs_are_rejected() {
    let opts = Default::default();
    for logic in [LogicName::B, LogicName::K, LogicName::CL] {
        let got = interpolate_formulas(&fml("p"), &fml("q"), logic, &opts);
        assert!(matches!(got, Err(InterpolationError::NotValid(_))), "{logic}: {got:?}");
    }
}

#[test]
fn kleq_is_unsupported() {
    let got = interpolate_formulas(&fml("(p & ~p) | r"), &fml("(q | ~q) | r"), LogicName::KLEQ, &Default::default());
    assert!(matches!(got, Err(InterpolationError::Unsupported(_))), "{got:?}");
}

#[test]
fn interpolants_use_shared_atoms_only() {
    let opts = Default::default();
    let r = milne_interpolate(&fml("p & q"), &fml("p | r"), &opts).unwrap();
    assert!(r.interpolant_formula.atoms().iter().all(|a| a.name() == "p"), "{}", r.interpolant_formula);
    let r = interpolate_formulas(&fml("p & (q | s)"), &fml("(q | s) | r"), LogicName::B, &opts).unwrap();
    let names: Vec<String> = r.interpolant_formula.atoms().iter().map(|a| a.name().to_string()).collect();
    assert!(names.iter().all(|n| n == "q" || n == "s"), "{}", r.interpolant_formula);
}
