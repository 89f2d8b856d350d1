//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::*;
use rand::Rng;
use supercut::calculus::{
    at_set, at_set_with, builtin_calculus, hilbert_to_structural, named_rule, sigma_expand, CalculusName, Instantiation,
    Slot, CUT, LIMITED_CUT_LEFT,
};
use supercut::engine::{derives, refutes, EngineOptions, Prover, SetSequent};
use supercut::interpolate::{interpolate_formulas, milne_interpolate, verify_interpolant};
use supercut::proof::{
    check, has_subformula_property, is_analytic_synthetic, is_structurally_atomic, NodeClass, Proof,
};
use supercut::semantics::{bool2, builtin, b4, holds, holds_sequent, k3, lp3, Compiled, LogicName, Matrix};
use supercut::syntax::{tau, Atom, Formula, Multiset, Sequent, Substitution};
use supercut::transform::{eliminate_cuts, normalize};

type Outcome = Result<String, String>;

fn opts() -> EngineOptions {
    EngineOptions::default()
}

fn rhs(f: &Formula) -> Sequent {
    Sequent::new([], [f.clone()])
}

/// Designation masks over the valuations of `atoms`, for many consequence checks at once.
fn designation(m: &Matrix, f: &Formula, atoms: &[Atom]) -> Vec<u64> {
    Compiled::new(f, atoms).designation_mask(m, atoms.len())
}

fn included(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

const EXACT: [(CalculusName, LogicName); 4] =
    [(CalculusName::GB, LogicName::B), (CalculusName::GLP, LogicName::LP), (CalculusName::GK, LogicName::K), (CalculusName::GCL, LogicName::CL)];

fn matrix_of(l: LogicName) -> Matrix {
    match l {
        LogicName::B => b4(),
        LogicName::LP => lp3(),
        LogicName::K => k3(),
        LogicName::CL => bool2(),
        other => panic!("no single matrix for {other}"),
    }
}

fn corpus() -> Vec<Formula> {
    let mut base = atoms(&["p", "q"]);
    base.extend([Formula::Top, Formula::Bot]);
    all_formulas(&base, 2)
}

fn criterion_1() -> Outcome {
    let fs = corpus();
    let universe = [Atom::new("p"), Atom::new("q")];
    let mut disagreements = Vec::new();
    let mut checked = 0usize;
    for (cname, lname) in EXACT {
        let calc = builtin_calculus(cname);
        let m = matrix_of(lname);
        let logic = builtin(lname);
        let masks: Vec<Vec<u64>> = fs.iter().map(|f| designation(&m, &tau(&rhs(f)), &universe)).collect();
        let probe = Prover::new(&[], universe.iter().cloned(), &calc, &opts()).map_err(|e| e.to_string())?;
        let at: Vec<Vec<SetSequent>> = fs.iter().map(|f| probe.at_masks(&rhs(f)).expect("in universe")).collect();
        // the bitmask oracle must itself agree with holds_sequent
        let mut r = rng(100 + cname as u64);
        for _ in 0..2000 {
            let (i, j) = (r.gen_range(0..fs.len()), r.gen_range(0..fs.len()));
            let direct = holds_sequent(&logic, &[rhs(&fs[i])], &rhs(&fs[j]));
            if direct != included(&masks[i], &masks[j]) {
                return Err(format!("bitmask oracle differs from holds_sequent on {} / {}", fs[i], fs[j]));
            }
        }
        for (i, g) in fs.iter().enumerate() {
            let prover = Prover::new(&[rhs(g)], universe.iter().cloned(), &calc, &opts()).map_err(|e| e.to_string())?;
            for (j, f) in fs.iter().enumerate() {
                checked += 1;
                if prover.covers(&at[j]) != included(&masks[i], &masks[j]) && disagreements.len() < 5 {
                    disagreements.push(format!("{cname}: {g} / {f}"));
                }
            }
        }
    }
    let mut r = rng(1);
    let mut random = 0;
    for k in 0..500 {
        let (cname, lname) = EXACT[k % 4];
        let g = random_formula(&mut r, 3, 3, true);
        let f = random_formula(&mut r, 3, 3, true);
        let got = derives(&[rhs(&g)], &rhs(&f), &builtin_calculus(cname), &opts()).map_err(|e| e.to_string())?;
        random += 1;
        if got.verdict != holds_sequent(&builtin(lname), &[rhs(&g)], &rhs(&f)) {
            disagreements.push(format!("{cname}: {g} / {f}"));
        }
    }
    if disagreements.is_empty() {
        Ok(format!("{} formulas, {checked} corpus queries + {random} random, 0 disagreements", fs.len()))
    } else {
        Err(format!("disagreements: {disagreements:?}"))
    }
}

fn criterion_2() -> Outcome {
    let fs = corpus();
    let universe = [Atom::new("p"), Atom::new("q")];
    let provers: BTreeMap<CalculusName, Prover> = [CalculusName::GB, CalculusName::GK, CalculusName::GLP, CalculusName::GCL]
        .into_iter()
        .map(|c| (c, Prover::new(&[], universe.iter().cloned(), &builtin_calculus(c), &opts()).expect("saturates")))
        .collect();
    let probe = &provers[&CalculusName::GB];
    let mut bad = Vec::new();
    for g in &fs {
        for f in &fs {
            let masks = probe.at_masks(&Sequent::new([g.clone()], [f.clone()])).expect("in universe");
            let d = |c: CalculusName| provers[&c].covers(&masks);
            if (d(CalculusName::GB) != d(CalculusName::GK) || d(CalculusName::GLP) != d(CalculusName::GCL))
                && bad.len() < 5
            {
                bad.push(format!("{g} |- {f}"));
            }
        }
    }
    let mut r = rng(3);
    let (gk, gcl) = (builtin_calculus(CalculusName::GK), builtin_calculus(CalculusName::GCL));
    let mut refutable = 0;
    for _ in 0..300 {
        let premises: Vec<Sequent> = (0..r.gen_range(1..4)).map(|_| random_sequent(&mut r, 3, 2, 2)).collect();
        let a = refutes(&premises, &gk, &opts()).map_err(|e| e.to_string())?.verdict;
        let b = refutes(&premises, &gcl, &opts()).map_err(|e| e.to_string())?.verdict;
        refutable += a as usize;
        if a != b {
            bad.push(format!("refutation of {premises:?}"));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} theorem queries per calculus pair, 300 premise sets ({refutable} refutable), 0 disagreements",
            fs.len() * fs.len()
        ))
    } else {
        Err(format!("disagreements: {bad:?}"))
    }
}

fn normal_form_failure(p: &Proof, premises: &[Sequent]) -> Option<String> {
    let gcl = builtin_calculus(CalculusName::GCL);
    let q = match normalize(p, &gcl, premises, &p.conclusion) {
        Ok(q) => q,
        Err(e) => return Some(e.to_string()),
    };
    if let Err(e) = check(&q, &gcl, premises) {
        return Some(format!("output does not check: {e}"));
    }
    let checks = [
        (is_structurally_atomic(&q), "structurally atomic"),
        (is_analytic_synthetic(&q), "analytic-synthetic"),
        (has_subformula_property(&q, premises), "subformula property"),
        (q.conclusion == p.conclusion, "same conclusion"),
        (q.premise_leaves().is_subset(&p.premise_leaves()), "premise leaves"),
    ];
    if let Some((_, what)) = checks.iter().find(|(ok, _)| !ok) {
        return Some(format!("not {what}"));
    }
    match normalize(&q, &gcl, premises, &q.conclusion) {
        Ok(again) if again == q => None,
        Ok(_) => Some("not idempotent".into()),
        Err(e) => Some(format!("renormalizing: {e}")),
    }
}

fn criterion_3() -> Outcome {
    let gcl = builtin_calculus(CalculusName::GCL);
    let mut cases: Vec<(String, Proof, Vec<Sequent>)> = Vec::new();
    let mut r = rng(4);
    for f in interderivability_fixtures() {
        let padded = pad(&f.proof, &mut r, 2);
        cases.push((format!("fixture {}", f.name), f.proof, f.premises.clone()));
        cases.push((format!("padded fixture {}", f.name), padded, f.premises));
    }
    let (mut engine, mut padded) = (0, 0);
    while engine + padded < 80 {
        let premises: Vec<Sequent> = (0..r.gen_range(0..3)).map(|_| random_sequent(&mut r, 3, 1, 2)).collect();
        let goal = random_sequent(&mut r, 3, 2, 2);
        let Some(p) = derives(&premises, &goal, &gcl, &opts()).map_err(|e| e.to_string())?.proof else { continue };
        if engine <= padded {
            engine += 1;
            cases.push((format!("engine {goal}"), p, premises));
        } else {
            padded += 1;
            cases.push((format!("padded engine {goal}"), pad(&p, &mut r, 3), premises));
        }
    }
    let mut failures = Vec::new();
    for (name, p, premises) in &cases {
        if let Err(e) = check(p, &gcl, premises) {
            return Err(format!("{name}: input does not check: {e}"));
        }
        if let Some(why) = normal_form_failure(p, premises) {
            failures.push(format!("{name}: {why}"));
        }
    }
    if failures.is_empty() {
        Ok(format!("{} proofs ({engine} engine, {padded} padded engine, 36 fixture), 100% pass", cases.len()))
    } else {
        Err(format!("{} of {} failed: {:?}", failures.len(), cases.len(), &failures[..failures.len().min(5)]))
    }
}

fn criterion_4() -> Outcome {
    let gcl = builtin_calculus(CalculusName::GCL);
    let cl = builtin(LogicName::CL);
    let mut r = rng(5);
    let mut done = 0;
    let mut failures = Vec::new();
    while done < 100 {
        let s = random_sequent(&mut r, 3, 2, 2);
        if !holds_sequent(&cl, &[], &s) {
            continue;
        }
        done += 1;
        let Some(p) = derives(&[], &s, &gcl, &opts()).map_err(|e| e.to_string())?.proof else {
            failures.push(format!("{s}: no proof found"));
            continue;
        };
        let result = normalize(&p, &gcl, &[], &s).and_then(|q| eliminate_cuts(&q));
        match result {
            Ok(q) if check(&q, &gcl, &[]).is_ok() && q.count_rule(CUT) == 0 && q.count_class(NodeClass::Elim) == 0 => {}
            Ok(q) => failures.push(format!("{s}: {} cuts, {} eliminations", q.count_rule(CUT), q.count_class(NodeClass::Elim))),
            Err(e) => failures.push(format!("{s}: {e}")),
        }
    }
    if failures.is_empty() {
        Ok("100 CL-valid sequents, all cut-free and elimination-free".into())
    } else {
        Err(format!("{} failures: {:?}", failures.len(), &failures[..failures.len().min(5)]))
    }
}

fn criterion_5() -> Outcome {
    let mut problems = Vec::new();
    let rule = named_rule(LIMITED_CUT_LEFT).expect("builtin");
    let ground = Instantiation {
        atoms: [(Atom::new("p"), fml("p"))].into(),
        slots: [(Slot("G".into()), Multiset::new().with(fml("r"))), (Slot("D".into()), Multiset::new().with(fml("s")))]
            .into(),
    };
    let expanded: Vec<String> =
        sigma_expand(&rule, &ground, &Substitution::new().with("p", fml("p & q"))).iter().map(|r| r.to_string()).collect();
    if expanded != ["|- p ; |- q ; p, q, r |- s => r |- s"] {
        problems.push(format!("limited cut expansion: {expanded:?}"));
    }
    let hilbert: Vec<String> =
        hilbert_to_structural(&[fml("p & ~p")], Some(&fml("q | ~q"))).iter().map(|r| r.to_string()).collect();
    if hilbert != ["|- p ; p |- => q |- q"] {
        problems.push(format!("hilbert_to_structural: {hilbert:?}"));
    }
    let gcl = builtin_calculus(CalculusName::GCL);
    let fixtures = interderivability_fixtures();
    for f in &fixtures {
        if let Err(e) = check(&f.proof, &gcl, &f.premises) {
            problems.push(format!("fixture {}: {e}", f.name));
        }
    }
    let disc = fml("(p & ~p) | (q & ~q)");
    let anti = |l: LogicName| holds(&builtin(l), std::slice::from_ref(&disc), None);
    let expected = [(LogicName::K, true), (LogicName::CL, true), (LogicName::ETL, false), (LogicName::ECQ, false)];
    for (l, want) in expected {
        if anti(l) != want {
            problems.push(format!("{disc} antitheorem in {l}: {}", anti(l)));
        }
    }
    if problems.is_empty() {
        Ok(format!("expansion, Hilbert rule, {} interderivability proofs, discriminator", fixtures.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn criterion_6() -> Outcome {
    let b = builtin(LogicName::B);
    let mut r = rng(6);
    let mut failures = Vec::new();
    for _ in 0..300 {
        let s = random_sequent(&mut r, 3, 3, 2);
        let at = at_set(&s);
        let members: Vec<Sequent> = at.iter().cloned().collect();
        let forward = members.iter().all(|m| holds_sequent(&b, std::slice::from_ref(&s), m));
        let backward = holds_sequent(&b, &members, &s);
        if !forward || !backward {
            failures.push(format!("{s}: not equivalent to its At-set"));
        }
        for k in 0..5u64 {
            let mut pick_rng = rng(1000 * k + 7);
            let other = at_set_with(&s, &mut |opts| pick_rng.gen_range(0..opts.len()));
            if other != at {
                failures.push(format!("{s}: At-set depends on the decomposition order"));
                break;
            }
        }
    }
    if failures.is_empty() {
        Ok("300 sequents, equivalent under B4 and order-invariant over 5 orders".into())
    } else {
        Err(format!("{} failures: {:?}", failures.len(), &failures[..failures.len().min(5)]))
    }
}

/// Candidate pairs that are valid often enough; validity is left to the oracle.
fn candidate_pair(r: &mut impl Rng) -> (Formula, Formula) {
    let phi = random_formula(r, 4, 3, true);
    let other = random_formula(r, 4, 2, true);
    match r.gen_range(0..4) {
        0 => (phi.clone(), Formula::or(phi, other)),
        1 => (Formula::and(phi.clone(), other), phi),
        2 => (phi.clone(), Formula::or(other, Formula::neg(Formula::neg(phi)))),
        _ => (phi, random_formula(r, 4, 3, true)),
    }
}

fn interpolation_run(
    logic: LogicName,
    count: usize,
    seed: u64,
    (l1, l2): (LogicName, LogicName),
    milne: bool,
) -> Result<(), String> {
    let oracle = builtin(logic);
    let mut r = rng(seed);
    let mut done = 0;
    while done < count {
        let (phi, psi) = candidate_pair(&mut r);
        if !holds(&oracle, std::slice::from_ref(&phi), Some(&psi)) {
            continue;
        }
        done += 1;
        let got = if milne {
            milne_interpolate(&phi, &psi, &opts())
        } else {
            interpolate_formulas(&phi, &psi, logic, &opts())
        };
        let chi = got.map_err(|e| format!("{logic}: {phi} |- {psi}: {e}"))?.interpolant_formula;
        if !verify_interpolant(&phi, &chi, &psi, l1, l2) {
            return Err(format!("{logic}: {chi} does not interpolate {phi} |- {psi}"));
        }
    }
    Ok(())
}

/// Truth-table classes of the formulas over {r} of depth at most 3, each with
/// one representative. Classes are closed under the connectives, so combining
/// representatives covers every formula.
fn classes_over_r(ms: &[Matrix]) -> Vec<Formula> {
    let r = [Atom::new("r")];
    let key = |f: &Formula| -> Vec<Vec<u64>> { ms.iter().map(|m| designation_key(m, f, &r)).collect() };
    let mut reps: BTreeMap<Vec<Vec<u64>>, Formula> = BTreeMap::new();
    for f in [Formula::atom("r"), Formula::Top, Formula::Bot] {
        reps.entry(key(&f)).or_insert(f);
    }
    for _ in 0..3 {
        let cur: Vec<Formula> = reps.values().cloned().collect();
        for a in &cur {
            let n = Formula::neg(a.clone());
            reps.entry(key(&n)).or_insert(n);
            for b in &cur {
                for f in [Formula::and(a.clone(), b.clone()), Formula::or(a.clone(), b.clone())] {
                    reps.entry(key(&f)).or_insert(f);
                }
            }
        }
    }
    reps.into_values().collect()
}

/// The value of `f` under each valuation, as a key independent of designation.
fn designation_key(m: &Matrix, f: &Formula, atoms: &[Atom]) -> Vec<u64> {
    let c = Compiled::new(f, atoms);
    let mut stack = Vec::new();
    (0..m.size()).map(|v| c.eval(m, &[v], &mut stack) as u64).collect()
}

fn criterion_7() -> Outcome {
    interpolation_run(LogicName::B, 200, 71, (LogicName::B, LogicName::B), false)?;
    interpolation_run(LogicName::K, 100, 72, (LogicName::K, LogicName::B), false)?;
    interpolation_run(LogicName::CL, 100, 73, (LogicName::K, LogicName::LP), true)?;
    let phi = fml("(p & ~p) | r");
    let psi = fml("(q | ~q) | r");
    let kleq = builtin(LogicName::KLEQ);
    if !holds(&kleq, std::slice::from_ref(&phi), Some(&psi)) {
        return Err(format!("{phi} |- {psi} is not valid in K<="));
    }
    let reps = classes_over_r(&[k3(), lp3()]);
    let witnesses: Vec<&Formula> = reps
        .iter()
        .filter(|chi| {
            holds(&kleq, std::slice::from_ref(&phi), Some(chi)) && holds(&kleq, std::slice::from_ref(*chi), Some(&psi))
        })
        .collect();
    if !witnesses.is_empty() {
        return Err(format!("interpolants over {{r}} exist: {witnesses:?}"));
    }
    Ok(format!("200 B, 100 K, 100 CL pairs verified; {} classes over {{r}}, 0 witnesses", reps.len()))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut false_positives = Vec::new();
    let (mut oracle_true, mut missed) = (0, 0);
    for k in 0..200 {
        let (cname, lname) = if k % 2 == 0 { (CalculusName::GETL, LogicName::ETL) } else { (CalculusName::GECQ, LogicName::ECQ) };
        let premises: Vec<Sequent> = (0..r.gen_range(0..3)).map(|_| random_sequent(&mut r, 3, 2, 2)).collect();
        let goal = random_sequent(&mut r, 3, 2, 2);
        let calc = builtin_calculus(cname);
        let got = derives(&premises, &goal, &calc, &EngineOptions { depth_bound: 2, ..opts() }).map_err(|e| e.to_string())?;
        let truth = holds_sequent(&builtin(lname), &premises, &goal);
        oracle_true += truth as usize;
        if got.verdict && !truth {
            false_positives.push(format!("{cname}: {premises:?} |- {goal}"));
        }
        if truth && !got.verdict {
            missed += 1;
        }
        if let Some(p) = &got.proof {
            if let Err(e) = check(p, &calc, &premises) {
                return Err(format!("{cname}: proof does not check: {e}"));
            }
        }
    }
    if !false_positives.is_empty() {
        return Err(format!("false positives: {:?}", &false_positives[..false_positives.len().min(5)]));
    }
    Ok(format!("200 queries, 0 false positives; missed {missed}/{oracle_true} oracle-true instances"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 oracle equivalence", criterion_1),
        ("2 admissibility", criterion_2),
        ("3 normal-form pipeline", criterion_3),
        ("4 cut elimination", criterion_4),
        ("5 exact fixtures", criterion_5),
        ("6 At-set correctness", criterion_6),
        ("7 interpolation", criterion_7),
        ("8 bounded soundness", criterion_8),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}) [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
