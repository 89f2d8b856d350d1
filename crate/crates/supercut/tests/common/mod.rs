#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use supercut::calculus::{CONTRACTION_LEFT, CONTRACTION_RIGHT, CUT, IDENTITY, WEAKENING_LEFT, WEAKENING_RIGHT};
use supercut::engine::weaken_to;
use supercut::proof::{from_text, Proof};
use supercut::syntax::{Formula, Sequent, Side};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn seq(s: &str) -> Sequent {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn fml(s: &str) -> Formula {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn atoms(names: &[&str]) -> Vec<Formula> {
    names.iter().map(|n| Formula::atom(n)).collect()
}

/// Every formula over `base` with connective depth at most `depth`.
pub fn all_formulas(base: &[Formula], depth: usize) -> Vec<Formula> {
    let mut layers: Vec<BTreeSet<Formula>> = vec![base.iter().cloned().collect()];
    let mut all: BTreeSet<Formula> = layers[0].clone();
    for _ in 0..depth {
        let prev: Vec<Formula> = all.iter().cloned().collect();
        let mut next = BTreeSet::new();
        for a in &prev {
            next.insert(Formula::neg(a.clone()));
            for b in &prev {
                next.insert(Formula::and(a.clone(), b.clone()));
                next.insert(Formula::or(a.clone(), b.clone()));
            }
        }
        all.extend(next.iter().cloned());
        layers.push(next);
    }
    all.into_iter().collect()
}

/// A random formula of depth at most `depth` over the first `n_atoms` of p, q, r, s.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, n_atoms: usize, depth: usize, constants: bool) -> Formula {
    const NAMES: [&str; 4] = ["p", "q", "r", "s"];
    if depth == 0 || rng.gen_ratio(1, 4) {
        if constants && rng.gen_ratio(1, 10) {
            return if rng.gen_bool(0.5) { Formula::Top } else { Formula::Bot };
        }
        return Formula::atom(NAMES[rng.gen_range(0..n_atoms)]);
    }
    let sub = |rng: &mut R| random_formula(rng, n_atoms, depth - 1, constants);
    match rng.gen_range(0..3) {
        0 => Formula::neg(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        _ => Formula::or(sub(rng), sub(rng)),
    }
}

pub fn random_sequent<R: Rng + ?Sized>(rng: &mut R, n_atoms: usize, depth: usize, max_side: usize) -> Sequent {
    let side = |rng: &mut R| -> Vec<Formula> {
        let n = rng.gen_range(0..=max_side);
        (0..n).map(|_| random_formula(rng, n_atoms, depth, true)).collect()
    };
    let left = side(rng);
    let right = side(rng);
    Sequent::new(left, right)
}

pub struct Fixture {
    pub name: String,
    pub derives: String,
    pub premises: Vec<Sequent>,
    pub proof: Proof,
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/interderivable")
}

/// Proof files whose header comments name the derived rule and the premises.
pub fn interderivability_fixtures() -> Vec<Fixture> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .expect("fixture dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).expect("fixture");
            let mut derives = String::new();
            let mut premises = Vec::new();
            for line in text.lines() {
                if let Some(r) = line.strip_prefix("# derives:") {
                    derives = r.trim().to_string();
                } else if let Some(s) = line.strip_prefix("# premise:") {
                    premises.push(seq(s.trim()));
                }
            }
            let proof = from_text(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            Fixture { name: path.file_stem().unwrap().to_string_lossy().into_owned(), derives, premises, proof }
        })
        .collect()
}

/// Cut a compound formula in and out: weaken it on both sides, cut, then
/// contract the duplicated context.
pub fn pad_with_cut(p: Proof, a: &Formula) -> Proof {
    let s = p.conclusion.clone();
    let left = weaken_to(p.clone(), &s.clone().with(Side::Right, a.clone()));
    let right = weaken_to(p, &s.clone().with(Side::Left, a.clone()));
    let doubled = s.sum(&s);
    let mut cur = Proof::structural(CUT, doubled.clone(), vec![left, right]);
    for side in [Side::Left, Side::Right] {
        let rule = if side == Side::Left { CONTRACTION_LEFT } else { CONTRACTION_RIGHT };
        for f in s.side(side).iter() {
            let next = cur.conclusion.without(side, f).expect("duplicated");
            cur = Proof::structural(rule, next, vec![cur]);
        }
    }
    cur
}

/// Weaken by a copy of a formula already present, then contract it away.
pub fn pad_with_contraction(p: Proof, side: Side, f: &Formula) -> Proof {
    let s = p.conclusion.clone();
    let rule_w = if side == Side::Left { WEAKENING_LEFT } else { WEAKENING_RIGHT };
    let rule_c = if side == Side::Left { CONTRACTION_LEFT } else { CONTRACTION_RIGHT };
    let w = Proof::structural(rule_w, s.clone().with(side, f.clone()), vec![p]);
    Proof::structural(rule_c, s, vec![w])
}

/// Adversarial padding in GCL: the result proves the same sequent from the
/// same premise leaves, but with non-atomic Cut, Weakening, Contraction and
/// Identity steps.
pub fn pad(p: &Proof, rng: &mut impl Rng, steps: usize) -> Proof {
    let mut cur = p.clone();
    for _ in 0..steps {
        let nodes: Vec<Vec<usize>> = cur.nodes().into_iter().map(|(path, _)| path).collect();
        let path = nodes.choose(rng).expect("non-empty").clone();
        let node = cur.at(&path).expect("path").clone();
        let s = node.conclusion.clone();
        let compound: Vec<(Side, Formula)> = [Side::Left, Side::Right]
            .into_iter()
            .flat_map(|side| s.side(side).iter().filter(|f| !f.is_atomic()).map(move |f| (side, f.clone())))
            .collect();
        let shared: Vec<Formula> =
            s.left.iter().filter(|f| !f.is_atomic() && s.right.contains(f)).cloned().collect();
        let replacement = match rng.gen_range(0..3) {
            0 if !shared.is_empty() => {
                let a = shared.choose(rng).unwrap();
                weaken_to(Proof::structural(IDENTITY, Sequent::new([a.clone()], [a.clone()]), vec![]), &s)
            }
            1 if !compound.is_empty() => {
                let (side, f) = compound.choose(rng).unwrap();
                pad_with_contraction(node, *side, f)
            }
            _ => {
                let a = Formula::and(random_formula(rng, 2, 1, false), random_formula(rng, 2, 1, false));
                pad_with_cut(node, &a)
            }
        };
        *cur.at_mut(&path).expect("path") = replacement;
    }
    cur
}
