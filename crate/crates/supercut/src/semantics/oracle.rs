use std::collections::BTreeMap;

use super::{Elem, LogicSpec, Matrix, SemanticsError};
use crate::syntax::{tau, Atom, Formula, Sequent};

pub type Valuation = BTreeMap<Atom, Elem>;

pub fn eval(m: &Matrix, v: &Valuation, f: &Formula) -> Result<Elem, SemanticsError> {
    Ok(match f {
        Formula::Atom(a) => *v.get(a).ok_or_else(|| SemanticsError::Unbound(a.name().to_string()))?,
        Formula::Top => m.top,
        Formula::Bot => m.bot,
        Formula::Neg(x) => m.neg[eval(m, v, x)?],
        Formula::And(x, y) => m.meet[eval(m, v, x)?][eval(m, v, y)?],
        Formula::Or(x, y) => m.join[eval(m, v, x)?][eval(m, v, y)?],
    })
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Var(usize),
    Top,
    Bot,
    Neg,
    And,
    Or,
}

/// A formula flattened to postfix form over a fixed atom ordering.
#[derive(Clone, Debug)]
pub struct Compiled {
    ops: Vec<Op>,
}

impl Compiled {
    /// `atoms` must contain every atom of `f`.
    pub fn new(f: &Formula, atoms: &[Atom]) -> Compiled {
        fn go(f: &Formula, atoms: &[Atom], ops: &mut Vec<Op>) {
            match f {
                Formula::Atom(a) => ops.push(Op::Var(atoms.iter().position(|b| b == a).expect("atom in universe"))),
                Formula::Top => ops.push(Op::Top),
                Formula::Bot => ops.push(Op::Bot),
                Formula::Neg(x) => {
                    go(x, atoms, ops);
                    ops.push(Op::Neg);
                }
                Formula::And(x, y) | Formula::Or(x, y) => {
                    go(x, atoms, ops);
                    go(y, atoms, ops);
                    ops.push(if matches!(f, Formula::And(..)) { Op::And } else { Op::Or });
                }
            }
        }
        let mut ops = Vec::new();
        go(f, atoms, &mut ops);
        Compiled { ops }
    }

    pub fn eval(&self, m: &Matrix, values: &[Elem], stack: &mut Vec<Elem>) -> Elem {
        stack.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Var(i) => values[i],
                Op::Top => m.top,
                Op::Bot => m.bot,
                Op::Neg => {
                    let x = stack.pop().expect("operand");
                    m.neg[x]
                }
                Op::And | Op::Or => {
                    let y = stack.pop().expect("operand");
                    let x = stack.pop().expect("operand");
                    if matches!(op, Op::And) {
                        m.meet[x][y]
                    } else {
                        m.join[x][y]
                    }
                }
            };
            stack.push(v);
        }
        stack.pop().expect("result")
    }

    /// Bitmask over all valuations (in odometer order) where the value is designated.
    /// Only usable when `size^atoms <= 64 * words`.
    pub fn designation_mask(&self, m: &Matrix, n_atoms: usize) -> Vec<u64> {
        let total = m.size().pow(n_atoms as u32);
        let mut mask = vec![0u64; total.div_ceil(64)];
        let mut values = vec![0; n_atoms];
        let mut stack = Vec::new();
        for (k, word) in (0..total).map(|k| (k, k / 64)) {
            if m.designated[self.eval(m, &values, &mut stack)] {
                mask[word] |= 1 << (k % 64);
            }
            advance(&mut values, m.size());
        }
        mask
    }
}

/// Odometer step; returns false after the last valuation.
fn advance(values: &mut [Elem], size: usize) -> bool {
    for v in values.iter_mut() {
        *v += 1;
        if *v < size {
            return true;
        }
        *v = 0;
    }
    false
}

fn holds_matrix(m: &Matrix, premises: &[Formula], conclusion: Option<&Formula>) -> bool {
    let atoms: Vec<Atom> = premises.iter().chain(conclusion).flat_map(|f| f.atoms()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let prem: Vec<Compiled> = premises.iter().map(|f| Compiled::new(f, &atoms)).collect();
    let concl = conclusion.map(|f| Compiled::new(f, &atoms));
    let mut values = vec![0; atoms.len()];
    let mut stack = Vec::new();
    loop {
        if prem.iter().all(|p| m.designated[p.eval(m, &values, &mut stack)]) {
            match &concl {
                None => return false,
                Some(c) if !m.designated[c.eval(m, &values, &mut stack)] => return false,
                Some(_) => {}
            }
        }
        if !advance(&mut values, m.size()) {
            return true;
        }
    }
}

/// Consequence by enumerating valuations over the occurring atoms.
/// With no conclusion this asks whether the premises form an antitheorem.
pub fn holds(logic: &LogicSpec, premises: &[Formula], conclusion: Option<&Formula>) -> bool {
    match logic {
        LogicSpec::Single(m) => holds_matrix(m, premises, conclusion),
        LogicSpec::Intersection(parts) => parts.iter().all(|l| holds(l, premises, conclusion)),
    }
}

pub fn holds_sequent(logic: &LogicSpec, premises: &[Sequent], conclusion: &Sequent) -> bool {
    let prem: Vec<Formula> = premises.iter().map(tau).collect();
    holds(logic, &prem, Some(&tau(conclusion)))
}
