use super::{Formula, Multiset, Sequent};

fn canonical(m: &Multiset) -> Vec<Formula> {
    let mut v: Vec<(String, Formula)> = m.iter().map(|f| (f.to_string(), f.clone())).collect();
    v.sort();
    v.into_iter().map(|(_, f)| f).collect()
}

fn fold_right(items: Vec<Formula>, unit: Formula, op: fn(Formula, Formula) -> Formula) -> Formula {
    let mut it = items.into_iter().rev();
    match it.next() {
        None => unit,
        Some(last) => it.fold(last, |acc, f| op(f, acc)),
    }
}

/// `~(conjunction of left) | (disjunction of right)`, with `T` and `F` for empty sides.
pub fn tau(s: &Sequent) -> Formula {
    let conj = fold_right(canonical(&s.left), Formula::Top, Formula::and);
    let disj = fold_right(canonical(&s.right), Formula::Bot, Formula::or);
    Formula::or(Formula::neg(conj), disj)
}

pub fn rho(f: &Formula) -> Sequent {
    Sequent::new([], [f.clone()])
}

/// Conjunction of `tau` over a set of sequents; `T` for the empty set.
pub fn set_to_formula<'a>(set: impl IntoIterator<Item = &'a Sequent>) -> Formula {
    let mut parts: Vec<Formula> = set.into_iter().map(tau).collect();
    parts.sort_by_key(|f| f.to_string());
    parts.dedup();
    fold_right(parts, Formula::Top, Formula::and)
}
