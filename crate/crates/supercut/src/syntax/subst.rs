use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Atom, Formula, Sequent, FRESH_PREFIX};

/// A finite-support map from atoms to formulas, identity elsewhere.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(BTreeMap<Atom, Formula>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn insert(&mut self, atom: Atom, image: Formula) {
        self.0.insert(atom, image);
    }

    pub fn with(mut self, atom: &str, image: Formula) -> Self {
        self.insert(Atom::new(atom), image);
        self
    }

    pub fn get(&self, atom: &Atom) -> Option<&Formula> {
        self.0.get(atom)
    }

    /// The image of `atom`, which is the atom itself outside the support.
    pub fn image(&self, atom: &Atom) -> Formula {
        self.0.get(atom).cloned().unwrap_or_else(|| Formula::Atom(atom.clone()))
    }

    pub fn support(&self) -> impl Iterator<Item = &Atom> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Formula)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        match f {
            Formula::Atom(a) => self.image(a),
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::Neg(a) => Formula::neg(self.apply(a)),
            Formula::And(a, b) => Formula::and(self.apply(a), self.apply(b)),
            Formula::Or(a, b) => Formula::or(self.apply(a), self.apply(b)),
        }
    }

    pub fn apply_sequent(&self, s: &Sequent) -> Sequent {
        Sequent { left: s.left.map(|f| self.apply(f)), right: s.right.map(|f| self.apply(f)) }
    }

    /// `self` after `inner`: atoms are first mapped by `inner`, then by `self`.
    pub fn compose(&self, inner: &Substitution, atoms: &BTreeSet<Atom>) -> Substitution {
        let mut out = Substitution::new();
        for a in atoms.iter().chain(inner.support()) {
            out.insert(a.clone(), self.apply(&inner.image(a)));
        }
        out
    }

    fn domain(&self, extra: &BTreeSet<Atom>) -> BTreeSet<Atom> {
        self.0.keys().cloned().chain(extra.iter().cloned()).collect()
    }
}

impl FromIterator<(Atom, Formula)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Atom, Formula)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, g)| format!("{a} := {g}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Polarity {
    pub positive: bool,
    pub negative: bool,
}

impl Polarity {
    pub fn swapped(self) -> Polarity {
        Polarity { positive: self.negative, negative: self.positive }
    }

    pub fn is_mixed(self) -> bool {
        self.positive && self.negative
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolarityReport(BTreeMap<Atom, Polarity>);

impl PolarityReport {
    /// Flags for `atom`; both false when it does not occur.
    pub fn get(&self, atom: &Atom) -> Polarity {
        self.0.get(atom).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Polarity)> {
        self.0.iter()
    }

    fn record(&mut self, atom: &Atom, positive: bool) {
        let e = self.0.entry(atom.clone()).or_default();
        if positive {
            e.positive = true;
        } else {
            e.negative = true;
        }
    }
}

pub fn polarity(f: &Formula) -> PolarityReport {
    let mut report = PolarityReport::default();
    walk_polarity(f, true, &mut report);
    report
}

fn walk_polarity(f: &Formula, positive: bool, report: &mut PolarityReport) {
    match f {
        Formula::Atom(a) => report.record(a, positive),
        Formula::Top | Formula::Bot => {}
        Formula::Neg(a) => walk_polarity(a, !positive, report),
        Formula::And(a, b) | Formula::Or(a, b) => {
            walk_polarity(a, positive, report);
            walk_polarity(b, positive, report);
        }
    }
}

/// Each atom occurs only positively or only negatively.
pub fn is_balanced(f: &Formula) -> bool {
    polarity(f).iter().all(|(_, p)| !p.is_mixed())
}

pub fn is_balanced_subst(s: &Substitution, atoms: &BTreeSet<Atom>) -> bool {
    s.domain(atoms).iter().all(|a| is_balanced(&s.image(a)))
}

/// Images of distinct atoms share no atoms.
pub fn is_non_conflicting(s: &Substitution, atoms: &BTreeSet<Atom>) -> bool {
    let mut seen: BTreeSet<Atom> = BTreeSet::new();
    for a in s.domain(atoms) {
        let image_atoms = s.image(&a).atoms();
        if image_atoms.iter().any(|b| seen.contains(b)) {
            return false;
        }
        seen.extend(image_atoms);
    }
    true
}

pub fn is_atomic_subst(s: &Substitution, atoms: &BTreeSet<Atom>) -> bool {
    s.domain(atoms).iter().all(|a| s.image(a).is_atomic())
}

/// Supply of atom names carrying the reserved prefix.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    counters: BTreeMap<String, usize>,
    taken: BTreeSet<Atom>,
}

impl FreshNames {
    pub fn new() -> Self {
        FreshNames::default()
    }

    pub fn avoiding(atoms: impl IntoIterator<Item = Atom>) -> Self {
        FreshNames { counters: BTreeMap::new(), taken: atoms.into_iter().collect() }
    }

    pub fn next(&mut self, base: &str) -> Atom {
        let base = base.trim_start_matches(FRESH_PREFIX).to_string();
        loop {
            let n = self.counters.entry(base.clone()).or_insert(0);
            *n += 1;
            let atom = Atom::new(&format!("{FRESH_PREFIX}{base}{n}"));
            if self.taken.insert(atom.clone()) {
                return atom;
            }
        }
    }
}

/// Split `s` on `relevant` into a balanced non-conflicting part followed by an
/// atomic renaming: `sa ∘ bnc` agrees with `s` on every relevant atom.
pub fn decompose_substitution(
    s: &Substitution,
    relevant: &BTreeSet<Atom>,
    fresh: &mut FreshNames,
) -> (Substitution, Substitution) {
    let mut bnc = Substitution::new();
    let mut sa = Substitution::new();
    for p in relevant {
        let image = s.image(p);
        let report = polarity(&image);
        let mut names: BTreeMap<(Atom, bool), Atom> = BTreeMap::new();
        for (a, pol) in report.iter() {
            for positive in [true, false] {
                let occurs = if positive { pol.positive } else { pol.negative };
                if occurs {
                    let name = fresh.next(a.name());
                    sa.insert(name.clone(), Formula::Atom(a.clone()));
                    names.insert((a.clone(), positive), name);
                }
            }
        }
        bnc.insert(p.clone(), rename_by_polarity(&image, true, &names));
    }
    (bnc, sa)
}

fn rename_by_polarity(f: &Formula, positive: bool, names: &BTreeMap<(Atom, bool), Atom>) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(names[&(a.clone(), positive)].clone()),
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::Neg(a) => Formula::neg(rename_by_polarity(a, !positive, names)),
        Formula::And(a, b) => {
            Formula::and(rename_by_polarity(a, positive, names), rename_by_polarity(b, positive, names))
        }
        Formula::Or(a, b) => {
            Formula::or(rename_by_polarity(a, positive, names), rename_by_polarity(b, positive, names))
        }
    }
}
