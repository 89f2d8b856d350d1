use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::logical::NoMatch;
use crate::syntax::{Atom, Formula, Multiset, Sequent, Side};

/// A context variable of a rule schema, written with an uppercase initial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot(pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaItem {
    Atom(Atom),
    Slot(Slot),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaSequent {
    pub left: Vec<SchemaItem>,
    pub right: Vec<SchemaItem>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructuralRule {
    pub name: String,
    pub premises: Vec<SchemaSequent>,
    pub conclusion: SchemaSequent,
}

/// Values for the schema atoms and slots of a rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instantiation {
    pub atoms: BTreeMap<Atom, Formula>,
    pub slots: BTreeMap<Slot, Multiset>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad rule text: {0}")]
pub struct RuleParseError(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleClassification {
    pub cut_formulas: BTreeSet<Atom>,
    pub side_formulas: BTreeSet<Atom>,
    pub is_generalized_cut: bool,
    pub introduces_new_variables: bool,
}

impl SchemaSequent {
    pub fn new(mut left: Vec<SchemaItem>, mut right: Vec<SchemaItem>) -> Self {
        left.sort();
        right.sort();
        SchemaSequent { left, right }
    }

    /// An atomic sequent read as a slot-free schema.
    pub fn from_atomic(s: &Sequent) -> Self {
        let items = |m: &Multiset| m.iter().map(|f| SchemaItem::Atom(f.as_atom().expect("atomic").clone())).collect();
        SchemaSequent::new(items(&s.left), items(&s.right))
    }

    pub fn side(&self, side: Side) -> &[SchemaItem] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn atoms(&self, side: Side) -> impl Iterator<Item = &Atom> {
        self.side(side).iter().filter_map(|i| match i {
            SchemaItem::Atom(a) => Some(a),
            SchemaItem::Slot(_) => None,
        })
    }

    pub fn slots(&self, side: Side) -> impl Iterator<Item = &Slot> {
        self.side(side).iter().filter_map(|i| match i {
            SchemaItem::Slot(s) => Some(s),
            SchemaItem::Atom(_) => None,
        })
    }

    pub fn has_slots(&self) -> bool {
        self.slots(Side::Left).next().is_some() || self.slots(Side::Right).next().is_some()
    }

    /// The formula part under `atoms` (schema atoms not in the map stay themselves).
    pub fn fixed(&self, atoms: &BTreeMap<Atom, Formula>) -> Sequent {
        let side = |s| {
            self.atoms(s).map(|a| atoms.get(a).cloned().unwrap_or_else(|| Formula::Atom(a.clone()))).collect::<Multiset>()
        };
        Sequent::from_sides(side(Side::Left), side(Side::Right))
    }

    pub fn instantiate(&self, inst: &Instantiation) -> Sequent {
        let mut s = self.fixed(&inst.atoms);
        for side in [Side::Left, Side::Right] {
            for slot in self.slots(side) {
                let content = inst.slots.get(slot).cloned().unwrap_or_default();
                *s.side_mut(side) = s.side(side).sum(&content);
            }
        }
        s
    }

    fn rename(&self, f: &impl Fn(&Atom) -> Atom) -> SchemaSequent {
        let r = |items: &[SchemaItem]| {
            items
                .iter()
                .map(|i| match i {
                    SchemaItem::Atom(a) => SchemaItem::Atom(f(a)),
                    other => other.clone(),
                })
                .collect()
        };
        SchemaSequent::new(r(&self.left), r(&self.right))
    }
}

impl StructuralRule {
    pub fn new(name: &str, premises: Vec<SchemaSequent>, conclusion: SchemaSequent) -> Self {
        StructuralRule { name: name.to_string(), premises, conclusion }
    }

    /// Parse `"G |- D, p ; p, G' |- D' => G, G' |- D, D'"`.
    pub fn parse(name: &str, text: &str) -> Result<Self, RuleParseError> {
        let (prem, concl) =
            text.split_once("=>").ok_or_else(|| RuleParseError(format!("missing '=>' in '{text}'")))?;
        let premises = if prem.trim().is_empty() {
            Vec::new()
        } else {
            prem.split(';').map(parse_schema_sequent).collect::<Result<_, _>>()?
        };
        Ok(StructuralRule::new(name, premises, parse_schema_sequent(concl)?))
    }

    pub fn schema_atoms(&self) -> BTreeSet<Atom> {
        self.all_sequents()
            .flat_map(|s| s.atoms(Side::Left).chain(s.atoms(Side::Right)))
            .cloned()
            .collect()
    }

    pub fn slots(&self) -> BTreeSet<Slot> {
        self.all_sequents()
            .flat_map(|s| s.slots(Side::Left).chain(s.slots(Side::Right)))
            .cloned()
            .collect()
    }

    fn all_sequents(&self) -> impl Iterator<Item = &SchemaSequent> {
        self.premises.iter().chain(std::iter::once(&self.conclusion))
    }

    pub fn instantiate(&self, inst: &Instantiation) -> (Vec<Sequent>, Sequent) {
        (self.premises.iter().map(|p| p.instantiate(inst)).collect(), self.conclusion.instantiate(inst))
    }

    /// Rename schema atoms; premises are re-sorted and deduplicated.
    pub fn rename_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> StructuralRule {
        let mut premises: Vec<SchemaSequent> = self.premises.iter().map(|p| p.rename(f)).collect();
        premises.sort();
        premises.dedup();
        StructuralRule::new(&self.name, premises, self.conclusion.rename(f))
    }

    /// The canonical representative up to renaming schema atoms.
    pub fn canonical(&self) -> StructuralRule {
        let atoms: Vec<Atom> = self.schema_atoms().into_iter().collect();
        let names: Vec<Atom> = (0..atoms.len()).map(|i| Atom::new(&format!("x{}", i + 1))).collect();
        let mut best: Option<StructuralRule> = None;
        for perm in permutations(atoms.len()) {
            let map: BTreeMap<&Atom, &Atom> = atoms.iter().zip(perm.iter().map(|&j| &names[j])).collect();
            let r = self.rename_atoms(&|a| map[a].clone());
            if best.as_ref().is_none_or(|b| (&r.premises, &r.conclusion) < (&b.premises, &b.conclusion)) {
                best = Some(r);
            }
        }
        best.unwrap_or_else(|| self.clone())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn parse_schema_sequent(text: &str) -> Result<SchemaSequent, RuleParseError> {
    let (l, r) = text.split_once("|-").ok_or_else(|| RuleParseError(format!("missing '|-' in '{}'", text.trim())))?;
    Ok(SchemaSequent::new(parse_items(l)?, parse_items(r)?))
}

fn parse_items(text: &str) -> Result<Vec<SchemaItem>, RuleParseError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let mut chars = tok.chars();
            let first = chars.next().ok_or_else(|| RuleParseError("empty item".into()))?;
            let valid_rest = chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
            if first.is_ascii_uppercase() && valid_rest {
                Ok(SchemaItem::Slot(Slot(tok.to_string())))
            } else if (first.is_ascii_lowercase() || first == '_') && valid_rest && !tok.contains('\'') {
                Ok(SchemaItem::Atom(Atom::new(tok)))
            } else {
                Err(RuleParseError(format!("bad item '{tok}'")))
            }
        })
        .collect()
}

impl fmt::Display for SchemaItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaItem::Atom(a) => write!(f, "{}", a.name()),
            SchemaItem::Slot(s) => f.write_str(&s.0),
        }
    }
}

impl fmt::Display for SchemaSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[SchemaItem]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ");
        if !self.left.is_empty() {
            write!(f, "{} ", join(&self.left))?;
        }
        f.write_str("|-")?;
        if !self.right.is_empty() {
            write!(f, " {}", join(&self.right))?;
        }
        Ok(())
    }
}

impl fmt::Display for StructuralRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prem = self.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ; ");
        if prem.is_empty() {
            write!(f, "=> {}", self.conclusion)
        } else {
            write!(f, "{prem} => {}", self.conclusion)
        }
    }
}

impl FromStr for StructuralRule {
    type Err = RuleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StructuralRule::parse("rule", s)
    }
}

pub const IDENTITY: &str = "identity";
pub const CUT: &str = "cut";
pub const LIMITED_CUT_LEFT: &str = "limited-cut-left";
pub const LIMITED_CUT_RIGHT: &str = "limited-cut-right";
pub const EXPLOSIVE_CUT: &str = "explosive-cut";
pub const WEAKENING_LEFT: &str = "weakening-left";
pub const WEAKENING_RIGHT: &str = "weakening-right";
pub const CONTRACTION_LEFT: &str = "contraction-left";
pub const CONTRACTION_RIGHT: &str = "contraction-right";

const RULE_TEXT: [(&str, &str); 9] = [
    (IDENTITY, "=> p |- p"),
    (CUT, "G |- D, p ; p, G' |- D' => G, G' |- D, D'"),
    (LIMITED_CUT_LEFT, "|- p ; p, G |- D => G |- D"),
    (LIMITED_CUT_RIGHT, "G |- D, p ; p |- => G |- D"),
    (EXPLOSIVE_CUT, "|- p ; p |- => |-"),
    (WEAKENING_LEFT, "G |- D => p, G |- D"),
    (WEAKENING_RIGHT, "G |- D => G |- D, p"),
    (CONTRACTION_LEFT, "p, p, G |- D => p, G |- D"),
    (CONTRACTION_RIGHT, "G |- D, p, p => G |- D, p"),
];

/// One of the named builtin structural rules.
pub fn named_rule(name: &str) -> Option<StructuralRule> {
    RULE_TEXT
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| StructuralRule::parse(n, text).expect("builtin rule text parses"))
}

pub fn is_common(name: &str) -> bool {
    matches!(name, WEAKENING_LEFT | WEAKENING_RIGHT | CONTRACTION_LEFT | CONTRACTION_RIGHT)
}

/// Cut formulas, side formulas and the variable condition of a rule.
pub fn classify(rule: &StructuralRule) -> RuleClassification {
    let mut cut_formulas = BTreeSet::new();
    let mut side_formulas = BTreeSet::new();
    let mut all_schema = true;
    for a in rule.schema_atoms() {
        let in_concl = rule.conclusion.left.contains(&SchemaItem::Atom(a.clone()))
            || rule.conclusion.right.contains(&SchemaItem::Atom(a.clone()));
        let sides: BTreeSet<Side> = rule
            .all_sequents()
            .flat_map(|s| {
                let l = s.atoms(Side::Left).any(|b| *b == a).then_some(Side::Left);
                let r = s.atoms(Side::Right).any(|b| *b == a).then_some(Side::Right);
                l.into_iter().chain(r)
            })
            .collect();
        let is_cut = !in_concl;
        let is_side = sides.len() == 1;
        if is_cut {
            cut_formulas.insert(a.clone());
        }
        if is_side {
            side_formulas.insert(a.clone());
        }
        all_schema &= is_cut || is_side;
    }
    let in_premises: BTreeSet<SchemaItem> =
        rule.premises.iter().flat_map(|p| p.left.iter().chain(p.right.iter())).cloned().collect();
    let introduces_new_variables =
        rule.conclusion.left.iter().chain(rule.conclusion.right.iter()).any(|i| !in_premises.contains(i));
    RuleClassification { cut_formulas, side_formulas, is_generalized_cut: all_schema, introduces_new_variables }
}

/// Find values for the schema atoms and slots making the step an instance of `rule`.
/// With `atomic_only`, every premise and the conclusion must be atomic sequents.
pub fn match_structural(
    rule: &StructuralRule,
    premises: &[Sequent],
    conclusion: &Sequent,
    atomic_only: bool,
) -> Result<Instantiation, NoMatch> {
    if premises.len() != rule.premises.len() {
        return Err(NoMatch(format!(
            "arity: {} takes {} premise(s), got {}",
            rule.name,
            rule.premises.len(),
            premises.len()
        )));
    }
    if atomic_only && !(conclusion.is_atomic() && premises.iter().all(Sequent::is_atomic)) {
        return Err(NoMatch(format!("{} instance is not atomic", rule.name)));
    }
    let schema_atoms: Vec<Atom> = rule.schema_atoms().into_iter().collect();
    let candidates: Vec<Formula> = premises
        .iter()
        .chain(std::iter::once(conclusion))
        .flat_map(|s| s.formulas().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pairs: Vec<(&SchemaSequent, &Sequent)> =
        rule.premises.iter().zip(premises).chain(std::iter::once((&rule.conclusion, conclusion))).collect();
    let mut choice = vec![0usize; schema_atoms.len()];
    if !schema_atoms.is_empty() && candidates.is_empty() {
        return Err(NoMatch(format!("not an instance of {}", rule.name)));
    }
    loop {
        let atoms: BTreeMap<Atom, Formula> =
            schema_atoms.iter().cloned().zip(choice.iter().map(|&i| candidates[i].clone())).collect();
        if let Some(slots) = solve_slots(&pairs, &atoms) {
            return Ok(Instantiation { atoms, slots });
        }
        if !odometer(&mut choice, candidates.len()) {
            return Err(NoMatch(format!("not an instance of {}", rule.name)));
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

struct Constraint<'a> {
    residual: Multiset,
    slots: Vec<&'a Slot>,
}

fn solve_slots(pairs: &[(&SchemaSequent, &Sequent)], atoms: &BTreeMap<Atom, Formula>) -> Option<BTreeMap<Slot, Multiset>> {
    let mut constraints = Vec::new();
    for (schema, actual) in pairs {
        let fixed = schema.fixed(atoms);
        for side in [Side::Left, Side::Right] {
            let residual = actual.side(side).minus(fixed.side(side))?;
            constraints.push(Constraint { residual, slots: schema.slots(side).collect() });
        }
    }
    let mut assigned = BTreeMap::new();
    solve(&constraints, &mut assigned).then_some(assigned)
}

fn solve(constraints: &[Constraint], assigned: &mut BTreeMap<Slot, Multiset>) -> bool {
    loop {
        let mut progress = false;
        let mut branch: Option<(Slot, Multiset)> = None;
        for c in constraints {
            let mut remaining = c.residual.clone();
            let mut unknown: Vec<&Slot> = Vec::new();
            for s in &c.slots {
                match assigned.get(*s) {
                    Some(m) => match remaining.minus(m) {
                        Some(r) => remaining = r,
                        None => return false,
                    },
                    None => unknown.push(s),
                }
            }
            match unknown.as_slice() {
                [] if !remaining.is_empty() => return false,
                [] => {}
                [s] if unknown.len() == 1 => {
                    assigned.insert((*s).clone(), remaining);
                    progress = true;
                }
                // a slot repeated within one side splits evenly
                [s, rest @ ..] if rest.iter().all(|r| r == s) => {
                    let k = unknown.len();
                    let support: BTreeSet<&Formula> = remaining.iter().collect();
                    let mut part = Multiset::new();
                    for f in support {
                        let n = remaining.count(f);
                        if n % k != 0 {
                            return false;
                        }
                        for _ in 0..n / k {
                            part.insert(f.clone());
                        }
                    }
                    assigned.insert((*s).clone(), part);
                    progress = true;
                }
                [s, ..] => {
                    if branch.is_none() {
                        branch = Some(((*s).clone(), remaining));
                    }
                }
            }
            if progress {
                break;
            }
        }
        if progress {
            continue;
        }
        let Some((slot, pool)) = branch else {
            return true;
        };
        for sub in sub_multisets(&pool) {
            let mut trial = assigned.clone();
            trial.insert(slot.clone(), sub);
            if solve(constraints, &mut trial) {
                *assigned = trial;
                return true;
            }
        }
        return false;
    }
}

fn sub_multisets(m: &Multiset) -> Vec<Multiset> {
    let mut out = vec![Multiset::new()];
    let distinct: Vec<&Formula> = m.iter().collect::<BTreeSet<_>>().into_iter().collect();
    for f in distinct {
        let n = m.count(f);
        let mut next = Vec::new();
        for base in &out {
            let mut cur = base.clone();
            next.push(cur.clone());
            for _ in 0..n {
                cur.insert(f.clone());
                next.push(cur.clone());
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Sequent {
        s.parse().unwrap()
    }

    fn rule(name: &str) -> StructuralRule {
        named_rule(name).unwrap()
    }

    #[test]
    fn parse_and_render() {
        let r = rule(CUT);
        assert_eq!(r.premises.len(), 2);
        assert_eq!(r.to_string(), "G |- p, D ; p, G' |- D' => G, G' |- D, D'");
        assert_eq!(rule(IDENTITY).to_string(), "=> p |- p");
        assert_eq!(rule(EXPLOSIVE_CUT).to_string(), "|- p ; p |- => |-");
        assert!(StructuralRule::parse("x", "p |- q").is_err());
        assert!(StructuralRule::parse("x", "p |- q => p & q |-").is_err());
    }

    #[test]
    fn matching_examples() {
        let m = match_structural(&rule(CUT), &[seq("|- p"), seq("p |- q")], &seq("|- q"), true).unwrap();
        assert_eq!(m.atoms[&Atom::new("p")], Formula::atom("p"));
        let id = rule(IDENTITY);
        assert!(match_structural(&id, &[], &seq("p & q |- p & q"), false).is_ok());
        assert!(match_structural(&id, &[], &seq("p & q |- p & q"), true).is_err());
        assert!(match_structural(&id, &[], &seq("p |- q"), false).is_err());
    }

    #[test]
    fn matching_with_contexts() {
        let cut = rule(CUT);
        assert!(match_structural(&cut, &[seq("a |- b, p"), seq("p, c |- d")], &seq("a, c |- b, d"), true).is_ok());
        assert!(match_structural(&cut, &[seq("a |- b, p"), seq("p, c |- d")], &seq("a |- b, d"), true).is_err());
        let w = rule(WEAKENING_LEFT);
        assert!(match_structural(&w, &[seq("p |- q")], &seq("p, p |- q"), true).is_ok());
        let c = rule(CONTRACTION_RIGHT);
        assert!(match_structural(&c, &[seq("r |- p, p, q")], &seq("r |- p, q"), true).is_ok());
        assert!(match_structural(&c, &[seq("r |- p, q")], &seq("r |- p, q"), true).is_err());
        let lc = rule(LIMITED_CUT_LEFT);
        assert!(match_structural(&lc, &[seq("|- p"), seq("p, r |- s")], &seq("r |- s"), true).is_ok());
        assert!(match_structural(&lc, &[seq("q |- p"), seq("p, r |- s")], &seq("q, r |- s"), true).is_err());
    }

    #[test]
    fn classification() {
        for name in [CUT, LIMITED_CUT_LEFT, LIMITED_CUT_RIGHT, EXPLOSIVE_CUT] {
            assert!(classify(&rule(name)).is_generalized_cut, "{name}");
        }
        let id = classify(&rule(IDENTITY));
        assert!(!id.is_generalized_cut);
        assert!(id.introduces_new_variables);
        assert!(!classify(&rule(CUT)).introduces_new_variables);
        assert!(classify(&rule(WEAKENING_LEFT)).introduces_new_variables);
    }

    #[test]
    fn canonical_forms_identify_renamings() {
        let a = StructuralRule::parse("r", "|- a ; a, b |- c => b |- c").unwrap();
        let b = StructuralRule::parse("r", "|- z ; y, z |- x => y |- x").unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }
}
