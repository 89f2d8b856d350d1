//! Logical and structural rules, calculi, At-sets and rule expansions.

mod expansion;
mod logical;
mod structural;

use std::fmt;
use std::str::FromStr;

pub use expansion::{balanced_expansions, hilbert_to_structural, sigma_expand, Expansion};
pub use logical::{
    at_set, at_set_with, axiom_for, decomposable, elim_path, intro_derive, match_logical, Direction, LogicalRuleId,
    NoMatch, RuleClass, RuleKind,
};
pub use structural::{
    classify, is_common, match_structural, named_rule, Instantiation, RuleClassification, RuleParseError,
    SchemaItem, SchemaSequent, Slot, StructuralRule, CONTRACTION_LEFT, CONTRACTION_RIGHT, CUT, EXPLOSIVE_CUT,
    IDENTITY, LIMITED_CUT_LEFT, LIMITED_CUT_RIGHT, WEAKENING_LEFT, WEAKENING_RIGHT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown calculus '{0}'")]
pub struct UnknownCalculus(pub String);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CalculusName {
    GB,
    GLP,
    GK,
    GETL,
    GECQ,
    GCL,
}

impl CalculusName {
    pub const ALL: [CalculusName; 6] =
        [CalculusName::GB, CalculusName::GLP, CalculusName::GK, CalculusName::GETL, CalculusName::GECQ, CalculusName::GCL];

    pub fn token(self) -> &'static str {
        match self {
            CalculusName::GB => "gb",
            CalculusName::GLP => "glp",
            CalculusName::GK => "gk",
            CalculusName::GETL => "getl",
            CalculusName::GECQ => "gecq",
            CalculusName::GCL => "gcl",
        }
    }
}

impl fmt::Display for CalculusName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token().to_uppercase())
    }
}

impl FromStr for CalculusName {
    type Err = UnknownCalculus;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CalculusName::ALL
            .into_iter()
            .find(|c| c.token().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownCalculus(s.to_string()))
    }
}

/// GB extended by a set of specific structural rules. The logical rules,
/// Weakening and Contraction belong to every calculus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calculus {
    pub name: String,
    pub specific: Vec<StructuralRule>,
}

impl Calculus {
    pub fn new(name: &str, specific: Vec<StructuralRule>) -> Self {
        Calculus { name: name.to_string(), specific }
    }

    pub fn has_specific(&self, name: &str) -> bool {
        self.specific.iter().any(|r| r.name == name)
    }

    /// A specific or common structural rule by name.
    pub fn rule(&self, name: &str) -> Option<StructuralRule> {
        if is_common(name) {
            return named_rule(name);
        }
        self.specific.iter().find(|r| r.name == name).cloned()
    }

    /// Whether every specific rule is Identity or Cut, where atomic saturation decides derivability.
    pub fn is_exact(&self) -> bool {
        self.specific.iter().all(|r| r.name == IDENTITY || r.name == CUT)
    }

    pub fn with_rule(mut self, rule: StructuralRule) -> Self {
        self.specific.push(rule);
        self
    }
}

pub fn builtin_calculus(name: CalculusName) -> Calculus {
    let rules: &[&str] = match name {
        CalculusName::GB => &[],
        CalculusName::GLP => &[IDENTITY],
        CalculusName::GK => &[CUT],
        CalculusName::GETL => &[LIMITED_CUT_LEFT, LIMITED_CUT_RIGHT],
        CalculusName::GECQ => &[EXPLOSIVE_CUT],
        CalculusName::GCL => &[IDENTITY, CUT],
    };
    Calculus::new(&name.to_string(), rules.iter().map(|n| named_rule(n).expect("builtin")).collect())
}
