//! Proof rewriting: structural expansion, reordering into analytic-synthetic
//! form, the subformula property, and the classical cut corollaries.

mod classical;
mod expand;
mod reorder;
mod subformula;

use std::fmt;

pub use classical::{eliminate_cuts, is_contraction_then_cut, separate_identity_cut, simplify_refutation};
pub use expand::expand_structural;
pub use reorder::make_analytic_synthetic;
pub use subformula::enforce_subformula;

use crate::calculus::{Calculus, LogicalRuleId, RuleKind, CUT, IDENTITY};
use crate::engine::EngineError;
use crate::proof::{check, Justification, Path, Proof};
use crate::syntax::{Formula, Sequent, Side};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("cannot expand {rule} at node {path:?}: {reason}")]
    Inexpandable { path: Path, rule: String, reason: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("trace does not replay: {0}")]
    Replay(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pass {
    Expand,
    Reorder,
    Subformula,
    EliminateCuts,
    Strengthen,
    PushContraction,
    Separate,
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pass::Expand => "expand",
            Pass::Reorder => "reorder",
            Pass::Subformula => "subformula",
            Pass::EliminateCuts => "eliminate-cuts",
            Pass::Strengthen => "strengthen",
            Pass::PushContraction => "push-contraction",
            Pass::Separate => "separate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub pass: Pass,
    pub path: Path,
    pub rule: String,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?} {}", self.pass, self.path, self.rule)
    }
}

/// The rewrite steps of a pass, in application order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace(pub Vec<TraceEntry>);

impl RewriteTrace {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: RewriteTrace) {
        self.0.extend(other.0);
    }
}

/// What a rewrite step may need besides the proof itself.
#[derive(Clone, Copy, Debug)]
pub struct Context<'a> {
    pub calc: &'a Calculus,
    pub premises: &'a [Sequent],
    pub max_facts: usize,
}

impl<'a> Context<'a> {
    pub fn new(calc: &'a Calculus, premises: &'a [Sequent]) -> Self {
        Context { calc, premises, max_facts: 200_000 }
    }
}

/// Apply one step of `pass` at `path`, in place.
pub(crate) fn apply_step(p: &mut Proof, pass: Pass, path: &[usize], ctx: &Context) -> Result<(), TransformError> {
    let site = p.at(path).ok_or_else(|| TransformError::Replay(format!("no node at {path:?}")))?;
    let replaced = match pass {
        Pass::Expand => expand::expand_node(site, ctx).map_err(|reason| TransformError::Inexpandable {
            path: path.to_vec(),
            rule: site.just.to_string(),
            reason,
        })?,
        Pass::Reorder => reorder::reorder_node(site).map_err(TransformError::Precondition)?,
        Pass::Subformula => subformula::enforce_at_root(site, ctx.premises),
        Pass::EliminateCuts => classical::identity_for(site)?,
        Pass::Strengthen => classical::strengthen(site)?,
        Pass::PushContraction => classical::push_contraction(site)?,
        Pass::Separate => classical::separate_node(site)?,
    };
    debug_assert_eq!(replaced.conclusion, site.conclusion, "{pass} changed a conclusion");
    *p.at_mut(path).expect("site exists") = replaced;
    Ok(())
}

/// Run `find`/`apply_step` to a fixpoint, recording each step.
pub(crate) fn run_pass(
    p: &Proof,
    pass: Pass,
    ctx: &Context,
    trace: &mut RewriteTrace,
    find: impl Fn(&Proof) -> Option<Path>,
) -> Result<Proof, TransformError> {
    let mut cur = p.clone();
    while let Some(path) = find(&cur) {
        let rule = cur.at(&path).expect("found path").just.to_string();
        apply_step(&mut cur, pass, &path, ctx)?;
        trace.0.push(TraceEntry { pass, path, rule });
    }
    Ok(cur)
}

/// Re-apply a recorded trace to its input.
pub fn replay(p: &Proof, trace: &RewriteTrace, ctx: &Context) -> Result<Proof, TransformError> {
    let mut cur = p.clone();
    for e in &trace.0 {
        let site = cur.at(&e.path).ok_or_else(|| TransformError::Replay(format!("no node at {:?}", e.path)))?;
        if site.just.to_string() != e.rule {
            return Err(TransformError::Replay(format!("expected {} at {:?}, found {}", e.rule, e.path, site.just)));
        }
        apply_step(&mut cur, e.pass, &e.path, ctx)?;
    }
    Ok(cur)
}

pub fn replace_at(p: &Proof, path: &[usize], new: Proof) -> Proof {
    let mut out = p.clone();
    *out.at_mut(path).expect("path inside the proof") = new;
    out
}

/// The first node in post-order satisfying `pred`.
pub(crate) fn find_postorder(p: &Proof, pred: &impl Fn(&Proof) -> bool) -> Option<Path> {
    fn go(p: &Proof, pred: &impl Fn(&Proof) -> bool, path: &mut Path) -> bool {
        for (i, c) in p.children.iter().enumerate() {
            path.push(i);
            if go(c, pred, path) {
                return true;
            }
            path.pop();
        }
        pred(p)
    }
    let mut path = Vec::new();
    go(p, pred, &mut path).then_some(path)
}

/// Node paths in post-order, children left to right.
pub fn postorder(p: &Proof) -> Vec<Path> {
    fn go(p: &Proof, path: &mut Path, out: &mut Vec<Path>) {
        for (i, c) in p.children.iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
        out.push(path.clone());
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn logical(id: LogicalRuleId, conclusion: Sequent, children: Vec<Proof>) -> Proof {
    Proof::new(conclusion, Justification::Logical(id), children)
}

pub(crate) fn elim(kind: RuleKind, premise: Proof, conclusion: Sequent) -> Proof {
    logical(LogicalRuleId::elim(kind), conclusion, vec![premise])
}

pub(crate) fn intro(kind: RuleKind, children: Vec<Proof>, conclusion: Sequent) -> Proof {
    logical(LogicalRuleId::intro(kind), conclusion, children)
}

pub(crate) fn identity(f: &Formula) -> Proof {
    Proof::structural(IDENTITY, Sequent::new([f.clone()], [f.clone()]), vec![])
}

/// Cut `left` (with `f` on the right) against `right` (with `f` on the left).
pub(crate) fn cut_on(left: Proof, right: Proof, f: &Formula) -> Proof {
    let l = left.conclusion.without(Side::Right, f).expect("cut formula on the right");
    let r = right.conclusion.without(Side::Left, f).expect("cut formula on the left");
    Proof::structural(CUT, l.sum(&r), vec![left, right])
}

/// Expansion, with each expanded subtree reordered as soon as it is
/// structurally atomic. Later expansions copy their children, so reordering
/// first keeps the copies small.
fn expand_and_reorder(p: &Proof, ctx: &Context, trace: &mut RewriteTrace) -> Result<Proof, TransformError> {
    let mut cur = p.clone();
    while let Some(path) = expand::next_site(&cur) {
        let rule = cur.at(&path).expect("found path").just.to_string();
        apply_step(&mut cur, Pass::Expand, &path, ctx)?;
        trace.0.push(TraceEntry { pass: Pass::Expand, path: path.clone(), rule });
        if crate::proof::is_structurally_atomic(cur.at(&path).expect("replaced")) {
            let inside = |q: &Proof| {
                reorder::next_site(q.at(&path)?).map(|sub| path.iter().copied().chain(sub).collect::<Path>())
            };
            cur = run_pass(&cur, Pass::Reorder, ctx, trace, inside)?;
        }
    }
    Ok(cur)
}

/// Every pass in sequence: expansion, reordering, then the subformula property.
pub fn normalize(p: &Proof, calc: &Calculus, premises: &[Sequent], c: &Sequent) -> Result<Proof, TransformError> {
    normalize_traced(p, calc, premises, c).map(|(q, _)| q)
}

pub fn normalize_traced(
    p: &Proof,
    calc: &Calculus,
    premises: &[Sequent],
    c: &Sequent,
) -> Result<(Proof, RewriteTrace), TransformError> {
    check(p, calc, premises).map_err(|e| TransformError::Precondition(e.to_string()))?;
    if p.conclusion != *c {
        return Err(TransformError::Precondition(format!("proof concludes {}, not {c}", p.conclusion)));
    }
    let ctx = Context::new(calc, premises);
    let mut trace = RewriteTrace::default();
    let q = expand_and_reorder(p, &ctx, &mut trace)?;
    let q = reorder::reorder_with(&q, &ctx, &mut trace)?;
    let q = subformula::enforce_with(&q, &ctx, &mut trace)?;
    Ok((q, trace))
}
