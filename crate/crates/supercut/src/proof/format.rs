use serde::{Deserialize, Serialize};

use super::{Axiom, Justification, Proof};
use crate::calculus::LogicalRuleId;
use crate::syntax::{parse_formula, Atom, Sequent, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("bad rule label '{0}'")]
    Label(String),
    #[error("bad JSON: {0}")]
    Json(String),
}

#[derive(Serialize, Deserialize)]
struct Node {
    sequent: String,
    rule: String,
    #[serde(default)]
    children: Vec<Node>,
}

/// Parse a rule label as produced by `Justification`'s `Display`.
pub fn parse_label(label: &str) -> Result<Justification, FormatError> {
    let bad = || FormatError::Label(label.to_string());
    let label = label.trim();
    if let Some(i) = label.strip_prefix("premise ") {
        return i.trim().parse().map(Justification::Premise).map_err(|_| bad());
    }
    for ax in [Axiom::TopRight, Axiom::BotLeft] {
        if label == ax.label() {
            return Ok(Justification::Axiom(ax));
        }
    }
    if let Ok(r) = label.parse::<LogicalRuleId>() {
        return Ok(Justification::Logical(r));
    }
    let (name, sigma) = match label.split_once('{') {
        None => (label, None),
        Some((name, rest)) => {
            let body = rest.strip_suffix('}').ok_or_else(bad)?;
            let mut sigma = Substitution::new();
            for entry in body.split(',').filter(|e| !e.trim().is_empty()) {
                let (atom, image) = entry.split_once(":=").ok_or_else(bad)?;
                let atom = atom.trim();
                if atom.is_empty() || !atom.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(bad());
                }
                sigma.insert(Atom::new(atom), parse_formula(image).map_err(|_| bad())?);
            }
            (name.trim(), Some(sigma))
        }
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(bad());
    }
    Ok(Justification::Structural { rule: name.to_string(), sigma })
}

/// One line per node, `[rule] sequent`, indented two spaces per level.
pub fn to_text(p: &Proof) -> String {
    let mut out = String::new();
    for (path, n) in p.nodes() {
        out.push_str(&"  ".repeat(path.len()));
        out.push_str(&format!("[{}] {}\n", n.just, n.conclusion));
    }
    out
}

pub fn from_text(text: &str) -> Result<Proof, FormatError> {
    let mut stack: Vec<(usize, Proof)> = Vec::new();
    let mut root: Option<Proof> = None;
    let fold = |stack: &mut Vec<(usize, Proof)>, depth: usize, root: &mut Option<Proof>| {
        while stack.last().is_some_and(|(d, _)| *d >= depth) {
            let (_, done) = stack.pop().expect("non-empty");
            match stack.last_mut() {
                Some((_, parent)) => parent.children.push(done),
                None => *root = Some(done),
            }
        }
    };
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |message: &str| FormatError::Text { line, message: message.to_string() };
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start_matches(' ').len();
        if indent % 2 != 0 {
            return Err(err("indentation must be a multiple of two spaces"));
        }
        let depth = indent / 2;
        let body = raw.trim();
        let rest = body.strip_prefix('[').ok_or_else(|| err("expected '['"))?;
        let close = rest.find(']').ok_or_else(|| err("expected ']'"))?;
        let just = parse_label(&rest[..close]).map_err(|e| err(&e.to_string()))?;
        let sequent: Sequent = rest[close + 1..].trim().parse().map_err(|e: crate::syntax::ParseError| err(&e.to_string()))?;
        if root.is_some() {
            return Err(err("more than one root"));
        }
        match stack.last() {
            None if depth != 0 => return Err(err("the root must not be indented")),
            Some((d, _)) if depth > d + 1 => return Err(err("indentation jumps more than one level")),
            _ => {}
        }
        fold(&mut stack, depth, &mut root);
        if root.is_some() {
            return Err(err("more than one root"));
        }
        stack.push((depth, Proof::leaf(sequent, just)));
    }
    fold(&mut stack, 0, &mut root);
    root.ok_or(FormatError::Text { line: 0, message: "empty proof".into() })
}

fn to_node(p: &Proof) -> Node {
    Node { sequent: p.conclusion.to_string(), rule: p.just.to_string(), children: p.children.iter().map(to_node).collect() }
}

fn from_node(n: &Node) -> Result<Proof, FormatError> {
    let sequent: Sequent = n.sequent.parse().map_err(|e: crate::syntax::ParseError| FormatError::Json(e.to_string()))?;
    let children = n.children.iter().map(from_node).collect::<Result<_, _>>()?;
    Ok(Proof::new(sequent, parse_label(&n.rule)?, children))
}

pub fn to_json(p: &Proof) -> serde_json::Value {
    serde_json::to_value(to_node(p)).expect("proof nodes serialize")
}

pub fn from_json(v: &serde_json::Value) -> Result<Proof, FormatError> {
    let node: Node = serde_json::from_value(v.clone()).map_err(|e| FormatError::Json(e.to_string()))?;
    from_node(&node)
}

/// Graphviz rendering; edges run from premises to conclusions, labelled with the rule.
pub fn to_dot(p: &Proof) -> String {
    let mut out = String::from("digraph proof {\n  node [shape=plaintext];\n");
    let nodes = p.nodes();
    let id = |path: &[usize]| nodes.iter().position(|(q, _)| q == path).expect("known path");
    for (k, (_, n)) in nodes.iter().enumerate() {
        let label = n.conclusion.to_string().replace('\\', "\\\\").replace('"', "\\\"");
        out.push_str(&format!("  n{k} [label=\"{label}\"];\n"));
    }
    for (path, n) in &nodes {
        for i in 0..n.children.len() {
            let mut child = path.clone();
            child.push(i);
            out.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", id(&child), id(path), n.just));
        }
        if n.children.is_empty() {
            out.push_str(&format!("  n{}_top [label=\"{}\", shape=none];\n  n{}_top -> n{};\n", id(path), n.just, id(path), id(path)));
        }
    }
    out.push_str("}\n");
    out
}
