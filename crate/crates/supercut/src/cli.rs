//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::calculus::{
    builtin_calculus, hilbert_to_structural, named_rule, sigma_expand, CalculusName, Instantiation, StructuralRule,
};
use crate::engine::{derives, refutes, EngineError, EngineOptions, Outcome};
use crate::interpolate::{interpolate_formulas, InterpolationError, InterpolationResult};
use crate::proof::{check, from_json, from_text, to_dot, to_json, to_text, Proof};
use crate::semantics::{builtin, holds, LogicName};
use crate::syntax::{Formula, Multiset, Sequent, Substitution};
use crate::transform::{normalize_traced, RewriteTrace, TransformError};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "supercut", version, about = "Proofs, normal forms and interpolants for super-Belnap sequent calculi")]
pub struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Proof output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the proof here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    emit_proof: Option<PathBuf>,
    /// Shape depth for expansions of specific rules other than Identity and Cut.
    #[arg(long, global = true, default_value_t = 2)]
    depth_bound: usize,
    /// Cap on the number of facts a saturation may hold.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_facts: usize,
    /// Print the rewrite trace of `normalize`.
    #[arg(long, global = true)]
    trace: bool,
    /// Run every line of FILE as a separate invocation.
    #[arg(long, value_name = "FILE")]
    batch: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(clap::Args, Debug)]
struct PremiseArgs {
    /// A premise sequent; repeatable.
    #[arg(short = 'p', long = "premise", allow_hyphen_values = true)]
    premise: Vec<String>,
    /// File with one premise per line; `#` starts a comment.
    #[arg(long, value_name = "FILE")]
    premises: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a proof file against a calculus.
    Check {
        proof: PathBuf,
        #[arg(long, value_parser = parse_calculus)]
        calculus: CalculusName,
        #[command(flatten)]
        premises: PremiseArgs,
    },
    /// Decide whether the premises derive GOAL, and print a proof if so.
    Prove {
        #[arg(allow_hyphen_values = true)]
        goal: String,
        #[arg(long, value_parser = parse_calculus)]
        calculus: CalculusName,
        #[command(flatten)]
        premises: PremiseArgs,
    },
    /// Decide whether the premises derive the empty sequent.
    Refute {
        #[arg(long, value_parser = parse_calculus)]
        calculus: CalculusName,
        #[command(flatten)]
        premises: PremiseArgs,
    },
    /// Normalize a proof file.
    Normalize {
        proof: PathBuf,
        #[arg(long, value_parser = parse_calculus)]
        calculus: CalculusName,
        #[command(flatten)]
        premises: PremiseArgs,
    },
    /// Find an interpolant for PHI |- PSI.
    Interpolate {
        #[arg(long, value_parser = parse_logic)]
        logic: LogicName,
        #[arg(allow_hyphen_values = true)]
        phi: String,
        #[arg(allow_hyphen_values = true)]
        psi: String,
    },
    /// Decide a consequence (or, without GOAL, an antitheorem) by the logic's matrices.
    Semantics {
        #[arg(long, value_parser = parse_logic)]
        logic: LogicName,
        /// A premise formula; repeatable.
        #[arg(short = 'p', long = "premise", allow_hyphen_values = true)]
        premise: Vec<String>,
        #[arg(allow_hyphen_values = true)]
        goal: Option<String>,
    },
    /// Expand a structural rule by a substitution.
    Expand {
        /// A builtin rule name, a file holding rule text, or rule text.
        rule: String,
        /// Substitution such as "p := p & q".
        #[arg(long)]
        sigma: String,
        /// Values for schema atoms and slots, separated by ';', as "r := r; G := p, q".
        #[arg(long)]
        ground: Option<String>,
    },
    /// Turn a Hilbert rule into equivalent structural rules.
    Structuralize {
        /// A premise formula; repeatable.
        #[arg(short = 'p', long = "premise", allow_hyphen_values = true)]
        premise: Vec<String>,
        #[arg(allow_hyphen_values = true)]
        conclusion: Option<String>,
    },
}

fn parse_calculus(s: &str) -> Result<CalculusName, String> {
    s.parse().map_err(|e: crate::calculus::UnknownCalculus| e.to_string())
}

fn parse_logic(s: &str) -> Result<LogicName, String> {
    s.parse().map_err(|e: crate::semantics::SemanticsError| e.to_string())
}

/// A failure with its exit code.
struct Failure(i32, String);

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_USAGE, e.to_string())
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure(if e.is_resource() { EXIT_RESOURCE } else { EXIT_USAGE }, e.to_string())
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Engine(e) => e.into(),
            other => Failure(EXIT_NO, other.to_string()),
        }
    }
}

impl From<InterpolationError> for Failure {
    fn from(e: InterpolationError) -> Self {
        match e {
            InterpolationError::Engine(e) => e.into(),
            InterpolationError::NotValid(_) | InterpolationError::NotFound => Failure(EXIT_NO, e.to_string()),
            other => Failure(EXIT_USAGE, other.to_string()),
        }
    }
}

/// Parse `argv` (including the program name) and run it.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Some(batch) = &cli.batch {
        return run_batch(batch, out, err);
    }
    let Some(command) = &cli.command else {
        let _ = writeln!(err, "no command given; see --help");
        return EXIT_USAGE;
    };
    match execute(&cli, command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            if cli.json {
                let _ = writeln!(out, "{}", json!({ "error": msg, "exit": code }));
            }
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn split_line(line: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut started = false;
    for ch in line.chars() {
        match (quote, ch) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), c) => cur.push(c),
            (None, '"' | '\'') => {
                quote = Some(ch);
                started = true;
            }
            (None, c) if c.is_whitespace() => {
                if started {
                    args.push(std::mem::take(&mut cur));
                    started = false;
                }
            }
            (None, c) => {
                cur.push(c);
                started = true;
            }
        }
    }
    if quote.is_some() {
        return Err(format!("unterminated quote in '{line}'"));
    }
    if started {
        args.push(cur);
    }
    Ok(args)
}

/// Each instance runs on its own thread with its own buffers; outputs are
/// printed in input order and the worst exit code wins.
fn run_batch(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let results: Vec<(i32, Vec<u8>, Vec<u8>)> = std::thread::scope(|s| {
        let handles: Vec<_> = lines
            .iter()
            .map(|line| {
                s.spawn(move || {
                    let (mut o, mut e) = (Vec::new(), Vec::new());
                    let code = match split_line(line) {
                        Ok(args) if args.iter().any(|a| a == "--batch") => {
                            let _ = writeln!(e, "error: nested --batch");
                            EXIT_USAGE
                        }
                        Ok(args) => run(std::iter::once("supercut".to_string()).chain(args), &mut o, &mut e),
                        Err(msg) => {
                            let _ = writeln!(e, "error: {msg}");
                            EXIT_USAGE
                        }
                    };
                    (code, o, e)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("batch instance panicked")).collect()
    });
    let mut worst = EXIT_YES;
    for (line, (code, o, e)) in lines.iter().zip(results) {
        let _ = writeln!(out, "# {line}");
        let _ = out.write_all(&o);
        let _ = writeln!(out, "# exit {code}");
        let _ = err.write_all(&e);
        worst = worst.max(code);
    }
    worst
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn non_comment_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty())
}

fn load_premises(args: &PremiseArgs) -> Result<Vec<Sequent>, Failure> {
    let mut out = Vec::new();
    if let Some(path) = &args.premises {
        for line in non_comment_lines(&read_file(path)?) {
            out.push(line.parse::<Sequent>().map_err(usage)?);
        }
    }
    for p in &args.premise {
        out.push(p.parse::<Sequent>().map_err(usage)?);
    }
    Ok(out)
}

fn load_proof(path: &Path) -> Result<Proof, Failure> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(usage)?;
        from_json(&v).map_err(usage)
    } else {
        from_text(&text).map_err(usage)
    }
}

fn formula(s: &str) -> Result<Formula, Failure> {
    s.parse::<Formula>().map_err(usage)
}

/// "p := f, q := g", optionally in braces.
fn parse_substitution(s: &str) -> Result<Substitution, Failure> {
    let body = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut sub = Substitution::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (atom, image) = part.split_once(":=").ok_or_else(|| usage(format!("expected 'atom := formula' in '{part}'")))?;
        let atom = formula(atom.trim())?;
        let atom = atom.as_atom().cloned().ok_or_else(|| usage(format!("'{atom}' is not an atom")))?;
        sub.insert(atom, formula(image.trim())?);
    }
    Ok(sub)
}

/// Entries naming a slot of `rule` take a comma-separated list of formulas.
fn parse_ground(rule: &StructuralRule, s: &str) -> Result<Instantiation, Failure> {
    let slots = rule.slots();
    let mut inst = Instantiation::default();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once(":=").ok_or_else(|| usage(format!("expected 'name := value' in '{part}'")))?;
        let name = name.trim();
        if let Some(slot) = slots.iter().find(|sl| sl.0 == name) {
            let items = value.split(',').map(str::trim).filter(|v| !v.is_empty()).map(formula);
            inst.slots.insert(slot.clone(), items.collect::<Result<Multiset, _>>()?);
        } else {
            inst.atoms.extend(parse_substitution(part)?.iter().map(|(a, f)| (a.clone(), f.clone())));
        }
    }
    Ok(inst)
}

fn load_rule(spec: &str) -> Result<StructuralRule, Failure> {
    if let Some(r) = named_rule(spec) {
        return Ok(r);
    }
    let path = Path::new(spec);
    let text = if path.is_file() {
        non_comment_lines(&read_file(path)?).next().map(str::to_string).ok_or_else(|| usage("empty rule file"))?
    } else {
        spec.to_string()
    };
    match text.split_once(':') {
        Some((name, body)) if !name.contains("|-") && !body.starts_with('=') => {
            StructuralRule::parse(name.trim(), body.trim()).map_err(usage)
        }
        _ => StructuralRule::parse("rule", text.trim()).map_err(usage),
    }
}

fn render(p: &Proof, format: Format) -> String {
    match format {
        Format::Text => to_text(p),
        Format::Json => serde_json::to_string_pretty(&to_json(p)).expect("serializable"),
        Format::Dot => to_dot(p),
    }
}

/// Write the proof to `--emit-proof` if given; returns the path written.
fn emit(cli: &Cli, p: &Proof) -> Result<Option<String>, Failure> {
    let Some(path) = &cli.emit_proof else { return Ok(None) };
    std::fs::write(path, render(p, cli.format)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(Some(path.display().to_string()))
}

fn options(cli: &Cli) -> EngineOptions {
    EngineOptions { depth_bound: cli.depth_bound, max_facts: cli.max_facts }
}

fn execute(cli: &Cli, command: &Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let w = |out: &mut dyn Write, s: String| {
        let _ = writeln!(out, "{s}");
    };
    match command {
        Command::Check { proof, calculus, premises } => {
            let p = load_proof(proof)?;
            let prem = load_premises(premises)?;
            let result = check(&p, &builtin_calculus(*calculus), &prem);
            if cli.json {
                let reason = result.as_ref().err().map(|e| e.to_string());
                w(out, json!({ "verdict": result.is_ok(), "complete": true, "error": reason }).to_string());
            } else {
                match &result {
                    Ok(()) => w(out, format!("valid {calculus} proof of {}", p.conclusion)),
                    Err(e) => w(out, format!("invalid: {e}")),
                }
            }
            Ok(if result.is_ok() { EXIT_YES } else { EXIT_NO })
        }
        Command::Prove { goal, calculus, premises } => {
            let prem = load_premises(premises)?;
            let goal: Sequent = goal.parse().map_err(usage)?;
            let outcome = derives(&prem, &goal, &builtin_calculus(*calculus), &options(cli))?;
            report_outcome(cli, &outcome, "derivable", out)
        }
        Command::Refute { calculus, premises } => {
            let prem = load_premises(premises)?;
            let outcome = refutes(&prem, &builtin_calculus(*calculus), &options(cli))?;
            report_outcome(cli, &outcome, "refutable", out)
        }
        Command::Normalize { proof, calculus, premises } => {
            let p = load_proof(proof)?;
            let prem = load_premises(premises)?;
            let (q, trace) = normalize_traced(&p, &builtin_calculus(*calculus), &prem, &p.conclusion)?;
            let path = emit(cli, &q)?;
            if cli.json {
                let mut v = json!({ "verdict": true, "complete": true, "proof_path": path, "proof": to_json(&q) });
                if cli.trace {
                    v["trace"] = trace_json(&trace);
                }
                w(out, v.to_string());
            } else {
                if path.is_none() {
                    w(out, render(&q, cli.format).trim_end().to_string());
                }
                if cli.trace {
                    for e in &trace.0 {
                        w(out, format!("# {e}"));
                    }
                }
            }
            Ok(EXIT_YES)
        }
        Command::Interpolate { logic, phi, psi } => {
            let (phi, psi) = (formula(phi)?, formula(psi)?);
            let r = interpolate_formulas(&phi, &psi, *logic, &options(cli))?;
            let path = match &r.proof {
                Some(p) => emit(cli, p)?,
                None => None,
            };
            report_interpolant(cli, &r, &phi, &psi, path, out);
            Ok(EXIT_YES)
        }
        Command::Semantics { logic, premise, goal } => {
            let prem = premise.iter().map(|s| formula(s)).collect::<Result<Vec<_>, _>>()?;
            let goal = goal.as_deref().map(formula).transpose()?;
            let verdict = holds(&builtin(*logic), &prem, goal.as_ref());
            if cli.json {
                w(out, json!({ "verdict": verdict, "complete": true }).to_string());
            } else {
                let what = if goal.is_some() { "consequence" } else { "antitheorem" };
                w(out, format!("{} in {logic}: {}", what, if verdict { "holds" } else { "fails" }));
            }
            Ok(if verdict { EXIT_YES } else { EXIT_NO })
        }
        Command::Expand { rule, sigma, ground } => {
            let rule = load_rule(rule)?;
            let sigma = parse_substitution(sigma)?;
            let inst = match ground {
                Some(g) => parse_ground(&rule, g)?,
                None => Instantiation::default(),
            };
            let rules = sigma_expand(&rule, &inst, &sigma);
            print_rules(cli, &rules, out);
            Ok(EXIT_YES)
        }
        Command::Structuralize { premise, conclusion } => {
            let prem = premise.iter().map(|s| formula(s)).collect::<Result<Vec<_>, _>>()?;
            let concl = conclusion.as_deref().map(formula).transpose()?;
            let rules = hilbert_to_structural(&prem, concl.as_ref());
            print_rules(cli, &rules, out);
            Ok(EXIT_YES)
        }
    }
}

fn print_rules(cli: &Cli, rules: &[StructuralRule], out: &mut dyn Write) {
    if cli.json {
        let v: Vec<String> = rules.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(out, "{}", json!({ "verdict": true, "rules": v }));
    } else {
        for r in rules {
            let _ = writeln!(out, "{r}");
        }
    }
}

fn trace_json(trace: &RewriteTrace) -> Value {
    Value::Array(
        trace.0.iter().map(|e| json!({ "pass": e.pass.to_string(), "path": e.path, "rule": e.rule })).collect(),
    )
}

fn report_outcome(cli: &Cli, outcome: &Outcome, yes: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let path = match &outcome.proof {
        Some(p) => emit(cli, p)?,
        None => None,
    };
    if cli.json {
        let mut v = json!({ "verdict": outcome.verdict, "complete": outcome.complete, "proof_path": path });
        if let (Some(p), None) = (&outcome.proof, &path) {
            v["proof"] = to_json(p);
        }
        let _ = writeln!(out, "{v}");
    } else {
        let line = match (outcome.verdict, outcome.complete) {
            (true, _) => yes.to_string(),
            (false, true) => format!("not {yes}"),
            (false, false) => format!("not {yes} within the bounds (incomplete)"),
        };
        let _ = writeln!(out, "{line}");
        if let (Some(p), None) = (&outcome.proof, &path) {
            let _ = writeln!(out, "{}", render(p, cli.format).trim_end());
        }
    }
    Ok(if outcome.verdict { EXIT_YES } else { EXIT_NO })
}

fn report_interpolant(
    cli: &Cli,
    r: &InterpolationResult,
    phi: &Formula,
    psi: &Formula,
    path: Option<String>,
    out: &mut dyn Write,
) {
    let verified = r.verify(phi, psi);
    if cli.json {
        let seqs: Vec<String> = r.interpolant_sequents.iter().map(|s| s.to_string()).collect();
        let v = json!({
            "verdict": true,
            "complete": true,
            "interpolant": r.interpolant_formula.to_string(),
            "sequents": seqs,
            "left_logic": r.left_logic.to_string(),
            "right_logic": r.right_logic.to_string(),
            "left_certificate": r.left_certificate.is_valid(),
            "right_certificate": r.right_certificate.is_valid(),
            "verified": verified,
            "proof_path": path,
        });
        let _ = writeln!(out, "{v}");
        return;
    }
    let _ = writeln!(out, "interpolant: {}", r.interpolant_formula);
    for s in &r.interpolant_sequents {
        let _ = writeln!(out, "sequent: {s}");
    }
    let verdict = |ok: bool| if ok { "ok" } else { "FAILED" };
    let _ = writeln!(out, "{} certificate ({phi} to interpolant): {}", r.left_logic, verdict(r.left_certificate.is_valid()));
    let _ = writeln!(out, "{} certificate (interpolant to {psi}): {}", r.right_logic, verdict(r.right_certificate.is_valid()));
    let _ = writeln!(out, "variable condition and both entailments: {}", verdict(verified));
}
