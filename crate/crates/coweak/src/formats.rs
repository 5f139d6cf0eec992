//! Text and JSON front ends: the `.wts` transition-system grammar (with the
//! `sstep` dialect for Segala systems), partition JSON, and pattern JSON.
//!
//! All weights are parsed exactly: `p/q` fractions, decimal literals
//! (converted by powers of ten), integers, and `inf`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{pow::Pow, Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

use coweak_core::pattern::{PatternAutomaton, PatternError};
use coweak_core::segala::{SegalaBuilder, SegalaError, SegalaSystem};
use coweak_core::semiring::{Extended, Kind, Value};
use coweak_core::system::{Partition, PartitionError, SystemBuilder, SystemError, WeightedSystem};

/// Parse or validation failure, with position information where the input
/// is positional.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    System {
        line: usize,
        #[source]
        source: SystemError,
    },
    #[error("line {line}: {source}")]
    Segala {
        line: usize,
        #[source]
        source: SegalaError,
    },
    #[error("{0}")]
    Partition(#[from] PartitionError),
    #[error("{0}")]
    Pattern(#[from] PatternError),
    #[error("unknown state name `{0}`")]
    UnknownStateName(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// Parses a weight literal for the given semiring kind.
pub fn parse_weight(kind: Kind, text: &str) -> Result<Value, String> {
    if text == "inf" {
        return Value::infinity(kind).ok_or_else(|| "the boolean semiring has no infinity".into());
    }
    match kind {
        Kind::Bool => match text {
            "0" | "false" => Ok(Value::Bool(false)),
            "1" | "true" => Ok(Value::Bool(true)),
            _ => Err(format!("`{text}` is not a boolean weight (0 or 1)")),
        },
        Kind::Nat => text
            .parse::<num_bigint::BigUint>()
            .map(|n| Value::Nat(Extended::Finite(n)))
            .map_err(|_| format!("`{text}` is not a natural number")),
        Kind::Real => parse_rational(text)
            .map(|q| Value::Real(Extended::Finite(q)))
            .map_err(|e| format!("`{text}` is not a nonnegative rational: {e}")),
    }
}

/// Exact rational from `p/q`, decimal, or integer notation.
fn parse_rational(text: &str) -> Result<BigRational, String> {
    let q = if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| "bad numerator")?;
        let den: BigInt = den.trim().parse().map_err(|_| "bad denominator")?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        BigRational::new(num, den)
    } else if let Some((whole, frac)) = text.split_once('.') {
        let whole: BigInt = if whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| "bad integer part")?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err("bad fractional part".into());
        }
        let digits: BigInt = frac.parse().map_err(|_| "bad fractional part")?;
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        BigRational::new(whole * &scale + digits, scale)
    } else {
        let n: BigInt = text.parse().map_err(|_| "not a number")?;
        BigRational::from_integer(n)
    };
    if q.is_negative() {
        return Err("negative".into());
    }
    Ok(q)
}

struct Directives<'a> {
    kind: Option<(Kind, usize)>,
    labels: Vec<&'a str>,
    states: Vec<&'a str>,
    tau: Option<(&'a str, usize)>,
    trans: Vec<(usize, Vec<&'a str>)>,
    ssteps: Vec<(usize, &'a str, &'a str, Vec<(&'a str, &'a str)>)>,
}

fn scan(text: &str) -> Result<Directives<'_>, FormatError> {
    let mut d = Directives {
        kind: None,
        labels: Vec::new(),
        states: Vec::new(),
        tau: None,
        trans: Vec::new(),
        ssteps: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        };
        let mut tokens = line.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();
        match head {
            "semiring" => {
                let name = rest
                    .first()
                    .ok_or_else(|| syntax(line_no, 1, "semiring needs a name"))?;
                let kind = match *name {
                    "bool" => Kind::Bool,
                    "nat" => Kind::Nat,
                    "real" => Kind::Real,
                    other => {
                        return Err(syntax(
                            line_no,
                            10,
                            format!("unknown semiring `{other}` (bool, nat, or real)"),
                        ))
                    }
                };
                if d.kind.is_some() {
                    return Err(syntax(line_no, 1, "semiring declared twice"));
                }
                d.kind = Some((kind, line_no));
            }
            "labels" => d.labels.extend(rest),
            "states" => d.states.extend(rest),
            "tau" => {
                let name = rest
                    .first()
                    .ok_or_else(|| syntax(line_no, 1, "tau needs a label name"))?;
                d.tau = Some((name, line_no));
            }
            "trans" => d.trans.push((line_no, rest)),
            "sstep" => {
                // sstep x a { y 1/2 ; z 1/2 }
                if rest.len() < 3 || rest[2] != "{" || rest.last() != Some(&"}") {
                    return Err(syntax(
                        line_no,
                        1,
                        "sstep syntax: sstep <state> <label> { <state> <prob> ; ... }",
                    ));
                }
                let body = &rest[3..rest.len() - 1];
                let mut pairs = Vec::new();
                for chunk in body.split(|t| *t == ";") {
                    if chunk.is_empty() {
                        continue;
                    }
                    if chunk.len() != 2 {
                        return Err(syntax(line_no, 1, "each sstep entry is `<state> <prob>`"));
                    }
                    pairs.push((chunk[0], chunk[1]));
                }
                d.ssteps.push((line_no, rest[0], rest[1], pairs));
            }
            other => {
                let col = raw.find(other).map_or(1, |c| c + 1);
                return Err(syntax(line_no, col, format!("unknown directive `{other}`")));
            }
        }
    }
    Ok(d)
}

/// Parses the `.wts` grammar into a weighted transition system.
pub fn parse_weighted_system(text: &str) -> Result<WeightedSystem, FormatError> {
    let d = scan(text)?;
    if let Some((line, ..)) = d.ssteps.first() {
        return Err(syntax(
            *line,
            1,
            "sstep lines describe a Segala system; use the segala subcommand",
        ));
    }
    let (kind, _) = d
        .kind
        .ok_or_else(|| syntax(1, 1, "missing `semiring bool|nat|real` directive"))?;
    let mut builder = SystemBuilder::new(kind);
    for name in &d.states {
        builder
            .state(name)
            .map_err(|source| FormatError::System { line: 0, source })?;
    }
    for name in &d.labels {
        builder
            .label(name)
            .map_err(|source| FormatError::System { line: 0, source })?;
    }
    if let Some((tau, line)) = d.tau {
        builder
            .tau(tau)
            .map_err(|source| FormatError::System { line, source })?;
    }
    for (line, tokens) in &d.trans {
        let [source, label, weight, target] = tokens.as_slice() else {
            return Err(syntax(
                *line,
                1,
                "trans syntax: trans <state> <label> <weight> <state>",
            ));
        };
        let weight = parse_weight(kind, weight).map_err(|m| syntax(*line, 1, m))?;
        builder
            .transition(source, label, weight, target)
            .map_err(|source| FormatError::System {
                line: *line,
                source,
            })?;
    }
    Ok(builder.finish())
}

/// Parses the `.wts` dialect with `sstep` lines into a Segala system.
pub fn parse_segala_system(text: &str) -> Result<SegalaSystem, FormatError> {
    let d = scan(text)?;
    if let Some((line, _)) = d.trans.first() {
        return Err(syntax(
            *line,
            1,
            "trans lines describe a weighted system; segala systems use sstep",
        ));
    }
    if let Some((kind, line)) = d.kind {
        if kind != Kind::Real {
            return Err(syntax(line, 1, "segala systems require `semiring real`"));
        }
    }
    let mut builder = SegalaBuilder::new();
    for name in &d.states {
        builder
            .state(name)
            .map_err(|source| FormatError::Segala { line: 0, source })?;
    }
    for name in &d.labels {
        builder
            .label(name)
            .map_err(|source| FormatError::Segala { line: 0, source })?;
    }
    let (tau, tau_line) = d
        .tau
        .ok_or_else(|| syntax(1, 1, "segala systems must declare `tau <label>`"))?;
    builder.tau(tau).map_err(|source| FormatError::Segala {
        line: tau_line,
        source,
    })?;
    for (line, state, label, pairs) in &d.ssteps {
        let mut dist = Vec::new();
        for (target, prob) in pairs {
            let p = parse_weight(Kind::Real, prob).map_err(|m| syntax(*line, 1, m))?;
            dist.push((*target, p));
        }
        builder
            .step(state, label, &dist)
            .map_err(|source| FormatError::Segala {
                line: *line,
                source,
            })?;
    }
    builder
        .finish()
        .map_err(|source| FormatError::Segala { line: 0, source })
}

/// Renders a weighted system back to canonical `.wts` text;
/// `parse_weighted_system` inverts this exactly.
pub fn render_system(sys: &WeightedSystem) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "semiring {}\n",
        match sys.kind() {
            Kind::Bool => "bool",
            Kind::Nat => "nat",
            Kind::Real => "real",
        }
    ));
    out.push_str(&format!("labels {}\n", sys.labels().join(" ")));
    if let Some(tau) = sys.tau() {
        out.push_str(&format!("tau {}\n", sys.labels()[tau]));
    }
    out.push_str(&format!("states {}\n", sys.states().join(" ")));
    for x in 0..sys.state_count() {
        let mut entries: Vec<(usize, usize, Value)> = sys
            .successors(x)
            .iter()
            .map(|(&(y, a), w)| (a, y, w.clone()))
            .collect();
        entries.sort_by_key(|e| (e.0, e.1));
        for (a, y, w) in entries {
            out.push_str(&format!(
                "trans {} {} {} {}\n",
                sys.states()[x],
                sys.labels()[a],
                w.render(),
                sys.states()[y]
            ));
        }
    }
    out
}

#[derive(Deserialize)]
struct PartitionDoc {
    blocks: Vec<Vec<String>>,
}

/// Parses partition JSON (`{"blocks": [["x"], ["y"]]}`) over the system's
/// state names.
pub fn parse_partition(text: &str, sys_states: &[String]) -> Result<Partition, FormatError> {
    let doc: PartitionDoc = serde_json::from_str(text)?;
    let mut blocks = Vec::with_capacity(doc.blocks.len());
    for block in doc.blocks {
        let mut indices = Vec::with_capacity(block.len());
        for name in block {
            let idx = sys_states
                .iter()
                .position(|s| *s == name)
                .ok_or_else(|| FormatError::UnknownStateName(name.clone()))?;
            indices.push(idx);
        }
        blocks.push(indices);
    }
    Ok(Partition::new(sys_states.len(), blocks)?)
}

#[derive(Deserialize)]
struct PatternDoc {
    labels: Vec<String>,
    states: Vec<String>,
    accepts: BTreeMap<String, bool>,
    delta: BTreeMap<String, BTreeMap<String, String>>,
    observables: Vec<String>,
}

/// Parses pattern JSON and validates derivative-closure totality. The
/// pattern's alphabet must cover `system_labels`, whose order fixes the
/// label indexing.
pub fn parse_pattern(
    text: &str,
    system_labels: &[String],
) -> Result<PatternAutomaton, FormatError> {
    let doc: PatternDoc = serde_json::from_str(text)?;
    for l in system_labels {
        if !doc.labels.contains(l) {
            return Err(PatternError::UnknownLabel(l.clone()).into());
        }
    }
    for l in &doc.labels {
        if !system_labels.contains(l) {
            return Err(FormatError::Syntax {
                line: 0,
                col: 0,
                message: format!("pattern label `{l}` is not a label of the system"),
            });
        }
    }
    let accepts: Vec<bool> = doc
        .states
        .iter()
        .map(|s| doc.accepts.get(s).copied().unwrap_or(false))
        .collect();
    let delta = doc.delta;
    let pattern = PatternAutomaton::new(
        system_labels.to_vec(),
        doc.states.clone(),
        accepts,
        |state, label| delta.get(state)?.get(label).cloned(),
        doc.observables,
    )?;
    Ok(pattern)
}

/// Resolves a pattern selector: a built-in name or a path to pattern JSON.
pub fn pattern_for(
    selector: &str,
    json_text: Option<&str>,
    sys_labels: &[String],
    sys_tau: Option<&str>,
) -> Result<PatternAutomaton, FormatError> {
    match selector {
        "strong" => Ok(PatternAutomaton::strong(sys_labels)?),
        "weak" => {
            let tau = sys_tau.ok_or(PatternError::TauNotInAlphabet("tau".into()))?;
            Ok(PatternAutomaton::weak(sys_labels, tau)?)
        }
        "delay" => {
            let tau = sys_tau.ok_or(PatternError::TauNotInAlphabet("tau".into()))?;
            Ok(PatternAutomaton::delay(sys_labels, tau)?)
        }
        _ => {
            let text = json_text.expect("caller reads the file for path selectors");
            parse_pattern(text, sys_labels)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTRO: &str = "\
semiring real
tau tau              # names the silent label
labels a tau
states x y
trans x a 1/2 y
trans x tau 1/2 x
";

    #[test]
    fn parses_the_intro_system() {
        // `labels` comes after `tau` in the grammar example; scan collects
        // directives before resolution so the order is free.
        let sys = parse_weighted_system(INTRO).unwrap();
        assert_eq!(sys.state_count(), 2);
        assert_eq!(sys.labels(), &["a", "tau"]);
        assert_eq!(sys.tau(), Some(1));
        assert_eq!(sys.successors(0).len(), 2);
        // x's weights sum to one; the deadlock state y does not
        let report = sys.validate_fully_probabilistic();
        assert_eq!(report.violations, vec![("y".to_string(), "0".to_string())]);
    }

    #[test]
    fn zero_weight_is_an_error() {
        let text = "semiring nat\nlabels a\nstates x y\ntrans x a 0 y\n";
        let err = parse_weighted_system(text).unwrap_err();
        assert!(matches!(
            err,
            FormatError::System {
                line: 4,
                source: SystemError::ZeroWeight { .. }
            }
        ));
    }

    #[test]
    fn empty_transition_section_is_fine() {
        let sys = parse_weighted_system("semiring bool\nlabels a\nstates x\n").unwrap();
        assert!(sys.successors(0).is_zero());
    }

    #[test]
    fn unknown_semiring_is_an_error() {
        let err = parse_weighted_system("semiring tropical\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 1, .. }));
    }

    #[test]
    fn duplicate_transition_is_an_error() {
        let text = "semiring nat\nlabels a\nstates x\ntrans x a 1 x\ntrans x a 2 x\n";
        let err = parse_weighted_system(text).unwrap_err();
        assert!(matches!(
            err,
            FormatError::System {
                line: 5,
                source: SystemError::DuplicateTransition { .. }
            }
        ));
    }

    #[test]
    fn decimals_parse_exactly() {
        let sys = parse_weighted_system(
            "semiring real\nlabels a\nstates x y\ntrans x a 0.5 y\ntrans x a 0.25 x\n",
        )
        .unwrap();
        assert_eq!(
            sys.successors(0).get(&(1, 0)),
            Value::rational(1, 2).unwrap()
        );
        assert_eq!(
            sys.successors(0).get(&(0, 0)),
            Value::rational(1, 4).unwrap()
        );
    }

    #[test]
    fn render_round_trips() {
        let sys = parse_weighted_system(INTRO).unwrap();
        let rendered = render_system(&sys);
        let back = parse_weighted_system(&rendered).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn segala_dialect_parses() {
        let text = "\
semiring real
labels a tau
tau tau
states x y z
sstep x a { y 1/2 ; z 1/2 }
sstep x tau { x 1 }
";
        let sys = parse_segala_system(text).unwrap();
        assert_eq!(sys.state_count(), 3);
        assert_eq!(sys.steps(0).len(), 2);
        // distributions must sum to one
        let bad = "semiring real\nlabels a tau\ntau tau\nstates x\nsstep x a { x 1/2 }\n";
        assert!(parse_segala_system(bad).is_err());
    }

    #[test]
    fn partition_json() {
        let sys = parse_weighted_system(INTRO).unwrap();
        let p = parse_partition(r#"{"blocks":[["x"],["y"]]}"#, sys.states()).unwrap();
        assert_eq!(p.block_count(), 2);
        let err = parse_partition(r#"{"blocks":[["x"]]}"#, sys.states()).unwrap_err();
        assert!(matches!(
            err,
            FormatError::Partition(PartitionError::Missing(_))
        ));
        let err = parse_partition(r#"{"blocks":[["x"],["zz"]]}"#, sys.states()).unwrap_err();
        assert!(matches!(err, FormatError::UnknownStateName(_)));
        let one = parse_partition(r#"{"blocks":[["x","y"]]}"#, sys.states()).unwrap();
        assert_eq!(one.block_count(), 1);
    }

    #[test]
    fn pattern_json_round_trip_matches_builtin() {
        // the strong pattern over {a}, re-encoded by hand
        let json = r#"{
            "labels": ["a"],
            "states": ["sa", "one", "zero"],
            "accepts": {"one": true},
            "delta": {
                "sa":   {"a": "one"},
                "one":  {"a": "zero"},
                "zero": {"a": "zero"}
            },
            "observables": ["sa"]
        }"#;
        let labels = vec!["a".to_string()];
        let custom = parse_pattern(json, &labels).unwrap();
        let builtin = PatternAutomaton::strong(&labels).unwrap();
        // same structure up to renaming: compare via word membership
        for word in [vec![], vec!["a"], vec!["a", "a"]] {
            assert_eq!(
                custom.member_word(0, &word).unwrap(),
                builtin.member_word(0, &word).unwrap()
            );
        }
    }

    #[test]
    fn pattern_json_missing_entry_is_closure_error() {
        let json = r#"{
            "labels": ["a"],
            "states": ["sa", "one"],
            "accepts": {"one": true},
            "delta": {"sa": {"a": "one"}},
            "observables": ["sa"]
        }"#;
        let err = parse_pattern(json, &["a".to_string()]).unwrap_err();
        assert!(matches!(
            err,
            FormatError::Pattern(PatternError::MissingDerivative { .. })
        ));
    }

    #[test]
    fn pattern_json_all_accepting_identity() {
        // tau-free Sigma* over {a}: one all-accepting state, identity delta
        let json = r#"{
            "labels": ["a"],
            "states": ["all"],
            "accepts": {"all": true},
            "delta": {"all": {"a": "all"}},
            "observables": ["all"]
        }"#;
        let p = parse_pattern(json, &["a".to_string()]).unwrap();
        assert_eq!(p.derivative(0, 0), 0);
        assert!(p.accepts_empty(0));
    }
}
