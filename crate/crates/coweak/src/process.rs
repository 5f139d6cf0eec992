//! A miniature weighted process-term frontend.
//!
//! Grammar per line: `name = term` definitions (non-recursive, defined
//! before use) with an optional final bare term. Terms are
//!
//! ```text
//! term   ::= prefix ('+' prefix)*
//! prefix ::= label '.' prefix | atom
//! atom   ::= '0' | name | '(' term ')'
//! ```
//!
//! Elaboration produces a transition system over the naturals whose states
//! are the reachable subterms and whose weights count the syntactic
//! derivations of each transition, so `a.0 + a.0` steps to `0` with
//! weight 2.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use coweak_core::semiring::{Kind, Value};
use coweak_core::system::{SystemBuilder, WeightedSystem};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Term {
    Nil,
    Prefix(String, Box<Term>),
    Sum(Vec<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Nil => write!(f, "0"),
            Term::Prefix(label, rest) => match **rest {
                Term::Sum(_) => write!(f, "{label}.({rest})"),
                _ => write!(f, "{label}.{rest}"),
            },
            Term::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
        }
    }
}

/// Errors from parsing or elaborating process terms.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProcessError {
    #[error("line {line}: undefined name `{name}`")]
    UndefinedName { line: usize, name: String },
    #[error("line {line}: recursive use of `{name}` in its own definition")]
    Recursion { line: usize, name: String },
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("file defines no process")]
    Empty,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    defs: &'a BTreeMap<String, Term>,
    current: Option<&'a str>,
}

impl<'a> Parser<'a> {
    fn new(
        text: &str,
        line: usize,
        defs: &'a BTreeMap<String, Term>,
        current: Option<&'a str>,
    ) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line,
            defs,
            current,
        }
    }

    fn error(&self, message: impl Into<String>) -> ProcessError {
        ProcessError::Syntax {
            line: self.line,
            col: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(self.chars[start..self.pos].iter().collect())
        }
    }

    fn term(&mut self) -> Result<Term, ProcessError> {
        let mut summands = vec![self.prefix()?];
        while self.peek() == Some('+') {
            self.pos += 1;
            summands.push(self.prefix()?);
        }
        Ok(if summands.len() == 1 {
            summands.pop().unwrap()
        } else {
            Term::Sum(summands)
        })
    }

    fn prefix(&mut self) -> Result<Term, ProcessError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.term()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('0') => {
                self.pos += 1;
                Ok(Term::Nil)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name = self.ident().expect("peeked an identifier head");
                if self.peek() == Some('.') {
                    self.pos += 1;
                    let rest = self.prefix()?;
                    Ok(Term::Prefix(name, Box::new(rest)))
                } else {
                    // a bare identifier references a prior definition
                    if Some(name.as_str()) == self.current {
                        return Err(ProcessError::Recursion {
                            line: self.line,
                            name,
                        });
                    }
                    self.defs
                        .get(&name)
                        .cloned()
                        .ok_or(ProcessError::UndefinedName {
                            line: self.line,
                            name,
                        })
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of term")),
        }
    }

    fn finish(&mut self) -> Result<(), ProcessError> {
        self.skip_ws();
        if self.pos != self.chars.len() {
            return Err(self.error("trailing input after term"));
        }
        Ok(())
    }
}

/// One syntactic derivation step: the multiset of `(label, successor)`
/// pairs, with multiplicities counting distinct derivations.
fn derivations(term: &Term) -> BTreeMap<(String, Term), u64> {
    match term {
        Term::Nil => BTreeMap::new(),
        Term::Prefix(label, rest) => {
            let mut out = BTreeMap::new();
            out.insert((label.clone(), (**rest).clone()), 1);
            out
        }
        Term::Sum(terms) => {
            let mut out: BTreeMap<(String, Term), u64> = BTreeMap::new();
            for t in terms {
                for (key, count) in derivations(t) {
                    *out.entry(key).or_insert(0) += count;
                }
            }
            out
        }
    }
}

/// Parses a `.proc` file and elaborates it to a weighted system over the
/// naturals. Every defined name becomes a root state (so does the optional
/// final bare term); states are the reachable subterms rendered canonically.
/// A label literally named `tau` is taken as the silent label.
pub fn elaborate_process_file(text: &str) -> Result<(WeightedSystem, Vec<String>), ProcessError> {
    let mut defs: BTreeMap<String, Term> = BTreeMap::new();
    let mut roots: Vec<Term> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        if let Some((name, body)) = line.split_once('=') {
            let name = name.trim().to_string();
            let mut parser = Parser::new(body, line_no, &defs, Some(&name));
            let term = parser.term()?;
            parser.finish()?;
            defs.insert(name, term.clone());
            roots.push(term);
        } else {
            let mut parser = Parser::new(line, line_no, &defs, None);
            let term = parser.term()?;
            parser.finish()?;
            roots.push(term);
        }
    }
    if roots.is_empty() {
        return Err(ProcessError::Empty);
    }

    // collect reachable subterms breadth-first, keeping root order first
    let mut states: Vec<Term> = Vec::new();
    let mut queue: Vec<Term> = roots.clone();
    while let Some(term) = queue.pop() {
        if states.contains(&term) {
            continue;
        }
        states.push(term.clone());
        for (label_term, _) in derivations(&term) {
            queue.push(label_term.1);
        }
    }
    states.sort();
    // roots first, for readable output
    let mut ordered: Vec<Term> = Vec::new();
    for r in &roots {
        if !ordered.contains(r) {
            ordered.push(r.clone());
        }
    }
    for s in states {
        if !ordered.contains(&s) {
            ordered.push(s);
        }
    }

    let mut labels: Vec<String> = Vec::new();
    for term in &ordered {
        for ((label, _), _) in derivations(term) {
            if !labels.contains(&label) {
                labels.push(label);
            }
        }
    }
    labels.sort();

    let mut builder = SystemBuilder::new(Kind::Nat);
    let names: Vec<String> = ordered.iter().map(|t| t.to_string()).collect();
    for name in &names {
        builder
            .state(name)
            .expect("subterm renderings are distinct");
    }
    for label in &labels {
        builder.label(label).expect("labels deduplicated");
    }
    if labels.iter().any(|l| l == "tau") {
        builder.tau("tau").expect("just declared");
    }
    for (i, term) in ordered.iter().enumerate() {
        for ((label, target), count) in derivations(term) {
            let target_name = target.to_string();
            builder
                .transition(
                    &names[i],
                    &label,
                    Value::from_u64(Kind::Nat, count),
                    &target_name,
                )
                .expect("reachable targets are states");
        }
    }
    let root_names = roots.iter().map(|t| t.to_string()).collect();
    Ok((builder.finish(), root_names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_choice_accumulates_weight() {
        let (sys, roots) = elaborate_process_file("a.0 + a.0\n").unwrap();
        let root = sys.state_index(&roots[0]).unwrap();
        let zero = sys.state_index("0").unwrap();
        let a = sys.label_index("a").unwrap();
        assert_eq!(
            sys.successors(root).get(&(zero, a)),
            Value::from_u64(Kind::Nat, 2)
        );
    }

    #[test]
    fn nil_has_no_transitions() {
        let (sys, roots) = elaborate_process_file("0\n").unwrap();
        let root = sys.state_index(&roots[0]).unwrap();
        assert!(sys.successors(root).is_zero());
    }

    #[test]
    fn three_summand_example() {
        let (sys, roots) = elaborate_process_file("0 + tau.0 + tau.tau.0\n").unwrap();
        let root = sys.state_index(&roots[0]).unwrap();
        let zero = sys.state_index("0").unwrap();
        let tau0 = sys.state_index("tau.0").unwrap();
        let tau = sys.label_index("tau").unwrap();
        assert_eq!(sys.tau(), Some(tau));
        let one = Value::from_u64(Kind::Nat, 1);
        assert_eq!(sys.successors(root).get(&(zero, tau)), one);
        assert_eq!(sys.successors(root).get(&(tau0, tau)), one);
        assert_eq!(sys.successors(tau0).get(&(zero, tau)), one);
        assert_eq!(sys.state_count(), 3);
    }

    #[test]
    fn definitions_and_references() {
        let text = "p = a.0\nq = p + b.0\n";
        let (sys, roots) = elaborate_process_file(text).unwrap();
        assert_eq!(roots, vec!["a.0", "a.0 + b.0"]);
        assert!(sys.state_index("a.0 + b.0").is_some());
    }

    #[test]
    fn undefined_and_recursive_names() {
        assert_eq!(
            elaborate_process_file("p = q\n").unwrap_err(),
            ProcessError::UndefinedName {
                line: 1,
                name: "q".into()
            }
        );
        assert_eq!(
            elaborate_process_file("p = a.p\n").unwrap_err(),
            ProcessError::Recursion {
                line: 1,
                name: "p".into()
            }
        );
    }

    #[test]
    fn parentheses_group_sums_under_prefixes() {
        let (sys, roots) = elaborate_process_file("a.(b.0 + tau.c.0)\n").unwrap();
        let root = sys.state_index(&roots[0]).unwrap();
        let inner = sys.state_index("b.0 + tau.c.0").unwrap();
        let a = sys.label_index("a").unwrap();
        assert_eq!(
            sys.successors(root).get(&(inner, a)),
            Value::from_u64(Kind::Nat, 1)
        );
        assert_eq!(sys.state_count(), 4); // root, inner, c.0, 0
    }

    #[test]
    fn elaboration_satisfies_system_invariants() {
        let (sys, _) = elaborate_process_file("p = a.0 + a.0 + tau.(b.0 + b.0)\n").unwrap();
        for s in 0..sys.state_count() {
            for (_, w) in sys.successors(s).iter() {
                assert!(!w.is_zero());
            }
        }
    }
}
