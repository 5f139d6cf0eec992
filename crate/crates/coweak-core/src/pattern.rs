//! Observation patterns: finite sets of trace languages closed under word
//! derivatives, presented as deterministic automata over the label alphabet.
//!
//! A pattern fixes the observational power of the equivalence being decided:
//! the strong pattern observes single letters, the weak pattern observes
//! `τ*` and `τ*·a·τ*`, the delay pattern `τ*` and `τ*·a`. Custom patterns
//! come from the I/O layer as explicit tables and are validated here.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// A finite trace-set automaton.
///
/// `derive[b][a]` is the derivative of pattern state `b` by label `a`; it is
/// total by construction. `observables` lists the named trace sets whose
/// behaviour defines the equivalence; derivative closure may add auxiliary
/// states (the empty language, `{ε}`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternAutomaton {
    labels: Vec<String>,
    state_names: Vec<String>,
    accepts_empty: Vec<bool>,
    derive: Vec<Vec<usize>>,
    observables: Vec<usize>,
}

/// Errors from building or validating a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternError {
    EmptyAlphabet,
    TauNotInAlphabet(String),
    UnknownLabel(String),
    UnknownState(String),
    DuplicateState(String),
    DuplicateLabel(String),
    /// The derivative table misses an entry, so the state set is not closed.
    MissingDerivative {
        state: String,
        label: String,
    },
    NoObservables,
}

impl core::fmt::Display for PatternError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PatternError::EmptyAlphabet => write!(f, "pattern alphabet is empty"),
            PatternError::TauNotInAlphabet(t) => {
                write!(f, "silent label `{t}` is not in the alphabet")
            }
            PatternError::UnknownLabel(l) => write!(f, "unknown label `{l}`"),
            PatternError::UnknownState(s) => write!(f, "unknown pattern state `{s}`"),
            PatternError::DuplicateState(s) => write!(f, "duplicate pattern state `{s}`"),
            PatternError::DuplicateLabel(l) => write!(f, "duplicate label `{l}`"),
            PatternError::MissingDerivative { state, label } => write!(
                f,
                "derivative table not closed: no entry for state `{state}` under label `{label}`"
            ),
            PatternError::NoObservables => write!(f, "pattern declares no observable states"),
        }
    }
}
impl core::error::Error for PatternError {}

impl PatternAutomaton {
    /// Builds a pattern from explicit parts, checking totality of the
    /// derivative table and validity of all names.
    pub fn new(
        labels: Vec<String>,
        state_names: Vec<String>,
        accepts_empty: Vec<bool>,
        derive_by_name: impl Fn(&str, &str) -> Option<String>,
        observables: Vec<String>,
    ) -> Result<Self, PatternError> {
        if labels.is_empty() {
            return Err(PatternError::EmptyAlphabet);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(PatternError::DuplicateLabel(l.clone()));
            }
        }
        for (i, s) in state_names.iter().enumerate() {
            if state_names[..i].contains(s) {
                return Err(PatternError::DuplicateState(s.clone()));
            }
        }
        let index_of = |name: &str| state_names.iter().position(|s| s == name);
        let mut derive = Vec::with_capacity(state_names.len());
        for s in &state_names {
            let mut row = Vec::with_capacity(labels.len());
            for l in &labels {
                let target =
                    derive_by_name(s, l).ok_or_else(|| PatternError::MissingDerivative {
                        state: s.clone(),
                        label: l.clone(),
                    })?;
                let idx = index_of(&target).ok_or(PatternError::UnknownState(target))?;
                row.push(idx);
            }
            derive.push(row);
        }
        if observables.is_empty() {
            return Err(PatternError::NoObservables);
        }
        let mut obs = Vec::with_capacity(observables.len());
        for o in &observables {
            obs.push(index_of(o).ok_or_else(|| PatternError::UnknownState(o.clone()))?);
        }
        Ok(PatternAutomaton {
            labels,
            state_names,
            accepts_empty,
            derive,
            observables: obs,
        })
    }

    /// The strong pattern: one singleton language per label, plus `{ε}` and
    /// the empty language.
    pub fn strong(alphabet: &[String]) -> Result<Self, PatternError> {
        if alphabet.is_empty() {
            return Err(PatternError::EmptyAlphabet);
        }
        let mut names: Vec<String> = alphabet.iter().map(|a| format!("s_{a}")).collect();
        names.push("eps".to_string());
        names.push("empty".to_string());
        let accepts: Vec<bool> = names.iter().map(|n| n == "eps").collect();
        let observables = alphabet.iter().map(|a| format!("s_{a}")).collect();
        let alphabet_owned: Vec<String> = alphabet.to_vec();
        Self::new(
            alphabet_owned,
            names,
            accepts,
            |state, label| {
                Some(if state == format!("s_{label}") {
                    "eps".to_string()
                } else {
                    "empty".to_string()
                })
            },
            observables,
        )
    }

    /// The weak pattern: `τ*` and `τ*·a·τ*` per visible label. The closure
    /// needs only the empty language extra, since `(τ*aτ*)/a = τ*`.
    pub fn weak(alphabet: &[String], tau: &str) -> Result<Self, PatternError> {
        if alphabet.is_empty() {
            return Err(PatternError::EmptyAlphabet);
        }
        if !alphabet.iter().any(|l| l == tau) {
            return Err(PatternError::TauNotInAlphabet(tau.to_string()));
        }
        let mut names = Vec::new();
        names.push("w_tau".to_string());
        for a in alphabet {
            if a != tau {
                names.push(format!("w_{a}"));
            }
        }
        let observables = names.clone();
        names.push("empty".to_string());
        let accepts: Vec<bool> = names.iter().map(|n| n == "w_tau").collect();
        let tau = tau.to_string();
        Self::new(
            alphabet.to_vec(),
            names,
            accepts,
            move |state, label| {
                Some(if state == "w_tau" {
                    if label == tau {
                        "w_tau".to_string()
                    } else {
                        "empty".to_string()
                    }
                } else if state == "empty" {
                    "empty".to_string()
                } else if label == tau {
                    state.to_string()
                } else if state == format!("w_{label}") {
                    "w_tau".to_string()
                } else {
                    "empty".to_string()
                })
            },
            observables,
        )
    }

    /// The delay pattern: `τ*` and `τ*·a` per visible label; closure adds
    /// `{ε}` and the empty language.
    pub fn delay(alphabet: &[String], tau: &str) -> Result<Self, PatternError> {
        if alphabet.is_empty() {
            return Err(PatternError::EmptyAlphabet);
        }
        if !alphabet.iter().any(|l| l == tau) {
            return Err(PatternError::TauNotInAlphabet(tau.to_string()));
        }
        let mut names = Vec::new();
        names.push("d_tau".to_string());
        for a in alphabet {
            if a != tau {
                names.push(format!("d_{a}"));
            }
        }
        let observables = names.clone();
        names.push("eps".to_string());
        names.push("empty".to_string());
        let accepts: Vec<bool> = names.iter().map(|n| n == "d_tau" || n == "eps").collect();
        let tau = tau.to_string();
        Self::new(
            alphabet.to_vec(),
            names,
            accepts,
            move |state, label| {
                Some(if state == "d_tau" {
                    if label == tau {
                        "d_tau".to_string()
                    } else {
                        "empty".to_string()
                    }
                } else if state == "eps" || state == "empty" {
                    "empty".to_string()
                } else if label == tau {
                    state.to_string()
                } else if state == format!("d_{label}") {
                    "eps".to_string()
                } else {
                    "empty".to_string()
                })
            },
            observables,
        )
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, b: usize) -> &str {
        &self.state_names[b]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }

    /// Whether the empty word belongs to pattern state `b`.
    pub fn accepts_empty(&self, b: usize) -> bool {
        self.accepts_empty[b]
    }

    /// The derivative `b/a` as a state index.
    pub fn derivative(&self, b: usize, a: usize) -> usize {
        self.derive[b][a]
    }

    pub fn observables(&self) -> &[usize] {
        &self.observables
    }

    /// Pattern states reachable from the observables by derivatives, in
    /// index order. Behaviour is compared at all of these by default.
    pub fn reachable_from_observables(&self) -> Vec<usize> {
        let mut seen = alloc::vec![false; self.state_names.len()];
        let mut stack: Vec<usize> = self.observables.clone();
        for &b in &stack {
            seen[b] = true;
        }
        while let Some(b) = stack.pop() {
            for a in 0..self.labels.len() {
                let d = self.derive[b][a];
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        (0..self.state_names.len()).filter(|&b| seen[b]).collect()
    }

    /// Word membership: `w ∈ b` iff the iterated derivative accepts the
    /// empty word. This is the test oracle for the built-ins.
    pub fn member_word(&self, b: usize, word: &[&str]) -> Result<bool, PatternError> {
        let mut cur = b;
        for l in word {
            let a = self
                .label_index(l)
                .ok_or_else(|| PatternError::UnknownLabel((*l).to_string()))?;
            cur = self.derive[cur][a];
        }
        Ok(self.accepts_empty[cur])
    }
}
