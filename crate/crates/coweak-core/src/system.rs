//! Finite weighted transition systems and state-space partitions.
//!
//! A system maps every state to a finite valuation over (state, label)
//! pairs. The probabilistic sub-classes (reactive, generative, fully
//! probabilistic) are validated with exact equality, never a tolerance.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::semiring::{Kind, Value};
use crate::valuation::{from_pairs, Valuation};

/// Transition keys: (target state index, label index).
pub type TransKey = (usize, usize);

/// A finite coalgebra `X → T_R(X × A)` in sparse form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSystem {
    kind: Kind,
    states: Vec<String>,
    labels: Vec<String>,
    tau: Option<usize>,
    transitions: Vec<Valuation<TransKey>>,
}

/// Errors raised while assembling a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemError {
    UnknownState(String),
    UnknownLabel(String),
    DuplicateState(String),
    DuplicateLabel(String),
    DuplicateTransition {
        state: String,
        label: String,
        target: String,
    },
    ZeroWeight {
        state: String,
        label: String,
        target: String,
    },
    WeightKind {
        expected: Kind,
        got: Kind,
    },
    TauNotDeclared(String),
}

impl core::fmt::Display for SystemError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SystemError::UnknownState(s) => write!(f, "unknown state `{s}`"),
            SystemError::UnknownLabel(l) => write!(f, "unknown label `{l}`"),
            SystemError::DuplicateState(s) => write!(f, "duplicate state `{s}`"),
            SystemError::DuplicateLabel(l) => write!(f, "duplicate label `{l}`"),
            SystemError::DuplicateTransition {
                state,
                label,
                target,
            } => {
                write!(f, "duplicate transition {state} --{label}--> {target}")
            }
            SystemError::ZeroWeight {
                state,
                label,
                target,
            } => {
                write!(f, "zero weight on {state} --{label}--> {target}")
            }
            SystemError::WeightKind { expected, got } => {
                write!(f, "weight kind {got} does not match system kind {expected}")
            }
            SystemError::TauNotDeclared(t) => {
                write!(f, "silent label `{t}` is not among the declared labels")
            }
        }
    }
}
impl core::error::Error for SystemError {}

/// Incremental builder; transitions are checked against declared names.
pub struct SystemBuilder {
    kind: Kind,
    states: Vec<String>,
    labels: Vec<String>,
    tau: Option<usize>,
    triples: Vec<(usize, usize, Value, usize)>,
}

impl SystemBuilder {
    pub fn new(kind: Kind) -> Self {
        SystemBuilder {
            kind,
            states: Vec::new(),
            labels: Vec::new(),
            tau: None,
            triples: Vec::new(),
        }
    }

    pub fn state(&mut self, name: &str) -> Result<usize, SystemError> {
        if self.states.iter().any(|s| s == name) {
            return Err(SystemError::DuplicateState(name.to_string()));
        }
        self.states.push(name.to_string());
        Ok(self.states.len() - 1)
    }

    pub fn label(&mut self, name: &str) -> Result<usize, SystemError> {
        if self.labels.iter().any(|l| l == name) {
            return Err(SystemError::DuplicateLabel(name.to_string()));
        }
        self.labels.push(name.to_string());
        Ok(self.labels.len() - 1)
    }

    pub fn tau(&mut self, name: &str) -> Result<(), SystemError> {
        let idx = self
            .labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| SystemError::TauNotDeclared(name.to_string()))?;
        self.tau = Some(idx);
        Ok(())
    }

    pub fn transition(
        &mut self,
        source: &str,
        label: &str,
        weight: Value,
        target: &str,
    ) -> Result<(), SystemError> {
        let s = self
            .states
            .iter()
            .position(|x| x == source)
            .ok_or_else(|| SystemError::UnknownState(source.to_string()))?;
        let l = self
            .labels
            .iter()
            .position(|x| x == label)
            .ok_or_else(|| SystemError::UnknownLabel(label.to_string()))?;
        let t = self
            .states
            .iter()
            .position(|x| x == target)
            .ok_or_else(|| SystemError::UnknownState(target.to_string()))?;
        if weight.kind() != self.kind {
            return Err(SystemError::WeightKind {
                expected: self.kind,
                got: weight.kind(),
            });
        }
        if weight.is_zero() {
            return Err(SystemError::ZeroWeight {
                state: source.to_string(),
                label: label.to_string(),
                target: target.to_string(),
            });
        }
        if self
            .triples
            .iter()
            .any(|&(s0, l0, _, t0)| s0 == s && l0 == l && t0 == t)
        {
            return Err(SystemError::DuplicateTransition {
                state: source.to_string(),
                label: label.to_string(),
                target: target.to_string(),
            });
        }
        self.triples.push((s, l, weight, t));
        Ok(())
    }

    pub fn finish(self) -> WeightedSystem {
        let mut transitions = alloc::vec![Valuation::zero(self.kind); self.states.len()];
        for (s, l, w, t) in self.triples {
            transitions[s]
                .add_at((t, l), &w)
                .expect("weights checked against system kind");
        }
        WeightedSystem {
            kind: self.kind,
            states: self.states,
            labels: self.labels,
            tau: self.tau,
            transitions,
        }
    }
}

impl WeightedSystem {
    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn tau(&self) -> Option<usize> {
        self.tau
    }

    /// The outgoing valuation of a state over (target, label) keys.
    pub fn successors(&self, state: usize) -> &Valuation<TransKey> {
        &self.transitions[state]
    }

    /// Per-state total outgoing weight.
    pub fn out_total(&self, state: usize) -> Value {
        self.transitions[state].total()
    }

    /// Fully probabilistic: every state's outgoing weights sum to exactly 1.
    pub fn validate_fully_probabilistic(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.kind != Kind::Real {
            return ValidationReport::wrong_kind(self.kind);
        }
        let one = Value::one(Kind::Real);
        for s in 0..self.states.len() {
            let total = self.out_total(s);
            if total != one {
                violations.push((self.states[s].clone(), total.render()));
            }
        }
        ValidationReport::from_violations(violations)
    }

    /// Reactive: for every state and label the per-label sum is 0 or 1.
    pub fn validate_reactive(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.kind != Kind::Real {
            return ValidationReport::wrong_kind(self.kind);
        }
        let one = Value::one(Kind::Real);
        for s in 0..self.states.len() {
            for a in 0..self.labels.len() {
                let mut total = Value::zero(Kind::Real);
                for (&(_, l), w) in self.transitions[s].iter() {
                    if l == a {
                        total = total.add(w).unwrap();
                    }
                }
                if !total.is_zero() && total != one {
                    violations.push((
                        alloc::format!("{}/{}", self.states[s], self.labels[a]),
                        total.render(),
                    ));
                }
            }
        }
        ValidationReport::from_violations(violations)
    }

    /// Generative: every state's total outgoing weight is 0 or 1.
    pub fn validate_generative(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.kind != Kind::Real {
            return ValidationReport::wrong_kind(self.kind);
        }
        let one = Value::one(Kind::Real);
        for s in 0..self.states.len() {
            let total = self.out_total(s);
            if !total.is_zero() && total != one {
                violations.push((self.states[s].clone(), total.render()));
            }
        }
        ValidationReport::from_violations(violations)
    }
}

/// Outcome of a sub-class validation; lists the violating states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub passed: bool,
    /// (where, offending total) pairs.
    pub violations: Vec<(String, String)>,
    pub wrong_kind: Option<Kind>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<(String, String)>) -> Self {
        ValidationReport {
            passed: violations.is_empty(),
            violations,
            wrong_kind: None,
        }
    }

    fn wrong_kind(kind: Kind) -> Self {
        ValidationReport {
            passed: false,
            violations: Vec::new(),
            wrong_kind: Some(kind),
        }
    }
}

/// A partition of the state space into disjoint nonempty blocks.
///
/// Canonical form: members sorted within blocks, blocks ordered by least
/// member. `class_of[s]` is the block index of state `s`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

/// Errors from assembling a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    Overlap(usize),
    Missing(usize),
    OutOfRange(usize),
    EmptyBlock,
}

impl core::fmt::Display for PartitionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PartitionError::Overlap(s) => write!(f, "state #{s} appears in two blocks"),
            PartitionError::Missing(s) => write!(f, "state #{s} is not covered by any block"),
            PartitionError::OutOfRange(s) => write!(f, "state #{s} does not exist"),
            PartitionError::EmptyBlock => write!(f, "empty block"),
        }
    }
}
impl core::error::Error for PartitionError {}

impl Partition {
    /// Builds and canonicalises a partition over `0..n`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut class_of = alloc::vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &s in block {
                if s >= n {
                    return Err(PartitionError::OutOfRange(s));
                }
                if class_of[s] != usize::MAX {
                    return Err(PartitionError::Overlap(s));
                }
                class_of[s] = i;
            }
        }
        if let Some(s) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(PartitionError::Missing(s));
        }
        let mut blocks: Vec<Vec<usize>> = blocks;
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        let mut class_of = alloc::vec![0usize; n];
        for (i, block) in blocks.iter().enumerate() {
            for &s in block {
                class_of[s] = i;
            }
        }
        Ok(Partition { blocks, class_of })
    }

    /// One state per block.
    pub fn discrete(n: usize) -> Self {
        Partition::new(n, (0..n).map(|s| alloc::vec![s]).collect()).expect("discrete is valid")
    }

    /// All states in a single block.
    pub fn one_block(n: usize) -> Self {
        Partition::new(n, alloc::vec![(0..n).collect()]).expect("one block is valid")
    }

    /// Builds from a class assignment (classes need not be contiguous).
    pub fn from_classes(classes: &[usize]) -> Self {
        let mut blocks: alloc::collections::BTreeMap<usize, Vec<usize>> =
            alloc::collections::BTreeMap::new();
        for (s, &c) in classes.iter().enumerate() {
            blocks.entry(c).or_default().push(s);
        }
        Partition::new(classes.len(), blocks.into_values().collect()).expect("classes cover 0..n")
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn class_of(&self, state: usize) -> usize {
        self.class_of[state]
    }

    pub fn state_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    /// Whether every block of `self` is contained in a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks.iter().all(|block| {
            let c = coarser.class_of[block[0]];
            block.iter().all(|&s| coarser.class_of[s] == c)
        })
    }

    /// The canonical projection as a key map for valuation projection.
    pub fn projector(&self) -> impl Fn(&usize) -> Option<usize> + '_ {
        move |s: &usize| self.class_of.get(*s).copied()
    }
}

/// Enumerates all partitions of `0..n` via restricted growth strings.
/// Bell(7) = 877, so this stays desk-scale for the brute-force procedures.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut rgs = alloc::vec![0usize; n];
    loop {
        out.push(Partition::from_classes(&rgs));
        // next restricted growth string
        let mut i = n;
        loop {
            if i == 1 {
                return out;
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// Builds the intro example `x --a(1/2)--> y, x --tau(1/2)--> x` used across
/// the test suites.
#[doc(hidden)]
pub fn intro_system() -> WeightedSystem {
    let mut b = SystemBuilder::new(Kind::Real);
    b.state("x").unwrap();
    b.state("y").unwrap();
    b.label("a").unwrap();
    b.label("tau").unwrap();
    b.tau("tau").unwrap();
    b.transition("x", "a", Value::rational(1, 2).unwrap(), "y")
        .unwrap();
    b.transition("x", "tau", Value::rational(1, 2).unwrap(), "x")
        .unwrap();
    b.finish()
}

/// The triangle example over the naturals: `x --tau(2)--> y`,
/// `x --tau(2)--> z`, `y --tau(2)--> z`.
#[doc(hidden)]
pub fn triangle_system() -> WeightedSystem {
    let mut b = SystemBuilder::new(Kind::Nat);
    for s in ["x", "y", "z"] {
        b.state(s).unwrap();
    }
    b.label("tau").unwrap();
    b.tau("tau").unwrap();
    let two = Value::from_u64(Kind::Nat, 2);
    b.transition("x", "tau", two.clone(), "y").unwrap();
    b.transition("x", "tau", two.clone(), "z").unwrap();
    b.transition("y", "tau", two, "z").unwrap();
    b.finish()
}

/// Multiplicity valuation helper used by tests.
#[doc(hidden)]
pub fn valuation_of<K: Ord + Clone>(kind: Kind, pairs: Vec<(K, Value)>) -> Valuation<K> {
    from_pairs(kind, pairs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn intro_system_shape() {
        let sys = intro_system();
        assert_eq!(sys.state_count(), 2);
        assert_eq!(sys.successors(0).len(), 2);
        assert!(sys.successors(1).is_zero());
    }

    #[test]
    fn fully_probabilistic_validation() {
        let sys = intro_system();
        // x sums to 1; y has no transitions, so it fails.
        let report = sys.validate_fully_probabilistic();
        assert!(!report.passed);
        assert_eq!(report.violations, vec![("y".into(), "0".into())]);

        let mut b = SystemBuilder::new(Kind::Real);
        b.state("x").unwrap();
        b.label("a").unwrap();
        b.transition("x", "a", Value::rational(1, 2).unwrap(), "x")
            .unwrap();
        let halves = b.finish();
        assert!(!halves.validate_fully_probabilistic().passed);
        // ... and fully probabilistic systems are also generative.
        let mut b = SystemBuilder::new(Kind::Real);
        b.state("x").unwrap();
        b.label("a").unwrap();
        b.transition("x", "a", Value::one(Kind::Real), "x").unwrap();
        let sys = b.finish();
        assert!(sys.validate_fully_probabilistic().passed);
        assert!(sys.validate_generative().passed);
    }

    #[test]
    fn reactive_validation() {
        let mut b = SystemBuilder::new(Kind::Real);
        b.state("x").unwrap();
        b.state("y").unwrap();
        b.label("a").unwrap();
        b.label("b").unwrap();
        b.transition("x", "a", Value::rational(1, 2).unwrap(), "x")
            .unwrap();
        b.transition("x", "a", Value::rational(1, 2).unwrap(), "y")
            .unwrap();
        let sys = b.finish();
        // per-label sums are {a: 1, b: 0} for x and all zero for y
        assert!(sys.validate_reactive().passed);
    }

    #[test]
    fn zero_weight_rejected() {
        let mut b = SystemBuilder::new(Kind::Nat);
        b.state("x").unwrap();
        b.state("y").unwrap();
        b.label("a").unwrap();
        let err = b
            .transition("x", "a", Value::zero(Kind::Nat), "y")
            .unwrap_err();
        assert!(matches!(err, SystemError::ZeroWeight { .. }));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(2, vec![vec![0], vec![1]]).is_ok());
        assert_eq!(
            Partition::new(2, vec![vec![0]]).unwrap_err(),
            PartitionError::Missing(1)
        );
        assert_eq!(
            Partition::new(2, vec![vec![0, 1], vec![1]]).unwrap_err(),
            PartitionError::Overlap(1)
        );
        let one = Partition::new(2, vec![vec![1, 0]]).unwrap();
        assert_eq!(one.block_count(), 1);
        assert_eq!(one.blocks()[0], vec![0, 1]);
    }

    #[test]
    fn refinement_order() {
        let discrete = Partition::discrete(3);
        let one = Partition::one_block(3);
        assert!(discrete.refines(&one));
        assert!(!one.refines(&discrete));
        assert!(discrete.refines(&discrete));
    }

    #[test]
    fn partition_enumeration_counts() {
        // Bell numbers 1, 2, 5, 15, 52, 203, 877
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203), (7, 877)] {
            assert_eq!(all_partitions(n).len(), bell, "Bell({n})");
        }
        // All distinct and canonical.
        let mut seen = all_partitions(4);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }
}
