//! Pattern bisimulation: checking a candidate equivalence, computing the
//! largest one by partition refinement, and the brute-force enumeration used
//! as the reference at small scale.
//!
//! A partition is a pattern bisimulation when any two states of a block have
//! identical solved rows over the quotient, at every compared pattern state.
//! Verdicts are only ever drawn from exact solver output; an inexact solve
//! is a refusal, not a "probably".

use alloc::string::String;
use alloc::vec::Vec;

use crate::fixpoint::{solve, BehaviorTable, Oplus, SolveOptions, Target};
use crate::pattern::PatternAutomaton;
use crate::semiring::Value;
use crate::system::{all_partitions, Partition, WeightedSystem};
use crate::valuation::{project, Valuation};

/// Which pattern states enter the row comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareScope {
    /// Every pattern state reachable from the observables (default; the
    /// auxiliary empty-language state never distinguishes anything).
    ReachableClosure,
    /// Only the named observables.
    ObservablesOnly,
}

/// A failed comparison, re-checkable by recomputing the two rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub left_state: usize,
    pub right_state: usize,
    pub pattern_state: usize,
    pub key: usize,
    pub left_value: Value,
    pub right_value: Value,
}

/// Outcome of a bisimulation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// The check refused to decide from approximate values.
#[derive(Debug, Clone, PartialEq)]
pub struct InexactSolve {
    pub strategy: String,
    pub convergence_bound: Option<f64>,
}

impl core::fmt::Display for InexactSolve {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "solver `{}` did not stabilise exactly; refusing an equivalence verdict",
            self.strategy
        )?;
        if let Some(b) = self.convergence_bound {
            write!(f, " (last step moved entries by up to {b:e})")?;
        }
        Ok(())
    }
}
impl core::error::Error for InexactSolve {}

fn compared_pstates(pattern: &PatternAutomaton, scope: CompareScope) -> Vec<usize> {
    match scope {
        CompareScope::ReachableClosure => pattern.reachable_from_observables(),
        CompareScope::ObservablesOnly => pattern.observables().to_vec(),
    }
}

fn find_witness(
    table: &BehaviorTable,
    partition: &Partition,
    pstates: &[usize],
) -> Option<Witness> {
    for block in partition.blocks() {
        let first = block[0];
        for &other in &block[1..] {
            for &b in pstates {
                let left = table.row(first, b);
                let right = table.row(other, b);
                if left != right {
                    // locate a key where the rows differ
                    for key in 0..table.key_count() {
                        let lv = left.get(&key);
                        let rv = right.get(&key);
                        if lv != rv {
                            return Some(Witness {
                                left_state: first,
                                right_state: other,
                                pattern_state: b,
                                key,
                                left_value: lv,
                                right_value: rv,
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Decides whether `partition` is a pattern bisimulation: solves the
/// behaviour map over the quotient and requires identical rows within
/// blocks. Exact solver output is mandatory.
pub fn check_bisimulation(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    partition: &Partition,
    oplus: Oplus,
    options: &SolveOptions,
    scope: CompareScope,
) -> Result<BisimVerdict, InexactSolve> {
    let table = solve(sys, pattern, Target::Quotient(partition), oplus, options);
    if !table.meta.exact {
        return Err(InexactSolve {
            strategy: table.meta.strategy_used.clone(),
            convergence_bound: table.meta.convergence_bound,
        });
    }
    let pstates = compared_pstates(pattern, scope);
    let witness = find_witness(&table, partition, &pstates);
    Ok(BisimVerdict {
        holds: witness.is_none(),
        witness,
    })
}

/// Computes the coarsest stable partition by refinement from the one-block
/// partition: repeatedly split blocks by row equality of the quotient
/// behaviour map until nothing changes. The result always passes
/// [`check_bisimulation`]; agreement with the enumerated coarsest is
/// checked against [`brute_force_largest`] at small scale.
pub fn largest_bisimulation(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    oplus: Oplus,
    options: &SolveOptions,
    scope: CompareScope,
) -> Result<Partition, InexactSolve> {
    let n = sys.state_count();
    if n == 0 {
        return Ok(Partition::from_classes(&[]));
    }
    let pstates = compared_pstates(pattern, scope);
    let mut partition = Partition::one_block(n);
    loop {
        let table = solve(sys, pattern, Target::Quotient(&partition), oplus, options);
        if !table.meta.exact {
            return Err(InexactSolve {
                strategy: table.meta.strategy_used.clone(),
                convergence_bound: table.meta.convergence_bound,
            });
        }
        let mut next_classes = alloc::vec![0usize; n];
        let mut seen: Vec<(usize, Vec<&Valuation<usize>>)> = Vec::new();
        for block in partition.blocks() {
            for &s in block {
                let signature: Vec<&Valuation<usize>> =
                    pstates.iter().map(|&b| table.row(s, b)).collect();
                // states stay together only if they were together and agree
                let found = seen
                    .iter()
                    .position(|(blk, sig)| *blk == partition.class_of(s) && *sig == signature);
                let class = match found {
                    Some(i) => i,
                    None => {
                        seen.push((partition.class_of(s), signature));
                        seen.len() - 1
                    }
                };
                next_classes[s] = class;
            }
        }
        let next = Partition::from_classes(&next_classes);
        if next == partition {
            return Ok(partition);
        }
        partition = next;
    }
}

/// Error from the brute-force enumerator.
#[derive(Debug, Clone, PartialEq)]
pub enum BruteForceError {
    TooManyStates { states: usize, max: usize },
    Inexact(InexactSolve),
}

impl core::fmt::Display for BruteForceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BruteForceError::TooManyStates { states, max } => {
                write!(f, "brute force is capped at {max} states, got {states}")
            }
            BruteForceError::Inexact(e) => write!(f, "{e}"),
        }
    }
}
impl core::error::Error for BruteForceError {}

/// Enumerates every partition of the state space, keeps the bisimulations,
/// and returns the transitive closure of their union (itself re-verified).
/// The reference procedure for [`largest_bisimulation`].
pub fn brute_force_largest(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    oplus: Oplus,
    options: &SolveOptions,
    scope: CompareScope,
    max_states: usize,
) -> Result<Partition, BruteForceError> {
    let n = sys.state_count();
    if n > max_states {
        return Err(BruteForceError::TooManyStates {
            states: n,
            max: max_states,
        });
    }
    let mut union_find: Vec<usize> = (0..n).collect();
    fn root(uf: &mut [usize], mut i: usize) -> usize {
        while uf[i] != i {
            uf[i] = uf[uf[i]];
            i = uf[i];
        }
        i
    }
    let mut passing = Vec::new();
    for partition in all_partitions(n) {
        let verdict = check_bisimulation(sys, pattern, &partition, oplus, options, scope)
            .map_err(BruteForceError::Inexact)?;
        if verdict.holds {
            passing.push(partition);
        }
    }
    for partition in &passing {
        for block in partition.blocks() {
            for &s in &block[1..] {
                let (a, b) = (root(&mut union_find, block[0]), root(&mut union_find, s));
                union_find[a] = b;
            }
        }
    }
    let classes: Vec<usize> = (0..n).map(|s| root(&mut union_find, s)).collect();
    let coarsest = Partition::from_classes(&classes);
    // the union closure of bisimulations is itself one; re-verify
    let verdict = check_bisimulation(sys, pattern, &coarsest, oplus, options, scope)
        .map_err(BruteForceError::Inexact)?;
    debug_assert!(verdict.holds, "union closure of bisimulations must pass");
    if !verdict.holds {
        // fall back to the diagonal, which always passes
        return Ok(Partition::discrete(n));
    }
    Ok(coarsest)
}

/// A labelled row view: per state, for each of `label_count` labels, a
/// valuation over state keys. Both plain systems and saturated behaviour
/// tables present themselves this way for kernel refinement.
pub trait LabelledRows {
    fn state_count(&self) -> usize;
    fn label_count(&self) -> usize;
    fn row(&self, state: usize, label: usize) -> Valuation<usize>;
}

impl LabelledRows for WeightedSystem {
    fn state_count(&self) -> usize {
        WeightedSystem::state_count(self)
    }

    fn label_count(&self) -> usize {
        self.labels().len()
    }

    fn row(&self, state: usize, label: usize) -> Valuation<usize> {
        let mut v = Valuation::zero(self.kind());
        for (&(y, a), w) in self.successors(state).iter() {
            if a == label {
                v.add_at(y, w).expect("same kind");
            }
        }
        v
    }
}

/// A saturated behaviour map viewed as a system labelled by pattern states.
pub struct SaturatedRows<'a> {
    pub table: &'a BehaviorTable,
    pub pstates: Vec<usize>,
}

impl<'a> SaturatedRows<'a> {
    /// Restricts the label set to the compared pattern states.
    pub fn new(table: &'a BehaviorTable, pattern: &PatternAutomaton, scope: CompareScope) -> Self {
        SaturatedRows {
            table,
            pstates: compared_pstates(pattern, scope),
        }
    }
}

impl LabelledRows for SaturatedRows<'_> {
    fn state_count(&self) -> usize {
        self.table.n_states()
    }

    fn label_count(&self) -> usize {
        self.pstates.len()
    }

    fn row(&self, state: usize, label: usize) -> Valuation<usize> {
        self.table.row(state, self.pstates[label]).clone()
    }
}

/// Whether the partition is stable for one-step behaviour: states in a block
/// must have identical quotient-projected rows at every label.
pub fn is_kernel_stable<R: LabelledRows>(rows: &R, partition: &Partition) -> bool {
    for block in partition.blocks() {
        let first = block[0];
        for &other in &block[1..] {
            for label in 0..rows.label_count() {
                let left = project(&rows.row(first, label), partition.projector())
                    .expect("states are covered");
                let right = project(&rows.row(other, label), partition.projector())
                    .expect("states are covered");
                if left != right {
                    return false;
                }
            }
        }
    }
    true
}

/// Classical kernel (strong) bisimilarity by partition refinement: split
/// blocks by quotient-projected one-step rows until stable. Works on plain
/// systems and saturated tables alike.
pub fn strong_kernel_bisim<R: LabelledRows>(rows: &R) -> Partition {
    let n = rows.state_count();
    if n == 0 {
        return Partition::from_classes(&[]);
    }
    let mut partition = Partition::one_block(n);
    loop {
        let mut seen: Vec<(usize, Vec<Valuation<usize>>)> = Vec::new();
        let mut next_classes = alloc::vec![0usize; n];
        for block in partition.blocks() {
            for &s in block {
                let signature: Vec<Valuation<usize>> = (0..rows.label_count())
                    .map(|l| project(&rows.row(s, l), partition.projector()).expect("covered"))
                    .collect();
                let found = seen
                    .iter()
                    .position(|(blk, sig)| *blk == partition.class_of(s) && *sig == signature);
                let class = match found {
                    Some(i) => i,
                    None => {
                        seen.push((partition.class_of(s), signature));
                        seen.len() - 1
                    }
                };
                next_classes[s] = class;
            }
        }
        let next = Partition::from_classes(&next_classes);
        if next == partition {
            return partition;
        }
        partition = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Kind;
    use crate::system::{intro_system, SystemBuilder};
    use alloc::vec;

    fn weak_of(sys: &WeightedSystem) -> PatternAutomaton {
        let tau = &sys.labels()[sys.tau().unwrap()];
        PatternAutomaton::weak(sys.labels(), tau).unwrap()
    }

    #[test]
    fn intro_discrete_partition_holds() {
        let sys = intro_system();
        let pattern = weak_of(&sys);
        let partition = Partition::discrete(2);
        let verdict = check_bisimulation(
            &sys,
            &pattern,
            &partition,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
        )
        .unwrap();
        assert!(verdict.holds);
        assert!(verdict.witness.is_none());
    }

    #[test]
    fn intro_merged_partition_fails_with_witness() {
        let sys = intro_system();
        let pattern = weak_of(&sys);
        let partition = Partition::one_block(2);
        let verdict = check_bisimulation(
            &sys,
            &pattern,
            &partition,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
        )
        .unwrap();
        assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        // x reaches the merged block along weak-a with weight 1, y with 0
        let wa = pattern.state_index("w_a").unwrap();
        assert_eq!(w.pattern_state, wa);
        assert_eq!(w.left_value, Value::one(Kind::Real));
        assert_eq!(w.right_value, Value::zero(Kind::Real));
    }

    #[test]
    fn brute_force_on_intro() {
        let sys = intro_system();
        let pattern = weak_of(&sys);
        let best = brute_force_largest(
            &sys,
            &pattern,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
            7,
        )
        .unwrap();
        assert_eq!(best, Partition::discrete(2));
        let refined = largest_bisimulation(
            &sys,
            &pattern,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
        )
        .unwrap();
        assert_eq!(refined, best);
    }

    #[test]
    fn single_state_system() {
        let mut b = SystemBuilder::new(Kind::Bool);
        b.state("s").unwrap();
        b.label("tau").unwrap();
        b.tau("tau").unwrap();
        let sys = b.finish();
        let pattern = weak_of(&sys);
        let best = largest_bisimulation(
            &sys,
            &pattern,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
        )
        .unwrap();
        assert_eq!(best, Partition::one_block(1));
        let brute = brute_force_largest(
            &sys,
            &pattern,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
            7,
        )
        .unwrap();
        assert_eq!(brute, best);
    }

    #[test]
    fn strong_kernel_splits_on_weights() {
        // a(1) vs a(2) over the naturals must split
        let mut b = SystemBuilder::new(Kind::Nat);
        for s in ["x", "y", "z"] {
            b.state(s).unwrap();
        }
        b.label("a").unwrap();
        b.transition("x", "a", Value::from_u64(Kind::Nat, 1), "z")
            .unwrap();
        b.transition("y", "a", Value::from_u64(Kind::Nat, 2), "z")
            .unwrap();
        let sys = b.finish();
        let partition = strong_kernel_bisim(&sys);
        assert!(!partition.same_block(0, 1));

        // identical rows end up together
        let mut b = SystemBuilder::new(Kind::Nat);
        for s in ["x", "y", "z"] {
            b.state(s).unwrap();
        }
        b.label("a").unwrap();
        b.transition("x", "a", Value::from_u64(Kind::Nat, 2), "z")
            .unwrap();
        b.transition("y", "a", Value::from_u64(Kind::Nat, 2), "z")
            .unwrap();
        let sys = b.finish();
        let partition = strong_kernel_bisim(&sys);
        assert!(partition.same_block(0, 1));
        assert!(!partition.same_block(0, 2));
    }

    #[test]
    fn refusal_on_inexact_solve() {
        let sys = intro_system();
        let pattern = weak_of(&sys);
        let opts = SolveOptions {
            strategy: crate::fixpoint::Strategy::Iterate,
            max_iter: 25,
            widen_after: None,
        };
        let err = check_bisimulation(
            &sys,
            &pattern,
            &Partition::discrete(2),
            Oplus::Join,
            &opts,
            CompareScope::ReachableClosure,
        )
        .unwrap_err();
        assert!(err.convergence_bound.is_some());
    }

    #[test]
    fn one_block_partitions_of_equal_states_hold() {
        // two tau-less states with the same a-loop weight are bisimilar
        let mut b = SystemBuilder::new(Kind::Real);
        b.state("x").unwrap();
        b.state("y").unwrap();
        b.label("a").unwrap();
        b.label("tau").unwrap();
        b.tau("tau").unwrap();
        b.transition("x", "a", Value::one(Kind::Real), "x").unwrap();
        b.transition("y", "a", Value::one(Kind::Real), "y").unwrap();
        let sys = b.finish();
        let pattern = weak_of(&sys);
        let best = largest_bisimulation(
            &sys,
            &pattern,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
        )
        .unwrap();
        assert_eq!(best, Partition::one_block(2));
        assert_eq!(
            brute_force_largest(
                &sys,
                &pattern,
                Oplus::Join,
                &SolveOptions::default(),
                CompareScope::ReachableClosure,
                7
            )
            .unwrap(),
            best
        );
    }

    #[test]
    fn brute_force_respects_state_cap() {
        let mut b = SystemBuilder::new(Kind::Bool);
        for i in 0..8 {
            b.state(&alloc::format!("s{i}")).unwrap();
        }
        b.label("tau").unwrap();
        b.tau("tau").unwrap();
        let sys = b.finish();
        let pattern = weak_of(&sys);
        let err = brute_force_largest(
            &sys,
            &pattern,
            Oplus::Join,
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
            7,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            BruteForceError::TooManyStates { states: 8, max: 7 }
        ));
        let _ = vec![0u8];
    }
}
