//! The two reductions of pattern bisimulation to kernel bisimulation.
//!
//! When the combining operation is algebraic (sum always, join over the
//! booleans), the saturated system — whose transitions at pattern state `b`
//! are the solved `b`-behaviours — has the same kernel bisimulations as the
//! original has pattern bisimulations. That is Milner's weak-transition
//! construction in the general setting; [`check_saturation_reduction`] validates an
//! instance.
//!
//! When join is not algebraic (the weighted kinds), the same reduction works
//! after embedding valuations into the continuation space: a valuation `p`
//! becomes the linear evaluation `c ↦ Σ_k p(k)·c(k)` on test functions, and
//! the combining operation becomes the pointwise join, which is algebraic
//! there. The embedded behaviour map is solved per test function as a scalar
//! least fixpoint; equality is decided on the class-indicator test
//! functions, which determine the embedded values. [`check_semi_strong`]
//! validates an instance.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bisim::{
    check_bisimulation, is_kernel_stable, largest_bisimulation, strong_kernel_bisim, CompareScope,
    InexactSolve, SaturatedRows,
};
use crate::fixpoint::{saturate, Oplus, RowGraph, SolveOptions, Target};
use crate::pattern::PatternAutomaton;
use crate::semiring::{Kind, Value};
use crate::system::{Partition, WeightedSystem};
use crate::valuation::Valuation;

/// A point of the continuation space in the image of the embedding,
/// represented by its underlying valuation. Its evaluation on a test
/// function is the weighted sum below; two elements are equal iff their
/// carriers are, since the singleton-indicator evaluations recover the
/// carrier pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuationElement<K: Ord + Clone> {
    carrier: Valuation<K>,
}

/// `κ(p) = c ↦ Σ_k p(k)·c(k)`.
pub fn embed<K: Ord + Clone>(p: &Valuation<K>) -> ContinuationElement<K> {
    ContinuationElement { carrier: p.clone() }
}

impl<K: Ord + Clone> ContinuationElement<K> {
    pub fn carrier(&self) -> &Valuation<K> {
        &self.carrier
    }

    /// Evaluates on a test function defined over the support.
    pub fn ev(&self, mut test: impl FnMut(&K) -> Value) -> Value {
        let mut acc = Value::zero(self.carrier.kind());
        for (k, w) in self.carrier.iter() {
            acc = acc
                .add(&w.mul(&test(k)).expect("same kind"))
                .expect("same kind");
        }
        acc
    }
}

/// Report from a saturation-reduction check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedReport {
    /// Pattern-bisimulation verdict on the original system.
    pub bisim_holds: bool,
    /// Kernel-stability verdict on the saturated system.
    pub kernel_holds: bool,
    pub agree: bool,
    /// Whether refinement on the original equals kernel refinement on the
    /// saturated system.
    pub largest_agrees: bool,
}

/// Why a reduction check refused to run.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformError {
    /// Join is not algebraic over this kind; the saturation reduction does
    /// not apply and the check refuses rather than report nonsense.
    NotAlgebraic {
        kind: Kind,
        oplus: &'static str,
    },
    WrongKind {
        expected: &'static str,
        got: Kind,
    },
    Inexact(InexactSolve),
}

impl core::fmt::Display for TransformError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TransformError::NotAlgebraic { kind, oplus } => write!(
                f,
                "`{oplus}` is not algebraic over the {kind} semiring; saturation reduction refused"
            ),
            TransformError::WrongKind { expected, got } => {
                write!(
                    f,
                    "continuation reduction expects a {expected} system, got {got}"
                )
            }
            TransformError::Inexact(e) => write!(f, "{e}"),
        }
    }
}
impl core::error::Error for TransformError {}

/// Validates one instance of the saturation reduction: the partition is a
/// pattern bisimulation iff it is kernel-stable on the saturated system, and
/// refinement on both sides lands on the same partition. Requires an
/// algebraic combining operation.
pub fn check_saturation_reduction(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    oplus: Oplus,
    partition: &Partition,
    options: &SolveOptions,
    scope: CompareScope,
) -> Result<RedReport, TransformError> {
    if !oplus.is_algebraic(sys.kind()) {
        return Err(TransformError::NotAlgebraic {
            kind: sys.kind(),
            oplus: oplus.name(),
        });
    }
    let bisim = check_bisimulation(sys, pattern, partition, oplus, options, scope)
        .map_err(TransformError::Inexact)?;
    let saturated = saturate(sys, pattern, oplus, options);
    if !saturated.meta.exact {
        return Err(TransformError::Inexact(InexactSolve {
            strategy: saturated.meta.strategy_used.clone(),
            convergence_bound: saturated.meta.convergence_bound,
        }));
    }
    let rows = SaturatedRows::new(&saturated, pattern, scope);
    let kernel_holds = is_kernel_stable(&rows, partition);

    let largest = largest_bisimulation(sys, pattern, oplus, options, scope)
        .map_err(TransformError::Inexact)?;
    let kernel_largest = strong_kernel_bisim(&rows);
    Ok(RedReport {
        bisim_holds: bisim.holds,
        kernel_holds,
        agree: bisim.holds == kernel_holds,
        largest_agrees: largest == kernel_largest,
    })
}

/// Report from a continuation-reduction check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiStrongReport {
    pub bisim_holds: bool,
    /// Kernel verdict on the continuation-embedded saturated system,
    /// decided on class-indicator test functions.
    pub kernel_holds: bool,
    pub agree: bool,
}

/// Scalar least fixpoint of `u = k ⊔ A·u` with `k` the 0/1 vector of
/// `pinned`: pin, eliminate, verify; on verification failure fall back to
/// scalar Kleene iteration with the same widening policy as the table
/// solver. Returns `None` when iteration fails to stabilise exactly.
fn scalar_join_lfp(
    kind: Kind,
    edges: &[Vec<(usize, Value)>],
    pinned: &[bool],
    options: &SolveOptions,
) -> Option<Vec<Value>> {
    let n = edges.len();
    let zero = Value::zero(kind);
    let one = Value::one(kind);
    let free: Vec<usize> = (0..n).filter(|&r| !pinned[r]).collect();
    let index_of: alloc::collections::BTreeMap<usize, usize> =
        free.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut a = vec![vec![zero.clone(); free.len()]; free.len()];
    let mut k = vec![vec![zero.clone()]; free.len()];
    for (i, &r) in free.iter().enumerate() {
        for (t, w) in &edges[r] {
            if pinned[*t] {
                k[i][0] = k[i][0].add(w).expect("same kind");
            } else {
                let j = index_of[t];
                a[i][j] = a[i][j].add(w).expect("same kind");
            }
        }
    }
    scalar_star_eliminate(&mut a, &mut k, kind);
    let mut full = vec![zero.clone(); n];
    for (i, &r) in free.iter().enumerate() {
        full[r] = k[i][0].clone();
    }
    for r in 0..n {
        if pinned[r] {
            full[r] = one.clone();
        }
    }
    let consistent = (0..n).filter(|&r| pinned[r]).all(|r| {
        let mut ext = zero.clone();
        for (t, w) in &edges[r] {
            ext = ext
                .add(&w.mul(&full[*t]).expect("same kind"))
                .expect("same kind");
        }
        ext.leq(&one).expect("same kind")
    });
    if consistent {
        return Some(full);
    }
    scalar_join_iterate(kind, edges, pinned, options)
}

fn scalar_star_eliminate(a: &mut [Vec<Value>], k: &mut [Vec<Value>], kind: Kind) {
    let n = a.len();
    let zero = Value::zero(kind);
    for i in 0..n {
        let s = a[i][i].star();
        if !s.is_one() {
            for j in 0..n {
                if j != i && !a[i][j].is_zero() {
                    a[i][j] = s.mul(&a[i][j]).expect("same kind");
                }
            }
            if !k[i][0].is_zero() {
                k[i][0] = s.mul(&k[i][0]).expect("same kind");
            }
        }
        a[i][i] = zero.clone();
        for l in 0..n {
            if l == i || a[l][i].is_zero() {
                continue;
            }
            let c = core::mem::replace(&mut a[l][i], zero.clone());
            for j in 0..n {
                if !a[i][j].is_zero() {
                    let add = c.mul(&a[i][j]).expect("same kind");
                    a[l][j] = a[l][j].add(&add).expect("same kind");
                }
            }
            if !k[i][0].is_zero() {
                let add = c.mul(&k[i][0]).expect("same kind");
                k[l][0] = k[l][0].add(&add).expect("same kind");
            }
        }
    }
}

fn scalar_join_iterate(
    kind: Kind,
    edges: &[Vec<(usize, Value)>],
    pinned: &[bool],
    options: &SolveOptions,
) -> Option<Vec<Value>> {
    let n = edges.len();
    let window = options.widen_after.unwrap_or(n).max(1);
    let zero = Value::zero(kind);
    let one = Value::one(kind);
    let mut values = vec![zero.clone(); n];
    let mut widened = vec![false; n];
    let mut last_event = 0usize;
    for it in 1..=options.max_iter {
        let mut next = vec![zero.clone(); n];
        for r in 0..n {
            let mut ext = zero.clone();
            for (t, w) in &edges[r] {
                ext = ext
                    .add(&w.mul(&values[*t]).expect("same kind"))
                    .expect("same kind");
            }
            next[r] = if pinned[r] {
                one.sup(&ext).expect("same kind")
            } else {
                ext
            };
            if widened[r] {
                next[r] = Value::infinity(kind)?;
            }
        }
        if kind == Kind::Nat && it.saturating_sub(last_event) > window {
            let mut grew = false;
            for r in 0..n {
                if !next[r].is_infinite() && values[r] != next[r] {
                    widened[r] = true;
                    next[r] = Value::infinity(kind)?;
                    grew = true;
                }
            }
            if grew {
                last_event = it;
            }
        }
        if next == values {
            return Some(values);
        }
        values = next;
    }
    None
}

/// Validates one instance of the continuation reduction on a weighted
/// system with join: the partition is a join pattern bisimulation iff the
/// embedded saturated behaviour map does not distinguish block members on
/// any class-indicator test function.
pub fn check_semi_strong(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    partition: &Partition,
    options: &SolveOptions,
    scope: CompareScope,
) -> Result<SemiStrongReport, TransformError> {
    if sys.kind() == Kind::Bool {
        return Err(TransformError::WrongKind {
            expected: "weighted (nat or real)",
            got: sys.kind(),
        });
    }
    let bisim = check_bisimulation(sys, pattern, partition, Oplus::Join, options, scope)
        .map_err(TransformError::Inexact)?;

    // The embedded side: one scalar fixpoint per class indicator. The
    // embedding enters through the evaluation of κ(f(x)) on the row-valued
    // test function, which is exactly the weighted edge sum below.
    let graph = RowGraph::build(sys, pattern, Target::Quotient(partition));
    let compared: Vec<usize> = match scope {
        CompareScope::ReachableClosure => pattern.reachable_from_observables(),
        CompareScope::ObservablesOnly => pattern.observables().to_vec(),
    };
    let n_pstates = pattern.state_count();
    let mut evaluations: Vec<Vec<Value>> = Vec::with_capacity(partition.block_count());
    for class in 0..partition.block_count() {
        let pinned: Vec<bool> = (0..graph.edges.len())
            .map(|r| graph.accepts[r] && graph.base_key[r] == class)
            .collect();
        let values = scalar_join_lfp(sys.kind(), &graph.edges, &pinned, options).ok_or(
            TransformError::Inexact(InexactSolve {
                strategy: String::from("continuation-scalar"),
                convergence_bound: None,
            }),
        )?;
        evaluations.push(values);
    }
    let mut kernel_holds = true;
    'outer: for block in partition.blocks() {
        let first = block[0];
        for &other in &block[1..] {
            for &b in &compared {
                for values in &evaluations {
                    if values[first * n_pstates + b] != values[other * n_pstates + b] {
                        kernel_holds = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(SemiStrongReport {
        bisim_holds: bisim.holds,
        kernel_holds,
        agree: bisim.holds == kernel_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{intro_system, triangle_system, SystemBuilder};
    use crate::valuation::from_pairs;

    fn q(n: i64, d: i64) -> Value {
        Value::rational(n, d).unwrap()
    }

    #[test]
    fn embed_evaluations() {
        let dirac: Valuation<&str> = Valuation::unit(Kind::Real, "x");
        let e = embed(&dirac);
        assert_eq!(
            e.ev(|k| if *k == "x" {
                Value::one(Kind::Real)
            } else {
                Value::zero(Kind::Real)
            }),
            Value::one(Kind::Real)
        );
        let half = from_pairs(Kind::Real, [("x", q(1, 2)), ("y", q(1, 2))]).unwrap();
        assert_eq!(
            embed(&half).ev(|_| Value::one(Kind::Real)),
            Value::one(Kind::Real)
        );
    }

    #[test]
    fn embedding_is_injective_on_carriers() {
        let a = from_pairs(Kind::Real, [("x", q(1, 2))]).unwrap();
        let b = from_pairs(Kind::Real, [("x", q(1, 3))]).unwrap();
        assert_ne!(embed(&a), embed(&b));
        assert_eq!(embed(&a), embed(&a.clone()));
        // singleton indicators recover the carrier
        assert_eq!(
            embed(&a).ev(|k| if *k == "x" {
                Value::one(Kind::Real)
            } else {
                Value::zero(Kind::Real)
            }),
            q(1, 2)
        );
    }

    #[test]
    fn red_guard_refuses_nonalgebraic_join() {
        let sys = intro_system();
        let pattern = PatternAutomaton::weak(sys.labels(), "tau").unwrap();
        let err = check_saturation_reduction(
            &sys,
            &pattern,
            Oplus::Join,
            &Partition::discrete(2),
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
        )
        .unwrap_err();
        assert!(matches!(err, TransformError::NotAlgebraic { .. }));
    }

    #[test]
    fn red_holds_on_boolean_join() {
        let mut b = SystemBuilder::new(Kind::Bool);
        for s in ["x", "y", "z"] {
            b.state(s).unwrap();
        }
        b.label("a").unwrap();
        b.label("tau").unwrap();
        b.tau("tau").unwrap();
        b.transition("x", "tau", Value::Bool(true), "y").unwrap();
        b.transition("y", "a", Value::Bool(true), "z").unwrap();
        let sys = b.finish();
        let pattern = PatternAutomaton::weak(sys.labels(), "tau").unwrap();
        for partition in crate::system::all_partitions(3) {
            let report = check_saturation_reduction(
                &sys,
                &pattern,
                Oplus::Join,
                &partition,
                &SolveOptions::default(),
                CompareScope::ReachableClosure,
            )
            .unwrap();
            assert!(report.agree);
            assert!(report.largest_agrees);
        }
    }

    #[test]
    fn semi_strong_on_intro_system() {
        let sys = intro_system();
        let pattern = PatternAutomaton::weak(sys.labels(), "tau").unwrap();
        for partition in crate::system::all_partitions(2) {
            let report = check_semi_strong(
                &sys,
                &pattern,
                &partition,
                &SolveOptions::default(),
                CompareScope::ReachableClosure,
            )
            .unwrap();
            assert!(report.agree, "verdicts diverge on {partition:?}");
        }
    }

    #[test]
    fn semi_strong_on_triangle() {
        let sys = triangle_system();
        let pattern = PatternAutomaton::delay(sys.labels(), "tau").unwrap();
        for partition in crate::system::all_partitions(3) {
            let report = check_semi_strong(
                &sys,
                &pattern,
                &partition,
                &SolveOptions::default(),
                CompareScope::ReachableClosure,
            )
            .unwrap();
            assert!(report.agree, "verdicts diverge on {partition:?}");
        }
    }

    #[test]
    fn semi_strong_discrete_always_holds() {
        let sys = intro_system();
        let pattern = PatternAutomaton::weak(sys.labels(), "tau").unwrap();
        let report = check_semi_strong(
            &sys,
            &pattern,
            &Partition::discrete(2),
            &SolveOptions::default(),
            CompareScope::ReachableClosure,
        )
        .unwrap();
        assert!(report.bisim_holds && report.kernel_holds);
    }
}
