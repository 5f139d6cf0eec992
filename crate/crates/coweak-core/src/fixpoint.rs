//! Solvers for the recursive behaviour equation
//!
//! ```text
//! table(x, b) = (unit(h(x)) if ε ∈ b, else ⊥)  ⊕  Σ_{x --a(w)--> y} w · table(y, b/a)
//! ```
//!
//! whose least solution assigns every state and trace set the cumulative
//! behaviour observable along traces in that set. Three routes are provided:
//!
//! * [`solve_iterate`] — Kleene iteration from bottom, exact when an iterate
//!   repeats; over the naturals, entries still growing after a full window
//!   are widened to `∞` (a finite least-fixpoint entry of these homogeneous
//!   systems must stabilise within one iteration per unknown).
//! * [`solve_exact_linear`] — exact least solutions by star-semiring
//!   Gaussian elimination. With `⊕ = sum` the equation is linear. With
//!   `⊕ = join` the accepting entries are pinned to 1, the rest solved
//!   linearly, and the result verified by one application of the join
//!   functional; a verified solution is the least join fixpoint, otherwise
//!   the solver falls back to iteration.
//! * [`path_oracle`] — the depth-truncated sum over prefix-minimal paths, a
//!   monotone lower bound on every solver and the independent reference for
//!   all of them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::pattern::PatternAutomaton;
use crate::semiring::{Kind, Value};
use crate::system::{Partition, WeightedSystem};
use crate::valuation::{Valuation, ValuationError};

/// The continuous operation combining the base case with the extension term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oplus {
    Join,
    Sum,
}

impl Oplus {
    pub fn apply<K: Ord + Clone>(
        &self,
        a: &Valuation<K>,
        b: &Valuation<K>,
    ) -> Result<Valuation<K>, ValuationError> {
        match self {
            Oplus::Join => a.join(b),
            Oplus::Sum => a.sum(b),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Oplus::Join => "join",
            Oplus::Sum => "sum",
        }
    }

    /// Whether the operation commutes with Kleisli extension for this kind.
    /// Sum always does; join only over the (idempotent) boolean semiring.
    pub fn is_algebraic(&self, kind: Kind) -> bool {
        match self {
            Oplus::Sum => true,
            Oplus::Join => kind == Kind::Bool,
        }
    }
}

/// Solver selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Booleans iterate; weighted kinds use exact elimination.
    Auto,
    Iterate,
    ExactLinear,
}

/// Numeric knobs for the solvers.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub max_iter: usize,
    /// Iterations without a widening event before still-growing natural
    /// entries are declared divergent. Defaults to the unknown count.
    pub widen_after: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            strategy: Strategy::Auto,
            max_iter: 10_000,
            widen_after: None,
        }
    }
}

/// What the codomain keys of the solved table mean.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    /// Keys are blocks of the partition (the quotient projection).
    Quotient(&'a Partition),
    /// Keys are the states themselves (saturation).
    Identity,
    /// Keys assigned by an arbitrary map `state → key`.
    Map(&'a [usize], usize),
}

/// How the table was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveMeta {
    pub strategy_used: String,
    pub iterations: usize,
    /// Set only for exact results; verdicts must not be drawn otherwise.
    pub exact: bool,
    /// Why the exact-linear route handed over to iteration, if it did.
    pub fallback: Option<String>,
    /// For an inexact iterative stop: the max entry difference between the
    /// last two iterates, in float form for reporting only.
    pub convergence_bound: Option<f64>,
}

/// The solved behaviour map: one valuation over codomain keys per
/// (state, pattern state) pair.
#[derive(Debug, Clone)]
pub struct BehaviorTable {
    kind: Kind,
    oplus: Oplus,
    n_states: usize,
    n_pstates: usize,
    key_count: usize,
    rows: Vec<Valuation<usize>>,
    pub meta: SolveMeta,
}

impl BehaviorTable {
    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn oplus(&self) -> Oplus {
        self.oplus
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_pstates(&self) -> usize {
        self.n_pstates
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    /// The table entry for (state, pattern state).
    pub fn row(&self, state: usize, pstate: usize) -> &Valuation<usize> {
        &self.rows[state * self.n_pstates + pstate]
    }

    pub fn rows(&self) -> &[Valuation<usize>] {
        &self.rows
    }
}

/// The unfolded equation structure: one row per (state, pattern state), with
/// accumulated edge weights into other rows. Rows with `accepts[r]` get the
/// Dirac base at `base_key[r]`.
pub(crate) struct RowGraph {
    pub kind: Kind,
    pub n_states: usize,
    pub n_pstates: usize,
    pub key_count: usize,
    /// `edges[r] = [(r', w)]` sorted by target row, weights accumulated.
    pub edges: Vec<Vec<(usize, Value)>>,
    pub accepts: Vec<bool>,
    pub base_key: Vec<usize>,
}

impl RowGraph {
    pub fn build(sys: &WeightedSystem, pattern: &PatternAutomaton, target: Target<'_>) -> RowGraph {
        let n = sys.state_count();
        let nb = pattern.state_count();
        let (key_of, key_count): (Vec<usize>, usize) = match target {
            Target::Quotient(p) => ((0..n).map(|s| p.class_of(s)).collect(), p.block_count()),
            Target::Identity => ((0..n).collect(), n),
            Target::Map(map, count) => (map.to_vec(), count),
        };
        let mut edges = Vec::with_capacity(n * nb);
        let mut accepts = Vec::with_capacity(n * nb);
        let mut base_key = Vec::with_capacity(n * nb);
        for x in 0..n {
            for b in 0..nb {
                let mut acc: alloc::collections::BTreeMap<usize, Value> =
                    alloc::collections::BTreeMap::new();
                for (&(y, a), w) in sys.successors(x).iter() {
                    let row = y * nb + pattern.derivative(b, a);
                    match acc.get_mut(&row) {
                        Some(v) => *v = v.add(w).expect("system weights share a kind"),
                        None => {
                            acc.insert(row, w.clone());
                        }
                    }
                }
                edges.push(acc.into_iter().collect());
                accepts.push(pattern.accepts_empty(b));
                base_key.push(key_of[x]);
            }
        }
        RowGraph {
            kind: sys.kind(),
            n_states: n,
            n_pstates: nb,
            key_count,
            edges,
            accepts,
            base_key,
        }
    }

    fn row_count(&self) -> usize {
        self.edges.len()
    }

    /// One application of the equation functional to a table.
    fn step(&self, oplus: Oplus, rows: &[Valuation<usize>]) -> Vec<Valuation<usize>> {
        let mut out = Vec::with_capacity(rows.len());
        for r in 0..self.row_count() {
            let mut ext = Valuation::zero(self.kind);
            for (target, w) in &self.edges[r] {
                for (key, v) in rows[*target].iter() {
                    ext.add_at(*key, &w.mul(v).expect("same kind"))
                        .expect("same kind");
                }
            }
            let entry = if self.accepts[r] {
                let base = Valuation::unit(self.kind, self.base_key[r]);
                oplus.apply(&base, &ext).expect("same kind")
            } else {
                ext
            };
            out.push(entry);
        }
        out
    }
}

/// Applies one step of the equation functional; exact tables reproduce
/// themselves. Exposed for the fixpoint-residual checks.
pub fn step(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    target: Target<'_>,
    oplus: Oplus,
    table: &BehaviorTable,
) -> BehaviorTable {
    let graph = RowGraph::build(sys, pattern, target);
    let rows = graph.step(oplus, &table.rows);
    BehaviorTable {
        kind: graph.kind,
        oplus,
        n_states: graph.n_states,
        n_pstates: graph.n_pstates,
        key_count: graph.key_count,
        rows,
        meta: SolveMeta {
            strategy_used: String::from("step"),
            iterations: table.meta.iterations + 1,
            exact: false,
            fallback: None,
            convergence_bound: None,
        },
    }
}

/// The all-bottom table, the start of every Kleene iteration.
pub fn bottom_table(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    target: Target<'_>,
    oplus: Oplus,
) -> BehaviorTable {
    let graph = RowGraph::build(sys, pattern, target);
    BehaviorTable {
        kind: graph.kind,
        oplus,
        n_states: graph.n_states,
        n_pstates: graph.n_pstates,
        key_count: graph.key_count,
        rows: vec![Valuation::zero(graph.kind); graph.row_count()],
        meta: SolveMeta {
            strategy_used: String::from("bottom"),
            iterations: 0,
            exact: false,
            fallback: None,
            convergence_bound: None,
        },
    }
}

fn iterate_rows(
    graph: &RowGraph,
    oplus: Oplus,
    max_iter: usize,
    widen_after: Option<usize>,
) -> (Vec<Valuation<usize>>, SolveMeta) {
    let unknowns = graph.row_count() * graph.key_count.max(1);
    let window = widen_after.unwrap_or(unknowns).max(1);
    let mut rows = vec![Valuation::zero(graph.kind); graph.row_count()];
    let mut widened: Vec<(usize, usize)> = Vec::new();
    let mut last_event = 0usize;
    let infinity = Value::infinity(graph.kind);

    for it in 1..=max_iter {
        let mut next = graph.step(oplus, &rows);
        for &(r, key) in &widened {
            next[r]
                .set(key, infinity.clone().expect("widening only over nat"))
                .expect("same kind");
        }
        // Over the naturals an entry of these homogeneous systems either
        // stabilises within one iteration per unknown or grows without
        // bound, so growth past a full quiet window means divergence.
        if graph.kind == Kind::Nat && it.saturating_sub(last_event) > window {
            let mut grew = Vec::new();
            for r in 0..next.len() {
                for (key, v) in next[r].iter() {
                    let old = rows[r].get(key);
                    if !v.is_infinite() && old.leq(v).unwrap() && old != *v {
                        grew.push((r, *key));
                    }
                }
            }
            if !grew.is_empty() {
                for &(r, key) in &grew {
                    next[r]
                        .set(key, infinity.clone().expect("nat has infinity"))
                        .expect("same kind");
                }
                widened.extend(grew);
                last_event = it;
            }
        }
        if next == rows {
            return (
                rows,
                SolveMeta {
                    strategy_used: String::from(if widened.is_empty() {
                        "iterate"
                    } else {
                        "iterate+widen"
                    }),
                    iterations: it,
                    exact: true,
                    fallback: None,
                    convergence_bound: None,
                },
            );
        }
        rows = next;
    }

    let next = graph.step(oplus, &rows);
    let mut bound = 0.0f64;
    for r in 0..rows.len() {
        for (key, v) in next[r].iter() {
            let delta = v.to_f64() - rows[r].get(key).to_f64();
            if delta > bound {
                bound = delta;
            }
        }
    }
    (
        rows,
        SolveMeta {
            strategy_used: String::from("iterate"),
            iterations: max_iter,
            exact: false,
            fallback: None,
            convergence_bound: Some(bound),
        },
    )
}

/// Star-semiring Gauss–Jordan elimination for `U = A·U + K` with one column
/// of `K` per codomain key; diagonal pivots are absorbed through `star`.
/// Returns the least solution in place of `k`.
fn star_eliminate(a: &mut [Vec<Value>], k: &mut [Vec<Value>], kind: Kind) {
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
            for col in k[i].iter_mut() {
                if !col.is_zero() {
                    *col = s.mul(col).expect("same kind");
                }
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
            for col in 0..k[l].len() {
                if !k[i][col].is_zero() {
                    let add = c.mul(&k[i][col]).expect("same kind");
                    k[l][col] = k[l][col].add(&add).expect("same kind");
                }
            }
        }
    }
}

fn rows_from_dense(graph: &RowGraph, dense: Vec<Vec<Value>>) -> Vec<Valuation<usize>> {
    dense
        .into_iter()
        .map(|row| {
            let mut v = Valuation::zero(graph.kind);
            for (key, value) in row.into_iter().enumerate() {
                v.set(key, value).expect("same kind");
            }
            v
        })
        .collect()
}

/// Least solution with `⊕ = sum`: one linear elimination with a right-hand
/// column per key.
fn solve_sum_linear(graph: &RowGraph) -> Vec<Valuation<usize>> {
    let n = graph.row_count();
    let zero = Value::zero(graph.kind);
    let one = Value::one(graph.kind);
    let mut a = vec![vec![zero.clone(); n]; n];
    for (r, edges) in graph.edges.iter().enumerate() {
        for (target, w) in edges {
            a[r][*target] = w.clone();
        }
    }
    let mut k = vec![vec![zero; graph.key_count]; n];
    for r in 0..n {
        if graph.accepts[r] {
            k[r][graph.base_key[r]] = one.clone();
        }
    }
    star_eliminate(&mut a, &mut k, graph.kind);
    rows_from_dense(graph, k)
}

/// Least solution with `⊕ = join`, per key: pin the accepting entries of the
/// key's class to 1, solve the remaining linear system, then check that the
/// join functional reproduces the pinned entries. Any solution passing the
/// check is below every join fixpoint and above the Kleene iterates, hence
/// the least one. Returns `None` if some pinned entry fails verification.
fn solve_join_exact(graph: &RowGraph) -> Option<Vec<Valuation<usize>>> {
    let n = graph.row_count();
    let zero = Value::zero(graph.kind);
    let one = Value::one(graph.kind);
    let mut per_key: Vec<Vec<Value>> = Vec::with_capacity(graph.key_count);

    for key in 0..graph.key_count {
        let pinned: Vec<bool> = (0..n)
            .map(|r| graph.accepts[r] && graph.base_key[r] == key)
            .collect();
        let free: Vec<usize> = (0..n).filter(|&r| !pinned[r]).collect();
        let index_of: alloc::collections::BTreeMap<usize, usize> =
            free.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let m = free.len();
        let mut a = vec![vec![zero.clone(); m]; m];
        let mut k = vec![vec![zero.clone()]; m];
        for (i, &r) in free.iter().enumerate() {
            for (target, w) in &graph.edges[r] {
                if pinned[*target] {
                    k[i][0] = k[i][0].add(w).expect("same kind");
                } else {
                    let j = index_of[target];
                    a[i][j] = a[i][j].add(w).expect("same kind");
                }
            }
        }
        star_eliminate(&mut a, &mut k, graph.kind);
        let mut full = vec![zero.clone(); n];
        for (i, &r) in free.iter().enumerate() {
            full[r] = k[i][0].clone();
        }
        for r in 0..n {
            if pinned[r] {
                full[r] = one.clone();
            }
        }
        // join consistency: at pinned rows the extension term must stay ≤ 1
        for r in 0..n {
            if !pinned[r] {
                continue;
            }
            let mut ext = zero.clone();
            for (target, w) in &graph.edges[r] {
                ext = ext
                    .add(&w.mul(&full[*target]).expect("same kind"))
                    .expect("same kind");
            }
            if !ext.leq(&one).expect("same kind") {
                return None;
            }
        }
        per_key.push(full);
    }

    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let mut v = Valuation::zero(graph.kind);
        for (key, column) in per_key.iter().enumerate() {
            v.set(key, column[r].clone()).expect("same kind");
        }
        rows.push(v);
    }
    Some(rows)
}

fn finish(
    graph: RowGraph,
    oplus: Oplus,
    rows: Vec<Valuation<usize>>,
    meta: SolveMeta,
) -> BehaviorTable {
    BehaviorTable {
        kind: graph.kind,
        oplus,
        n_states: graph.n_states,
        n_pstates: graph.n_pstates,
        key_count: graph.key_count,
        rows,
        meta,
    }
}

/// Kleene iteration from bottom. Exact when an iterate repeats; over the
/// naturals still-growing entries are widened to `∞` after a quiet window.
/// Runs out of `max_iter` with an explicit inexactness flag, never silently.
pub fn solve_iterate(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    target: Target<'_>,
    oplus: Oplus,
    options: &SolveOptions,
) -> BehaviorTable {
    let graph = RowGraph::build(sys, pattern, target);
    let (rows, meta) = iterate_rows(&graph, oplus, options.max_iter, options.widen_after);
    finish(graph, oplus, rows, meta)
}

/// Exact least solution by star-semiring elimination; see the module doc for
/// the join strategy. Falls back to iteration (with widening) when the join
/// verification fails, recording the fallback in the metadata.
pub fn solve_exact_linear(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    target: Target<'_>,
    oplus: Oplus,
    options: &SolveOptions,
) -> BehaviorTable {
    let graph = RowGraph::build(sys, pattern, target);
    match oplus {
        Oplus::Sum => {
            let rows = solve_sum_linear(&graph);
            let meta = SolveMeta {
                strategy_used: String::from("exact-linear"),
                iterations: 0,
                exact: true,
                fallback: None,
                convergence_bound: None,
            };
            finish(graph, oplus, rows, meta)
        }
        Oplus::Join => match solve_join_exact(&graph) {
            Some(rows) => {
                let meta = SolveMeta {
                    strategy_used: String::from("exact-linear"),
                    iterations: 0,
                    exact: true,
                    fallback: None,
                    convergence_bound: None,
                };
                finish(graph, oplus, rows, meta)
            }
            None => {
                let (rows, mut meta) =
                    iterate_rows(&graph, oplus, options.max_iter, options.widen_after);
                meta.fallback = Some(String::from("join consistency failed, solved by iteration"));
                finish(graph, oplus, rows, meta)
            }
        },
    }
}

/// Solves with the configured strategy: booleans iterate (exactly), weighted
/// kinds eliminate.
pub fn solve(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    target: Target<'_>,
    oplus: Oplus,
    options: &SolveOptions,
) -> BehaviorTable {
    match options.strategy {
        Strategy::Iterate => solve_iterate(sys, pattern, target, oplus, options),
        Strategy::ExactLinear => solve_exact_linear(sys, pattern, target, oplus, options),
        Strategy::Auto => {
            if sys.kind() == Kind::Bool {
                solve_iterate(sys, pattern, target, oplus, options)
            } else {
                solve_exact_linear(sys, pattern, target, oplus, options)
            }
        }
    }
}

/// The behaviour map with the identity target: the saturated system, whose
/// `b`-labelled transitions are the cumulative weak transitions of the
/// original.
pub fn saturate(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    oplus: Oplus,
    options: &SolveOptions,
) -> BehaviorTable {
    solve(sys, pattern, Target::Identity, oplus, options)
}

/// Truncated total weights: depth-bounded sums over prefix-minimal paths.
///
/// Entry `(x, b, key)` accumulates, over paths from `x` of length ≤ `depth`
/// whose trace lies in `b`, whose endpoint maps to `key`, and none of whose
/// proper prefixes already qualify for `key`, the product of the transition
/// weights. Depth 0 yields the base-only table. Monotone in `depth` and a
/// lower bound for every exact solver.
pub fn path_oracle(
    sys: &WeightedSystem,
    pattern: &PatternAutomaton,
    target: Target<'_>,
    depth: usize,
) -> BehaviorTable {
    let graph = RowGraph::build(sys, pattern, target);
    let base: Vec<Valuation<usize>> = (0..graph.row_count())
        .map(|r| {
            if graph.accepts[r] {
                Valuation::unit(graph.kind, graph.base_key[r])
            } else {
                Valuation::zero(graph.kind)
            }
        })
        .collect();
    let mut rows = base;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(rows.len());
        for r in 0..graph.row_count() {
            let mut v = Valuation::zero(graph.kind);
            for (target_row, w) in &graph.edges[r] {
                for (key, value) in rows[*target_row].iter() {
                    v.add_at(*key, &w.mul(value).expect("same kind"))
                        .expect("same kind");
                }
            }
            // a path that already qualifies for this key stops here
            if graph.accepts[r] {
                v.set(graph.base_key[r], Value::one(graph.kind))
                    .expect("same kind");
            }
            next.push(v);
        }
        rows = next;
    }
    finish(
        graph,
        Oplus::Join,
        rows,
        SolveMeta {
            strategy_used: format!("path-oracle(depth={depth})"),
            iterations: depth,
            exact: false,
            fallback: None,
            convergence_bound: None,
        },
    )
}
