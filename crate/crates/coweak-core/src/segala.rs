//! Simple Segala systems: nondeterministic choices among label-tagged
//! probability distributions, their translation into convex sets of
//! valuations, and weak probabilistic bisimulation.
//!
//! Convex sets are carried by finite generator lists. Two membership
//! notions exist side by side: exact subconvex membership (`Σ λᵢ ≤ 1`,
//! zero always inside) for combined steps, and the down-closed variant
//! (`point ≤ Σ λᵢ·gᵢ` pointwise) under which the sets form a monad —
//! sub-behaviours obtained by dropping part of a branch stay inside. Both
//! are decided by exact rational linear-programming feasibility and agree
//! on full-mass points, which is all a weak-matching query ever asks, so
//! every verdict in this module is exact. The weak transition sets are
//! computed by iterating their defining recursion on class-projected
//! polytopes; the iteration may not stabilise in general, so results carry
//! an explicit stabilisation flag and verdicts are only drawn from
//! stabilised polytopes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::pattern::PatternAutomaton;
use crate::semiring::{Extended, Kind, Value};
use crate::system::Partition;
use crate::valuation::{project, Valuation};

/// Whether combination coefficients must sum to one or may sum below one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    /// `Σ λᵢ = 1`: ordinary convex combination (combined steps).
    Convex,
    /// `Σ λᵢ ≤ 1`: subconvex combination (the convex-set monad).
    SubConvex,
}

fn rational_of(v: &Value) -> BigRational {
    match v {
        Value::Real(Extended::Finite(q)) => q.clone(),
        _ => panic!("segala operations require finite rational weights"),
    }
}

/// Exact feasibility of `∃ λ ≥ 0. Σ λᵢ·gᵢ = point` with the mass constraint
/// of `mode`, by phase-one simplex over the rationals with Bland's rule.
pub fn hull_membership(
    point: &Valuation<usize>,
    generators: &[Valuation<usize>],
    mode: Combination,
) -> bool {
    membership(point, generators, mode, false)
}

/// Down-closed membership: `∃ λ ≥ 0, Σλ ≤ 1. point ≤ Σ λᵢ·gᵢ` pointwise.
/// This is the membership notion of the convex-set monad, whose elements
/// are closed under pointwise domination; on full-mass points it coincides
/// with exact subconvex membership.
pub fn dominated_membership(point: &Valuation<usize>, generators: &[Valuation<usize>]) -> bool {
    membership(point, generators, Combination::SubConvex, true)
}

fn membership(
    point: &Valuation<usize>,
    generators: &[Valuation<usize>],
    mode: Combination,
    dominated: bool,
) -> bool {
    // Collect the key dimensions touched by either side.
    let mut keys: Vec<usize> = point.support().copied().collect();
    for g in generators {
        keys.extend(g.support().copied());
    }
    keys.sort_unstable();
    keys.dedup();

    let n_rows = keys.len() + 1; // one (in)equality per key, plus the mass row
    let mut columns: Vec<Vec<BigRational>> = Vec::new();
    for g in generators {
        let mut col: Vec<BigRational> = keys.iter().map(|k| rational_of(&g.get(k))).collect();
        col.push(BigRational::one()); // mass row coefficient
        columns.push(col);
    }
    if mode == Combination::SubConvex {
        let mut slack = vec![BigRational::zero(); keys.len()];
        slack.push(BigRational::one());
        columns.push(slack);
    }
    if dominated {
        // surplus variables turn Σλg ≥ p into equalities
        for (i, _) in keys.iter().enumerate() {
            let mut surplus = vec![BigRational::zero(); n_rows];
            surplus[i] = -BigRational::one();
            columns.push(surplus);
        }
    }
    let mut rhs: Vec<BigRational> = keys.iter().map(|k| rational_of(&point.get(k))).collect();
    rhs.push(BigRational::one());

    simplex_feasible(&columns, &rhs, n_rows)
}

/// Phase-one simplex: is `Ax = b, x ≥ 0` feasible? `b ≥ 0` is assumed
/// (weights are nonnegative here). Artificial variables start basic;
/// feasibility holds iff their sum can be driven to zero.
fn simplex_feasible(columns: &[Vec<BigRational>], rhs: &[BigRational], n_rows: usize) -> bool {
    let n_structural = columns.len();
    let n_cols = n_structural + n_rows;
    // tableau[i] = row of structural then artificial coefficients, then rhs
    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(n_rows);
    for i in 0..n_rows {
        let mut row: Vec<BigRational> = Vec::with_capacity(n_cols + 1);
        for col in columns {
            row.push(col[i].clone());
        }
        for j in 0..n_rows {
            row.push(if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        row.push(rhs[i].clone());
        tableau.push(row);
    }
    let mut basis: Vec<usize> = (n_structural..n_cols).collect();
    // reduced costs for the artificial-sum objective: r_j = -Σ_i A_ij on
    // structural columns, 0 on the artificial basis
    let mut reduced: Vec<BigRational> = (0..n_cols)
        .map(|j| {
            if j < n_structural {
                -tableau
                    .iter()
                    .map(|row| row[j].clone())
                    .sum::<BigRational>()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let mut objective: BigRational = -rhs.iter().cloned().sum::<BigRational>();

    loop {
        // Bland: smallest column with negative reduced cost
        let Some(entering) = (0..n_cols).find(|&j| reduced[j] < BigRational::zero()) else {
            break;
        };
        // ratio test, ties broken by smallest basis variable
        let mut leaving: Option<(usize, BigRational)> = None;
        for i in 0..n_rows {
            let a = &tableau[i][entering];
            if *a > BigRational::zero() {
                let ratio = &tableau[i][n_cols] / a;
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let (pivot_row, _) = leaving.expect("phase-one objective is bounded below");
        // pivot
        let pivot = tableau[pivot_row][entering].clone();
        for v in tableau[pivot_row].iter_mut() {
            *v = &*v / &pivot;
        }
        for i in 0..n_rows {
            if i != pivot_row && !tableau[i][entering].is_zero() {
                let factor = tableau[i][entering].clone();
                for j in 0..=n_cols {
                    let delta = &factor * &tableau[pivot_row][j];
                    tableau[i][j] = &tableau[i][j] - delta;
                }
            }
        }
        if !reduced[entering].is_zero() {
            let factor = reduced[entering].clone();
            for j in 0..n_cols {
                let delta = &factor * &tableau[pivot_row][j];
                reduced[j] = &reduced[j] - delta;
            }
            objective = &objective - &factor * &tableau[pivot_row][n_cols];
        }
        basis[pivot_row] = entering;
    }
    objective.is_zero()
}

/// A finitely generated convex set of rational valuations, read down-closed:
/// the hull is everything pointwise below some `Σ λᵢ·gᵢ` with
/// `λ ≥ 0, Σλ ≤ 1`. The zero valuation is implicit and never stored, and no
/// stored generator lies in the hull of the others, so equal hulls have
/// equal generator lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    generators: Vec<Valuation<usize>>,
}

impl Polytope {
    /// The bottom element: just the zero valuation.
    pub fn bottom() -> Polytope {
        Polytope {
            generators: Vec::new(),
        }
    }

    pub fn from_generators(generators: Vec<Valuation<usize>>) -> Polytope {
        // incremental insertion keeps every membership query small: each
        // candidate is tested against the extreme points kept so far
        let mut candidates = generators;
        candidates.retain(|g| !g.is_zero());
        candidates.sort();
        candidates.dedup();
        let mut kept: Vec<Valuation<usize>> = Vec::new();
        for g in candidates {
            if !dominated_membership(&g, &kept) {
                kept.push(g);
            }
        }
        let mut p = Polytope { generators: kept };
        p.prune();
        p
    }

    pub fn generators(&self) -> &[Valuation<usize>] {
        &self.generators
    }

    /// Membership in the down-closed subconvex hull for `SubConvex`, exact
    /// convex-combination membership for `Convex`. Full-mass points cannot
    /// exploit the down-closure, so weak-matching queries are exact either
    /// way.
    pub fn contains(&self, point: &Valuation<usize>, mode: Combination) -> bool {
        match mode {
            Combination::SubConvex => {
                point.is_zero() || dominated_membership(point, &self.generators)
            }
            Combination::Convex => hull_membership(point, &self.generators, mode),
        }
    }

    /// Drops zero generators, duplicates, and generators inside the hull of
    /// the rest; sorts for canonical form. The survivors are exactly the
    /// extreme points, the unique minimal generating set.
    pub fn prune(&mut self) {
        self.generators.retain(|g| !g.is_zero());
        self.generators.sort();
        self.generators.dedup();
        let mut changed = true;
        while changed {
            changed = false;
            let mut i = 0;
            while i < self.generators.len() {
                let candidate = self.generators.remove(i);
                if dominated_membership(&candidate, &self.generators) {
                    changed = true;
                } else {
                    self.generators.insert(i, candidate);
                    i += 1;
                }
            }
        }
    }

    /// The join in the lattice of subconvex sets: hull of the union.
    pub fn join(&self, other: &Polytope) -> Polytope {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Polytope::from_generators(gens)
    }

    /// Set equality of the hulls, by mutual generator membership.
    pub fn hull_equal(&self, other: &Polytope) -> bool {
        self.generators
            .iter()
            .all(|g| other.contains(g, Combination::SubConvex))
            && other
                .generators
                .iter()
                .all(|g| self.contains(g, Combination::SubConvex))
    }

    /// Projects every generator along a key map.
    pub fn project_keys(&self, class_of: impl Fn(&usize) -> Option<usize> + Copy) -> Polytope {
        Polytope::from_generators(
            self.generators
                .iter()
                .map(|g| project(g, class_of).expect("keys covered"))
                .collect(),
        )
    }
}

/// The unit of the convex-set monad: the subconvex hull of a Dirac.
pub fn c0m_unit(key: usize) -> Polytope {
    Polytope::from_generators(vec![Valuation::unit(Kind::Real, key)])
}

/// Kleisli extension for the convex-set monad, computed on canonical
/// generator presentations: every generator of `s` combines with an
/// independent choice of image generator at each support key, and the
/// subconvex hull of these products is the extension. A bottom image is the
/// zero set, so its key contributes nothing (the product still forms).
///
/// The construction does not depend on the presentation: pruned generator
/// sets are the extreme points of the hull, and products of hull members
/// are subconvex combinations of products of extreme points.
pub fn c0m_extend(f: impl Fn(usize) -> Polytope, s: &Polytope) -> Polytope {
    let mut out_gens: Vec<Valuation<usize>> = Vec::new();
    for g in s.generators() {
        let support: Vec<usize> = g.support().copied().collect();
        let images: Vec<Polytope> = support.iter().map(|&k| f(k)).collect();
        let radix: Vec<usize> = images.iter().map(|p| p.generators().len().max(1)).collect();
        let mut choice: Vec<usize> = vec![0; support.len()];
        loop {
            let mut acc: Valuation<usize> = Valuation::zero(Kind::Real);
            for (i, &key) in support.iter().enumerate() {
                let gens = images[i].generators();
                if !gens.is_empty() {
                    let scaled = gens[choice[i]].scale(&g.get(&key)).expect("same kind");
                    acc = acc.sum(&scaled).expect("same kind");
                }
            }
            if !acc.is_zero() {
                out_gens.push(acc);
            }
            // advance the mixed-radix counter over generator choices
            let mut i = 0;
            loop {
                if i == support.len() {
                    break;
                }
                choice[i] += 1;
                if choice[i] < radix[i] {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == support.len() {
                break;
            }
        }
    }
    Polytope::from_generators(out_gens)
}

/// A simple Segala system: per state, finitely many steps, each a label
/// together with a full probability distribution over states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegalaSystem {
    states: Vec<String>,
    labels: Vec<String>,
    tau: usize,
    steps: Vec<Vec<(usize, Valuation<usize>)>>,
}

/// Errors raised while assembling a Segala system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegalaError {
    UnknownState(String),
    UnknownLabel(String),
    DuplicateState(String),
    DuplicateLabel(String),
    TauNotDeclared(String),
    /// Distributions must sum to exactly one.
    NotADistribution {
        state: String,
        total: String,
    },
    WrongKind,
}

impl core::fmt::Display for SegalaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SegalaError::UnknownState(s) => write!(f, "unknown state `{s}`"),
            SegalaError::UnknownLabel(l) => write!(f, "unknown label `{l}`"),
            SegalaError::DuplicateState(s) => write!(f, "duplicate state `{s}`"),
            SegalaError::DuplicateLabel(l) => write!(f, "duplicate label `{l}`"),
            SegalaError::TauNotDeclared(t) => write!(f, "silent label `{t}` is not declared"),
            SegalaError::NotADistribution { state, total } => {
                write!(
                    f,
                    "step at `{state}` has total probability {total}, expected 1"
                )
            }
            SegalaError::WrongKind => write!(f, "segala distributions must be rational-weighted"),
        }
    }
}
impl core::error::Error for SegalaError {}

/// Builder mirroring the transition-system one.
pub struct SegalaBuilder {
    states: Vec<String>,
    labels: Vec<String>,
    tau: Option<usize>,
    steps: Vec<(usize, usize, Valuation<usize>)>,
}

impl SegalaBuilder {
    pub fn new() -> Self {
        SegalaBuilder {
            states: Vec::new(),
            labels: Vec::new(),
            tau: None,
            steps: Vec::new(),
        }
    }

    pub fn state(&mut self, name: &str) -> Result<usize, SegalaError> {
        if self.states.iter().any(|s| s == name) {
            return Err(SegalaError::DuplicateState(name.into()));
        }
        self.states.push(name.into());
        Ok(self.states.len() - 1)
    }

    pub fn label(&mut self, name: &str) -> Result<usize, SegalaError> {
        if self.labels.iter().any(|l| l == name) {
            return Err(SegalaError::DuplicateLabel(name.into()));
        }
        self.labels.push(name.into());
        Ok(self.labels.len() - 1)
    }

    pub fn tau(&mut self, name: &str) -> Result<(), SegalaError> {
        let idx = self
            .labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| SegalaError::TauNotDeclared(name.into()))?;
        self.tau = Some(idx);
        Ok(())
    }

    /// Adds a step `state --label--> distribution`, given as (target, prob)
    /// pairs over state names.
    pub fn step(
        &mut self,
        state: &str,
        label: &str,
        distribution: &[(&str, Value)],
    ) -> Result<(), SegalaError> {
        let s = self
            .states
            .iter()
            .position(|x| x == state)
            .ok_or_else(|| SegalaError::UnknownState(state.into()))?;
        let l = self
            .labels
            .iter()
            .position(|x| x == label)
            .ok_or_else(|| SegalaError::UnknownLabel(label.into()))?;
        let mut dist: Valuation<usize> = Valuation::zero(Kind::Real);
        for (target, p) in distribution {
            let t = self
                .states
                .iter()
                .position(|x| x == target)
                .ok_or_else(|| SegalaError::UnknownState((*target).into()))?;
            if p.kind() != Kind::Real {
                return Err(SegalaError::WrongKind);
            }
            dist.add_at(t, p).expect("same kind");
        }
        if dist.total() != Value::one(Kind::Real) {
            return Err(SegalaError::NotADistribution {
                state: state.into(),
                total: dist.total().render(),
            });
        }
        self.steps.push((s, l, dist));
        Ok(())
    }

    pub fn finish(self) -> Result<SegalaSystem, SegalaError> {
        let tau = self
            .tau
            .ok_or_else(|| SegalaError::TauNotDeclared("tau".into()))?;
        let mut steps = vec![Vec::new(); self.states.len()];
        for (s, l, d) in self.steps {
            steps[s].push((l, d));
        }
        Ok(SegalaSystem {
            states: self.states,
            labels: self.labels,
            tau,
            steps,
        })
    }
}

impl Default for SegalaBuilder {
    fn default() -> Self {
        SegalaBuilder::new()
    }
}

impl SegalaSystem {
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

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn steps(&self, state: usize) -> &[(usize, Valuation<usize>)] {
        &self.steps[state]
    }

    /// The convex-set translation: the subconvex hull of the steps, each
    /// placed at its label, as a polytope over (state, label) keys encoded
    /// as `state * label_count + label`.
    pub fn kappa(&self, state: usize) -> Polytope {
        let nl = self.labels.len();
        let gens = self.steps[state]
            .iter()
            .map(|(label, dist)| {
                let mut v = Valuation::zero(Kind::Real);
                for (y, p) in dist.iter() {
                    v.add_at(y * nl + label, p).expect("same kind");
                }
                v
            })
            .collect();
        Polytope::from_generators(gens)
    }

    /// The combined steps at a label: the convex hull of the ordinary
    /// steps. `contains(ξ, Convex)` decides `x ⇝a ξ`.
    pub fn combined_steps(&self, state: usize, label: usize) -> Polytope {
        Polytope::from_generators(
            self.steps[state]
                .iter()
                .filter(|(l, _)| *l == label)
                .map(|(_, d)| d.clone())
                .collect(),
        )
    }
}

/// Class-projected weak transition polytopes, iterated to stabilisation.
#[derive(Debug, Clone)]
pub struct WeakPolytopes {
    /// `polys[x][l]`: the weak set for the trace set of label `l` (`τ^*`
    /// when `l` is the silent label, `τ^*·l·τ^*` otherwise), over class keys.
    pub polys: Vec<Vec<Polytope>>,
    pub stabilized: bool,
    pub iterations: usize,
}

/// A set accumulating this many extreme points is treated like cap
/// exhaustion: the iteration is clearly not closing in on a finitely
/// generated fixpoint, and the choice products would explode.
const GENERATOR_BUDGET: usize = 8;

fn over_budget(polys: &[Vec<Polytope>]) -> bool {
    polys
        .iter()
        .any(|row| row.iter().any(|p| p.generators().len() > GENERATOR_BUDGET))
}

/// Iterates the weak-transition recursion on class-projected polytopes:
/// level zero holds only the silent Dirac, and each level combines one
/// (combined) step with the previous level's sets. Stops at hull
/// stabilisation; hitting the round cap or the generator budget yields a
/// flagged partial result, never a silent one.
pub fn weak_class_polytopes(
    sys: &SegalaSystem,
    partition: &Partition,
    cap: usize,
) -> WeakPolytopes {
    let n = sys.state_count();
    let nl = sys.labels().len();
    let tau = sys.tau();
    let mut polys: Vec<Vec<Polytope>> = vec![vec![Polytope::bottom(); nl]; n];
    let mut iterations = 0;
    let mut stabilized = false;
    while iterations < cap {
        iterations += 1;
        let mut next: Vec<Vec<Polytope>> = Vec::with_capacity(n);
        for x in 0..n {
            let mut per_label: Vec<Polytope> = Vec::with_capacity(nl);
            for a in 0..nl {
                let mut gens: Vec<Valuation<usize>> = Vec::new();
                if a == tau {
                    gens.push(Valuation::unit(Kind::Real, partition.class_of(x)));
                }
                // one step at the observed (or silent) label, followed by
                // the previous level's weak sets at the remaining trace set
                for (l, dist) in sys.steps(x) {
                    let follow = if *l == a {
                        tau
                    } else if *l == tau {
                        a
                    } else {
                        continue;
                    };
                    let image = |y: usize| polys[y][follow].clone();
                    let lifted = c0m_extend(
                        image,
                        &Polytope::from_generators(vec![{
                            let mut v = Valuation::zero(Kind::Real);
                            for (y, p) in dist.iter() {
                                v.add_at(*y, p).expect("same kind");
                            }
                            v
                        }]),
                    );
                    gens.extend(lifted.generators().iter().cloned());
                }
                per_label.push(Polytope::from_generators(gens));
            }
            next.push(per_label);
        }
        let same = (0..n).all(|x| (0..nl).all(|a| next[x][a].hull_equal(&polys[x][a])));
        polys = next;
        if same {
            stabilized = true;
            break;
        }
        if over_budget(&polys) {
            break;
        }
    }
    WeakPolytopes {
        polys,
        stabilized,
        iterations,
    }
}

/// Outcome of a Segala bisimulation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegalaVerdict {
    Holds,
    Fails {
        left: usize,
        right: usize,
        label: usize,
    },
    /// The weak polytopes did not stabilise within the cap; no definite
    /// verdict is issued.
    Unknown {
        iterations: usize,
    },
}

impl SegalaVerdict {
    pub fn is_definite(&self) -> bool {
        !matches!(self, SegalaVerdict::Unknown { .. })
    }
}

/// Weak probabilistic bisimulation: every step of a state must land, after
/// class projection, inside the weak polytope of every block-mate at the
/// step's label. Mass-one points in a subconvex set correspond exactly to
/// realizable weak combined transitions.
pub fn check_weak_prob_bisim(
    sys: &SegalaSystem,
    partition: &Partition,
    cap: usize,
) -> SegalaVerdict {
    let weak = weak_class_polytopes(sys, partition, cap);
    if !weak.stabilized {
        return SegalaVerdict::Unknown {
            iterations: weak.iterations,
        };
    }
    let class_of = |k: &usize| Some(partition.class_of(*k));
    for block in partition.blocks() {
        for &x in block {
            for &y in block {
                if x == y {
                    continue;
                }
                for (label, dist) in sys.steps(x) {
                    let projected = project(dist, class_of).expect("covered");
                    if !weak.polys[y][*label].contains(&projected, Combination::SubConvex) {
                        return SegalaVerdict::Fails {
                            left: x,
                            right: y,
                            label: *label,
                        };
                    }
                }
            }
        }
    }
    SegalaVerdict::Holds
}

/// Strong probabilistic bisimulation: steps must be matched by combined
/// steps with equal class masses.
pub fn check_strong_prob_bisim(sys: &SegalaSystem, partition: &Partition) -> SegalaVerdict {
    let class_of = |k: &usize| Some(partition.class_of(*k));
    for block in partition.blocks() {
        for &x in block {
            for &y in block {
                if x == y {
                    continue;
                }
                for (label, dist) in sys.steps(x) {
                    let point = project(dist, class_of).expect("covered");
                    let candidates = Polytope::from_generators(
                        sys.steps(y)
                            .iter()
                            .filter(|(l, _)| l == label)
                            .map(|(_, d)| project(d, class_of).expect("covered"))
                            .collect(),
                    );
                    if !candidates.contains(&point, Combination::Convex) {
                        return SegalaVerdict::Fails {
                            left: x,
                            right: y,
                            label: *label,
                        };
                    }
                }
            }
        }
    }
    SegalaVerdict::Holds
}

/// Kernel stability on the convex-set translation: block mates must have
/// hull-equal class-and-label projections of their step polytopes.
pub fn kappa_kernel_stable(sys: &SegalaSystem, partition: &Partition) -> bool {
    let nl = sys.labels().len();
    let class_of = move |k: &usize| Some(partition.class_of(k / nl) * nl + (k % nl));
    for block in partition.blocks() {
        let first = sys.kappa(block[0]).project_keys(class_of);
        for &other in &block[1..] {
            let theirs = sys.kappa(other).project_keys(class_of);
            if !first.hull_equal(&theirs) {
                return false;
            }
        }
    }
    true
}

/// Report comparing the two decision routes for weak Segala equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegalaEquivalenceReport {
    pub weak_verdict: SegalaVerdict,
    pub pattern_verdict: SegalaVerdict,
    pub agree: bool,
}

/// Solves the behaviour equation over the convex-set translation with the
/// weak pattern (join = hull of the union) and compares the kernel verdict
/// with [`check_weak_prob_bisim`].
pub fn check_segala_equivalence(
    sys: &SegalaSystem,
    partition: &Partition,
    cap: usize,
) -> SegalaEquivalenceReport {
    let weak_verdict = check_weak_prob_bisim(sys, partition, cap);

    let pattern = PatternAutomaton::weak(sys.labels(), &sys.labels()[sys.tau()])
        .expect("segala systems declare tau");
    let nb = pattern.state_count();
    let nl = sys.labels().len();
    let n = sys.state_count();
    // tables over class keys, one polytope per (state, pattern state)
    let mut table: Vec<Vec<Polytope>> = vec![vec![Polytope::bottom(); nb]; n];
    let mut stabilized = false;
    let mut iterations = 0;
    while iterations < cap {
        iterations += 1;
        let mut next: Vec<Vec<Polytope>> = Vec::with_capacity(n);
        for x in 0..n {
            let kappa_x = sys.kappa(x);
            let mut rows: Vec<Polytope> = Vec::with_capacity(nb);
            for b in 0..nb {
                let mut gens: Vec<Valuation<usize>> = Vec::new();
                if pattern.accepts_empty(b) {
                    gens.push(Valuation::unit(Kind::Real, partition.class_of(x)));
                }
                let image = |key: usize| {
                    let (y, a) = (key / nl, key % nl);
                    table[y][pattern.derivative(b, a)].clone()
                };
                let lifted = c0m_extend(image, &kappa_x);
                gens.extend(lifted.generators().iter().cloned());
                rows.push(Polytope::from_generators(gens));
            }
            next.push(rows);
        }
        let same = (0..n).all(|x| (0..nb).all(|b| next[x][b].hull_equal(&table[x][b])));
        table = next;
        if same {
            stabilized = true;
            break;
        }
        if over_budget(&table) {
            break;
        }
    }

    let pattern_verdict = if !stabilized {
        SegalaVerdict::Unknown { iterations }
    } else {
        let compared = pattern.reachable_from_observables();
        let mut verdict = SegalaVerdict::Holds;
        'outer: for block in partition.blocks() {
            let first = block[0];
            for &other in &block[1..] {
                for &b in &compared {
                    if !table[first][b].hull_equal(&table[other][b]) {
                        verdict = SegalaVerdict::Fails {
                            left: first,
                            right: other,
                            label: b,
                        };
                        break 'outer;
                    }
                }
            }
        }
        verdict
    };

    let agree = match (&weak_verdict, &pattern_verdict) {
        (SegalaVerdict::Unknown { .. }, _) | (_, SegalaVerdict::Unknown { .. }) => false,
        (a, b) => matches!(a, SegalaVerdict::Holds) == matches!(b, SegalaVerdict::Holds),
    };
    SegalaEquivalenceReport {
        weak_verdict,
        pattern_verdict,
        agree,
    }
}

/// Convenience constructor for rational values in tests and parsers.
pub fn ratio(num: i64, den: i64) -> Value {
    Value::Real(Extended::Finite(BigRational::new(
        BigInt::from(num),
        BigInt::from(den),
    )))
}
