//! Deterministic instance generators for the randomized suites. Seeded
//! splitmix64 keeps every run reproducible without external dependencies.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::segala::{SegalaBuilder, SegalaSystem};
use crate::semiring::{Extended, Kind, Value};
use crate::system::{SystemBuilder, WeightedSystem};
use crate::valuation::Valuation;

/// splitmix64, the usual constants.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`; `n` must be nonzero.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// True with probability `num/den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next_u64() % den < num
    }
}

fn dyadic(num: u64, log_den: u32) -> Value {
    Value::Real(Extended::Finite(BigRational::new(
        BigInt::from(num),
        BigInt::from(1u64 << log_den),
    )))
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| alloc::format!("s{i}")).collect()
}

/// Splits mass `num/2^log_den` into `parts` dyadic pieces by repeated
/// halving; the pieces sum exactly to the input.
fn dyadic_split(rng: &mut Rng, num: u64, log_den: u32, parts: usize) -> Vec<(u64, u32)> {
    let mut out = Vec::with_capacity(parts);
    let mut rest = (num, log_den);
    for i in 0..parts {
        if i + 1 == parts {
            out.push(rest);
        } else {
            // take half, or half of half
            let extra = if rng.chance(1, 2) { 1 } else { 2 };
            let piece = (rest.0, rest.1 + extra);
            out.push(piece);
            // rest = rest - piece = rest * (1 - 2^-extra)
            rest = (rest.0 * ((1 << extra) - 1), rest.1 + extra);
        }
    }
    out
}

/// A random boolean transition system with the given labels (`tau` must be
/// among them when patterns with silence are used downstream).
pub fn boolean_system(
    rng: &mut Rng,
    n_states: usize,
    labels: &[&str],
    tau: Option<&str>,
) -> WeightedSystem {
    let mut b = SystemBuilder::new(Kind::Bool);
    for name in state_names(n_states) {
        b.state(&name).unwrap();
    }
    for l in labels {
        b.label(l).unwrap();
    }
    if let Some(t) = tau {
        b.tau(t).unwrap();
    }
    for x in 0..n_states {
        for l in labels {
            for y in 0..n_states {
                if rng.chance(1, 4) {
                    b.transition(
                        &alloc::format!("s{x}"),
                        l,
                        Value::Bool(true),
                        &alloc::format!("s{y}"),
                    )
                    .unwrap();
                }
            }
        }
    }
    b.finish()
}

/// A random integer-weighted system, weights 1..=3, moderate density.
pub fn nat_system(
    rng: &mut Rng,
    n_states: usize,
    labels: &[&str],
    tau: Option<&str>,
) -> WeightedSystem {
    let mut b = SystemBuilder::new(Kind::Nat);
    for name in state_names(n_states) {
        b.state(&name).unwrap();
    }
    for l in labels {
        b.label(l).unwrap();
    }
    if let Some(t) = tau {
        b.tau(t).unwrap();
    }
    for x in 0..n_states {
        for l in labels {
            for y in 0..n_states {
                if rng.chance(1, 4) {
                    let w = Value::from_u64(Kind::Nat, 1 + rng.below(3) as u64);
                    b.transition(&alloc::format!("s{x}"), l, w, &alloc::format!("s{y}"))
                        .unwrap();
                }
            }
        }
    }
    b.finish()
}

/// A random fully probabilistic system: every state gets a dyadic
/// distribution over (state, label) pairs summing exactly to one.
pub fn fully_probabilistic_system(
    rng: &mut Rng,
    n_states: usize,
    labels: &[&str],
    tau: Option<&str>,
) -> WeightedSystem {
    let mut b = SystemBuilder::new(Kind::Real);
    for name in state_names(n_states) {
        b.state(&name).unwrap();
    }
    for l in labels {
        b.label(l).unwrap();
    }
    if let Some(t) = tau {
        b.tau(t).unwrap();
    }
    for x in 0..n_states {
        let parts = 1 + rng.below(3);
        let pieces = dyadic_split(rng, 1, 0, parts);
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        for (num, log_den) in pieces {
            // draw a fresh (target, label) pair per piece; collisions merge
            let mut y = rng.below(n_states);
            let mut l = rng.below(labels.len());
            while chosen.contains(&(y, l)) {
                y = rng.below(n_states);
                l = rng.below(labels.len());
                if chosen.len() >= n_states * labels.len() {
                    break;
                }
            }
            if chosen.contains(&(y, l)) {
                continue;
            }
            chosen.push((y, l));
            b.transition(
                &alloc::format!("s{x}"),
                labels[l],
                dyadic(num, log_den),
                &alloc::format!("s{y}"),
            )
            .unwrap();
        }
        // merge leftovers into the first entry if collisions dropped pieces
        if chosen.is_empty() {
            b.transition(
                &alloc::format!("s{x}"),
                labels[0],
                Value::one(Kind::Real),
                &alloc::format!("s{x}"),
            )
            .unwrap();
        }
    }
    let sys = b.finish();
    fix_totals(sys)
}

/// Rebuilds the system topping up one transition per state so totals are
/// exactly one (collisions during generation can drop mass). The top-up
/// avoids the silent label so silent-mass bounds survive.
fn fix_totals(sys: WeightedSystem) -> WeightedSystem {
    let one = Value::one(Kind::Real);
    let mut b = SystemBuilder::new(Kind::Real);
    for s in sys.states() {
        b.state(s).unwrap();
    }
    for l in sys.labels() {
        b.label(l).unwrap();
    }
    if let Some(t) = sys.tau() {
        b.tau(&sys.labels()[t]).unwrap();
    }
    for x in 0..sys.state_count() {
        let total = sys.out_total(x);
        let mut entries: Vec<((usize, usize), Value)> = sys
            .successors(x)
            .iter()
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        if total != one {
            let missing = match (&one, &total) {
                (Value::Real(Extended::Finite(o)), Value::Real(Extended::Finite(t))) => {
                    Value::Real(Extended::Finite(o - t))
                }
                _ => unreachable!("generator emits finite rationals"),
            };
            let slot = entries
                .iter()
                .position(|((_, l), _)| Some(*l) != sys.tau())
                .unwrap_or(0);
            if entries.is_empty() {
                let label = (0..sys.labels().len())
                    .find(|l| Some(*l) != sys.tau())
                    .unwrap_or(0);
                entries.push(((x, label), one.clone()));
            } else {
                entries[slot].1 = entries[slot].1.add(&missing).unwrap();
            }
        }
        for ((y, l), w) in entries {
            b.transition(&sys.states()[x], &sys.labels()[l], w, &sys.states()[y])
                .unwrap();
        }
    }
    b.finish()
}

/// A fully probabilistic system whose per-state silent mass is at most
/// `1/8`, so every silent cycle's product is at most `1/8` and truncated
/// path sums converge fast.
pub fn tau_damped_probabilistic_system(
    rng: &mut Rng,
    n_states: usize,
    labels: &[&str],
    tau: &str,
) -> WeightedSystem {
    let mut b = SystemBuilder::new(Kind::Real);
    for name in state_names(n_states) {
        b.state(&name).unwrap();
    }
    for l in labels {
        b.label(l).unwrap();
    }
    b.tau(tau).unwrap();
    let visible: Vec<&str> = labels.iter().copied().filter(|l| *l != tau).collect();
    for x in 0..n_states {
        // silent part: either none or exactly 1/8 to one target
        let tau_mass: Option<usize> = if rng.chance(1, 2) {
            Some(rng.below(n_states))
        } else {
            None
        };
        let (vis_num, vis_log) = if tau_mass.is_some() { (7, 3) } else { (1, 0) };
        if let Some(y) = tau_mass {
            b.transition(
                &alloc::format!("s{x}"),
                tau,
                dyadic(1, 3),
                &alloc::format!("s{y}"),
            )
            .unwrap();
        }
        let parts = 1 + rng.below(2);
        let pieces = dyadic_split(rng, vis_num, vis_log, parts);
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        let mut leftovers: Vec<(u64, u32)> = Vec::new();
        for (num, log_den) in pieces {
            let y = rng.below(n_states);
            let l = rng.below(visible.len());
            if chosen.contains(&(y, l)) {
                leftovers.push((num, log_den));
                continue;
            }
            chosen.push((y, l));
            b.transition(
                &alloc::format!("s{x}"),
                visible[l],
                dyadic(num, log_den),
                &alloc::format!("s{y}"),
            )
            .unwrap();
        }
        if chosen.is_empty() {
            b.transition(
                &alloc::format!("s{x}"),
                visible[0],
                dyadic(vis_num, vis_log),
                &alloc::format!("s{x}"),
            )
            .unwrap();
        }
        let _ = leftovers; // mass fixed below
    }
    fix_totals(b.finish())
}

/// A random simple Segala system: up to `max_steps` steps per state with
/// dyadic distributions of support ≤ 3.
pub fn segala_system(
    rng: &mut Rng,
    n_states: usize,
    labels: &[&str],
    tau: &str,
    max_steps: usize,
) -> SegalaSystem {
    let mut b = SegalaBuilder::new();
    let names = state_names(n_states);
    for name in &names {
        b.state(name).unwrap();
    }
    for l in labels {
        b.label(l).unwrap();
    }
    b.tau(tau).unwrap();
    for x in 0..n_states {
        let steps = rng.below(max_steps + 1);
        for _ in 0..steps {
            let label = labels[rng.below(labels.len())];
            let parts = 1 + rng.below(3);
            let pieces = dyadic_split(rng, 1, 0, parts);
            let mut dist: Vec<(usize, Value)> = Vec::new();
            for (num, log_den) in pieces {
                let y = rng.below(n_states);
                match dist.iter_mut().find(|(t, _)| *t == y) {
                    Some((_, w)) => *w = w.add(&dyadic(num, log_den)).unwrap(),
                    None => dist.push((y, dyadic(num, log_den))),
                }
            }
            let dist: Vec<(&str, Value)> = dist
                .into_iter()
                .map(|(y, w)| (names[y].as_str(), w))
                .collect();
            b.step(&names[x], label, &dist).unwrap();
        }
    }
    b.finish().unwrap()
}

/// A random valuation over `0..key_count` with the given kind; dyadic for
/// the rationals, small integers otherwise.
pub fn valuation(
    rng: &mut Rng,
    kind: Kind,
    key_count: usize,
    max_support: usize,
) -> Valuation<usize> {
    let mut v = Valuation::zero(kind);
    let support = rng.below(max_support + 1);
    for _ in 0..support {
        let key = rng.below(key_count);
        let value = match kind {
            Kind::Bool => Value::Bool(true),
            Kind::Nat => Value::from_u64(Kind::Nat, 1 + rng.below(3) as u64),
            Kind::Real => dyadic(1 + rng.below(4) as u64, 2),
        };
        v.add_at(key, &value).unwrap();
    }
    v
}
