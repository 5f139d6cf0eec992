//! Finite-support valuations: maps from keys into a semiring, in canonical
//! sparse form (no explicit zeros). These are the monad the systems live in:
//! [`Valuation::unit`] is the Dirac valuation and [`kleisli_extend`] the bind.
//!
//! Keys are opaque; the callers use state indices, class indices, or
//! state × label pairs.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::semiring::{Kind, KindMismatch, Value};

/// Errors raised by valuation operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationError {
    Kind(KindMismatch),
    /// Kleisli extension was given a map undefined on a support key, or a
    /// quotient projection met a key outside every block.
    UnassignedKey,
}

impl From<KindMismatch> for ValuationError {
    fn from(e: KindMismatch) -> Self {
        ValuationError::Kind(e)
    }
}

impl core::fmt::Display for ValuationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ValuationError::Kind(e) => write!(f, "{e}"),
            ValuationError::UnassignedKey => write!(f, "key not covered by the given map"),
        }
    }
}
impl core::error::Error for ValuationError {}

/// A finite-support map `K → R` for a semiring `R` fixed by `kind`.
///
/// Two valuations are equal iff their canonical forms are equal; the
/// constructors never store a zero entry, so derived equality is semantic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Valuation<K: Ord + Clone> {
    kind: Kind,
    entries: BTreeMap<K, Value>,
}

impl<K: Ord + Clone> Valuation<K> {
    /// The constantly-zero valuation, the bottom element of the pointwise
    /// order.
    pub fn zero(kind: Kind) -> Self {
        Valuation {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// The Dirac valuation: weight 1 on `key`, zero elsewhere.
    pub fn unit(kind: Kind, key: K) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(key, Value::one(kind));
        Valuation { kind, entries }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Value)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The weight at `key`; zero when absent.
    pub fn get(&self, key: &K) -> Value {
        self.entries
            .get(key)
            .cloned()
            .unwrap_or_else(|| Value::zero(self.kind))
    }

    /// Sets the weight at `key`, dropping the entry when it is zero.
    pub fn set(&mut self, key: K, value: Value) -> Result<(), ValuationError> {
        if value.kind() != self.kind {
            return Err(KindMismatch {
                left: self.kind,
                right: value.kind(),
            }
            .into());
        }
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// Adds `value` onto the weight at `key`.
    pub fn add_at(&mut self, key: K, value: &Value) -> Result<(), ValuationError> {
        let next = self.get(&key).add(value)?;
        self.set(key, next)
    }

    /// Pointwise semiring sum.
    pub fn sum(&self, other: &Valuation<K>) -> Result<Valuation<K>, ValuationError> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.add_at(k.clone(), v)?;
        }
        Ok(out)
    }

    /// Pointwise order-maximum (the binary join; the built-in orders are
    /// total).
    pub fn join(&self, other: &Valuation<K>) -> Result<Valuation<K>, ValuationError> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let cur = out.get(k);
            out.set(k.clone(), cur.sup(v)?)?;
        }
        Ok(out)
    }

    /// Scales every entry by `c` on the left.
    pub fn scale(&self, c: &Value) -> Result<Valuation<K>, ValuationError> {
        if c.kind() != self.kind {
            return Err(KindMismatch {
                left: self.kind,
                right: c.kind(),
            }
            .into());
        }
        let mut out = Valuation::zero(self.kind);
        if c.is_zero() {
            return Ok(out);
        }
        for (k, v) in &self.entries {
            out.set(k.clone(), c.mul(v)?)?;
        }
        Ok(out)
    }

    /// Pointwise semiring order: `self(k) ≤ other(k)` everywhere.
    pub fn leq(&self, other: &Valuation<K>) -> Result<bool, ValuationError> {
        self.check(other)?;
        for (k, v) in &self.entries {
            if !v.leq(&other.get(k))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Total weight: the semiring sum over the support.
    pub fn total(&self) -> Value {
        let mut acc = Value::zero(self.kind);
        for v in self.entries.values() {
            acc = acc.add(v).expect("entries share the valuation kind");
        }
        acc
    }

    fn check(&self, other: &Valuation<K>) -> Result<(), ValuationError> {
        if self.kind == other.kind {
            Ok(())
        } else {
            Err(KindMismatch {
                left: self.kind,
                right: other.kind,
            }
            .into())
        }
    }
}

/// Kleisli extension: `f†(v)(y) = Σ_x v(x) · f(x)(y)`, computed exactly over
/// the finite support of `v`.
///
/// `f` must be defined on every support key of `v`.
pub fn kleisli_extend<K, L, F>(mut f: F, v: &Valuation<K>) -> Result<Valuation<L>, ValuationError>
where
    K: Ord + Clone,
    L: Ord + Clone,
    F: FnMut(&K) -> Option<Valuation<L>>,
{
    let mut out = Valuation::zero(v.kind());
    for (k, w) in v.iter() {
        let target = f(k).ok_or(ValuationError::UnassignedKey)?;
        if target.kind() != v.kind() {
            return Err(KindMismatch {
                left: v.kind(),
                right: target.kind(),
            }
            .into());
        }
        for (l, u) in target.iter() {
            out.add_at(l.clone(), &w.mul(u)?)?;
        }
    }
    Ok(out)
}

/// Collapses a valuation along a key map: the image weight of a class is the
/// sum over its members. `class_of` must cover the support.
pub fn project<K, L, F>(v: &Valuation<K>, mut class_of: F) -> Result<Valuation<L>, ValuationError>
where
    K: Ord + Clone,
    L: Ord + Clone,
    F: FnMut(&K) -> Option<L>,
{
    let mut out = Valuation::zero(v.kind());
    for (k, w) in v.iter() {
        let class = class_of(k).ok_or(ValuationError::UnassignedKey)?;
        out.add_at(class, w)?;
    }
    Ok(out)
}

/// Builds a valuation from key/weight pairs, summing duplicates.
pub fn from_pairs<K: Ord + Clone>(
    kind: Kind,
    pairs: impl IntoIterator<Item = (K, Value)>,
) -> Result<Valuation<K>, ValuationError> {
    let mut out = Valuation::zero(kind);
    for (k, v) in pairs {
        out.add_at(k, &v)?;
    }
    Ok(out)
}

/// Dense view over `0..width`, for solver kernels.
pub fn to_dense(v: &Valuation<usize>, width: usize) -> Vec<Value> {
    let mut out = Vec::with_capacity(width);
    for i in 0..width {
        out.push(v.get(&i));
    }
    out
}
