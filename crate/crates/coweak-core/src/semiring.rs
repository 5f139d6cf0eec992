//! The three built-in continuous semirings: booleans, naturals with
//! infinity, and nonnegative rationals with infinity.
//!
//! Every operation is exact. Infinity follows the conventions forced by
//! positivity and sup-compatibility, in particular `0 · ∞ = 0`.

use alloc::string::String;
use core::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Which semiring a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// `{0, 1}` with or/and.
    Bool,
    /// `ℕ ∪ {∞}`.
    Nat,
    /// Nonnegative rationals extended with `∞`.
    Real,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Bool => write!(f, "bool"),
            Kind::Nat => write!(f, "nat"),
            Kind::Real => write!(f, "real"),
        }
    }
}

/// An element of one of the built-in semirings.
///
/// The derived `Ord` is only meaningful between values of the same kind; it
/// exists so values can serve as map keys and sorting keys. The semiring
/// order is [`Value::leq`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Nat(Extended<BigUint>),
    Real(Extended<BigRational>),
}

/// A finite value or the top element `∞`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended<T> {
    Finite(T),
    Infinity,
}

/// Mixing values of different kinds is a caller error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindMismatch {
    pub left: Kind,
    pub right: Kind,
}

impl fmt::Display for KindMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "semiring kind mismatch: {} vs {}", self.left, self.right)
    }
}
impl core::error::Error for KindMismatch {}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Bool(_) => Kind::Bool,
            Value::Nat(_) => Kind::Nat,
            Value::Real(_) => Kind::Real,
        }
    }

    pub fn zero(kind: Kind) -> Value {
        match kind {
            Kind::Bool => Value::Bool(false),
            Kind::Nat => Value::Nat(Extended::Finite(BigUint::zero())),
            Kind::Real => Value::Real(Extended::Finite(BigRational::zero())),
        }
    }

    pub fn one(kind: Kind) -> Value {
        match kind {
            Kind::Bool => Value::Bool(true),
            Kind::Nat => Value::Nat(Extended::Finite(BigUint::one())),
            Kind::Real => Value::Real(Extended::Finite(BigRational::one())),
        }
    }

    pub fn infinity(kind: Kind) -> Option<Value> {
        match kind {
            Kind::Bool => None,
            Kind::Nat => Some(Value::Nat(Extended::Infinity)),
            Kind::Real => Some(Value::Real(Extended::Infinity)),
        }
    }

    /// A natural number as a value of the given kind.
    pub fn from_u64(kind: Kind, n: u64) -> Value {
        match kind {
            Kind::Bool => Value::Bool(n != 0),
            Kind::Nat => Value::Nat(Extended::Finite(BigUint::from(n))),
            Kind::Real => Value::Real(Extended::Finite(BigRational::from_integer(n.into()))),
        }
    }

    /// An exact nonnegative rational. Returns `None` for negative input or
    /// zero denominator.
    pub fn rational(num: i64, den: i64) -> Option<Value> {
        if den == 0 {
            return None;
        }
        let q = BigRational::new(num.into(), den.into());
        if q.is_negative() {
            return None;
        }
        Some(Value::Real(Extended::Finite(q)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Bool(b) => !b,
            Value::Nat(Extended::Finite(n)) => n.is_zero(),
            Value::Real(Extended::Finite(q)) => q.is_zero(),
            _ => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            Value::Nat(Extended::Finite(n)) => n.is_one(),
            Value::Real(Extended::Finite(q)) => q.is_one(),
            _ => false,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(
            self,
            Value::Nat(Extended::Infinity) | Value::Real(Extended::Infinity)
        )
    }

    fn check(&self, other: &Value) -> Result<(), KindMismatch> {
        if self.kind() == other.kind() {
            Ok(())
        } else {
            Err(KindMismatch {
                left: self.kind(),
                right: other.kind(),
            })
        }
    }

    /// Semiring addition. `∞` absorbs.
    pub fn add(&self, other: &Value) -> Result<Value, KindMismatch> {
        self.check(other)?;
        Ok(match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a || *b),
            (Value::Nat(a), Value::Nat(b)) => Value::Nat(match (a, b) {
                (Extended::Finite(x), Extended::Finite(y)) => Extended::Finite(x + y),
                _ => Extended::Infinity,
            }),
            (Value::Real(a), Value::Real(b)) => Value::Real(match (a, b) {
                (Extended::Finite(x), Extended::Finite(y)) => Extended::Finite(x + y),
                _ => Extended::Infinity,
            }),
            _ => unreachable!(),
        })
    }

    /// Semiring multiplication, with `0 · ∞ = 0`.
    pub fn mul(&self, other: &Value) -> Result<Value, KindMismatch> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Value::zero(self.kind()));
        }
        Ok(match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a && *b),
            (Value::Nat(a), Value::Nat(b)) => Value::Nat(match (a, b) {
                (Extended::Finite(x), Extended::Finite(y)) => Extended::Finite(x * y),
                _ => Extended::Infinity,
            }),
            (Value::Real(a), Value::Real(b)) => Value::Real(match (a, b) {
                (Extended::Finite(x), Extended::Finite(y)) => Extended::Finite(x * y),
                _ => Extended::Infinity,
            }),
            _ => unreachable!(),
        })
    }

    /// The semiring order. Total on all three kinds, with `∞` on top.
    pub fn leq(&self, other: &Value) -> Result<bool, KindMismatch> {
        self.check(other)?;
        Ok(match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => *a <= *b,
            (Value::Nat(a), Value::Nat(b)) => a <= b,
            (Value::Real(a), Value::Real(b)) => a <= b,
            _ => unreachable!(),
        })
    }

    /// Binary order-supremum (the built-in orders are total, so this is max).
    pub fn sup(&self, other: &Value) -> Result<Value, KindMismatch> {
        Ok(if self.leq(other)? {
            other.clone()
        } else {
            self.clone()
        })
    }

    /// `star(a) = Σ_{n≥0} aⁿ`, the least solution of `x = 1 + a·x`.
    ///
    /// Booleans: always 1. Naturals: 1 if `a = 0`, else `∞`. Rationals:
    /// `1/(1−a)` below one, `∞` from one upwards.
    pub fn star(&self) -> Value {
        match self {
            Value::Bool(_) => Value::Bool(true),
            Value::Nat(Extended::Finite(n)) if n.is_zero() => Value::one(Kind::Nat),
            Value::Nat(_) => Value::Nat(Extended::Infinity),
            Value::Real(Extended::Finite(q)) if *q < BigRational::one() => Value::Real(
                Extended::Finite(BigRational::one() / (BigRational::one() - q)),
            ),
            Value::Real(_) => Value::Real(Extended::Infinity),
        }
    }

    /// Renders `p/q` for non-integer rationals, plain digits for integers,
    /// `inf` for infinity, `0`/`1` for booleans.
    pub fn render(&self) -> String {
        use alloc::format;
        match self {
            Value::Bool(false) => String::from("0"),
            Value::Bool(true) => String::from("1"),
            Value::Nat(Extended::Finite(n)) => format!("{n}"),
            Value::Real(Extended::Finite(q)) => {
                if q.is_integer() {
                    format!("{}", q.numer())
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            _ => String::from("inf"),
        }
    }

    /// Approximate magnitude, for convergence reporting only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Bool(b) => {
                if *b {
                    1.0
                } else {
                    0.0
                }
            }
            Value::Nat(Extended::Finite(n)) => {
                let mut acc = 0.0f64;
                for d in n.to_radix_be(10) {
                    acc = acc * 10.0 + f64::from(d);
                }
                acc
            }
            Value::Real(Extended::Finite(q)) => {
                big_to_f64(q.numer().magnitude()) / big_to_f64(q.denom().magnitude())
            }
            _ => f64::INFINITY,
        }
    }
}

fn big_to_f64(n: &BigUint) -> f64 {
    let mut acc = 0.0f64;
    for d in n.to_radix_be(10) {
        acc = acc * 10.0 + f64::from(d);
    }
    acc
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}
