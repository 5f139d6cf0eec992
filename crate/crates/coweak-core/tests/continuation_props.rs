//! Evaluation-level properties of the continuation embedding: linearity of
//! the embedded evaluations, injectivity on carriers, and algebraicity of
//! the pointwise join — extension commutes with joins taken pointwise on
//! test functions.

use coweak_core::random::Rng;
use coweak_core::semiring::{Kind, Value};
use coweak_core::transform::embed;
use coweak_core::valuation::Valuation;

/// A finite pointwise join of embedded valuations: evaluates every member
/// and takes the semiring maximum.
#[derive(Clone)]
struct JoinOfEmbedded {
    kind: Kind,
    members: Vec<Valuation<usize>>,
}

impl JoinOfEmbedded {
    fn ev(&self, test: &dyn Fn(usize) -> Value) -> Value {
        let mut acc = Value::zero(self.kind);
        for member in &self.members {
            let v = embed(member).ev(|k| test(*k));
            acc = acc.sup(&v).unwrap();
        }
        acc
    }
}

/// Continuation Kleisli extension at the evaluation level:
/// `h†(p)(c) = p(x ↦ h(x)(c))`.
fn extend(h: &[JoinOfEmbedded], p: &JoinOfEmbedded, test: &dyn Fn(usize) -> Value) -> Value {
    p.ev(&|x| h[x].ev(test))
}

fn random_join_element(rng: &mut Rng, kind: Kind, keys: usize) -> JoinOfEmbedded {
    let members = (0..1 + rng.below(2))
        .map(|_| coweak_core::random::valuation(rng, kind, keys, 3))
        .collect();
    JoinOfEmbedded { kind, members }
}

#[test]
fn pointwise_join_is_algebraic_at_evaluation_level() {
    // h†(p ⊔̂ q)(c) = h†(p)(c) ⊔ h†(q)(c) for the join given pointwise on
    // test functions, on random instances and random test functions
    let mut rng = Rng::new(0xce11);
    for kind in [Kind::Nat, Kind::Real] {
        for _ in 0..500 {
            let keys = 3;
            let p = random_join_element(&mut rng, kind, keys);
            let q = random_join_element(&mut rng, kind, keys);
            let h: Vec<JoinOfEmbedded> = (0..keys)
                .map(|_| random_join_element(&mut rng, kind, keys))
                .collect();
            let joined = JoinOfEmbedded {
                kind,
                members: p.members.iter().chain(q.members.iter()).cloned().collect(),
            };
            for _ in 0..5 {
                let values: Vec<Value> = (0..keys)
                    .map(|_| match kind {
                        Kind::Nat => Value::from_u64(Kind::Nat, rng.below(4) as u64),
                        _ => Value::rational(rng.below(5) as i64, 1 + rng.below(3) as i64).unwrap(),
                    })
                    .collect();
                let test = |k: usize| values[k].clone();
                let lhs = extend(&h, &joined, &test);
                let rhs = extend(&h, &p, &test).sup(&extend(&h, &q, &test)).unwrap();
                assert_eq!(lhs, rhs, "pointwise join must commute with extension");
            }
        }
    }
}

#[test]
fn embedded_evaluations_are_linear() {
    let mut rng = Rng::new(0xce12);
    for kind in [Kind::Bool, Kind::Nat, Kind::Real] {
        for _ in 0..300 {
            let keys = 4;
            let p = coweak_core::random::valuation(&mut rng, kind, keys, 3);
            let c1: Vec<Value> = (0..keys)
                .map(|_| match kind {
                    Kind::Bool => Value::Bool(rng.chance(1, 2)),
                    Kind::Nat => Value::from_u64(Kind::Nat, rng.below(4) as u64),
                    Kind::Real => Value::rational(rng.below(5) as i64, 2).unwrap(),
                })
                .collect();
            let c2: Vec<Value> = (0..keys)
                .map(|_| match kind {
                    Kind::Bool => Value::Bool(rng.chance(1, 2)),
                    Kind::Nat => Value::from_u64(Kind::Nat, rng.below(4) as u64),
                    Kind::Real => Value::rational(rng.below(5) as i64, 3).unwrap(),
                })
                .collect();
            // ev on the pointwise sum of test functions = sum of evs
            let lhs = embed(&p).ev(|k| c1[*k].add(&c2[*k]).unwrap());
            let rhs = embed(&p)
                .ev(|k| c1[*k].clone())
                .add(&embed(&p).ev(|k| c2[*k].clone()))
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn singleton_indicators_recover_the_carrier() {
    let mut rng = Rng::new(0xce13);
    for _ in 0..300 {
        let p = coweak_core::random::valuation(&mut rng, Kind::Real, 4, 3);
        let q = coweak_core::random::valuation(&mut rng, Kind::Real, 4, 3);
        let agree_on_indicators = (0..4).all(|key| {
            let indicator = |k: &usize| {
                if *k == key {
                    Value::one(Kind::Real)
                } else {
                    Value::zero(Kind::Real)
                }
            };
            embed(&p).ev(indicator) == embed(&q).ev(indicator)
        });
        assert_eq!(agree_on_indicators, p == q);
    }
}
