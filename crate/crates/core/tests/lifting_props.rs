use critorbit::arith::{primes_up_to, val_p};
use critorbit::orbit::{is_primitive_divisor, orbit_with_derivative, RationalParam};
use critorbit::{adjust_power, hensel_lift, Error, LiftResult};
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

fn bu(x: u64) -> BigUint {
    BigUint::from(x)
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(primes_up_to(100))
}

/// First `c0 ≥ start` (cyclically mod p) whose lift succeeds.
fn some_lift(d: u32, n: u64, p: u64, start: u64, precision: u32, unit_derivative: bool) -> Option<LiftResult> {
    (0..p).map(|k| (start + k) % p).find_map(|c0| {
        match hensel_lift(d, n, &bu(p), &BigInt::from(c0), precision) {
            Ok(l) if l.shift_valuation.is_some() && (!unit_derivative || l.v_df == 0) => Some(l),
            _ => None,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 100,
        max_global_rejects: 20_000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn adjust_power_hits_exact_valuation(
        d in 2u32..4, n in 1u64..6, p in small_prime(), r in 1u32..9, start in 0u64..100,
    ) {
        let lift = some_lift(d, n, p, start, r + 2, true);
        prop_assume!(lift.is_some());
        let lift = lift.unwrap();
        let c_r = adjust_power(&lift, r).unwrap();
        let param = RationalParam::integer(BigInt::from(c_r.clone()));
        prop_assert_eq!(is_primitive_divisor(d, &param, n, &bu(p)).unwrap(), (true, r));
        let diff = BigInt::from(c_r) - BigInt::from(lift.value.clone());
        prop_assert_eq!(val_p(&diff, &bu(p)).unwrap(), r);
    }

    #[test]
    fn lift_is_unique_and_shift_is_consistent(
        d in 2u32..4, n in 1u64..6, p in small_prime(), precision in 2u32..12, start in 0u64..100, k in 1u64..50,
    ) {
        let lift = some_lift(d, n, p, start, precision, false);
        prop_assume!(lift.is_some());
        let lift = lift.unwrap();
        let shift = lift.shift_valuation.unwrap();
        prop_assert_eq!(shift, lift.v_f.unwrap() - lift.v_df);

        let pb = bu(p);
        let (f, _) = orbit_with_derivative(d, &lift.lifted_value(), n);
        prop_assert!(f.is_zero());
        if shift < precision {
            let diff = BigInt::from(lift.value.clone()) - &lift.base_c0;
            prop_assert_eq!(val_p(&diff, &pb).unwrap(), shift);
        }

        let other = BigInt::from(lift.value.clone()) + BigInt::from(k) * BigInt::from(pb.pow(shift + 1));
        match hensel_lift(d, n, &pb, &other, precision) {
            Ok(again) => prop_assert_eq!(again.value, lift.value),
            Err(e) => prop_assert!(false, "relift from {} failed: {}", other, e),
        }
    }
}

#[test]
fn obstruction_is_reported_with_both_valuations() {
    match hensel_lift(2, 5, &bu(13), &BigInt::from(3), 4) {
        Err(Error::HenselHypothesis { v_f, v_df }) => assert_eq!((v_f, v_df), (1, Some(1))),
        other => panic!("{other:?}"),
    }
}
