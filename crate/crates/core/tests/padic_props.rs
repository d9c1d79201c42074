use isomwalk::padic::{padic_audit, scan, valuation, Valuation};
use isomwalk::{AngleSpec, RingPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn angle() -> AngleSpec {
    AngleSpec::rational(5, 6).unwrap()
}

fn xi() -> impl Strategy<Value = RingPoint> {
    let ring = angle().ring().unwrap();
    (-100_000i64..100_000, -100_000i64..100_000, 0u32..3)
        .prop_map(move |(u, v, k)| ring.point(u, v, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn scan_invariants(x in xi(), j_lo in -30i64..30) {
        let a = angle();
        let ring = a.ring().unwrap();
        let s = scan(&a, &x, j_lo, j_lo + 40).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let ratio = BigRational::new(6.into(), 5.into());
        for w in s.rows.windows(3) {
            prop_assert_eq!(&w[0].y + &w[2].y, &ratio * &w[1].y);
        }
        let r2 = ring.norm2(&x);
        for row in &s.rows {
            prop_assert_eq!(&row.y - BigRational::from_integer(row.m.clone()), row.t.clone());
            prop_assert!(row.t.abs() <= half);
            // |m_j| ≤ r + ½, squared on both sides since |m| − ½ ≥ 0 whenever m ≠ 0.
            if !row.m.is_zero() {
                let lhs = BigRational::from_integer(row.m.abs()) - &half;
                prop_assert!(&lhs * &lhs <= r2);
            }
        }
        let thr = s.threshold();
        let mut triggered = 0;
        for w in s.rows.windows(3) {
            if w.iter().all(|r| r.t.abs() < thr) {
                triggered += 1;
                let lhs = BigInt::from(5) * (&w[2].m + &w[0].m) - BigInt::from(6) * &w[1].m;
                prop_assert!(lhs.is_zero());
            }
        }
        prop_assert_eq!(triggered, s.m_recurrence_triggered);
        prop_assert!(s.m_recurrence_failures.is_empty());
        for rep in padic_audit(&s, 6) {
            prop_assert!(rep.violations.is_empty());
            for w in &rep.windows {
                prop_assert!(w.observed.at_least((w.k * rep.v_p_a) as u64));
            }
        }
    }

    #[test]
    fn valuation_against_repeated_division(k in -10_000_000i64..10_000_000, p in prop::sample::select(vec![2u64, 3, 5, 7, 13])) {
        let v = valuation(&BigInt::from(k), p).unwrap();
        if k == 0 {
            prop_assert_eq!(v, Valuation::Infinite);
        } else {
            let mut n = k.abs();
            let mut e = 0;
            while n % p as i64 == 0 {
                n /= p as i64;
                e += 1;
            }
            prop_assert_eq!(v, Valuation::Finite(e));
        }
    }
}

#[test]
fn valuation_rejects_composites() {
    assert!(valuation(&BigInt::from(12), 4).is_err());
    assert!(valuation(&BigInt::from(12), 1).is_err());
}
