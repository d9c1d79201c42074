use isomwalk::ring::{diophantine_scan, real_pairing};
use isomwalk::{AngleSpec, EmbeddingContext, Ring, RingPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn ring() -> Ring {
    AngleSpec::rational(5, 6).unwrap().ring().unwrap()
}

fn point() -> impl Strategy<Value = RingPoint> {
    (-1_000_000i64..1_000_000, -1_000_000i64..1_000_000, 0u32..5)
        .prop_map(|(u, v, k)| ring().point(u, v, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn additive_laws_and_rotation_distributes(x in point(), y in point(), w in point(), j in -20i64..20) {
        let r = ring();
        prop_assert_eq!(r.add(&r.add(&x, &y), &w), r.add(&x, &r.add(&y, &w)));
        prop_assert_eq!(r.add(&x, &y), r.add(&y, &x));
        prop_assert_eq!(r.mul_z(&r.add(&x, &y), j), r.add(&r.mul_z(&x, j), &r.mul_z(&y, j)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5_000))]

    #[test]
    fn multiplicative_laws(x in point(), y in point(), w in point()) {
        let r = ring();
        prop_assert_eq!(r.mul(&r.mul(&x, &y), &w), r.mul(&x, &r.mul(&y, &w)));
        prop_assert_eq!(r.mul(&x, &y), r.mul(&y, &x));
        prop_assert_eq!(r.mul(&x, &r.add(&y, &w)), r.add(&r.mul(&x, &y), &r.mul(&x, &w)));
        prop_assert_eq!(r.sub(&r.add(&x, &y), &y), x.clone());
    }

    #[test]
    fn canonical_forms(x in point()) {
        let r = ring();
        prop_assert_eq!(r.normalize(&x), x.clone());
        let scaled = r.scale(&x, &BigInt::from(5));
        prop_assert_eq!(r.div_a(&scaled), x.clone());
        // The same value written over a larger denominator.
        let raw = r.canon(x.u() * BigInt::from(25), x.v() * BigInt::from(25), x.k() + 2);
        prop_assert_eq!(raw, x.clone());
        let text: RingPoint = x.to_string().parse().unwrap();
        prop_assert_eq!(r.normalize(&text), x);
    }

    #[test]
    fn embedding_is_a_homomorphism(x in point(), y in point()) {
        let r = ring();
        let ctx = EmbeddingContext::new(&AngleSpec::rational(5, 6).unwrap(), 256).unwrap();
        let (ex, ey) = (ctx.embed(&x), ctx.embed(&y));
        let scale = 1.0 + ex.abs().to_f64() + ey.abs().to_f64();
        let tol = 2f64.powi(-256 + 12) * scale;
        let sum = ctx.embed(&r.add(&x, &y)).sub(&ex.add(&ey));
        prop_assert!(sum.abs().to_f64() <= tol);
        let ez = ctx.embed(&RingPoint::z());
        let rot = ctx.embed(&r.mul_z(&x, 1)).sub(&ex.mul(&ez));
        prop_assert!(rot.abs().to_f64() <= tol);
    }

    #[test]
    fn pairing_recurrence_is_exact(x in point(), j in -200i64..200) {
        let angle = AngleSpec::rational(5, 6).unwrap();
        let y = |j| real_pairing(&angle, &x, j).unwrap();
        let ratio = BigRational::new(6.into(), 5.into());
        prop_assert_eq!(y(j + 1) + y(j - 1), ratio * y(j));
    }
}

#[test]
fn powers_of_z_lie_on_the_unit_circle() {
    let r = ring();
    let ctx = EmbeddingContext::new(&AngleSpec::rational(5, 6).unwrap(), 256).unwrap();
    for j in (-1000i64..=1000).step_by(37) {
        let n2 = ctx.embed(&r.z_pow(j)).norm2().to_f64();
        assert!(
            (n2 - 1.0).abs() < 1e-60,
            "j={j}: |z^j|² − 1 = {:e}",
            n2 - 1.0
        );
        assert_eq!(r.norm2(&r.z_pow(j)), BigRational::from_integer(1.into()));
    }
}

/// `q ↦ dist(qθ, 2πℤ)` for `cos θ = 3/5` in double precision, an independent
/// oracle for the scan's running minima at small `q`.
fn dist_oracle(q: u64) -> f64 {
    let x = (q as f64 * 0.6f64.acos()).rem_euclid(std::f64::consts::TAU);
    x.min(std::f64::consts::TAU - x)
}

#[test]
fn diophantine_running_minima_match_oracle() {
    let rep = diophantine_scan(&AngleSpec::rational(5, 6).unwrap(), 2000, 1).unwrap();
    let mut best = f64::INFINITY;
    let mut expected = Vec::new();
    for q in 1..=2000u64 {
        let v = q as f64 * dist_oracle(q);
        if v < best {
            best = v;
            expected.push(q);
        }
    }
    let got: Vec<u64> = rep.running_min.iter().map(|s| s.q).collect();
    assert_eq!(got, expected);
    for s in &rep.running_min {
        let v = s.q as f64 * dist_oracle(s.q);
        assert!((s.value - v).abs() <= 1e-9 * v.max(1e-3));
    }
    // Frozen from a Python double-precision scan.
    assert_eq!(got, vec![1, 393]);
    assert!((rep.running_min[1].value - 0.893233).abs() < 1e-6);
    assert!(!rep.degenerate);
}
