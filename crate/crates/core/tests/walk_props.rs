use std::collections::BTreeMap;

use isomwalk::walk::{
    enumerate_exact, presets, sample, DistributionTable, Endpoint, GeneratorMeasure, Marginal,
};
use isomwalk::{AngleSpec, RingPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

const PRESETS: [&str; 4] = ["littlewood", "symmetric4", "asymmetric3", "translations"];

fn angle() -> AngleSpec {
    AngleSpec::rational(5, 6).unwrap()
}

fn law(t: &DistributionTable) -> BTreeMap<RingPoint, BigRational> {
    (0..t.len())
        .map(|i| (t.entries()[i].point.clone(), t.probability(i)))
        .collect()
}

/// `Y_N = g(Y'_{N−1})` with `g ~ μ` independent of `Y'`: one step of the
/// recursion, written directly against the isometry action.
fn convolve(
    mu: &GeneratorMeasure,
    prev: &BTreeMap<RingPoint, BigRational>,
) -> BTreeMap<RingPoint, BigRational> {
    let ring = mu.angle().ring().unwrap();
    let mut out: BTreeMap<RingPoint, BigRational> = BTreeMap::new();
    for atom in mu.atoms() {
        for (x, p) in prev {
            let y = ring.normalize(&atom.isometry.apply(x, &ring));
            *out.entry(y)
                .or_insert_with(|| BigRational::from_integer(BigInt::from(0))) += &atom.weight * p;
        }
    }
    out.retain(|_, p| *p != BigRational::from_integer(BigInt::from(0)));
    out
}

#[test]
fn enumeration_telescopes() {
    for name in PRESETS {
        let mu = presets(name, &angle()).unwrap();
        let mut oracle: BTreeMap<RingPoint, BigRational> =
            [(RingPoint::zero(), BigRational::one())].into();
        for n in 0..=8 {
            let t = enumerate_exact(&mu, n, Marginal::EndpointOnly).unwrap();
            assert_eq!(law(&t), oracle, "{name} N={n}");
            assert!(t.total_mass().is_one());
            oracle = convolve(&mu, &oracle);
        }
    }
}

#[test]
fn symmetric_law_is_invariant_under_negation_and_conjugation() {
    let mu = presets("symmetric4", &angle()).unwrap();
    let ring = angle().ring().unwrap();
    for n in [3, 6, 9] {
        let t = enumerate_exact(&mu, n, Marginal::EndpointOnly).unwrap();
        let base = law(&t);
        let neg: BTreeMap<_, _> = base
            .iter()
            .map(|(p, m)| (ring.normalize(&ring.neg(p)), m.clone()))
            .collect();
        let conj: BTreeMap<_, _> = base
            .iter()
            .map(|(p, m)| (ring.normalize(&ring.conj(p)), m.clone()))
            .collect();
        assert_eq!(neg, base);
        assert_eq!(conj, base);
    }
}

#[test]
fn monte_carlo_matches_exact_atoms() {
    for (name, n) in [("symmetric4", 6), ("asymmetric3", 9), ("littlewood", 13)] {
        let mu = presets(name, &angle()).unwrap();
        let t = enumerate_exact(&mu, n, Marginal::EndpointOnly).unwrap();
        let count = 200_000u64;
        let mut hits: BTreeMap<RingPoint, u64> = BTreeMap::new();
        for d in sample(&mu, n, count, 11).unwrap() {
            match d {
                Endpoint::Exact(p) => *hits.entry(p).or_default() += 1,
                Endpoint::Embedded(_) => panic!("exact angle gives exact endpoints"),
            }
        }
        let mut heaviest: Vec<usize> = (0..t.len()).collect();
        heaviest.sort_by(|&i, &j| {
            t.entries()[j]
                .multiplicity
                .cmp(&t.entries()[i].multiplicity)
        });
        for &i in heaviest.iter().take(25) {
            let p = t.probability(i).to_f64().unwrap();
            let f = *hits.get(&t.entries()[i].point).unwrap_or(&0) as f64 / count as f64;
            let sigma = (p * (1.0 - p) / count as f64).sqrt();
            assert!((f - p).abs() <= 4.0 * sigma, "{name} atom {i}: {f} vs {p}");
        }
        assert!(hits
            .keys()
            .all(|p| t.atom_probability(p).unwrap() > BigRational::from_integer(0.into())));
    }
}

#[test]
fn tables_do_not_depend_on_thread_count() {
    let mu = presets("symmetric4", &angle()).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| enumerate_exact(&mu, 11, Marginal::EndpointAndRotation).unwrap())
    };
    assert_eq!(run(1), run(4));
}
