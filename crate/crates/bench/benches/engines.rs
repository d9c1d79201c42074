use criterion::{black_box, criterion_group, criterion_main, Criterion};
use isomwalk::charfn::{
    charfn_littlewood, charfn_table, wreath_transfer, Frequency, PhaseConvention,
};
use isomwalk::dpv::{certify_dpv, pigeonhole_search, verify_certificate, Strategy};
use isomwalk::padic::padic_audit_exhaustive;
use isomwalk::walk::{enumerate_exact, presets, Marginal};
use isomwalk::AngleSpec;

fn angle() -> AngleSpec {
    AngleSpec::rational(5, 6).unwrap()
}

fn walks(c: &mut Criterion) {
    let a = angle();
    let sym = presets("symmetric4", &a).unwrap();
    let mut g = c.benchmark_group("walk");
    g.sample_size(10);
    g.bench_function("enumerate symmetric4 N=11", |b| {
        b.iter(|| enumerate_exact(&sym, black_box(11), Marginal::EndpointOnly).unwrap())
    });
    g.finish();
}

fn charfns(c: &mut Criterion) {
    let a = angle();
    let xi = Frequency::polar(37.5, 1.1);
    let sym = presets("symmetric4", &a).unwrap();
    let table = enumerate_exact(&sym, 11, Marginal::EndpointOnly).unwrap();
    let mut g = c.benchmark_group("charfn");
    g.bench_function("product N=1024", |b| {
        b.iter(|| charfn_littlewood(&a, black_box(1024), &xi, PhaseConvention::Walk).unwrap())
    });
    g.bench_function("table symmetric4 N=11", |b| {
        b.iter(|| charfn_table(&table, black_box(&xi)).unwrap())
    });
    g.bench_function("transfer symmetric4 N=256", |b| {
        b.iter(|| wreath_transfer(&sym, black_box(256), &xi).unwrap())
    });
    g.finish();
}

fn searches(c: &mut Criterion) {
    let a = angle();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("pigeonhole D=10", |b| {
        b.iter(|| pigeonhole_search(&a, black_box(10)).unwrap())
    });
    g.bench_function("certify and verify n=2000 R=20", |b| {
        b.iter(|| {
            let cert = certify_dpv(&a, black_box(2000), 20.0, Strategy::GadgetOnly).unwrap();
            verify_certificate(&a, &cert).unwrap()
        })
    });
    g.bench_function("padic audit |u|,|v|<=40", |b| {
        b.iter(|| padic_audit_exhaustive(&a, black_box(40), 0, 60, 6).unwrap())
    });
    g.finish();
}

criterion_group!(benches, walks, charfns, searches);
criterion_main!(benches);
