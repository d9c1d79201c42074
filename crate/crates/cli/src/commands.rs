use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use isomwalk::charfn::{
    charfn_littlewood, charfn_table, charfn_wreath, lowfreq_check, radial_l2, wreath_transfer,
    CharFnEstimate, Frequency, PathMode, PhaseConvention,
};
use isomwalk::dpv::{
    certify_dpv, verify_certificate, word_synthesis_checked, GeneratorPair, IntPolynomial, Strategy,
};
use isomwalk::lclt::{epsilon_quadrature, lclt_compare, llerr_bound, GaussianLaw};
use isomwalk::padic::{padic_audit, padic_audit_exhaustive, scan};
use isomwalk::ring::diophantine_scan;
use isomwalk::walk::{
    enumerate_exact, enumerate_exact_with, presets, sample, DistributionTable, Endpoint,
    EnumerateOptions, GeneratorMeasure, Marginal, PRNG,
};
use isomwalk::{AngleSpec, EmbeddingContext, Error, RingPoint};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{scatter_svg, Sink};
use crate::*;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Budget(String),
    Audit(String),
    Other(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Audit(_) => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Audit(m) | Failure::Other(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Invalid(_)
            | Error::NotExact
            | Error::Regime(_)
            | Error::PrecisionShortfall { .. } => Failure::Usage(m),
            Error::Budget { .. } | Error::NotConverged(_) | Error::Overflow(_) => {
                Failure::Budget(m)
            }
            Error::NotFound(_) => Failure::Other(m),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn angle(a: &AngleArgs) -> Result<AngleSpec, Failure> {
    Ok(match &a.theta {
        Some(expr) => AngleSpec::parse_numeric(expr, a.precision_bits)?,
        None => AngleSpec::rational(a.a, a.b)?,
    })
}

fn measure(a: &AngleArgs, preset: &str) -> Result<(AngleSpec, GeneratorMeasure), Failure> {
    let angle = angle(a)?;
    let mu = presets(preset, &angle)?;
    Ok((angle, mu))
}

fn f64_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn simulate(args: &SimulateArgs, mut sink: Sink) -> Outcome {
    let (angle, mu) = measure(&args.angle, &args.preset)?;
    if !(args.window > 0.0) {
        return Err(usage("--window must be positive"));
    }
    #[derive(Serialize)]
    struct Row {
        u: String,
        v: String,
        k: u32,
        multiplicity: String,
        x: f64,
        y: f64,
    }
    let payload = match args.samples {
        None => {
            let opts = EnumerateOptions {
                marginal: Marginal::EndpointOnly,
                max_states: args.max_states as u128,
            };
            let table = enumerate_exact_with(&mu, args.n, opts)?;
            let p0 = table.atom_probability(&RingPoint::zero())?;
            let hits = table
                .entries()
                .iter()
                .find(|e| e.point.is_zero())
                .map_or(0, |e| e.multiplicity);
            let pts = table.embedded();
            sink.csv_rows(table.rows().zip(pts).map(|(r, p)| Row {
                u: r.u,
                v: r.v,
                k: r.k,
                multiplicity: r.multiplicity,
                x: p.re,
                y: p.im,
            }))?;
            sink.svg(&scatter_svg(&table.point_cloud(), args.window))?;
            json!({
                "mode": "exact",
                "preset": mu.name(),
                "N": args.n,
                "support": table.len(),
                "total": table.total().to_string(),
                "p_zero": p0.to_string(),
                "p_zero_f64": hits as f64 / table.total() as f64,
                "sigma2": mu.sigma2_f64(),
                "radius": table.radius(),
            })
        }
        Some(count) => {
            let draws = sample(&mu, args.n, count, args.seed)?;
            let mut exact: BTreeMap<RingPoint, u64> = BTreeMap::new();
            let mut numeric = Vec::new();
            for d in draws {
                match d {
                    Endpoint::Exact(p) => *exact.entry(p).or_default() += 1,
                    Endpoint::Embedded(c) => numeric.push(c),
                }
            }
            let (zeros, cloud) = if numeric.is_empty() {
                let ctx = EmbeddingContext::new(&angle, 128)?;
                let rows: Vec<(RingPoint, u64, Complex64)> = exact
                    .into_iter()
                    .map(|(p, c)| {
                        let e = ctx.embed_f64(&p);
                        (p, c, e)
                    })
                    .collect();
                sink.csv_rows(rows.iter().map(|(p, c, e)| Row {
                    u: p.u().to_string(),
                    v: p.v().to_string(),
                    k: p.k(),
                    multiplicity: c.to_string(),
                    x: e.re,
                    y: e.im,
                }))?;
                let zeros = rows.iter().find(|r| r.0.is_zero()).map_or(0, |r| r.1);
                (
                    zeros,
                    rows.iter()
                        .map(|r| (r.2.re, r.2.im, r.1 as f64 / count as f64))
                        .collect::<Vec<_>>(),
                )
            } else {
                #[derive(Serialize)]
                struct NumRow {
                    x: f64,
                    y: f64,
                }
                sink.csv_rows(numeric.iter().map(|c| NumRow { x: c.re, y: c.im }))?;
                let zeros = numeric.iter().filter(|c| c.norm() <= 1e-9).count() as u64;
                (
                    zeros,
                    numeric
                        .iter()
                        .map(|c| (c.re, c.im, 1.0 / count as f64))
                        .collect(),
                )
            };
            sink.svg(&scatter_svg(&cloud, args.window))?;
            let p = zeros as f64 / count as f64;
            json!({
                "mode": "sample",
                "preset": mu.name(),
                "N": args.n,
                "samples": count,
                "seed": args.seed,
                "prng": PRNG,
                "zero_hits": zeros,
                "p_zero_estimate": p,
                "p_zero_std_error": (p * (1.0 - p) / count as f64).sqrt(),
                "sigma2": mu.sigma2_f64(),
            })
        }
    };
    sink.finish(&payload)?;
    Ok(())
}

fn convention(s: &str) -> Result<PhaseConvention, Failure> {
    match s {
        "walk" => Ok(PhaseConvention::Walk),
        "shifted" => Ok(PhaseConvention::Shifted),
        _ => Err(usage(format!(
            "unknown phase convention {s:?}; expected walk or shifted"
        ))),
    }
}

#[derive(Serialize)]
struct CharfnRow {
    #[serde(rename = "N")]
    n: u32,
    r: f64,
    phi: f64,
    engine: String,
    re: f64,
    im: f64,
    abs_error: f64,
    std_error: Option<f64>,
}

pub fn charfn(args: &CharfnArgs, mut sink: Sink) -> Outcome {
    let (angle, mu) = measure(&args.angle, &args.preset)?;
    let conv = convention(&args.convention)?;
    for e in &args.engine {
        match e.as_str() {
            "product" if !mu.is_littlewood() => {
                return Err(usage("the product engine needs the littlewood preset"));
            }
            "product" | "table" | "wreath" | "transfer" | "sample" => {}
            _ => return Err(usage(format!("unknown engine {e:?}"))),
        }
    }
    let mut rows = Vec::new();
    let mut max_disc: f64 = 0.0;
    for &n in &args.n {
        let table = if args.engine.iter().any(|e| e == "table") {
            Some(enumerate_exact(&mu, n, Marginal::EndpointOnly)?)
        } else {
            None
        };
        for &r in &args.r {
            for &phi in &args.phi {
                let xi = Frequency::polar(r, phi);
                let mut exact_values = Vec::new();
                for e in &args.engine {
                    let est: CharFnEstimate = match e.as_str() {
                        "product" => charfn_littlewood(&angle, n, &xi, conv)?,
                        "table" => charfn_table(table.as_ref().expect("table built"), &xi)?,
                        "wreath" => charfn_wreath(&mu, n, &xi, PathMode::All)?,
                        "transfer" => wreath_transfer(&mu, n, &xi)?,
                        _ => charfn_wreath(
                            &mu,
                            n,
                            &xi,
                            PathMode::Sample {
                                paths: args.paths,
                                seed: args.seed,
                            },
                        )?,
                    };
                    if e != "sample" {
                        exact_values.push(est.value());
                    }
                    rows.push(CharfnRow {
                        n,
                        r,
                        phi,
                        engine: e.clone(),
                        re: est.re,
                        im: est.im,
                        abs_error: est.abs_error,
                        std_error: est.std_error,
                    });
                }
                for (i, x) in exact_values.iter().enumerate() {
                    for y in &exact_values[i + 1..] {
                        max_disc = max_disc.max((x - y).norm());
                    }
                }
            }
        }
    }
    sink.csv_rows(&rows)?;
    let payload = json!({
        "preset": mu.name(),
        "engines": args.engine,
        "max_discrepancy": max_disc,
        "values": rows,
    });
    sink.finish(&payload)?;
    Ok(())
}

pub fn lowfreq(args: &LowfreqArgs, mut sink: Sink) -> Outcome {
    let (_, mu) = measure(&args.angle, &args.preset)?;
    if args.directions == 0 {
        return Err(usage("--directions must be positive"));
    }
    let phis: Vec<f64> = (0..args.directions)
        .map(|k| TAU * k as f64 / args.directions as f64)
        .collect();
    let rep = lowfreq_check(&mu, &args.n, &args.r, &phis)?;
    sink.csv_rows(&rep.rows)?;
    let vals: Vec<f64> = rep.max_ratio_by_n.iter().map(|x| x.1).collect();
    let spread = vals.iter().cloned().fold(0.0, f64::max)
        / vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let payload = json!({
        "preset": mu.name(),
        "engine": rep.engine,
        "isotropic": rep.isotropic,
        "sigma2": rep.sigma2,
        "max_ratio": f64_or_null(rep.max_ratio),
        "max_ratio_by_n": rep.max_ratio_by_n.iter().map(|(n, v)| json!({"N": n, "max_ratio": f64_or_null(*v)})).collect::<Vec<_>>(),
        "spread": f64_or_null(spread),
        "excluded": rep.excluded,
    });
    sink.finish(&payload)?;
    Ok(())
}

/// `ξ ↦ φ_N(ξ)` for the cheapest exact engine that handles the measure.
fn charfn_engine<'a>(
    angle: &'a AngleSpec,
    mu: &'a GeneratorMeasure,
    n: u32,
    table: Option<&'a DistributionTable>,
) -> impl Fn(&Frequency) -> isomwalk::Result<CharFnEstimate> + Sync + 'a {
    move |xi| {
        if mu.is_littlewood() {
            charfn_littlewood(angle, n, xi, PhaseConvention::Walk)
        } else if let Some(t) = table {
            charfn_table(t, xi)
        } else {
            wreath_transfer(mu, n, xi)
        }
    }
}

fn table_if_needed(mu: &GeneratorMeasure, n: u32) -> Result<Option<DistributionTable>, Failure> {
    if mu.is_littlewood() || mu.wreath_params().is_some() {
        Ok(None)
    } else {
        Ok(Some(enumerate_exact(mu, n, Marginal::EndpointOnly)?))
    }
}

pub fn radial(args: &RadialArgs, mut sink: Sink) -> Outcome {
    let (angle, mu) = measure(&args.angle, &args.preset)?;
    #[derive(Serialize)]
    struct Row {
        #[serde(rename = "N")]
        n: u32,
        r: f64,
        value: f64,
        error_estimate: f64,
        points: usize,
    }
    let mut rows = Vec::new();
    for &n in &args.n {
        let table = table_if_needed(&mu, n)?;
        let f = charfn_engine(&angle, &mu, n, table.as_ref());
        let res = radial_l2(args.r, args.rel_tol, args.max_points, |phi| {
            f(&Frequency::polar(args.r, phi)).map(|e| e.value())
        })?;
        rows.push(Row {
            n,
            r: res.r,
            value: res.value,
            error_estimate: res.error_estimate,
            points: res.points,
        });
    }
    sink.csv_rows(&rows)?;
    let decreasing = rows.windows(2).all(|w| w[1].value < w[0].value);
    sink.finish(
        &json!({ "preset": mu.name(), "results": rows, "strictly_decreasing": decreasing }),
    )?;
    Ok(())
}

pub fn dpv(args: &DpvArgs, mut sink: Sink) -> Outcome {
    let angle = angle(&args.angle)?;
    let strategy = match args.strategy.as_str() {
        "gadget" => Strategy::GadgetOnly,
        "pigeonhole" => Strategy::GadgetPlusPigeonhole,
        s => {
            return Err(usage(format!(
                "unknown strategy {s:?}; expected gadget or pigeonhole"
            )))
        }
    };
    let cert = certify_dpv(&angle, args.n, args.r, strategy)?;
    let failures = if args.no_verify {
        None
    } else {
        Some(verify_certificate(&angle, &cert)?)
    };
    #[derive(Serialize)]
    struct Row {
        row: usize,
        col: usize,
        coeffs: String,
        weight: u64,
        log_modulus: f64,
        arg: f64,
    }
    sink.csv_rows(cert.witnesses.iter().map(|w| Row {
        row: w.row,
        col: w.col,
        coeffs: w.coeffs.to_string(),
        weight: w.weight,
        log_modulus: w.log_modulus,
        arg: w.arg,
    }))?;
    let payload = json!({
        "certificate": cert,
        "verified": failures.as_ref().map(|f| f.is_empty()),
        "verification_failures": failures,
    });
    sink.finish(&payload)?;
    if let Some(f) = failures.filter(|f| !f.is_empty()) {
        return Err(Failure::Audit(format!(
            "{} witnesses failed re-verification",
            f.len()
        )));
    }
    if args.require_complete && !cert.complete {
        return Err(Failure::Audit(format!(
            "certificate incomplete: {} cells uncovered",
            cert.uncovered.len()
        )));
    }
    Ok(())
}

pub fn words(args: &WordsArgs, mut sink: Sink) -> Outcome {
    let ring = angle(&args.angle)?.ring()?;
    let pair = GeneratorPair::standard(ring);
    #[derive(Serialize)]
    struct Row {
        poly: String,
        word: String,
        length: usize,
        weight: u64,
        translation: String,
    }
    let mut rows = Vec::new();
    for s in &args.poly {
        let p: IntPolynomial = s.parse()?;
        let w = word_synthesis_checked(&pair, &p)?;
        rows.push(Row {
            poly: p.to_string(),
            word: w.to_string(),
            length: w.len(),
            weight: p.weight(),
            translation: pair.target(&p).to_string(),
        });
    }
    sink.csv_rows(&rows)?;
    sink.finish(&json!({ "commutator": pair.commutator.to_string(), "words": rows }))?;
    Ok(())
}

fn parse_xi(angle: &AngleSpec, s: &str) -> Result<RingPoint, Failure> {
    let ring = angle.ring()?;
    if s.contains('(') {
        let p: RingPoint = s.parse()?;
        return Ok(ring.normalize(&p));
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [u, v] => {
            let u: i64 = u.parse().map_err(|_| usage(format!("bad xi {s:?}")))?;
            let v: i64 = v.parse().map_err(|_| usage(format!("bad xi {s:?}")))?;
            Ok(ring.point(u, v, 0))
        }
        _ => Err(usage(format!(
            "xi must be \"u,v\" or \"(u+v*z)/a^k\", got {s:?}"
        ))),
    }
}

pub fn padic(args: &PadicArgs, mut sink: Sink) -> Outcome {
    let angle = angle(&args.angle)?;
    match (&args.exhaustive, &args.xi) {
        (Some(bound), None) => {
            let audit = padic_audit_exhaustive(&angle, *bound, args.j_lo, args.j_hi, args.k)?;
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "K")]
                k: usize,
                windows: usize,
            }
            sink.csv_rows(audit.depth_histogram.iter().enumerate().map(|(i, &w)| Row {
                k: i + 1,
                windows: w,
            }))?;
            let clean = audit.clean();
            let (v, f) = (audit.violations.len(), audit.m_recurrence_failures.len());
            sink.finish(&json!({ "audit": audit, "clean": clean }))?;
            if !clean {
                return Err(Failure::Audit(format!(
                    "{v} valuation violations, {f} recurrence failures"
                )));
            }
        }
        (None, Some(xi)) => {
            let xi = parse_xi(&angle, xi)?;
            let s = scan(&angle, &xi, args.j_lo, args.j_hi)?;
            let reports = padic_audit(&s, args.k);
            sink.csv_text(&s.to_csv())?;
            let v: usize = reports.iter().map(|r| r.violations.len()).sum();
            let f = s.m_recurrence_failures.len();
            let payload = json!({
                "xi": xi.to_string(),
                "threshold": s.threshold().to_string(),
                "rows": s.rows.len(),
                "m_recurrence_triggered": s.m_recurrence_triggered,
                "m_recurrence_failures": s.m_recurrence_failures,
                "reports": reports,
            });
            sink.finish(&payload)?;
            if v + f > 0 {
                return Err(Failure::Audit(format!(
                    "{v} valuation violations, {f} recurrence failures"
                )));
            }
        }
        _ => return Err(usage("give exactly one of --exhaustive and --xi")),
    }
    Ok(())
}

pub fn lclt(args: &LcltArgs, mut sink: Sink) -> Outcome {
    let (angle, mu) = measure(&args.angle, &args.preset)?;
    if args.centres == 0 {
        return Err(usage("--centres must be positive"));
    }
    let table = enumerate_exact(&mu, args.n, Marginal::EndpointOnly)?;
    let sigma2 = mu.sigma2_f64();
    let law = GaussianLaw::new(sigma2, args.n)?;
    let reach = args.reach.unwrap_or(3.0 * law.variance().sqrt());
    let steps = (args.centres - 1).max(1) as f64;
    let x0: Vec<Complex64> = (0..args.centres)
        .map(|k| Complex64::from_polar(reach * k as f64 / steps, 0.37 * k as f64))
        .collect();
    let rep = lclt_compare(&table, sigma2, &args.r, &x0)?;
    sink.csv_text(&rep.to_csv())?;
    let mut payload = json!({
        "preset": mu.name(),
        "N": args.n,
        "sigma2": sigma2,
        "cells": rep.cells.len(),
        "max_normalized": rep.max_normalized,
        "max_abs_diff": rep.max_abs_diff,
        "width_failures": rep.width_failures,
    });
    let mut violations = 0;
    if let Some(l) = args.llerr {
        let own = table_if_needed(&mu, args.n)?.map(|_| &table);
        let f = charfn_engine(&angle, &mu, args.n, own);
        let eps = epsilon_quadrature(&law, l, 1e-3, 1 << 22, |s, phi| {
            f(&Frequency::polar(s, phi))
        })?;
        let mut min_slack = f64::INFINITY;
        for c in &rep.cells {
            let b = llerr_bound(eps.value, &law, l, c.r)?;
            if c.abs_diff > b.bound {
                violations += 1;
            }
            min_slack = min_slack.min(b.bound - c.abs_diff);
        }
        payload["llerr"] =
            json!({ "L": l, "epsilon": eps, "violations": violations, "min_slack": min_slack });
    }
    sink.finish(&payload)?;
    if violations > 0 {
        return Err(Failure::Audit(format!(
            "{violations} cells exceed the explicit bound"
        )));
    }
    Ok(())
}

pub fn diophantine(args: &DiophantineArgs, mut sink: Sink) -> Outcome {
    let angle = angle(&args.angle)?;
    let rep = diophantine_scan(&angle, args.q_max, args.m)?;
    sink.csv_rows(&rep.running_min)?;
    sink.finish(&json!(rep))?;
    Ok(())
}
