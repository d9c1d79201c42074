use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;

use super::{CharFnEstimate, Frequency, Method, Neumaier};
use crate::error::{Error, Result};
use crate::hp;
use crate::walk::DistributionTable;

const CHUNK: usize = 1 << 12;

/// `Σ_p ℙ(Y_N = p) e^{−i⟨ξ, p⟩}` over an exact table.
///
/// For a ring frequency the phase of `p = (U + V z)/a^E` is `U α + V β` with
/// fixed-point turns `α, β`, so each phase is reduced modulo 2π exactly up to
/// a `2^{-118}` error per unit of `|U| + |V|`.
pub fn charfn_table(table: &DistributionTable, xi: &Frequency) -> Result<CharFnEstimate> {
    xi.check_precision()?;
    let total = table.total() as f64;
    let parts: Vec<(f64, f64, f64)> = match xi {
        Frequency::Ring(x) => {
            let ring = table.angle().ring()?;
            let scale =
                BigRational::from_integer(BigInt::from(ring.a()).pow(table.lattice_exponent()));
            let turns = |q: BigRational| {
                let q = q / &scale;
                hp::rational_turns(q.numer(), q.denom())
            };
            let alpha = turns(ring.real_pairing(x, 0));
            let beta = turns(ring.real_pairing(x, 1));
            let unit = std::f64::consts::TAU * 2f64.powi(-118);
            let entries = table.entries();
            table
                .coords()
                .par_chunks(CHUNK)
                .enumerate()
                .map(|(c, chunk)| {
                    let mut re = Neumaier::default();
                    let mut im = Neumaier::default();
                    let mut err = 0.0;
                    for (i, &(u, v)) in chunk.iter().enumerate() {
                        let m = entries[c * CHUNK + i].multiplicity as f64 / total;
                        let t = (u as u128)
                            .wrapping_mul(alpha)
                            .wrapping_add((v as u128).wrapping_mul(beta));
                        re.add(m * hp::cos_turns(t));
                        im.add(-m * hp::sin_turns(t));
                        err += m
                            * (unit * (u.unsigned_abs() as f64 + v.unsigned_abs() as f64 + 1.0)
                                + hp::TURN_TRIG_ERROR);
                    }
                    (re.value(), im.value(), err)
                })
                .collect()
        }
        Frequency::Polar { r, phi } => {
            let (c, s) = (phi.cos(), phi.sin());
            let pts = table.embedded();
            let entries = table.entries();
            pts.par_chunks(CHUNK)
                .enumerate()
                .map(|(k, chunk)| {
                    let mut re = Neumaier::default();
                    let mut im = Neumaier::default();
                    let mut err = 0.0;
                    for (i, p) in chunk.iter().enumerate() {
                        let m = entries[k * CHUNK + i].multiplicity as f64 / total;
                        let t = r * (c * p.re + s * p.im);
                        re.add(m * t.cos());
                        im.add(-m * t.sin());
                        err += m * (6.0 * f64::EPSILON * r * p.norm() + 2.0 * f64::EPSILON);
                    }
                    (re.value(), im.value(), err)
                })
                .collect()
        }
    };
    if table.is_empty() {
        return Err(Error::invalid("empty table"));
    }
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    let mut err = 0.0;
    for (r, i, e) in parts {
        re.add(r);
        im.add(i);
        err += e;
    }
    let err = err + 4.0 * f64::EPSILON;
    Ok(CharFnEstimate::new(
        Complex64::new(re.value(), im.value()),
        err,
        Method::TableExact,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::{charfn_littlewood, PhaseConvention};
    use crate::ring::{AngleSpec, RingPoint};
    use crate::walk::{enumerate_exact, presets, Marginal};

    #[test]
    fn littlewood_table_matches_product() {
        let angle = AngleSpec::rational(5, 6).unwrap();
        let mu = presets("littlewood", &angle).unwrap();
        let t = enumerate_exact(&mu, 10, Marginal::EndpointOnly).unwrap();
        for xi in [
            Frequency::polar(0.8, 0.4),
            Frequency::polar(2.5, -1.0),
            Frequency::Ring(RingPoint::int(2)),
            Frequency::Ring(angle.ring().unwrap().point(3, 7, 1)),
        ] {
            let a = charfn_table(&t, &xi).unwrap();
            let b = charfn_littlewood(&angle, 10, &xi, PhaseConvention::Walk).unwrap();
            assert!((a.value() - b.value()).norm() < 1e-13, "{xi:?}");
            assert!(a.im.abs() < 1e-13);
        }
    }

    #[test]
    fn asymmetric_is_real() {
        let angle = AngleSpec::rational(5, 6).unwrap();
        let mu = presets("asymmetric3", &angle).unwrap();
        let t = enumerate_exact(&mu, 7, Marginal::EndpointOnly).unwrap();
        let v = charfn_table(&t, &Frequency::polar(1.3, 0.2)).unwrap();
        assert!(v.im.abs() < 1e-14);
        assert!(v.abs_error < 1e-13);
    }
}
