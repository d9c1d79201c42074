use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::IntPolynomial;
use crate::error::{Error, Result};
use crate::hp;
use crate::ring::{AngleSpec, EmbeddingContext};

#[derive(Clone, Debug, Serialize)]
pub struct ResultantCheck {
    /// `Res(a z² − b z + a, q)`.
    pub resultant: String,
    /// `| |Res| − a^D |q(z)|² | / (a^D |q(z)|²)` at 256 bits, with `D = deg q`.
    pub identity_gap: f64,
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Sylvester matrix of `f` and `g` (coefficients lowest degree first).
pub fn sylvester(f: &[BigInt], g: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); size];
        for (j, c) in f.iter().rev().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![BigInt::zero(); size];
        for (j, c) in g.iter().rev().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    rows
}

/// `Res(p_min, q)` for `p_min = a z² − b z + a`.
pub fn resultant_pmin(a: i64, b: i64, q: &IntPolynomial) -> Result<BigInt> {
    if q.is_zero() {
        return Ok(BigInt::zero());
    }
    let f = [BigInt::from(a), BigInt::from(-b), BigInt::from(a)];
    let g = q.to_big();
    if g.len() == 1 {
        return Ok(&g[0] * &g[0]);
    }
    Ok(bareiss_det(sylvester(&f, &g)))
}

/// Exact resultant plus the numerical identity `|Res| = a^D |q(z)|²`.
pub fn resultant_check(angle: &AngleSpec, q: &IntPolynomial) -> Result<ResultantCheck> {
    let ring = angle.ring()?;
    let res = resultant_pmin(ring.a(), ring.b(), q)?;
    if res.is_zero() {
        return Err(Error::invalid(
            "resultant vanishes: the minimal polynomial divides q",
        ));
    }
    let ctx = EmbeddingContext::new(angle, 256)?;
    let v = ctx.embed(&q.eval_ring(&ring));
    let aq = BigInt::from(ring.a()).pow(q.degree() as u32);
    let rhs = v.norm2().mul_int(&aq);
    let lhs = hp::Fixed::from_int(res.abs(), rhs.bits());
    let gap = lhs.sub(&rhs).abs().div(&rhs).to_f64();
    Ok(ResultantCheck {
        resultant: res.to_string(),
        identity_gap: gap,
    })
}

/// Resultant by the Euclidean algorithm over ℚ, an independent route used as
/// a cross-check of the determinant.
pub fn resultant_euclid(f: &[BigInt], g: &[BigInt]) -> BigInt {
    fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
        while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
    fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut r = a.to_vec();
        while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
            let lead = r.last().unwrap() / b.last().unwrap();
            let shift = r.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                r[shift + i] = &r[shift + i] - &lead * c;
            }
            r.pop();
            if r.is_empty() {
                r.push(BigRational::zero());
            }
            r = trim(r);
        }
        r
    }
    let to_q = |v: &[BigInt]| {
        trim(
            v.iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    };
    let mut f = to_q(f);
    let mut g = to_q(g);
    let mut acc = BigRational::from_integer(BigInt::from(1));
    loop {
        let (m, n) = (f.len() - 1, g.len() - 1);
        if n == 0 {
            if g[0].is_zero() {
                return BigInt::zero();
            }
            let r = acc * g[0].pow(m as i32);
            return r.to_integer();
        }
        // Res(f, g) = (−1)^{mn} Res(g, f);  Res(g, f) = lc(g)^{m − deg r} Res(g, r).
        let r = rem(&f, &g);
        let dr = if r.len() == 1 && r[0].is_zero() {
            return BigInt::zero();
        } else {
            r.len() - 1
        };
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        acc *= g[n].pow((m - dr) as i32);
        f = g;
        g = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn small_resultants() {
        let q: IntPolynomial = "z - 1".parse().unwrap();
        assert_eq!(resultant_pmin(5, 6, &q).unwrap(), BigInt::from(4));
        assert_eq!(
            resultant_pmin(5, 6, &IntPolynomial::constant(1)).unwrap(),
            BigInt::from(1)
        );
        let angle = AngleSpec::rational(5, 6).unwrap();
        let c = resultant_check(&angle, &q).unwrap();
        assert_eq!(c.resultant, "4");
        assert!(c.identity_gap < 1e-60);
    }

    #[test]
    fn euclid_agrees_with_determinant() {
        let f = big(&[5, -6, 5]);
        for g in [&[1, 1][..], &[3, 0, -2, 1], &[-4, 2, 7, 1, 1, -3], &[2, 5]] {
            let g = big(g);
            assert_eq!(
                resultant_euclid(&f, &g),
                bareiss_det(sylvester(&f, &g)),
                "{g:?}"
            );
        }
        // Res(z² − 1, z − 2) = 3; Res(z − 2, z² − 1) = 3.
        assert_eq!(
            resultant_euclid(&big(&[-1, 0, 1]), &big(&[-2, 1])),
            BigInt::from(3)
        );
        assert_eq!(
            resultant_euclid(&big(&[-2, 1]), &big(&[-1, 0, 1])),
            BigInt::from(3)
        );
    }

    #[test]
    fn determinant() {
        let m = vec![big(&[0, 2, 1]), big(&[3, 1, 4]), big(&[1, 5, 9])];
        assert_eq!(bareiss_det(m), BigInt::from(-32));
    }
}
