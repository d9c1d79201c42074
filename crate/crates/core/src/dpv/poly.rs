use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingPoint};

/// Integer polynomial `c_0 + c_1 z + … + c_D z^D`, trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![c])
    }

    /// `c z^j`.
    pub fn monomial(c: i64, j: usize) -> Self {
        let mut v = vec![0; j + 1];
        v[j] = c;
        Self::new(v)
    }

    /// Coefficients `c_0..c_D`; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial treated as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `w(p) = D + 1 + Σ|c_j|`.
    pub fn weight(&self) -> u64 {
        let l1: u64 = self.coeffs.iter().map(|c| c.unsigned_abs()).sum();
        self.degree() as u64 + 1 + l1
    }

    pub fn neg(&self) -> Self {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[i64], i: usize| v.get(i).copied().unwrap_or(0);
        let c = (0..n)
            .map(|i| {
                get(&self.coeffs, i)
                    .checked_add(get(&o.coeffs, i))
                    .ok_or(Error::Overflow("polynomial coefficient"))
            })
            .collect::<Result<_>>()?;
        Ok(Self::new(c))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        let mut c = vec![0i64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in o.coeffs.iter().enumerate() {
                let t = x.checked_mul(y).and_then(|t| t.checked_add(c[i + j]));
                c[i + j] = t.ok_or(Error::Overflow("polynomial coefficient"))?;
            }
        }
        Ok(Self::new(c))
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::constant(1);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `z^j p`.
    pub fn shift(&self, j: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![0; j];
        c.extend_from_slice(&self.coeffs);
        Self::new(c)
    }

    pub fn scale(&self, s: i64) -> Result<Self> {
        let c = self
            .coeffs
            .iter()
            .map(|c| {
                c.checked_mul(s)
                    .ok_or(Error::Overflow("polynomial coefficient"))
            })
            .collect::<Result<_>>()?;
        Ok(Self::new(c))
    }

    /// `(z^q − 1)^k`.
    pub fn gadget(q: usize, k: u32) -> Result<Self> {
        let mut base = vec![0i64; q + 1];
        base[0] = -1;
        base[q] += 1;
        Self::new(base).pow(k)
    }

    /// Exact value `p(z)` in the ring.
    pub fn eval_ring(&self, ring: &Ring) -> RingPoint {
        ring.eval_poly(&self.coeffs)
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }
}

impl fmt::Display for IntPolynomial {
    /// `3*z^2 - z + 1`, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let m = c.unsigned_abs();
            match (j, m) {
                (0, _) => write!(f, "{m}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "{m}*z")?,
                (_, 1) => write!(f, "z^{j}")?,
                _ => write!(f, "{m}*z^{j}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Accepts sums of terms like `3`, `-z`, `2*z^5`, `z^2` (any order), or
    /// a coefficient list `[c0, c1, …]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("cannot parse polynomial {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad());
        }
        if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            if inner.is_empty() {
                return Ok(Self::zero());
            }
            let c = inner
                .split(',')
                .map(|x| x.parse::<i64>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            return Ok(Self::new(c));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in t.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(&t[start..i]);
                start = i;
            }
        }
        terms.push(&t[start..]);
        let mut acc = Self::zero();
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            let (coef, power) = match body.find('z') {
                None => (body.parse::<i64>().map_err(|_| bad())?, 0usize),
                Some(p) => {
                    let c = match body[..p].strip_suffix('*') {
                        Some(n) => n.parse::<i64>().map_err(|_| bad())?,
                        None if p == 0 => 1,
                        None => return Err(bad()),
                    };
                    let rest = &body[p + 1..];
                    let e = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .ok_or_else(bad)?
                            .parse::<usize>()
                            .map_err(|_| bad())?
                    };
                    (c, e)
                }
            };
            if power > 1 << 20 {
                return Err(bad());
            }
            acc = acc.add(&Self::monomial(if neg { -coef } else { coef }, power))?;
        }
        Ok(acc)
    }
}
