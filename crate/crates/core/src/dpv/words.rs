//! Words in two isometries whose product is a prescribed translation.
//!
//! With `C = g₁g₂g₁⁻¹g₂⁻¹ = τ_a` and `g₁` a rotation by `θ`, conjugation
//! gives `g₁ τ_u g₁⁻¹ = τ_{zu}`. Writing `p = c₀ + z q`, the word
//! `C^{c₀} g₁ W(q) g₁⁻¹` has product `τ_{a p(z)}` and length
//! `4 Σ|c_j| + 2 deg p ≤ 4 w(p)`.

use std::fmt;

use serde::Serialize;

use super::IntPolynomial;
use crate::error::{Error, Result};
use crate::ring::{Ring, RingPoint};
use crate::walk::Isometry;

/// Letters `A = g₁`, `a = g₁⁻¹`, `B = g₂`, `b = g₂⁻¹`, composed left to right
/// as maps: `AB` is `g₁ ∘ g₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Word(String);

impl Word {
    pub fn parse(s: &str) -> Result<Self> {
        if s.chars().all(|c| matches!(c, 'A' | 'a' | 'B' | 'b')) {
            Ok(Word(s.to_string()))
        } else {
            Err(Error::invalid(format!(
                "word {s:?} is not over the alphabet AaBb"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Exact product isometry.
    pub fn evaluate(&self, pair: &GeneratorPair) -> Isometry {
        let ring = &pair.ring;
        let (ai, bi) = (pair.g1.inverse(ring), pair.g2.inverse(ring));
        self.0.chars().fold(Isometry::identity(), |acc, c| {
            let g = match c {
                'A' => &pair.g1,
                'a' => &ai,
                'B' => &pair.g2,
                _ => &bi,
            };
            acc.compose(g, ring)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Two generators with `g₁` a rotation by exactly `θ` (about any centre).
#[derive(Clone, Debug)]
pub struct GeneratorPair {
    pub ring: Ring,
    pub g1: Isometry,
    pub g2: Isometry,
    /// Translation of the commutator `g₁g₂g₁⁻¹g₂⁻¹`.
    pub commutator: RingPoint,
}

impl GeneratorPair {
    pub fn new(ring: Ring, g1: Isometry, g2: Isometry) -> Result<Self> {
        if g1.rotation_power != 1 {
            return Err(Error::invalid("g₁ must rotate by exactly θ"));
        }
        let c = g1
            .compose(&g2, &ring)
            .compose(&g1.inverse(&ring), &ring)
            .compose(&g2.inverse(&ring), &ring);
        debug_assert!(c.is_translation());
        if c.translation.is_zero() {
            return Err(Error::invalid(
                "g₁ and g₂ commute; the commutator is trivial",
            ));
        }
        Ok(GeneratorPair {
            ring,
            g1,
            g2,
            commutator: c.translation,
        })
    }

    /// `g₁ = ρ_θ` about the origin and `g₂ = τ_1`.
    pub fn standard(ring: Ring) -> Self {
        Self::new(
            ring,
            Isometry::rotation(1),
            Isometry::translation(RingPoint::one()),
        )
        .expect("rotation and unit translation do not commute")
    }

    /// `a · p(z)`, the translation a synthesized word must realise.
    pub fn target(&self, p: &IntPolynomial) -> RingPoint {
        self.ring.mul(&self.commutator, &p.eval_ring(&self.ring))
    }
}

/// A word whose product is `τ_{a p(z)}`, `a` being the commutator translation.
pub fn word_synthesis(p: &IntPolynomial) -> Result<Word> {
    if p.is_zero() {
        return Err(Error::invalid("word synthesis needs p ≠ 0"));
    }
    let c = p.coeffs();
    let mut out = String::with_capacity(4 * p.weight() as usize);
    for (j, &cj) in c.iter().enumerate() {
        let piece = if cj >= 0 { "ABab" } else { "BAba" };
        for _ in 0..cj.unsigned_abs() {
            out.push_str(piece);
        }
        if j + 1 < c.len() {
            out.push('A');
        }
    }
    out.extend(std::iter::repeat_n('a', c.len() - 1));
    Ok(Word(out))
}

/// Synthesizes and checks the product exactly.
pub fn word_synthesis_checked(pair: &GeneratorPair, p: &IntPolynomial) -> Result<Word> {
    let w = word_synthesis(p)?;
    let prod = w.evaluate(pair);
    if !prod.is_translation() || prod.translation != pair.target(p) {
        return Err(Error::invalid(format!(
            "word for {p} does not multiply to τ_(a p(z))"
        )));
    }
    Ok(w)
}
