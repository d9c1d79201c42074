use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::lattice::{Coord, Lattice};
use crate::error::{Error, Result};
use crate::ring::{AngleSpec, EmbeddingContext, RingPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marginal {
    EndpointOnly,
    EndpointAndRotation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub point: RingPoint,
    pub rotation_power: Option<i64>,
    pub multiplicity: u128,
}

/// Exact law of `Y_N`: multiplicities over a shared total.
#[derive(Debug)]
pub struct DistributionTable {
    angle: AngleSpec,
    steps: u32,
    marginal: Marginal,
    total: u128,
    entries: Vec<TableEntry>,
    lattice: Lattice,
    coords: Vec<Coord>,
    embedded: OnceLock<Vec<Complex64>>,
}

impl Clone for DistributionTable {
    fn clone(&self) -> Self {
        DistributionTable {
            angle: self.angle.clone(),
            steps: self.steps,
            marginal: self.marginal,
            total: self.total,
            entries: self.entries.clone(),
            lattice: self.lattice,
            coords: self.coords.clone(),
            embedded: OnceLock::new(),
        }
    }
}

impl PartialEq for DistributionTable {
    fn eq(&self, o: &Self) -> bool {
        self.angle == o.angle
            && self.steps == o.steps
            && self.marginal == o.marginal
            && self.total == o.total
            && self.entries == o.entries
    }
}

/// One CSV row of a table export.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub u: String,
    pub v: String,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation_power: Option<i64>,
    pub multiplicity: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableHeader {
    pub a: i64,
    pub b: i64,
    #[serde(rename = "N")]
    pub steps: u32,
    pub total: String,
    pub marginal: Marginal,
    pub entries: usize,
}

impl DistributionTable {
    /// Builds a table from arbitrary entries; repeated keys are merged.
    pub fn from_entries(
        angle: AngleSpec,
        steps: u32,
        marginal: Marginal,
        total: u128,
        entries: impl IntoIterator<Item = TableEntry>,
    ) -> Result<Self> {
        let ring = angle.ring()?;
        let mut merged: BTreeMap<(RingPoint, Option<i64>), u128> = BTreeMap::new();
        for e in entries {
            if (marginal == Marginal::EndpointOnly) != e.rotation_power.is_none() {
                return Err(Error::invalid("entry rotation does not match the marginal"));
            }
            let key = (ring.normalize(&e.point), e.rotation_power);
            let slot = merged.entry(key).or_insert(0);
            *slot = slot
                .checked_add(e.multiplicity)
                .ok_or(Error::Overflow("multiplicity"))?;
        }
        let sum = merged
            .values()
            .try_fold(0u128, |acc, &m| acc.checked_add(m));
        if sum != Some(total) {
            return Err(Error::invalid("multiplicities do not sum to the total"));
        }
        let e = merged.keys().map(|(p, _)| p.k()).max().unwrap_or(0);
        let lattice = Lattice::new(&ring, e)?;
        let mut out = Vec::with_capacity(merged.len());
        let mut coords = Vec::with_capacity(merged.len());
        for ((point, rotation_power), multiplicity) in merged {
            if multiplicity == 0 {
                continue;
            }
            coords.push(lattice.from_point(&point)?);
            out.push(TableEntry {
                point,
                rotation_power,
                multiplicity,
            });
        }
        Ok(DistributionTable {
            angle,
            steps,
            marginal,
            total,
            entries: out,
            lattice,
            coords,
            embedded: OnceLock::new(),
        })
    }

    /// Entries must already be sorted, merged and canonical.
    pub(crate) fn from_sorted_parts(
        angle: AngleSpec,
        steps: u32,
        marginal: Marginal,
        total: u128,
        lattice: Lattice,
        entries: Vec<TableEntry>,
        coords: Vec<Coord>,
    ) -> Self {
        DistributionTable {
            angle,
            steps,
            marginal,
            total,
            entries,
            lattice,
            coords,
            embedded: OnceLock::new(),
        }
    }

    pub fn angle(&self) -> &AngleSpec {
        &self.angle
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn marginal(&self) -> Marginal {
        self.marginal
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Integer coordinates over `a^lattice_exponent()`, parallel to `entries`.
    pub(crate) fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn lattice_exponent(&self) -> u32 {
        self.lattice.exponent()
    }

    pub fn probability(&self, i: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.entries[i].multiplicity),
            BigInt::from(self.total),
        )
    }

    pub fn probability_f64(&self, i: usize) -> f64 {
        self.entries[i].multiplicity as f64 / self.total as f64
    }

    /// Exact `ℙ(Y_N = point)`, summed over rotations when present.
    pub fn atom_probability(&self, point: &RingPoint) -> Result<BigRational> {
        let ring = self.angle.ring()?;
        let p = ring.normalize(point);
        let start = self.entries.partition_point(|e| e.point < p);
        let hits: u128 = self.entries[start..]
            .iter()
            .take_while(|e| e.point == p)
            .map(|e| e.multiplicity)
            .sum();
        Ok(BigRational::new(
            BigInt::from(hits),
            BigInt::from(self.total),
        ))
    }

    /// Sum of all probabilities; exactly one for a valid table.
    pub fn total_mass(&self) -> BigRational {
        let s: BigInt = self
            .entries
            .iter()
            .map(|e| BigInt::from(e.multiplicity))
            .sum();
        BigRational::new(s, BigInt::from(self.total))
    }

    /// Drop the rotation coordinate.
    pub fn endpoint_marginal(&self) -> DistributionTable {
        if self.marginal == Marginal::EndpointOnly {
            return self.clone();
        }
        let mut entries: Vec<TableEntry> = Vec::new();
        let mut coords: Vec<Coord> = Vec::new();
        for (e, c) in self.entries.iter().zip(&self.coords) {
            match entries.last_mut() {
                Some(last) if last.point == e.point => last.multiplicity += e.multiplicity,
                _ => {
                    entries.push(TableEntry {
                        point: e.point.clone(),
                        rotation_power: None,
                        multiplicity: e.multiplicity,
                    });
                    coords.push(*c);
                }
            }
        }
        Self::from_sorted_parts(
            self.angle.clone(),
            self.steps,
            Marginal::EndpointOnly,
            self.total,
            self.lattice,
            entries,
            coords,
        )
    }

    /// Complex values of the endpoints (128-bit evaluation rounded to f64).
    pub fn embedded(&self) -> &[Complex64] {
        self.embedded.get_or_init(|| {
            let ctx = EmbeddingContext::new(&self.angle, 128).expect("rational angle");
            self.entries
                .iter()
                .map(|e| ctx.embed_f64(&e.point))
                .collect()
        })
    }

    /// `max |p|` over the support.
    pub fn radius(&self) -> f64 {
        self.embedded().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn header(&self) -> TableHeader {
        let (a, b) = match self.angle {
            AngleSpec::RationalCosine { a, b } => (a, b),
            AngleSpec::Numeric(_) => unreachable!("tables are exact"),
        };
        TableHeader {
            a,
            b,
            steps: self.steps,
            total: self.total.to_string(),
            marginal: self.marginal,
            entries: self.entries.len(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = TableRow> + '_ {
        self.entries.iter().map(|e| TableRow {
            u: e.point.u().to_string(),
            v: e.point.v().to_string(),
            k: e.point.k(),
            rotation_power: e.rotation_power,
            multiplicity: e.multiplicity.to_string(),
        })
    }

    /// `(x, y, probability)` per endpoint.
    pub fn point_cloud(&self) -> Vec<(f64, f64, f64)> {
        let t = self.endpoint_marginal();
        let pts = t.embedded();
        (0..t.len())
            .map(|i| (pts[i].re, pts[i].im, t.probability_f64(i)))
            .collect()
    }
}

/// Exact or interval-valued probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallProbability {
    #[serde(serialize_with = "super::measure::ser_ratio")]
    pub lo: BigRational,
    #[serde(serialize_with = "super::measure::ser_ratio")]
    pub hi: BigRational,
    pub boundary_atoms: usize,
}

impl BallProbability {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn width(&self) -> f64 {
        self.hi_f64() - self.lo_f64()
    }
}

/// Mass of the closed disc `|p − center| ≤ radius`. Atoms too close to the
/// boundary to decide at double precision widen the result into an interval.
pub fn ball_probability(
    table: &DistributionTable,
    center: Complex64,
    radius: f64,
) -> Result<BallProbability> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::invalid("radius must be positive"));
    }
    let pts = table.embedded();
    let mut inside = 0u128;
    let mut boundary = 0u128;
    let mut boundary_atoms = 0;
    for (p, e) in pts.iter().zip(table.entries()) {
        let d = (p - center).norm();
        let band = 8.0 * f64::EPSILON * (p.norm() + center.norm() + radius.min(1e300)) + 1e-300;
        if (d - radius).abs() <= band {
            boundary += e.multiplicity;
            boundary_atoms += 1;
        } else if d < radius {
            inside += e.multiplicity;
        }
    }
    let t = BigInt::from(table.total());
    let lo = BigRational::new(BigInt::from(inside), t.clone());
    let hi = if boundary == 0 {
        lo.clone()
    } else {
        BigRational::new(BigInt::from(inside + boundary), t)
    };
    Ok(BallProbability {
        lo,
        hi,
        boundary_atoms,
    })
}
