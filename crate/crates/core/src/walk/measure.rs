use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::Isometry;
use crate::error::{Error, Result};
use crate::ring::{AngleSpec, RingPoint};

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub isometry: Isometry,
    pub weight: BigRational,
}

/// A finitely supported probability measure on isometries.
#[derive(Clone, Debug)]
pub struct GeneratorMeasure {
    name: String,
    angle: AngleSpec,
    atoms: Vec<Atom>,
    is_symmetric: bool,
}

/// Weights of `ρ_θ`, `ρ_{−θ}` and of the pair `τ_{±1}` (split evenly).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WreathParams {
    #[serde(serialize_with = "ser_ratio")]
    pub p_plus: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub p_minus: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub p_tau: BigRational,
}

pub(crate) fn ser_ratio<S: serde::Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Integer weights over a common denominator.
#[derive(Clone, Debug)]
pub struct IntegerWeights {
    pub denominator: u128,
    pub numerators: Vec<u128>,
}

impl GeneratorMeasure {
    /// Validates and normalizes: repeated isometries are merged and atoms are
    /// sorted, so the measure does not depend on the order given.
    pub fn new(angle: AngleSpec, atoms: Vec<Atom>, name: impl Into<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("a measure needs at least one atom"));
        }
        let mut merged: BTreeMap<Isometry, BigRational> = BTreeMap::new();
        let ring = angle.ring().ok();
        for atom in atoms {
            if !atom.weight.is_positive() {
                return Err(Error::invalid("atom weights must be positive"));
            }
            let iso = match &ring {
                Some(r) => Isometry {
                    rotation_power: atom.isometry.rotation_power,
                    translation: r.normalize(&atom.isometry.translation),
                },
                None => {
                    if atom.isometry.integer_translation().is_none() {
                        return Err(Error::invalid(
                            "numeric angles only support integer translations",
                        ));
                    }
                    atom.isometry
                }
            };
            *merged.entry(iso).or_insert_with(BigRational::zero) += atom.weight;
        }
        let total: BigRational = merged.values().cloned().sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        let atoms: Vec<Atom> = merged
            .into_iter()
            .map(|(isometry, weight)| Atom { isometry, weight })
            .collect();
        let is_symmetric = symmetric(&angle, &atoms);
        Ok(GeneratorMeasure {
            name: name.into(),
            angle,
            atoms,
            is_symmetric,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn angle(&self) -> &AngleSpec {
        &self.angle
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric
    }

    pub fn max_rotation(&self) -> u32 {
        self.atoms
            .iter()
            .map(|a| a.isometry.rotation_power.unsigned_abs() as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn integer_weights(&self) -> Result<IntegerWeights> {
        let den = self
            .atoms
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.weight.denom()));
        let d = den.to_u128().ok_or(Error::Overflow("weight denominator"))?;
        let numerators = self
            .atoms
            .iter()
            .map(|a| {
                (a.weight.numer() * (&den / a.weight.denom()))
                    .to_u128()
                    .ok_or(Error::Overflow("weight numerator"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntegerWeights {
            denominator: d,
            numerators,
        })
    }

    /// `σ² = ½ E|g(0)|²`, exactly.
    pub fn sigma2(&self) -> BigRational {
        let half = BigRational::new(1.into(), 2.into());
        let e: BigRational = match self.angle.ring() {
            Ok(r) => self
                .atoms
                .iter()
                .map(|a| &a.weight * r.norm2(&a.isometry.translation))
                .sum(),
            Err(_) => self
                .atoms
                .iter()
                .map(|a| {
                    let t = BigInt::from(a.isometry.integer_translation().unwrap_or(0));
                    &a.weight * BigRational::from_integer(&t * &t)
                })
                .sum(),
        };
        e * half
    }

    pub fn sigma2_f64(&self) -> f64 {
        self.sigma2().to_f64().unwrap_or(f64::NAN)
    }

    /// Recognizes measures supported on `{ρ_θ, ρ_{−θ}, τ_1, τ_{−1}}` with
    /// equal weight on the two translations.
    pub fn wreath_params(&self) -> Option<WreathParams> {
        let mut p = WreathParams {
            p_plus: BigRational::zero(),
            p_minus: BigRational::zero(),
            p_tau: BigRational::zero(),
        };
        let mut t_plus = BigRational::zero();
        let mut t_minus = BigRational::zero();
        for a in &self.atoms {
            let iso = &a.isometry;
            match (iso.rotation_power, iso.integer_translation()) {
                (1, Some(0)) => p.p_plus = a.weight.clone(),
                (-1, Some(0)) => p.p_minus = a.weight.clone(),
                (0, Some(1)) => t_plus = a.weight.clone(),
                (0, Some(-1)) => t_minus = a.weight.clone(),
                _ => return None,
            }
        }
        if t_plus != t_minus || t_plus.is_zero() {
            return None;
        }
        p.p_tau = t_plus + t_minus;
        Some(p)
    }

    /// Every atom is `τ_{±1} ρ_θ` with weight ½.
    pub fn is_littlewood(&self) -> bool {
        self.atoms.len() == 2
            && self.atoms.iter().all(|a| {
                a.isometry.rotation_power == 1
                    && matches!(a.isometry.integer_translation(), Some(1) | Some(-1))
            })
            && self.atoms[0].weight == self.atoms[1].weight
    }
}

fn symmetric(angle: &AngleSpec, atoms: &[Atom]) -> bool {
    let inverse = |iso: &Isometry| -> Option<Isometry> {
        match angle.ring() {
            Ok(r) => Some(iso.inverse(&r)),
            Err(_) => {
                let t = iso.integer_translation()?;
                if iso.rotation_power != 0 && t != 0 {
                    return None;
                }
                Some(Isometry::new(-iso.rotation_power, RingPoint::int(-t)))
            }
        }
    };
    atoms.iter().all(|a| match inverse(&a.isometry) {
        Some(inv) => atoms
            .iter()
            .any(|b| b.isometry == inv && b.weight == a.weight),
        None => false,
    })
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational weight: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            if let Ok(n) = s.parse::<BigInt>() {
                return Ok(BigRational::from_integer(n));
            }
            let (int, frac) = s.split_once('.').ok_or_else(bad)?;
            let den = BigInt::from(10u32).pow(frac.len() as u32);
            let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            Ok(BigRational::new(num, den))
        }
    }
}

/// Weighted atoms `ρ_θ`, `ρ_{−θ}`, `τ_{±1}` (the last pair sharing `p_tau`).
pub fn wreath(
    angle: &AngleSpec,
    p_plus: BigRational,
    p_minus: BigRational,
    p_tau: BigRational,
) -> Result<GeneratorMeasure> {
    let half_tau = &p_tau / BigInt::from(2);
    let mut atoms = Vec::new();
    if !p_plus.is_zero() {
        atoms.push(Atom {
            isometry: Isometry::rotation(1),
            weight: p_plus.clone(),
        });
    }
    if !p_minus.is_zero() {
        atoms.push(Atom {
            isometry: Isometry::rotation(-1),
            weight: p_minus.clone(),
        });
    }
    if !p_tau.is_zero() {
        for s in [1, -1] {
            atoms.push(Atom {
                isometry: Isometry::translation(RingPoint::int(s)),
                weight: half_tau.clone(),
            });
        }
    }
    let name = format!("wreath({p_plus},{p_minus},{p_tau})");
    GeneratorMeasure::new(angle.clone(), atoms, name)
}

/// Named measures: `littlewood`, `symmetric4`, `asymmetric3`, `translations`
/// and `wreath(p_plus,p_minus,p_tau)`.
pub fn presets(name: &str, angle: &AngleSpec) -> Result<GeneratorMeasure> {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let name = name.trim();
    match name {
        "littlewood" => {
            let atoms = [1, -1]
                .into_iter()
                .map(|s| Atom {
                    isometry: Isometry::new(1, RingPoint::int(s)),
                    weight: q(1, 2),
                })
                .collect();
            GeneratorMeasure::new(angle.clone(), atoms, name)
        }
        "symmetric4" => rename(wreath(angle, q(1, 4), q(1, 4), q(1, 2))?, name),
        "asymmetric3" => rename(wreath(angle, q(1, 3), q(0, 1), q(2, 3))?, name),
        "translations" => {
            let atoms = [1, -1]
                .into_iter()
                .map(|s| Atom {
                    isometry: Isometry::translation(RingPoint::int(s)),
                    weight: q(1, 2),
                })
                .collect();
            GeneratorMeasure::new(angle.clone(), atoms, name)
        }
        _ => {
            let inner = name
                .strip_prefix("wreath(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::invalid(format!("unknown preset {name:?}")))?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::invalid("wreath takes three weights"));
            }
            let p: Vec<BigRational> = parts
                .iter()
                .map(|s| parse_ratio(s))
                .collect::<Result<_>>()?;
            if p.iter().any(|x| x.is_negative()) {
                return Err(Error::invalid("wreath weights must be non-negative"));
            }
            wreath(angle, p[0].clone(), p[1].clone(), p[2].clone())
        }
    }
}

fn rename(mut m: GeneratorMeasure, name: &str) -> Result<GeneratorMeasure> {
    m.name = name.to_string();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang() -> AngleSpec {
        AngleSpec::rational(5, 6).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn preset_shapes() {
        let lw = presets("littlewood", &ang()).unwrap();
        assert_eq!(lw.atoms().len(), 2);
        assert!(lw
            .atoms()
            .iter()
            .all(|a| a.weight == q(1, 2) && a.isometry.rotation_power == 1));
        assert!(lw.is_littlewood() && !lw.is_symmetric());

        let s4 = presets("symmetric4", &ang()).unwrap();
        assert_eq!(s4.atoms().len(), 4);
        assert!(s4.atoms().iter().all(|a| a.weight == q(1, 4)));
        assert!(s4.is_symmetric());

        let a3 = presets("asymmetric3", &ang()).unwrap();
        assert_eq!(a3.atoms().len(), 3);
        assert!(a3.atoms().iter().all(|a| a.weight == q(1, 3)));
        assert!(!a3.is_symmetric());
        assert_eq!(a3.wreath_params().unwrap().p_minus, q(0, 1));
    }

    #[test]
    fn wreath_parsing() {
        let w = presets("wreath(1/4, 1/4, 1/2)", &ang()).unwrap();
        assert!(w.is_symmetric());
        assert_eq!(w.wreath_params().unwrap().p_tau, q(1, 2));
        let d = presets("wreath(0.5,0.25,0.25)", &ang()).unwrap();
        assert_eq!(d.wreath_params().unwrap().p_plus, q(1, 2));
        assert!(presets("wreath(1/2,1/2,1/2)", &ang()).is_err());
        assert!(presets("wreath(1/2,1/2)", &ang()).is_err());
        assert!(presets("nope", &ang()).is_err());
    }

    #[test]
    fn sigma2_values() {
        assert_eq!(presets("littlewood", &ang()).unwrap().sigma2(), q(1, 2));
        assert_eq!(presets("symmetric4", &ang()).unwrap().sigma2(), q(1, 4));
        assert_eq!(presets("asymmetric3", &ang()).unwrap().sigma2(), q(1, 3));
    }

    #[test]
    fn merging_and_order_independence() {
        let a = Atom {
            isometry: Isometry::rotation(1),
            weight: q(1, 4),
        };
        let b = Atom {
            isometry: Isometry::rotation(-1),
            weight: q(1, 2),
        };
        let m1 = GeneratorMeasure::new(ang(), vec![a.clone(), b.clone(), a.clone()], "x").unwrap();
        let m2 = GeneratorMeasure::new(ang(), vec![b, a.clone(), a], "x").unwrap();
        assert_eq!(m1.atoms(), m2.atoms());
        assert_eq!(m1.atoms().len(), 2);
        assert!(m1.is_symmetric());
    }

    #[test]
    fn numeric_angle_measures() {
        let t = AngleSpec::parse_numeric("sqrt(2)*pi", 128).unwrap();
        let lw = presets("littlewood", &t).unwrap();
        assert!(!lw.is_symmetric());
        assert_eq!(lw.sigma2(), q(1, 2));
        assert!(presets("symmetric4", &t).unwrap().is_symmetric());
        let bad = Atom {
            isometry: Isometry::translation(RingPoint::z()),
            weight: q(1, 1),
        };
        assert!(GeneratorMeasure::new(t, vec![bad], "bad").is_err());
    }

    #[test]
    fn integer_weights_common_denominator() {
        let w = presets("wreath(1/3,1/6,1/2)", &ang())
            .unwrap()
            .integer_weights()
            .unwrap();
        assert_eq!(w.denominator, 12);
        assert_eq!(w.numerators.iter().sum::<u128>(), 12);
    }
}
