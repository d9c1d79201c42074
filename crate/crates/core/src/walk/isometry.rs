use serde::{Deserialize, Serialize};

use crate::ring::{Ring, RingPoint};

/// `x ↦ z^j x + t`, i.e. `τ_t ∘ ρ_{jθ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Isometry {
    pub rotation_power: i64,
    pub translation: RingPoint,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            rotation_power: 0,
            translation: RingPoint::zero(),
        }
    }

    pub fn rotation(j: i64) -> Self {
        Isometry {
            rotation_power: j,
            translation: RingPoint::zero(),
        }
    }

    pub fn translation(t: RingPoint) -> Self {
        Isometry {
            rotation_power: 0,
            translation: t,
        }
    }

    pub fn new(rotation_power: i64, translation: RingPoint) -> Self {
        Isometry {
            rotation_power,
            translation,
        }
    }

    /// `self ∘ h`.
    pub fn compose(&self, h: &Isometry, ring: &Ring) -> Isometry {
        let moved = ring.mul_z(&h.translation, self.rotation_power);
        Isometry {
            rotation_power: self.rotation_power + h.rotation_power,
            translation: ring.add(&self.translation, &moved),
        }
    }

    pub fn inverse(&self, ring: &Ring) -> Isometry {
        let t = ring.mul_z(&self.translation, -self.rotation_power);
        Isometry {
            rotation_power: -self.rotation_power,
            translation: ring.neg(&t),
        }
    }

    pub fn apply(&self, x: &RingPoint, ring: &Ring) -> RingPoint {
        ring.add(&ring.mul_z(x, self.rotation_power), &self.translation)
    }

    pub fn is_translation(&self) -> bool {
        self.rotation_power == 0
    }

    /// The translation is an integer, so it makes sense for any angle.
    pub(crate) fn integer_translation(&self) -> Option<i64> {
        let t = &self.translation;
        if t.k() == 0 && num_traits::Zero::is_zero(t.v()) {
            num_traits::ToPrimitive::to_i64(t.u())
        } else {
            None
        }
    }
}
