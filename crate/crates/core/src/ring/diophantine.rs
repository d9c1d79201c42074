use std::f64::consts::TAU;

use serde::Serialize;

use super::AngleSpec;
use crate::error::{Error, Result};
use crate::hp;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiophantineStep {
    pub q: u64,
    /// `q^m · dist(qθ, 2πℤ)`.
    pub value: f64,
}

/// Empirical record of how well multiples of θ approach `2πℤ`. This is
/// evidence only: a finite scan proves nothing about large `q`.
#[derive(Clone, Debug, Serialize)]
pub struct DiophantineReport {
    pub m: u32,
    pub q_max: u64,
    pub best_q: u64,
    pub best_value: f64,
    /// Every `q` that set a new running minimum, in increasing order.
    pub running_min: Vec<DiophantineStep>,
    /// Some `qθ` is indistinguishable from a multiple of `2π`.
    pub degenerate: bool,
    pub label: &'static str,
}

pub fn diophantine_scan(angle: &AngleSpec, q_max: u64, m: u32) -> Result<DiophantineReport> {
    if q_max < 1 || m < 1 {
        return Err(Error::invalid("q_max and m must be at least 1"));
    }
    let required = ((q_max as f64 * TAU).log2().ceil() as u32) + 53;
    if angle.precision_bits() < required {
        return Err(Error::PrecisionShortfall {
            required,
            available: angle.precision_bits(),
        });
    }
    let theta = angle.theta_turns();
    let unit_err = angle.theta_turn_error();
    let mut best = (0u64, f64::INFINITY);
    let mut running = Vec::new();
    let mut degenerate = false;
    let mut t: u128 = 0;
    for q in 1..=q_max {
        t = t.wrapping_add(theta);
        let err = TAU * (q as f64 * unit_err + 2f64.powi(-110));
        let mut dist = hp::turns_to_radians(t).abs();
        if dist <= err {
            dist = 0.0;
            degenerate = true;
        }
        let value = (q as f64).powi(m as i32) * dist;
        if value < best.1 {
            best = (q, value);
            running.push(DiophantineStep { q, value });
        }
    }
    Ok(DiophantineReport {
        m,
        q_max,
        best_q: best.0,
        best_value: best.1,
        running_min: running,
        degenerate,
        label: "evidence",
    })
}
