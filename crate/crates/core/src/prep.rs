//! Bragg-pulse state preparation.
//!
//! A pulse is an ideal 2x2 unitary on two adjacent levels, written in the
//! (upper, lower) basis as
//!
//! ```text
//! [ cos(A/2)                 -i sin(A/2) e^{+i gb} ]
//! [ -i sin(A/2) e^{-i gb}    cos(A/2)              ]
//! ```
//!
//! so an upward transfer picks up `-i e^{+i gb}` and a downward one
//! `-i e^{-i gb}`. Plans are built outward from `|0>` in the order
//! `0->1, 0->-1, 1->2, -1->-2, ...`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::LadderState;

/// Target quasimomentum used by the equal-superposition planner.
pub const PLAN_BETA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPulse", into = "RawPulse")]
pub struct BraggPulse {
    n_a: i64,
    n_b: i64,
    area: f64,
    gamma_b: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPulse {
    n_a: i64,
    n_b: i64,
    area: f64,
    gamma_b: f64,
    #[serde(default)]
    p_res: Option<f64>,
}

impl TryFrom<RawPulse> for BraggPulse {
    type Error = Error;
    fn try_from(r: RawPulse) -> Result<Self> {
        let p = BraggPulse::new(r.n_a, r.n_b, r.area, r.gamma_b)?;
        match r.p_res {
            Some(v) if v != p.p_res() => Err(Error::InvalidParameter(format!(
                "p_res {v} does not match pair ({}, {})",
                r.n_a, r.n_b
            ))),
            _ => Ok(p),
        }
    }
}

impl From<BraggPulse> for RawPulse {
    fn from(p: BraggPulse) -> Self {
        RawPulse { n_a: p.n_a, n_b: p.n_b, area: p.area, gamma_b: p.gamma_b, p_res: Some(p.p_res()) }
    }
}

impl BraggPulse {
    pub fn new(n_a: i64, n_b: i64, area: f64, gamma_b: f64) -> Result<Self> {
        if (n_a - n_b).abs() != 1 {
            return Err(Error::NonAdjacentPair(n_a, n_b));
        }
        if !(0.0..=2.0 * PI).contains(&area) {
            return Err(Error::AreaOutOfRange(area));
        }
        if !gamma_b.is_finite() {
            return Err(Error::InvalidParameter("non-finite Bragg phase".into()));
        }
        Ok(Self { n_a, n_b, area, gamma_b })
    }

    pub fn pair(&self) -> (i64, i64) {
        (self.n_a, self.n_b)
    }
    pub fn area(&self) -> f64 {
        self.area
    }
    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }
    /// Frame momentum that makes the pair resonant.
    pub fn p_res(&self) -> f64 {
        0.5 * (self.n_a + self.n_b) as f64
    }

    /// Undoes this pulse: the phase shift by pi flips the off-diagonal sign.
    pub fn inverse(&self) -> Self {
        Self { gamma_b: self.gamma_b + PI, ..*self }
    }
}

/// Applies the pulse to the `(n_a, n_b)` pair; other levels are untouched.
pub fn apply_bragg(state: &LadderState, pulse: &BraggPulse) -> LadderState {
    let upper = pulse.n_a.max(pulse.n_b);
    let lower = upper - 1;
    let lo = state.n_min().min(lower);
    let hi = state.n_max().max(upper);
    let mut amps: Vec<Complex64> = (lo..=hi).map(|n| state.amp(n)).collect();
    let (c, s) = ((pulse.area / 2.0).cos(), (pulse.area / 2.0).sin());
    let up = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, pulse.gamma_b);
    let down = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, -pulse.gamma_b);
    let iu = (upper - lo) as usize;
    let il = (lower - lo) as usize;
    let (u, d) = (amps[iu], amps[il]);
    amps[iu] = c * u + up * d;
    amps[il] = down * u + c * d;
    LadderState::from_raw(state.beta(), lo, amps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraggPlan {
    pub pulses: Vec<BraggPulse>,
    pub target: LadderState,
}

impl BraggPlan {
    /// Applies every pulse in order to `|0>` at the target's quasimomentum.
    pub fn simulate(&self) -> LadderState {
        let start = LadderState::plane_wave(0, self.target.beta()).expect("target beta already validated");
        self.pulses.iter().fold(start, |s, p| apply_bragg(&s, p))
    }

    /// `|<target|simulated>|^2`.
    pub fn fidelity(&self) -> f64 {
        self.target.fidelity(&self.simulate())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan is always serialisable")
    }
}

fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Plans pulses that take `|0>` to `target` up to a global phase.
///
/// The target must occupy a contiguous band containing level 0 with
/// nonzero weight on 0 whenever other levels are populated. Areas come from
/// backward induction: each pulse moves the whole tail that lies beyond it.
pub fn plan_superposition(target: &LadderState) -> Result<BraggPlan> {
    let (lo, hi) = (target.n_min(), target.n_max());
    if lo > 0 || hi < 0 {
        return Err(Error::Unplannable("band does not contain level 0".into()));
    }
    let w = |n: i64| target.amp(n).norm_sqr();
    let phase0 = target.amp(0).arg();
    let rel_phase = |n: i64| target.amp(n).arg() - phase0;
    let upper_tail = |k: i64| (k..=hi).map(w).sum::<f64>();
    let lower_tail = |k: i64| (lo..=k).map(w).sum::<f64>();

    let transfer = |src: i64, dst: i64, tail: f64, held: f64| -> Result<Option<BraggPulse>> {
        if tail <= 0.0 {
            return Ok(None);
        }
        if held <= 0.0 {
            return Err(Error::Unplannable(format!("level {src} is empty but {dst} needs population")));
        }
        let frac = (tail / held).clamp(0.0, 1.0);
        let area = 2.0 * frac.sqrt().asin();
        // Upward transfers acquire -i e^{+i gb}, downward ones -i e^{-i gb}.
        let gamma_b = if dst > src {
            rel_phase(dst) - rel_phase(src) + PI / 2.0
        } else {
            rel_phase(src) - rel_phase(dst) - PI / 2.0
        };
        BraggPulse::new(src, dst, area, wrap_phase(gamma_b)).map(Some)
    };

    let mut pulses = Vec::new();
    let reach = hi.max(-lo);
    for k in 1..=reach {
        if k <= hi {
            let held = if k == 1 { 1.0 } else { upper_tail(k - 1) };
            pulses.extend(transfer(k - 1, k, upper_tail(k), held)?);
        }
        if -k >= lo {
            let held = if k == 1 { 1.0 - upper_tail(1) } else { lower_tail(1 - k) };
            pulses.extend(transfer(1 - k, -k, lower_tail(-k), held)?);
        }
    }
    Ok(BraggPlan { pulses, target: target.clone() })
}

/// Equal populations `1/N` with phases `e^{-i n gamma}`.
///
/// Centred plans span `-floor((N-1)/2) ..= ` upward; otherwise `0 ..= N-1`.
pub fn plan_equal_superposition(n: usize, gamma: f64, centered: bool) -> Result<BraggPlan> {
    if !(2..=9).contains(&n) {
        return Err(Error::CountOutOfRange(n));
    }
    let lo = if centered { -(((n - 1) / 2) as i64) } else { 0 };
    let target = LadderState::consecutive(lo, lo + n as i64 - 1, gamma, PLAN_BETA)?;
    plan_superposition(&target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_area_is_identity() {
        let s = LadderState::consecutive(-1, 1, 0.3, 0.5).unwrap();
        let p = BraggPulse::new(0, 1, 0.0, 0.7).unwrap();
        let out = apply_bragg(&s, &p);
        for n in s.levels() {
            assert!((out.amp(n) - s.amp(n)).norm() < 1e-15);
        }
    }

    #[test]
    fn pi_pulse_transfers_everything() {
        let s = LadderState::plane_wave(0, 0.5).unwrap();
        let gb = 0.4;
        let out = apply_bragg(&s, &BraggPulse::new(0, 1, PI, gb).unwrap());
        assert!(out.amp(0).norm() < 1e-15);
        let expect = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, gb);
        assert!((out.amp(1) - expect).norm() < 1e-15);
    }

    #[test]
    fn half_pulse_splits_evenly() {
        let s = LadderState::plane_wave(0, 0.5).unwrap();
        let out = apply_bragg(&s, &BraggPulse::new(0, 1, PI / 2.0, PI / 2.0).unwrap());
        assert!((out.amp(0).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((out.amp(1).norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pulse_validation() {
        assert_eq!(BraggPulse::new(0, 2, 1.0, 0.0), Err(Error::NonAdjacentPair(0, 2)));
        assert_eq!(BraggPulse::new(0, 1, 7.0, 0.0), Err(Error::AreaOutOfRange(7.0)));
        assert_eq!(BraggPulse::new(-1, -2, 1.0, 0.0).unwrap().p_res(), -1.5);
    }

    #[test]
    fn two_state_plan_is_one_half_pulse() {
        let plan = plan_equal_superposition(2, 0.0, true).unwrap();
        assert_eq!(plan.pulses.len(), 1);
        assert!((plan.pulses[0].area() - PI / 2.0).abs() < 1e-15);
        assert!((plan.pulses[0].gamma_b() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_slope_uses_plus_minus_half_pi() {
        let plan = plan_equal_superposition(5, 0.0, true).unwrap();
        let order: Vec<_> = plan.pulses.iter().map(|p| p.pair()).collect();
        assert_eq!(order, vec![(0, 1), (0, -1), (1, 2), (-1, -2)]);
        let signs: Vec<f64> = plan.pulses.iter().map(|p| p.gamma_b()).collect();
        for (g, want) in signs.iter().zip([PI / 2.0, -PI / 2.0, PI / 2.0, -PI / 2.0]) {
            assert!((g - want).abs() < 1e-12);
        }
    }

    #[test]
    fn three_state_first_pulse_moves_a_third() {
        let plan = plan_equal_superposition(3, 0.0, true).unwrap();
        let a = plan.pulses[0].area();
        assert!(((a / 2.0).sin().powi(2) - 1.0 / 3.0).abs() < 1e-15);
        let b = plan.pulses[1].area();
        assert!(((b / 2.0).sin().powi(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn plans_reach_target() {
        for n in 2..=9 {
            for &centered in &[true, false] {
                let plan = plan_equal_superposition(n, 0.9, centered).unwrap();
                assert!(plan.fidelity() > 1.0 - 1e-12, "N = {n}");
            }
        }
        assert_eq!(plan_equal_superposition(1, 0.0, true).unwrap_err(), Error::CountOutOfRange(1));
        assert_eq!(plan_equal_superposition(10, 0.0, true).unwrap_err(), Error::CountOutOfRange(10));
    }

    #[test]
    fn unequal_target_is_plannable() {
        let t = crate::state::make_superposition(
            &[
                crate::state::Component::new(-1, 0.3, 1.0),
                crate::state::Component::new(0, 0.0, 2.0),
                crate::state::Component::new(1, -1.0, 3.0),
                crate::state::Component::new(2, 2.0, 0.5),
            ],
            0.5,
        )
        .unwrap();
        assert!(plan_superposition(&t).unwrap().fidelity() > 1.0 - 1e-12);
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = plan_equal_superposition(5, 0.4, true).unwrap();
        let js = plan.to_json();
        assert!(js.contains("\"n_a\":0,\"n_b\":1,\"area\":"));
        assert!(js.contains("\"p_res\":-1.5"));
        let back: BraggPlan = serde_json::from_str(&js).unwrap();
        assert_eq!(back, plan);
    }
}
