//! Near-resonance pseudo-classical dynamics and the one-parameter scaling law.
//!
//! Close to `tau = 2 pi l` the detuning plays the role of Planck's constant
//! and the rotor follows the standard map `theta' = theta + J`,
//! `J' = J + k sin(theta')` with `k = |epsilon| phi_d`. In scaled time
//! `s = t sqrt(k)` this becomes the pendulum `theta'' = sin(theta)`, and the
//! ratchet current depends on kick number, strength and detuning only
//! through `z = t sqrt(phi_d |epsilon|)`.
//!
//! Sign convention: with the kick `e^{-i phi cos(theta + gamma)}` and a
//! two-level state whose density is `1 + cos(theta - gamma)`, the predicted
//! current is `<p> = +phi_d t sin(gamma) S(z) / z`, so the scaled value
//! tends to `+1/2` as `z -> 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{run_schedule, Engine, KickSchedule};
use crate::observe::mean_momentum;
use crate::par::{map_ordered, pairwise_sum, Execution};
use crate::state::LadderState;

/// Largest change on doubling the resolution that `compute_s` accepts.
pub const REFINE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub theta: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub weight: f64,
}

/// One step of the map: drift with the old momentum, then kick.
pub fn map_step(point: PhasePoint, k_tilde: f64) -> PhasePoint {
    let theta = (point.theta + point.j).rem_euclid(2.0 * PI);
    PhasePoint { theta, j: point.j + k_tilde * theta.sin(), weight: point.weight }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEnsemble {
    pub points: Vec<PhasePoint>,
}

impl ClassicalEnsemble {
    pub fn total_weight(&self) -> f64 {
        let w: Vec<f64> = self.points.iter().map(|p| p.weight).collect();
        pairwise_sum(&w)
    }

    pub fn mean_j(&self) -> f64 {
        let w: Vec<f64> = self.points.iter().map(|p| p.weight * p.j).collect();
        pairwise_sum(&w)
    }

    /// Applies `steps` map iterations to every particle.
    pub fn evolve(&self, k_tilde: f64, steps: usize, exec: Execution) -> ClassicalEnsemble {
        let points = map_ordered(&self.points, exec, |&p| (0..steps).fold(p, |q, _| map_step(q, k_tilde)));
        ClassicalEnsemble { points }
    }
}

/// Uniform angles on `[0, 2pi)` weighted by `1 + cos(theta - gamma)`.
pub fn make_ratchet_ensemble(count: usize, gamma: f64, j0: f64) -> Result<ClassicalEnsemble> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!("ensemble needs at least 2 particles, got {count}")));
    }
    let thetas: Vec<f64> = (0..count).map(|i| 2.0 * PI * i as f64 / count as f64).collect();
    let raw: Vec<f64> = thetas.iter().map(|t| 1.0 + (t - gamma).cos()).collect();
    let total = pairwise_sum(&raw);
    let points = thetas
        .iter()
        .zip(&raw)
        .map(|(&theta, &w)| PhasePoint { theta, j: j0, weight: w / total })
        .collect();
    Ok(ClassicalEnsemble { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalParams {
    pub k_tilde: f64,
    pub l: i64,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ClassicalParams {
    pub fn from_quantum(phi_d: f64, l: i64, epsilon: f64, beta: f64, gamma: f64) -> Self {
        Self { k_tilde: epsilon.abs() * phi_d, l, epsilon, beta, gamma }
    }

    pub fn phi_d(&self) -> f64 {
        self.k_tilde / self.epsilon.abs()
    }

    /// `J = epsilon p + l pi + tau beta` for ladder momentum `p`.
    pub fn scaled_momentum_of(&self, p: f64) -> f64 {
        let tau = 2.0 * PI * self.l as f64 + self.epsilon;
        self.epsilon * p + self.l as f64 * PI + tau * self.beta
    }

    pub fn z(&self, t: usize) -> f64 {
        t as f64 * self.k_tilde.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Quantum,
    ClassicalMap,
    Pendulum,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Quantum => "quantum",
            Source::ClassicalMap => "classical-map",
            Source::Pendulum => "pendulum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub z: f64,
    pub value: f64,
    pub source: Source,
}

/// Quadrature and integrator resolution for `S(z)`.
///
/// The step count is `max(ceil(steps_per_unit * z), min_steps)`, which
/// keeps the step at or below `min(1 / steps_per_unit, z / min_steps)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub n_theta: usize,
    pub steps_per_unit: usize,
    pub min_steps: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { n_theta: 1024, steps_per_unit: 100, min_steps: 1000 }
    }
}

impl Resolution {
    pub fn steps(&self, z: f64) -> usize {
        ((self.steps_per_unit as f64 * z).ceil() as usize).max(self.min_steps)
    }

    pub fn doubled(&self) -> Self {
        Self { n_theta: 2 * self.n_theta, steps_per_unit: 2 * self.steps_per_unit, min_steps: 2 * self.min_steps }
    }
}

/// Pendulum momentum after scaled time `z` from rest at `theta0`
/// (velocity Verlet, `n` equal steps).
pub fn pendulum_momentum(theta0: f64, z: f64, n: usize) -> f64 {
    if z == 0.0 || n == 0 {
        return 0.0;
    }
    let h = z / n as f64;
    let (mut th, mut j) = (theta0, 0.0);
    let mut f = th.sin();
    for _ in 0..n {
        j += 0.5 * h * f;
        th += h * j;
        f = th.sin();
        j += 0.5 * h * f;
    }
    j
}

/// Midpoint angles on `[-pi, pi)`.
fn midpoint_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64).collect()
}

/// `S(z)` at a fixed resolution, without the convergence check.
pub fn s_at(z: f64, res: Resolution, exec: Execution) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let n = res.steps(z);
    let grid = midpoint_grid(res.n_theta);
    let terms = map_ordered(&grid, exec, |&t0| t0.sin() * pendulum_momentum(t0, z, n));
    pairwise_sum(&terms) / res.n_theta as f64
}

/// `S(z) = (1/2pi) int sin(theta0) J'(theta0, z) dtheta0` from the pendulum.
///
/// Evaluates at `res` and at twice `res`; fails if they differ by more than
/// `REFINE_TOL`, otherwise returns the finer value.
pub fn compute_s(z: f64, res: Resolution) -> Result<f64> {
    compute_s_with(z, res, Execution::Sequential)
}

pub fn compute_s_with(z: f64, res: Resolution, exec: Execution) -> Result<f64> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidParameter(format!("z = {z} must be finite and >= 0")));
    }
    let coarse = s_at(z, res, exec);
    let fine = s_at(z, res.doubled(), exec);
    let delta = (fine - coarse).abs();
    if delta > REFINE_TOL {
        return Err(Error::NeedsRefinement { z, delta });
    }
    Ok(fine)
}

/// `S(z) / z`, continued to `1/2` at `z = 0`.
pub fn s_over_z(z: f64, res: Resolution) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.5);
    }
    Ok(compute_s(z, res)? / z)
}

/// Pendulum curve of `S(z) / z` over `zs`, one task per point.
pub fn s_curve(zs: &[f64], res: Resolution, exec: Execution) -> Result<Vec<ScalingPoint>> {
    map_ordered(zs, exec, |&z| s_over_z(z, res).map(|value| ScalingPoint { z, value, source: Source::Pendulum }))
        .into_iter()
        .collect()
}

/// `S(z)` from the standard map at small `k_tilde`: `round(z / sqrt(k))`
/// kicks from `J = 0`, momentum rescaled by `1 / sqrt(k)`.
pub fn s_map(z: f64, k_tilde: f64, n_theta: usize) -> Result<f64> {
    if k_tilde.is_nan() || k_tilde <= 0.0 {
        return Err(Error::InvalidParameter("map route needs k_tilde > 0".into()));
    }
    let root = k_tilde.sqrt();
    let t = (z / root).round() as usize;
    let terms: Vec<f64> = midpoint_grid(n_theta)
        .into_iter()
        .map(|t0| {
            let end = (0..t).fold(PhasePoint { theta: t0, j: 0.0, weight: 1.0 }, |p, _| map_step(p, k_tilde));
            t0.sin() * end.j / root
        })
        .collect();
    Ok(pairwise_sum(&terms) / n_theta as f64)
}

/// Classical prediction for a run of `t` kicks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPrediction {
    pub point: ScalingPoint,
    /// Predicted momentum change `<p_t> - <p_0>` in recoil units.
    pub mean_p: f64,
}

pub fn scaled_momentum_classical(params: &ClassicalParams, t: usize, res: Resolution) -> Result<ClassicalPrediction> {
    if t == 0 {
        return Err(Error::InvalidParameter("need at least one kick".into()));
    }
    let sg = params.gamma.sin();
    if sg.abs() < 1e-12 {
        return Err(Error::UndefinedScaling);
    }
    let z = params.z(t);
    let value = s_over_z(z, res)?;
    Ok(ClassicalPrediction {
        point: ScalingPoint { z, value, source: Source::Pendulum },
        mean_p: params.phi_d() * t as f64 * sg * value,
    })
}

/// Relative phase of an equal-weight adjacent pair, `arg(a_{n+1} / a_n)`.
pub fn two_level_phase(state: &LadderState) -> Result<f64> {
    let occupied: Vec<(i64, Complex64)> = state
        .levels()
        .zip(state.amps().iter().copied())
        .filter(|(_, a)| a.norm_sqr() > 1e-12)
        .collect();
    match occupied.as_slice() {
        [(n0, a0), (n1, a1)] if n1 - n0 == 1 && (a0.norm_sqr() - a1.norm_sqr()).abs() < 1e-9 => {
            Ok((a1 / a0).arg())
        }
        _ => Err(Error::NotTwoLevelRatchet),
    }
}

/// Ratchet pair `(|-1> + e^{-i gamma}|0>)/sqrt2` at `beta = 1/2`.
///
/// The momenta `-1/2` and `+1/2` straddle zero, so the scaled momentum
/// `J_0` sits at the island centre (up to `+-epsilon/2`) for every `l`.
pub fn island_centred_pair(gamma: f64) -> LadderState {
    LadderState::normalized(
        0.5,
        -1,
        vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -gamma)],
    )
    .expect("fixed two-level state is valid")
}

/// Quantum scaled momentum `(<p_t> - <p_0>) / (phi_d t sin g)` at
/// `z = t sqrt(phi_d |epsilon|)`, where `g` is the potential phase minus
/// the relative phase of the two-level initial state.
pub fn scaled_momentum_quantum(schedule: &KickSchedule, initial: &LadderState) -> Result<ScalingPoint> {
    let (_, eps) = schedule.period.detuning();
    if eps == 0.0 {
        return Err(Error::OnResonance);
    }
    if schedule.kicks == 0 {
        return Err(Error::InvalidParameter("need at least one kick".into()));
    }
    let alpha = two_level_phase(initial)?;
    let sg = (schedule.gamma - alpha).sin();
    if sg.abs() < 1e-12 {
        return Err(Error::UndefinedScaling);
    }
    let states = run_schedule(initial, schedule, Engine::Bessel)?;
    let dp = mean_momentum(states.last().unwrap()) - mean_momentum(&states[0]);
    let t = schedule.kicks as f64;
    Ok(ScalingPoint {
        z: t * (schedule.phi_d * eps.abs()).sqrt(),
        value: dp / (schedule.phi_d * t * sg),
        source: Source::Quantum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_step_examples() {
        let p = PhasePoint { theta: 0.0, j: 0.0, weight: 1.0 };
        assert_eq!(map_step(p, 0.7), p);
        let q = map_step(PhasePoint { theta: PI / 2.0, j: 0.0, weight: 1.0 }, 1.0);
        assert_eq!(q.theta, PI / 2.0);
        assert_eq!(q.j, 1.0);
    }

    #[test]
    fn ensemble_weights() {
        let e = make_ratchet_ensemble(4, 0.0, 0.0).unwrap();
        let w: Vec<f64> = e.points.iter().map(|p| p.weight).collect();
        let want = [0.5, 0.25, 0.0, 0.25];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((e.total_weight() - 1.0).abs() < 1e-15);
        assert!(make_ratchet_ensemble(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn s_small_z_limit() {
        assert_eq!(compute_s(0.0, Resolution::default()).unwrap(), 0.0);
        let v = s_over_z(0.01, Resolution::default()).unwrap();
        assert!((v - 0.5).abs() < 1e-4);
    }

    #[test]
    fn s_is_negative_near_inversion() {
        let v = s_over_z(5.6, Resolution::default()).unwrap();
        assert!(v < -0.09, "{v}");
    }

    #[test]
    fn coarse_resolution_flags_refinement() {
        let res = Resolution { n_theta: 4, steps_per_unit: 1, min_steps: 2 };
        assert!(matches!(compute_s(9.0, res), Err(Error::NeedsRefinement { .. })));
    }

    #[test]
    fn classical_prediction_sign() {
        let up = ClassicalParams::from_quantum(1.8, 1, 0.001, 0.5, PI / 2.0);
        let down = ClassicalParams { gamma: -PI / 2.0, ..up };
        let a = scaled_momentum_classical(&up, 2, Resolution::default()).unwrap();
        let b = scaled_momentum_classical(&down, 2, Resolution::default()).unwrap();
        assert!(a.mean_p > 0.0);
        assert!((a.mean_p + b.mean_p).abs() < 1e-12);
        let flat = ClassicalParams { gamma: PI, ..up };
        assert_eq!(scaled_momentum_classical(&flat, 2, Resolution::default()).unwrap_err(), Error::UndefinedScaling);
    }

    #[test]
    fn j0_is_centred_for_the_pair() {
        for &l in &[0, 1, 2] {
            let c = ClassicalParams::from_quantum(1.8, l, 0.2, 0.5, 0.0);
            for p in [-1.0, 0.0] {
                let j = c.scaled_momentum_of(p).rem_euclid(2.0 * PI);
                let off = j.min(2.0 * PI - j);
                assert!((off - 0.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quantum_preconditions() {
        let pair = island_centred_pair(-PI / 2.0);
        let on = KickSchedule::resonant(1.4, 0.0, 3);
        assert_eq!(scaled_momentum_quantum(&on, &pair).unwrap_err(), Error::OnResonance);
        let off = KickSchedule::detuned(1.4, 1, 0.1, 0.0, 3);
        let wide = LadderState::consecutive(-1, 1, 0.0, 0.5).unwrap();
        assert_eq!(scaled_momentum_quantum(&off, &wide).unwrap_err(), Error::NotTwoLevelRatchet);
        assert!(scaled_momentum_quantum(&off, &pair).is_ok());
    }
}
