//! Kicked-rotor time evolution on the momentum ladder.
//!
//! Two kick engines: an exact Bessel convolution (default) and a
//! split-step FFT grid engine kept as an independent cross-check.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j_orders, cutoff_order};
use crate::error::{Error, Result};
use crate::state::LadderState;

/// Edge levels are dropped once their cumulative mass falls below this.
pub const TRIM_MASS: f64 = 1e-26;

/// Guard-band mass above which the grid engine reports aliasing.
pub const ALIAS_TOL: f64 = 1e-8;

/// Kick period, either directly or as an offset from a resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Period {
    Scaled { tau: f64 },
    Detuned { l: i64, epsilon: f64 },
}

impl Period {
    pub fn tau(&self) -> f64 {
        match *self {
            Period::Scaled { tau } => tau,
            Period::Detuned { l, epsilon } => 2.0 * PI * l as f64 + epsilon,
        }
    }

    /// Detuning from the nearest `2 pi l` resonance.
    pub fn detuning(&self) -> (i64, f64) {
        match *self {
            Period::Detuned { l, epsilon } => (l, epsilon),
            Period::Scaled { tau } => {
                let l = (tau / (2.0 * PI)).round() as i64;
                (l, tau - 2.0 * PI * l as f64)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickSchedule {
    pub phi_d: f64,
    #[serde(flatten)]
    pub period: Period,
    pub gamma: f64,
    pub kicks: usize,
}

impl KickSchedule {
    pub fn new(phi_d: f64, period: Period, gamma: f64, kicks: usize) -> Result<Self> {
        let s = Self { phi_d, period, gamma, kicks };
        s.validate()?;
        Ok(s)
    }

    /// Principal resonance `tau = 2 pi`.
    pub fn resonant(phi_d: f64, gamma: f64, kicks: usize) -> Self {
        Self { phi_d, period: Period::Scaled { tau: 2.0 * PI }, gamma, kicks }
    }

    pub fn detuned(phi_d: f64, l: i64, epsilon: f64, gamma: f64, kicks: usize) -> Self {
        Self { phi_d, period: Period::Detuned { l, epsilon }, gamma, kicks }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi_d.is_finite() && self.phi_d >= 0.0) {
            return Err(Error::InvalidParameter(format!("phi_d = {} must be >= 0", self.phi_d)));
        }
        if !self.period.tau().is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("non-finite period or phase".into()));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.period.tau()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Bessel,
    Grid,
}

/// `a_n <- a_n e^{-i tau (n + beta)^2 / 2}`.
pub fn free_evolve(state: &LadderState, tau: f64) -> LadderState {
    let beta = state.beta();
    let amps = state
        .levels()
        .zip(state.amps())
        .map(|(n, a)| {
            let p = n as f64 + beta;
            a * Complex64::from_polar(1.0, -0.5 * tau * p * p)
        })
        .collect();
    LadderState::from_raw(beta, state.n_min(), amps)
}

/// Coefficients `(-i)^m J_m(phi) e^{i m gamma}` for `m = -m_max ..= m_max`.
fn kick_coefficients(phi: f64, gamma: f64, m_max: usize) -> Vec<Complex64> {
    let j = bessel_j_orders(phi, m_max);
    let minus_i_pow = |m: i64| match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    (-(m_max as i64)..=m_max as i64)
        .map(|m| {
            let mag = j[m.unsigned_abs() as usize];
            let jm = if m < 0 && m % 2 != 0 { -mag } else { mag };
            minus_i_pow(m) * jm * Complex64::from_polar(1.0, m as f64 * gamma)
        })
        .collect()
}

/// Applies `e^{-i phi cos(theta + gamma)}` by Jacobi-Anger convolution.
pub fn apply_kick_bessel(state: &LadderState, phi_d: f64, gamma: f64) -> LadderState {
    if phi_d == 0.0 {
        return state.clone();
    }
    let m_max = cutoff_order(phi_d);
    let c = kick_coefficients(phi_d, gamma, m_max);
    let len = state.len();
    let out_len = len + 2 * m_max;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    // out index i  <->  level n_min - m_max + i ; coefficient index k <-> m = k - m_max
    for (src, a) in state.amps().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        for (k, ck) in c.iter().enumerate() {
            out[src + k] += ck * a;
        }
    }
    LadderState::from_raw(state.beta(), state.n_min() - m_max as i64, out).trimmed(TRIM_MASS)
}

/// Reusable split-step kick on an `M`-point angular grid.
pub struct GridKicker {
    m: usize,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
}

impl GridKicker {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo(m));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { m, inverse: planner.plan_fft_inverse(m), forward: planner.plan_fft_forward(m) })
    }

    pub fn grid(&self) -> usize {
        self.m
    }

    pub fn kick(&self, state: &LadderState, phi_d: f64, gamma: f64) -> Result<LadderState> {
        if phi_d == 0.0 {
            return Ok(state.clone());
        }
        let m_max = cutoff_order(phi_d);
        let band = state.len() + 2 * m_max;
        let needed = 8 * band;
        if self.m < needed {
            return Err(Error::GridTooSmall { grid: self.m, band, needed });
        }
        // Buffer slot k holds level n_ref + k. The common factor e^{i n_ref theta}
        // has unit modulus and commutes with the pointwise kick, so it is dropped.
        let n_ref = state.n_min() - m_max as i64;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        for (i, a) in state.amps().iter().enumerate() {
            buf[m_max + i] = *a;
        }
        self.inverse.process(&mut buf);
        let step = 2.0 * PI / self.m as f64;
        for (j, v) in buf.iter_mut().enumerate() {
            let theta = step * j as f64;
            *v *= Complex64::from_polar(1.0, -phi_d * (theta + gamma).cos());
        }
        self.forward.process(&mut buf);
        let scale = 1.0 / self.m as f64;
        let guard: f64 = buf[band..].iter().map(|v| (v * scale).norm_sqr()).sum();
        if guard > ALIAS_TOL {
            return Err(Error::Aliasing(guard));
        }
        let amps = buf[..band].iter().map(|v| v * scale).collect();
        Ok(LadderState::from_raw(state.beta(), n_ref, amps).trimmed(TRIM_MASS))
    }
}

/// Smallest admissible grid for kicking `state` at strength `phi_d`.
pub fn grid_size_for(state: &LadderState, phi_d: f64) -> usize {
    (8 * (state.len() + 2 * cutoff_order(phi_d))).next_power_of_two()
}

/// Split-step kick on an `m`-point grid; `m` must be a power of two.
pub fn apply_kick_grid(state: &LadderState, phi_d: f64, gamma: f64, m: usize) -> Result<LadderState> {
    GridKicker::new(m)?.kick(state, phi_d, gamma)
}

/// Kick, record, free flight; element 0 is the initial state.
pub fn run_schedule(state: &LadderState, schedule: &KickSchedule, engine: Engine) -> Result<Vec<LadderState>> {
    schedule.validate()?;
    let tau = schedule.tau();
    let mut out = Vec::with_capacity(schedule.kicks + 1);
    out.push(state.clone());
    let mut cur = state.clone();
    let mut kicker: Option<GridKicker> = None;
    for t in 0..schedule.kicks {
        if t > 0 {
            cur = free_evolve(&cur, tau);
        }
        cur = match engine {
            Engine::Bessel => apply_kick_bessel(&cur, schedule.phi_d, schedule.gamma),
            Engine::Grid => {
                let m = grid_size_for(&cur, schedule.phi_d);
                if kicker.as_ref().map(|k| k.grid()) != Some(m) {
                    kicker = Some(GridKicker::new(m)?);
                }
                kicker.as_ref().unwrap().kick(&cur, schedule.phi_d, schedule.gamma)?
            }
        };
        out.push(cur.clone());
    }
    Ok(out)
}

/// Dumps `(t, n, population)` rows for every recorded state.
pub fn write_distribution_csv<W: Write>(states: &[LadderState], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(["t", "n", "population"]).map_err(io)?;
    for (t, s) in states.iter().enumerate() {
        for (n, pop) in s.populations() {
            out.write_record([t.to_string(), n.to_string(), pop.to_string()]).map_err(io)?;
        }
    }
    out.flush()?;
    Ok(())
}
