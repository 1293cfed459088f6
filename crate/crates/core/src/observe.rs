//! Ratchet observables: mean momentum, dispersion and the effective force.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::pairwise_sum;
use crate::state::{make_superposition, spatial_profile, Component, LadderState, SpatialProfile, DEFAULT_GRID};

/// Variance below which a state counts as a single plane wave.
const ZERO_VARIANCE: f64 = 1e-14;

pub fn mean_momentum(state: &LadderState) -> f64 {
    let beta = state.beta();
    let terms: Vec<f64> = state.populations().into_iter().map(|(n, w)| w * (n as f64 + beta)).collect();
    pairwise_sum(&terms)
}

pub fn mean_momentum_sq(state: &LadderState) -> f64 {
    let beta = state.beta();
    let terms: Vec<f64> = state
        .populations()
        .into_iter()
        .map(|(n, w)| {
            let p = n as f64 + beta;
            w * p * p
        })
        .collect();
    pairwise_sum(&terms)
}

/// Central second moment; never negative.
pub fn variance(state: &LadderState) -> f64 {
    let mean = mean_momentum(state);
    let beta = state.beta();
    let terms: Vec<f64> = state
        .populations()
        .into_iter()
        .map(|(n, w)| {
            let d = n as f64 + beta - mean;
            w * d * d
        })
        .collect();
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatchetTrace {
    pub t: Vec<usize>,
    pub mean_p: Vec<f64>,
    pub mean_p2: Vec<f64>,
    pub dispersion: Vec<f64>,
}

impl RatchetTrace {
    /// `<p_t> - <p_0>` for each recorded kick.
    pub fn momentum_change(&self) -> Vec<f64> {
        let p0 = self.mean_p[0];
        self.mean_p.iter().map(|p| p - p0).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["t", "mean_p", "mean_p2", "dispersion"]).map_err(io)?;
        for i in 0..self.t.len() {
            out.write_record([
                self.t[i].to_string(),
                self.mean_p[i].to_string(),
                self.mean_p2[i].to_string(),
                self.dispersion[i].to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Builds the trace of a recorded evolution; `states[0]` is the initial state.
pub fn dispersion(states: &[LadderState]) -> Result<RatchetTrace> {
    let first = states.first().ok_or(Error::EmptySuperposition)?;
    let v0 = variance(first);
    if v0 < ZERO_VARIANCE {
        return Err(Error::UndefinedDispersion);
    }
    let mut trace = RatchetTrace { t: vec![], mean_p: vec![], mean_p2: vec![], dispersion: vec![] };
    for (t, s) in states.iter().enumerate() {
        trace.t.push(t);
        trace.mean_p.push(mean_momentum(s));
        trace.mean_p2.push(mean_momentum_sq(s));
        trace.dispersion.push(if t == 0 { 1.0 } else { variance(s) / v0 });
    }
    Ok(trace)
}

/// Signed overlap `int rho(theta) * (-sin theta) dtheta` with the gradient
/// of `V = cos(theta)`; positive means the density sits on the falling slope.
pub fn gradient_overlap(profile: &SpatialProfile) -> f64 {
    let terms: Vec<f64> = profile.theta.iter().zip(&profile.density).map(|(t, d)| -d * t.sin()).collect();
    profile.step() * pairwise_sum(&terms)
}

/// `|int rho dV/dtheta|`.
pub fn effective_force(profile: &SpatialProfile) -> f64 {
    gradient_overlap(profile).abs()
}

/// Force of the state with phase slope `gamma` on `n_lo ..= n_hi`.
pub fn effective_force_consecutive(n_lo: i64, n_hi: i64, gamma: f64) -> Result<f64> {
    let s = LadderState::consecutive(n_lo, n_hi, gamma, 0.0)?;
    Ok(effective_force(&spatial_profile(&s, DEFAULT_GRID, 0.0)?))
}

/// Force of the range `(n_lo, n_hi)` with one interior level removed.
pub fn effective_force_missing_state(range: (i64, i64), missing: i64, gamma: f64) -> Result<f64> {
    let (lo, hi) = range;
    if !(lo < missing && missing < hi) {
        return Err(Error::MissingAtEndpoint { lo, hi, missing });
    }
    let comps: Vec<Component> = (lo..=hi)
        .filter(|&n| n != missing)
        .map(|n| Component::new(n, -(n as f64) * gamma, 1.0))
        .collect();
    let s = make_superposition(&comps, 0.0)?;
    Ok(effective_force(&spatial_profile(&s, DEFAULT_GRID, 0.0)?))
}
