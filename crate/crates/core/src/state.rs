//! Momentum-ladder wave functions and their angular-position profiles.
//!
//! Momentum is `p = n + beta` in units of two photon recoils. The position
//! representation is `psi(theta) = sum_n a_n e^{i n theta}`, so a state phase
//! `-n*gamma` is the same as shifting the potential phase by `+gamma`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default angular grid for profiles and force integrals.
pub const DEFAULT_GRID: usize = 1024;

const NORM_TOL: f64 = 1e-9;

/// Dense amplitudes on `n_min ..= n_max` with a fixed quasimomentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLadder")]
pub struct LadderState {
    beta: f64,
    n_min: i64,
    amps: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawLadder {
    beta: f64,
    n_min: i64,
    amps: Vec<Complex64>,
}

impl TryFrom<RawLadder> for LadderState {
    type Error = Error;
    fn try_from(raw: RawLadder) -> Result<Self> {
        LadderState::new(raw.beta, raw.n_min, raw.amps)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::BetaOutOfRange(beta))
    }
}

impl LadderState {
    /// Validating constructor; amplitudes must already be normalised.
    pub fn new(beta: f64, n_min: i64, amps: Vec<Complex64>) -> Result<Self> {
        check_beta(beta)?;
        if amps.is_empty() {
            return Err(Error::EmptySuperposition);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidWeights);
        }
        Ok(Self { beta, n_min, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(beta: f64, n_min: i64, mut amps: Vec<Complex64>) -> Result<Self> {
        check_beta(beta)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() {
            return Err(Error::EmptySuperposition);
        }
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidWeights);
        }
        let s = 1.0 / norm.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        Ok(Self { beta, n_min, amps })
    }

    /// Engine-internal constructor: no checks, beta is carried over.
    pub(crate) fn from_raw(beta: f64, n_min: i64, amps: Vec<Complex64>) -> Self {
        Self { beta, n_min, amps }
    }

    pub fn plane_wave(n: i64, beta: f64) -> Result<Self> {
        Self::new(beta, n, vec![Complex64::new(1.0, 0.0)])
    }

    /// Equal-weight `sum_{n=lo}^{hi} e^{-i n gamma} |n>`.
    pub fn consecutive(n_lo: i64, n_hi: i64, gamma: f64, beta: f64) -> Result<Self> {
        if n_hi < n_lo {
            return Err(Error::EmptySuperposition);
        }
        let comps: Vec<Component> = (n_lo..=n_hi)
            .map(|n| Component::new(n, -(n as f64) * gamma, 1.0))
            .collect();
        make_superposition(&comps, beta)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn n_min(&self) -> i64 {
        self.n_min
    }
    pub fn n_max(&self) -> i64 {
        self.n_min + self.amps.len() as i64 - 1
    }
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }
    pub fn len(&self) -> usize {
        self.amps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Amplitude on level `n`, zero outside the stored band.
    pub fn amp(&self, n: i64) -> Complex64 {
        let i = n - self.n_min;
        if i < 0 || i >= self.amps.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.amps[i as usize]
        }
    }

    pub fn levels(&self) -> impl Iterator<Item = i64> + '_ {
        self.n_min..=self.n_max()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `(n, |a_n|^2)` for each stored level.
    pub fn populations(&self) -> Vec<(i64, f64)> {
        self.levels().zip(self.amps.iter().map(|a| a.norm_sqr())).collect()
    }

    /// Same amplitudes at a different quasimomentum.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { beta, ..self.clone() })
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let w = Complex64::from_polar(1.0, phase);
        Self {
            amps: self.amps.iter().map(|a| a * w).collect(),
            ..self.clone()
        }
    }

    /// Multiplies each `a_n` by `e^{-i n gamma}`.
    pub fn with_phase_slope(&self, gamma: f64) -> Self {
        let amps = self
            .levels()
            .zip(&self.amps)
            .map(|(n, a)| a * Complex64::from_polar(1.0, -(n as f64) * gamma))
            .collect();
        Self { amps, ..self.clone() }
    }

    /// `<self|other>` over the union of both bands.
    pub fn overlap(&self, other: &LadderState) -> Complex64 {
        let lo = self.n_min.max(other.n_min);
        let hi = self.n_max().min(other.n_max());
        (lo..=hi).map(|n| self.amp(n).conj() * other.amp(n)).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &LadderState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Drops edge levels whose cumulative mass is below `tol` on each side.
    pub fn trimmed(&self, tol: f64) -> Self {
        let mut lo = 0;
        let mut acc = 0.0;
        while lo + 1 < self.amps.len() {
            acc += self.amps[lo].norm_sqr();
            if acc >= tol {
                break;
            }
            lo += 1;
        }
        let mut hi = self.amps.len() - 1;
        acc = 0.0;
        while hi > lo {
            acc += self.amps[hi].norm_sqr();
            if acc >= tol {
                break;
            }
            hi -= 1;
        }
        Self {
            beta: self.beta,
            n_min: self.n_min + lo as i64,
            amps: self.amps[lo..=hi].to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ladder state is always serialisable")
    }
}

/// One plane-wave term of a superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub n: i64,
    pub phase: f64,
    pub weight: f64,
}

impl Component {
    pub fn new(n: i64, phase: f64, weight: f64) -> Self {
        Self { n, phase, weight }
    }
}

/// Builds `sum sqrt(w) e^{i phase} |n>`, normalised, with a tight band.
pub fn make_superposition(components: &[Component], beta: f64) -> Result<LadderState> {
    check_beta(beta)?;
    if components.is_empty() {
        return Err(Error::EmptySuperposition);
    }
    let mut seen: Vec<i64> = components.iter().map(|c| c.n).collect();
    seen.sort_unstable();
    if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateLevel(w[0]));
    }
    if components.iter().any(|c| !(c.weight.is_finite() && c.weight >= 0.0) || !c.phase.is_finite()) {
        return Err(Error::InvalidWeights);
    }
    let lo = seen[0];
    let hi = *seen.last().unwrap();
    let mut amps = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for c in components {
        amps[(c.n - lo) as usize] = Complex64::from_polar(c.weight.sqrt(), c.phase);
    }
    LadderState::normalized(beta, lo, amps)
}

/// Angular density on a uniform grid, in the frame of the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialProfile {
    pub theta: Vec<f64>,
    pub density: Vec<f64>,
    pub gamma_ref: f64,
}

/// Grid point `j` of an `m`-point grid on `[-pi, pi)`.
pub fn grid_angle(j: usize, m: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / m as f64
}

/// Density `|sum_n a_n e^{i n (theta - gamma)}|^2 / 2pi` where `theta` is
/// measured from a crest of `cos(theta)` and `gamma` is the potential phase.
/// With `gamma = 0` this is the bare position density of the state.
pub fn spatial_profile(state: &LadderState, m: usize, gamma: f64) -> Result<SpatialProfile> {
    let needed = 4 * state.len();
    if m < needed {
        return Err(Error::GridTooSmall { grid: m, band: state.len(), needed });
    }
    let theta: Vec<f64> = (0..m).map(|j| grid_angle(j, m)).collect();
    let density = theta
        .iter()
        .map(|&th| {
            let x = th - gamma;
            let psi: Complex64 = state
                .levels()
                .zip(state.amps())
                .map(|(n, a)| a * Complex64::from_polar(1.0, n as f64 * x))
                .sum();
            psi.norm_sqr() / (2.0 * PI)
        })
        .collect();
    Ok(SpatialProfile { theta, density, gamma_ref: gamma })
}

impl SpatialProfile {
    pub fn len(&self) -> usize {
        self.theta.len()
    }
    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
    pub fn step(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    /// Trapezoid (periodic) integral of the density.
    pub fn integral(&self) -> f64 {
        self.step() * crate::par::pairwise_sum(&self.density)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["theta", "density"]).map_err(io)?;
        for (t, d) in self.theta.iter().zip(&self.density) {
            out.write_record([t.to_string(), d.to_string()]).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Full width at half height `(max + min) / 2` of the peak holding the
/// global maximum, with linear interpolation and periodic wraparound.
pub fn fwhm(profile: &SpatialProfile) -> Result<f64> {
    let d = &profile.density;
    let m = d.len();
    if m < 3 {
        return Err(Error::NoPeak);
    }
    let (imax, &dmax) = d
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, x| if *x.1 > *acc.1 { x } else { acc });
    let dmin = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if dmax <= 1.05 * dmin || dmax <= 0.0 {
        return Err(Error::NoPeak);
    }
    let half = 0.5 * (dmax + dmin);
    let at = |k: isize| d[k.rem_euclid(m as isize) as usize];

    // Walk outward until the density drops below half; offsets in grid steps.
    let crossing = |dir: isize| -> f64 {
        let mut k: isize = 0;
        loop {
            let a = at(imax as isize + k * dir);
            let b = at(imax as isize + (k + 1) * dir);
            if b < half {
                return k as f64 + (a - half) / (a - b);
            }
            k += 1;
        }
    };
    Ok((crossing(1) + crossing(-1)) * profile.step())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(phase: f64) -> LadderState {
        make_superposition(&[Component::new(0, 0.0, 1.0), Component::new(1, phase, 1.0)], 0.5).unwrap()
    }

    #[test]
    fn single_plane_wave() {
        let s = make_superposition(&[Component::new(0, 0.0, 1.0)], 0.5).unwrap();
        assert_eq!(s.n_min(), 0);
        assert_eq!(s.n_max(), 0);
        let p = spatial_profile(&s, 64, 0.0).unwrap();
        for v in &p.density {
            assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
        }
        assert_eq!(fwhm(&p), Err(Error::NoPeak));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_superposition(&[], 0.5), Err(Error::EmptySuperposition));
        let dup = [Component::new(1, 0.0, 1.0), Component::new(1, 0.3, 1.0)];
        assert_eq!(make_superposition(&dup, 0.5), Err(Error::DuplicateLevel(1)));
        assert_eq!(
            make_superposition(&[Component::new(0, 0.0, 1.0)], 1.0),
            Err(Error::BetaOutOfRange(1.0))
        );
        assert_eq!(
            make_superposition(&[Component::new(0, 0.0, 0.0)], 0.0),
            Err(Error::InvalidWeights)
        );
    }

    #[test]
    fn gaps_are_zero_and_band_is_tight() {
        let s = make_superposition(&[Component::new(-2, 0.0, 1.0), Component::new(3, 0.0, 3.0)], 0.0).unwrap();
        assert_eq!((s.n_min(), s.n_max()), (-2, 3));
        assert_eq!(s.amp(0), Complex64::new(0.0, 0.0));
        assert!((s.amp(3).norm_sqr() - 0.75).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_too_small_rejected() {
        let s = LadderState::consecutive(-3, 3, 0.0, 0.5).unwrap();
        assert!(matches!(spatial_profile(&s, 27, 0.0), Err(Error::GridTooSmall { .. })));
        assert!(spatial_profile(&s, 28, 0.0).is_ok());
    }

    #[test]
    fn two_state_profile_closed_form() {
        // (|0> + e^{-i pi/2}|1>)/sqrt2 has density (1 + cos(theta - pi/2)) / 2pi
        let s = two_state(-PI / 2.0);
        let p = spatial_profile(&s, 256, 0.0).unwrap();
        for (t, d) in p.theta.iter().zip(&p.density) {
            let exact = (1.0 + (t - PI / 2.0).cos()) / (2.0 * PI);
            assert!((d - exact).abs() < 1e-14);
        }
        assert!((p.integral() - 1.0).abs() < 1e-12);
        assert!((fwhm(&p).unwrap() - PI).abs() < 1e-3);
    }

    #[test]
    fn seven_states_narrower_and_higher() {
        let two = spatial_profile(&LadderState::consecutive(0, 1, PI / 2.0, 0.5).unwrap(), DEFAULT_GRID, 0.0).unwrap();
        let seven = spatial_profile(&LadderState::consecutive(-3, 3, PI / 2.0, 0.5).unwrap(), DEFAULT_GRID, 0.0).unwrap();
        let peak = |p: &SpatialProfile| p.density.iter().cloned().fold(0.0, f64::max);
        assert!(peak(&seven) > peak(&two));
        assert!(fwhm(&seven).unwrap() < fwhm(&two).unwrap());
        let j = seven.density.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((seven.theta[j] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn fwhm_wraps_around() {
        // peak centred on the seam at theta = -pi
        let s = LadderState::consecutive(-2, 2, PI, 0.0).unwrap();
        let p = spatial_profile(&s, 512, 0.0).unwrap();
        let q = spatial_profile(&LadderState::consecutive(-2, 2, 0.0, 0.0).unwrap(), 512, 0.0).unwrap();
        assert!((fwhm(&p).unwrap() - fwhm(&q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let s = LadderState::consecutive(-2, 2, 0.7, 0.25).unwrap();
        let js = s.to_json();
        assert!(js.starts_with("{\"beta\":0.25,\"n_min\":-2,\"amps\":[["));
        let back: LadderState = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn profile_csv_header() {
        let p = spatial_profile(&LadderState::plane_wave(0, 0.0).unwrap(), 4, 0.0).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta,density\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
