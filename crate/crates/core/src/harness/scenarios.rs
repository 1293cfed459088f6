//! Named scenarios, one per figure of the resonant and off-resonant
//! ratchet study. Spontaneous-emission decay and imaging effects seen in the
//! lab data are not modelled, so late-time experimental tails are not
//! reproduced.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde_json::json;

use crate::epsiclassical::{island_centred_pair, s_curve, scaled_momentum_quantum};
use crate::error::{Error, Result};
use crate::evolve::{run_schedule, Engine, KickSchedule, Period};
use crate::harness::config::{AngleGrid, ExperimentConfig};
use crate::harness::output::{PlotHint, ScenarioResult, Table};
use crate::observe::{
    dispersion, effective_force, effective_force_missing_state, gradient_overlap, RatchetTrace,
};
use crate::par::{map_ordered, Execution};
use crate::state::{fwhm, make_superposition, spatial_profile, Component, LadderState};

/// Registered scenario names with one-line descriptions.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("fig2a_fwhm", "FWHM of the angular density vs number of consecutive states"),
    ("fig2b_feff", "effective force vs momentum range, consecutive and with one state missing"),
    ("fig2c_phase", "effective force vs phase slope of a seven-state superposition"),
    ("fig5_distributions", "momentum distributions vs kick number for three initial states"),
    ("fig6a_dispersion", "normalised dispersion vs kick number for N = 2, 3, 4, 7"),
    ("fig6b_meanp_vs_N", "momentum gained after five kicks vs number of states"),
    ("fig7_meanp", "momentum gained vs kick number for N = 2, 3, 5"),
    ("fig8_phase_scan", "dispersion and momentum gain vs potential phase at t = 5"),
    ("fig10_scaling_l0", "scaled momentum near the zeroth resonance with the S(z)/z curve"),
    ("fig11_scaling_l1", "scaled momentum near the first resonance with the S(z)/z curve"),
];

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|(n, _)| *n).collect()
}

const RESONANT_PHI: f64 = 1.4;
const RESONANT_BETA: f64 = 0.5;
const TWO_PI: f64 = 2.0 * PI;

/// Lower edge of the `N`-state range used throughout: `-floor((N-1)/2)`.
pub fn range_for(n: usize) -> (i64, i64) {
    let lo = -(((n.max(1) - 1) / 2) as i64);
    (lo, lo + n as i64 - 1)
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    exec: Execution,
    resolved: BTreeMap<String, serde_json::Value>,
}

impl Ctx<'_> {
    fn note(&mut self, key: &str, v: serde_json::Value) {
        self.resolved.insert(key.to_string(), v);
    }

    fn phi(&mut self, default: f64) -> f64 {
        let v = self.cfg.physics.phi_d.unwrap_or(default);
        self.note("phi_d", json!(v));
        v
    }
    fn beta(&mut self, default: f64) -> f64 {
        let v = self.cfg.physics.beta.unwrap_or(default);
        self.note("beta", json!(v));
        v
    }
    fn gamma(&mut self, default: f64) -> f64 {
        let v = self.cfg.physics.gamma.unwrap_or(default);
        self.note("gamma", json!(v));
        v
    }
    fn kicks(&mut self, default: usize) -> usize {
        let v = self.cfg.physics.kicks.unwrap_or(default);
        self.note("kicks", json!(v));
        v
    }
    fn tau(&mut self, default: f64) -> Result<f64> {
        let v = self.cfg.physics.tau_or(default)?;
        self.note("tau", json!(v));
        Ok(v)
    }
    fn engine(&mut self) -> Engine {
        let e = self.cfg.physics.engine;
        self.note("engine", json!(e));
        e
    }
    fn grid(&mut self) -> usize {
        let g = self.cfg.numerics.grid;
        self.note("grid", json!(g));
        g
    }

    /// Configured explicit state, or the equal-weight range with phase slope.
    fn state_for(&self, n: usize, slope: f64, beta: f64) -> Result<LadderState> {
        match &self.cfg.physics.initial {
            Some(c) => make_superposition(c, beta),
            None => {
                let (lo, hi) = range_for(n);
                LadderState::consecutive(lo, hi, slope, beta)
            }
        }
    }
}

fn trace_of(initial: &LadderState, schedule: &KickSchedule, engine: Engine) -> Result<RatchetTrace> {
    dispersion(&run_schedule(initial, schedule, engine)?)
}

fn fig2a(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let counts = ctx.cfg.sweep.counts_or((2..=7).collect())?;
    let gamma = ctx.gamma(PI / 2.0);
    let grid = ctx.grid();
    ctx.note("counts", json!(counts));
    let mut t = Table::new("fig2a_fwhm", &["N", "fwhm", "peak_density"], PlotHint { x: 0, y: vec![1], group: None });
    for &n in &counts {
        let p = spatial_profile(&ctx.state_for(n, gamma, 0.0)?, grid, 0.0)?;
        let peak = p.density.iter().cloned().fold(0.0, f64::max);
        t.push(vec![n.into(), fwhm(&p)?.into(), peak.into()]);
    }
    Ok(vec![t])
}

fn fig2b(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let counts = ctx.cfg.sweep.counts_or((2..=7).collect())?;
    let gamma = ctx.gamma(PI / 2.0);
    let grid = ctx.grid();
    ctx.note("counts", json!(counts));
    let mut cons = Table::new(
        "fig2b_consecutive",
        &["N", "n_lo", "n_hi", "feff"],
        PlotHint { x: 0, y: vec![3], group: None },
    );
    let mut miss = Table::new(
        "fig2b_missing",
        &["N", "n_lo", "n_hi", "missing", "feff", "consecutive_feff"],
        PlotHint { x: 0, y: vec![4], group: Some(3) },
    );
    for &n in &counts {
        let (lo, hi) = range_for(n);
        let full = effective_force(&spatial_profile(&LadderState::consecutive(lo, hi, gamma, 0.0)?, grid, 0.0)?);
        cons.push(vec![n.into(), lo.into(), hi.into(), full.into()]);
        for m in (lo + 1)..hi {
            let f = effective_force_missing_state((lo, hi), m, gamma)?;
            miss.push(vec![n.into(), lo.into(), hi.into(), m.into(), f.into(), full.into()]);
        }
    }
    Ok(vec![cons, miss])
}

fn fig2c(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let n = ctx.cfg.sweep.counts_or(vec![7])?[0];
    let gammas = ctx.cfg.sweep.gammas_or(AngleGrid { start: -PI, stop: PI + 1e-9, step: PI / 36.0 })?;
    let grid = ctx.grid();
    ctx.note("N", json!(n));
    ctx.note("gammas", json!(gammas));
    let mut t = Table::new("fig2c_phase", &["gamma", "feff", "gradient_overlap"], PlotHint { x: 0, y: vec![1], group: None });
    let (lo, hi) = range_for(n);
    for &g in &gammas {
        let p = spatial_profile(&LadderState::consecutive(lo, hi, g, 0.0)?, grid, 0.0)?;
        t.push(vec![g.into(), effective_force(&p).into(), gradient_overlap(&p).into()]);
    }
    Ok(vec![t])
}

fn fig5(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let phi = ctx.phi(RESONANT_PHI);
    let beta = ctx.beta(RESONANT_BETA);
    let gamma = ctx.gamma(PI / 2.0);
    let tau = ctx.tau(TWO_PI)?;
    let kicks = ctx.kicks(10);
    let engine = ctx.engine();
    let schedule = KickSchedule::new(phi, Period::Scaled { tau }, gamma, kicks)?;
    let states: Vec<(&str, LadderState)> = vec![
        ("0+1", LadderState::consecutive(0, 1, 0.0, beta)?),
        ("-2..2", LadderState::consecutive(-2, 2, 0.0, beta)?),
        ("-1+1", make_superposition(&[Component::new(-1, 0.0, 1.0), Component::new(1, 0.0, 1.0)], beta)?),
    ];
    let mut dist = Table::new(
        "fig5_distributions",
        &["state", "t", "n", "p", "population"],
        PlotHint { x: 3, y: vec![4], group: Some(1) },
    );
    let mut traces = Table::new(
        "fig5_traces",
        &["state", "t", "mean_p", "mean_p2", "dispersion"],
        PlotHint { x: 1, y: vec![2], group: Some(0) },
    );
    let runs = map_ordered(&states, ctx.exec, |(_, s)| run_schedule(s, &schedule, engine));
    for ((label, _), run) in states.iter().zip(runs) {
        let run = run?;
        for (t, s) in run.iter().enumerate() {
            for (n, pop) in s.populations() {
                if pop > 1e-12 {
                    dist.push(vec![(*label).into(), t.into(), n.into(), (n as f64 + s.beta()).into(), pop.into()]);
                }
            }
        }
        let tr = dispersion(&run)?;
        for i in 0..tr.t.len() {
            traces.push(vec![
                (*label).into(),
                tr.t[i].into(),
                tr.mean_p[i].into(),
                tr.mean_p2[i].into(),
                tr.dispersion[i].into(),
            ]);
        }
    }
    Ok(vec![dist, traces])
}

fn resonant_traces(ctx: &mut Ctx, counts_default: Vec<usize>, kicks_default: usize) -> Result<(Vec<usize>, Vec<RatchetTrace>)> {
    let counts = ctx.cfg.sweep.counts_or(counts_default)?;
    let phi = ctx.phi(RESONANT_PHI);
    let beta = ctx.beta(RESONANT_BETA);
    let gamma = ctx.gamma(PI / 2.0);
    let tau = ctx.tau(TWO_PI)?;
    let kicks = ctx.kicks(kicks_default);
    let engine = ctx.engine();
    ctx.note("counts", json!(counts));
    let schedule = KickSchedule::new(phi, Period::Scaled { tau }, gamma, kicks)?;
    let states = counts.iter().map(|&n| ctx.state_for(n, 0.0, beta)).collect::<Result<Vec<_>>>()?;
    let traces = map_ordered(&states, ctx.exec, |s| trace_of(s, &schedule, engine))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((counts, traces))
}

fn fig6a(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let (counts, traces) = resonant_traces(ctx, vec![2, 3, 4, 7], 10)?;
    let mut t = Table::new(
        "fig6a_dispersion",
        &["N", "t", "mean_p", "mean_p2", "dispersion"],
        PlotHint { x: 1, y: vec![4], group: Some(0) },
    );
    for (n, tr) in counts.iter().zip(&traces) {
        for i in 0..tr.t.len() {
            t.push(vec![(*n).into(), tr.t[i].into(), tr.mean_p[i].into(), tr.mean_p2[i].into(), tr.dispersion[i].into()]);
        }
    }
    Ok(vec![t])
}

fn fig6b(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let (counts, traces) = resonant_traces(ctx, (2..=7).collect(), 5)?;
    let mut t = Table::new(
        "fig6b_meanp_vs_N",
        &["N", "mean_p_change", "mean_p", "dispersion"],
        PlotHint { x: 0, y: vec![1], group: None },
    );
    for (n, tr) in counts.iter().zip(&traces) {
        let last = tr.t.len() - 1;
        t.push(vec![
            (*n).into(),
            tr.momentum_change()[last].into(),
            tr.mean_p[last].into(),
            tr.dispersion[last].into(),
        ]);
    }
    Ok(vec![t])
}

fn fig7(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let (counts, traces) = resonant_traces(ctx, vec![2, 3, 5], 10)?;
    let mut t = Table::new(
        "fig7_meanp",
        &["N", "t", "mean_p_change", "mean_p"],
        PlotHint { x: 1, y: vec![2], group: Some(0) },
    );
    for (n, tr) in counts.iter().zip(&traces) {
        let dp = tr.momentum_change();
        for ((&step, &d), &p) in tr.t.iter().zip(&dp).zip(&tr.mean_p) {
            t.push(vec![(*n).into(), step.into(), d.into(), p.into()]);
        }
    }
    Ok(vec![t])
}

fn fig8(ctx: &mut Ctx) -> Result<Vec<Table>> {
    let counts = ctx.cfg.sweep.counts_or(vec![2, 5])?;
    let gammas = ctx.cfg.sweep.gammas_or(AngleGrid { start: 0.0, stop: TWO_PI, step: PI / 36.0 })?;
    let phi = ctx.phi(RESONANT_PHI);
    let beta = ctx.beta(RESONANT_BETA);
    let tau = ctx.tau(TWO_PI)?;
    let kicks = ctx.kicks(5);
    let engine = ctx.engine();
    ctx.note("counts", json!(counts));
    ctx.note("gammas", json!(gammas));
    let mut jobs = Vec::new();
    for &n in &counts {
        let s = ctx.state_for(n, 0.0, beta)?;
        for &g in &gammas {
            jobs.push((n, g, s.clone()));
        }
    }
    let results = map_ordered(&jobs, ctx.exec, |(_, g, s)| {
        KickSchedule::new(phi, Period::Scaled { tau }, *g, kicks).and_then(|sch| trace_of(s, &sch, engine))
    });
    let mut t = Table::new(
        "fig8_phase_scan",
        &["N", "gamma", "dispersion", "mean_p_change"],
        PlotHint { x: 1, y: vec![3], group: Some(0) },
    );
    for ((n, g, _), tr) in jobs.iter().zip(results) {
        let tr = tr?;
        let last = tr.t.len() - 1;
        t.push(vec![(*n).into(), (*g).into(), tr.dispersion[last].into(), tr.momentum_change()[last].into()]);
    }
    Ok(vec![t])
}

/// One quantum run in a scaling family.
#[derive(Debug, Clone)]
pub struct ScalingJob {
    pub family: String,
    pub l: i64,
    pub epsilon: f64,
    pub phi_d: f64,
    pub kicks: usize,
}

fn frange(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect()
}

/// The three families of the first-resonance study.
pub fn l1_families(cfg: &ExperimentConfig) -> Result<Vec<ScalingJob>> {
    let eps = cfg.sweep.epsilons_or(frange(0.01, 0.30, 0.01))?;
    let phis = cfg.sweep.phis_or(frange(0.1, 3.0, 0.1))?;
    let ts = cfg.sweep.kicks_or((1..=15).collect())?;
    let mut jobs = Vec::new();
    for &e in &eps {
        jobs.push(ScalingJob { family: "epsilon-scan".into(), l: 1, epsilon: e, phi_d: 1.8, kicks: 10 });
    }
    for &p in &phis {
        jobs.push(ScalingJob { family: "phi-scan".into(), l: 1, epsilon: 0.18, phi_d: p, kicks: 8 });
    }
    for &t in &ts {
        jobs.push(ScalingJob { family: "t-scan".into(), l: 1, epsilon: 0.18, phi_d: 1.8, kicks: t });
    }
    Ok(jobs)
}

/// Kick-number scans near the zeroth resonance at several strengths.
pub fn l0_families(cfg: &ExperimentConfig) -> Result<Vec<ScalingJob>> {
    let ts = cfg.sweep.kicks_or((1..=15).collect())?;
    let combos = [(1.8, 0.18), (2.6, 0.1), (1.4, 0.25), (3.0, 0.05)];
    let mut jobs = Vec::new();
    for (phi, eps) in combos {
        for &t in &ts {
            jobs.push(ScalingJob { family: format!("phi={phi} eps={eps}"), l: 0, epsilon: eps, phi_d: phi, kicks: t });
        }
    }
    Ok(jobs)
}

/// Runs scaling jobs; `gamma` is the phase in `|0> + e^{-i gamma}|1>`.
pub fn run_scaling_jobs(jobs: &[ScalingJob], gamma: f64, exec: Execution) -> Result<Vec<f64>> {
    let pair = island_centred_pair(gamma);
    map_ordered(jobs, exec, |j| {
        let s = KickSchedule::detuned(j.phi_d, j.l, j.epsilon, 0.0, j.kicks);
        scaled_momentum_quantum(&s, &pair).map(|p| p.value)
    })
    .into_iter()
    .collect()
}

fn scaling(ctx: &mut Ctx, name: &str, jobs: Vec<ScalingJob>) -> Result<Vec<Table>> {
    let gamma = ctx.gamma(-PI / 2.0);
    let zs = ctx.cfg.sweep.zs_or(frange(0.0, 10.0, 0.05))?;
    let res = ctx.cfg.numerics.resolution();
    ctx.note("initial_state", json!("(|-1> + e^{-i gamma}|0>)/sqrt2 at beta = 0.5"));
    ctx.note("resolution", json!(res));
    let values = run_scaling_jobs(&jobs, gamma, ctx.exec)?;
    let mut q = Table::new(
        &format!("{name}_quantum"),
        &["family", "l", "epsilon", "phi_d", "t", "z", "value"],
        PlotHint { x: 5, y: vec![6], group: Some(0) },
    );
    for (j, v) in jobs.iter().zip(values) {
        let z = j.kicks as f64 * (j.phi_d * j.epsilon.abs()).sqrt();
        q.push(vec![j.family.clone().into(), j.l.into(), j.epsilon.into(), j.phi_d.into(), j.kicks.into(), z.into(), v.into()]);
    }
    let mut c = Table::new(&format!("{name}_theory"), &["z", "s_over_z"], PlotHint { x: 0, y: vec![1], group: None });
    for p in s_curve(&zs, res, ctx.exec)? {
        c.push(vec![p.z.into(), p.value.into()]);
    }
    Ok(vec![q, c])
}

/// Runs a registered scenario with defaults filled from `config`.
pub fn run_scenario(config: &ExperimentConfig) -> Result<ScenarioResult> {
    let exec = match config.numerics.workers {
        Some(1) => Execution::Sequential,
        _ => Execution::default(),
    };
    let mut ctx = Ctx { cfg: config, exec, resolved: BTreeMap::new() };
    let name = config.scenario.as_str();
    let tables = match name {
        "fig2a_fwhm" => fig2a(&mut ctx)?,
        "fig2b_feff" => fig2b(&mut ctx)?,
        "fig2c_phase" => fig2c(&mut ctx)?,
        "fig5_distributions" => fig5(&mut ctx)?,
        "fig6a_dispersion" => fig6a(&mut ctx)?,
        "fig6b_meanp_vs_N" => fig6b(&mut ctx)?,
        "fig7_meanp" => fig7(&mut ctx)?,
        "fig8_phase_scan" => fig8(&mut ctx)?,
        "fig10_scaling_l0" => {
            let jobs = l0_families(config)?;
            scaling(&mut ctx, "fig10_scaling_l0", jobs)?
        }
        "fig11_scaling_l1" => {
            let jobs = l1_families(config)?;
            scaling(&mut ctx, "fig11_scaling_l1", jobs)?
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    Ok(ScenarioResult { scenario: name.to_string(), resolved: ctx.resolved, tables })
}
