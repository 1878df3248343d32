use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::schedule::{Coefficients, Schedule};
use crate::error::{invalid, Result, SpinError};
use crate::hamiltonian::{FreeEvolutionParams, IsingOperator};
use crate::observables;
use crate::statevec::{l2_norm, SpinBasis, StateVector};

/// Largest accepted `|H|·dt` bound for the Taylor-series exponential.
const MAX_PHASE_PER_STEP: f64 = 8.0;
const MAX_SERIES_TERMS: usize = 64;
const SERIES_TOL: f64 = 1e-17;

/// Allowed norm error before a renormalization is applied.
pub const NORM_DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// `ψ ← exp(-i H(t + dt/2) dt) ψ`, with the exponential summed as a Taylor
    /// series to machine precision. Second order, unitary to rounding.
    ExponentialMidpoint,
    /// Classical explicit Runge-Kutta, fourth order, not norm preserving.
    RungeKutta4,
}

impl Method {
    pub fn order(self) -> u32 {
        match self {
            Method::ExponentialMidpoint => 2,
            Method::RungeKutta4 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub method: Method,
    pub renormalize_every: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            method: Method::ExponentialMidpoint,
            renormalize_every: 100,
        }
    }
}

impl PropagatorConfig {
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate_for(&self, schedule: &Schedule) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!("time step must be positive, got {}", self.dt)));
        }
        let shortest = schedule
            .segments()
            .iter()
            .map(|s| s.duration)
            .fold(f64::INFINITY, f64::min);
        if self.dt > shortest * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "time step {} exceeds the shortest segment ({shortest})",
                self.dt
            )));
        }
        if self.renormalize_every == 0 {
            return Err(invalid("renormalize_every must be at least 1"));
        }
        Ok(())
    }
}

/// Observables sampled along a propagation.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub p_all_up: Vec<f64>,
    pub p_all_down: Vec<f64>,
    pub noon_fidelity: Vec<f64>,
    pub parity_expect: Vec<f64>,
    pub energy_expect: Vec<f64>,
    /// Norm at each sample, before any renormalization.
    pub norm: Vec<f64>,
    /// Largest `|‖ψ‖ - 1|` observed at any renormalization check.
    pub max_norm_drift: f64,
    pub steps: usize,
    pub final_state: StateVector,
}

impl EvolutionTrace {
    fn new(final_state: StateVector) -> Self {
        Self {
            times: Vec::new(),
            p_all_up: Vec::new(),
            p_all_down: Vec::new(),
            noon_fidelity: Vec::new(),
            parity_expect: Vec::new(),
            energy_expect: Vec::new(),
            norm: Vec::new(),
            max_norm_drift: 0.0,
            steps: 0,
            final_state,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn record(&mut self, op: &IsingOperator, t: f64, c: Coefficients, psi: &[Complex64]) {
        let basis = op.basis();
        let up = psi[basis.all_up()].norm_sqr();
        let down = psi[basis.all_down()].norm_sqr();
        self.times.push(t);
        self.p_all_up.push(up);
        self.p_all_down.push(down);
        self.noon_fidelity.push(observables::noon_fidelity_of(psi));
        self.parity_expect.push(observables::parity_of(psi));
        self.energy_expect.push(op.expectation(c.j, c.b, c.delta, psi));
        self.norm.push(l2_norm(psi));
    }
}

/// Scratch buffers for one propagation.
struct Workspace {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            a: z.clone(),
            b: z.clone(),
            c: z,
        }
    }
}

fn step_exponential(
    op: &IsingOperator,
    c: Coefficients,
    h: f64,
    psi: &mut [Complex64],
    ws: &mut Workspace,
) -> Result<()> {
    let n = op.basis().n_spins() as f64;
    // Crude bound on the spectral radius; only used to reject oversized steps.
    let bound = c.j.abs() * n * n + (c.delta.abs() + c.b.abs()) * n;
    if bound * h > MAX_PHASE_PER_STEP {
        return Err(SpinError::SeriesDiverged { dt: h });
    }
    let Workspace { a: term, b: next, .. } = ws;
    term.copy_from_slice(psi);
    for k in 1..=MAX_SERIES_TERMS {
        op.apply_into(c.j, c.b, c.delta, term, next);
        let scale = Complex64::new(0.0, -h / k as f64);
        let mut size = 0.0;
        for ((t, nx), p) in term.iter_mut().zip(next.iter()).zip(psi.iter_mut()) {
            *t = nx * scale;
            *p += *t;
            size += t.norm_sqr();
        }
        if size.sqrt() < SERIES_TOL {
            return Ok(());
        }
    }
    Err(SpinError::SeriesDiverged { dt: h })
}

fn step_rk4(
    op: &IsingOperator,
    c0: Coefficients,
    cm: Coefficients,
    c1: Coefficients,
    h: f64,
    psi: &mut [Complex64],
    ws: &mut Workspace,
) {
    let mi = Complex64::new(0.0, -1.0);
    let Workspace { a: stage, b: k, c: acc } = ws;
    let eval = |c: Coefficients, input: &[Complex64], out: &mut [Complex64]| {
        op.apply_into(c.j, c.b, c.delta, input, out);
        out.iter_mut().for_each(|x| *x *= mi);
    };

    eval(c0, psi, k);
    for ((a, s), (&p, &kk)) in acc.iter_mut().zip(stage.iter_mut()).zip(psi.iter().zip(k.iter())) {
        *a = kk;
        *s = p + kk * (0.5 * h);
    }
    eval(cm, stage, k);
    for ((a, s), (&p, &kk)) in acc.iter_mut().zip(stage.iter_mut()).zip(psi.iter().zip(k.iter())) {
        *a += kk * 2.0;
        *s = p + kk * (0.5 * h);
    }
    eval(cm, stage, k);
    for ((a, s), (&p, &kk)) in acc.iter_mut().zip(stage.iter_mut()).zip(psi.iter().zip(k.iter())) {
        *a += kk * 2.0;
        *s = p + kk * h;
    }
    eval(c1, stage, k);
    for ((p, a), &kk) in psi.iter_mut().zip(acc.iter()).zip(k.iter()) {
        *p += (a + kk) * (h / 6.0);
    }
}

/// Integrates `i dψ/dt = H(t) ψ` through `schedule` with power-law exponent 3.
///
/// A sample is recorded at t = 0, every `sample_every` steps, and at the exact
/// endpoint. `sample_every = 0` records only the two endpoints.
pub fn propagate(
    psi0: &StateVector,
    schedule: &Schedule,
    cfg: &PropagatorConfig,
    sample_every: usize,
) -> Result<EvolutionTrace> {
    let op = IsingOperator::new(psi0.basis(), 3.0)?;
    propagate_with_operator(&op, psi0, schedule, cfg, sample_every)
}

pub fn propagate_with_operator(
    op: &IsingOperator,
    psi0: &StateVector,
    schedule: &Schedule,
    cfg: &PropagatorConfig,
    sample_every: usize,
) -> Result<EvolutionTrace> {
    op.basis().check_same(&psi0.basis())?;
    cfg.validate_for(schedule)?;
    let basis = op.basis();
    let mut psi = psi0.amplitudes().to_vec();
    let mut ws = Workspace::new(basis.dim());
    let mut trace = EvolutionTrace::new(psi0.clone());

    trace.record(op, 0.0, schedule.at(0.0), &psi);

    let mut step = 0usize;
    let mut t0 = 0.0;
    let n_segments = schedule.segments().len();
    for (si, seg) in schedule.segments().iter().enumerate() {
        // Steps never straddle a segment boundary.
        let n_steps = ((seg.duration / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
        let h = seg.duration / n_steps as f64;
        for k in 0..n_steps {
            let s = k as f64 * h;
            match cfg.method {
                Method::ExponentialMidpoint => step_exponential(op, seg.at(s + 0.5 * h), h, &mut psi, &mut ws)?,
                Method::RungeKutta4 => {
                    step_rk4(op, seg.at(s), seg.at(s + 0.5 * h), seg.at(s + h), h, &mut psi, &mut ws)
                }
            }
            step += 1;
            let last = si + 1 == n_segments && k + 1 == n_steps;
            let t = if k + 1 == n_steps {
                t0 + seg.duration
            } else {
                t0 + (k + 1) as f64 * h
            };

            if last || (sample_every > 0 && step.is_multiple_of(sample_every)) {
                trace.record(op, t, seg.at(s + h), &psi);
            }
            if last || step.is_multiple_of(cfg.renormalize_every) {
                renormalize(&mut psi, t, &mut trace.max_norm_drift)?;
            }
        }
        t0 += seg.duration;
    }
    trace.steps = step;
    trace.final_state = StateVector::from_raw(basis, psi);
    Ok(trace)
}

fn renormalize(psi: &mut [Complex64], time: f64, max_drift: &mut f64) -> Result<()> {
    let norm = l2_norm(psi);
    if !norm.is_finite() {
        return Err(SpinError::NonFinite { time });
    }
    let drift = (norm - 1.0).abs();
    *max_drift = max_drift.max(drift);
    if drift > NORM_DRIFT_TOL {
        return Err(SpinError::NormDrift { time, drift });
    }
    let inv = norm.recip();
    psi.iter_mut().for_each(|c| *c *= inv);
    Ok(())
}

/// Exact evolution under `H0 = ω0 Σσz`: `c_b ↦ exp(-i ω0 m_z(b) T) c_b`.
pub fn propagate_free(psi0: &StateVector, params: &FreeEvolutionParams, t: f64) -> Result<StateVector> {
    let basis = SpinBasis::new(params.n_spins)?;
    basis.check_same(&psi0.basis())?;
    if !(params.omega0.is_finite() && t.is_finite()) {
        return Err(invalid("free evolution needs finite ω0 and T"));
    }
    let amplitudes = psi0
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(b, c)| c * Complex64::from_polar(1.0, -params.omega0 * basis.magnetization(b) * t))
        .collect();
    Ok(StateVector::from_raw(basis, amplitudes))
}
