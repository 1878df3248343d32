//! Adiabatic Mach-Zehnder sequence: BS1 (two-step sweep from `|→⋯→⟩` to the
//! NOON state), free phase accumulation, BS2 (the reversed sweep), readout.
//!
//! # Phase convention
//!
//! `omega0` is the transition frequency between `|↓⟩` and `|↑⟩`, so the free
//! Hamiltonian applied between the beam splitters is `(ω0/2) Σσz` and the phase
//! accumulated in time `T` is `φ = ω0 T`. A NOON input then becomes
//! `(e^{-iNφ/2}|↑⋯↑⟩ + e^{iNφ/2}|↓⋯↓⟩)/√2` and the readout gives
//! `P1 = sin²(Nφ/2)`.
//!
//! # Readout
//!
//! `P1` is the population BS2 transports into the excited manifold of the
//! paramagnetic Hamiltonian. It is evaluated just before BS2 as
//! `|⟨GHZ-|ψ⟩|²` with `GHZ- = (|↑⋯↑⟩ - |↓⋯↓⟩)/√2`; BS2 is unitary, so this
//! equals the projection of the output onto the BS2 image of `GHZ-`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{invalid, Result, SpinError};
use crate::evolve::{
    propagate_free, propagate_with_operator, reverse_schedule, schedule_two_step, EvolutionTrace, PropagatorConfig,
    Schedule,
};
use crate::hamiltonian::{FreeEvolutionParams, IsingOperator};
use crate::observables::{fm_populations, noon_fidelity};
use crate::statevec::{make_noon_state, make_product_x_state, SpinBasis, StateVector};

/// Which sweep segments carry the longitudinal bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasPlacement {
    #[default]
    AllSegments,
    /// Only while the transverse field is ramped.
    FieldRampOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub n_spins: usize,
    /// Duration of each of the two sweep steps.
    pub tau: f64,
    pub j0: f64,
    pub b0: f64,
    /// Transition frequency ω0 (see module docs).
    pub omega0: f64,
    pub propagator: PropagatorConfig,
    pub delta_bias: f64,
    pub bias_placement: BiasPlacement,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self {
            n_spins: 4,
            tau: 5.0,
            j0: 1.0,
            b0: 1.0,
            omega0: 1.0,
            propagator: PropagatorConfig::default(),
            delta_bias: 0.0,
            bias_placement: BiasPlacement::AllSegments,
        }
    }
}

impl InterferometerConfig {
    pub fn new(n_spins: usize, tau: f64) -> Self {
        Self {
            n_spins,
            tau,
            ..Self::default()
        }
    }

    pub fn with_bias(mut self, delta_bias: f64) -> Self {
        self.delta_bias = delta_bias;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 2 {
            return Err(invalid(format!(
                "interferometer needs at least 2 spins, got {}",
                self.n_spins
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(invalid(format!("sweep time must be positive, got {}", self.tau)));
        }
        let vals = [self.j0, self.b0, self.omega0, self.delta_bias];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(invalid("interferometer parameters must be finite"));
        }
        if self.j0 < 0.0 {
            return Err(invalid("coupling J0 must be non-negative"));
        }
        Ok(())
    }

    /// BS1 program including the configured bias.
    pub fn bs1_schedule(&self) -> Result<Schedule> {
        let base = schedule_two_step(self.tau, self.j0, self.b0)?;
        let mut segments = base.segments().to_vec();
        match self.bias_placement {
            BiasPlacement::AllSegments => segments.iter_mut().for_each(|s| s.delta = self.delta_bias),
            BiasPlacement::FieldRampOnly => segments[1].delta = self.delta_bias,
        }
        Schedule::new(segments)
    }

    pub fn bs2_schedule(&self) -> Result<Schedule> {
        Ok(reverse_schedule(&self.bs1_schedule()?))
    }

    fn basis(&self) -> Result<SpinBasis> {
        SpinBasis::new(self.n_spins)
    }

    fn operator(&self) -> Result<IsingOperator> {
        IsingOperator::new(self.basis()?, 3.0)
    }
}

/// BS1 with the full sampled trace.
pub fn run_bs1_traced(cfg: &InterferometerConfig, sample_every: usize) -> Result<EvolutionTrace> {
    cfg.validate()?;
    let op = cfg.operator()?;
    let psi0 = make_product_x_state(op.basis(), 1)?;
    propagate_with_operator(&op, &psi0, &cfg.bs1_schedule()?, &cfg.propagator, sample_every)
}

/// `|→⋯→⟩` propagated through the two-step sweep.
pub fn run_bs1(cfg: &InterferometerConfig) -> Result<StateVector> {
    Ok(run_bs1_traced(cfg, 0)?.final_state)
}

/// Free evolution for time `t` at transition frequency `omega0` (phase `ω0 t`).
pub fn free_evolution(psi: &StateVector, omega0: f64, t: f64) -> Result<StateVector> {
    let params = FreeEvolutionParams {
        n_spins: psi.n_spins(),
        omega0: 0.5 * omega0,
    };
    propagate_free(psi, &params, t)
}

/// Free-evolution time that accumulates phase `phi`.
pub fn free_time_for_phase(omega0: f64, phi: f64) -> Result<f64> {
    if omega0 == 0.0 || !omega0.is_finite() {
        return Err(invalid("phase scan needs a finite nonzero ω0"));
    }
    Ok(phi / omega0)
}

/// `|⟨GHZ-|ψ⟩|²`, evaluated on the state entering BS2.
pub fn readout_p1(pre_bs2: &StateVector) -> f64 {
    let basis = pre_bs2.basis();
    let d = pre_bs2.amplitude(basis.all_up()) - pre_bs2.amplitude(basis.all_down());
    (d * FRAC_1_SQRT_2).norm_sqr()
}

#[derive(Debug, Clone)]
pub struct SequenceOutcome {
    pub final_state: StateVector,
    pub pre_bs2: StateVector,
    pub p1: f64,
    /// `|⟨→⋯→|ψ_out⟩|²`: population returned to the paramagnetic ground state.
    pub p_ground: f64,
}

/// Full BS1 → free(T) → BS2 sequence starting from `|→⋯→⟩`.
pub fn run_sequence(cfg: &InterferometerConfig, t_free: f64) -> Result<SequenceOutcome> {
    let bs1 = run_bs1(cfg)?;
    run_sequence_from(cfg, &bs1, t_free)
}

/// Free evolution and BS2 applied to a given post-BS1 state (e.g. an exact NOON state).
pub fn run_sequence_from(cfg: &InterferometerConfig, after_bs1: &StateVector, t_free: f64) -> Result<SequenceOutcome> {
    cfg.validate()?;
    if !(t_free.is_finite() && t_free >= 0.0) {
        return Err(invalid(format!(
            "free evolution time must be non-negative, got {t_free}"
        )));
    }
    let op = cfg.operator()?;
    op.basis().check_same(&after_bs1.basis())?;
    let pre_bs2 = free_evolution(after_bs1, cfg.omega0, t_free)?;
    let final_state = propagate_with_operator(&op, &pre_bs2, &cfg.bs2_schedule()?, &cfg.propagator, 0)?.final_state;
    let ground = make_product_x_state(op.basis(), 1)?;
    let p_ground = crate::observables::overlap_sq(&ground, &final_state)?;
    Ok(SequenceOutcome {
        p1: readout_p1(&pre_bs2),
        final_state,
        pre_bs2,
        p_ground,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub n_spins: usize,
    pub phi_values: Vec<f64>,
    pub p1_values: Vec<f64>,
    /// `sin²(Nφ/2)`.
    pub p1_analytic: Vec<f64>,
    /// `None` when the grid is too coarse or the fringe too flat.
    pub sensitivity_at_optimum: Option<f64>,
}

impl FringeScan {
    pub fn visibility(&self) -> f64 {
        let max = self.p1_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.p1_values.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn max_deviation_from_analytic(&self) -> f64 {
        self.p1_values
            .iter()
            .zip(&self.p1_analytic)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `points` phases evenly covering one fringe period `[0, 2π/N)`.
pub fn default_phi_grid(n_spins: usize, points: usize) -> Vec<f64> {
    let period = 2.0 * PI / n_spins as f64;
    (0..points).map(|k| period * k as f64 / points as f64).collect()
}

/// δ/J0 from -0.1 to 0.1 in steps of 0.01.
pub fn default_bias_grid() -> Vec<f64> {
    (-10..=10).map(|k| k as f64 / 100.0).collect()
}

pub fn analytic_p1(n_spins: usize, phi: f64) -> f64 {
    (0.5 * n_spins as f64 * phi).sin().powi(2)
}

/// P1 versus φ. With `ideal_input` an exact NOON state replaces BS1.
///
/// BS1 does not depend on φ and BS2 does not change P1, so one BS1 run is
/// shared by every grid point and BS2 is not propagated.
pub fn fringe_scan(cfg: &InterferometerConfig, phi_grid: &[f64], ideal_input: bool) -> Result<FringeScan> {
    if ideal_input {
        return ideal_fringe(cfg.n_spins, phi_grid, cfg.omega0);
    }
    cfg.validate()?;
    let bs1 = run_bs1(cfg)?;
    scan_from(&bs1, phi_grid, cfg.omega0)
}

/// Fringe of an exact NOON input; valid for any `N ≥ 1`.
pub fn ideal_fringe(n_spins: usize, phi_grid: &[f64], omega0: f64) -> Result<FringeScan> {
    let noon = make_noon_state(SpinBasis::new(n_spins)?, 0.0);
    scan_from(&noon, phi_grid, omega0)
}

fn scan_from(after_bs1: &StateVector, phi_grid: &[f64], omega0: f64) -> Result<FringeScan> {
    if phi_grid.is_empty() {
        return Err(invalid("phase grid is empty"));
    }
    if phi_grid.iter().any(|p| !p.is_finite()) {
        return Err(invalid("phase grid must be finite"));
    }
    let n = after_bs1.n_spins();
    let p1_values = phi_grid
        .par_iter()
        .map(|&phi| {
            let t = free_time_for_phase(omega0, phi)?;
            // negative φ runs backwards in time; the map is exact either way
            let pre = free_evolution(after_bs1, omega0, t)?;
            Ok(readout_p1(&pre))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut scan = FringeScan {
        n_spins: n,
        phi_values: phi_grid.to_vec(),
        p1_analytic: phi_grid.iter().map(|&p| analytic_p1(n, p)).collect(),
        p1_values,
        sensitivity_at_optimum: None,
    };
    scan.sensitivity_at_optimum = phase_sensitivity(&scan, n).ok();
    Ok(scan)
}

/// Error-propagation phase uncertainty `√(P1(1-P1)) / |dP1/dφ|`, minimized over
/// the grid interior.
///
/// Derivatives are central differences: five-point on uniform grids where both
/// neighbors exist, three-point otherwise. Points where the slope vanishes
/// (fringe extremes, where the quotient is 0/0) are skipped.
pub fn phase_sensitivity(scan: &FringeScan, n_spins: usize) -> Result<f64> {
    let phi = &scan.phi_values;
    let p = &scan.p1_values;
    if phi.len() != p.len() {
        return Err(invalid("fringe columns differ in length"));
    }
    if phi.len() < 3 {
        return Err(invalid("sensitivity needs at least three fringe points"));
    }
    if phi
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(invalid("phase grid must be strictly increasing"));
    }
    let h0 = phi[1] - phi[0];
    let uniform = phi.windows(2).all(|w| ((w[1] - w[0]) - h0).abs() <= 1e-9 * h0.abs());
    let slope_floor = 1e-6 * n_spins.max(1) as f64;

    let mut best: Option<f64> = None;
    for i in 1..phi.len() - 1 {
        let d = if uniform && i >= 2 && i + 2 < phi.len() {
            (p[i - 2] - 8.0 * p[i - 1] + 8.0 * p[i + 1] - p[i + 2]) / (12.0 * h0)
        } else {
            let h1 = phi[i] - phi[i - 1];
            let h2 = phi[i + 1] - phi[i];
            -h2 / (h1 * (h1 + h2)) * p[i - 1] + (h2 - h1) / (h1 * h2) * p[i] + h1 / (h2 * (h1 + h2)) * p[i + 1]
        };
        if d.abs() < slope_floor {
            continue;
        }
        let q = p[i].clamp(0.0, 1.0);
        let value = (q * (1.0 - q)).sqrt() / d.abs();
        best = Some(best.map_or(value, |b| b.min(value)));
    }
    best.ok_or(SpinError::FlatFringe)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasPoint {
    pub delta: f64,
    pub p_up: f64,
    pub p_down: f64,
    pub noon_fidelity: f64,
}

/// BS1 observables for each bias value in `delta_grid` (units of J0).
pub fn bias_scan(cfg: &InterferometerConfig, delta_grid: &[f64]) -> Result<Vec<BiasPoint>> {
    if delta_grid.iter().any(|d| !d.is_finite()) {
        return Err(invalid("bias grid must be finite"));
    }
    cfg.validate()?;
    delta_grid
        .par_iter()
        .map(|&delta| {
            let state = run_bs1(&cfg.with_bias(delta))?;
            let (p_up, p_down) = fm_populations(&state);
            Ok(BiasPoint {
                delta,
                p_up,
                p_down,
                noon_fidelity: noon_fidelity(&state),
            })
        })
        .collect()
}

/// How a dimensionless time maps to physical time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeConvention {
    /// `t_phys = t / J0`.
    #[default]
    Plain,
    /// `t_phys = t / (2π J0)`.
    Angular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitsConfig {
    pub j0_khz: f64,
    pub convention: TimeConvention,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self {
            j0_khz: 50.0,
            convention: TimeConvention::Plain,
        }
    }
}

impl UnitsConfig {
    pub fn new(j0_khz: f64) -> Result<Self> {
        let u = Self {
            j0_khz,
            ..Self::default()
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j0_khz.is_finite() && self.j0_khz > 0.0) {
            return Err(invalid(format!("J0 must be positive, got {} kHz", self.j0_khz)));
        }
        Ok(())
    }

    /// Time unit in microseconds.
    fn time_unit_us(&self) -> f64 {
        let plain = 1e3 / self.j0_khz;
        match self.convention {
            TimeConvention::Plain => plain,
            TimeConvention::Angular => plain / (2.0 * PI),
        }
    }

    pub fn to_physical_us(&self, t: f64) -> f64 {
        t * self.time_unit_us()
    }

    pub fn to_dimensionless_time(&self, t_us: f64) -> f64 {
        t_us / self.time_unit_us()
    }

    /// Frequency in kHz to units of J0.
    pub fn to_dimensionless_energy(&self, f_khz: f64) -> f64 {
        f_khz / self.j0_khz
    }

    pub fn to_physical_khz(&self, e: f64) -> f64 {
        e * self.j0_khz
    }
}

/// Dimensionless length of BS1 + free evolution + BS2.
pub fn sequence_duration(tau: f64, t_free: f64) -> f64 {
    4.0 * tau + t_free
}

/// Mean relative phase read off a state entering BS2 (diagnostic).
pub fn noon_relative_phase(pre_bs2: &StateVector) -> f64 {
    let basis = pre_bs2.basis();
    let z: Complex64 = pre_bs2.amplitude(basis.all_down()).conj() * pre_bs2.amplitude(basis.all_up());
    z.arg()
}
