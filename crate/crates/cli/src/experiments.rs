//! One table per experiment. Scan jobs run on the current rayon pool and are
//! collected in input order.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use spinmz::evolve::{propagate, schedule_single_step_b, schedule_single_step_j, EvolutionTrace, Schedule};
use spinmz::interferometer::{
    bias_scan, default_phi_grid, free_time_for_phase, fringe_scan, phase_sensitivity, run_bs1,
};
use spinmz::observables::{exact_spectrum, noon_fidelity, parity_expectation};
use spinmz::statevec::make_product_x_state;
use spinmz::{IsingParams, SpinBasis};

use crate::config::{Experiment, ExperimentConfig, Scheme};
use crate::table::ResultTable;

/// Independent jobs the experiment fans out over; sizes the default pool.
pub fn job_count(cfg: &ExperimentConfig) -> Result<usize> {
    let n = cfg.n.len();
    Ok(match cfg.experiment()? {
        Experiment::Populations => n,
        Experiment::SchemeCompare => n * Scheme::ALL.len(),
        Experiment::FidelityScan => n * cfg.two_tau_grid.len(),
        Experiment::Fringe | Experiment::Sensitivity => n * cfg.phi_points,
        Experiment::BiasScan => n * cfg.delta_grid.len(),
        Experiment::Spectrum => n * cfg.spectrum_points,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let table = match cfg.experiment()? {
        Experiment::Populations => populations(cfg)?,
        Experiment::SchemeCompare => scheme_compare(cfg)?,
        Experiment::FidelityScan => fidelity_scan(cfg)?,
        Experiment::Fringe => fringe(cfg)?,
        Experiment::Sensitivity => sensitivity(cfg)?,
        Experiment::BiasScan => bias(cfg)?,
        Experiment::Spectrum => spectrum(cfg)?,
    };
    table.check()?;
    Ok(table)
}

fn schedule_for(cfg: &ExperimentConfig, scheme: Scheme, n: usize) -> Result<Schedule> {
    let total = 2.0 * cfg.tau;
    Ok(match scheme {
        Scheme::TwoStep => cfg.interferometer(n).bs1_schedule()?,
        Scheme::SingleJ => schedule_single_step_j(total, cfg.b_fixed, cfg.j_final)?.with_bias(cfg.delta),
        Scheme::SingleB => schedule_single_step_b(total, cfg.j_fixed, cfg.b_start)?.with_bias(cfg.delta),
    })
}

fn trace(cfg: &ExperimentConfig, scheme: Scheme, n: usize) -> Result<EvolutionTrace> {
    let psi0 = make_product_x_state(SpinBasis::new(n)?, 1)?;
    let schedule = schedule_for(cfg, scheme, n)?;
    Ok(propagate(&psi0, &schedule, &cfg.propagator(), cfg.sample_every)?)
}

/// Shared time column of traces that must be sampled identically.
fn common_times(traces: &[EvolutionTrace]) -> Result<&[f64]> {
    let times = &traces[0].times;
    for t in &traces[1..] {
        ensure!(
            t.times.len() == times.len() && t.times.iter().zip(times).all(|(a, b)| (a - b).abs() < 1e-9),
            "traces sample different times; pick dt dividing tau"
        );
    }
    Ok(times)
}

fn populations(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let traces = cfg
        .n
        .par_iter()
        .map(|&n| trace(cfg, cfg.scheme, n))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["t".to_string()];
    for n in &cfg.n {
        for name in ["p_up", "p_down", "p_sum", "noon_fidelity"] {
            columns.push(format!("{name}_n{n}"));
        }
    }
    let mut table = ResultTable::new(columns);
    for (i, &t) in common_times(&traces)?.iter().enumerate() {
        let mut row = vec![t];
        for tr in &traces {
            let (up, down) = (tr.p_all_up[i], tr.p_all_down[i]);
            row.extend([up, down, up + down, tr.noon_fidelity[i]]);
        }
        table.push(row);
    }
    Ok(table)
}

fn scheme_compare(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let jobs: Vec<(usize, Scheme)> = cfg.n.iter().flat_map(|&n| Scheme::ALL.map(|s| (n, s))).collect();
    let traces = jobs
        .par_iter()
        .map(|&(n, s)| trace(cfg, s, n))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["t".to_string()];
    columns.extend(jobs.iter().map(|(n, s)| format!("p_sum_{}_n{n}", s.column_tag())));
    let mut table = ResultTable::new(columns);
    for (i, &t) in common_times(&traces)?.iter().enumerate() {
        let mut row = vec![t];
        row.extend(traces.iter().map(|tr| tr.p_all_up[i] + tr.p_all_down[i]));
        table.push(row);
    }
    Ok(table)
}

fn fidelity_scan(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let jobs: Vec<(f64, usize)> = cfg
        .two_tau_grid
        .iter()
        .flat_map(|&tt| cfg.n.iter().map(move |&n| (tt, n)))
        .collect();
    let fid = jobs
        .par_iter()
        .map(|&(tt, n)| {
            let icfg = spinmz::InterferometerConfig {
                tau: tt / 2.0,
                ..cfg.interferometer(n)
            };
            Ok(noon_fidelity(&run_bs1(&icfg)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut columns = vec!["two_tau".to_string()];
    columns.extend(cfg.n.iter().map(|n| format!("fidelity_n{n}")));
    let mut table = ResultTable::new(columns);
    for (k, &tt) in cfg.two_tau_grid.iter().enumerate() {
        let mut row = vec![tt];
        row.extend_from_slice(&fid[k * cfg.n.len()..(k + 1) * cfg.n.len()]);
        table.push(row);
    }
    Ok(table)
}

fn fringe(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let scans = cfg
        .n
        .par_iter()
        .map(|&n| {
            Ok(fringe_scan(
                &cfg.interferometer(n),
                &default_phi_grid(n, cfg.phi_points),
                cfg.ideal,
            )?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(["n", "phi", "t_free", "p1", "p1_analytic"]);
    for scan in &scans {
        for i in 0..scan.phi_values.len() {
            let phi = scan.phi_values[i];
            table.push(vec![
                scan.n_spins as f64,
                phi,
                free_time_for_phase(cfg.omega0, phi)?,
                scan.p1_values[i],
                scan.p1_analytic[i],
            ]);
        }
    }
    Ok(table)
}

fn sensitivity(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let rows = cfg
        .n
        .par_iter()
        .map(|&n| {
            let icfg = cfg.interferometer(n);
            let scan = fringe_scan(&icfg, &default_phi_grid(n, cfg.phi_points), cfg.ideal)?;
            let delta_phi = phase_sensitivity(&scan, n)?;
            let fidelity = if cfg.ideal {
                1.0
            } else {
                noon_fidelity(&run_bs1(&icfg)?)
            };
            Ok(vec![n as f64, delta_phi, 1.0 / n as f64, scan.visibility(), fidelity])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(["n", "delta_phi", "heisenberg_limit", "visibility", "noon_fidelity"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn bias(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let scans = cfg
        .n
        .par_iter()
        .map(|&n| Ok(bias_scan(&cfg.interferometer(n), &cfg.delta_grid)?))
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(["n", "delta", "p_up", "p_down", "noon_fidelity"]);
    for (&n, pts) in cfg.n.iter().zip(&scans) {
        for p in pts {
            table.push(vec![n as f64, p.delta, p.p_up, p.p_down, p.noon_fidelity]);
        }
    }
    Ok(table)
}

/// Lowest levels of the instantaneous Hamiltonian along the BS1 program.
fn spectrum(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let jobs: Vec<(usize, usize)> = cfg
        .n
        .iter()
        .flat_map(|&n| (0..cfg.spectrum_points).map(move |k| (n, k)))
        .collect();
    let blocks = jobs
        .par_iter()
        .map(|&(n, k)| {
            let schedule = cfg.interferometer(n).bs1_schedule()?;
            let t = if cfg.spectrum_points == 1 {
                0.0
            } else {
                schedule.total_duration() * k as f64 / (cfg.spectrum_points - 1) as f64
            };
            let c = schedule.at(t);
            let spec = exact_spectrum(&IsingParams::new(n, c.j, c.b).with_bias(c.delta), cfg.levels)?;
            Ok(spec
                .eigenvalues
                .iter()
                .zip(&spec.eigenvectors)
                .enumerate()
                .map(|(level, (e, v))| vec![n as f64, t, c.j, c.b, level as f64, *e, parity_expectation(v)])
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(["n", "t", "j", "b", "level", "energy", "parity"]);
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}
