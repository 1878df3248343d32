//! Schrödinger propagation `i dψ/dt = H(t)ψ` (ħ = 1) under piecewise-linear sweeps.

mod propagator;
mod schedule;

pub use propagator::{
    propagate, propagate_free, propagate_with_operator, EvolutionTrace, Method, PropagatorConfig, NORM_DRIFT_TOL,
};
pub use schedule::{
    reverse_schedule, schedule_single_step_b, schedule_single_step_j, schedule_two_step, Coefficients, Schedule,
    Segment,
};
