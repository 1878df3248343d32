use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One linear ramp of `(J, B)` at constant bias δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub j_start: f64,
    pub j_end: f64,
    pub b_start: f64,
    pub b_end: f64,
    pub delta: f64,
}

impl Segment {
    /// Coefficients at local time `s ∈ [0, duration]`.
    #[inline]
    pub fn at(&self, s: f64) -> Coefficients {
        let x = s / self.duration;
        Coefficients {
            j: self.j_start + (self.j_end - self.j_start) * x,
            b: self.b_start + (self.b_end - self.b_start) * x,
            delta: self.delta,
        }
    }

    fn reversed(&self) -> Self {
        Self {
            duration: self.duration,
            j_start: self.j_end,
            j_end: self.j_start,
            b_start: self.b_end,
            b_end: self.b_start,
            delta: self.delta,
        }
    }
}

/// Instantaneous Hamiltonian coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub j: f64,
    pub b: f64,
    pub delta: f64,
}

/// Piecewise-linear program for `J(t)`, `B(t)` and δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(invalid("schedule needs at least one segment"));
        }
        for s in &segments {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(invalid(format!(
                    "segment duration must be positive, got {}",
                    s.duration
                )));
            }
            let vals = [s.j_start, s.j_end, s.b_start, s.b_end, s.delta];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(invalid("segment coefficients must be finite"));
            }
            if s.j_start < 0.0 || s.j_end < 0.0 {
                return Err(invalid("coupling J must stay non-negative"));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Coefficients at global time `t`, clamped to `[0, total_duration]`.
    /// At an interior boundary the earlier segment's endpoint is used.
    pub fn at(&self, t: f64) -> Coefficients {
        let mut start = 0.0;
        for seg in &self.segments {
            if t <= start + seg.duration {
                return seg.at((t - start).max(0.0));
            }
            start += seg.duration;
        }
        let last = self.segments.last().expect("non-empty");
        last.at(last.duration)
    }

    /// Same schedule with δ replaced on every segment.
    pub fn with_bias(mut self, delta: f64) -> Self {
        self.segments.iter_mut().for_each(|s| s.delta = delta);
        self
    }

    /// Time-reversed program: segments in reverse order with their endpoints swapped.
    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }
}

fn check_duration(d: f64) -> Result<()> {
    if !(d.is_finite() && d > 0.0) {
        return Err(invalid(format!("sweep duration must be positive, got {d}")));
    }
    Ok(())
}

/// Ramp `J: 0 → j_final` over `duration` at fixed transverse field.
pub fn schedule_single_step_j(duration: f64, b_fixed: f64, j_final: f64) -> Result<Schedule> {
    check_duration(duration)?;
    Schedule::new(vec![Segment {
        duration,
        j_start: 0.0,
        j_end: j_final,
        b_start: b_fixed,
        b_end: b_fixed,
        delta: 0.0,
    }])
}

/// Ramp `B: b_start → 0` over `duration` at fixed coupling.
pub fn schedule_single_step_b(duration: f64, j_fixed: f64, b_start: f64) -> Result<Schedule> {
    check_duration(duration)?;
    if b_start.is_nan() || b_start <= 0.0 {
        return Err(invalid(format!("initial field must be positive, got {b_start}")));
    }
    Schedule::new(vec![Segment {
        duration,
        j_start: j_fixed,
        j_end: j_fixed,
        b_start,
        b_end: 0.0,
        delta: 0.0,
    }])
}

/// Two-step sweep: `J: 0 → j0` at `B = b0` over `[0, τ]`, then `B: b0 → 0` at
/// `J = j0` over `[τ, 2τ]`.
pub fn schedule_two_step(tau: f64, j0: f64, b0: f64) -> Result<Schedule> {
    check_duration(tau)?;
    Schedule::new(vec![
        Segment {
            duration: tau,
            j_start: 0.0,
            j_end: j0,
            b_start: b0,
            b_end: b0,
            delta: 0.0,
        },
        Segment {
            duration: tau,
            j_start: j0,
            j_end: j0,
            b_start: b0,
            b_end: 0.0,
            delta: 0.0,
        },
    ])
}

pub fn reverse_schedule(s: &Schedule) -> Schedule {
    s.reversed()
}
