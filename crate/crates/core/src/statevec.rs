//! Computational-basis conventions and the dense state-vector container.
//!
//! Basis index `b` runs over `[0, 2^N)`. Bit `i` of `b` is set exactly when
//! spin `i` is `|↑⟩` in the σz eigenbasis; spin 0 is the least significant
//! bit. So `b = 0` is `|↓⋯↓⟩` and `b = 2^N - 1` is `|↑⋯↑⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};

/// Default upper bound on the chain length (2^20 amplitudes, 16 MiB per vector).
pub const DEFAULT_SPIN_CAP: usize = 20;

/// Tolerance on `|‖ψ‖ - 1|` accepted by [`StateVector::from_amplitudes`].
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinBasis {
    n_spins: usize,
}

impl SpinBasis {
    pub fn new(n_spins: usize) -> Result<Self> {
        Self::with_cap(n_spins, DEFAULT_SPIN_CAP)
    }

    pub fn with_cap(n_spins: usize, cap: usize) -> Result<Self> {
        if n_spins == 0 {
            return Err(SpinError::NoSpins);
        }
        if n_spins > cap || n_spins >= usize::BITS as usize {
            return Err(SpinError::DimensionCap { n: n_spins, cap });
        }
        Ok(Self { n_spins })
    }

    #[inline]
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    /// Index of `|↑⋯↑⟩`.
    #[inline]
    pub fn all_up(&self) -> usize {
        self.dim() - 1
    }

    /// Index of `|↓⋯↓⟩`.
    #[inline]
    pub fn all_down(&self) -> usize {
        0
    }

    /// σz eigenvalue of spin `i` in basis state `b`: `+1` for up, `-1` for down.
    #[inline]
    pub fn spin_sign(b: usize, i: usize) -> f64 {
        if (b >> i) & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Total magnetization `Σ_i s_i(b)`.
    #[inline]
    pub fn magnetization(&self, b: usize) -> f64 {
        2.0 * (b.count_ones() as f64) - self.n_spins as f64
    }

    pub(crate) fn check_same(&self, other: &SpinBasis) -> Result<()> {
        if self.n_spins != other.n_spins {
            return Err(SpinError::BasisMismatch {
                left: self.n_spins,
                right: other.n_spins,
            });
        }
        Ok(())
    }
}

/// Unit-norm ket over the full `2^N` computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: SpinBasis,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized (within [`NORM_TOLERANCE`]).
    pub fn from_amplitudes(basis: SpinBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&basis, &amplitudes)?;
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SpinError::NotNormalized(norm));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(basis: SpinBasis, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&basis, &amplitudes)?;
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || norm == 0.0 {
            return Err(SpinError::NotNormalized(norm));
        }
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|c| *c *= inv);
        Ok(Self { basis, amplitudes })
    }

    /// Computational basis state `|b⟩`.
    pub fn basis_state(basis: SpinBasis, b: usize) -> Result<Self> {
        if b >= basis.dim() {
            return Err(crate::error::invalid(format!(
                "basis index {b} out of range for {} spins",
                basis.n_spins()
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[b] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Used by propagators that track the norm themselves.
    pub(crate) fn from_raw(basis: SpinBasis, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), basis.dim());
        Self { basis, amplitudes }
    }

    #[inline]
    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    #[inline]
    pub fn n_spins(&self) -> usize {
        self.basis.n_spins()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitude(&self, b: usize) -> Complex64 {
        self.amplitudes[b]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// Probability `|c_b|²` of basis state `b`.
    #[inline]
    pub fn probability(&self, b: usize) -> f64 {
        self.amplitudes[b].norm_sqr()
    }
}

/// Uniformly polarized product state along ±x.
///
/// `direction > 0` gives `|→⋯→⟩` (all amplitudes `2^{-N/2}`), `direction < 0`
/// gives `|←⋯←⟩` with a sign `(-1)^popcount(b)`.
pub fn make_product_x_state(basis: SpinBasis, direction: i8) -> Result<StateVector> {
    if direction == 0 {
        return Err(crate::error::invalid("product state direction must be +1 or -1"));
    }
    let a = (basis.dim() as f64).sqrt().recip();
    let amplitudes = (0..basis.dim())
        .map(|b| {
            if direction < 0 && b.count_ones() % 2 == 1 {
                Complex64::new(-a, 0.0)
            } else {
                Complex64::new(a, 0.0)
            }
        })
        .collect();
    Ok(StateVector { basis, amplitudes })
}

/// `(|↓⋯↓⟩ + e^{iθ}|↑⋯↑⟩)/√2`.
pub fn make_noon_state(basis: SpinBasis, relative_phase: f64) -> StateVector {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
    let a = std::f64::consts::FRAC_1_SQRT_2;
    amplitudes[basis.all_down()] += Complex64::new(a, 0.0);
    amplitudes[basis.all_up()] += Complex64::from_polar(a, relative_phase);
    StateVector { basis, amplitudes }
}

/// `⟨a|b⟩`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.basis.check_same(&b.basis)?;
    Ok(inner(&a.amplitudes, &b.amplitudes))
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn check_len(basis: &SpinBasis, amplitudes: &[Complex64]) -> Result<()> {
    if amplitudes.len() != basis.dim() {
        return Err(crate::error::invalid(format!(
            "expected {} amplitudes for {} spins, got {}",
            basis.dim(),
            basis.n_spins(),
            amplitudes.len()
        )));
    }
    Ok(())
}
