//! Transverse-field Ising Hamiltonian with power-law couplings on an open chain:
//!
//! ```text
//! H = -Σ_{i<j} J_ij σz^i σz^j - B Σ_i σx^i + δ Σ_i σz^i,   J_ij = J / |i-j|^α
//! ```
//!
//! σz acts as `+1` on `|↑⟩` and `-1` on `|↓⟩`, so a positive bias δ raises the
//! energy of `|↑⋯↑⟩` by `δN` and favors `|↓⋯↓⟩`. The free Hamiltonian is
//! `H0 = ω0 Σ_i σz^i`. All energies are dimensionless (units of J0).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SpinError};
use crate::statevec::{SpinBasis, StateVector};

/// Largest chain accepted by [`build_dense`] and the dense eigensolver.
pub const MAX_DENSE_SPINS: usize = 12;

/// Basis dimension above which the matrix-free kernel splits work across threads.
const PARALLEL_DIM: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub n_spins: usize,
    /// Nearest-neighbor coupling J ≥ 0.
    pub j_nn: f64,
    /// Transverse field B.
    pub b_field: f64,
    /// Longitudinal bias δ.
    pub delta_bias: f64,
    /// Power-law exponent α of the couplings.
    pub exponent: f64,
}

impl IsingParams {
    pub fn new(n_spins: usize, j_nn: f64, b_field: f64) -> Self {
        Self {
            n_spins,
            j_nn,
            b_field,
            delta_bias: 0.0,
            exponent: 3.0,
        }
    }

    pub fn with_bias(mut self, delta_bias: f64) -> Self {
        self.delta_bias = delta_bias;
        self
    }

    pub fn with_exponent(mut self, exponent: f64) -> Self {
        self.exponent = exponent;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(SpinError::NoSpins);
        }
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(invalid(format!("exponent must be positive, got {}", self.exponent)));
        }
        if !(self.j_nn.is_finite() && self.b_field.is_finite() && self.delta_bias.is_finite()) {
            return Err(invalid("couplings must be finite"));
        }
        if self.j_nn < 0.0 {
            return Err(invalid(format!("coupling J must be non-negative, got {}", self.j_nn)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEvolutionParams {
    pub n_spins: usize,
    /// Coefficient ω0 of `Σ_i σz^i`.
    pub omega0: f64,
}

/// `J_ij = J/|i-j|^α` for `i ≠ j`, zero on the diagonal. Row-major `N × N`.
pub fn coupling_matrix(params: &IsingParams) -> Vec<Vec<f64>> {
    let n = params.n_spins;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        params.j_nn / (i.abs_diff(j) as f64).powf(params.exponent)
                    }
                })
                .collect()
        })
        .collect()
}

/// Precomputed diagonal tables for a chain of fixed length and exponent.
///
/// The Ising energy is linear in J, so one table of `-Σ_{i<j} s_i s_j/|i-j|^α`
/// serves every point of a sweep.
#[derive(Debug, Clone)]
pub struct IsingOperator {
    basis: SpinBasis,
    exponent: f64,
    zz_unit: Vec<f64>,
    mz: Vec<f64>,
}

impl IsingOperator {
    pub fn new(basis: SpinBasis, exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(invalid(format!("exponent must be positive, got {exponent}")));
        }
        let n = basis.n_spins();
        let pairs: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, ((j - i) as f64).powf(exponent).recip()))
            .collect();
        let zz_of = |b: usize| -> f64 {
            -pairs
                .iter()
                .map(|&(i, j, w)| if ((b >> i) ^ (b >> j)) & 1 == 0 { w } else { -w })
                .sum::<f64>()
        };
        let dim = basis.dim();
        let zz_unit: Vec<f64> = if dim >= PARALLEL_DIM {
            (0..dim).into_par_iter().map(zz_of).collect()
        } else {
            (0..dim).map(zz_of).collect()
        };
        let mz = (0..dim).map(|b| basis.magnetization(b)).collect();
        Ok(Self {
            basis,
            exponent,
            zz_unit,
            mz,
        })
    }

    pub fn for_params(params: &IsingParams) -> Result<Self> {
        params.validate()?;
        Self::new(SpinBasis::new(params.n_spins)?, params.exponent)
    }

    #[inline]
    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    #[inline]
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Diagonal matrix element for coupling `j`, bias `delta` at basis index `b`.
    #[inline]
    pub fn diagonal(&self, j: f64, delta: f64, b: usize) -> f64 {
        j * self.zz_unit[b] + delta * self.mz[b]
    }

    /// `out = H(j, b_field, delta) · psi`, matrix-free.
    pub fn apply_into(&self, j: f64, b_field: f64, delta: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.basis.n_spins();
        debug_assert_eq!(psi.len(), self.basis.dim());
        debug_assert_eq!(out.len(), self.basis.dim());
        let row = |(b, slot): (usize, &mut Complex64)| {
            let flips: Complex64 = (0..n).map(|i| psi[b ^ (1 << i)]).sum();
            *slot = psi[b] * (j * self.zz_unit[b] + delta * self.mz[b]) - flips * b_field;
        };
        if psi.len() >= PARALLEL_DIM {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }

    /// `⟨ψ|H|ψ⟩` for a normalized ψ.
    pub fn expectation(&self, j: f64, b_field: f64, delta: f64, psi: &[Complex64]) -> f64 {
        let mut h_psi = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_into(j, b_field, delta, psi, &mut h_psi);
        crate::statevec::inner(psi, &h_psi).re
    }
}

/// `H|ψ⟩` for the given parameters. The result is an operator image, not a state,
/// so it is returned as raw amplitudes.
pub fn apply_hamiltonian(params: &IsingParams, psi: &StateVector) -> Result<Vec<Complex64>> {
    params.validate()?;
    let basis = SpinBasis::new(params.n_spins)?;
    basis.check_same(&psi.basis())?;
    let op = IsingOperator::new(basis, params.exponent)?;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.dim()];
    op.apply_into(
        params.j_nn,
        params.b_field,
        params.delta_bias,
        psi.amplitudes(),
        &mut out,
    );
    Ok(out)
}

/// `H0|ψ⟩ = ω0 Σ_i σz^i |ψ⟩`.
pub fn apply_free_hamiltonian(params: &FreeEvolutionParams, psi: &StateVector) -> Result<Vec<Complex64>> {
    let basis = SpinBasis::new(params.n_spins)?;
    basis.check_same(&psi.basis())?;
    Ok(psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(b, c)| c * (params.omega0 * basis.magnetization(b)))
        .collect())
}

/// Dense real-symmetric matrix of H, built entry by entry from [`coupling_matrix`].
pub fn build_dense_real(params: &IsingParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    let n = params.n_spins;
    if n > MAX_DENSE_SPINS {
        return Err(SpinError::DenseTooLarge {
            n,
            max: MAX_DENSE_SPINS,
        });
    }
    let couplings = coupling_matrix(params);
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        let s = |i: usize| SpinBasis::spin_sign(b, i);
        let mut e = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                e -= couplings[i][j] * s(i) * s(j);
            }
            e += params.delta_bias * s(i);
        }
        h[(b, b)] = e;
        for i in 0..n {
            h[(b ^ (1 << i), b)] -= params.b_field;
        }
    }
    Ok(h)
}

/// Dense complex Hermitian matrix of H (`N ≤ 12`).
pub fn build_dense(params: &IsingParams) -> Result<DMatrix<Complex64>> {
    Ok(build_dense_real(params)?.map(|x| Complex64::new(x, 0.0)))
}
