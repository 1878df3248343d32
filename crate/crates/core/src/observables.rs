//! Measurement functionals and small-N exact spectra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result, SpinError};
use crate::hamiltonian::{build_dense_real, IsingParams, MAX_DENSE_SPINS};
use crate::statevec::{inner, make_noon_state, overlap, SpinBasis, StateVector};

/// Eigenvalues closer than this are treated as one degenerate cluster.
const DEGENERACY_TOL: f64 = 1e-9;

/// `(p_up, p_down) = (|c_{2^N-1}|², |c_0|²)`.
pub fn fm_populations(psi: &StateVector) -> (f64, f64) {
    let basis = psi.basis();
    (psi.probability(basis.all_up()), psi.probability(basis.all_down()))
}

/// NOON fidelity maximized over the relative phase: `(|c_0| + |c_{2^N-1}|)² / 2`.
pub fn noon_fidelity(psi: &StateVector) -> f64 {
    noon_fidelity_of(psi.amplitudes())
}

pub(crate) fn noon_fidelity_of(psi: &[Complex64]) -> f64 {
    let s = psi[0].norm() + psi[psi.len() - 1].norm();
    0.5 * s * s
}

/// `|⟨NOON(θ)|ψ⟩|²` at a fixed relative phase θ.
pub fn noon_overlap_fixed(psi: &StateVector, relative_phase: f64) -> f64 {
    let noon = make_noon_state(psi.basis(), relative_phase);
    overlap(&noon, psi).map(|c| c.norm_sqr()).unwrap_or(0.0)
}

/// `⟨ψ|Π_i σx^i|ψ⟩`. The global flip maps `b` to its bitwise complement.
pub fn parity_expectation(psi: &StateVector) -> f64 {
    parity_of(psi.amplitudes())
}

pub(crate) fn parity_of(psi: &[Complex64]) -> f64 {
    let mask = psi.len() - 1;
    psi.iter()
        .enumerate()
        .map(|(b, c)| psi[!b & mask].conj() * c)
        .sum::<Complex64>()
        .re
}

/// `Π_i σx^i |ψ⟩`.
pub fn apply_parity(psi: &StateVector) -> StateVector {
    let mask = psi.basis().dim() - 1;
    let amps = (0..=mask).map(|b| psi.amplitude(!b & mask)).collect();
    StateVector::from_amplitudes(psi.basis(), amps).expect("permutation keeps the norm")
}

/// `⟨Σ_i σz^i⟩`.
pub fn magnetization(psi: &StateVector) -> f64 {
    let basis = psi.basis();
    psi.amplitudes()
        .iter()
        .enumerate()
        .map(|(b, c)| c.norm_sqr() * basis.magnetization(b))
        .sum()
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
    pub params: IsingParams,
}

impl SpectrumResult {
    pub fn gap(&self) -> Option<f64> {
        match self.eigenvalues.as_slice() {
            [e0, e1, ..] => Some(e1 - e0),
            _ => None,
        }
    }
}

/// Lowest `k` eigenpairs of the dense Hamiltonian.
///
/// Within a degenerate cluster the basis is rotated to diagonalize the global
/// parity, then ordered by ascending `⟨P⟩` and by the index of the dominant
/// basis component. Each vector's dominant component is made real positive.
pub fn exact_spectrum(params: &IsingParams, k: usize) -> Result<SpectrumResult> {
    if params.n_spins > MAX_DENSE_SPINS {
        return Err(SpinError::DenseTooLarge {
            n: params.n_spins,
            max: MAX_DENSE_SPINS,
        });
    }
    let basis = SpinBasis::new(params.n_spins)?;
    let dim = basis.dim();
    if k > dim {
        return Err(invalid(format!(
            "requested {k} eigenpairs from a {dim}-dimensional space"
        )));
    }
    let h = build_dense_real(params)?;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();

    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut start = 0;
    while start < dim && eigenvalues.len() < k {
        let mut end = start + 1;
        while end < dim && values[end] - values[start] < DEGENERACY_TOL {
            end += 1;
        }
        let cluster = canonical_cluster(&vectors[start..end]);
        for (idx, v) in cluster.into_iter().enumerate() {
            if eigenvalues.len() == k {
                break;
            }
            eigenvalues.push(values[start + idx]);
            let amps = v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
            eigenvectors.push(StateVector::normalized(basis, amps)?);
        }
        start = end;
    }

    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        params: *params,
    })
}

fn real_parity(v: &[f64]) -> f64 {
    let mask = v.len() - 1;
    v.iter().enumerate().map(|(b, x)| v[!b & mask] * x).sum()
}

fn dominant_index(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        // strict improvement beyond rounding keeps the lowest index on ties
        if x.abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    best
}

fn canonical_cluster(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = vectors.len();
    let mut rotated: Vec<Vec<f64>> = if m == 1 {
        vectors.to_vec()
    } else {
        let dim = vectors[0].len();
        let mask = dim - 1;
        let p = DMatrix::<f64>::from_fn(m, m, |a, b| {
            (0..dim).map(|i| vectors[a][!i & mask] * vectors[b][i]).sum()
        });
        let pe = p.symmetric_eigen();
        (0..m)
            .map(|c| {
                let mut out = vec![0.0; dim];
                for a in 0..m {
                    let w = pe.eigenvectors[(a, c)];
                    out.iter_mut().zip(&vectors[a]).for_each(|(o, x)| *o += w * x);
                }
                out
            })
            .collect()
    };
    for v in &mut rotated {
        let d = dominant_index(v);
        if v[d] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let mut keyed: Vec<(f64, usize, Vec<f64>)> = rotated
        .into_iter()
        .map(|v| ((real_parity(&v) * 1e8).round() / 1e8, dominant_index(&v), v))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, _, v)| v).collect()
}

/// `‖Hv - λv‖` for a returned eigenpair.
pub fn eigen_residual(params: &IsingParams, value: f64, vector: &StateVector) -> Result<f64> {
    let hv = crate::hamiltonian::apply_hamiltonian(params, vector)?;
    Ok(hv
        .iter()
        .zip(vector.amplitudes())
        .map(|(a, b)| (a - b * value).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `|⟨a|b⟩|²`.
pub fn overlap_sq(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.basis().check_same(&b.basis())?;
    Ok(inner(a.amplitudes(), b.amplitudes()).norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::make_product_x_state;

    fn basis(n: usize) -> SpinBasis {
        SpinBasis::new(n).unwrap()
    }

    #[test]
    fn populations() {
        let (u, d) = fm_populations(&make_noon_state(basis(3), 0.0));
        assert!((u - 0.5).abs() < 1e-15 && (d - 0.5).abs() < 1e-15);
        let (u, d) = fm_populations(&make_product_x_state(basis(4), 1).unwrap());
        assert!((u - 1.0 / 16.0).abs() < 1e-15 && (d - 1.0 / 16.0).abs() < 1e-15);
        let up = StateVector::basis_state(basis(3), 7).unwrap();
        assert_eq!(fm_populations(&up), (1.0, 0.0));
    }

    #[test]
    fn fidelity() {
        for theta in [0.0, 0.7, std::f64::consts::PI, -2.0] {
            assert!((noon_fidelity(&make_noon_state(basis(5), theta)) - 1.0).abs() < 1e-14);
        }
        let up = StateVector::basis_state(basis(3), 7).unwrap();
        assert!((noon_fidelity(&up) - 0.5).abs() < 1e-15);
        let plus = make_product_x_state(basis(2), 1).unwrap();
        assert!((noon_fidelity(&plus) - 0.5).abs() < 1e-15);

        let noon_pi = make_noon_state(basis(3), std::f64::consts::PI);
        assert!(noon_overlap_fixed(&noon_pi, 0.0) < 1e-30);
        assert!((noon_overlap_fixed(&noon_pi, std::f64::consts::PI) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parity() {
        assert!((parity_expectation(&make_product_x_state(basis(4), 1).unwrap()) - 1.0).abs() < 1e-14);
        assert!((parity_expectation(&make_product_x_state(basis(3), -1).unwrap()) + 1.0).abs() < 1e-14);
        assert!((parity_expectation(&make_noon_state(basis(4), 0.0)) - 1.0).abs() < 1e-14);
        let ghz_minus = make_noon_state(basis(4), std::f64::consts::PI);
        assert!((parity_expectation(&ghz_minus) + 1.0).abs() < 1e-14);
        let ud = StateVector::basis_state(basis(2), 0b01).unwrap();
        assert_eq!(parity_expectation(&ud), 0.0);
        assert_eq!(apply_parity(&ud).amplitude(0b10), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn magnetization_values() {
        assert_eq!(magnetization(&StateVector::basis_state(basis(3), 7).unwrap()), 3.0);
        assert!(magnetization(&make_noon_state(basis(3), 0.0)).abs() < 1e-15);
    }

    #[test]
    fn spectrum_small_cases() {
        let s = exact_spectrum(&IsingParams::new(1, 0.0, 1.0), 2).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        let plus = make_product_x_state(basis(1), 1).unwrap();
        assert!((overlap_sq(&s.eigenvectors[0], &plus).unwrap() - 1.0).abs() < 1e-14);

        let s = exact_spectrum(&IsingParams::new(2, 1.0, 0.0), 4).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        // degenerate ground pair comes out as GHZ- then GHZ+
        assert!((parity_expectation(&s.eigenvectors[0]) + 1.0).abs() < 1e-12);
        assert!((parity_expectation(&s.eigenvectors[1]) - 1.0).abs() < 1e-12);
        assert!((s.gap().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn spectrum_errors() {
        assert!(matches!(
            exact_spectrum(&IsingParams::new(13, 1.0, 1.0), 1),
            Err(SpinError::DenseTooLarge { .. })
        ));
        assert!(exact_spectrum(&IsingParams::new(2, 1.0, 1.0), 5).is_err());
    }

    #[test]
    fn spectrum_residuals_and_parity_blocks() {
        let params = IsingParams::new(5, 0.8, 0.6);
        let s = exact_spectrum(&params, 32).unwrap();
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for (i, (val, vec)) in s.eigenvalues.iter().zip(&s.eigenvectors).enumerate() {
            assert!(eigen_residual(&params, *val, vec).unwrap() < 1e-9);
            assert!(parity_expectation(vec).abs() > 1.0 - 1e-8, "vector {i}");
            for other in &s.eigenvectors[..i] {
                assert!(overlap(other, vec).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn spectrum_is_deterministic() {
        let params = IsingParams::new(4, 0.0, 1.0);
        let a = exact_spectrum(&params, 16).unwrap();
        let b = exact_spectrum(&params, 16).unwrap();
        for (x, y) in a.eigenvectors.iter().zip(&b.eigenvectors) {
            assert_eq!(x, y);
        }
    }
}
