//! Reference implementations used only by tests. Nothing here touches the
//! matrix-free kernels or the fixed-step propagator.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use spinmz::evolve::Schedule;
use spinmz::{Complex64, SpinBasis, StateVector};

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Single-site operator on spin `i` of `n`; spin 0 is the rightmost factor (LSB).
fn site_op(n: usize, i: usize, op: &CMat) -> CMat {
    let left = CMat::identity(1 << (n - 1 - i), 1 << (n - 1 - i));
    let right = CMat::identity(1 << i, 1 << i);
    kron(&left, &kron(op, &right))
}

fn sigma_z() -> CMat {
    // basis order (|↓⟩, |↑⟩)
    CMat::from_row_slice(2, 2, &[c(-1.0), c(0.0), c(0.0), c(1.0)])
}

fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

/// Pieces of H built from Kronecker products of Pauli matrices:
/// `H = j·zz + b·x + delta·z` with `alpha` the power-law exponent.
pub struct KronHamiltonian {
    pub zz: CMat,
    pub x: CMat,
    pub z: CMat,
}

impl KronHamiltonian {
    pub fn new(n: usize, alpha: f64) -> Self {
        let dim = 1 << n;
        let mut zz = CMat::zeros(dim, dim);
        let mut x = CMat::zeros(dim, dim);
        let mut z = CMat::zeros(dim, dim);
        let sz: Vec<CMat> = (0..n).map(|i| site_op(n, i, &sigma_z())).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = 1.0 / ((j - i) as f64).powf(alpha);
                zz -= (&sz[i] * &sz[j]) * c(w);
            }
            x -= site_op(n, i, &sigma_x());
            z += &sz[i];
        }
        Self { zz, x, z }
    }

    pub fn matrix(&self, j: f64, b: f64, delta: f64) -> CMat {
        &self.zz * c(j) + &self.x * c(b) + &self.z * c(delta)
    }
}

/// Adaptive Dormand-Prince 5(4) integration of `i dψ/dt = H(t)ψ` on dense matrices.
/// Each schedule segment is integrated separately so the kinks are step edges.
pub fn dense_ode(psi0: &StateVector, schedule: &Schedule, alpha: f64, tol: f64) -> StateVector {
    let n = psi0.n_spins();
    let ham = KronHamiltonian::new(n, alpha);
    let mut y = CVec::from_column_slice(psi0.amplitudes());
    for seg in schedule.segments() {
        let rhs = |s: f64, v: &CVec| -> CVec {
            let cf = seg.at(s);
            let h = ham.matrix(cf.j, cf.b, cf.delta);
            (h * v) * Complex64::new(0.0, -1.0)
        };
        y = dopri5(rhs, y, seg.duration, tol);
    }
    StateVector::normalized(psi0.basis(), y.iter().copied().collect()).unwrap()
}

fn dopri5(f: impl Fn(f64, &CVec) -> CVec, mut y: CVec, t_end: f64, tol: f64) -> CVec {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut t = 0.0;
    let mut h = 1e-3_f64.min(t_end);
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let mut k: Vec<CVec> = Vec::with_capacity(7);
        k.push(f(t, &y));
        for s in 1..7 {
            let mut ys = y.clone();
            for (r, kr) in k.iter().enumerate() {
                let a = A[s - 1][r];
                if a != 0.0 {
                    ys += kr * c(h * a);
                }
            }
            k.push(f(t + C[s] * h, &ys));
        }
        let mut y5 = y.clone();
        let mut err = CVec::zeros(y.len());
        for s in 0..7 {
            y5 += &k[s] * c(h * B5[s]);
            err += &k[s] * c(h * (B5[s] - B4[s]));
        }
        let scale = tol * (1.0 + y.norm());
        let e = err.norm() / scale;
        if e <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if e == 0.0 {
            5.0
        } else {
            (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    y
}

/// Dense matrix exponential `exp(-i H t)` via eigen-decomposition of the real
/// symmetric Kronecker-built H, applied to ψ.
pub fn dense_exp_apply(h: &CMat, t: f64, psi: &StateVector) -> Vec<Complex64> {
    let real = h.map(|z| z.re);
    let eig = real.symmetric_eigen();
    let v = eig.eigenvectors.map(c);
    let phases = CMat::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * t)),
    ));
    let u = &v * phases * v.adjoint();
    let out = u * CVec::from_column_slice(psi.amplitudes());
    out.iter().copied().collect()
}

/// Free-spin Hamiltonian `coef · Σσz` from Kronecker products.
pub fn kron_free(n: usize, coef: f64) -> CMat {
    KronHamiltonian::new(n, 3.0).z * c(coef)
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix; ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn infidelity(a: &StateVector, b: &StateVector) -> f64 {
    1.0 - spinmz::statevec::overlap(a, b).unwrap().norm_sqr()
}

pub fn plus_state(n: usize) -> StateVector {
    spinmz::statevec::make_product_x_state(SpinBasis::new(n).unwrap(), 1).unwrap()
}

/// NOON fidelity `(|c_0| + |c_last|)² / 2` computed directly.
pub fn fidelity_direct(psi: &StateVector) -> f64 {
    let a = psi.amplitudes();
    (a[0].norm() + a[a.len() - 1].norm()).powi(2) / 2.0
}
