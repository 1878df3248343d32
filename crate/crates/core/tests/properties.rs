use proptest::prelude::*;
use spinmz::evolve::{reverse_schedule, schedule_two_step};
use spinmz::hamiltonian::{apply_hamiltonian, IsingParams};
use spinmz::observables::{apply_parity, fm_populations, noon_fidelity, parity_expectation};
use spinmz::statevec::{make_noon_state, make_product_x_state, overlap};
use spinmz::{Complex64, SpinBasis, StateVector};

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("zero vector", move |v| {
        let amps = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        StateVector::normalized(SpinBasis::new(n).unwrap(), amps).ok()
    })
}

fn sized_pair() -> impl Strategy<Value = (StateVector, StateVector)> {
    (1usize..=5).prop_flat_map(|n| (state(n), state(n)))
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_is_conjugate_symmetric((a, b) in sized_pair()) {
        let ab = overlap(&a, &b).unwrap();
        let ba = overlap(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-14);
        prop_assert!((overlap(&a, &a).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_hermitian(
        (a, b) in sized_pair(),
        j in 0.0f64..2.0, field in -2.0f64..2.0, delta in -1.0f64..1.0,
    ) {
        let params = IsingParams::new(a.n_spins(), j, field).with_bias(delta);
        let ha = apply_hamiltonian(&params, &a).unwrap();
        let hb = apply_hamiltonian(&params, &b).unwrap();
        let lhs = inner(a.amplitudes(), &hb);
        let rhs = inner(b.amplitudes(), &ha).conj();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn parity_commutes_without_bias(psi in (1usize..=6).prop_flat_map(state), j in 0.0f64..2.0, field in -2.0f64..2.0) {
        let params = IsingParams::new(psi.n_spins(), j, field);
        let h_p = apply_hamiltonian(&params, &apply_parity(&psi)).unwrap();
        let hp = apply_hamiltonian(&params, &psi).unwrap();
        let mask = hp.len() - 1;
        let p_h: Vec<Complex64> = (0..=mask).map(|b| hp[!b & mask]).collect();
        let diff: f64 = h_p.iter().zip(&p_h).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn noon_fidelity_bounds(psi in (1usize..=6).prop_flat_map(state)) {
        let (up, down) = fm_populations(&psi);
        prop_assert!((0.0..=1.0).contains(&up) && (0.0..=1.0).contains(&down));
        prop_assert!(up + down <= 1.0 + 1e-12);
        let f = noon_fidelity(&psi);
        prop_assert!(f >= (up + down) / 2.0 - 1e-12);
        prop_assert!(f <= 1.0 + 1e-12);
        let p = parity_expectation(&psi);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn constructors_are_normalized(n in 1usize..=12, phase in -10.0f64..10.0, dir in prop::sample::select(vec![-1i8, 1])) {
        let basis = SpinBasis::new(n).unwrap();
        prop_assert!((make_noon_state(basis, phase).norm() - 1.0).abs() < 1e-12);
        prop_assert!((make_product_x_state(basis, dir).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversal_is_an_involution(tau in 0.01f64..50.0, j0 in 0.0f64..3.0, b0 in -3.0f64..3.0, delta in -0.5f64..0.5) {
        let s = schedule_two_step(tau, j0, b0).unwrap().with_bias(delta);
        let r = reverse_schedule(&s);
        prop_assert_eq!(reverse_schedule(&r), s.clone());
        prop_assert!((r.total_duration() - s.total_duration()).abs() < 1e-12);
        for k in 0..=8 {
            let t = s.total_duration() * k as f64 / 8.0;
            let fwd = s.at(t);
            let back = r.at(s.total_duration() - t);
            prop_assert!((fwd.j - back.j).abs() < 1e-12 && (fwd.b - back.b).abs() < 1e-12);
            prop_assert_eq!(back.delta, delta);
        }
    }
}

#[test]
fn bias_breaks_parity() {
    let basis = SpinBasis::new(3).unwrap();
    let up = StateVector::basis_state(basis, 7).unwrap();
    let params = IsingParams::new(3, 1.0, 0.5).with_bias(0.2);
    let h_p = apply_hamiltonian(&params, &apply_parity(&up)).unwrap();
    let p_h: Vec<Complex64> = {
        let hp = apply_hamiltonian(&params, &up).unwrap();
        (0..8).map(|b| hp[!b & 7]).collect()
    };
    let diff: f64 = h_p
        .iter()
        .zip(&p_h)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(diff > 1e-3);
}
