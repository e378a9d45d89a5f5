use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use qbroadcast::channels::{bell, bell_pairs, channel_controlled, cluster_four, BellKind};
use qbroadcast::circuit::cluster_prep;
use qbroadcast::cli::fmt_sig;
use qbroadcast::metrics::{pure_overlap_fidelity, resource_count, uhlmann_fidelity};
use qbroadcast::noise::{apply_kraus, NoiseKind};
use qbroadcast::protocol::{
    run_bell_rsp_broadcast, run_cluster_broadcast, run_joint_broadcast, BroadcastMode, KnownQubit, Transcript,
};
use qbroadcast::tensor::{
    hermitian_eigen, hermitian_sqrt, hermiticity_deviation, max_abs_diff, measure_projective, CMatrix, DensityMatrix,
    QubitIndex, StateVector, C64,
};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    complex_vec(1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::new(v).unwrap().normalized().unwrap())
}

fn square(d: usize) -> impl Strategy<Value = CMatrix> {
    complex_vec(d * d).prop_map(move |v| CMatrix::from_vec(d, d, v))
}

fn density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    square(1 << n).prop_map(|g| {
        let m = &g * g.adjoint() + CMatrix::identity(g.nrows(), g.nrows()) * C64::new(1e-3, 0.0);
        let tr = m.trace();
        DensityMatrix::from_matrix(m / tr).unwrap()
    })
}

fn unitary(d: usize) -> impl Strategy<Value = CMatrix> {
    square(d)
        .prop_filter("full rank", |g| g.determinant().norm() > 1e-3)
        .prop_map(|g| g.qr().q())
}

fn probabilities_sum_to_one(t: &Transcript) -> bool {
    (t.total_probability() - 1.0).abs() < 1e-9
}

fn max_branch_error(t: &Transcript, target: &StateVector) -> f64 {
    t.branches
        .iter()
        .flat_map(|b| b.outputs.iter().map(|(_, rho)| (rho.expectation(target) - 1.0).abs()))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitaries_preserve_norm(n in 1usize..4, seed in state(3), u in unitary(4)) {
        let psi = StateVector::new(seed.amplitudes()[..1 << n].to_vec()).unwrap();
        let targets: Vec<QubitIndex> = if n == 1 { vec![QubitIndex(0)] } else { vec![QubitIndex(n - 1), QubitIndex(0)] };
        let op = if n == 1 { u.view((0, 0), (2, 2)).into_owned().qr().q() } else { u };
        let out = psi.apply(&op, &targets).unwrap();
        prop_assert!((out.norm() - psi.norm()).abs() < 1e-10);
    }

    #[test]
    fn measurement_probabilities(psi in state(3), u in unitary(2), q in 0usize..3) {
        let basis: Vec<StateVector> = (0..2)
            .map(|k| StateVector::new(u.column(k).iter().cloned().collect()).unwrap())
            .collect();
        let branches = measure_projective(&psi, &[QubitIndex(q)], &basis).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for (b, v) in branches.iter().zip(&basis) {
            let weight = (projector_on(&v.to_density(), q, 3) * psi.to_density().matrix()).trace().re;
            prop_assert!((b.probability - weight).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_trace_of_products(a in density(1), b in density(2)) {
        let joint = a.kron(&b);
        let left = joint.partial_trace(&[QubitIndex(0)]).unwrap();
        prop_assert!(max_abs_diff(left.matrix(), a.matrix()) < 1e-12);
        let right = joint.partial_trace(&[QubitIndex(1), QubitIndex(2)]).unwrap();
        prop_assert!(max_abs_diff(right.matrix(), b.matrix()) < 1e-12);
        prop_assert!((left.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_root_squares_back(n in 1usize..5, g in square(16)) {
        let d = 1 << n;
        let g = g.view((0, 0), (d, d)).into_owned();
        let m = &g * g.adjoint();
        let s = hermitian_sqrt(&m).unwrap();
        prop_assert!(max_abs_diff(&(&s * &s), &m) < 1e-8);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(rho in density(2), step in 0usize..=20, q in 0usize..2) {
        let p = step as f64 * 0.05;
        for kind in NoiseKind::STANDARD {
            let out = apply_kraus(&rho, &kind.channel(p).unwrap(), QubitIndex(q)).unwrap();
            prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(hermiticity_deviation(out.matrix()) < 1e-12);
            let (values, _) = hermitian_eigen(out.matrix()).unwrap();
            prop_assert!(values.iter().all(|&v| v >= -1e-10));
        }
    }

    #[test]
    fn zero_strength_is_identity(rho in density(1)) {
        for kind in NoiseKind::STANDARD {
            let out = apply_kraus(&rho, &kind.channel(0.0).unwrap(), QubitIndex(0)).unwrap();
            prop_assert!((uhlmann_fidelity(&rho, &out).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_damping_keeps_populations(rho in density(2), p in 0.0..=1.0f64, q in 0usize..2) {
        let out = apply_kraus(&rho, &NoiseKind::PhaseDamping.channel(p).unwrap(), QubitIndex(q)).unwrap();
        for i in 0..4 {
            prop_assert!((out.entry(i, i) - rho.entry(i, i)).norm() < 1e-12);
        }
    }

    #[test]
    fn full_amplitude_damping_resets(rho in density(1)) {
        let out = apply_kraus(&rho, &NoiseKind::AmplitudeDamping.channel(1.0).unwrap(), QubitIndex(0)).unwrap();
        prop_assert!(max_abs_diff(out.matrix(), StateVector::basis(1, 0).to_density().matrix()) < 1e-10);
    }

    #[test]
    fn fidelity_bounds_and_symmetry(n in 1usize..5, psi in state(4), phi in state(4), step in 1usize..=10) {
        let d = 1 << n;
        let cut = |s: &StateVector| StateVector::new(s.amplitudes()[..d].to_vec()).unwrap().normalized().unwrap();
        let p = step as f64 * 0.05;
        let channel = NoiseKind::Depolarizing.channel(p).unwrap();
        let perturb = |s: &StateVector| apply_kraus(&s.to_density(), &channel, QubitIndex(0)).unwrap();
        let (a, b) = (cut(&psi), cut(&phi));
        let (sigma, rho) = (perturb(&a), perturb(&b));
        let f = uhlmann_fidelity(&sigma, &rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-10).contains(&f));
        prop_assert!((f - uhlmann_fidelity(&rho, &sigma).unwrap()).abs() < 1e-9);
        let pure = uhlmann_fidelity(&a.to_density(), &rho).unwrap();
        prop_assert!((pure - pure_overlap_fidelity(&a, &rho).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn resource_power_identity(m in 2u64..64, n in 1u32..=10) {
        let direct = resource_count(m, n).unwrap().bell_pairs;
        if let Some(power) = m.checked_pow(n) {
            prop_assert_eq!(direct, resource_count(power, 1).unwrap().bell_pairs);
        }
    }

    #[test]
    fn bell_rsp_is_exact(theta in 0.0..PI, phi in -PI..PI, m in 1usize..4) {
        for target in [KnownQubit::real_polar(theta), KnownQubit::equatorial(phi)] {
            let t = run_bell_rsp_broadcast(&target, m, BroadcastMode::Rsp, None).unwrap();
            prop_assert!(probabilities_sum_to_one(&t));
            prop_assert!(max_branch_error(&t, &target.state()) < 1e-9);
            prop_assert_eq!(t.bell_pairs as u64, resource_count(2, m as u32).unwrap().bell_pairs);
            prop_assert!(t.cbits_per_receiver().values().all(|&c| c == 1));
            for b in &t.branches {
                for c in &b.corrections {
                    prop_assert!(c.cites.iter().all(|&i| i < b.messages.len() && b.messages[i].to == c.party));
                }
            }
        }
    }

    #[test]
    fn teleport_handles_general_targets(theta in 0.0..FRAC_PI_2, phi in -PI..PI, m in 1usize..3) {
        let target = KnownQubit::general(theta, phi);
        let t = run_bell_rsp_broadcast(&target, m, BroadcastMode::Teleport, None).unwrap();
        prop_assert!(probabilities_sum_to_one(&t));
        prop_assert!(max_branch_error(&t, &target.state()) < 1e-9);
        prop_assert!(t.cbits_per_receiver().values().all(|&c| c == 2));
    }

    #[test]
    fn cluster_is_exact(theta in 0.0..PI) {
        let target = KnownQubit::real_polar(theta);
        let t = run_cluster_broadcast(&target, None).unwrap();
        prop_assert!(probabilities_sum_to_one(&t));
        prop_assert!(max_branch_error(&t, &target.state()) < 1e-9);
    }

    #[test]
    fn joint_is_exact(theta in 0.0..FRAC_PI_2, phi in -PI..PI) {
        let t = run_joint_broadcast(theta, phi, 2, true, None).unwrap();
        prop_assert!(probabilities_sum_to_one(&t));
        prop_assert!(max_branch_error(&t, &KnownQubit::general(theta, phi).state()) < 1e-9);
    }

    #[test]
    fn csv_numbers_round_trip(x in -1e3..1e3f64) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }
}

/// `|v⟩⟨v|` on qubit `q` of an `n`-qubit register.
fn projector_on(projector: &DensityMatrix, q: usize, n: usize) -> CMatrix {
    qbroadcast::tensor::embed_operator(projector.matrix(), &[QubitIndex(q)], n).unwrap()
}

#[test]
fn constructors_are_normalized() {
    for s in [bell(BellKind::PhiPlus), bell(BellKind::PsiMinus), cluster_four()] {
        assert!(s.is_normalized(1e-10));
    }
}

#[test]
fn bell_links_leave_receivers_maximally_mixed() {
    let ch = bell_pairs(3).unwrap();
    let rho = ch.state().unwrap().to_density();
    let mixed = DensityMatrix::maximally_mixed(1);
    for q in ch.receiver_qubits() {
        let local = rho.partial_trace(&[q]).unwrap();
        assert!(max_abs_diff(local.matrix(), mixed.matrix()) < 1e-12);
    }
}

#[test]
fn cluster_constructor_matches_circuit() {
    let built = cluster_prep().run_pure(&StateVector::basis(4, 0)).unwrap();
    let expected = cluster_four();
    let diff = built
        .amplitudes()
        .iter()
        .zip(expected.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-12);
}

#[test]
fn controlled_index_register_selects_each_alternative() {
    let alternatives: Vec<_> = BellKind::ALL
        .iter()
        .map(|&k| qbroadcast::channels::channel_general(&[bell(k)]).unwrap())
        .collect();
    let ch = channel_controlled(&alternatives).unwrap();
    let k_bits = ch.ancilla.len();
    let basis: Vec<StateVector> = (0..1 << k_bits).map(|k| StateVector::basis(k_bits, k)).collect();
    let branches = measure_projective(&ch.state, &ch.ancilla, &basis).unwrap();
    for (k, b) in branches.iter().enumerate() {
        assert!((b.probability - 0.25).abs() < 1e-12);
        assert!((b.state.overlap_sqr(&alternatives[k].state().unwrap()) - 1.0).abs() < 1e-12);
    }
}
