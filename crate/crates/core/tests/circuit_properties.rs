use proptest::prelude::*;
use qfi_core::circuit::{
    cue_equivalence_moment, global_sensing_spec, symmetric_projector, symmetric_trace_h2, FloquetCircuit,
};
use qfi_core::weingarten::sym_predictions;
use qfi_core::{
    make_state, qfi_operator, qfi_rqc, qfi_trajectory, ChainGeometry, LayerSchedule, LocalSensingSpec, ProtocolKind,
    SeedPath, StateKind, StepApplier,
};

#[test]
fn symmetric_subspace_matches_closed_form() {
    for (l, q) in [(2usize, 2usize), (2, 3), (3, 2), (3, 3), (4, 2), (2, 4), (3, 4)] {
        let g = ChainGeometry::new(l, q).unwrap();
        let local = LocalSensingSpec::traceless_default(q, 1.0).unwrap();
        let (basis, dim) = symmetric_projector(&g).unwrap();
        let (expect_dim, expect_tr) = sym_predictions(l, q, local.trace_sq()).unwrap();
        assert_eq!(dim as u128, expect_dim);
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i..] {
                let ip = a.inner(b).norm();
                let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                assert!((ip - target).abs() < 1e-12);
            }
        }
        let tr = symmetric_trace_h2(&g, &local).unwrap();
        assert!((tr - expect_tr).abs() < 1e-9 * expect_tr.max(1.0), "L={l} q={q}: {tr} vs {expect_tr}");
    }
}

#[test]
fn circuit_qfi_agrees_with_dense_generator() {
    for (l, q, t) in [(2usize, 3usize, 3usize), (4, 2, 4)] {
        let g = ChainGeometry::new(l, q).unwrap();
        let circuit = FloquetCircuit::sample(g, &LayerSchedule::Brickwork, &SeedPath::new(8)).unwrap();
        let dense = circuit.to_dense().unwrap();
        let spec = global_sensing_spec(&g, &LocalSensingSpec::traceless_default(q, 0.5).unwrap()).unwrap();
        for kind in [StateKind::Product, StateKind::Ghz] {
            let psi = make_state(&kind, &g).unwrap();
            for p in ProtocolKind::ALL {
                let traj = qfi_trajectory(p, &circuit, &spec, t, &psi).unwrap();
                let op = qfi_operator(p, &dense, &spec, t, &psi).unwrap();
                assert!((traj[t] - op).abs() < 1e-8 * op.max(1.0));
            }
        }
    }
}

#[test]
fn two_site_moment_is_cue() {
    // a two-site brickwork period is a single Haar gate composed with another one
    let m = cue_equivalence_moment(ChainGeometry::new(2, 2).unwrap(), 2, 3000, 4).unwrap();
    assert!((m.rqc_moment - m.cue_moment).abs() < 5.0 * m.rqc_stderr, "{m:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn floquet_operator_is_unitary(seed in 0u64..1000, l in 2usize..5, q in 2usize..4) {
        let g = ChainGeometry::new(l, q).unwrap();
        let schedule = if g.sites() % 2 == 0 { LayerSchedule::Brickwork } else { LayerSchedule::Sigma(vec![1, -1, -1]) };
        let c = FloquetCircuit::sample(g, &schedule, &SeedPath::new(seed)).unwrap();
        let u = c.to_dense().unwrap();
        prop_assert!(u.matrix().unitarity_defect() <= 1e-10 * g.dim() as f64);
        prop_assert_eq!(c.dim(), g.dim());
    }

    #[test]
    fn circuit_qfi_bounded(seed in 0u64..1000, t in 0usize..6) {
        let g = ChainGeometry::new(4, 2).unwrap();
        let local = LocalSensingSpec::traceless_default(2, 0.8).unwrap();
        let c = FloquetCircuit::sample(g, &LayerSchedule::Brickwork, &SeedPath::new(seed)).unwrap();
        let gates: Vec<_> = (0..4).map(|b| qfi_core::sample_cue(4, &SeedPath::new(seed).child(b)).unwrap()).collect();
        let psi = make_state(&StateKind::Ghz, &g).unwrap();
        let bound = (t * t) as f64 * (4.0 * local.spectral_width()).powi(2);
        for p in ProtocolKind::ALL {
            let f = qfi_rqc(p, g, &LayerSchedule::Brickwork, gates.clone(), &local, t, &psi).unwrap();
            prop_assert!(f >= 0.0 && f <= bound * (1.0 + 1e-9) + 1e-9);
            let spec = global_sensing_spec(&g, &local).unwrap();
            let again = qfi_trajectory(p, &c, &spec, t, &psi).unwrap()[t];
            prop_assert!((again - f).abs() <= 1e-12 * f.max(1.0));
        }
    }
}
