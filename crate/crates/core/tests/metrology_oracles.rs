use proptest::prelude::*;
use qfi_core::metrology::{control_bound_chain, evolve, generator, qfi_state_recursion};
use qfi_core::{
    qfi_operator, qfi_trajectory, qfi_upper_bound, sample_cue, ComplexMatrix, HermitianDiagonal, ProtocolKind,
    SensingSpec, SeedPath, StateVector, UnitaryMatrix, C64,
};

fn random_state(n: usize, seed: u64) -> StateVector {
    let u = sample_cue(n, &SeedPath::new(seed).child(1_000_000)).unwrap();
    StateVector::new(u.matrix().row(0).iter().map(|z| z.conj()).collect()).unwrap()
}

fn dense_protocol(protocol: ProtocolKind, u: &UnitaryMatrix, spec: &SensingSpec, t: usize) -> ComplexMatrix {
    let n = u.dim();
    let w = ComplexMatrix::from_fn(n, n, |r, c| if r == c { spec.phases()[r] } else { C64::new(0.0, 0.0) });
    let mut m = ComplexMatrix::identity(n);
    match protocol {
        ProtocolKind::Control => {
            let wu = w.matmul(u.matrix()).unwrap();
            for _ in 0..t {
                m = wu.matmul(&m).unwrap();
            }
        }
        ProtocolKind::StatePrep => {
            for _ in 0..t {
                m = u.matrix().matmul(&m).unwrap();
            }
            for _ in 0..t {
                m = w.matmul(&m).unwrap();
            }
        }
    }
    m
}

#[test]
fn generator_matches_finite_difference() {
    let delta = 1e-6;
    for (n, t, theta) in [(3usize, 1usize, 0.4), (4, 3, 1.3), (5, 4, -0.7)] {
        let u = sample_cue(n, &SeedPath::new(n as u64 * 7 + t as u64)).unwrap();
        let spec = SensingSpec::traceless_default(n, theta).unwrap();
        for p in ProtocolKind::ALL {
            let g = generator(p, &u, &spec, t).unwrap();
            let m = dense_protocol(p, &u, &spec, t);
            let plus = dense_protocol(p, &u, &spec.with_theta(theta + delta).unwrap(), t).dagger();
            let minus = dense_protocol(p, &u, &spec.with_theta(theta - delta).unwrap(), t).dagger();
            let deriv = plus.sub(&minus).unwrap().scale(C64::new(0.0, 1.0 / (2.0 * delta)));
            let fd = deriv.matmul(&m).unwrap().scale(C64::new(-1.0, 0.0));
            let err = fd.max_abs_diff(&g);
            assert!(err < 1e-4, "{p:?} n={n} t={t}: {err}");
        }
    }
}

#[test]
fn qfi_matches_fidelity_curvature() {
    let delta = 1e-4;
    for (n, t) in [(4usize, 2usize), (6, 3), (8, 5)] {
        let u = sample_cue(n, &SeedPath::new(100 + n as u64)).unwrap();
        let spec = SensingSpec::traceless_default(n, 0.9).unwrap();
        let psi0 = random_state(n, n as u64);
        for p in ProtocolKind::ALL {
            let f = qfi_state_recursion(p, &u, &spec, t, &psi0).unwrap();
            let a = evolve(p, &u, &spec, t, &psi0).unwrap();
            let b = evolve(p, &u, &spec.with_theta(0.9 + delta).unwrap(), t, &psi0).unwrap();
            let overlap = a.inner(&b).norm();
            let fid = 8.0 * (1.0 - overlap) / (delta * delta);
            assert!((fid - f).abs() <= 1e-3 * f, "{p:?} n={n} t={t}: {fid} vs {f}");
        }
    }
}

#[test]
fn recursion_matches_operator_form() {
    for (n, t) in [(2usize, 1usize), (5, 4), (16, 7), (32, 3)] {
        let u = sample_cue(n, &SeedPath::new(n as u64 + 3)).unwrap();
        let spec = SensingSpec::traceless_default(n, 0.37).unwrap();
        let psi0 = random_state(n, 40 + n as u64);
        for p in ProtocolKind::ALL {
            let traj = qfi_trajectory(p, &u, &spec, t, &psi0).unwrap();
            for (s, f) in traj.iter().enumerate() {
                let dense = qfi_operator(p, &u, &spec, s, &psi0).unwrap();
                assert!((dense - f).abs() <= 1e-8 * dense.abs().max(1.0), "{p:?} n={n} s={s}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qfi_respects_hard_bound(seed in 0u64..10_000, n in 2usize..12, t in 0usize..8, theta in -3.0f64..3.0) {
        let u = sample_cue(n, &SeedPath::new(seed)).unwrap();
        let spec = SensingSpec::traceless_default(n, theta).unwrap();
        let psi0 = random_state(n, seed);
        let bound = qfi_upper_bound(t, spec.spectral_width());
        for p in ProtocolKind::ALL {
            let f = qfi_state_recursion(p, &u, &spec, t, &psi0).unwrap();
            prop_assert!(f >= 0.0);
            prop_assert!(f <= bound * (1.0 + 1e-9) + 1e-9);
        }
        let chain = control_bound_chain(&u, &spec, t, &psi0).unwrap();
        prop_assert!(chain.is_monotone(1e-8 * chain.hard.max(1.0)));
    }

    #[test]
    fn qfi_is_shift_invariant(seed in 0u64..10_000, n in 2usize..8, t in 1usize..6, c in -5.0f64..5.0) {
        let u = sample_cue(n, &SeedPath::new(seed)).unwrap();
        let values: Vec<f64> = (0..n).map(|i| (i as f64 * 0.731).sin()).collect();
        let spec = SensingSpec::new(HermitianDiagonal::new(values).unwrap(), 0.6).unwrap();
        let shifted = spec.shifted(c);
        let psi0 = random_state(n, seed + 1);
        for p in ProtocolKind::ALL {
            let a = qfi_state_recursion(p, &u, &spec, t, &psi0).unwrap();
            let b = qfi_state_recursion(p, &u, &shifted, t, &psi0).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}
