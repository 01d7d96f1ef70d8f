use qfi_core::weingarten::{average_trace_product, qfi_t1_exact, Factor, TraceProductSpec};
use qfi_core::{qfi_trajectory, sample_cue, ComplexMatrix, ProtocolKind, SensingSpec, SeedPath, StateVector, C64};

fn monte_carlo(spec: &TraceProductSpec, n: usize, samples: u64, seed: u64) -> (C64, f64) {
    let master = SeedPath::new(seed);
    let values: Vec<C64> = (0..samples)
        .map(|i| spec.evaluate_with(&sample_cue(n, &master.child(i)).unwrap()).unwrap())
        .collect();
    let mean = values.iter().sum::<C64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (samples as f64 - 1.0);
    (mean, (var / samples as f64).sqrt())
}

fn op(values: &[(usize, usize, f64, f64)], n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for &(r, c, re, im) in values {
        m[(r, c)] = C64::new(re, im);
    }
    m
}

#[test]
fn degree_two_product_matches_sampling() {
    let n = 3;
    let a = op(&[(0, 0, 1.0, 0.0), (0, 1, 0.5, -0.2), (2, 2, -1.0, 0.0)], n);
    let b = op(&[(1, 1, 2.0, 0.0), (2, 0, 0.3, 0.3)], n);
    let c = op(&[(0, 2, 1.0, 0.0), (1, 1, -0.5, 0.0)], n);
    let d = op(&[(0, 0, 1.0, 1.0), (2, 1, 0.7, 0.0)], n);
    let spec = TraceProductSpec::new(vec![
        vec![Factor::U, Factor::Op(a), Factor::UDag, Factor::Op(b)],
        vec![Factor::U, Factor::Op(c), Factor::UDag, Factor::Op(d)],
    ]);
    let exact = average_trace_product(&spec, n).unwrap();
    let (mc, se) = monte_carlo(&spec, n, 40_000, 11);
    assert!((exact - mc).norm() < 5.0 * se + 1e-12, "exact {exact}, mc {mc} +- {se}");
}

#[test]
fn degree_three_single_trace_matches_sampling() {
    let n = 2;
    let a = op(&[(0, 0, 1.0, 0.0), (1, 1, -1.0, 0.0)], n);
    let b = op(&[(0, 1, 1.0, 0.0), (1, 0, 1.0, 0.0)], n);
    let spec = TraceProductSpec::new(vec![
        vec![Factor::U, Factor::Op(a.clone()), Factor::U, Factor::UDag, Factor::Op(b), Factor::UDag],
        vec![Factor::U, Factor::Op(a), Factor::UDag],
    ]);
    let exact = average_trace_product(&spec, n).unwrap();
    let (mc, se) = monte_carlo(&spec, n, 40_000, 12);
    assert!((exact - mc).norm() < 5.0 * se + 1e-12, "exact {exact}, mc {mc} +- {se}");
}

#[test]
fn one_step_qfi_matches_sampling() {
    for (n, theta) in [(4usize, 0.3), (6, 1.1)] {
        let spec = SensingSpec::traceless_default(n, theta).unwrap();
        let exact = qfi_t1_exact(n, spec.trace(), spec.trace_sq()).unwrap();
        let psi = StateVector::basis(n, 0).unwrap();
        let master = SeedPath::new(n as u64);
        let samples = 20_000;
        let values: Vec<f64> = (0..samples)
            .map(|i| {
                let u = sample_cue(n, &master.child(i)).unwrap();
                qfi_trajectory(ProtocolKind::Control, &u, &spec, 1, &psi).unwrap()[1]
            })
            .collect();
        let mean = values.iter().sum::<f64>() / samples as f64;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples as f64 - 1.0)).sqrt();
        assert!((mean - exact).abs() < 5.0 * sd / (samples as f64).sqrt(), "n={n}: {mean} vs {exact}");
    }
}
