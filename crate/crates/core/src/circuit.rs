//! Floquet random circuits of two-site gates on a periodic qudit chain.
//!
//! One Floquet period applies `L` two-site gates; gate `b` (1-based) acts on the
//! bond `(b, b + 1)` with site `L + 1` identified with site 1. The schedule fixes
//! the order in which the bonds are applied.

use serde::{Deserialize, Serialize};

use crate::ensemble::{run_ensemble, EnsembleConfig};
use crate::error::{input, QfiError, Result};
use crate::geometry::ChainGeometry;
use crate::haar::{sample_cue, SeedPath};
use crate::linalg::{
    check_two_site, ComplexMatrix, HermitianDiagonal, Provenance, StateVector, TwoSiteKernel,
    UnitaryMatrix, C64,
};
use crate::metrology::{qfi_trajectory, ProtocolKind, SensingSpec, StepApplier};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "sigma")]
pub enum LayerSchedule {
    /// Odd bonds `(2l-1, 2l)` first, then even bonds `(2k, 2k+1)`: `U = U_e U_o`.
    Brickwork,
    /// Per-site orientation `sigma(mu) = +-1`. At site `mu`, `+1` means the gate
    /// on bond `(mu, mu+1)` acts before the gate on bond `(mu-1, mu)`; `-1` the reverse.
    Sigma(Vec<i8>),
}

impl LayerSchedule {
    /// Bond indices (1-based) in application order.
    pub fn bond_order(&self, geom: &ChainGeometry) -> Result<Vec<usize>> {
        let l = geom.sites();
        if l < 2 {
            return Err(QfiError::Config("a Floquet circuit needs at least two sites".into()));
        }
        match self {
            LayerSchedule::Brickwork => {
                if l % 2 != 0 {
                    return Err(QfiError::Config(format!("brickwork needs an even number of sites, got {l}")));
                }
                let odd = (1..=l).step_by(2);
                let even = (2..=l).step_by(2);
                Ok(odd.chain(even).collect())
            }
            LayerSchedule::Sigma(sigma) => sigma_order(sigma, l),
        }
    }
}

fn sigma_order(sigma: &[i8], l: usize) -> Result<Vec<usize>> {
    if sigma.len() != l {
        return Err(QfiError::Config(format!("sigma needs {l} entries, got {}", sigma.len())));
    }
    if sigma.iter().any(|&s| s != 1 && s != -1) {
        return Err(QfiError::Config("sigma entries must be +1 or -1".into()));
    }
    // edges[a] lists bonds that must come after bond a
    let mut after = vec![Vec::new(); l + 1];
    let mut indegree = vec![0usize; l + 1];
    for mu in 1..=l {
        let right = mu;
        let left = if mu == 1 { l } else { mu - 1 };
        let (first, second) = if sigma[mu - 1] == 1 { (right, left) } else { (left, right) };
        after[first].push(second);
        indegree[second] += 1;
    }
    let mut order = Vec::with_capacity(l);
    let mut ready: Vec<usize> = (1..=l).filter(|&b| indegree[b] == 0).collect();
    while let Some(pos) = ready.iter().enumerate().min_by_key(|(_, &b)| b).map(|(i, _)| i) {
        let b = ready.swap_remove(pos);
        order.push(b);
        for &next in &after[b] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                ready.push(next);
            }
        }
    }
    if order.len() != l {
        return Err(QfiError::Config(format!(
            "sigma configuration {sigma:?} has cyclic gate dependencies and defines no circuit"
        )));
    }
    Ok(order)
}

/// One Floquet period as a sequence of two-site gates, applied without
/// materializing the `q^L x q^L` operator.
#[derive(Debug, Clone)]
pub struct FloquetCircuit {
    geom: ChainGeometry,
    /// `(bond, gate)` in application order.
    steps: Vec<(usize, ComplexMatrix)>,
    kernels: Vec<TwoSiteKernel>,
}

impl FloquetCircuit {
    /// `gates[b - 1]` acts on bond `b`.
    pub fn new(geom: ChainGeometry, schedule: &LayerSchedule, gates: Vec<UnitaryMatrix>) -> Result<Self> {
        let order = schedule.bond_order(&geom)?;
        if gates.len() != geom.sites() {
            return Err(QfiError::Config(format!(
                "schedule needs {} gates, got {}",
                geom.sites(),
                gates.len()
            )));
        }
        for g in &gates {
            check_two_site(geom.dim(), g.dim(), 1, &geom)?;
        }
        let mut gates: Vec<Option<UnitaryMatrix>> = gates.into_iter().map(Some).collect();
        let mut steps = Vec::with_capacity(order.len());
        let mut kernels = Vec::with_capacity(order.len());
        for bond in order {
            let gate = gates[bond - 1].take().expect("each bond appears once");
            steps.push((bond, gate.into_matrix()));
            kernels.push(TwoSiteKernel::new(&geom, bond));
        }
        Ok(Self { geom, steps, kernels })
    }

    /// Independent Haar gates drawn from `seed.child(b - 1)` for bond `b`.
    pub fn sample(geom: ChainGeometry, schedule: &LayerSchedule, seed: &SeedPath) -> Result<Self> {
        let q2 = geom.local_dim() * geom.local_dim();
        let gates = (0..geom.sites())
            .map(|b| sample_cue(q2, &seed.child(b as u64)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(geom, schedule, gates)
    }

    pub fn geometry(&self) -> &ChainGeometry {
        &self.geom
    }

    /// Bonds in application order.
    pub fn bond_order(&self) -> Vec<usize> {
        self.steps.iter().map(|(b, _)| *b).collect()
    }

    /// Dense Floquet operator, column by column.
    pub fn to_dense(&self) -> Result<UnitaryMatrix> {
        self.geom.require_dense()?;
        let n = self.geom.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            self.apply(&mut col);
            for (i, z) in col.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        Ok(UnitaryMatrix::new_unchecked(m, Provenance::FloquetBuild))
    }

    /// `Tr U_F^t`, by propagating every basis state.
    pub fn trace_power(&self, t: usize) -> C64 {
        let n = self.geom.dim();
        let mut col = vec![C64::new(0.0, 0.0); n];
        let mut total = C64::new(0.0, 0.0);
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            for _ in 0..t {
                self.apply(&mut col);
            }
            total += col[j];
        }
        total
    }
}

impl StepApplier for FloquetCircuit {
    fn dim(&self) -> usize {
        self.geom.dim()
    }

    fn apply(&self, psi: &mut [C64]) {
        let q2 = self.geom.local_dim() * self.geom.local_dim();
        let mut scratch = vec![C64::new(0.0, 0.0); 2 * q2];
        for ((_, gate), kernel) in self.steps.iter().zip(&self.kernels) {
            kernel.apply(gate, psi, &mut scratch);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMode {
    Dense,
    Applier,
}

#[derive(Debug, Clone)]
pub enum FloquetOperator {
    Dense(UnitaryMatrix),
    Applier(FloquetCircuit),
}

impl StepApplier for FloquetOperator {
    fn dim(&self) -> usize {
        match self {
            FloquetOperator::Dense(u) => StepApplier::dim(u),
            FloquetOperator::Applier(c) => c.dim(),
        }
    }

    fn apply(&self, psi: &mut [C64]) {
        match self {
            FloquetOperator::Dense(u) => StepApplier::apply(u, psi),
            FloquetOperator::Applier(c) => StepApplier::apply(c, psi),
        }
    }
}

pub fn build_floquet(
    geom: ChainGeometry,
    schedule: &LayerSchedule,
    gates: Vec<UnitaryMatrix>,
    mode: BuildMode,
) -> Result<FloquetOperator> {
    if mode == BuildMode::Dense {
        geom.require_dense()?;
    }
    let circuit = FloquetCircuit::new(geom, schedule, gates)?;
    Ok(match mode {
        BuildMode::Dense => FloquetOperator::Dense(circuit.to_dense()?),
        BuildMode::Applier => FloquetOperator::Applier(circuit),
    })
}

/// Local sensing Hamiltonian `h0` (diagonal, `q` entries) and encoding parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSensingSpec {
    pub h: HermitianDiagonal,
    pub theta: f64,
}

impl LocalSensingSpec {
    pub fn new(h: HermitianDiagonal, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return input("encoding parameter must be finite");
        }
        Ok(Self { h, theta })
    }

    /// Traceless `diag(+1 x q/2, -1 x q/2)`.
    pub fn traceless_default(q: usize, theta: f64) -> Result<Self> {
        Self::new(HermitianDiagonal::traceless_two_block(q)?, theta)
    }

    pub fn trace(&self) -> f64 {
        self.h.trace()
    }

    pub fn trace_sq(&self) -> f64 {
        self.h.trace_sq()
    }

    pub fn spectral_width(&self) -> f64 {
        self.h.spectral_width()
    }
}

/// `H0 = sum_mu I x .. x h0^[mu] x .. x I` as a diagonal on `q^L` levels.
pub fn global_sensing_hamiltonian(geom: &ChainGeometry, local: &LocalSensingSpec) -> Result<HermitianDiagonal> {
    let q = geom.local_dim();
    if local.h.dim() != q {
        return input(format!("local Hamiltonian has {} levels, chain has q = {q}", local.h.dim()));
    }
    let h = local.h.values();
    let diag = (0..geom.dim())
        .map(|n| (1..=geom.sites()).map(|mu| h[geom.digit(n, mu)]).sum())
        .collect();
    HermitianDiagonal::new(diag)
}

/// Global sensing spec, `W = prod_mu W0^[mu]`.
pub fn global_sensing_spec(geom: &ChainGeometry, local: &LocalSensingSpec) -> Result<SensingSpec> {
    SensingSpec::new(global_sensing_hamiltonian(geom, local)?, local.theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// `|0 .. 0>`.
    Product,
    /// `(|0 .. 0> + |q-1 .. q-1>) / sqrt 2`.
    Ghz,
    /// Arbitrary amplitudes as `[re, im]` pairs; normalized on construction.
    Custom(Vec<[f64; 2]>),
}

pub fn make_state(kind: &StateKind, geom: &ChainGeometry) -> Result<StateVector> {
    let n = geom.dim();
    match kind {
        StateKind::Product => StateVector::basis(n, 0),
        StateKind::Ghz => {
            let mut amps = vec![C64::new(0.0, 0.0); n];
            let r = std::f64::consts::FRAC_1_SQRT_2;
            amps[0] = C64::new(r, 0.0);
            amps[n - 1] = C64::new(r, 0.0);
            StateVector::normalized(amps)
        }
        StateKind::Custom(pairs) => {
            if pairs.len() != n {
                return input(format!("custom state has {} amplitudes, expected {n}", pairs.len()));
            }
            StateVector::normalized(pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect())
        }
    }
}

/// QFI after `t` Floquet periods, through the state recursion.
#[allow(clippy::too_many_arguments)]
pub fn qfi_rqc(
    protocol: ProtocolKind,
    geom: ChainGeometry,
    schedule: &LayerSchedule,
    gates: Vec<UnitaryMatrix>,
    local: &LocalSensingSpec,
    t: usize,
    psi0: &StateVector,
) -> Result<f64> {
    let circuit = FloquetCircuit::new(geom, schedule, gates)?;
    let spec = global_sensing_spec(&geom, local)?;
    Ok(qfi_trajectory(protocol, &circuit, &spec, t, psi0)?[t])
}

/// Orthonormal basis of the bosonic symmetric subspace, one state per occupation multiset.
pub fn symmetric_projector(geom: &ChainGeometry) -> Result<(Vec<StateVector>, usize)> {
    geom.require_dense()?;
    let n = geom.dim();
    let mut keys: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for idx in 0..n {
        let mut digits: Vec<usize> = (1..=geom.sites()).map(|mu| geom.digit(idx, mu)).collect();
        digits.sort_unstable();
        match keys.iter_mut().find(|(k, _)| *k == digits) {
            Some((_, members)) => members.push(idx),
            None => keys.push((digits, vec![idx])),
        }
    }
    let basis = keys
        .into_iter()
        .map(|(_, members)| {
            let amp = 1.0 / (members.len() as f64).sqrt();
            let mut v = vec![C64::new(0.0, 0.0); n];
            for m in members {
                v[m] = C64::new(amp, 0.0);
            }
            StateVector::new(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = basis.len();
    Ok((basis, dim))
}

/// `Tr(P_S H0^2)` with `P_S` built from [`symmetric_projector`].
pub fn symmetric_trace_h2(geom: &ChainGeometry, local: &LocalSensingSpec) -> Result<f64> {
    let (basis, _) = symmetric_projector(geom)?;
    let h = global_sensing_hamiltonian(geom, local)?;
    Ok(basis
        .iter()
        .map(|b| b.amplitudes().iter().zip(h.values()).map(|(z, e)| z.norm_sqr() * e * e).sum::<f64>())
        .sum())
}

/// Floquet-circuit spectral form factor against its CUE value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CueMoment {
    pub rqc_moment: f64,
    pub rqc_stderr: f64,
    /// `min(t, q^L)`, exact for Haar unitaries.
    pub cue_moment: f64,
    pub cue_stderr: f64,
}

impl CueMoment {
    pub fn relative_gap(&self) -> f64 {
        (self.rqc_moment - self.cue_moment).abs() / self.cue_moment
    }
}

/// Monte Carlo `<|Tr U_F^t|^2>` over brickwork circuits.
pub fn cue_equivalence_moment(geom: ChainGeometry, t: usize, samples: usize, seed: u64) -> Result<CueMoment> {
    if t > geom.dim() {
        return input(format!("t = {t} exceeds q^L = {}", geom.dim()));
    }
    let cfg = EnsembleConfig::new("cue-equivalence", samples, seed);
    let result = run_ensemble(&cfg, |_, path| {
        let circuit = FloquetCircuit::sample(geom, &LayerSchedule::Brickwork, path)?;
        Ok(vec![circuit.trace_power(t).norm_sqr()])
    })?;
    let s = &result.summary[0];
    Ok(CueMoment {
        rqc_moment: s.mean,
        rqc_stderr: s.stderr,
        cue_moment: t.min(geom.dim()) as f64,
        cue_stderr: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{apply_two_site_gate, kron};

    fn geom(l: usize, q: usize) -> ChainGeometry {
        ChainGeometry::new(l, q).unwrap()
    }

    #[test]
    fn brickwork_order_and_errors() {
        assert_eq!(LayerSchedule::Brickwork.bond_order(&geom(4, 2)).unwrap(), vec![1, 3, 2, 4]);
        assert!(matches!(LayerSchedule::Brickwork.bond_order(&geom(3, 2)), Err(QfiError::Config(_))));
        let gates = vec![UnitaryMatrix::identity(4); 3];
        assert!(FloquetCircuit::new(geom(4, 2), &LayerSchedule::Brickwork, gates).is_err());
    }

    #[test]
    fn sigma_orders() {
        // staircase from the (+, -, -, -) configuration
        let s = LayerSchedule::Sigma(vec![1, -1, -1, -1]);
        assert_eq!(s.bond_order(&geom(4, 2)).unwrap(), vec![1, 2, 3, 4]);
        // all-equal orientations wind around the ring
        assert!(LayerSchedule::Sigma(vec![1; 4]).bond_order(&geom(4, 2)).is_err());
        assert!(LayerSchedule::Sigma(vec![-1; 4]).bond_order(&geom(4, 2)).is_err());
        assert!(LayerSchedule::Sigma(vec![1, 0, 1, -1]).bond_order(&geom(4, 2)).is_err());
        assert!(LayerSchedule::Sigma(vec![1, -1]).bond_order(&geom(4, 2)).is_err());
    }

    #[test]
    fn alternating_sigma_reproduces_brickwork() {
        let g = geom(4, 2);
        let seed = SeedPath::new(17);
        let a = FloquetCircuit::sample(g, &LayerSchedule::Brickwork, &seed).unwrap().to_dense().unwrap();
        let b = FloquetCircuit::sample(g, &LayerSchedule::Sigma(vec![1, -1, 1, -1]), &seed)
            .unwrap()
            .to_dense()
            .unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn identity_gates_give_identity() {
        let g = geom(4, 3);
        let op = build_floquet(g, &LayerSchedule::Brickwork, vec![UnitaryMatrix::identity(9); 4], BuildMode::Dense).unwrap();
        let FloquetOperator::Dense(u) = op else { panic!("dense requested") };
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(81)) < 1e-15);
    }

    #[test]
    fn two_site_brickwork_matches_kron_oracle() {
        let g = geom(2, 2);
        let seed = SeedPath::new(5);
        let circuit = FloquetCircuit::sample(g, &LayerSchedule::Brickwork, &seed).unwrap();
        let g1 = sample_cue(4, &seed.child(0)).unwrap();
        let g2 = sample_cue(4, &seed.child(1)).unwrap();
        // bond 2 acts on (2, 1): conjugate by SWAP
        let mut swap = ComplexMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(r, c)] = C64::new(1.0, 0.0);
        }
        let g2_embedded = swap.matmul(g2.matrix()).unwrap().matmul(&swap).unwrap();
        let expect = g2_embedded.matmul(g1.matrix()).unwrap();
        let dense = circuit.to_dense().unwrap();
        assert!(dense.matrix().max_abs_diff(&expect) < 1e-12);
        let _ = kron(&ComplexMatrix::identity(1), &expect).unwrap();
    }

    #[test]
    fn applier_and_dense_agree() {
        for (l, q) in [(2, 3), (4, 2), (4, 3)] {
            let g = geom(l, q);
            let seed = SeedPath::new(l as u64 * 10 + q as u64);
            let c = FloquetCircuit::sample(g, &LayerSchedule::Brickwork, &seed).unwrap();
            let dense = c.to_dense().unwrap();
            assert!(dense.matrix().unitarity_defect() <= 1e-10 * g.dim() as f64);
            let psi = make_state(&StateKind::Ghz, &g).unwrap();
            let mut a = psi.amplitudes().to_vec();
            c.apply(&mut a);
            let b = dense.apply(&psi).unwrap();
            let dev = a.iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12);
            // sequential two-site application agrees too
            let mut s = psi.clone();
            for (bond, gate) in &c.steps {
                let u = UnitaryMatrix::new(gate.clone(), Provenance::CueSample).unwrap();
                s = apply_two_site_gate(&s, &u, *bond, &g).unwrap();
            }
            assert_eq!(s.amplitudes(), &a[..]);
        }
    }

    #[test]
    fn sigma_circuits_are_unitary() {
        let g = geom(4, 2);
        for sigma in [vec![1, -1, -1, -1], vec![-1, 1, 1, 1], vec![1, 1, -1, -1]] {
            let c = FloquetCircuit::sample(g, &LayerSchedule::Sigma(sigma), &SeedPath::new(3)).unwrap();
            assert!(c.to_dense().unwrap().matrix().unitarity_defect() <= 1e-10 * 16.0);
        }
    }

    #[test]
    fn global_hamiltonian_traces() {
        let local = LocalSensingSpec::traceless_default(4, 1.0).unwrap();
        let one = global_sensing_hamiltonian(&geom(1, 4), &local).unwrap();
        assert_eq!(one.values(), local.h.values());
        for l in 1..=4 {
            let h = global_sensing_hamiltonian(&geom(l, 4), &local).unwrap();
            assert!(h.trace().abs() < 1e-9);
            let expect = l as f64 * 4f64.powi(l as i32 - 1) * local.trace_sq();
            assert!((h.trace_sq() - expect).abs() < 1e-9);
            assert!((h.spectral_width() - l as f64 * local.spectral_width()).abs() < 1e-12);
        }
        assert!(global_sensing_hamiltonian(&geom(2, 3), &local).is_err());
    }

    #[test]
    fn states() {
        for (l, q) in [(2, 2), (3, 4)] {
            let p = make_state(&StateKind::Product, &geom(l, q)).unwrap();
            assert!((p.norm() - 1.0).abs() < 1e-15);
            assert_eq!(p.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 1);
        }
        let bell = make_state(&StateKind::Ghz, &geom(2, 2)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(bell.amplitudes()[0], C64::new(r, 0.0));
        assert_eq!(bell.amplitudes()[3], C64::new(r, 0.0));
        assert!(make_state(&StateKind::Custom(vec![[1.0, 0.0]]), &geom(2, 2)).is_err());
    }

    #[test]
    fn ghz_single_site_purity_is_half() {
        let g = geom(3, 3);
        let ghz = make_state(&StateKind::Ghz, &g).unwrap();
        // reduced state of site 1: rho[a][b] = sum_rest psi[a, rest] conj(psi[b, rest])
        let stride = g.stride(1);
        let mut rho = [[C64::new(0.0, 0.0); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for rest in 0..stride {
                    rho[a][b] += ghz.amplitudes()[a * stride + rest] * ghz.amplitudes()[b * stride + rest].conj();
                }
            }
        }
        let purity: f64 = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| rho[a][b].norm_sqr()).sum();
        assert!((purity - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rqc_qfi_trivial_cases() {
        let g = geom(2, 2);
        let local = LocalSensingSpec::traceless_default(2, 1.0).unwrap();
        let psi = make_state(&StateKind::Product, &g).unwrap();
        let ids = vec![UnitaryMatrix::identity(4); 2];
        for p in ProtocolKind::ALL {
            assert_eq!(qfi_rqc(p, g, &LayerSchedule::Brickwork, ids.clone(), &local, 0, &psi).unwrap(), 0.0);
            let f = qfi_rqc(p, g, &LayerSchedule::Brickwork, ids.clone(), &local, 3, &psi).unwrap();
            assert!(f.abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_subspace_triplet() {
        let (basis, dim) = symmetric_projector(&geom(2, 2)).unwrap();
        assert_eq!(dim, 3);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(basis[0].amplitudes()[0], C64::new(1.0, 0.0));
        assert!((basis[1].amplitudes()[1] - C64::new(r, 0.0)).norm() < 1e-15);
        assert!((basis[1].amplitudes()[2] - C64::new(r, 0.0)).norm() < 1e-15);
        assert_eq!(basis[2].amplitudes()[3], C64::new(1.0, 0.0));
        let local = LocalSensingSpec::traceless_default(2, 1.0).unwrap();
        assert!((symmetric_trace_h2(&geom(2, 2), &local).unwrap() - 8.0).abs() < 1e-12);
        assert!(symmetric_projector(&geom(13, 2)).is_err());
    }

    #[test]
    fn cue_moment_t1_reference() {
        let m = cue_equivalence_moment(geom(2, 2), 1, 50, 1).unwrap();
        assert_eq!(m.cue_moment, 1.0);
        assert!(cue_equivalence_moment(geom(2, 2), 5, 10, 1).is_err());
    }
}
