//! Per-realization quantum Fisher information for the control protocol
//! `(W U)^t` and the state-preparation protocol `W^t U^t`, where
//! `W = exp(-i theta H0)` with diagonal `H0`.
//!
//! Two independent routes are provided. The operator route builds the
//! metrological generator `G` densely and takes `4 Var[G]`. The state route
//! propagates `|psi>` and `|d psi / d theta>` step by step and never forms an
//! `N x N` product, which is what ensembles and circuits use.

use serde::{Deserialize, Serialize};

use crate::error::{input, QfiError, Result};
use crate::linalg::{inner, ComplexMatrix, HermitianDiagonal, StateVector, UnitaryMatrix, C64};

/// Largest dimension for which the dense generator is built.
pub const MAX_OPERATOR_DIM: usize = 1024;

/// Slack below zero tolerated on a computed variance before it is an error.
pub const NEGATIVE_VARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Control,
    StatePrep,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 2] = [ProtocolKind::Control, ProtocolKind::StatePrep];

    pub fn label(&self) -> &'static str {
        match self {
            ProtocolKind::Control => "ctr",
            ProtocolKind::StatePrep => "sp",
        }
    }
}

/// Diagonal sensing Hamiltonian `H0` and encoding parameter `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingSpec {
    h: HermitianDiagonal,
    theta: f64,
    phases: Vec<C64>,
}

impl SensingSpec {
    pub fn new(h: HermitianDiagonal, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return input("encoding parameter must be finite");
        }
        let phases = h.phases(theta);
        Ok(Self { h, theta, phases })
    }

    /// Traceless `diag(+1 .., -1 ..)` on `n` levels.
    pub fn traceless_default(n: usize, theta: f64) -> Result<Self> {
        Self::new(HermitianDiagonal::traceless_two_block(n)?, theta)
    }

    pub fn hamiltonian(&self) -> &HermitianDiagonal {
        &self.h
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
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

    /// Diagonal of `W`.
    pub fn phases(&self) -> &[C64] {
        &self.phases
    }

    /// Same Hamiltonian shifted by `c * I`.
    pub fn shifted(&self, c: f64) -> Self {
        Self::new(self.h.shifted(c), self.theta).expect("shift keeps entries finite")
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.h.clone(), theta)
    }
}

/// One application of the random (theta-independent) part of a time step.
pub trait StepApplier: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, psi: &mut [C64]);
}

impl StepApplier for UnitaryMatrix {
    fn dim(&self) -> usize {
        UnitaryMatrix::dim(self)
    }

    fn apply(&self, psi: &mut [C64]) {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        self.matrix().matvec_into(psi, &mut out);
        psi.copy_from_slice(&out);
    }
}

fn check_dims(applier_dim: usize, spec: &SensingSpec, psi0: Option<&StateVector>) -> Result<()> {
    if applier_dim != spec.dim() {
        return input(format!(
            "unitary dimension {applier_dim} does not match sensing Hamiltonian dimension {}",
            spec.dim()
        ));
    }
    if let Some(psi) = psi0 {
        if psi.dim() != spec.dim() {
            return input(format!("state dimension {} does not match {}", psi.dim(), spec.dim()));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return input(format!("initial state is not normalized: norm {norm}"));
        }
    }
    Ok(())
}

/// Metrological generator `G(t)`, sign convention `G = sum_s (U†W†)^s H0 (WU)^s`
/// for control and `G = t U†^t H0 U^t` for state preparation.
///
/// `i (d_theta U_theta†) U_theta` equals `-G`; only the variance enters the QFI.
pub fn generator(
    protocol: ProtocolKind,
    u: &UnitaryMatrix,
    spec: &SensingSpec,
    t: usize,
) -> Result<ComplexMatrix> {
    check_dims(u.dim(), spec, None)?;
    let n = u.dim();
    if n > MAX_OPERATOR_DIM {
        return Err(QfiError::Capability(format!(
            "dense generator limited to N <= {MAX_OPERATOR_DIM}, got {n}"
        )));
    }
    let h = spec.hamiltonian().values();
    let conjugate = |v: &ComplexMatrix| -> ComplexMatrix {
        // v† H0 v with diagonal H0
        let mut hv = v.clone();
        for r in 0..n {
            for c in 0..n {
                hv[(r, c)] *= h[r];
            }
        }
        v.dagger().matmul_unchecked(&hv)
    };
    let mut g = ComplexMatrix::zeros(n, n);
    if t == 0 {
        return Ok(g);
    }
    match protocol {
        ProtocolKind::Control => {
            let mut wu = u.matrix().clone();
            for r in 0..n {
                let w = spec.phases()[r];
                for c in 0..n {
                    wu[(r, c)] *= w;
                }
            }
            let mut v = ComplexMatrix::identity(n);
            for _ in 0..t {
                v = wu.matmul_unchecked(&v);
                g.add_assign(&conjugate(&v));
            }
        }
        ProtocolKind::StatePrep => {
            let mut v = ComplexMatrix::identity(n);
            for _ in 0..t {
                v = u.matrix().matmul_unchecked(&v);
            }
            g = conjugate(&v).scale(C64::new(t as f64, 0.0));
        }
    }
    Ok(g)
}

/// Accepts tiny negative round-off, rejects anything clearly negative.
fn clamp_variance(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEGATIVE_VARIANCE_TOL {
        Ok(0.0)
    } else {
        Err(QfiError::Numerical(format!("negative variance {v:e}")))
    }
}

/// `4 Var[G]` on `psi0` from the dense generator.
pub fn qfi_operator(
    protocol: ProtocolKind,
    u: &UnitaryMatrix,
    spec: &SensingSpec,
    t: usize,
    psi0: &StateVector,
) -> Result<f64> {
    check_dims(u.dim(), spec, Some(psi0))?;
    let g = generator(protocol, u, spec, t)?;
    let g_psi = g.matvec(psi0.amplitudes())?;
    let second: f64 = g_psi.iter().map(|z| z.norm_sqr()).sum();
    let first = inner(psi0.amplitudes(), &g_psi).re;
    Ok(4.0 * clamp_variance(second - first * first)?)
}

/// `4 (<dpsi|dpsi> - |<psi|dpsi>|^2)`.
fn pure_state_qfi(psi: &[C64], dpsi: &[C64]) -> Result<f64> {
    let norm: f64 = dpsi.iter().map(|z| z.norm_sqr()).sum();
    let overlap = inner(psi, dpsi).norm_sqr();
    Ok(4.0 * clamp_variance(norm - overlap)?)
}

fn variance_of_diagonal(h: &[f64], psi: &[C64]) -> (f64, f64) {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (&e, z) in h.iter().zip(psi) {
        let p = z.norm_sqr();
        m1 += p * e;
        m2 += p * e * e;
    }
    (m1, m2 - m1 * m1)
}

/// QFI at every time `0..=t_max` from one pass of the state recursion.
///
/// Control: `psi(s+1) = W U psi(s)`, `dpsi(s+1) = W U dpsi(s) - i H0 W U psi(s)`.
/// State preparation: `psi(t) = W^t U^t psi0`, `dpsi = -i t H0 psi(t)`.
pub fn qfi_trajectory<A: StepApplier + ?Sized>(
    protocol: ProtocolKind,
    step: &A,
    spec: &SensingSpec,
    t_max: usize,
    psi0: &StateVector,
) -> Result<Vec<f64>> {
    check_dims(step.dim(), spec, Some(psi0))?;
    let h = spec.hamiltonian().values();
    let w = spec.phases();
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(0.0);
    let mut psi = psi0.amplitudes().to_vec();
    match protocol {
        ProtocolKind::Control => {
            let mut dpsi = vec![C64::new(0.0, 0.0); psi.len()];
            for _ in 0..t_max {
                step.apply(&mut psi);
                step.apply(&mut dpsi);
                for k in 0..psi.len() {
                    psi[k] *= w[k];
                    dpsi[k] = dpsi[k] * w[k] - C64::new(0.0, h[k]) * psi[k];
                }
                out.push(pure_state_qfi(&psi, &dpsi)?);
            }
        }
        ProtocolKind::StatePrep => {
            for s in 1..=t_max {
                step.apply(&mut psi);
                // W^s only rotates phases of the H0 eigenbasis
                let (_, var) = variance_of_diagonal(h, &psi);
                let sf = s as f64;
                out.push(4.0 * sf * sf * clamp_variance(var)?);
            }
        }
    }
    Ok(out)
}

pub fn qfi_state_recursion<A: StepApplier + ?Sized>(
    protocol: ProtocolKind,
    step: &A,
    spec: &SensingSpec,
    t: usize,
    psi0: &StateVector,
) -> Result<f64> {
    Ok(qfi_trajectory(protocol, step, spec, t, psi0)?[t])
}

/// Final state `U_theta |psi0>` of either protocol.
pub fn evolve<A: StepApplier + ?Sized>(
    protocol: ProtocolKind,
    step: &A,
    spec: &SensingSpec,
    t: usize,
    psi0: &StateVector,
) -> Result<StateVector> {
    check_dims(step.dim(), spec, Some(psi0))?;
    let w = spec.phases();
    let mut psi = psi0.amplitudes().to_vec();
    for _ in 0..t {
        step.apply(&mut psi);
        if protocol == ProtocolKind::Control {
            psi.iter_mut().zip(w).for_each(|(z, p)| *z *= p);
        }
    }
    if protocol == ProtocolKind::StatePrep {
        for (z, p) in psi.iter_mut().zip(w) {
            *z *= p.powi(t as i32);
        }
    }
    StateVector::normalized(psi)
}

/// `|Tr (W U)^t|^2` (control) or `|Tr (W^t U^t)|^2` (state preparation) for each requested `t`.
pub fn spectral_form_factors(
    protocol: ProtocolKind,
    u: &UnitaryMatrix,
    spec: &SensingSpec,
    t_values: &[usize],
) -> Result<Vec<f64>> {
    check_dims(u.dim(), spec, None)?;
    let n = u.dim();
    let w = spec.phases();
    let m = match protocol {
        ProtocolKind::Control => ComplexMatrix::from_fn(n, n, |r, c| w[r] * u.matrix()[(r, c)]),
        ProtocolKind::StatePrep => u.matrix().clone(),
    };
    let t_top = t_values.iter().copied().max().unwrap_or(0);
    let mut diags: Vec<Vec<C64>> = vec![Vec::new(); t_top + 1];
    diags[0] = vec![C64::new(1.0, 0.0); n];
    let mut power = ComplexMatrix::identity(n);
    for p in 1..=t_top {
        if p == t_top {
            diags[p] = power.diag_of_product(&m)?;
        } else {
            power = power.matmul_unchecked(&m);
            diags[p] = (0..n).map(|k| power[(k, k)]).collect();
        }
    }
    Ok(t_values
        .iter()
        .map(|&t| {
            let tr: C64 = match protocol {
                ProtocolKind::Control => diags[t].iter().sum(),
                ProtocolKind::StatePrep => diags[t].iter().zip(w).map(|(d, p)| d * p.powi(t as i32)).sum(),
            };
            tr.norm_sqr()
        })
        .collect())
}

/// Heisenberg-limited bound `t^2 Δ^2`.
pub fn qfi_upper_bound(t: usize, spectral_width: f64) -> f64 {
    let tf = t as f64;
    tf * tf * spectral_width * spectral_width
}

/// The chain `F <= 4 (sum_s sqrt Var_s)^2 <= 4 t sum_s Var_s <= t^2 Δ^2` for one realization
/// of the control protocol, `Var_s` being the variance of `H0` in `(WU)^s |psi0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundChain {
    pub qfi: f64,
    pub sqrt_sum: f64,
    pub var_sum: f64,
    pub hard: f64,
}

impl BoundChain {
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.qfi <= self.sqrt_sum + tol && self.sqrt_sum <= self.var_sum + tol && self.var_sum <= self.hard + tol
    }
}

pub fn control_bound_chain<A: StepApplier + ?Sized>(
    step: &A,
    spec: &SensingSpec,
    t: usize,
    psi0: &StateVector,
) -> Result<BoundChain> {
    let qfi = qfi_state_recursion(ProtocolKind::Control, step, spec, t, psi0)?;
    let h = spec.hamiltonian().values();
    let w = spec.phases();
    let mut psi = psi0.amplitudes().to_vec();
    let (mut sqrt_acc, mut var_acc) = (0.0, 0.0);
    for _ in 0..t {
        step.apply(&mut psi);
        psi.iter_mut().zip(w).for_each(|(z, p)| *z *= p);
        let var = variance_of_diagonal(h, &psi).1.max(0.0);
        sqrt_acc += var.sqrt();
        var_acc += var;
    }
    Ok(BoundChain {
        qfi,
        sqrt_sum: 4.0 * sqrt_acc * sqrt_acc,
        var_sum: 4.0 * t as f64 * var_acc,
        hard: qfi_upper_bound(t, spec.spectral_width()),
    })
}
