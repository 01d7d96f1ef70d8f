//! Closed-form ensemble predictions.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::metrology::ProtocolKind;

/// Exact Haar average of the QFI after one step, for a pure initial state.
///
/// With `a = tr_h^2 + tr_h2`,
/// `4 (tr_h2 / N - a / (N^2 - 1) + a / (N (N^2 - 1)))`, i.e.
/// `4 (tr_h2 / N - a / (N (N + 1)))`.
pub fn qfi_t1_exact(n: usize, tr_h: f64, tr_h2: f64) -> Result<f64> {
    if n < 2 {
        return input("exact one-step QFI needs N >= 2");
    }
    let nf = n as f64;
    let a = tr_h * tr_h + tr_h2;
    Ok(4.0 * (tr_h2 / nf - a / (nf * nf - 1.0) + a / (nf * (nf * nf - 1.0))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Model {
    /// Global Haar unitary on `dim` levels with sensing Hamiltonian of `Tr H0^2 = trace_h0_sq`.
    Rmm { trace_h0_sq: f64, dim: usize },
    /// Floquet circuit on `sites` qudits of dimension `local_dim`, `Tr h0^2 = trace_h0_local_sq`.
    Rqc { trace_h0_local_sq: f64, local_dim: usize, sites: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub protocol: ProtocolKind,
    pub model: Model,
}

impl AsymptoticPrediction {
    pub fn rmm(protocol: ProtocolKind, trace_h0_sq: f64, dim: usize) -> Self {
        Self { protocol, model: Model::Rmm { trace_h0_sq, dim } }
    }

    pub fn rqc(protocol: ProtocolKind, trace_h0_local_sq: f64, local_dim: usize, sites: usize) -> Self {
        Self { protocol, model: Model::Rqc { trace_h0_local_sq, local_dim, sites } }
    }
}

/// Leading-order average QFI: linear in `t` for control, quadratic for state preparation.
pub fn predict_qfi(pred: &AsymptoticPrediction, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let per_step = match pred.model {
        Model::Rmm { trace_h0_sq, dim } => 4.0 * trace_h0_sq / dim as f64,
        Model::Rqc { trace_h0_local_sq, local_dim, sites } => {
            4.0 * trace_h0_local_sq * sites as f64 / local_dim as f64
        }
    };
    let time = match pred.protocol {
        ProtocolKind::Control => t,
        ProtocolKind::StatePrep => t * t,
    };
    per_step * time
}

/// Leading-order `K_ctr(t) = t` and `K_sp(t) = (t - 1) |Tr W^t|^2 / N^2 + 1`.
pub fn k_analytics(t: usize, w_trace_sq: f64, n: usize) -> (f64, f64) {
    let tf = t as f64;
    let nf = n as f64;
    (tf, (tf - 1.0) * w_trace_sq / (nf * nf) + 1.0)
}

/// Dimension of the symmetric subspace of `l` qudits and the trace of `H0^2` over it.
///
/// `dim = C(l + q - 1, l)`, `tr = l (l + q) tr(h0^2) / (q (q + 1)) * dim`
/// for traceless local `h0`.
pub fn sym_predictions(l: usize, q: usize, tr_h2: f64) -> Result<(u128, f64)> {
    if l == 0 || q < 2 {
        return input(format!("need L >= 1 and q >= 2, got L = {l}, q = {q}"));
    }
    let dim = binomial((l + q - 1) as u128, l as u128);
    let (lf, qf) = (l as f64, q as f64);
    let tr = lf * (lf + qf) * tr_h2 / (qf * (qf + 1.0)) * dim as f64;
    Ok((dim, tr))
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}
