//! Lipschitz constants, measure-concentration tail bounds and empirical fluctuations.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::metrology::ProtocolKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Rmm,
    Rqc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzBound {
    pub protocol: ProtocolKind,
    pub model: ModelKind,
    pub t: usize,
    /// Spectral width of `H0` (global model) or `h0` (circuit).
    pub delta: f64,
    /// Number of sites; 1 for the global model.
    pub sites: usize,
    pub value: f64,
}

/// Upper bound on the Lipschitz constant of the QFI as a function of the unitaries.
///
/// Control: `4 t^2 (t + 1) Δ`, state preparation: `8 t Δ`; the circuit
/// bounds carry an extra factor `L` with `Δ` the local width.
pub fn lipschitz_bound(protocol: ProtocolKind, model: ModelKind, t: usize, delta: f64, sites: usize) -> LipschitzBound {
    debug_assert!(delta >= 0.0);
    let tf = t as f64;
    let base = match protocol {
        ProtocolKind::Control => 4.0 * tf * tf * (tf + 1.0) * delta,
        ProtocolKind::StatePrep => 8.0 * tf * delta,
    };
    let sites = match model {
        ModelKind::Rmm => 1,
        ModelKind::Rqc => sites,
    };
    LipschitzBound { protocol, model, t, delta, sites, value: base * sites as f64 }
}

/// `2 exp(-D δ^2 / (4 lip^2))`, unclamped. `D` is `N` for the global model and `q` for circuits.
pub fn tail_bound(dim_scale: f64, delta: f64, lip: f64) -> f64 {
    if lip == 0.0 {
        return if delta > 0.0 { 0.0 } else { 2.0 };
    }
    2.0 * (-dim_scale * delta * delta / (4.0 * lip * lip)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationStats {
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub deltas: Vec<f64>,
    /// `#{|v - mean| >= δ} / n` for each grid `δ`.
    pub tail_fractions: Vec<f64>,
}

impl FluctuationStats {
    pub fn relative_std(&self) -> f64 {
        self.std / self.mean.abs()
    }

    /// Rows `delta,empirical_tail,bound_raw,bound_clamped`.
    pub fn tail_csv(&self, dim_scale: f64, lip: f64) -> String {
        let mut out = String::from("delta,empirical_tail,bound_raw,bound_clamped\n");
        for (d, f) in self.deltas.iter().zip(&self.tail_fractions) {
            let raw = tail_bound(dim_scale, *d, lip);
            writeln!(out, "{d:e},{f:e},{raw:e},{:e}", raw.min(1.0)).unwrap();
        }
        out
    }

    /// Grid points where the empirical tail exceeds `min(1, bound)`.
    pub fn bound_violations(&self, dim_scale: f64, lip: f64) -> Vec<f64> {
        self.deltas
            .iter()
            .zip(&self.tail_fractions)
            .filter(|(d, f)| **f > tail_bound(dim_scale, **d, lip).min(1.0))
            .map(|(d, _)| *d)
            .collect()
    }
}

pub fn fluctuation_stats(values: &[f64], delta_grid: &[f64]) -> Result<FluctuationStats> {
    if values.len() < 2 {
        return input(format!("fluctuation statistics need at least 2 values, got {}", values.len()));
    }
    if values.iter().chain(delta_grid).any(|v| !v.is_finite()) {
        return input("values and grid must be finite");
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let tail_fractions = delta_grid
        .iter()
        .map(|d| values.iter().filter(|v| (*v - mean).abs() >= *d).count() as f64 / n)
        .collect();
    Ok(FluctuationStats {
        values: values.to_vec(),
        mean,
        std,
        stderr: std / n.sqrt(),
        deltas: delta_grid.to_vec(),
        tail_fractions,
    })
}

/// `points` values log-spaced over `[0.01 |mean|, 2 |mean|]`.
pub fn default_delta_grid(mean: f64, points: usize) -> Vec<f64> {
    let (lo, hi) = (0.01 * mean.abs(), 2.0 * mean.abs());
    if points < 2 || lo == 0.0 {
        return vec![hi; points.min(1)];
    }
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|i| lo * (ratio * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lipschitz_values() {
        use ProtocolKind::*;
        assert_eq!(lipschitz_bound(Control, ModelKind::Rmm, 1, 2.0, 7).value, 16.0);
        assert_eq!(lipschitz_bound(StatePrep, ModelKind::Rmm, 2, 2.0, 1).value, 32.0);
        assert_eq!(lipschitz_bound(Control, ModelKind::Rmm, 3, 2.0, 7).sites, 1);
    }

    #[test]
    fn tail_bound_edges() {
        assert_eq!(tail_bound(100.0, 0.0, 3.0), 2.0);
        assert_eq!(tail_bound(100.0, 0.5, 0.0), 0.0);
        assert!(tail_bound(400.0, 1.0, 2.0) < tail_bound(100.0, 1.0, 2.0));
    }

    #[test]
    fn stats_examples() {
        let c = fluctuation_stats(&[3.0; 5], &[0.1, 1.0]).unwrap();
        assert_eq!(c.std, 0.0);
        assert_eq!(c.tail_fractions, vec![0.0, 0.0]);
        let two = fluctuation_stats(&[0.0, 2.0], &[0.5]).unwrap();
        assert_eq!(two.mean, 1.0);
        assert_eq!(two.tail_fractions, vec![1.0]);
        assert!((two.std - 2f64.sqrt()).abs() < 1e-15);
        assert!(fluctuation_stats(&[1.0], &[0.5]).is_err());
    }

    #[test]
    fn grid_and_csv() {
        let g = default_delta_grid(5.0, 20);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 0.05).abs() < 1e-15 && (g[19] - 10.0).abs() < 1e-12);
        let s = fluctuation_stats(&[1.0, 2.0, 3.0], &g).unwrap();
        let csv = s.tail_csv(64.0, 1.0);
        assert_eq!(csv.lines().next().unwrap(), "delta,empirical_tail,bound_raw,bound_clamped");
        assert_eq!(csv.lines().count(), 21);
    }

    proptest! {
        #[test]
        fn circuit_bound_is_sites_times_global(t in 1usize..20, delta in 0.0f64..10.0, l in 1usize..16) {
            for p in ProtocolKind::ALL {
                let g = lipschitz_bound(p, ModelKind::Rmm, t, delta, 1).value;
                let c = lipschitz_bound(p, ModelKind::Rqc, t, delta, l).value;
                prop_assert!((c - l as f64 * g).abs() <= 1e-12 * c.abs().max(1.0));
                prop_assert!(g >= 0.0);
            }
        }

        #[test]
        fn tail_bound_monotone(d1 in 0.01f64..5.0, gap in 0.01f64..5.0, n in 1.0f64..500.0, lip in 0.1f64..10.0) {
            let d2 = d1 + gap;
            prop_assert!(tail_bound(n, d2, lip) <= tail_bound(n, d1, lip));
            prop_assert!(tail_bound(n + 10.0, d1, lip) <= tail_bound(n, d1, lip));
        }

        #[test]
        fn tail_fractions_in_unit_interval_and_non_increasing(
            values in proptest::collection::vec(-10.0f64..10.0, 2..40),
        ) {
            let grid: Vec<f64> = (0..15).map(|i| i as f64 * 0.7).collect();
            let s = fluctuation_stats(&values, &grid).unwrap();
            for w in s.tail_fractions.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            prop_assert!(s.tail_fractions.iter().all(|f| (0.0..=1.0).contains(f)));
        }
    }
}
