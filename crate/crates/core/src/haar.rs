//! Haar (CUE) sampling with hierarchical, counter-based seeding.
//!
//! Every random object is drawn from its own stream, keyed by a [`SeedPath`]
//! (master seed plus a list of counters such as experiment, sample and gate
//! index). A sample therefore never depends on how its siblings were scheduled.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::linalg::{from_col_major, householder_qr_colmajor, Provenance, StateVector, UnitaryMatrix, C64};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPath {
    pub master_seed: u64,
    pub indices: Vec<u64>,
}

impl SeedPath {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, indices: Vec::new() }
    }

    /// Child path with `index` appended.
    pub fn child(&self, index: u64) -> Self {
        derive_subseed(self, index)
    }

    /// Fresh generator for this path. Identical paths give identical streams.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        for (lane, chunk) in key.chunks_exact_mut(8).enumerate() {
            let mut h = splitmix(self.master_seed ^ (lane as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
            h = splitmix(h ^ self.indices.len() as u64);
            for &i in &self.indices {
                h = splitmix(h ^ splitmix(i.wrapping_add(0x9E37_79B9_7F4A_7C15)));
            }
            chunk.copy_from_slice(&h.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

impl fmt::Display for SeedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.master_seed)?;
        for i in &self.indices {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_subseed(path: &SeedPath, index: u64) -> SeedPath {
    let mut indices = path.indices.clone();
    indices.push(index);
    SeedPath { master_seed: path.master_seed, indices }
}

/// Haar-random `n x n` unitary drawn from the stream of `seed`.
pub fn sample_cue(n: usize, seed: &SeedPath) -> Result<UnitaryMatrix> {
    sample_cue_with(n, &mut seed.rng())
}

/// Haar-random unitary from an existing generator.
///
/// Ginibre matrix, Householder QR, then `Q diag(r_kk / |r_kk|)` so that the
/// result does not inherit the phase convention of the factorization.
pub fn sample_cue_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if n == 0 {
        return input("CUE dimension must be at least 1");
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre: Vec<C64> = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * scale, im * scale)
        })
        .collect();
    let (mut q, r) = householder_qr_colmajor(ginibre, n);
    for k in 0..n {
        let rkk = r[k * n + k];
        let norm = rkk.norm();
        if norm == 0.0 {
            continue;
        }
        let phase = rkk / norm;
        for z in &mut q[k * n..(k + 1) * n] {
            *z *= phase;
        }
    }
    Ok(UnitaryMatrix::new_unchecked(from_col_major(&q, n), Provenance::CueSample))
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn random_state(n: usize, seed: &SeedPath) -> Result<StateVector> {
    if n == 0 {
        return input("state dimension must be at least 1");
    }
    let mut rng = seed.rng();
    let amps = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(amps)
}
