use serde::{Deserialize, Serialize};

use crate::error::{QfiError, Result};

/// Largest Hilbert-space dimension handled as a dense operator.
pub const MAX_DENSE_DIM: usize = 4096;
/// Largest Hilbert-space dimension handled as a state vector.
pub const MAX_STATE_DIM: usize = 1 << 24;

/// Periodic chain of `sites` qudits of local dimension `local_dim`.
///
/// Sites are numbered `1..=L` and site `L + 1` is identified with site 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainGeometry {
    sites: usize,
    local_dim: usize,
    dim: usize,
}

impl ChainGeometry {
    pub fn new(sites: usize, local_dim: usize) -> Result<Self> {
        if sites == 0 {
            return Err(QfiError::Config("chain needs at least one site".into()));
        }
        if local_dim < 2 {
            return Err(QfiError::Config(format!("local dimension must be >= 2, got {local_dim}")));
        }
        let dim = u32::try_from(sites)
            .ok()
            .and_then(|l| local_dim.checked_pow(l))
            .filter(|&d| d <= MAX_STATE_DIM)
            .ok_or_else(|| {
                QfiError::Capability(format!(
                    "q^L = {local_dim}^{sites} exceeds the state-vector cap {MAX_STATE_DIM}"
                ))
            })?;
        Ok(Self { sites, local_dim, dim })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// `q^L`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fits_dense(&self) -> bool {
        self.dim <= MAX_DENSE_DIM
    }

    pub fn require_dense(&self) -> Result<()> {
        if self.fits_dense() {
            Ok(())
        } else {
            Err(QfiError::Capability(format!(
                "dense operators need q^L <= {MAX_DENSE_DIM}, got {}",
                self.dim
            )))
        }
    }

    /// Index stride of a 1-based site; site 1 is the most significant digit.
    pub fn stride(&self, site: usize) -> usize {
        debug_assert!((1..=self.sites).contains(&site));
        self.local_dim.pow((self.sites - site) as u32)
    }

    /// Digit of basis index `n` at a 1-based site.
    pub fn digit(&self, n: usize, site: usize) -> usize {
        (n / self.stride(site)) % self.local_dim
    }

    /// Periodic successor, `L -> 1`.
    pub fn next_site(&self, site: usize) -> usize {
        site % self.sites + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_and_strides() {
        let g = ChainGeometry::new(3, 2).unwrap();
        assert_eq!(g.dim(), 8);
        assert_eq!(g.stride(1), 4);
        assert_eq!(g.stride(3), 1);
        // 0b110: site1 = 1, site2 = 1, site3 = 0
        assert_eq!((g.digit(6, 1), g.digit(6, 2), g.digit(6, 3)), (1, 1, 0));
        assert_eq!(g.next_site(3), 1);
    }

    #[test]
    fn rejects_bad_chains() {
        assert!(matches!(ChainGeometry::new(0, 2), Err(QfiError::Config(_))));
        assert!(matches!(ChainGeometry::new(2, 1), Err(QfiError::Config(_))));
        assert!(matches!(ChainGeometry::new(25, 2), Err(QfiError::Capability(_))));
        assert!(ChainGeometry::new(7, 4).unwrap().require_dense().is_err());
        assert!(ChainGeometry::new(4, 8).unwrap().require_dense().is_ok());
    }
}
