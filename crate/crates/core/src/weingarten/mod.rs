//! Unitary Weingarten calculus for small degree.
//!
//! The Weingarten function of `U(N)` at degree `t` is the (pseudo-)inverse of
//! the Gram matrix `G[s, r] = N^{#cycles(s^-1 r)}` over the symmetric group
//! `S_t`. Both `G` and its inverse are class functions, so the linear system
//! is solved on conjugacy classes (one unknown per partition of `t`) in exact
//! rational arithmetic.

mod perm;
mod predictions;
mod trace;

pub use perm::{partitions, permutations, CycleType, Permutation};
pub use predictions::{
    k_analytics, predict_qfi, qfi_t1_exact, sym_predictions, AsymptoticPrediction, Model,
};
pub use trace::{average_trace_product, Factor, TraceGroup, TraceProductSpec, MAX_TRACE_DEGREE};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{input, QfiError, Result};
use crate::linalg::{UnitaryMatrix, C64};

/// Largest degree for which a table is built.
pub const MAX_TABLE_DEGREE: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenTable {
    degree: usize,
    dim: usize,
    entries: Vec<(CycleType, BigRational)>,
}

impl WeingartenTable {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(CycleType, BigRational)] {
        &self.entries
    }

    pub fn exact(&self, cycle_type: &CycleType) -> Option<&BigRational> {
        self.entries.iter().find(|(c, _)| c == cycle_type).map(|(_, v)| v)
    }

    pub fn value(&self, cycle_type: &CycleType) -> Option<f64> {
        self.exact(cycle_type).map(rational_to_f64)
    }

    /// `Wg(p)` for a permutation of the table's degree.
    pub fn of_permutation(&self, p: &Permutation) -> f64 {
        assert_eq!(p.len(), self.degree, "permutation degree does not match table");
        self.value(&p.cycle_type()).expect("every cycle type is tabulated")
    }

    pub fn to_json(&self) -> WeingartenJson {
        WeingartenJson {
            t: self.degree,
            n: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(c, v)| WeingartenJsonEntry {
                    cycle_type: c.parts().to_vec(),
                    numerator: v.numer().to_string(),
                    denominator: v.denom().to_string(),
                    value: rational_to_f64(v),
                })
                .collect(),
        }
    }
}

/// Serialized form `{t, N, entries: [{cycle_type, numerator, denominator}]}`.
///
/// Numerators and denominators are decimal strings since they overflow 64 bits
/// at moderate `(t, N)`.
#[derive(Debug, Clone, Serialize)]
pub struct WeingartenJson {
    pub t: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<WeingartenJsonEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeingartenJsonEntry {
    pub cycle_type: Vec<usize>,
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact Weingarten table for degree `t <= 6` and dimension `n >= 1`.
///
/// For `n >= t` the Gram matrix is invertible. Below that the Moore-Penrose
/// pseudo-inverse is used, which still reproduces every Haar moment.
pub fn weingarten_table(t: usize, n: usize) -> Result<WeingartenTable> {
    if t == 0 || t > MAX_TABLE_DEGREE {
        return Err(QfiError::Capability(format!(
            "Weingarten tables are built for 1 <= t <= {MAX_TABLE_DEGREE}, got t = {t}"
        )));
    }
    if n == 0 {
        return input("dimension must be at least 1");
    }
    let classes = partitions(t);
    let m = class_gram(t, n, &classes);
    let identity_class = classes.len() - 1;
    let mut rhs = vec![BigRational::zero(); classes.len()];
    rhs[identity_class] = BigRational::one();

    let values = if n >= t {
        solve_consistent(m.clone(), rhs)
    } else {
        // x = G^+ b is the unique x in range(G) with G^2 x = G b. Writing
        // x = G y turns this into the consistent system G^3 y = G b.
        let m2 = mat_mul(&m, &m);
        let m3 = mat_mul(&m2, &m);
        let gb = mat_vec(&m, &rhs);
        let y = solve_consistent(m3, gb);
        mat_vec(&m, &y)
    };
    let entries = classes.into_iter().zip(values).collect();
    Ok(WeingartenTable { degree: t, dim: n, entries })
}

/// Class-reduced Gram matrix: `K[l][m] = sum over r in class m of N^{#cycles(s_l^-1 r)}`.
fn class_gram(t: usize, n: usize, classes: &[CycleType]) -> Vec<Vec<BigRational>> {
    let reps: Vec<Permutation> = classes.iter().map(Permutation::representative).collect();
    let powers: Vec<BigRational> = (0..=t)
        .map(|k| BigRational::from_integer(BigInt::from(n).pow(k as u32)))
        .collect();
    let mut k = vec![vec![BigRational::zero(); classes.len()]; classes.len()];
    for r in permutations(t) {
        let col = classes.iter().position(|c| *c == r.cycle_type()).expect("partition listed");
        for (row, rep) in reps.iter().enumerate() {
            let cycles = rep.inverse().compose(&r).cycle_count();
            k[row][col] += &powers[cycles];
        }
    }
    k
}

/// Full `t! x t!` Gram matrix in floating point, rows/columns in [`permutations`] order.
pub fn gram_matrix(t: usize, n: usize) -> Vec<Vec<f64>> {
    let perms = permutations(t);
    perms
        .iter()
        .map(|s| {
            let si = s.inverse();
            perms.iter().map(|r| (n as f64).powi(si.compose(r).cycle_count() as i32)).collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let mut acc = BigRational::zero();
                    for (k, bk) in b.iter().enumerate() {
                        acc += &a[i][k] * &bk[j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_vec(a: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(BigRational::zero(), |acc, (r, v)| acc + r * v))
        .collect()
}

/// Gauss-Jordan on a consistent (possibly singular) system; free variables are 0.
fn solve_consistent(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let rows = a.len();
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[r];
                b[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    debug_assert!(b[r..].iter().all(|v| v.is_zero()), "system must be consistent");
    let mut x = vec![BigRational::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = b[row].clone();
    }
    x
}

/// One-sample estimator `prod_k U_kk conj(U_{k, P(k)})`, whose Haar mean is `Wg(P)`.
pub fn weingarten_moment(u: &UnitaryMatrix, p: &Permutation) -> Result<C64> {
    if p.len() > u.dim() {
        return input(format!("moment estimator needs t <= N, got t = {} and N = {}", p.len(), u.dim()));
    }
    let m = u.matrix();
    Ok((0..p.len()).map(|k| m[(k, k)] * m[(k, p.apply(k))].conj()).product())
}
