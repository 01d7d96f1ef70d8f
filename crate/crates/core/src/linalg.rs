//! Dense complex linear algebra and qudit-chain tensor kernels.
//!
//! Matrices are stored row-major. Chain states use the digit layout in which
//! site 1 is the most significant base-`q` digit of the basis index.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{input, QfiError, Result};
use crate::geometry::ChainGeometry;

pub type C64 = Complex64;

/// Default cap on the number of entries a Kronecker product may produce.
pub const MAX_KRON_ENTRIES: usize = 1 << 24;

const STATE_NORM_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(8) {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return input(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return input("matrix entries must be finite");
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return input(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        Ok(self.matmul_unchecked(other))
    }

    pub(crate) fn matmul_unchecked(&self, other: &Self) -> Self {
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![C64::new(0.0, 0.0); n * p];
        for i in 0..n {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * p..(k + 1) * p];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self { rows: n, cols: p, data: out }
    }

    /// Diagonal of `self * other` without forming the product.
    pub fn diag_of_product(&self, other: &Self) -> Result<Vec<C64>> {
        if self.cols != other.rows || self.rows != other.cols {
            return input("diag_of_product needs compatible square-shaped operands");
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|k| self[(i, k)] * other[(k, i)]).sum())
            .collect())
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return input(format!("vector of length {} for {}-column matrix", v.len(), self.cols));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    pub(crate) fn matvec_into(&self, v: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|` for square matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `max |A†A - I|` for square matrices.
    pub fn unitarity_defect(&self) -> f64 {
        assert!(self.is_square());
        let gram = self.dagger().matmul_unchecked(self);
        gram.max_abs_diff(&Self::identity(self.rows))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Where a unitary came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    CueSample,
    FloquetBuild,
    SensingGate,
    Other,
}

/// Square matrix certified unitary to `1e-10 * dim` on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
    provenance: Provenance,
}

impl UnitaryMatrix {
    pub fn tolerance(dim: usize) -> f64 {
        1e-10 * dim as f64
    }

    pub fn new(matrix: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        if !matrix.is_square() {
            return input(format!("unitary must be square, got {}x{}", matrix.rows, matrix.cols));
        }
        if !matrix.is_finite() {
            return input("unitary entries must be finite");
        }
        let defect = matrix.unitarity_defect();
        let tol = Self::tolerance(matrix.rows);
        if defect > tol {
            return input(format!("matrix is not unitary: defect {defect:e} > {tol:e}"));
        }
        Ok(Self { matrix, provenance })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix, provenance: Provenance) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix, provenance }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim), provenance: Provenance::Other }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.dagger(), provenance: self.provenance }
    }

    /// Product `self * other`; the result keeps `self`'s provenance.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let m = self.matrix.matmul(&other.matrix)?;
        Ok(Self { matrix: m, provenance: self.provenance })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let amps = self.matrix.matvec(psi.amplitudes())?;
        Ok(StateVector { amplitudes: amps })
    }
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return input("state amplitudes must be finite");
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return input(format!("state is not normalized: norm {norm}"));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return input("cannot normalize a zero or non-finite vector");
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return input(format!("basis index {index} out of range for dimension {dim}"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: amps })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

pub(crate) fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>` (antilinear in `a`).
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Real diagonal of a Hermitian operator written in its eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianDiagonal {
    values: Vec<f64>,
}

impl HermitianDiagonal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return input("diagonal must be non-empty");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return input("diagonal entries must be finite");
        }
        Ok(Self { values })
    }

    /// Traceless two-level block `diag(+1 x ceil(n/2), -1 x floor(n/2))`, recentred when `n` is odd.
    pub fn traceless_two_block(n: usize) -> Result<Self> {
        if n == 0 {
            return input("dimension must be positive");
        }
        let upper = n.div_ceil(2);
        let mut values: Vec<f64> = (0..n).map(|i| if i < upper { 1.0 } else { -1.0 }).collect();
        let mean = values.iter().sum::<f64>() / n as f64;
        for v in &mut values {
            *v -= mean;
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn trace_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Difference between the largest and smallest eigenvalue.
    pub fn spectral_width(&self) -> f64 {
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v + c).collect() }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.values)
    }

    /// Entries `exp(-i theta h_k)`.
    pub fn phases(&self, theta: f64) -> Vec<C64> {
        self.values.iter().map(|&h| C64::from_polar(1.0, -theta * h)).collect()
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_cap(a, b, MAX_KRON_ENTRIES)
}

pub fn kron_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, max_entries: usize) -> Result<ComplexMatrix> {
    if !a.is_finite() || !b.is_finite() {
        return input("kron operands must be finite");
    }
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let entries = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c));
    match entries {
        Some(e) if e <= max_entries => {}
        _ => {
            return Err(QfiError::Capability(format!(
                "kron of {}x{} and {}x{} exceeds {max_entries} entries",
                a.rows, a.cols, b.rows, b.cols
            )))
        }
    }
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Diagonal unitary `exp(-i theta h)`.
pub fn sensing_gate(h: &HermitianDiagonal, theta: f64) -> Result<UnitaryMatrix> {
    if !theta.is_finite() {
        return input("encoding parameter must be finite");
    }
    let phases = h.phases(theta);
    let n = phases.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, p) in phases.into_iter().enumerate() {
        m[(i, i)] = p;
    }
    Ok(UnitaryMatrix::new_unchecked(m, Provenance::SensingGate))
}

/// Applies a `q^2 x q^2` gate to sites `(site, site % L + 1)` of a chain state.
pub fn apply_two_site_gate(
    psi: &StateVector,
    gate: &UnitaryMatrix,
    site: usize,
    geom: &ChainGeometry,
) -> Result<StateVector> {
    check_two_site(psi.dim(), gate.dim(), site, geom)?;
    let mut amps = psi.amplitudes.clone();
    let kernel = TwoSiteKernel::new(geom, site);
    let mut scratch = vec![C64::new(0.0, 0.0); 2 * kernel.offsets.len()];
    kernel.apply(gate.matrix(), &mut amps, &mut scratch);
    Ok(StateVector { amplitudes: amps })
}

pub(crate) fn check_two_site(state_dim: usize, gate_dim: usize, site: usize, geom: &ChainGeometry) -> Result<()> {
    let q = geom.local_dim();
    if geom.sites() < 2 {
        return input("two-site gates need at least two sites");
    }
    if state_dim != geom.dim() {
        return input(format!("state dimension {state_dim} does not match chain dimension {}", geom.dim()));
    }
    if gate_dim != q * q {
        return input(format!("gate dimension {gate_dim} does not match q^2 = {}", q * q));
    }
    if site == 0 || site > geom.sites() {
        return input(format!("site {site} outside 1..={}", geom.sites()));
    }
    Ok(())
}

/// Index map for a two-site gate on a periodic chain.
#[derive(Debug, Clone)]
pub(crate) struct TwoSiteKernel {
    /// Offsets of the `q^2` local configurations relative to a base index.
    offsets: Vec<usize>,
    q: usize,
    /// Strides of the two target digits, smaller first.
    strides: (usize, usize),
    /// Number of base indices, `q^(L-2)`.
    bases: usize,
}

impl TwoSiteKernel {
    pub(crate) fn new(geom: &ChainGeometry, site: usize) -> Self {
        let q = geom.local_dim();
        let s1 = geom.stride(site);
        let s2 = geom.stride(site % geom.sites() + 1);
        let offsets = (0..q * q).map(|k| (k / q) * s1 + (k % q) * s2).collect();
        Self { offsets, q, strides: (s1.min(s2), s1.max(s2)), bases: geom.dim() / (q * q) }
    }

    /// The `m`-th chain index whose two target digits are zero.
    fn base(&self, m: usize) -> usize {
        let (lo, hi) = self.strides;
        let x = (m / lo) * lo * self.q + m % lo;
        (x / hi) * hi * self.q + x % hi
    }

    /// `scratch` must hold at least `2 * q^2` entries.
    pub(crate) fn apply(&self, gate: &ComplexMatrix, amps: &mut [C64], scratch: &mut [C64]) {
        let m = self.offsets.len();
        let (local, out) = scratch.split_at_mut(m);
        for b in 0..self.bases {
            let base = self.base(b);
            for (l, &off) in local.iter_mut().zip(&self.offsets) {
                *l = amps[base + off];
            }
            gate.matvec_into(local, &mut out[..m]);
            for (o, &off) in out.iter().zip(&self.offsets) {
                amps[base + off] = *o;
            }
        }
    }
}

/// Householder QR of a square matrix.
#[derive(Debug, Clone)]
pub struct QrDecomposition {
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
}

/// Householder QR. `R` has real-negative-rotated diagonal in general; callers
/// that need a canonical form must fix the phases themselves.
pub fn householder_qr(a: &ComplexMatrix) -> Result<QrDecomposition> {
    if !a.is_square() {
        return input("householder_qr expects a square matrix");
    }
    let (q_cols, r_cols) = householder_qr_colmajor(col_major(a), a.rows);
    Ok(QrDecomposition { q: from_col_major(&q_cols, a.rows), r: from_col_major(&r_cols, a.rows) })
}

pub(crate) fn col_major(a: &ComplexMatrix) -> Vec<C64> {
    let n = a.rows;
    let mut out = vec![C64::new(0.0, 0.0); n * a.cols];
    for r in 0..n {
        for c in 0..a.cols {
            out[c * n + r] = a[(r, c)];
        }
    }
    out
}

pub(crate) fn from_col_major(data: &[C64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| data[c * n + r])
}

/// Column-major Householder QR; returns `(Q, R)` both column-major.
pub(crate) fn householder_qr_colmajor(mut a: Vec<C64>, n: usize) -> (Vec<C64>, Vec<C64>) {
    let zero = C64::new(0.0, 0.0);
    // reflectors[k] holds v_k (length n - k) scaled so that H = I - v v†
    let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(n);
    for k in 0..n {
        let col = &a[k * n + k..(k + 1) * n];
        let xnorm = l2_norm(col);
        let alpha = col[0];
        if xnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let phase = if alpha.norm() == 0.0 { C64::new(1.0, 0.0) } else { alpha / alpha.norm() };
        let beta = -phase * xnorm;
        let mut v: Vec<C64> = col.to_vec();
        v[0] -= beta;
        let vnorm = l2_norm(&v);
        if vnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let scale = std::f64::consts::SQRT_2 / vnorm;
        for z in &mut v {
            *z *= scale;
        }
        a[k * n + k] = beta;
        for z in &mut a[k * n + k + 1..(k + 1) * n] {
            *z = zero;
        }
        for j in k + 1..n {
            let colj = &mut a[j * n + k..(j + 1) * n];
            let dot: C64 = v.iter().zip(colj.iter()).map(|(x, y)| x.conj() * y).sum();
            for (y, x) in colj.iter_mut().zip(&v) {
                *y -= x * dot;
            }
        }
        reflectors.push(v);
    }
    let mut q = vec![zero; n * n];
    for i in 0..n {
        q[i * n + i] = C64::new(1.0, 0.0);
    }
    for k in (0..n).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        for j in k..n {
            let colj = &mut q[j * n + k..(j + 1) * n];
            let dot: C64 = v.iter().zip(colj.iter()).map(|(x, y)| x.conj() * y).sum();
            if dot.re == 0.0 && dot.im == 0.0 {
                continue;
            }
            for (y, x) in colj.iter_mut().zip(v) {
                *y -= x * dot;
            }
        }
    }
    (q, a)
}
