//! Haar averages of products of traces of words in `U`, `U†` and fixed operators.
//!
//! For each pair of permutations `(P, P')` the Weingarten deltas glue the
//! fixed operators into closed loops; each loop contributes the trace of the
//! ordered product of its operators and each empty loop a factor `N`.

use crate::error::{input, QfiError, Result};
use crate::linalg::{ComplexMatrix, UnitaryMatrix, C64};

use super::{permutations, weingarten_table};

/// Largest degree accepted by [`average_trace_product`].
pub const MAX_TRACE_DEGREE: usize = 3;

#[derive(Debug, Clone)]
pub enum Factor {
    U,
    UDag,
    Op(ComplexMatrix),
}

/// One trace `Tr(F_1 F_2 ... F_k)`.
#[derive(Debug, Clone, Default)]
pub struct TraceGroup(pub Vec<Factor>);

/// Product of traces, `Tr(word_1) Tr(word_2) ...`.
#[derive(Debug, Clone, Default)]
pub struct TraceProductSpec {
    pub groups: Vec<TraceGroup>,
}

impl TraceProductSpec {
    pub fn new(groups: Vec<Vec<Factor>>) -> Self {
        Self { groups: groups.into_iter().map(TraceGroup).collect() }
    }

    fn factors(&self) -> impl Iterator<Item = &Factor> {
        self.groups.iter().flat_map(|g| g.0.iter())
    }

    pub fn u_count(&self) -> usize {
        self.factors().filter(|f| matches!(f, Factor::U)).count()
    }

    pub fn u_dag_count(&self) -> usize {
        self.factors().filter(|f| matches!(f, Factor::UDag)).count()
    }

    /// The product of traces for one concrete unitary.
    pub fn evaluate_with(&self, u: &UnitaryMatrix) -> Result<C64> {
        let n = u.dim();
        self.check_operators(n)?;
        let u_dag = u.dagger();
        let mut total = C64::new(1.0, 0.0);
        for group in &self.groups {
            let mut acc = ComplexMatrix::identity(n);
            for f in &group.0 {
                let m = match f {
                    Factor::U => u.matrix(),
                    Factor::UDag => u_dag.matrix(),
                    Factor::Op(a) => a,
                };
                acc = acc.matmul_unchecked(m);
            }
            total *= acc.trace();
        }
        Ok(total)
    }

    fn check_operators(&self, n: usize) -> Result<()> {
        for f in self.factors() {
            if let Factor::Op(a) = f {
                if a.rows() != n || a.cols() != n {
                    return input(format!(
                        "operator is {}x{}, expected {n}x{n}",
                        a.rows(),
                        a.cols()
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Ensemble average over Haar `U(n)` of the trace product.
///
/// Returns exactly zero without any work when the numbers of `U` and `U†`
/// slots differ.
pub fn average_trace_product(spec: &TraceProductSpec, n: usize) -> Result<C64> {
    if n == 0 {
        return input("dimension must be at least 1");
    }
    spec.check_operators(n)?;
    let t = spec.u_count();
    if t != spec.u_dag_count() {
        return Ok(C64::new(0.0, 0.0));
    }
    if t > MAX_TRACE_DEGREE {
        return Err(QfiError::Capability(format!(
            "trace products are evaluated up to degree {MAX_TRACE_DEGREE}, got {t}"
        )));
    }
    let layout = Layout::new(spec);
    if t == 0 {
        return Ok(layout.contract(&[], &[], n));
    }
    let table = weingarten_table(t, n)?;
    let perms = permutations(t);
    let mut total = C64::new(0.0, 0.0);
    for p in &perms {
        let p_inv = p.inverse();
        for p2 in &perms {
            let wg = table.of_permutation(&p_inv.compose(p2));
            if wg == 0.0 {
                continue;
            }
            total += layout.contract(p.images(), p2.images(), n) * wg;
        }
    }
    Ok(total)
}

/// Index bookkeeping: every factor has a row edge and a column edge.
struct Layout<'a> {
    edges: usize,
    /// `(row_edge, col_edge)` of each `U` slot in order of appearance.
    u_slots: Vec<(usize, usize)>,
    u_dag_slots: Vec<(usize, usize)>,
    ops: Vec<(usize, usize, &'a ComplexMatrix)>,
    /// Groups with no factors at all, each `Tr(I) = N`.
    empty_groups: usize,
}

impl<'a> Layout<'a> {
    fn new(spec: &'a TraceProductSpec) -> Self {
        let mut edges = 0;
        let mut u_slots = Vec::new();
        let mut u_dag_slots = Vec::new();
        let mut ops = Vec::new();
        let mut empty_groups = 0;
        for group in &spec.groups {
            let k = group.0.len();
            if k == 0 {
                empty_groups += 1;
                continue;
            }
            // edge j joins factor j (its column) to factor j+1 (its row)
            for (j, f) in group.0.iter().enumerate() {
                let row = edges + (j + k - 1) % k;
                let col = edges + j;
                match f {
                    Factor::U => u_slots.push((row, col)),
                    Factor::UDag => u_dag_slots.push((row, col)),
                    Factor::Op(a) => ops.push((row, col, a)),
                }
            }
            edges += k;
        }
        Self { edges, u_slots, u_dag_slots, ops, empty_groups }
    }

    /// Contraction value for `δ(a_ξ, α_{P(ξ)}) δ(b_ξ, β_{P'(ξ)})`.
    fn contract(&self, p: &[usize], p2: &[usize], n: usize) -> C64 {
        let mut uf = UnionFind::new(self.edges);
        for (xi, &(row, col)) in self.u_slots.iter().enumerate() {
            // U†_{ij} = conj(U_{ji}): α is the U† column, β its row
            let (_, dag_col) = self.u_dag_slots[p[xi]];
            let (dag_row, _) = self.u_dag_slots[p2[xi]];
            uf.union(row, dag_col);
            uf.union(col, dag_row);
        }
        let mut consumer = vec![usize::MAX; self.edges];
        let mut class_has_op = vec![false; self.edges];
        for (i, &(row, col, _)) in self.ops.iter().enumerate() {
            let r = uf.find(row);
            debug_assert_eq!(consumer[r], usize::MAX, "each loop segment has one entry point");
            consumer[r] = i;
            class_has_op[r] = true;
            class_has_op[uf.find(col)] = true;
        }
        let nf = n as f64;
        let mut value = C64::new(nf.powi(self.empty_groups as i32), 0.0);
        for e in 0..self.edges {
            if uf.find(e) == e && !class_has_op[e] {
                value *= nf;
            }
        }
        let mut visited = vec![false; self.ops.len()];
        for start in 0..self.ops.len() {
            if visited[start] {
                continue;
            }
            let mut acc = self.ops[start].2.clone();
            visited[start] = true;
            let mut next = consumer[uf.find(self.ops[start].1)];
            while next != start {
                visited[next] = true;
                acc = acc.matmul_unchecked(self.ops[next].2);
                next = consumer[uf.find(self.ops[next].1)];
            }
            value *= acc.trace();
        }
        value
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
