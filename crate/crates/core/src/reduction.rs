//! Kron reduction: Schur complements of weighted Laplacians, block and
//! one-vertex-at-a-time elimination, the accompanying matrix, and recovery of
//! a directed network from a (reduced) Laplacian.

use std::fmt::Write as _;

use crate::connectivity::{connectivity_class, unreachable_from_outside, ConnectivityClass, VertexPartition};
use crate::error::{MatrixError, PartitionError, ReductionError};
use crate::graph_algebra::{weighted_laplacian, DEFAULT_TOL};
use crate::linalg::{Lu, PIVOT_TOL};
use crate::matrix::LabeledMatrix;
use crate::netmodel::{Network, NetworkBuilder, Susceptance, VertexRole};

/// `M/P` together with the accompanying matrix `−M[K,E]·M[E,E]⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurParts {
    pub reduced: LabeledMatrix,
    pub accompanying: LabeledMatrix,
}

/// Schur complement of `m` with respect to the rows/columns in `keep`, plus
/// the accompanying matrix, from a single LU factorisation of the eliminated
/// block.
pub fn schur_parts(m: &LabeledMatrix, keep: &[usize]) -> Result<SchurParts, ReductionError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare { rows: m.nrows(), cols: m.ncols() }.into());
    }
    let n = m.nrows();
    let mut kept = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(MatrixError::Dimension(format!("index {k} out of range for {n}x{n}")).into());
        }
        kept[k] = true;
    }
    let (k_idx, e_idx): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| kept[i]);
    if k_idx.is_empty() || e_idx.is_empty() {
        return Err(PartitionError::NotProper.into());
    }
    let block = m.select(&e_idx, &e_idx);
    let lu = Lu::factor(e_idx.len(), block.data().to_vec())
        .map_err(|s| ReductionError::SingularBlock { position: s.position, pivot: s.pivot })?;
    let m_ke = m.select(&k_idx, &e_idx);
    let m_ek = m.select(&e_idx, &k_idx);

    // X = P⁻¹·M[E,K]
    let x = lu.solve_columns(m_ek.data(), k_idx.len());
    let mut reduced = m.select(&k_idx, &k_idx);
    let (nk, ne) = (k_idx.len(), e_idx.len());
    for i in 0..nk {
        for j in 0..nk {
            let s: f64 = (0..ne).map(|p| m_ke.get(i, p) * x[p * nk + j]).sum();
            reduced.set(i, j, reduced.get(i, j) - s);
        }
    }
    // Y·P = M[K,E]
    let y = lu.solve_rows(m_ke.data(), nk);
    let accompanying = LabeledMatrix::new(
        m_ke.row_labels().to_vec(),
        m_ke.col_labels().to_vec(),
        y.into_iter().map(|v| -v).collect(),
    )?;
    Ok(SchurParts { reduced, accompanying })
}

/// `M[K,K] − M[K,E]·M[E,E]⁻¹·M[E,K]` for `K = keep`, rows and columns in
/// ascending position order.
pub fn schur_complement(m: &LabeledMatrix, keep: &[usize]) -> Result<LabeledMatrix, ReductionError> {
    schur_parts(m, keep).map(|p| p.reduced)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceCheck {
    /// Reachability precheck before any arithmetic.
    Precheck,
    /// Skip the precheck and let the LU factorisation decide.
    DirectLu,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReduceOptions {
    pub existence: ExistenceCheck,
    /// Zero threshold used when restoring the reduced network.
    pub tol: f64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { existence: ExistenceCheck::Precheck, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    /// `L_red`, `|V_α| × |V_α|`.
    pub reduced: LabeledMatrix,
    /// `L_ac`, `|V_α| × |V_α^c|`.
    pub accompanying: LabeledMatrix,
    pub retained: Vec<String>,
    pub eliminated: Vec<String>,
    pub reduced_net: Network,
    pub existence: ExistenceCheck,
}

impl ReductionResult {
    /// Key/value summary of the reduction.
    pub fn summary(&self, source: &Network) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "network={}", source.name());
        let _ = writeln!(out, "vertices={}", source.vertex_count());
        let _ = writeln!(out, "retained={}", self.retained.join(","));
        let _ = writeln!(out, "eliminated={}", self.eliminated.join(","));
        let check = match self.existence {
            ExistenceCheck::Precheck => "reachable-subset",
            ExistenceCheck::DirectLu => "lu-only",
        };
        let _ = writeln!(out, "existence_check={check}");
        let _ = writeln!(out, "existence=ok");
        let _ = writeln!(out, "reduced_edges={}", self.reduced_net.edge_count());
        out
    }
}

/// Kron-reduces `net` onto the retained vertices of `part`.
pub fn kron_reduce(
    net: &Network,
    part: &VertexPartition,
    opts: ReduceOptions,
) -> Result<ReductionResult, ReductionError> {
    let retained = part.retained()?;
    let eliminated = part.eliminated()?;
    if let Some(&b) = eliminated.iter().find(|&&v| part.is_boundary(v)) {
        return Err(PartitionError::BoundaryElimination(net.label(b).to_owned()).into());
    }
    let l = weighted_laplacian(net);
    let (reduced, accompanying) = if eliminated.is_empty() {
        (l.clone(), LabeledMatrix::zeros(net.labels(), Vec::new()))
    } else {
        if opts.existence == ExistenceCheck::Precheck {
            let stuck = unreachable_from_outside(net, retained);
            if !stuck.is_empty() {
                return Err(ReductionError::NotReducible {
                    unreachable: stuck.iter().map(|&v| net.label(v).to_owned()).collect(),
                });
            }
        }
        let keep: Vec<usize> = retained.iter().map(|v| v.0).collect();
        let parts = schur_parts(&l, &keep)?;
        (parts.reduced, parts.accompanying)
    };
    let restored = restore_graph(&reduced, opts.tol)?;
    let reduced_net = restored.with_topological_roles(Some(net)).renamed(format!("{}-reduced", net.name()));
    Ok(ReductionResult {
        reduced,
        accompanying,
        retained: retained.iter().map(|&v| net.label(v).to_owned()).collect(),
        eliminated: eliminated.iter().map(|&v| net.label(v).to_owned()).collect(),
        reduced_net,
        existence: opts.existence,
    })
}

/// Eliminates the vertices of `order` one at a time from the Laplacian of `net`.
pub fn iterative_kron<S: AsRef<str>>(net: &Network, order: &[S]) -> Result<LabeledMatrix, ReductionError> {
    iterative_schur(&weighted_laplacian(net), order)
}

/// One-at-a-time Schur complements of `m`, eliminating the rows/columns
/// labelled by `order`. A pivot with `|p| ≤ 1e-12 · max|m|` is a zero pivot.
pub fn iterative_schur<S: AsRef<str>>(m: &LabeledMatrix, order: &[S]) -> Result<LabeledMatrix, ReductionError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare { rows: m.nrows(), cols: m.ncols() }.into());
    }
    let threshold = PIVOT_TOL * m.max_abs();
    let mut cur = m.clone();
    for (step, label) in order.iter().enumerate() {
        let label = label.as_ref();
        let k = cur
            .row_index(label)
            .ok_or_else(|| PartitionError::UnknownVertex(label.to_owned()))?;
        let pivot = cur.get(k, k);
        if pivot.abs() <= threshold || pivot == 0.0 {
            return Err(ReductionError::ZeroPivot { step: step + 1, vertex: label.to_owned() });
        }
        let keep: Vec<usize> = (0..cur.nrows()).filter(|&i| i != k).collect();
        let mut next = cur.select(&keep, &keep);
        for (a, &i) in keep.iter().enumerate() {
            let f = cur.get(i, k) / pivot;
            if f == 0.0 {
                continue;
            }
            for (b, &j) in keep.iter().enumerate() {
                next.set(a, b, next.get(a, b) - f * cur.get(k, j));
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Recovers the directed weighted graph whose Laplacian is `l`: one edge
/// `i → j` of weight `−L_ij` per off-diagonal entry below `−tol`. Edges are
/// emitted in row-major order; roles follow from topology.
pub fn restore_graph(l: &LabeledMatrix, tol: f64) -> Result<Network, ReductionError> {
    let not = |what: &str| ReductionError::NotALaplacian(what.to_owned());
    if !l.is_square() {
        return Err(not("not square"));
    }
    if l.row_labels() != l.col_labels() {
        return Err(not("row and column labels differ"));
    }
    let n = l.nrows();
    for i in 0..n {
        for j in 0..n {
            let v = l.get(i, j);
            if (i == j && v < -tol) || (i != j && v > tol) {
                return Err(not("sign pattern"));
            }
        }
    }
    for i in 0..n {
        if l.row(i).iter().sum::<f64>().abs() > tol {
            return Err(not("zero row sums"));
        }
    }
    let mut b = NetworkBuilder::new("restored");
    for label in l.row_labels() {
        b.add_vertex(label, VertexRole::INTERIOR)
            .map_err(|e| ReductionError::NotALaplacian(format!("labels: {e}")))?;
    }
    for i in 0..n {
        for j in 0..n {
            let v = l.get(i, j);
            if i != j && v < -tol {
                let w = Susceptance::new(-v).expect("strictly positive");
                b.add_edge(&l.row_labels()[i], &l.col_labels()[j], w).expect("one edge per entry");
            }
        }
    }
    Ok(b.build().with_topological_roles(None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassPreservation {
    pub before: ConnectivityClass,
    pub after: ConnectivityClass,
}

impl ClassPreservation {
    /// Strongly connected stays strongly connected; quasi stays quasi.
    pub fn holds(&self) -> bool {
        let strong_ok = self.before != ConnectivityClass::StronglyConnected
            || self.after == ConnectivityClass::StronglyConnected;
        let quasi_ok = !self.before.is_quasi() || self.after.is_quasi();
        strong_ok && quasi_ok
    }
}

pub fn preserved_class_check(before: &Network, after: &Network) -> ClassPreservation {
    ClassPreservation { before: connectivity_class(before), after: connectivity_class(after) }
}
