//! Incidence, adjacency, degree and weighting matrices of a directed network,
//! and the weighted Laplacian `L = H_o·B·Hᵀ`.

use num_complex::Complex64;

use crate::error::MatrixError;
use crate::linalg;
use crate::matrix::LabeledMatrix;
use crate::netmodel::Network;

/// Default tolerance for every Laplacian property check.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Vertex × edge incidence: `+1` at the head, `−1` at the tail.
pub fn incidence(net: &Network) -> LabeledMatrix {
    let mut h = LabeledMatrix::zeros(net.labels(), net.edge_labels());
    for (k, e) in net.edges().iter().enumerate() {
        h.set(e.head.0, k, 1.0);
        h.set(e.tail.0, k, -1.0);
    }
    h
}

/// `H_o`: the incidence matrix with every `−1` replaced by `0`.
pub fn out_variation(h: &LabeledMatrix) -> LabeledMatrix {
    map_entries(h, |v| v.max(0.0))
}

/// `H_i`: the incidence matrix with every `+1` replaced by `0`.
pub fn in_variation(h: &LabeledMatrix) -> LabeledMatrix {
    map_entries(h, |v| v.min(0.0))
}

fn map_entries(m: &LabeledMatrix, f: impl Fn(f64) -> f64) -> LabeledMatrix {
    let data = m.data().iter().map(|&v| f(v)).collect();
    LabeledMatrix::new(m.row_labels().to_vec(), m.col_labels().to_vec(), data)
        .expect("same shape, finite entries")
}

/// `B = diag{b_1, …, b_m}` in edge order.
pub fn weighting_matrix(net: &Network) -> LabeledMatrix {
    let mut b = LabeledMatrix::zeros(net.edge_labels(), net.edge_labels());
    for (k, e) in net.edges().iter().enumerate() {
        b.set(k, k, e.susceptance.get());
    }
    b
}

/// `[A]_ij = b_k` for the edge `i → j`.
pub fn adjacency(net: &Network) -> LabeledMatrix {
    let mut a = LabeledMatrix::zeros(net.labels(), net.labels());
    for e in net.edges() {
        a.set(e.head.0, e.tail.0, e.susceptance.get());
    }
    a
}

/// Diagonal out-degree matrix, `D_ii = Σ_j A_ij`.
pub fn degree(net: &Network) -> LabeledMatrix {
    let a = adjacency(net);
    let mut d = LabeledMatrix::zeros(net.labels(), net.labels());
    for i in 0..a.nrows() {
        d.set(i, i, a.row(i).iter().sum());
    }
    d
}

/// `L = H_o·B·Hᵀ`, computed literally as the triple product.
pub fn weighted_laplacian(net: &Network) -> LabeledMatrix {
    let h = incidence(net);
    let ho = out_variation(&h);
    let b = weighting_matrix(net);
    ho.matmul(&b)
        .and_then(|hb| hb.matmul(&h.transpose()))
        .expect("conformable by construction")
        .relabel(net.labels(), net.labels())
        .expect("square in vertex count")
}

/// `L_conv = D − A`.
pub fn conventional_laplacian(net: &Network) -> LabeledMatrix {
    degree(net).sub(&adjacency(net)).expect("same shape")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianReport {
    pub zero_row_sums: bool,
    pub sign_pattern_ok: bool,
    pub eigenvalues: Vec<Complex64>,
    pub nonneg_real_parts: bool,
    /// Labels of rows with a zero diagonal (sink rows).
    pub zero_diag_vertices: Vec<String>,
    pub max_row_sum: f64,
    pub tol: f64,
}

impl LaplacianReport {
    pub fn is_laplacian(&self) -> bool {
        self.zero_row_sums && self.sign_pattern_ok && self.nonneg_real_parts
    }
}

/// Checks the sign pattern, zero row sums and eigenvalue real parts of `l`.
///
/// A diagonal counts as zero when `|L_ii| ≤ tol`.
pub fn laplacian_report(l: &LabeledMatrix, tol: f64) -> Result<LaplacianReport, MatrixError> {
    if !l.is_square() {
        return Err(MatrixError::NotSquare { rows: l.nrows(), cols: l.ncols() });
    }
    let n = l.nrows();
    let mut sign_ok = true;
    let mut max_row_sum = 0.0_f64;
    let mut zero_diag = Vec::new();
    for i in 0..n {
        let row = l.row(i);
        for (j, &v) in row.iter().enumerate() {
            if (i == j && v < -tol) || (i != j && v > tol) {
                sign_ok = false;
            }
        }
        max_row_sum = max_row_sum.max(row.iter().sum::<f64>().abs());
        if row[i].abs() <= tol {
            zero_diag.push(l.row_labels()[i].clone());
        }
    }
    let eigenvalues = linalg::eigenvalues(n, l.data())
        .map_err(|_| MatrixError::Dimension("eigenvalue iteration did not converge".into()))?;
    let nonneg = eigenvalues.iter().all(|z| z.re >= -tol);
    Ok(LaplacianReport {
        zero_row_sums: max_row_sum <= tol,
        sign_pattern_ok: sign_ok,
        eigenvalues,
        nonneg_real_parts: nonneg,
        zero_diag_vertices: zero_diag,
        max_row_sum,
        tol,
    })
}
