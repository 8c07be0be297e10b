#![allow(dead_code)]

use dckron_core::matrix::LabeledMatrix;
use dckron_core::netmodel::{parse_network, Network, NetworkBuilder, Susceptance, VertexRole};
use num_rational::Ratio;
use rand::Rng;

pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn load(text: &str) -> Network {
    parse_network(text).expect("test network parses").network
}

pub fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// A directed graph on `n` vertices given as (head, tail, weight) triples;
/// vertex `i` is labelled `i + 1`.
pub fn network(n: usize, edges: &[(usize, usize, f64)]) -> Network {
    let mut b = NetworkBuilder::new("g");
    for i in 0..n {
        b.add_vertex(&(i + 1).to_string(), VertexRole::INTERIOR).unwrap();
    }
    for &(h, t, w) in edges {
        b.add_edge(&(h + 1).to_string(), &(t + 1).to_string(), Susceptance::new(w).unwrap()).unwrap();
    }
    b.build()
}

/// Ordered pairs `(i, j)`, `i ≠ j`, in a fixed order; bit `k` of an edge
/// mask selects pair `k`.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect()
}

pub fn mask_edges(n: usize, mask: u64) -> Vec<(usize, usize)> {
    pairs(n).into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, p)| p).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative edge mask per isomorphism class of directed graphs on
/// `n` vertices: the masks that are minimal over all vertex relabellings.
pub fn isomorphism_class_reps(n: usize) -> Vec<u64> {
    let pairs = pairs(n);
    let m = pairs.len();
    let mut index = vec![vec![usize::MAX; n]; n];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        index[i][j] = k;
    }
    let perms = permutations(n);
    // target bit of pair k under each permutation
    let maps: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(i, j)| index[p[i]][p[j]]).collect())
        .collect();
    (0..1u64 << m)
        .filter(|&mask| {
            maps.iter().all(|map| {
                let mut image = 0u64;
                for (k, &t) in map.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        image |= 1 << t;
                    }
                }
                image >= mask
            })
        })
        .collect()
}

/// Random directed graph with edge probability `p` and weights drawn by `w`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, mut w: impl FnMut(&mut R) -> f64) -> Network {
    let mut edges = Vec::new();
    for (i, j) in pairs(n) {
        if rng.gen_bool(p) {
            edges.push((i, j, w(rng)));
        }
    }
    network(n, &edges)
}

/// Vertices that reach some vertex of `target`, by a forward search from each
/// vertex separately.
pub fn reaches_set(net: &Network, target: &[bool]) -> Vec<bool> {
    (0..net.vertex_count())
        .map(|s| {
            let mut seen = vec![false; net.vertex_count()];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                if target[v] {
                    return true;
                }
                for e in net.edges().iter().filter(|e| e.head.0 == v) {
                    if !seen[e.tail.0] {
                        seen[e.tail.0] = true;
                        stack.push(e.tail.0);
                    }
                }
            }
            false
        })
        .collect()
}

/// `reach[u][v]`: a directed path of length ≥ 0 from `u` to `v`
/// (Floyd–Warshall closure over the edge list).
pub fn reachability(net: &Network) -> Vec<Vec<bool>> {
    let n = net.vertex_count();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in net.edges() {
        r[e.head.0][e.tail.0] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Exact Laplacian `D − A` over the rationals from integer weights.
pub fn exact_laplacian(n: usize, edges: &[(usize, usize, i128)]) -> Vec<Vec<Q>> {
    let mut l = vec![vec![q(0); n]; n];
    for &(h, t, w) in edges {
        l[h][t] -= q(w);
        l[h][h] += q(w);
    }
    l
}

/// Exact Schur complement by Gauss–Jordan elimination of the eliminated
/// block; `None` when that block is singular.
pub fn exact_schur(m: &[Vec<Q>], keep: &[usize]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let elim: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let (ne, nk) = (elim.len(), keep.len());
    // [P | Q] → [I | P⁻¹Q]
    let mut aug: Vec<Vec<Q>> = elim
        .iter()
        .map(|&i| elim.iter().chain(keep.iter()).map(|&j| m[i][j]).collect())
        .collect();
    for c in 0..ne {
        let p = (c..ne).find(|&r| aug[r][c] != q(0))?;
        aug.swap(c, p);
        let pivot = aug[c][c];
        for v in aug[c].iter_mut() {
            *v /= pivot;
        }
        for r in 0..ne {
            if r != c && aug[r][c] != q(0) {
                let f = aug[r][c];
                for k in 0..ne + nk {
                    let sub = f * aug[c][k];
                    aug[r][k] -= sub;
                }
            }
        }
    }
    Some(
        keep.iter()
            .map(|&i| {
                (0..nk)
                    .map(|b| {
                        let mut v = m[i][keep[b]];
                        for (p, &e) in elim.iter().enumerate() {
                            v -= m[i][e] * aug[p][ne + b];
                        }
                        v
                    })
                    .collect()
            })
            .collect(),
    )
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn max_diff(m: &LabeledMatrix, exact: &[Vec<Q>]) -> f64 {
    let mut d = 0.0_f64;
    for (i, row) in exact.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            d = d.max((m.get(i, j) - to_f64(v)).abs());
        }
    }
    d
}

/// Roots of the characteristic polynomial: Faddeev–LeVerrier coefficients,
/// then Durand–Kerner iteration.
pub fn charpoly_roots(n: usize, a: &[f64]) -> Vec<num_complex::Complex64> {
    use num_complex::Complex64 as C;
    let mul = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[i * n + j] += x[i * n + k] * y[k * n + j];
                }
            }
        }
        out
    };
    // coefficients c[k] of λ^(n−k), c[0] = 1
    let mut c = vec![1.0];
    let mut mk = vec![0.0; n * n];
    for k in 1..=n {
        let mut next = mul(a, &mk);
        for i in 0..n {
            next[i * n + i] += c[k - 1];
        }
        mk = next;
        let am = mul(a, &mk);
        let trace: f64 = (0..n).map(|i| am[i * n + i]).sum();
        c.push(-trace / k as f64);
    }
    let eval = |z: C| c.iter().fold(C::new(0.0, 0.0), |acc, &ck| acc * z + ck);
    let mut roots: Vec<C> = (0..n).map(|k| C::new(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..2000 {
        let prev = roots.clone();
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(C::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
        if roots.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-15) {
            break;
        }
    }
    roots
}

/// Greedy nearest matching of two eigenvalue multisets; largest distance.
pub fn multiset_distance(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}
