//! Small dense kernels: LU with partial pivoting and a real-Schur (Francis
//! double-shift QR) eigenvalue solver.

use num_complex::Complex64;

/// Pivot magnitudes at or below `PIVOT_TOL · max|block|` count as zero.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singular {
    pub position: usize,
    pub pivot: f64,
}

/// LU factors of a square row-major matrix, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(n: usize, mut a: Vec<f64>) -> Result<Self, Singular> {
        assert_eq!(a.len(), n * n, "LU input must be n x n");
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let threshold = PIVOT_TOL * scale;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[i * n + k]))
                .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                .expect("non-empty column");
            if pivot.abs() <= threshold || scale == 0.0 {
                return Err(Singular { position: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A·X = B` for row-major `B` with `m` columns.
    pub fn solve_columns(&self, b: &[f64], m: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * m];
        let mut col = vec![0.0; n];
        for j in 0..m {
            for i in 0..n {
                col[i] = b[i * m + j];
            }
            for (i, v) in self.solve(&col).into_iter().enumerate() {
                out[i * m + j] = v;
            }
        }
        out
    }

    /// Solves `X·A = B` for row-major `B` with `m` rows, i.e. `Aᵀ·Xᵀ = Bᵀ`.
    pub fn solve_rows(&self, b: &[f64], m: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; m * n];
        for r in 0..m {
            let x = self.solve_transpose(&b[r * n..(r + 1) * n]);
            out[r * n..(r + 1) * n].copy_from_slice(&x);
        }
        out
    }

    fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        // Aᵀ = Uᵀ·Lᵀ·P, so solve Uᵀ·z = b, then Lᵀ·w = z, then x = Pᵀ·w.
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoConvergence;

/// All eigenvalues of a real square row-major matrix.
///
/// Reduces to upper Hessenberg form by stabilised elimination, then runs the
/// Francis double-shift QR iteration with exceptional shifts at iterations 10
/// and 20. Complex eigenvalues come out as conjugate pairs.
pub fn eigenvalues(n: usize, a: &[f64]) -> Result<Vec<Complex64>, NoConvergence> {
    assert_eq!(a.len(), n * n, "eigenvalue input must be n x n");
    let mut h = a.to_vec();
    hessenberg(n, &mut h);
    hqr(n, &mut h)
}

fn hessenberg(n: usize, a: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0_f64;
        let mut piv = m;
        for j in m..n {
            if a[at(j, m - 1)].abs() > x.abs() {
                x = a[at(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                a.swap(at(piv, j), at(m, j));
            }
            for j in 0..n {
                a.swap(at(j, piv), at(j, m));
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[at(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[at(i, m - 1)] = 0.0;
                    for j in m..n {
                        a[at(i, j)] -= y * a[at(m, j)];
                    }
                    for j in 0..n {
                        a[at(j, m)] += y * a[at(j, i)];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[at(i, j)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr(n: usize, a: &mut [f64]) -> Result<Vec<Complex64>, NoConvergence> {
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(w);
    }
    let ni = n as isize;
    let at = |i: isize, j: isize| (i * ni + j) as usize;
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..ni {
        for j in (i - 1).max(0)..ni {
            anorm += a[at(i, j)].abs();
        }
    }
    let mut nn = ni - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = a[at(l - 1, l - 1)].abs() + a[at(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[at(l, l - 1)].abs() <= eps * s {
                    a[at(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[at(nn, nn)];
            if l == nn {
                w[nn as usize] = Complex64::new(x + t, 0.0);
                nn -= 1;
            } else {
                y = a[at(nn - 1, nn - 1)];
                let mut ww = a[at(nn, nn - 1)] * a[at(nn - 1, nn)];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + ww;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        w[(nn - 1) as usize] = Complex64::new(x + z, 0.0);
                        w[nn as usize] = Complex64::new(x + z, 0.0);
                        if z != 0.0 {
                            w[nn as usize] = Complex64::new(x - ww / z, 0.0);
                        }
                    } else {
                        w[nn as usize] = Complex64::new(x + p, -z);
                        w[(nn - 1) as usize] = Complex64::new(x + p, z);
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return Err(NoConvergence);
                    }
                    if its == 10 || its == 20 {
                        t += x;
                        for i in 0..=nn {
                            a[at(i, i)] -= x;
                        }
                        let s = a[at(nn, nn - 1)].abs() + a[at(nn - 1, nn - 2)].abs();
                        x = 0.75 * s;
                        y = x;
                        ww = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[at(m, m)];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - ww) / a[at(m + 1, m)] + a[at(m, m + 1)];
                        q = a[at(m + 1, m + 1)] - z - rr - ss;
                        r = a[at(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[at(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (a[at(m - 1, m - 1)].abs() + z.abs() + a[at(m + 1, m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        a[at(i + 2, i)] = 0.0;
                        if i != m {
                            a[at(i + 2, i - 1)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[at(k, k - 1)];
                            q = a[at(k + 1, k - 1)];
                            r = 0.0;
                            if k + 1 != nn {
                                r = a[at(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[at(k, k - 1)] = -a[at(k, k - 1)];
                                }
                            } else {
                                a[at(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[at(k, j)] + q * a[at(k + 1, j)];
                                if k + 1 != nn {
                                    p += r * a[at(k + 2, j)];
                                    a[at(k + 2, j)] -= p * z;
                                }
                                a[at(k + 1, j)] -= p * y;
                                a[at(k, j)] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[at(i, k)] + y * a[at(i, k + 1)];
                                if k + 1 != nn {
                                    p += z * a[at(i, k + 2)];
                                    a[at(i, k + 2)] -= p * r;
                                }
                                a[at(i, k + 1)] -= p * q;
                                a[at(i, k)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(w)
}
