//! Minimal dense complex linear algebra: just enough for the boundary
//! integral systems and the spectral quantities the indicators need.
//!
//! Everything here is deterministic (fixed pivoting order, fixed sweep
//! order, fixed power-iteration start), which keeps file outputs
//! byte-reproducible across runs.

use crate::{Error, Result};
use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// `self^H v` without forming the adjoint.
    pub fn adjoint_matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Complex64::ZERO; self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == Complex64::ZERO {
                    continue;
                }
                let src = other.row(l);
                let dst = out.row_mut(i);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value, by power iteration on `A^H A`.
    ///
    /// The start vector is fixed so repeated calls on the same matrix give
    /// the same value. Accuracy is limited by the gap between the leading
    /// singular values; the Rayleigh quotient converges even when the top
    /// value is degenerate (common for rotation-symmetric far fields).
    pub fn spectral_norm(&self) -> f64 {
        let n = self.cols;
        if n == 0 || self.rows == 0 {
            return 0.0;
        }
        // deterministic, unlikely to be orthogonal to the top subspace
        let mut v: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0, ((j + 1) as f64 * 0.7368).sin()))
            .collect();
        normalize(&mut v);
        let mut lambda = 0.0f64;
        for _ in 0..512 {
            let mut w = self.adjoint_matvec(&self.matvec(&v));
            let next = v
                .iter()
                .zip(&w)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>();
            let delta = (next - lambda).abs();
            lambda = next;
            normalize(&mut w);
            v = w;
            if delta <= 1e-15 * lambda.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        lambda.max(0.0).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v {
            *z /= n;
        }
    }
}

/// LU factorization with partial pivoting.
pub struct LuFactors {
    lu: CMatrix,
    perm: Vec<usize>,
    /// max |U_ii| / min |U_ii| — a cheap growth proxy, not a true condition
    /// number, but enough to catch a breakdown.
    pub pivot_ratio: f64,
}

impl LuFactors {
    pub fn new(a: &CMatrix) -> Result<LuFactors> {
        let n = a.rows();
        if n != a.cols() {
            return Err(Error::InvalidArgument("LU requires a square matrix".into()));
        }
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot = col;
            let mut best = lu[(col, col)].norm_sqr();
            for r in col + 1..n {
                let v = lu[(r, col)].norm_sqr();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Err(Error::Numerical(format!(
                    "singular matrix in LU at column {col}"
                )));
            }
            if pivot != col {
                perm.swap(col, pivot);
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
            }
            let inv = Complex64::ONE / lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] * inv;
                lu[(r, col)] = factor;
                if factor == Complex64::ZERO {
                    continue;
                }
                let (top, bottom) = lu.data.split_at_mut(r * n);
                let pivot_row = &top[col * n..col * n + n];
                let row = &mut bottom[..n];
                for j in col + 1..n {
                    row[j] -= factor * pivot_row[j];
                }
            }
        }
        let mut dmin = f64::INFINITY;
        let mut dmax: f64 = 0.0;
        for i in 0..n {
            let d = lu[(i, i)].norm();
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        let pivot_ratio = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
        if !(pivot_ratio.is_finite()) || pivot_ratio > 1e14 {
            return Err(Error::Numerical(format!(
                "ill-conditioned system (pivot ratio {pivot_ratio:.3e})"
            )));
        }
        Ok(LuFactors { lu, perm, pivot_ratio })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues in descending order with the matching
/// orthonormal eigenvectors as matrix columns.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::InvalidArgument(
            "eigendecomposition requires a square matrix".into(),
        ));
    }
    let mut h = a.clone();
    // enforce exact Hermitian symmetry so rotations stay consistent
    for i in 0..n {
        h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += h[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let hpq = h[(p, q)];
                if hpq.norm_sqr() <= (1e-17 * scale) * (1e-17 * scale) {
                    continue;
                }
                // unitary 2x2 diagonalization of [[a, b], [conj(b), d]]
                let a_ = h[(p, p)].re;
                let d_ = h[(q, q)].re;
                let b_abs = hpq.norm();
                let phase = hpq / b_abs;
                // zeroing angle with |theta| <= pi/4 keeps the cyclic sweep convergent
                let theta = if a_ == d_ {
                    core::f64::consts::FRAC_PI_4
                } else {
                    0.5 * (2.0 * b_abs / (a_ - d_)).atan()
                };
                let c = theta.cos();
                let s = theta.sin();
                // columns transform: new_p = c*p + s*phase^H*q, new_q = -s*phase*p + c*q
                for r in 0..n {
                    let hrp = h[(r, p)];
                    let hrq = h[(r, q)];
                    h[(r, p)] = hrp * c + hrq * phase.conj() * s;
                    h[(r, q)] = hrq * c - hrp * phase * s;
                }
                for col in 0..n {
                    let hpc = h[(p, col)];
                    let hqc = h[(q, col)];
                    h[(p, col)] = hpc * c + hqc * phase * s;
                    h[(q, col)] = hqc * c - hpc * phase.conj() * s;
                }
                h[(p, q)] = Complex64::new(0.0, 0.0);
                h[(q, p)] = Complex64::new(0.0, 0.0);
                h[(p, p)] = Complex64::new(h[(p, p)].re, 0.0);
                h[(q, q)] = Complex64::new(h[(q, q)].re, 0.0);
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c + vrq * phase.conj() * s;
                    v[(r, q)] = vrq * c - vrp * phase * s;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let eig: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| eig[j].partial_cmp(&eig[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Partial singular value decomposition via the Hermitian eigenproblem of
/// `A^H A`: singular values descending plus the left singular vectors for
/// every `sigma_j > rel_cutoff * sigma_1`.
pub struct PartialSvd {
    pub singular_values: Vec<f64>,
    /// columns are left singular vectors, one per retained singular value
    pub left: CMatrix,
}

pub fn partial_svd(a: &CMatrix, rel_cutoff: f64) -> Result<PartialSvd> {
    let gram = a.adjoint().matmul(a);
    let (lambda, v) = hermitian_eigen(&gram)?;
    let singular_values: Vec<f64> = lambda.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let sigma1 = singular_values.first().copied().unwrap_or(0.0);
    if sigma1 == 0.0 {
        return Err(Error::Numerical("zero matrix has no singular system".into()));
    }
    let kept = singular_values
        .iter()
        .take_while(|&&s| s > rel_cutoff * sigma1)
        .count();
    let mut left = CMatrix::zeros(a.rows(), kept);
    for j in 0..kept {
        let vj: Vec<Complex64> = (0..v.rows()).map(|r| v[(r, j)]).collect();
        let uj = a.matvec(&vj);
        for r in 0..a.rows() {
            left[(r, j)] = uj[r] / singular_values[j];
        }
    }
    Ok(PartialSvd {
        singular_values,
        left,
    })
}
