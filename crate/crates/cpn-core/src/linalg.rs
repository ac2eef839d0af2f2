//! Small dense matrices and the handful of factorizations the crate needs.
//!
//! Everything here targets sizes below ~20, where a textbook cyclic Jacobi
//! sweep and pivoted elimination are entirely adequate; no external solver
//! is pulled in.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::math;

/// Dense square real matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    size: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(size: usize) -> Self {
        Mat {
            size,
            data: vec![0.0; size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Mat::zeros(size);
        for i in 0..size {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.size + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.size + c] = v;
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.size + c] += v;
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            size: self.size,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.size, other.size);
        Mat {
            size: self.size,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.size, other.size);
        Mat {
            size: self.size,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.size, other.size);
        let n = self.size;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.add_to(i, j, a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.size;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.size).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    /// Largest `|A[i][j] + A[j][i]|`; zero for an antisymmetric matrix.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.size {
            for j in 0..self.size {
                worst = worst.max(math::abs(self.get(i, j) + self.get(j, i)));
            }
        }
        worst
    }

    /// Numerical rank by Gaussian elimination with full pivoting.
    ///
    /// A pivot counts while it exceeds `rel_tol` times the largest pivot
    /// encountered (or `rel_tol` itself for an all-zero matrix).
    pub fn rank(&self, rel_tol: f64) -> usize {
        let n = self.size;
        let mut a = self.clone();
        let mut rank = 0;
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        let mut first_pivot = 0.0;
        while rank < n {
            // full pivot search over the remaining block
            let mut best = 0.0;
            let (mut br, mut bc) = (rank, rank);
            for (ri, &r) in rows.iter().enumerate().skip(rank) {
                for (ci, &c) in cols.iter().enumerate().skip(rank) {
                    let v = math::abs(a.get(r, c));
                    if v > best {
                        best = v;
                        br = ri;
                        bc = ci;
                    }
                }
            }
            if rank == 0 {
                first_pivot = best;
            }
            let threshold = if first_pivot > 0.0 {
                rel_tol * first_pivot
            } else {
                rel_tol
            };
            if best <= threshold {
                break;
            }
            rows.swap(rank, br);
            cols.swap(rank, bc);
            let (pr, pc) = (rows[rank], cols[rank]);
            let pivot = a.get(pr, pc);
            for &r in rows.iter().skip(rank + 1) {
                let factor = a.get(r, pc) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for &c in cols.iter().skip(rank) {
                    let v = a.get(r, c) - factor * a.get(pr, c);
                    a.set(r, c, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Dense square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    size: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(size: usize) -> Self {
        CMat {
            size,
            data: vec![Complex64::new(0.0, 0.0); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = CMat::zeros(size);
        for i in 0..size {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.size + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.size + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.size).map(|r| self.get(r, c)).collect()
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.size, other.size);
        let n = self.size;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        let n = self.size;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.size, other.size);
        CMat {
            size: self.size,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest deviation of `A* A` from the identity.
    pub fn unitary_defect(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        gram.sub(&CMat::identity(self.size)).max_abs()
    }

    /// Largest `|A[i][j] + conj(A[j][i])|`; zero for a skew-Hermitian matrix.
    pub fn skew_hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.size {
            for j in 0..self.size {
                worst = worst.max((self.get(i, j) + self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Hermitian principal submatrix on the given (sorted) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> CMat {
        let m = idx.len();
        let mut out = CMat::zeros(m);
        for (r, &ir) in idx.iter().enumerate() {
            for (c, &ic) in idx.iter().enumerate() {
                out.set(r, c, self.get(ir, ic));
            }
        }
        out
    }

    /// Embed a Hermitian matrix `X + iY` as the real symmetric
    /// `[[X, -Y], [Y, X]]`; every eigenvalue shows up twice.
    pub fn hermitian_real_embedding(&self) -> Mat {
        let m = self.size;
        let mut out = Mat::zeros(2 * m);
        for i in 0..m {
            for j in 0..m {
                let v = self.get(i, j);
                out.set(i, j, v.re);
                out.set(i, j + m, -v.im);
                out.set(i + m, j, v.im);
                out.set(i + m, j + m, v.re);
            }
        }
        out
    }
}

/// Eigensolver failure: the cyclic Jacobi sweep did not reach the
/// off-diagonal tolerance within the sweep budget.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenNoConvergence {
    pub off_diagonal: f64,
    pub sweeps: usize,
}

impl fmt::Display for EigenNoConvergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "jacobi eigensolver did not converge after {} sweeps (off-diagonal {:.3e})",
            self.sweeps, self.off_diagonal
        )
    }
}

impl core::error::Error for EigenNoConvergence {}

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_OFF_TOL: f64 = 1e-12;

/// Eigenvalues of a real symmetric matrix, sorted descending.
///
/// Cyclic Jacobi rotations; fine for the sizes this crate uses.
pub fn symmetric_eigenvalues(a: &Mat) -> Result<Vec<f64>, EigenNoConvergence> {
    let n = a.size();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = a.clone();
    let scale = m.max_abs().max(1.0);
    let tol = JACOBI_OFF_TOL * scale;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(math::abs(m.get(p, q)));
            }
        }
        if off <= tol {
            let mut eigs: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
            eigs.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
            return Ok(eigs);
        }
        let _ = sweep;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if math::abs(apq) <= tol * 1e-3 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // smaller-root tangent keeps the rotation angle below pi/4
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut off: f64 = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            off = off.max(math::abs(m.get(p, q)));
        }
    }
    Err(EigenNoConvergence {
        off_diagonal: off,
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// Uses the real symmetric embedding, in which every eigenvalue is doubled.
pub fn hermitian_eigenvalues(h: &CMat) -> Result<Vec<f64>, EigenNoConvergence> {
    let doubled = symmetric_eigenvalues(&h.hermitian_real_embedding())?;
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Singular values of a rectangular row-major `rows x cols` matrix,
/// sorted descending, via the Gram matrix of the smaller side.
pub fn singular_values(
    data: &[f64],
    rows: usize,
    cols: usize,
) -> Result<Vec<f64>, EigenNoConvergence> {
    debug_assert_eq!(data.len(), rows * cols);
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut gram = Mat::zeros(k);
    if rows <= cols {
        for i in 0..rows {
            for j in 0..rows {
                let mut s = 0.0;
                for c in 0..cols {
                    s += data[i * cols + c] * data[j * cols + c];
                }
                gram.set(i, j, s);
            }
        }
    } else {
        for i in 0..cols {
            for j in 0..cols {
                let mut s = 0.0;
                for r in 0..rows {
                    s += data[r * cols + i] * data[r * cols + j];
                }
                gram.set(i, j, s);
            }
        }
    }
    let eigs = symmetric_eigenvalues(&gram)?;
    Ok(eigs
        .into_iter()
        .map(|e| math::sqrt(e.max(0.0)))
        .collect())
}

/// Numerical rank from singular values: count above `rel_tol * sigma_max`.
pub fn rank_from_singular_values(sigma: &[f64], rel_tol: f64) -> usize {
    match sigma.first() {
        None => 0,
        Some(&top) if top <= 0.0 => 0,
        Some(&top) => sigma.iter().filter(|&&s| s > rel_tol * top).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jacobi_matches_hand_2x2() {
        // eigenvalues of [[2,1],[1,2]] are 3 and 1
        let mut m = Mat::zeros(2);
        m.set(0, 0, 2.0);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        m.set(1, 1, 2.0);
        let e = symmetric_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(e[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_matches_characteristic_roots_3x3() {
        // A = diag(1,2,3) conjugated by a rotation has the same spectrum.
        let c = math::cos(0.7);
        let s = math::sin(0.7);
        let mut r = Mat::identity(3);
        r.set(0, 0, c);
        r.set(0, 1, -s);
        r.set(1, 0, s);
        r.set(1, 1, c);
        let mut d = Mat::zeros(3);
        d.set(0, 0, 1.0);
        d.set(1, 1, 2.0);
        d.set(2, 2, 3.0);
        let a = r.matmul(&d).matmul(&r.transpose());
        let e = symmetric_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(e[0], 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e[1], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e[2], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn hermitian_eigenvalues_rank_one() {
        // lambda * v v^* has spectrum {lambda * |v|^2, 0}
        let v = [Complex64::new(0.6, 0.3), Complex64::new(-0.2, 0.7)];
        let mut h = CMat::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                h.set(i, j, v[i] * v[j].conj());
            }
        }
        let e = hermitian_eigenvalues(&h).unwrap();
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(e[0], norm2, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_detects_dependent_rows() {
        let mut m = Mat::zeros(3);
        // rows: (1,2,3), (2,4,6), (0,1,0) -> rank 2
        for (j, v) in [1.0, 2.0, 3.0].iter().enumerate() {
            m.set(0, j, *v);
            m.set(1, j, 2.0 * *v);
        }
        m.set(2, 1, 1.0);
        assert_eq!(m.rank(1e-10), 2);
        assert_eq!(Mat::identity(4).rank(1e-10), 4);
        assert_eq!(Mat::zeros(3).rank(1e-10), 0);
    }

    #[test]
    fn singular_values_match_rank() {
        // 2x3 matrix with dependent rows
        let data = [1.0, 0.0, 2.0, 2.0, 0.0, 4.0];
        let s = singular_values(&data, 2, 3).unwrap();
        assert_eq!(rank_from_singular_values(&s, 1e-8), 1);
    }
}
