//! Dense complex matrices for the small dimensions this crate works in.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

/// Complex scalar used for every amplitude and matrix entry.
pub type ComplexScalar = Complex64;

pub const ZERO: ComplexScalar = Complex64::new(0.0, 0.0);
pub const ONE: ComplexScalar = Complex64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<ComplexScalar>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from rows. Returns `None` unless the rows form a
    /// non-empty square table.
    pub fn from_rows(rows: &[Vec<ComplexScalar>]) -> Option<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Matrix { dim, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = ComplexScalar::new(d, 0.0);
        }
        m
    }

    /// |v⟩⟨v|
    pub fn outer(v: &[ComplexScalar]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<ComplexScalar>> {
        self.data.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum()).collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: ComplexScalar) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn trace(&self) -> ComplexScalar {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Matrix) -> ComplexScalar {
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of the commutator `[self, other]`.
    pub fn commutator_norm(&self, other: &Matrix) -> f64 {
        self.mul(other).max_abs_diff(&other.mul(self))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        // H = X + iY is Hermitian iff [[X, -Y], [Y, X]] is real symmetric; the
        // latter has the spectrum of H with every eigenvalue doubled.
        let herm = self.add(&self.adjoint()).scale(ComplexScalar::new(0.5, 0.0));
        let size = 2 * n;
        let mut a = vec![0.0; size * size];
        for i in 0..n {
            for j in 0..n {
                let z = herm[(i, j)];
                a[i * size + j] = z.re;
                a[(i + n) * size + (j + n)] = z.re;
                a[(i + n) * size + j] = z.im;
                a[i * size + (j + n)] = -z.im;
            }
        }
        let mut eig = jacobi_eigenvalues(&mut a, size);
        eig.sort_by(f64::total_cmp);
        eig.into_iter().step_by(2).collect()
    }

    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = ComplexScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ComplexScalar {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexScalar {
        &mut self.data[i * self.dim + j]
    }
}

/// Cyclic Jacobi rotations on a real symmetric `n×n` matrix (row-major,
/// destroyed in place). Returns the diagonal after convergence.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut scale = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = a[i * n + j] * a[i * n + j];
                if i == j {
                    scale += v;
                } else {
                    off += v;
                }
            }
        }
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// ⟨u|v⟩
pub fn inner(u: &[ComplexScalar], v: &[ComplexScalar]) -> ComplexScalar {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[ComplexScalar]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[ComplexScalar], b: &[ComplexScalar]) -> Vec<ComplexScalar> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let y = Matrix::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]]).unwrap();
        let eig = y.hermitian_eigenvalues();
        assert!((eig[0] + 1.0).abs() < 1e-12);
        assert!((eig[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_spectrum_is_sorted_diagonal() {
        let m = Matrix::from_real_diagonal(&[3.0, -2.0, 0.5, 0.0]);
        let eig = m.hermitian_eigenvalues();
        assert_eq!(eig.len(), 4);
        for (got, want) in eig.iter().zip([-2.0, 0.0, 0.5, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = Matrix::identity(2).kron(&Matrix::identity(3));
        assert_eq!(k, Matrix::identity(6));
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let a = Matrix::from_rows(&[vec![c(1.0, 2.0), c(0.0, 1.0)], vec![c(3.0, 0.0), c(-1.0, 0.5)]]).unwrap();
        let b = Matrix::from_rows(&[vec![c(0.5, 0.0), c(2.0, -1.0)], vec![c(0.0, 0.0), c(1.0, 1.0)]]).unwrap();
        assert!((a.trace_product(&b) - a.mul(&b).trace()).norm() < 1e-12);
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(Matrix::from_rows(&[vec![ONE, ZERO], vec![ONE]]).is_none());
        assert!(Matrix::from_rows(&[]).is_none());
    }
}
