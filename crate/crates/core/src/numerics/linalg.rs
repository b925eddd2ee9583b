//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Every Hermitian input is symmetrized as `(A + A^H)/2` before it is
//! factorized or decomposed, so accumulated rounding drift never leaks an
//! anti-Hermitian part into a solve.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::NumericsError;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest condition number accepted by [`herm_solve`].
pub const MAX_CONDITION: f64 = 1e14;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), a.ncols(), "hermitian_part needs a square matrix");
    (a + a.adjoint()).scale(0.5)
}

/// True when `A = A^H` elementwise within `tol`.
pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let n = a.nrows();
    for i in 0..n {
        for j in i..n {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// `a^H b`.
#[inline]
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// Real part of `x^H A x`; exact for Hermitian `A`.
pub fn quad_form(a: &CMatrix, x: &CVector) -> f64 {
    x.dotc(&(a * x)).re
}

/// `x x^H`.
pub fn outer(x: &CVector) -> CMatrix {
    x * x.adjoint()
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending
/// order.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEigen {
    pub fn new(a: &CMatrix) -> Self {
        let n = a.nrows();
        if n == 0 {
            return Self {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(hermitian_part(a));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Coordinates of `b` in the eigenbasis, `U^H b`.
    pub fn project(&self, b: &CVector) -> CVector {
        self.vectors.adjoint() * b
    }

    /// `U diag(c)`-combination back to the original basis.
    pub fn lift(&self, coords: &CVector) -> CVector {
        &self.vectors * coords
    }
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    HermEigen::new(a).min()
}

/// PSD check after symmetrization, with absolute slack `tol`.
pub fn is_psd(a: &CMatrix, tol: f64) -> bool {
    min_eigenvalue(a) >= -tol
}

/// Solves `(A + ridge I) x = b` for Hermitian `A`.
///
/// Fails with [`NumericsError::SingularSystem`] when the regularized matrix is
/// not positive definite or its condition number exceeds [`MAX_CONDITION`].
pub fn herm_solve(a: &CMatrix, b: &CVector, ridge: f64) -> Result<CVector, NumericsError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    if ridge < 0.0 || !ridge.is_finite() {
        return Err(NumericsError::InvalidArgument("ridge must be a finite nonnegative number"));
    }
    if n == 0 {
        return Ok(CVector::zeros(0));
    }
    let mut m = hermitian_part(a);
    for i in 0..n {
        m[(i, i)] += c64(ridge, 0.0);
    }
    let eig = HermEigen::new(&m);
    let (lo, hi) = (eig.min(), eig.max());
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(NumericsError::SingularSystem {
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        });
    }
    match m.clone().cholesky() {
        Some(chol) => Ok(chol.solve(b)),
        None => {
            // Cholesky can still trip on the rounding edge; the eigenbasis is
            // already at hand.
            let coords = eig.project(b);
            let scaled = CVector::from_iterator(
                n,
                coords.iter().zip(&eig.values).map(|(c, &d)| c / d),
            );
            Ok(eig.lift(&scaled))
        }
    }
}

/// Sum of squared magnitudes.
#[inline]
pub fn norm_sqr(x: &CVector) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// `diag(d) x` for a complex diagonal.
pub fn diag_mul(d: &CVector, x: &CVector) -> CVector {
    d.component_mul(x)
}
