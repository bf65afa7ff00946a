use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// An over-determined total least squares problem `A x ≈ b`.
///
/// Both the matrix and the right-hand side are treated as perturbable data:
/// the TLS solution minimizes `‖[A, b] − [Â, b̂]‖_F` over all consistent
/// pairs `(Â, b̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TlsProblem {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl TlsProblem {
    /// Validates `m > n ≥ 1`, matching dimensions and finite entries.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        if n < 1 || m <= n {
            return Err(Error::NotOverdetermined { m, n });
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                context: "right-hand side length vs. matrix rows",
                expected: m,
                found: b.len(),
            });
        }
        if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { a, b })
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.a.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    /// The augmented matrix `[A, b]` of size `m × (n+1)`.
    pub fn augmented(&self) -> DMatrix<f64> {
        let (m, n) = (self.nrows(), self.ncols());
        let mut ab = DMatrix::zeros(m, n + 1);
        ab.view_mut((0, 0), (m, n)).copy_from(&self.a);
        ab.set_column(n, &self.b);
        ab
    }

    /// Frobenius norm of `[A, b]`.
    pub fn augmented_norm(&self) -> f64 {
        (self.a.norm_squared() + self.b.norm_squared()).sqrt()
    }

    /// A new problem with data `(A + dA, b + db)`.
    pub fn perturbed(&self, da: &DMatrix<f64>, db: &DVector<f64>) -> Result<Self> {
        if da.shape() != self.a.shape() {
            return Err(Error::DimensionMismatch {
                context: "perturbation matrix rows vs. problem rows",
                expected: self.nrows() * self.ncols(),
                found: da.nrows() * da.ncols(),
            });
        }
        if db.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                context: "perturbation vector length vs. problem rows",
                expected: self.nrows(),
                found: db.len(),
            });
        }
        Self::new(&self.a + da, &self.b + db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_underdetermined() {
        let a = DMatrix::zeros(3, 3);
        let b = DVector::zeros(3);
        assert!(matches!(
            TlsProblem::new(a, b),
            Err(Error::NotOverdetermined { m: 3, n: 3 })
        ));
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let a = DMatrix::zeros(4, 2);
        let b = DVector::zeros(3);
        assert!(matches!(
            TlsProblem::new(a, b),
            Err(Error::DimensionMismatch { expected: 4, found: 3, .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = DMatrix::zeros(3, 2);
        a[(0, 0)] = f64::NAN;
        let b = DVector::zeros(3);
        assert!(matches!(TlsProblem::new(a, b), Err(Error::NonFinite)));
    }

    #[test]
    fn augmented_layout() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = DVector::from_vec(vec![7.0, 8.0, 9.0]);
        let p = TlsProblem::new(a, b).unwrap();
        let ab = p.augmented();
        assert_eq!(ab.nrows(), 3);
        assert_eq!(ab.ncols(), 3);
        assert_eq!(ab[(0, 2)], 7.0);
        assert_eq!(ab[(2, 1)], 6.0);
        let expected = (1..=9).map(|v| (v * v) as f64).sum::<f64>().sqrt();
        assert!((p.augmented_norm() - expected).abs() < 1e-14);
    }
}
