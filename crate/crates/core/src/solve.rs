use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::problem::TlsProblem;

/// Default threshold for the genericity test: the relative singular value
/// gap `(σ̃_n − σ_{n+1})/σ̃_1` and `|v_{n+1,n+1}|` must both exceed it.
pub const DEFAULT_GENERICITY_TOL: f64 = 1e-12;

const SVD_MAX_ITER: usize = 1000;

/// Singular value decompositions of `A` and of the augmented matrix `[A, b]`,
/// with the last singular pair sign-normalized so that `v_{n+1,n+1} > 0`.
#[derive(Debug, Clone)]
pub struct SvdBundle {
    /// `n+1` singular values of `[A, b]`, nonincreasing.
    pub sigma_aug: DVector<f64>,
    /// Right singular vectors of `[A, b]`, `(n+1) × (n+1)`.
    pub v_aug: DMatrix<f64>,
    /// Left singular vectors of `[A, b]`; thin, `m × (n+1)`. Only the last
    /// column enters any formula below.
    pub u_aug: DMatrix<f64>,
    /// Last right singular vector `v_{n+1}`.
    pub v_last: DVector<f64>,
    /// Its trailing component `v_{n+1,n+1}`.
    pub v_last_last: f64,
    /// Last left singular vector `u_{n+1}`.
    pub u_last: DVector<f64>,
    /// `n` singular values of `A`, nonincreasing.
    pub sigma_tilde: DVector<f64>,
    /// Right singular vectors of `A`, `n × n`.
    pub v_tilde: DMatrix<f64>,
}

impl SvdBundle {
    pub fn compute(problem: &TlsProblem) -> Result<Self> {
        let n = problem.ncols();

        let svd_aug = problem
            .augmented()
            .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdFailed)?;
        let sigma_aug = svd_aug.singular_values.clone();
        debug_assert!(is_nonincreasing(&sigma_aug));
        let mut v_aug = svd_aug.v_t.expect("v requested").transpose();
        let mut u_aug = svd_aug.u.expect("u requested");

        // Sign convention: v_{n+1,n+1} > 0, flipping (v_{n+1}, u_{n+1}) as a
        // pair so that r = (σ_{n+1}/v_{n+1,n+1}) u_{n+1} keeps holding.
        if v_aug[(n, n)] < 0.0 {
            v_aug.column_mut(n).neg_mut();
            u_aug.column_mut(n).neg_mut();
        }

        let svd_a = problem
            .matrix()
            .clone()
            .try_svd(false, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdFailed)?;
        let sigma_tilde = svd_a.singular_values.clone();
        debug_assert!(is_nonincreasing(&sigma_tilde));
        let v_tilde = svd_a.v_t.expect("v requested").transpose();

        let v_last = v_aug.column(n).into_owned();
        let v_last_last = v_aug[(n, n)];
        let u_last = u_aug.column(n).into_owned();

        Ok(Self {
            sigma_aug,
            v_aug,
            u_aug,
            v_last,
            v_last_last,
            u_last,
            sigma_tilde,
            v_tilde,
        })
    }

    pub fn n(&self) -> usize {
        self.sigma_tilde.len()
    }

    /// Smallest singular value of the augmented matrix, `σ_{n+1}`.
    pub fn sigma_np1(&self) -> f64 {
        self.sigma_aug[self.n()]
    }

    fn genericity(&self, tol: f64) -> GenericityReport {
        let n = self.n();
        let sigma_tilde_n = self.sigma_tilde[n - 1];
        let sigma_np1 = self.sigma_np1();
        let relative_gap = if self.sigma_tilde[0] > 0.0 {
            (sigma_tilde_n - sigma_np1) / self.sigma_tilde[0]
        } else {
            0.0
        };
        GenericityReport {
            sigma_tilde_n,
            sigma_np1,
            relative_gap,
            v_last_last: self.v_last_last,
            is_generic: relative_gap > tol && self.v_last_last.abs() > tol,
        }
    }
}

fn is_nonincreasing(v: &DVector<f64>) -> bool {
    v.iter().zip(v.iter().skip(1)).all(|(a, b)| a >= b)
}

/// Outcome of the genericity test `σ̃_n > σ_{n+1}` that guarantees a unique
/// TLS solution.
#[derive(Debug, Clone, Copy)]
pub struct GenericityReport {
    pub sigma_tilde_n: f64,
    pub sigma_np1: f64,
    /// `(σ̃_n − σ_{n+1})/σ̃_1`, or zero when `A = 0`.
    pub relative_gap: f64,
    pub v_last_last: f64,
    pub is_generic: bool,
}

/// Factors of `P⁻¹ = Q₁ Q Q₁` where `P = AᵀA − σ_{n+1}² I`.
///
/// `Q = V₁₁ D⁻¹ V₁₁ᵀ` with `V₁₁` the leading `n × n` block of the right
/// singular vectors of `[A, b]` and `D = diag(σ_i² − σ_{n+1}²)`.
#[derive(Debug, Clone)]
pub struct PinvFactors {
    /// `Q₁ = I + x xᵀ`.
    pub q1: DMatrix<f64>,
    /// `Q = V₁₁ D⁻¹ V₁₁ᵀ`.
    pub q: DMatrix<f64>,
    /// Diagonal entries `σ_i² − σ_{n+1}²`, all strictly positive.
    pub d: DVector<f64>,
}

/// A solved generic TLS problem together with everything the sensitivity
/// formulas consume: both SVDs and the factored `P⁻¹`.
#[derive(Debug, Clone)]
pub struct TlsSolution {
    problem: TlsProblem,
    x: DVector<f64>,
    r: DVector<f64>,
    sigma_np1: f64,
    svd: SvdBundle,
    pinv: PinvFactors,
}

/// Runs the genericity test at tolerance `tol` without solving.
pub fn check_genericity(problem: &TlsProblem, tol: f64) -> Result<GenericityReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "genericity tolerance must be positive, got {tol}"
        )));
    }
    Ok(SvdBundle::compute(problem)?.genericity(tol))
}

/// Solves the TLS problem by the SVD method.
///
/// The solution is read off the last right singular vector of `[A, b]`:
/// `x = −(1/v_{n+1,n+1}) v_{n+1}[1..n]`. Fails with [`Error::NotGeneric`]
/// when the genericity test at `tol` does not pass.
pub fn solve_tls(problem: &TlsProblem, tol: f64) -> Result<TlsSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "genericity tolerance must be positive, got {tol}"
        )));
    }
    let svd = SvdBundle::compute(problem)?;
    let report = svd.genericity(tol);
    if !report.is_generic {
        return Err(Error::NotGeneric {
            gap: report.relative_gap,
            v_last_last: report.v_last_last,
            tol,
        });
    }

    let n = svd.n();
    let x = DVector::from_fn(n, |i, _| -svd.v_last[i] / svd.v_last_last);
    let r = problem.rhs() - problem.matrix() * &x;
    let sigma_np1 = svd.sigma_np1();

    let d = DVector::from_fn(n, |i, _| {
        svd.sigma_aug[i] * svd.sigma_aug[i] - sigma_np1 * sigma_np1
    });
    if d.iter().any(|&di| di <= 0.0) {
        return Err(Error::NotGeneric {
            gap: report.relative_gap,
            v_last_last: report.v_last_last,
            tol,
        });
    }

    let v11 = svd.v_aug.view((0, 0), (n, n)).into_owned();
    let mut v11_dinv = v11.clone();
    for (j, mut col) in v11_dinv.column_iter_mut().enumerate() {
        col /= d[j];
    }
    let q = &v11_dinv * v11.transpose();
    let q1 = DMatrix::identity(n, n) + &x * x.transpose();

    Ok(TlsSolution {
        problem: problem.clone(),
        x,
        r,
        sigma_np1,
        svd,
        pinv: PinvFactors { q1, q, d },
    })
}

impl TlsSolution {
    pub fn problem(&self) -> &TlsProblem {
        &self.problem
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    /// Residual `r = b − A x`.
    pub fn residual(&self) -> &DVector<f64> {
        &self.r
    }

    pub fn sigma_np1(&self) -> f64 {
        self.sigma_np1
    }

    pub fn svd(&self) -> &SvdBundle {
        &self.svd
    }

    pub fn pinv_factors(&self) -> &PinvFactors {
        &self.pinv
    }

    pub fn nrows(&self) -> usize {
        self.problem.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.problem.ncols()
    }

    /// `1 + xᵀx`, the recurring normalization of the sensitivity formulas.
    pub fn one_plus_xtx(&self) -> f64 {
        1.0 + self.x.norm_squared()
    }

    /// Applies `P⁻¹` columnwise to a matrix with `n` rows as
    /// `Q₁ (Q (Q₁ y))`; `P` is never formed or factorized here.
    pub fn apply_p_inverse(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if y.nrows() != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "apply_p_inverse operand rows vs. n",
                expected: self.ncols(),
                found: y.nrows(),
            });
        }
        Ok(&self.pinv.q1 * (&self.pinv.q * (&self.pinv.q1 * y)))
    }

    /// Vector form of [`TlsSolution::apply_p_inverse`].
    pub fn apply_p_inverse_vec(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        if y.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "apply_p_inverse operand length vs. n",
                expected: self.ncols(),
                found: y.len(),
            });
        }
        Ok(&self.pinv.q1 * (&self.pinv.q * (&self.pinv.q1 * y)))
    }

    /// Forms `P = AᵀA − σ_{n+1}² I` explicitly.
    ///
    /// The condition-number formulas solve against this matrix directly; the
    /// factored route of [`TlsSolution::apply_p_inverse`] loses accuracy when
    /// `‖x‖` is large.
    pub fn form_p(&self) -> DMatrix<f64> {
        let n = self.ncols();
        let a = self.problem.matrix();
        let mut p = a.transpose() * a;
        for i in 0..n {
            p[(i, i)] -= self.sigma_np1 * self.sigma_np1;
        }
        p
    }

    /// Solves `P Z = Y` by a pivoted dense factorization of the explicitly
    /// formed `P`.
    pub fn solve_p(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if y.nrows() != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "solve_p operand rows vs. n",
                expected: self.ncols(),
                found: y.nrows(),
            });
        }
        self.form_p()
            .lu()
            .solve(y)
            .ok_or_else(|| Error::NotGeneric {
                gap: 0.0,
                v_last_last: self.svd.v_last_last,
                tol: 0.0,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn trivial_consistent() -> TlsProblem {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        TlsProblem::new(a, b).unwrap()
    }

    #[test]
    fn genericity_trivial_consistent() {
        let report = check_genericity(&trivial_consistent(), DEFAULT_GENERICITY_TOL).unwrap();
        assert_relative_eq!(report.sigma_tilde_n, 1.0, max_relative = 1e-12);
        assert!(report.sigma_np1.abs() < 1e-12);
        assert!(report.is_generic);
    }

    #[test]
    fn genericity_degenerate() {
        // A = (1, 0)^T, b = (0, 1)^T: sigma_tilde_1 = 1 = sigma_2.
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let b = DVector::from_vec(vec![0.0, 1.0]);
        let p = TlsProblem::new(a, b).unwrap();
        let report = check_genericity(&p, DEFAULT_GENERICITY_TOL).unwrap();
        assert_relative_eq!(report.sigma_tilde_n, 1.0, max_relative = 1e-12);
        assert_relative_eq!(report.sigma_np1, 1.0, max_relative = 1e-12);
        assert!(!report.is_generic);
        assert!(matches!(
            solve_tls(&p, DEFAULT_GENERICITY_TOL),
            Err(Error::NotGeneric { .. })
        ));
    }

    #[test]
    fn solve_trivial_consistent() {
        let sol = solve_tls(&trivial_consistent(), DEFAULT_GENERICITY_TOL).unwrap();
        assert_relative_eq!(sol.x()[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(sol.x()[1], 1.0, max_relative = 1e-12);
        assert!(sol.residual().norm() < 1e-12);
        assert!(sol.sigma_np1() < 1e-12);
        // v_{n+1,n+1} = 1/sqrt(1 + x^T x)
        assert_relative_eq!(
            sol.svd().v_last_last,
            1.0 / sol.one_plus_xtx().sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn residual_matches_svd_identity() {
        let sol = solve_tls(&trivial_consistent(), DEFAULT_GENERICITY_TOL).unwrap();
        let via_svd = sol.svd().u_last.clone() * (sol.sigma_np1() / sol.svd().v_last_last);
        assert!((sol.residual() - via_svd).norm() <= 1e-10 * (1.0 + sol.residual().norm()));
    }

    #[test]
    fn p_inverse_identity_on_trivial() {
        // sigma_{n+1} = 0 and A^T A = I, so P = I and P^{-1} y = y.
        let sol = solve_tls(&trivial_consistent(), DEFAULT_GENERICITY_TOL).unwrap();
        let y = sol.problem().matrix().transpose() * sol.problem().rhs();
        let z = sol.apply_p_inverse_vec(&y).unwrap();
        assert_relative_eq!(z[0], y[0], max_relative = 1e-10);
        assert_relative_eq!(z[1], y[1], max_relative = 1e-10);
    }

    #[test]
    fn apply_p_inverse_rejects_bad_shape() {
        let sol = solve_tls(&trivial_consistent(), DEFAULT_GENERICITY_TOL).unwrap();
        let y = DVector::zeros(3);
        assert!(matches!(
            sol.apply_p_inverse_vec(&y),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(matches!(
            solve_tls(&trivial_consistent(), 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }
}
