//! Condition numbers of a linear function `Ψ(A, b) = L x` of the TLS
//! solution under componentwise (mixed, componentwise) and normwise data
//! perturbations, plus Kronecker-free upper bounds and the explicit-matrix
//! oracle used for cross-validation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::solve::TlsSolution;

/// Largest `m·n` accepted by the explicit-Kronecker oracles.
pub const DEFAULT_ORACLE_CAP: usize = 1_000_000;

/// A `k × n` selection matrix `L` picking the linear function `L x` whose
/// sensitivity is analyzed.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    matrix: DMatrix<f64>,
}

impl Selection {
    /// `L = I_n`: every solution component.
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Rows of the identity selected by `indices` (0-based).
    pub fn rows(n: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSelection("empty row list".into()));
        }
        if indices.len() > n {
            return Err(Error::InvalidSelection(format!(
                "{} rows selected from a solution of length {n}",
                indices.len()
            )));
        }
        let mut matrix = DMatrix::zeros(indices.len(), n);
        for (row, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::InvalidSelection(format!(
                    "row index {i} out of bounds for solution length {n}"
                )));
            }
            matrix[(row, i)] = 1.0;
        }
        Ok(Self { matrix })
    }

    /// `L = e_iᵀ`: the single component `x_i` (0-based).
    pub fn index(n: usize, i: usize) -> Result<Self> {
        Self::rows(n, &[i])
    }

    /// `e_maxᵀ` for the first occurrence of the largest `|x_i|`.
    pub fn max_component(x: &DVector<f64>) -> Self {
        Self::rows(x.len(), &[argmax_abs(x)]).expect("index in bounds")
    }

    /// `e_minᵀ` for the first occurrence of the smallest `|x_i|`.
    pub fn min_component(x: &DVector<f64>) -> Self {
        Self::rows(x.len(), &[argmin_abs(x)]).expect("index in bounds")
    }

    /// An arbitrary `k × n` matrix with `1 ≤ k ≤ n` and finite entries.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let (k, n) = matrix.shape();
        if k == 0 || k > n {
            return Err(Error::InvalidSelection(format!(
                "selection must be k x n with 1 <= k <= n, got {k} x {n}"
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { matrix })
    }

    pub fn k(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `L x`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    fn check_compatible(&self, sol: &TlsSolution) -> Result<()> {
        if self.n() != sol.ncols() {
            return Err(Error::DimensionMismatch {
                context: "selection columns vs. solution length",
                expected: sol.ncols(),
                found: self.n(),
            });
        }
        Ok(())
    }
}

fn argmax_abs(x: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..x.len() {
        if x[i].abs() > x[best].abs() {
            best = i;
        }
    }
    best
}

fn argmin_abs(x: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..x.len() {
        if x[i].abs() < x[best].abs() {
            best = i;
        }
    }
    best
}

/// A selection described symbolically; `max`/`min` can only be resolved once
/// the solution is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionSpec {
    Identity,
    /// 0-based solution indices.
    Rows(Vec<usize>),
    /// A single 0-based solution index.
    Index(usize),
    MaxComponent,
    MinComponent,
}

impl SelectionSpec {
    pub fn resolve(&self, x: &DVector<f64>) -> Result<Selection> {
        let n = x.len();
        match self {
            SelectionSpec::Identity => Ok(Selection::identity(n)),
            SelectionSpec::Rows(rows) => Selection::rows(n, rows),
            SelectionSpec::Index(i) => Selection::index(n, *i),
            SelectionSpec::MaxComponent => Ok(Selection::max_component(x)),
            SelectionSpec::MinComponent => Ok(Selection::min_component(x)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SelectionSpec::Identity => "identity".into(),
            SelectionSpec::Rows(rows) => {
                let list: Vec<String> = rows.iter().map(|i| (i + 1).to_string()).collect();
                format!("rows={}", list.join(","))
            }
            SelectionSpec::Index(i) => format!("index={}", i + 1),
            SelectionSpec::MaxComponent => "max".into(),
            SelectionSpec::MinComponent => "min".into(),
        }
    }
}

/// Shared ingredients of every componentwise formula for one `(L, A, b)`:
/// `W = Aᵀ + 2xrᵀ/(1+xᵀx)`, `Z₁ = L P⁻¹`, `Z₂ = L P⁻¹ W` and
/// `|Z₂| |b|`.
///
/// `Z₁` is obtained by solving against the explicitly formed `P`, which
/// stays accurate on badly scaled data where the factored `Q₁QQ₁` route
/// breaks down.
#[derive(Debug, Clone)]
pub struct SensitivityCore {
    /// `n × m`.
    pub w: DMatrix<f64>,
    /// `k × n`.
    pub z1: DMatrix<f64>,
    /// `k × m`.
    pub z2: DMatrix<f64>,
    /// `|L P⁻¹ W| |b|`, one entry per selected component.
    pub h_abs_b: DVector<f64>,
}

impl SensitivityCore {
    pub fn new(sol: &TlsSolution, sel: &Selection) -> Result<Self> {
        sel.check_compatible(sol)?;
        let w = w_matrix(sol);
        let z1 = sol.solve_p(&sel.matrix().transpose())?.transpose();
        let z2 = &z1 * &w;
        let b = sol.problem().rhs();
        let h_abs_b = DVector::from_fn(sel.k(), |l, _| {
            (0..sol.nrows()).map(|i| z2[(l, i)].abs() * b[i].abs()).sum()
        });
        Ok(Self { w, z1, z2, h_abs_b })
    }

    /// `|L 𝓝| vec(|A|) + |L 𝓗| |b|` evaluated without materializing the
    /// `k × mn` matrix `L 𝓝`: its column for entry `(i, j)` is
    /// `r_i Z₁ e_j − x_j Z₂ e_i`.
    pub fn abs_sensitivity_vector(&self, sol: &TlsSolution) -> DVector<f64> {
        let a = sol.problem().matrix();
        let x = sol.x();
        let r = sol.residual();
        let (m, n) = a.shape();
        let k = self.z1.nrows();
        let mut h = self.h_abs_b.clone();
        for l in 0..k {
            let mut sum = 0.0;
            for j in 0..n {
                let z1_lj = self.z1[(l, j)];
                let x_j = x[j];
                for i in 0..m {
                    let a_ij = a[(i, j)];
                    if a_ij != 0.0 {
                        sum += a_ij.abs() * (z1_lj * r[i] - x_j * self.z2[(l, i)]).abs();
                    }
                }
            }
            h[l] += sum;
        }
        h
    }
}

/// `W = Aᵀ + 2xrᵀ/(1+xᵀx)`.
pub(crate) fn w_matrix(sol: &TlsSolution) -> DMatrix<f64> {
    let scale = 2.0 / sol.one_plus_xtx();
    sol.problem().matrix().transpose() + sol.x() * (sol.residual().transpose() * scale)
}

/// All condition numbers of `L x` for one `(L, A, b)` triple.
#[derive(Debug, Clone, Copy)]
pub struct ConditionReport {
    /// Absolute normwise condition number (Frobenius norm on data, 2-norm on
    /// the solution).
    pub cond_abs: f64,
    /// `cond_abs · ‖[A, b]‖_F / ‖L x‖₂`.
    pub cond_rel: f64,
    /// Absolute mixed condition number `κ_∞`.
    pub kappa_inf: f64,
    /// `κ_∞ / ‖L x‖_∞`.
    pub kappa_inf_rel: f64,
    /// Componentwise condition number `κ_c`; `+∞` when a selected component
    /// is exactly zero with nonzero sensitivity.
    pub kappa_c: f64,
    /// `√k · κ_∞`, an upper bound on the 2-norm condition number.
    pub kappa2_bound: f64,
    /// Kronecker-free upper bound on `κ_∞ʳᵉˡ`.
    pub kappa_inf_upper: f64,
    /// Kronecker-free upper bound on `κ_c`.
    pub kappa_c_upper: f64,
}

/// Fréchet derivative of `Ψ(A, b) = L x` applied to a direction
/// `(dA, db)`:
///
/// `J(dA, db) = L P⁻¹ [(dA)ᵀ r − W dA x] + L P⁻¹ W db`.
pub fn frechet_apply(
    sol: &TlsSolution,
    sel: &Selection,
    da: &DMatrix<f64>,
    db: &DVector<f64>,
) -> Result<DVector<f64>> {
    sel.check_compatible(sol)?;
    if da.shape() != sol.problem().matrix().shape() {
        return Err(Error::DimensionMismatch {
            context: "direction matrix shape vs. problem",
            expected: sol.nrows() * sol.ncols(),
            found: da.nrows() * da.ncols(),
        });
    }
    if db.len() != sol.nrows() {
        return Err(Error::DimensionMismatch {
            context: "direction vector length vs. problem rows",
            expected: sol.nrows(),
            found: db.len(),
        });
    }
    let w = w_matrix(sol);
    let t = da.transpose() * sol.residual() - &w * (da * sol.x()) + &w * db;
    Ok(sel.matrix() * sol.apply_p_inverse_vec(&t)?)
}

/// Adjoint of the Fréchet derivative under the trace inner product:
///
/// `J*(u) = (r uᵀ L P⁻¹ − Wᵀ P⁻¹ Lᵀ u xᵀ,  Wᵀ P⁻¹ Lᵀ u)`.
pub fn frechet_adjoint(
    sol: &TlsSolution,
    sel: &Selection,
    u: &DVector<f64>,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    sel.check_compatible(sol)?;
    if u.len() != sel.k() {
        return Err(Error::DimensionMismatch {
            context: "adjoint operand length vs. selection rows",
            expected: sel.k(),
            found: u.len(),
        });
    }
    let g = sol.apply_p_inverse_vec(&(sel.matrix().transpose() * u))?;
    let w = w_matrix(sol);
    let wg = w.transpose() * &g;
    let da_star = sol.residual() * g.transpose() - &wg * sol.x().transpose();
    Ok((da_star, wg))
}

/// Normwise condition number of `L x` and its relative version, from the
/// SVD-based closed form
/// `cond = √(1+‖x‖²) ‖L Ṽ D' [Ṽᵀ 0] V [D'' 0]ᵀ‖₂` with
/// `D' = diag((σ̃_i² − σ_{n+1}²)⁻¹)` and `D'' = diag((σ_i² + σ_{n+1}²)^½)`.
pub fn normwise_cond(sol: &TlsSolution, sel: &Selection) -> Result<(f64, f64)> {
    sel.check_compatible(sol)?;
    let n = sol.ncols();
    let svd = sol.svd();
    let s2 = sol.sigma_np1() * sol.sigma_np1();

    let mut d_prime = DVector::zeros(n);
    for i in 0..n {
        let di = svd.sigma_tilde[i] * svd.sigma_tilde[i] - s2;
        if di <= 0.0 {
            return Err(Error::NotGeneric {
                gap: 0.0,
                v_last_last: svd.v_last_last,
                tol: 0.0,
            });
        }
        d_prime[i] = 1.0 / di;
    }

    // [V~^T 0] V = V~^T * (first n rows of V), then postmultiply by [D'' 0]^T
    // which keeps the first n columns scaled by D''.
    let v_top = svd.v_aug.view((0, 0), (n, n + 1));
    let mut mid = svd.v_tilde.transpose() * v_top;
    let mut core = DMatrix::zeros(n, n);
    for j in 0..n {
        let dpp = (svd.sigma_aug[j] * svd.sigma_aug[j] + s2).sqrt();
        core.set_column(j, &(mid.column(j) * dpp));
    }
    for i in 0..n {
        let row_scale = d_prime[i];
        core.row_mut(i).scale_mut(row_scale);
    }
    mid = svd.v_tilde.clone() * core;
    let g = sel.matrix() * mid;

    let spectral = g
        .try_svd(false, false, f64::EPSILON, 1000)
        .ok_or(Error::SvdFailed)?
        .singular_values[0];
    let cond_abs = sol.one_plus_xtx().sqrt() * spectral;

    let lx_norm = sel.apply(sol.x()).norm();
    if lx_norm == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    let cond_rel = cond_abs * sol.problem().augmented_norm() / lx_norm;
    Ok((cond_abs, cond_rel))
}

/// Mixed condition number `κ_∞ = ‖|L𝓝| vec(|A|) + |L𝓗| |b|‖_∞` and its
/// relative version `κ_∞ / ‖Lx‖_∞`, evaluated Kronecker-free in
/// `O(kmn)` time.
pub fn mixed_cond(sol: &TlsSolution, sel: &Selection) -> Result<(f64, f64)> {
    let core = SensitivityCore::new(sol, sel)?;
    let h = core.abs_sensitivity_vector(sol);
    let kappa_inf = h.amax();
    let lx_inf = sel.apply(sol.x()).amax();
    if lx_inf == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    Ok((kappa_inf, kappa_inf / lx_inf))
}

/// Componentwise condition number
/// `κ_c = ‖D⁺_{Lx} (|L𝓝| vec(|A|) + |L𝓗| |b|)‖_∞`.
///
/// A zero component of `Lx` contributes zero when its sensitivity entry is
/// also zero, and `+∞` otherwise.
pub fn comp_cond(sol: &TlsSolution, sel: &Selection) -> Result<f64> {
    let core = SensitivityCore::new(sol, sel)?;
    let h = core.abs_sensitivity_vector(sol);
    Ok(dplus_inf_norm(&h, &sel.apply(sol.x())))
}

/// `‖D⁺_{lx} t‖_∞` with the Moore-Penrose convention on zero components.
pub(crate) fn dplus_inf_norm(t: &DVector<f64>, lx: &DVector<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..t.len() {
        let v = if lx[i] != 0.0 {
            t[i].abs() / lx[i].abs()
        } else if t[i] == 0.0 {
            0.0
        } else {
            return f64::INFINITY;
        };
        worst = worst.max(v);
    }
    worst
}

/// Upper bound `√k κ_∞` on the 2-norm condition number; the exact value is
/// a (2,1)-type operator norm that is not computed here.
pub fn two_norm_bound(kappa_inf: f64, k: usize) -> f64 {
    (k as f64).sqrt() * kappa_inf
}

/// Kronecker-free upper bounds `κ_∞ᵁ ≥ κ_∞ʳᵉˡ` and `κ_cᵁ ≥ κ_c`, assembled
/// from three separately normed terms
/// `|LP⁻¹| |W| |A| |x|`, `|LP⁻¹| |Aᵀ| |r|` and `|LP⁻¹W| |b|`.
pub fn upper_bounds(sol: &TlsSolution, sel: &Selection) -> Result<(f64, f64)> {
    let core = SensitivityCore::new(sol, sel)?;
    upper_bounds_from_core(sol, sel, &core)
}

fn upper_bounds_from_core(
    sol: &TlsSolution,
    sel: &Selection,
    core: &SensitivityCore,
) -> Result<(f64, f64)> {
    let a = sol.problem().matrix();
    let abs_a_x = DVector::from_fn(sol.nrows(), |i, _| {
        (0..sol.ncols()).map(|j| a[(i, j)].abs() * sol.x()[j].abs()).sum()
    });
    let abs_at_r = DVector::from_fn(sol.ncols(), |j, _| {
        (0..sol.nrows()).map(|i| a[(i, j)].abs() * sol.residual()[i].abs()).sum()
    });
    let abs_w_ax = DVector::from_fn(sol.ncols(), |j, _| {
        (0..sol.nrows()).map(|i| core.w[(j, i)].abs() * abs_a_x[i]).sum()
    });

    let k = sel.k();
    let t1 = DVector::from_fn(k, |l, _| {
        (0..sol.ncols()).map(|j| core.z1[(l, j)].abs() * abs_w_ax[j]).sum()
    });
    let t2 = DVector::from_fn(k, |l, _| {
        (0..sol.ncols()).map(|j| core.z1[(l, j)].abs() * abs_at_r[j]).sum()
    });
    let t3 = &core.h_abs_b;

    let lx = sel.apply(sol.x());
    let lx_inf = lx.amax();
    if lx_inf == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    let kappa_inf_upper = (t1.amax() + t2.amax() + t3.amax()) / lx_inf;
    let kappa_c_upper =
        dplus_inf_norm(&t1, &lx) + dplus_inf_norm(&t2, &lx) + dplus_inf_norm(t3, &lx);
    Ok((kappa_inf_upper, kappa_c_upper))
}

/// Computes the whole [`ConditionReport`] sharing one `P`-factorization and
/// one streaming pass.
pub fn condition_report(sol: &TlsSolution, sel: &Selection) -> Result<ConditionReport> {
    let core = SensitivityCore::new(sol, sel)?;
    let h = core.abs_sensitivity_vector(sol);
    let lx = sel.apply(sol.x());
    let lx_inf = lx.amax();
    if lx_inf == 0.0 || lx.norm() == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    let kappa_inf = h.amax();
    let kappa_c = dplus_inf_norm(&h, &lx);
    let (cond_abs, cond_rel) = normwise_cond(sol, sel)?;
    let (kappa_inf_upper, kappa_c_upper) = upper_bounds_from_core(sol, sel, &core)?;
    Ok(ConditionReport {
        cond_abs,
        cond_rel,
        kappa_inf,
        kappa_inf_rel: kappa_inf / lx_inf,
        kappa_c,
        kappa2_bound: two_norm_bound(kappa_inf, sel.k()),
        kappa_inf_upper,
        kappa_c_upper,
    })
}

/// Relative mixed and componentwise condition numbers `m(A, b)` and
/// `c(A, b)` of the full solution (`L = I`) via the explicit matrices
///
/// `M = [P⁻¹ ⊗ bᵀ − xᵀ ⊗ (P⁻¹Aᵀ) − P⁻¹ ⊗ (Ax)ᵀ,  P⁻¹Aᵀ]`,
/// `N = 2σ_{n+1} P⁻¹ x (v_{n+1}ᵀ ⊗ u_{n+1}ᵀ)`.
///
/// Builds the dense `n × (mn + m)` matrix `M + N`; intended as a
/// cross-check on small instances only.
pub fn zhou_oracle(sol: &TlsSolution) -> Result<(f64, f64)> {
    zhou_oracle_with_cap(sol, DEFAULT_ORACLE_CAP)
}

pub fn zhou_oracle_with_cap(sol: &TlsSolution, cap: usize) -> Result<(f64, f64)> {
    let (m, n) = (sol.nrows(), sol.ncols());
    if m * n > cap {
        return Err(Error::OracleTooLarge { entries: m * n, cap });
    }

    let a = sol.problem().matrix();
    let b = sol.problem().rhs();
    let x = sol.x();
    let pinv = sol
        .form_p()
        .try_inverse()
        .ok_or(Error::NotGeneric {
            gap: 0.0,
            v_last_last: sol.svd().v_last_last,
            tol: 0.0,
        })?;
    let pinv_at = &pinv * a.transpose();
    let ax = a * x;

    let mut mn_mat = DMatrix::zeros(n, m * n + m);
    // A-part: column j*m + i carries the coefficient of da_{ij}.
    for j in 0..n {
        for i in 0..m {
            let col = j * m + i;
            for l in 0..n {
                mn_mat[(l, col)] =
                    pinv[(l, j)] * b[i] - x[j] * pinv_at[(l, i)] - pinv[(l, j)] * ax[i];
            }
        }
    }
    // b-part.
    for i in 0..m {
        let col = m * n + i;
        for l in 0..n {
            mn_mat[(l, col)] = pinv_at[(l, i)];
        }
    }
    // N = 2 sigma_{n+1} P^{-1} x (v^T kron u^T), spanning all mn + m columns.
    let pinv_x = &pinv * x;
    let scale = 2.0 * sol.sigma_np1();
    let v = &sol.svd().v_last;
    let u = &sol.svd().u_last;
    for jj in 0..=n {
        for i in 0..m {
            let col = jj * m + i;
            let vu = v[jj] * u[i];
            for l in 0..n {
                mn_mat[(l, col)] += scale * pinv_x[l] * vu;
            }
        }
    }

    let mut rhs = DVector::zeros(m * n + m);
    for j in 0..n {
        for i in 0..m {
            rhs[j * m + i] = a[(i, j)].abs();
        }
    }
    for i in 0..m {
        rhs[m * n + i] = b[i].abs();
    }

    let t = DVector::from_fn(n, |l, _| {
        (0..m * n + m).map(|c| mn_mat[(l, c)].abs() * rhs[c]).sum()
    });
    let x_inf = x.amax();
    if x_inf == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    Ok((t.amax() / x_inf, dplus_inf_norm(&t, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::TlsProblem;
    use crate::solve::{solve_tls, DEFAULT_GENERICITY_TOL};
    use approx::assert_relative_eq;

    fn trivial() -> TlsSolution {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        solve_tls(&TlsProblem::new(a, b).unwrap(), DEFAULT_GENERICITY_TOL).unwrap()
    }

    #[test]
    fn selection_constructors() {
        let sel = Selection::rows(4, &[0, 2]).unwrap();
        assert_eq!(sel.k(), 2);
        assert_eq!(sel.matrix()[(1, 2)], 1.0);
        assert!(Selection::rows(4, &[4]).is_err());
        assert!(Selection::rows(2, &[0, 1, 0]).is_err());
        assert!(Selection::from_matrix(DMatrix::zeros(3, 2)).is_err());

        let x = DVector::from_vec(vec![-3.0, 1.0, 3.0]);
        assert_eq!(Selection::max_component(&x).matrix()[(0, 0)], 1.0);
        assert_eq!(Selection::min_component(&x).matrix()[(0, 1)], 1.0);
    }

    #[test]
    fn frechet_zero_direction() {
        let sol = trivial();
        let sel = Selection::identity(2);
        let j = frechet_apply(
            &sol,
            &sel,
            &DMatrix::zeros(3, 2),
            &DVector::zeros(3),
        )
        .unwrap();
        assert_eq!(j.amax(), 0.0);

        let (da, db) = frechet_adjoint(&sol, &sel, &DVector::zeros(2)).unwrap();
        assert_eq!(da.amax(), 0.0);
        assert_eq!(db.amax(), 0.0);
    }

    #[test]
    fn frechet_consistent_system_db_only() {
        // r = 0 kills the correction terms: J(0, e_1) = L (A^T A)^{-1} A^T e_1,
        // and A^T A = I here.
        let sol = trivial();
        let sel = Selection::identity(2);
        let mut e1 = DVector::zeros(3);
        e1[0] = 1.0;
        let j = frechet_apply(&sol, &sel, &DMatrix::zeros(3, 2), &e1).unwrap();
        assert_relative_eq!(j[0], 1.0, max_relative = 1e-10);
        assert!(j[1].abs() < 1e-10);
    }

    #[test]
    fn adjoint_consistent_system() {
        // With r = 0 and L = I the db-component of J*(e_1) is A (A^T A)^{-1} e_1.
        let sol = trivial();
        let sel = Selection::identity(2);
        let mut u = DVector::zeros(2);
        u[0] = 1.0;
        let (da_star, db_star) = frechet_adjoint(&sol, &sel, &u).unwrap();
        assert_relative_eq!(db_star[0], 1.0, max_relative = 1e-10);
        assert!(db_star[1].abs() < 1e-12);
        assert!(db_star[2].abs() < 1e-12);
        // r = 0 leaves only the -W^T P^{-1} L^T u x^T term.
        assert_relative_eq!(da_star[(0, 0)], -1.0, max_relative = 1e-10);
    }

    #[test]
    fn mixed_and_comp_on_trivial() {
        let sol = trivial();
        let sel = Selection::identity(2);
        let (_, kappa_inf_rel) = mixed_cond(&sol, &sel).unwrap();
        assert_relative_eq!(kappa_inf_rel, 2.0, max_relative = 1e-10);
        let kappa_c = comp_cond(&sol, &sel).unwrap();
        assert_relative_eq!(kappa_c, 2.0, max_relative = 1e-10);
        let (m_ab, c_ab) = zhou_oracle(&sol).unwrap();
        assert_relative_eq!(m_ab, 2.0, max_relative = 1e-10);
        assert_relative_eq!(c_ab, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn null_selection_is_rejected() {
        // L = [1, -1] maps x = (1, 1) to zero.
        let sol = trivial();
        let sel = Selection::from_matrix(DMatrix::from_row_slice(1, 2, &[1.0, -1.0])).unwrap();
        assert!(matches!(
            mixed_cond(&sol, &sel),
            Err(Error::SelectionNullSolution)
        ));
        assert!(matches!(
            normwise_cond(&sol, &sel),
            Err(Error::SelectionNullSolution)
        ));
        // kappa_c is a value, not an error: nonzero sensitivity over a zero
        // component reports +infinity.
        assert_eq!(comp_cond(&sol, &sel).unwrap(), f64::INFINITY);
    }

    #[test]
    fn two_norm_bound_arithmetic() {
        assert_eq!(two_norm_bound(0.0, 7), 0.0);
        assert_eq!(two_norm_bound(2.0, 1), 2.0);
        assert_relative_eq!(two_norm_bound(8.43, 4), 16.86, max_relative = 1e-12);
    }

    #[test]
    fn oracle_cap() {
        let sol = trivial();
        assert!(matches!(
            zhou_oracle_with_cap(&sol, 5),
            Err(Error::OracleTooLarge { entries: 6, cap: 5 })
        ));
    }

    #[test]
    fn report_is_self_consistent() {
        let sol = trivial();
        let sel = Selection::identity(2);
        let rep = condition_report(&sol, &sel).unwrap();
        assert!(rep.kappa_inf_rel <= rep.kappa_inf_upper * (1.0 + 1e-12));
        assert!(rep.kappa_c <= rep.kappa_c_upper * (1.0 + 1e-12));
        assert_relative_eq!(
            rep.kappa2_bound,
            2.0f64.sqrt() * rep.kappa_inf,
            max_relative = 1e-14
        );
    }
}
