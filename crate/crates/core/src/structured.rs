//! Linear matrix structures (Toeplitz built in), the structured Fréchet
//! derivative and the structured mixed/componentwise condition numbers,
//! which perturb only the coordinates of `A` in the structure basis.

use nalgebra::{DMatrix, DVector};

use crate::conditioning::{dplus_inf_norm, w_matrix, Selection, SensitivityCore};
use crate::error::{Error, Result};
use crate::solve::TlsSolution;

pub use crate::conditioning::DEFAULT_ORACLE_CAP;

/// Relative residual below which a system counts as consistent for the
/// purposes of [`li_jia_oracle`], whose formula divides by `‖r‖₂²`.
const CONSISTENCY_FLOOR: f64 = 1e-12;

/// Relative fit tolerance of [`LinearStructure::decompose`].
const DECOMPOSE_TOL: f64 = 1e-12;

/// One basis matrix stored by its nonzero entries.
#[derive(Debug, Clone, PartialEq)]
struct BasisMatrix {
    entries: Vec<(usize, usize, f64)>,
}

/// A linear subspace of `m × n` matrices spanned by basis matrices
/// `S_1, …, S_q`, with `A = Σ a_i S_i` for a unique coordinate vector `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearStructure {
    m: usize,
    n: usize,
    basis: Vec<BasisMatrix>,
    abs_additive: bool,
}

/// Coordinates of a structured matrix in its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredCoordinates {
    a: DVector<f64>,
}

impl StructuredCoordinates {
    pub fn new(a: DVector<f64>) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { a })
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.len() == 0
    }
}

impl LinearStructure {
    /// Builds a structure from dense basis matrices.
    ///
    /// Linear independence is checked via the rank of the vectorized basis
    /// (computed through its `q × q` Gram matrix). `abs_additive` is set
    /// when the supports are pairwise disjoint, a sufficient condition for
    /// `|A| = Σ |a_i| |S_i|`.
    pub fn new(basis: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = basis.first().ok_or_else(|| {
            Error::InvalidParameter("structure basis must not be empty".into())
        })?;
        let (m, n) = first.shape();
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter("basis matrices must be non-empty".into()));
        }
        let mut sparse = Vec::with_capacity(basis.len());
        for s in &basis {
            if s.shape() != (m, n) {
                return Err(Error::DimensionMismatch {
                    context: "basis matrix shape vs. first basis matrix",
                    expected: m * n,
                    found: s.nrows() * s.ncols(),
                });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            let mut entries = Vec::new();
            for j in 0..n {
                for i in 0..m {
                    if s[(i, j)] != 0.0 {
                        entries.push((i, j, s[(i, j)]));
                    }
                }
            }
            if entries.is_empty() {
                return Err(Error::DependentBasis);
            }
            sparse.push(BasisMatrix { entries });
        }

        let abs_additive = disjoint_supports(&sparse, m, n);
        // Disjoint nonzero supports imply independence; otherwise fall back
        // to the rank of the Gram matrix of the vectorized basis.
        if !abs_additive && !gram_full_rank(&sparse) {
            return Err(Error::DependentBasis);
        }
        Ok(Self { m, n, basis: sparse, abs_additive })
    }

    /// The Toeplitz structure on `m × n` matrices: `q = m + n − 1` basis
    /// matrices, each with ones on a single diagonal. `S_1` is the
    /// top-right diagonal (only entry `(1, n)`), `S_n` the main diagonal
    /// and `S_{m+n−1}` the bottom-left corner, so coordinate `a_d` holds
    /// the value of the diagonal `j − i = n − d`.
    pub fn toeplitz(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "toeplitz structure needs m, n >= 1");
        let mut basis = Vec::with_capacity(m + n - 1);
        for d in 1..=(m + n - 1) {
            let offset = n as isize - d as isize;
            let mut entries = Vec::new();
            for i in 0..m as isize {
                let j = i + offset;
                if (0..n as isize).contains(&j) {
                    entries.push((i as usize, j as usize, 1.0));
                }
            }
            basis.push(BasisMatrix { entries });
        }
        Self { m, n, basis, abs_additive: true }
    }

    /// The full structure `{e_i e_jᵀ}` with `q = mn`; imposes no constraint
    /// and makes the structured condition numbers collapse to the
    /// unstructured ones. Basis order follows `vec(A)` (column-major).
    pub fn full(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "full structure needs m, n >= 1");
        let mut basis = Vec::with_capacity(m * n);
        for j in 0..n {
            for i in 0..m {
                basis.push(BasisMatrix { entries: vec![(i, j, 1.0)] });
            }
        }
        Self { m, n, basis, abs_additive: true }
    }

    pub fn q(&self) -> usize {
        self.basis.len()
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    /// Whether `|A| = Σ |a_i| |S_i|` is guaranteed (pairwise disjoint
    /// supports). The structured-vs-unstructured comparison of the
    /// condition numbers is only meaningful when this holds.
    pub fn abs_additive(&self) -> bool {
        self.abs_additive
    }

    /// Dense copy of `S_i` (0-based).
    pub fn basis_matrix(&self, i: usize) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.m, self.n);
        for &(r, c, v) in &self.basis[i].entries {
            s[(r, c)] = v;
        }
        s
    }

    /// `M^st = [vec(S_1) … vec(S_q)]`, the `mn × q` vectorized basis.
    pub fn vectorized(&self) -> DMatrix<f64> {
        let mut mst = DMatrix::zeros(self.m * self.n, self.q());
        for (d, s) in self.basis.iter().enumerate() {
            for &(i, j, v) in &s.entries {
                mst[(j * self.m + i, d)] = v;
            }
        }
        mst
    }

    /// `A = Σ a_i S_i`.
    pub fn assemble(&self, coords: &DVector<f64>) -> Result<DMatrix<f64>> {
        if coords.len() != self.q() {
            return Err(Error::DimensionMismatch {
                context: "coordinate length vs. basis size",
                expected: self.q(),
                found: coords.len(),
            });
        }
        let mut a = DMatrix::zeros(self.m, self.n);
        for (d, s) in self.basis.iter().enumerate() {
            let ad = coords[d];
            if ad != 0.0 {
                for &(i, j, v) in &s.entries {
                    a[(i, j)] += ad * v;
                }
            }
        }
        Ok(a)
    }

    /// Least-squares fit of `A` in the basis; errors with
    /// [`Error::NotInSubspace`] when the residual exceeds
    /// `1e-12 · ‖A‖_F`.
    pub fn decompose(&self, a: &DMatrix<f64>) -> Result<StructuredCoordinates> {
        if a.shape() != (self.m, self.n) {
            return Err(Error::DimensionMismatch {
                context: "matrix shape vs. structure shape",
                expected: self.m * self.n,
                found: a.nrows() * a.ncols(),
            });
        }
        let q = self.q();
        let mut gram = DMatrix::zeros(q, q);
        let mut rhs = DVector::zeros(q);
        for (d, s) in self.basis.iter().enumerate() {
            rhs[d] = s.entries.iter().map(|&(i, j, v)| v * a[(i, j)]).sum();
            for e in d..q {
                let dot = basis_dot(s, &self.basis[e]);
                gram[(d, e)] = dot;
                gram[(e, d)] = dot;
            }
        }
        let coords = gram.lu().solve(&rhs).ok_or(Error::DependentBasis)?;
        let fit = self.assemble(&coords)?;
        let residual = (a - fit).norm();
        let tol = DECOMPOSE_TOL * a.norm();
        if residual > tol {
            return Err(Error::NotInSubspace { residual, tol });
        }
        Ok(StructuredCoordinates { a: coords })
    }

    /// `S_i x`.
    fn apply_basis(&self, i: usize, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for &(r, c, v) in &self.basis[i].entries {
            out[r] += v * x[c];
        }
        out
    }

    /// `S_iᵀ r`.
    fn apply_basis_t(&self, i: usize, r: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n);
        for &(rr, c, v) in &self.basis[i].entries {
            out[c] += v * r[rr];
        }
        out
    }

    fn check_problem(&self, sol: &TlsSolution) -> Result<()> {
        if (sol.nrows(), sol.ncols()) != (self.m, self.n) {
            return Err(Error::DimensionMismatch {
                context: "problem shape vs. structure shape",
                expected: self.m * self.n,
                found: sol.nrows() * sol.ncols(),
            });
        }
        Ok(())
    }
}

fn basis_dot(a: &BasisMatrix, b: &BasisMatrix) -> f64 {
    // Entry lists are column-major sorted by construction.
    let mut sum = 0.0;
    let mut ai = a.entries.iter().peekable();
    let mut bi = b.entries.iter().peekable();
    while let (Some(&&(ar, ac, av)), Some(&&(br, bc, bv))) = (ai.peek(), bi.peek()) {
        let ka = (ac, ar);
        let kb = (bc, br);
        match ka.cmp(&kb) {
            std::cmp::Ordering::Less => {
                ai.next();
            }
            std::cmp::Ordering::Greater => {
                bi.next();
            }
            std::cmp::Ordering::Equal => {
                sum += av * bv;
                ai.next();
                bi.next();
            }
        }
    }
    sum
}

fn disjoint_supports(basis: &[BasisMatrix], m: usize, n: usize) -> bool {
    let mut seen = vec![false; m * n];
    for s in basis {
        for &(i, j, _) in &s.entries {
            let idx = j * m + i;
            if seen[idx] {
                return false;
            }
            seen[idx] = true;
        }
    }
    true
}

fn gram_full_rank(basis: &[BasisMatrix]) -> bool {
    let q = basis.len();
    let mut gram = DMatrix::zeros(q, q);
    for d in 0..q {
        for e in d..q {
            let dot = basis_dot(&basis[d], &basis[e]);
            gram[(d, e)] = dot;
            gram[(e, d)] = dot;
        }
    }
    match gram.try_svd(false, false, f64::EPSILON, 1000) {
        Some(svd) => {
            let s = &svd.singular_values;
            s[q - 1] > f64::EPSILON * (q as f64) * s[0]
        }
        None => false,
    }
}

/// The `n × q` matrix `V` of Lemma-level structured sensitivities,
/// `v_i = S_iᵀ r − W S_i x`, together with `L P⁻¹ V`.
#[derive(Debug, Clone)]
pub struct StructuredSensitivity {
    /// `n × q`.
    pub v: DMatrix<f64>,
    /// `L P⁻¹ V`, `k × q`.
    pub ns: DMatrix<f64>,
}

impl StructuredSensitivity {
    pub fn new(
        sol: &TlsSolution,
        sel: &Selection,
        structure: &LinearStructure,
    ) -> Result<Self> {
        structure.check_problem(sol)?;
        let v = v_matrix(sol, structure);
        // L P^{-1} V = ((P^{-1} L^T)^T) V since P is symmetric.
        let z1 = sol.solve_p(&sel.matrix().transpose())?.transpose();
        let ns = &z1 * &v;
        Ok(Self { v, ns })
    }
}

fn v_matrix(sol: &TlsSolution, structure: &LinearStructure) -> DMatrix<f64> {
    let w = w_matrix(sol);
    let mut v = DMatrix::zeros(structure.ncols(), structure.q());
    for d in 0..structure.q() {
        let col = structure.apply_basis_t(d, sol.residual()) - &w * structure.apply_basis(d, sol.x());
        v.set_column(d, &col);
    }
    v
}

/// Structured condition numbers of `L x` under perturbations of `(a, b)`.
#[derive(Debug, Clone, Copy)]
pub struct StructuredConditionReport {
    pub kappa_s_inf: f64,
    pub kappa_s_inf_rel: f64,
    pub kappa_s_c: f64,
    /// `√k · κ_{s,∞}`, an upper bound on the structured 2-norm condition
    /// number.
    pub kappa_s2_bound: f64,
}

/// Structured Fréchet derivative
/// `J_s(da, db) = L P⁻¹ V da + L P⁻¹ W db`, the restriction of the
/// unstructured derivative to directions `dA = Σ da_i S_i`.
pub fn structured_frechet(
    sol: &TlsSolution,
    sel: &Selection,
    structure: &LinearStructure,
    da: &DVector<f64>,
    db: &DVector<f64>,
) -> Result<DVector<f64>> {
    structure.check_problem(sol)?;
    if da.len() != structure.q() {
        return Err(Error::DimensionMismatch {
            context: "structured direction length vs. basis size",
            expected: structure.q(),
            found: da.len(),
        });
    }
    if db.len() != sol.nrows() {
        return Err(Error::DimensionMismatch {
            context: "direction vector length vs. problem rows",
            expected: sol.nrows(),
            found: db.len(),
        });
    }
    let v = v_matrix(sol, structure);
    let w = w_matrix(sol);
    let t = &v * da + &w * db;
    Ok(sel.matrix() * sol.apply_p_inverse_vec(&t)?)
}

/// Adjoint of [`structured_frechet`]:
/// `J_s*(u) = (Vᵀ P⁻¹ Lᵀ u, Wᵀ P⁻¹ Lᵀ u)`.
pub fn structured_frechet_adjoint(
    sol: &TlsSolution,
    sel: &Selection,
    structure: &LinearStructure,
    u: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    structure.check_problem(sol)?;
    if u.len() != sel.k() {
        return Err(Error::DimensionMismatch {
            context: "adjoint operand length vs. selection rows",
            expected: sel.k(),
            found: u.len(),
        });
    }
    let g = sol.apply_p_inverse_vec(&(sel.matrix().transpose() * u))?;
    let v = v_matrix(sol, structure);
    let w = w_matrix(sol);
    Ok((v.transpose() * &g, w.transpose() * &g))
}

fn structured_abs_vector(
    sol: &TlsSolution,
    sel: &Selection,
    structure: &LinearStructure,
    coords: &StructuredCoordinates,
) -> Result<DVector<f64>> {
    if coords.len() != structure.q() {
        return Err(Error::DimensionMismatch {
            context: "coordinate length vs. basis size",
            expected: structure.q(),
            found: coords.len(),
        });
    }
    let sens = StructuredSensitivity::new(sol, sel, structure)?;
    let core = SensitivityCore::new(sol, sel)?;
    let a = coords.coords();
    Ok(DVector::from_fn(sel.k(), |l, _| {
        let from_a: f64 = (0..structure.q())
            .map(|d| sens.ns[(l, d)].abs() * a[d].abs())
            .sum();
        from_a + core.h_abs_b[l]
    }))
}

/// Structured mixed condition number
/// `κ_{s,∞} = ‖|L𝓝_s| |a| + |L𝓗| |b|‖_∞` with `𝓝_s = P⁻¹V`, and its
/// relative version.
pub fn structured_mixed_cond(
    sol: &TlsSolution,
    sel: &Selection,
    structure: &LinearStructure,
    coords: &StructuredCoordinates,
) -> Result<(f64, f64)> {
    let h = structured_abs_vector(sol, sel, structure, coords)?;
    let kappa_s_inf = h.amax();
    let lx_inf = sel.apply(sol.x()).amax();
    if lx_inf == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    Ok((kappa_s_inf, kappa_s_inf / lx_inf))
}

/// Structured componentwise condition number
/// `κ_{s,c} = ‖D⁺_{Lx} (|L𝓝_s| |a| + |L𝓗| |b|)‖_∞`, with the same
/// zero-component convention as the unstructured `κ_c`.
pub fn structured_comp_cond(
    sol: &TlsSolution,
    sel: &Selection,
    structure: &LinearStructure,
    coords: &StructuredCoordinates,
) -> Result<f64> {
    let h = structured_abs_vector(sol, sel, structure, coords)?;
    Ok(dplus_inf_norm(&h, &sel.apply(sol.x())))
}

/// Computes the whole [`StructuredConditionReport`].
pub fn structured_report(
    sol: &TlsSolution,
    sel: &Selection,
    structure: &LinearStructure,
    coords: &StructuredCoordinates,
) -> Result<StructuredConditionReport> {
    let h = structured_abs_vector(sol, sel, structure, coords)?;
    let lx = sel.apply(sol.x());
    let lx_inf = lx.amax();
    if lx_inf == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    let kappa_s_inf = h.amax();
    Ok(StructuredConditionReport {
        kappa_s_inf,
        kappa_s_inf_rel: kappa_s_inf / lx_inf,
        kappa_s_c: dplus_inf_norm(&h, &lx),
        kappa_s2_bound: (sel.k() as f64).sqrt() * kappa_s_inf,
    })
}

/// Structured mixed condition number `m_s(A, b)` of the full solution via
/// the explicit matrices
///
/// `K = P⁻¹ (2Aᵀ (rrᵀ/‖r‖₂²) G(x) − Aᵀ G(x) + [I_n ⊗ rᵀ, 0])`,
/// `G(x) = [xᵀ, −1] ⊗ I_m`,
///
/// applied to the block-diagonal lift of the vectorized basis. Refuses
/// consistent systems (the formula divides by `‖r‖₂²`) and instances above
/// the size cap; cross-check only.
pub fn li_jia_oracle(
    sol: &TlsSolution,
    structure: &LinearStructure,
    coords: &StructuredCoordinates,
) -> Result<f64> {
    li_jia_oracle_with_cap(sol, structure, coords, DEFAULT_ORACLE_CAP)
}

pub fn li_jia_oracle_with_cap(
    sol: &TlsSolution,
    structure: &LinearStructure,
    coords: &StructuredCoordinates,
    cap: usize,
) -> Result<f64> {
    structure.check_problem(sol)?;
    if coords.len() != structure.q() {
        return Err(Error::DimensionMismatch {
            context: "coordinate length vs. basis size",
            expected: structure.q(),
            found: coords.len(),
        });
    }
    let (m, n) = (sol.nrows(), sol.ncols());
    if m * n > cap {
        return Err(Error::OracleTooLarge { entries: m * n, cap });
    }
    let r = sol.residual();
    let r_norm = r.norm();
    let b_norm = sol.problem().rhs().norm();
    if r_norm <= CONSISTENCY_FLOOR * b_norm.max(1.0) {
        return Err(Error::ConsistentSystem { residual_norm: r_norm });
    }

    let a = sol.problem().matrix();
    let x = sol.x();
    let pinv = sol.form_p().try_inverse().ok_or(Error::NotGeneric {
        gap: 0.0,
        v_last_last: sol.svd().v_last_last,
        tol: 0.0,
    })?;

    // C = 2 A^T r r^T / ||r||^2 - A^T, so the first two terms of K collapse
    // to C G(x) with G(x) = [x^T, -1] kron I_m.
    let at_r = a.transpose() * r;
    let c = &at_r * (r.transpose() * (2.0 / (r_norm * r_norm))) - a.transpose();

    // K has n rows and (n+1) m columns; build it blockwise.
    let cols = (n + 1) * m;
    let mut k_mat = DMatrix::zeros(n, cols);
    let pc = &pinv * &c;
    for jj in 0..=n {
        let sign = if jj < n { x[jj] } else { -1.0 };
        for i in 0..m {
            let col = jj * m + i;
            for l in 0..n {
                k_mat[(l, col)] = sign * pc[(l, i)];
            }
        }
    }
    // + P^{-1} [I_n kron r^T, 0]
    for j in 0..n {
        for i in 0..m {
            let col = j * m + i;
            for l in 0..n {
                k_mat[(l, col)] += pinv[(l, j)] * r[i];
            }
        }
    }

    // K M^st_{A,b} = [K_A M^st, K_b]; |.| applied, then |a|, |b| weights.
    let q = structure.q();
    let mut t = DVector::zeros(n);
    let mut col_buf = DVector::zeros(n);
    for d in 0..q {
        col_buf.fill(0.0);
        for &(i, j, v) in &structure.basis[d].entries {
            let col = j * m + i;
            for l in 0..n {
                col_buf[l] += k_mat[(l, col)] * v;
            }
        }
        let weight = coords.coords()[d].abs();
        for l in 0..n {
            t[l] += col_buf[l].abs() * weight;
        }
    }
    let b = sol.problem().rhs();
    for i in 0..m {
        let col = n * m + i;
        for l in 0..n {
            t[l] += k_mat[(l, col)].abs() * b[i].abs();
        }
    }

    let x_inf = x.amax();
    if x_inf == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    Ok(t.amax() / x_inf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::TlsProblem;
    use crate::solve::{solve_tls, DEFAULT_GENERICITY_TOL};
    use approx::assert_relative_eq;

    #[test]
    fn toeplitz_2x2() {
        let s = LinearStructure::toeplitz(2, 2);
        assert_eq!(s.q(), 3);
        assert!(s.abs_additive());
        // S_1 superdiagonal, S_2 main diagonal, S_3 subdiagonal.
        assert_eq!(s.basis_matrix(0), DMatrix::from_row_slice(2, 2, &[0., 1., 0., 0.]));
        assert_eq!(s.basis_matrix(1), DMatrix::identity(2, 2));
        assert_eq!(s.basis_matrix(2), DMatrix::from_row_slice(2, 2, &[0., 0., 1., 0.]));
    }

    #[test]
    fn toeplitz_covers_every_entry_once() {
        let s = LinearStructure::toeplitz(3, 2);
        assert_eq!(s.q(), 4);
        let sum = (0..s.q()).fold(DMatrix::zeros(3, 2), |acc, d| acc + s.basis_matrix(d));
        assert_eq!(sum, DMatrix::from_element(3, 2, 1.0));
    }

    #[test]
    fn toeplitz_example3_geometry() {
        let s = LinearStructure::toeplitz(200, 184);
        assert_eq!(s.q(), 383);
    }

    #[test]
    fn decompose_round_trip() {
        let s = LinearStructure::toeplitz(4, 3);
        let coords = s.decompose(&s.basis_matrix(1)).unwrap();
        let mut expected = DVector::zeros(6);
        expected[1] = 1.0;
        assert_relative_eq!(coords.coords(), &expected, max_relative = 1e-12);

        let zero = s.decompose(&DMatrix::zeros(4, 3)).unwrap();
        assert_eq!(zero.coords().amax(), 0.0);
    }

    #[test]
    fn decompose_rejects_outside_span() {
        let s = LinearStructure::toeplitz(3, 2);
        let mut a = DMatrix::zeros(3, 2);
        a[(0, 0)] = 1.0; // breaks the constant-diagonal pattern
        a[(1, 1)] = 2.0;
        assert!(matches!(s.decompose(&a), Err(Error::NotInSubspace { .. })));
    }

    #[test]
    fn rejects_dependent_basis() {
        let s1 = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let s2 = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let s3 = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        assert!(matches!(
            LinearStructure::new(vec![s1, s2, s3]),
            Err(Error::DependentBasis)
        ));
    }

    #[test]
    fn overlapping_independent_basis_not_abs_additive() {
        let s1 = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let s2 = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let s = LinearStructure::new(vec![s1, s2]).unwrap();
        assert!(!s.abs_additive());
    }

    #[test]
    fn structured_frechet_zero_direction() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let sol = solve_tls(&TlsProblem::new(a, b).unwrap(), DEFAULT_GENERICITY_TOL).unwrap();
        let s = LinearStructure::full(3, 2);
        let sel = Selection::identity(2);
        let j = structured_frechet(&sol, &sel, &s, &DVector::zeros(6), &DVector::zeros(3)).unwrap();
        assert_eq!(j.amax(), 0.0);
    }

    #[test]
    fn li_jia_refuses_consistent_system() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let sol = solve_tls(&TlsProblem::new(a, b).unwrap(), DEFAULT_GENERICITY_TOL).unwrap();
        let s = LinearStructure::full(3, 2);
        let coords = s.decompose(sol.problem().matrix()).unwrap();
        assert!(matches!(
            li_jia_oracle(&sol, &s, &coords),
            Err(Error::ConsistentSystem { .. })
        ));
    }
}
