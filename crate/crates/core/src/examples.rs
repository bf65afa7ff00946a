//! Generators for the three benchmark problems driven in the experiment
//! tables: a sparse badly scaled matrix, a random orthogonally-mixed
//! spectrum, and a Toeplitz deconvolution instance.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::problem::TlsProblem;
use crate::structured::{LinearStructure, StructuredCoordinates};

/// Sparse, badly scaled 9×4 instance: `a₁₁ = a₃₂ = δ`, `a₇₃ = a₉₄ = 1`,
/// `b` all ones. Its mixed/componentwise condition numbers are O(1) for
/// every `δ` while the normwise one grows like `1/δ`.
pub fn example1(delta: f64) -> Result<TlsProblem> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let mut a = DMatrix::zeros(9, 4);
    a[(0, 0)] = delta;
    a[(2, 1)] = delta;
    a[(6, 2)] = 1.0;
    a[(8, 3)] = 1.0;
    let b = DVector::from_element(9, 1.0);
    TlsProblem::new(a, b)
}

/// Random instance with pinned spectrum:
/// `[A, b] = Y [D; 0] Zᵀ` with Householder reflectors
/// `Y = I − 2yyᵀ`, `Z = I − 2zzᵀ` from seeded random unit vectors and
/// `D = diag(n, n−1, …, 1, 1−e_p)`, so `σ_{n+1}([A, b]) = |1 − e_p|`.
///
/// Draw order: `y` (m standard normals), then `z` (n+1).
pub fn example2(e_p: f64, m: usize, n: usize, seed: u64) -> Result<TlsProblem> {
    if !(e_p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "e_p must be positive, got {e_p}"
        )));
    }
    if m <= n + 1 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "example2 needs m > n + 1 >= 2, got m = {m}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = random_unit_vector(&mut rng, m);
    let z = random_unit_vector(&mut rng, n + 1);

    let mut ab = DMatrix::zeros(m, n + 1);
    for i in 0..n {
        ab[(i, i)] = (n - i) as f64;
    }
    ab[(n, n)] = 1.0 - e_p;

    // Y [D; 0] = [D; 0] - 2 y (y^T [D; 0])
    let yt_ab = y.transpose() * &ab;
    ab -= &y * yt_ab * 2.0;
    // ... Z^T applied from the right: M Z^T = M - 2 (M z) z^T.
    let ab_z = &ab * &z;
    ab -= ab_z * z.transpose() * 2.0;

    let a = ab.view((0, 0), (m, n)).into_owned();
    let b = ab.column(n).into_owned();
    TlsProblem::new(a, b)
}

/// Gaussian deconvolution instance: an `m × (m − 2ω)` banded Toeplitz
/// matrix whose first column carries a discrete Gaussian kernel, polluted
/// by a random Toeplitz perturbation `E` on the same band and a random
/// right-hand side shift `e`, both scaled to
/// `‖E‖₂/‖Ā‖₂ = ‖e‖₂/‖b̄‖₂ = γ` with `b̄` all ones.
///
/// Returns the problem, the Toeplitz structure and the coordinates of the
/// assembled `A`. Draw order: the `2ω+1` band values of `E`, then the `m`
/// entries of `e`.
pub fn example3(
    alpha: f64,
    omega: usize,
    m: usize,
    gamma: f64,
    seed: u64,
) -> Result<(TlsProblem, LinearStructure, StructuredCoordinates)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    if m <= 2 * omega + 1 {
        return Err(Error::InvalidParameter(format!(
            "example3 needs m > 2*omega + 1, got m = {m}, omega = {omega}"
        )));
    }
    let n = m - 2 * omega;
    let structure = LinearStructure::toeplitz(m, n);
    let q = structure.q();

    // Band values by first-column index i = 1..=2ω+1; coordinate index of
    // the diagonal j − i = 1 − i is d = n + i − 1 (1-based), i.e. n + i − 2
    // here.
    let kernel = |i: usize| -> f64 {
        let t = omega as f64 - i as f64 + 1.0;
        (-t * t / (2.0 * alpha * alpha)).exp() / (2.0 * std::f64::consts::PI * alpha * alpha).sqrt()
    };
    let mut abar_coords = DVector::zeros(q);
    for i in 1..=(2 * omega + 1) {
        abar_coords[n + i - 2] = kernel(i);
    }
    let abar = structure.assemble(&abar_coords)?;
    let bbar = DVector::from_element(m, 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut e_coords = DVector::zeros(q);
    for i in 1..=(2 * omega + 1) {
        e_coords[n + i - 2] = normal.sample(&mut rng);
    }
    let mut e_vec = DVector::from_fn(m, |_, _| normal.sample(&mut rng));

    let (e_mat, e_vec) = if gamma == 0.0 {
        (DMatrix::zeros(m, n), DVector::zeros(m))
    } else {
        let mut e_mat = structure.assemble(&e_coords)?;
        let scale_mat = gamma * spectral_norm(&abar)? / spectral_norm(&e_mat)?;
        e_mat *= scale_mat;
        let scale_vec = gamma * bbar.norm() / e_vec.norm();
        e_vec *= scale_vec;
        (e_mat, e_vec)
    };

    let a = &abar + e_mat;
    let b = &bbar + e_vec;
    let coords = structure.decompose(&a)?;
    let problem = TlsProblem::new(a, b)?;
    Ok((problem, structure, coords))
}

fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    m.clone()
        .try_svd(false, false, f64::EPSILON, 1000)
        .map(|svd| svd.singular_values[0])
        .ok_or(Error::SvdFailed)
}

fn random_unit_vector(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    let normal = StandardNormal;
    loop {
        let v = DVector::<f64>::from_fn(len, |_, _| normal.sample(rng));
        let norm = v.norm();
        if norm > 0.0 {
            return v / norm;
        }
    }
}
