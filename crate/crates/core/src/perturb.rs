//! Componentwise random perturbations `ΔA = ε ΔA₁ ⊙ A`, `Δb = ε Δb₁ ⊙ b`,
//! re-solves of the perturbed problems, relative error measures and the
//! experiment driver that validates the first-order bounds.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditioning::{condition_report, ConditionReport, Selection, SelectionSpec};
use crate::error::{Error, Result};
use crate::problem::TlsProblem;
use crate::solve::{solve_tls, TlsSolution};
use crate::structured::{structured_report, LinearStructure, StructuredConditionReport};

/// Multiplicative slack applied to the asymptotic first-order bounds when
/// flagging a trial as satisfied.
pub const BOUND_SLACK: f64 = 0.1;

/// How to draw perturbations.
///
/// Randomness comes from ChaCha8 seeded with `seed`; trial `t` of an
/// experiment reads stream `t` of that generator, so any trial can be
/// re-drawn independently of the others.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    /// Componentwise perturbation magnitude `ε`.
    pub epsilon: f64,
    pub seed: u64,
    /// When set, only the structure coordinates of `A` are perturbed:
    /// `Δa = ε Δa₁ ⊙ a`, lifted back through the basis.
    pub structured: Option<LinearStructure>,
}

impl PerturbationSpec {
    pub const DEFAULT_EPSILON: f64 = 1e-8;

    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "perturbation magnitude must be positive, got {epsilon}"
            )));
        }
        Ok(Self { epsilon, seed, structured: None })
    }

    pub fn with_structure(mut self, structure: LinearStructure) -> Self {
        self.structured = Some(structure);
        self
    }

    fn rng_for_trial(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

/// Uniform on the open interval `(−1, 1)`.
fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u != 0.0 {
            return 2.0 * u - 1.0;
        }
    }
}

/// Draws `(ΔA, Δb)` for stream 0 of the generator. Zero data entries stay
/// exactly zero.
pub fn gen_perturbation(
    problem: &TlsProblem,
    spec: &PerturbationSpec,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    gen_perturbation_for_trial(problem, spec, 0)
}

/// Draws `(ΔA, Δb)` for one trial stream. The draw order is fixed:
/// columns of `A` first (column-major), then `b`; for structured
/// perturbations, coordinates first, then `b`.
pub fn gen_perturbation_for_trial(
    problem: &TlsProblem,
    spec: &PerturbationSpec,
    trial: u64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let mut rng = spec.rng_for_trial(trial);
    let (m, n) = (problem.nrows(), problem.ncols());
    let a = problem.matrix();
    let eps = spec.epsilon;

    let da = match &spec.structured {
        None => {
            let mut da = DMatrix::zeros(m, n);
            for j in 0..n {
                for i in 0..m {
                    let u = uniform_open(&mut rng);
                    let aij = a[(i, j)];
                    if aij != 0.0 {
                        da[(i, j)] = eps * u * aij;
                    }
                }
            }
            da
        }
        Some(structure) => {
            let coords = structure.decompose(a)?;
            let q = structure.q();
            let mut delta = DVector::zeros(q);
            for d in 0..q {
                let u = uniform_open(&mut rng);
                let ad = coords.coords()[d];
                if ad != 0.0 {
                    delta[d] = eps * u * ad;
                }
            }
            structure.assemble(&delta)?
        }
    };

    let b = problem.rhs();
    let mut db = DVector::zeros(m);
    for i in 0..m {
        let u = uniform_open(&mut rng);
        if b[i] != 0.0 {
            db[i] = eps * u * b[i];
        }
    }
    Ok((da, db))
}

/// Normwise, mixed and componentwise relative errors of `L x̃` against
/// `L x`. The componentwise norm is taken with respect to `L x`, so
/// `‖Lx‖_c = 1` and `r_c = max_i |(LΔx)_i| / |(Lx)_i|` over nonzero
/// components.
pub fn relative_errors(
    sol: &TlsSolution,
    sol_pert: &TlsSolution,
    sel: &Selection,
) -> Result<(f64, f64, f64)> {
    if sol.ncols() != sol_pert.ncols() {
        return Err(Error::DimensionMismatch {
            context: "perturbed solution length vs. base solution length",
            expected: sol.ncols(),
            found: sol_pert.ncols(),
        });
    }
    let lx = sel.apply(sol.x());
    let lxp = sel.apply(sol_pert.x());
    let dx = &lxp - &lx;

    let norm2 = lx.norm();
    let norm_inf = lx.amax();
    if norm2 == 0.0 || norm_inf == 0.0 {
        return Err(Error::SelectionNullSolution);
    }
    let r2 = dx.norm() / norm2;
    let rinf = dx.amax() / norm_inf;

    let mut rc = 0.0f64;
    let mut any_nonzero = false;
    for i in 0..lx.len() {
        if lx[i] != 0.0 {
            any_nonzero = true;
            rc = rc.max(dx[i].abs() / lx[i].abs());
        }
    }
    if !any_nonzero {
        return Err(Error::SelectionNullSolution);
    }
    Ok((r2, rinf, rc))
}

/// Errors of one perturbed solve against the first-order bounds
/// `condition number × ε`.
#[derive(Debug, Clone, Copy)]
pub struct TrialResult {
    pub r2_rel: f64,
    pub rinf_rel: f64,
    pub rc_rel: f64,
    /// `cond_rel · ε`.
    pub bound_2: f64,
    /// `κ_∞ʳᵉˡ · ε` (structured variant when perturbations are structured).
    pub bound_inf: f64,
    /// `κ_c · ε` (structured variant when perturbations are structured).
    pub bound_c: f64,
    pub satisfied_2: bool,
    pub satisfied_inf: bool,
    pub satisfied_c: bool,
}

impl TrialResult {
    fn new(errors: (f64, f64, f64), bounds: (f64, f64, f64)) -> Self {
        let (r2_rel, rinf_rel, rc_rel) = errors;
        let (bound_2, bound_inf, bound_c) = bounds;
        let slack = 1.0 + BOUND_SLACK;
        Self {
            r2_rel,
            rinf_rel,
            rc_rel,
            bound_2,
            bound_inf,
            bound_c,
            satisfied_2: r2_rel <= slack * bound_2,
            satisfied_inf: rinf_rel <= slack * bound_inf,
            satisfied_c: rc_rel <= slack * bound_c,
        }
    }
}

/// Results for one selection across all trials.
#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub label: String,
    pub k: usize,
    pub condition: ConditionReport,
    pub structured: Option<StructuredConditionReport>,
    /// One entry per successful trial, in trial order.
    pub results: Vec<TrialResult>,
    /// Componentwise worst case over the successful trials; `None` when
    /// every trial failed to solve.
    pub worst: Option<TrialResult>,
}

/// Output of [`run_experiment`]: condition numbers and per-trial errors for
/// each selection, deterministic in `(seed, trials)`.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub epsilon: f64,
    pub seed: u64,
    pub trials: usize,
    /// Indices of trials whose perturbed problem lost genericity.
    pub failed_trials: Vec<usize>,
    pub rows: Vec<ExperimentRow>,
}

/// Solves the base problem once, computes every condition number per
/// selection, then re-solves `trials` perturbed copies and records the
/// relative errors against the first-order bounds.
pub fn run_experiment(
    problem: &TlsProblem,
    selections: &[SelectionSpec],
    spec: &PerturbationSpec,
    trials: usize,
    tol: f64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("experiment needs at least one trial".into()));
    }
    if selections.is_empty() {
        return Err(Error::InvalidParameter("experiment needs at least one selection".into()));
    }
    let base = solve_tls(problem, tol)?;

    let structured_ctx = match &spec.structured {
        Some(structure) => {
            let coords = structure.decompose(problem.matrix())?;
            Some((structure, coords))
        }
        None => None,
    };

    let mut rows = Vec::with_capacity(selections.len());
    let mut resolved = Vec::with_capacity(selections.len());
    for s in selections {
        let sel = s.resolve(base.x())?;
        let condition = condition_report(&base, &sel)?;
        let structured = match &structured_ctx {
            Some((structure, coords)) => {
                Some(structured_report(&base, &sel, structure, coords)?)
            }
            None => None,
        };
        let bounds = match &structured {
            Some(sr) => (
                condition.cond_rel * spec.epsilon,
                sr.kappa_s_inf_rel * spec.epsilon,
                sr.kappa_s_c * spec.epsilon,
            ),
            None => (
                condition.cond_rel * spec.epsilon,
                condition.kappa_inf_rel * spec.epsilon,
                condition.kappa_c * spec.epsilon,
            ),
        };
        rows.push(ExperimentRow {
            label: s.label(),
            k: sel.k(),
            condition,
            structured,
            results: Vec::new(),
            worst: None,
        });
        resolved.push((sel, bounds));
    }

    let mut failed_trials = Vec::new();
    for t in 0..trials {
        let (da, db) = gen_perturbation_for_trial(problem, spec, t as u64)?;
        let perturbed = problem.perturbed(&da, &db)?;
        let pert_sol = match solve_tls(&perturbed, tol) {
            Ok(sol) => sol,
            Err(Error::NotGeneric { .. }) => {
                failed_trials.push(t);
                continue;
            }
            Err(e) => return Err(e),
        };
        for (row, (sel, bounds)) in rows.iter_mut().zip(&resolved) {
            let errors = relative_errors(&base, &pert_sol, sel)?;
            row.results.push(TrialResult::new(errors, *bounds));
        }
    }

    for row in &mut rows {
        row.worst = row.results.iter().copied().reduce(|acc, tr| TrialResult {
            r2_rel: acc.r2_rel.max(tr.r2_rel),
            rinf_rel: acc.rinf_rel.max(tr.rinf_rel),
            rc_rel: acc.rc_rel.max(tr.rc_rel),
            satisfied_2: acc.satisfied_2 && tr.satisfied_2,
            satisfied_inf: acc.satisfied_inf && tr.satisfied_inf,
            satisfied_c: acc.satisfied_c && tr.satisfied_c,
            ..acc
        });
    }

    Ok(ExperimentReport {
        epsilon: spec.epsilon,
        seed: spec.seed,
        trials,
        failed_trials,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::DEFAULT_GENERICITY_TOL;

    fn toy_problem() -> TlsProblem {
        let a = DMatrix::from_row_slice(
            4,
            2,
            &[1.0, 0.2, 0.0, 1.0, 0.5, 0.0, 1.0, 1.0],
        );
        let b = DVector::from_vec(vec![1.0, 2.0, 0.5, 3.0]);
        TlsProblem::new(a, b).unwrap()
    }

    #[test]
    fn perturbation_is_deterministic() {
        let p = toy_problem();
        let spec = PerturbationSpec::new(1e-8, 42).unwrap();
        let (da1, db1) = gen_perturbation(&p, &spec).unwrap();
        let (da2, db2) = gen_perturbation(&p, &spec).unwrap();
        assert_eq!(da1, da2);
        assert_eq!(db1, db2);
        // Different trial stream, different draw.
        let (da3, _) = gen_perturbation_for_trial(&p, &spec, 1).unwrap();
        assert_ne!(da1, da3);
    }

    #[test]
    fn zero_entries_stay_zero() {
        let mut a = DMatrix::from_element(4, 3, 1.0);
        a.set_column(1, &DVector::zeros(4));
        let b = DVector::from_vec(vec![1.0, 0.0, 2.0, 3.0]);
        let p = TlsProblem::new(a, b).unwrap();
        let spec = PerturbationSpec::new(1e-8, 7).unwrap();
        let (da, db) = gen_perturbation(&p, &spec).unwrap();
        assert_eq!(da.column(1).amax(), 0.0);
        assert_eq!(db[1], 0.0);
    }

    #[test]
    fn perturbations_respect_componentwise_envelope() {
        let p = toy_problem();
        for seed in 0..1000u64 {
            let spec = PerturbationSpec::new(1e-8, seed).unwrap();
            let (da, db) = gen_perturbation(&p, &spec).unwrap();
            for j in 0..p.ncols() {
                for i in 0..p.nrows() {
                    assert!(da[(i, j)].abs() <= 1e-8 * p.matrix()[(i, j)].abs());
                }
            }
            for i in 0..p.nrows() {
                assert!(db[i].abs() <= 1e-8 * p.rhs()[i].abs());
            }
        }
    }

    #[test]
    fn identical_solutions_have_zero_errors() {
        let p = toy_problem();
        let sol = solve_tls(&p, DEFAULT_GENERICITY_TOL).unwrap();
        let sel = Selection::identity(2);
        let (r2, rinf, rc) = relative_errors(&sol, &sol, &sel).unwrap();
        assert_eq!((r2, rinf, rc), (0.0, 0.0, 0.0));
    }

    #[test]
    fn single_component_errors_coincide() {
        let p = toy_problem();
        let sol = solve_tls(&p, DEFAULT_GENERICITY_TOL).unwrap();
        let spec = PerturbationSpec::new(1e-6, 3).unwrap();
        let (da, db) = gen_perturbation(&p, &spec).unwrap();
        let pert = solve_tls(&p.perturbed(&da, &db).unwrap(), DEFAULT_GENERICITY_TOL).unwrap();
        let sel = Selection::index(2, 0).unwrap();
        let (r2, rinf, rc) = relative_errors(&sol, &pert, &sel).unwrap();
        assert_eq!(r2, rinf);
        assert_eq!(rinf, rc);
        assert!(r2 > 0.0);
    }

    #[test]
    fn experiment_rejects_zero_trials() {
        let p = toy_problem();
        let spec = PerturbationSpec::new(1e-8, 1).unwrap();
        assert!(matches!(
            run_experiment(&p, &[SelectionSpec::Identity], &spec, 0, DEFAULT_GENERICITY_TOL),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn experiment_is_deterministic() {
        let p = toy_problem();
        let spec = PerturbationSpec::new(1e-8, 5).unwrap();
        let sels = [SelectionSpec::Identity, SelectionSpec::MaxComponent];
        let r1 = run_experiment(&p, &sels, &spec, 5, DEFAULT_GENERICITY_TOL).unwrap();
        let r2 = run_experiment(&p, &sels, &spec, 5, DEFAULT_GENERICITY_TOL).unwrap();
        assert_eq!(r1.rows.len(), r2.rows.len());
        for (a, b) in r1.rows.iter().zip(&r2.rows) {
            assert_eq!(a.results.len(), b.results.len());
            for (ta, tb) in a.results.iter().zip(&b.results) {
                assert_eq!(ta.r2_rel.to_bits(), tb.r2_rel.to_bits());
                assert_eq!(ta.rc_rel.to_bits(), tb.rc_rel.to_bits());
            }
        }
    }
}
