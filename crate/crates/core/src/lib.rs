//! Total least squares by the SVD method, with normwise, mixed,
//! componentwise and structured condition numbers of a linear function
//! `L x` of the solution, and a perturbation harness that validates the
//! first-order error bounds experimentally.
//!
//! The entry points are [`solve_tls`] and [`conditioning::condition_report`];
//! structured (e.g. Toeplitz) analysis lives in [`structured`] and the
//! Monte-Carlo machinery in [`perturb`].
//!
//! All types are immutable after construction and all operations are pure
//! functions, safe to call concurrently.

pub mod conditioning;
pub mod error;
pub mod examples;
pub mod perturb;
pub mod problem;
pub mod solve;
pub mod structured;

pub use conditioning::{
    comp_cond, condition_report, frechet_adjoint, frechet_apply, mixed_cond, normwise_cond,
    two_norm_bound, upper_bounds, zhou_oracle, ConditionReport, Selection, SelectionSpec,
    SensitivityCore,
};
pub use error::{Error, Result};
pub use perturb::{
    gen_perturbation, relative_errors, run_experiment, ExperimentReport, ExperimentRow,
    PerturbationSpec, TrialResult,
};
pub use problem::TlsProblem;
pub use solve::{
    check_genericity, solve_tls, GenericityReport, PinvFactors, SvdBundle, TlsSolution,
    DEFAULT_GENERICITY_TOL,
};
pub use structured::{
    li_jia_oracle, structured_comp_cond, structured_frechet, structured_frechet_adjoint,
    structured_mixed_cond, structured_report, LinearStructure, StructuredConditionReport,
    StructuredCoordinates, StructuredSensitivity,
};
