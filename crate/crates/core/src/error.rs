/// Errors produced by the solver, the condition-number formulas and the
/// perturbation harness.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("problem must be over-determined with m > n >= 1 (got m = {m}, n = {n})")]
    NotOverdetermined { m: usize, n: usize },

    #[error("dimension mismatch ({context}): expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("input contains non-finite entries")]
    NonFinite,

    #[error(
        "TLS problem is not generic: relative gap {gap:.3e}, |v_(n+1,n+1)| = {v_last_last:.3e}, \
         tolerance {tol:.3e}; no unique solution"
    )]
    NotGeneric { gap: f64, v_last_last: f64, tol: f64 },

    #[error("selection maps the solution to zero; relative quantity undefined")]
    SelectionNullSolution,

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("matrix is not in the span of the basis (fit residual {residual:.3e}, tolerance {tol:.3e})")]
    NotInSubspace { residual: f64, tol: f64 },

    #[error("basis matrices are linearly dependent")]
    DependentBasis,

    #[error("explicit oracle refused: {entries} matrix entries exceed the cap of {cap}")]
    OracleTooLarge { entries: usize, cap: usize },

    #[error("oracle requires an inconsistent system (residual norm {residual_norm:.3e})")]
    ConsistentSystem { residual_norm: f64 },

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
