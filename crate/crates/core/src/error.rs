use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("a certified or exact lambda_sup is required for this claim (got a heuristic estimate)")]
    CertificationRequired,

    #[error("epsilon-net budget exceeded: {required} points required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("entanglement not detected: delta = {delta:.6e} is not positive")]
    NotDetected { delta: f64 },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
