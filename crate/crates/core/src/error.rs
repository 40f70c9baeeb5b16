use thiserror::Error;

/// Errors surfaced by the certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input to {op}")]
    NonFinite { op: &'static str },

    #[error("dimension mismatch in {op}: {detail}")]
    DimMismatch { op: &'static str, detail: String },

    #[error("mass not PSD (eigenvalue {min_eig:.3e} below -tol*lambda_max)")]
    MassNotPsd { min_eig: f64 },

    #[error("matrix is not special orthogonal (orthogonality defect {defect:.3e}, det {det:.6})")]
    NotSpecialOrthogonal { defect: f64, det: f64 },

    #[error("matrix is not in the modeled group (defect {defect:.3e})")]
    NotInGroup { defect: f64 },

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("torus mismatch: expected rank {expected}, got {got}")]
    TorusMismatch { expected: usize, got: usize },

    #[error("candidate map is not orthogonal (defect {defect:.3e})")]
    NotOrthogonal { defect: f64 },

    #[error("candidate map is not torus-equivariant (residual {residual:.3e})")]
    NotEquivariant { residual: f64 },

    #[error("exact-moment mode impossible: {0}")]
    NonPolynomial(String),

    #[error("scale factor must be symmetric in the first two radii")]
    AsymmetricScale,

    #[error("ambient form requires SU(2) lifts A, A' but none are present")]
    MissingLift,

    #[error("mismatched bases: {0}")]
    BasisMismatch(String),

    #[error("no isospectral partner found after {restarts} restarts (best residual {best:.3e})")]
    NoPartnerFound { restarts: usize, best: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
