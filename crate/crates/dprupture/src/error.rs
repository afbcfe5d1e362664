use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: {needed} nodes required for the boundary closures, got {got}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("unsupported operator request: {0}")]
    Unsupported(String),

    #[error("operator construction failed: {0}")]
    Construction(String),

    #[error("dispersion tolerance {requested} infeasible with the configured stencil width (achieved {achieved})")]
    ToleranceInfeasible { requested: f64, achieved: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed operator: {0}")]
    Malformed(String),

    #[error("symbol fit failed: {0}")]
    SymbolFit(String),

    #[error("folded mesh: non-positive Jacobian {jacobian} at node ({i}, {j}, {k})")]
    FoldedMesh { i: usize, j: usize, k: usize, jacobian: f64 },

    #[error("degenerate face basis at node {node}: reference vector parallel to the normal")]
    DegenerateBasis { node: usize },

    #[error("invalid material: {0}")]
    Material(String),

    #[error("invalid friction parameters: {0}")]
    Friction(String),

    #[error("negative slip or slip rate: {0}")]
    Domain(f64),

    #[error("tensile normal stress {sigma_n} MPa on the fault")]
    TensileFault { sigma_n: f64 },

    #[error("slip-rate solve did not converge: bracket [{lo}, {hi}]")]
    SolverDivergence { lo: f64, hi: f64 },

    #[error("solution diverged at step {step}, t = {time}")]
    Divergence { step: usize, time: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("scenario precondition violated: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
