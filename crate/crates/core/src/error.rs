use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (‖A − A*‖_F = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not an isometry (‖V*V − I‖_F = {deviation:.3e})")]
    NotIsometry { deviation: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("all input vectors are numerically zero")]
    EmptySpan,

    #[error("rank k = {k} outside [1, {n}]")]
    BadRank { k: usize, n: usize },

    #[error("rank hypothesis violated: {0}")]
    RankHypothesisViolated(String),

    #[error("kernel dimension {found} is below the required {required}")]
    MultiplicityTooSmall { found: usize, required: usize },

    #[error("lambda = {lambda} lies outside the rank-{k} range")]
    LambdaOutOfRange { lambda: f64, k: usize },

    #[error("bad pairing: {0}")]
    BadPairing(String),

    #[error("no (k1, k2) split fits the eigenspace dimensions (ker {kernel}, + {positive}, − {negative}, k = {k})")]
    InfeasibleSplit {
        k: usize,
        kernel: usize,
        positive: usize,
        negative: usize,
    },

    #[error("invalid construction parameters: {0}")]
    InvalidParameters(String),

    #[error("projection is not a compression witness (residual {residual:.3e})")]
    NotACompression { residual: f64 },

    #[error("degenerate recovery: {0}")]
    DegenerateRecovery(String),

    #[error("frame is not orthonormal (‖F*F − I‖_F = {deviation:.3e})")]
    FrameNotOrthonormal { deviation: f64 },

    #[error("{count} subsets exceed the enumeration cap of {cap}")]
    TooManySubsets { count: u128, cap: u128 },

    #[error("matrix is not normal (‖TT* − T*T‖_F = {deviation:.3e})")]
    NotNormal { deviation: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Format(String),
}
