use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum EqsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty Pauli word")]
    EmptyWord,

    #[error("invalid Pauli letter '{0}'")]
    InvalidPauliLetter(char),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("decoded state left the embedding manifold (norm {norm})")]
    OffManifold { norm: f64 },

    #[error("wrong qubit count: expected {expected}, found {found}")]
    WrongQubitCount { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {n}-qubit register")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),

    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },

    #[error("unsupported readout target {0}")]
    UnsupportedObservable(String),

    #[error("observable {0} is not accessible through the FID")]
    NotAccessible(String),

    #[error("spins {a} and {b} have zero J-coupling")]
    ZeroCoupling { a: usize, b: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("register of {n} qubits exceeds the limit of {limit}")]
    RegisterTooLarge { n: usize, limit: usize },

    #[error("GRAPE did not reach fidelity {target} (best {achieved:.6})")]
    NotConverged { achieved: f64, target: f64 },

    #[error("pulse for {context} did not reach fidelity {target} (best {achieved:.6})")]
    PulseSynthesis {
        context: String,
        achieved: f64,
        target: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing molecule configuration for level '{0}'")]
    MissingMolecule(String),

    #[error("nothing to emit")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = EqsError> = std::result::Result<T, E>;
