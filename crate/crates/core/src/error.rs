use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("FCIDUMP format error: {0}")]
    Format(String),

    #[error("line {line}: orbital index {index} outside [0, {norb}]")]
    Index { line: usize, index: i64, norb: usize },

    #[error("line {line}: cannot parse `{token}` as a number")]
    Parse { line: usize, token: String },

    #[error("reduced Hamiltonian requires at least 2 electrons (got {0})")]
    ReducedHamiltonian(usize),

    #[error("orbital index {index} does not fit in {n_qubits} qubits")]
    IndexOverflow { index: usize, n_qubits: usize },

    #[error("orbital {0} listed more than once")]
    DuplicateOrbital(usize),

    #[error("generator is not anti-Hermitian (largest violation {0:.3e})")]
    NotAntiHermitian(f64),

    #[error("operator maps states outside the basis it was compiled for")]
    LeavesBasis,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("requested {requested} roots but the sector holds only {available}")]
    TooManyRoots { requested: usize, available: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal consistency fault: {0}")]
    Fault(String),

    #[error("no fixture for system `{system}` at R = {r}")]
    MissingFixture { system: String, r: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
