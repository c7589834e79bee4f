use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register of {requested} qubits is outside the supported range 1..={max}")]
    RegisterSize { requested: usize, max: usize },

    #[error("basis index {index} does not fit in {n_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit {qubit} is out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("qubit {0} is used both as control and as target")]
    OverlappingQubits(usize),

    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("map is not a bijection on the basis states")]
    NotBijective,

    #[error("cannot measure an empty set of qubits")]
    EmptyMeasurement,

    #[error("{a} is not coprime to {modulus}")]
    NotCoprime { a: u64, modulus: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gave up after {attempts} attempts: {reason}")]
    AttemptsExhausted { attempts: usize, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of a randomized procedure, as opposed to bad input.
    pub fn is_algorithmic(&self) -> bool {
        matches!(self, Error::AttemptsExhausted { .. })
    }
}
