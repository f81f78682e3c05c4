use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index {index} out of range (limit {limit})")]
    Bounds { index: usize, limit: usize },

    #[error("conflicting values for integral {key}: {first} vs {second}")]
    Consistency { key: String, first: f64, second: f64 },

    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dense operator on {n_qubits} qubits exceeds the {limit}-qubit guard")]
    DimensionGuard { n_qubits: usize, limit: usize },

    #[error("particle-number sector with {n_electrons} electrons on {n_qubits} qubits is empty")]
    EmptySector { n_electrons: usize, n_qubits: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
