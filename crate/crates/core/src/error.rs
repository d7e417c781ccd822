use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("lattice dimensions must be positive, got {rows}x{cols}")]
    EmptyLattice { rows: usize, cols: usize },
    #[error("{kind} index ({row},{col}) outside a {rows}x{cols} lattice")]
    InvalidIndex {
        kind: &'static str,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("configuration has a nontrivial {0} syndrome")]
    NontrivialSyndrome(&'static str),
    #[error("{0} defect(s) could not be joined inside the allowed region")]
    DefectJoining(usize),
    #[error("code of size {rows}x{cols} does not fit the {cap_rows}x{cap_cols} register")]
    Capacity {
        rows: usize,
        cols: usize,
        cap_rows: usize,
        cap_cols: usize,
    },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("invalid parameter: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
