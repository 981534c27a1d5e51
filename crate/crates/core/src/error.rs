use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("column {0} outside chip of width {1}")]
    ColumnRange(usize, usize),
    #[error("rectangle {0} is not aligned to the {1}-row quantum")]
    Unaligned(String, usize),
    #[error("rectangle {0} lies outside the chip")]
    OutOfChip(String),
    #[error("invalid chip description: {0}")]
    InvalidChip(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown module id {0}")]
    UnknownModule(usize),
    #[error("self edge on module {0}")]
    SelfEdge(usize),
    #[error("dependency cycle: {}", fmt_cycle(.0))]
    Cycle(Vec<usize>),
    #[error("invalid benchmark parameters: {0}")]
    InvalidBench(String),
    #[error("module {0} cannot fit on the chip")]
    InfeasibleModule(usize),
    #[error("invalid partitioned sequence triple: {}", .0.join("; "))]
    InvalidPst(Vec<String>),
    #[error("empty candidate shape list for module {0}")]
    EmptyShapeList(usize),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("solver inconsistency: {0}")]
    Solver(String),
    #[error("{0}")]
    Undefined(String),
}

fn fmt_cycle(c: &[usize]) -> String {
    c.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" -> ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
