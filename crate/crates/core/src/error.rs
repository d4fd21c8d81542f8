use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("triangle {elem} has non-positive signed area {area:e}")]
    Orientation { elem: usize, area: f64 },

    #[error("selector syntax error at position {pos}: {msg}")]
    SelectorSyntax { pos: usize, msg: String },

    #[error("unknown identifier `{0}` in selector")]
    UnknownIdentifier(String),

    #[error("unsupported quadrature order {order} (supported: 1..={max})")]
    QuadratureOrder { order: usize, max: usize },

    #[error("unknown finite element space `{0}` (expected P1, P2 or P3)")]
    UnknownSpace(String),

    #[error("term syntax error at position {pos} in `{input}`: {msg}")]
    TermSyntax {
        input: String,
        pos: usize,
        msg: String,
    },

    #[error("unknown derivative tag `{0}` (expected val, dx, dy or grad)")]
    UnknownTag(String),

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("symbol `{0}` is not listed in the symbol table")]
    UnknownSymbol(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("sparse index ({row}, {col}) out of range for {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("boundary region {index} out of range ({count} regions)")]
    RegionOutOfRange { index: usize, count: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Newton iteration diverged at iterate {iterate} (increment {increment:e})")]
    Diverged { iterate: usize, increment: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
