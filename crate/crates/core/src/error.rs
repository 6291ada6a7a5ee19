use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    /// `b` or `c` vanishes: the surface is ruled at this point.
    #[error("degenerate coefficients at ({x}, {y}): b = {b}, c = {c} (ruled surface)")]
    Degenerate { x: f64, y: f64, b: f64, c: f64 },

    #[error("stencil of width {h} around ({x}, {y}) leaves the domain")]
    OutOfDomain { x: f64, y: f64, h: f64 },

    #[error("singular matrix (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("frame is not unimodular: det = {det}")]
    NonUnimodular { det: f64 },

    #[error("quadric check failed: {0}")]
    Quadric(String),

    #[error("not a Demoulin jet: P = {p}, Q = {q}")]
    NotDemoulin { p: f64, q: f64 },

    #[error("input is not trace-free: trace modulus {trace:e}")]
    NonzeroTrace { trace: f64 },

    #[error("spectral parameter must be nonzero")]
    ZeroLambda,

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error(
        "{matrix}[{row}][{col}] = {found} breaks the Wilczynski pattern (expected {expected})"
    )]
    PatternViolation {
        matrix: &'static str,
        row: usize,
        col: usize,
        found: f64,
        expected: f64,
    },

    #[error("internal consistency failure in {what}: deviation {deviation:e}")]
    Consistency { what: &'static str, deviation: f64 },

    #[error("projective chart fails at grid node ({i}, {j}) = ({x}, {y}): f0 = {f0:e}")]
    ChartFailure {
        i: usize,
        j: usize,
        x: f64,
        y: f64,
        f0: f64,
    },

    #[error("surface violates the compatibility equations (residual {residual:e})")]
    InvalidSurface { residual: f64 },

    #[error("invalid surface spec: {0}")]
    InvalidSpec(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
