use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// q must lie in (0, 1].
    InvalidQ(f64),
    /// Evaluation point outside [0, 1] (or NaN).
    PointOutOfRange(f64),
    /// Index outside `0..=n`.
    IndexOutOfRange { index: usize, n: usize },
    /// Degree must be at least 1.
    InvalidDegree(usize),
    /// A function sample violated nonnegativity (or was not finite).
    NegativeSample { x: f64, value: f64 },
    /// alpha must be an integer >= 2.
    InvalidAlpha(u32),
    /// Grid needs at least two points.
    InvalidGrid(usize),
    /// delta / eps must be nonnegative (resp. positive) and finite.
    InvalidScale(f64),
    /// Both numerator and denominator maxima vanished.
    DegenerateRatio { x: f64 },
    /// Kernel ratio requested where p_{n,j}(x; q) = 0.
    DegenerateDenominator { j: usize, x: f64 },
    /// A summability row reaches past the available sequence terms.
    Truncated {
        row: usize,
        needed: usize,
        available: usize,
    },
    /// Row index must start at 1.
    InvalidRow(usize),
    /// Custom matrix entries must be finite and nonnegative.
    NegativeEntry {
        row: usize,
        column: usize,
        value: f64,
    },
    /// Trend horizon below the minimum.
    HorizonTooShort { n_max: usize, minimum: usize },
    /// Piecewise-linear knots must be increasing and span [0, 1].
    InvalidKnots,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidQ(q) => write!(f, "q must lie in (0, 1], got {q}"),
            Error::PointOutOfRange(x) => write!(f, "x must lie in [0, 1], got {x}"),
            Error::IndexOutOfRange { index, n } => {
                write!(f, "index {index} outside 0..={n}")
            }
            Error::InvalidDegree(n) => write!(f, "degree must be positive, got {n}"),
            Error::NegativeSample { x, value } => {
                write!(f, "function is not nonnegative: f({x}) = {value}")
            }
            Error::InvalidAlpha(a) => write!(f, "alpha must be >= 2, got {a}"),
            Error::InvalidGrid(g) => write!(f, "grid needs at least 2 points, got {g}"),
            Error::InvalidScale(d) => write!(f, "invalid scale parameter {d}"),
            Error::DegenerateRatio { x } => {
                write!(f, "both maxima vanish at x = {x}")
            }
            Error::DegenerateDenominator { j, x } => {
                write!(f, "p_(n,{j})({x}) = 0, kernel ratio undefined")
            }
            Error::Truncated {
                row,
                needed,
                available,
            } => write!(
                f,
                "row {row} needs {needed} sequence terms, only {available} available"
            ),
            Error::InvalidRow(n) => write!(f, "row index must be >= 1, got {n}"),
            Error::NegativeEntry { row, column, value } => {
                write!(
                    f,
                    "matrix entry a[{row}][{column}] = {value} is not a finite nonnegative number"
                )
            }
            Error::HorizonTooShort { n_max, minimum } => {
                write!(f, "horizon {n_max} is below the minimum {minimum}")
            }
            Error::InvalidKnots => write!(f, "knots must be strictly increasing from 0 to 1"),
        }
    }
}

impl core::error::Error for Error {}
