use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("vector is not of unit length (|v| = {norm})")]
    NotUnit { norm: f64 },

    #[error("degree signature {degrees:?} does not sum to tensor order {order}")]
    DegreeMismatch { degrees: Vec<usize>, order: usize },

    #[error("phantom is not numerically supported in the cube: lost Gaussian mass {lost:e} exceeds {limit:e}")]
    PhantomSupport { lost: f64, limit: f64 },

    #[error("frequency {frequency:?} lies outside the Nyquist box |xi_j| <= {limit}")]
    OutsideNyquist { frequency: Vec<f64>, limit: f64 },

    #[error("singular constrained system at frequency {xi:?}")]
    Singular { xi: Vec<f64> },

    #[error("data not in the range of delta^{order} d^{order}: relative residual {residual:e} at frequency {xi:?}")]
    NotInRange {
        order: usize,
        residual: f64,
        xi: Vec<f64>,
    },

    #[error("incomplete dataset: missing signatures {missing:?}")]
    IncompleteDataset { missing: Vec<Vec<usize>> },

    #[error("inconsistent sinogram data: imaginary residue {residue:e} exceeds {limit:e}")]
    InconsistentData { residue: f64, limit: f64 },

    #[error("direction grid is not antipodally closed")]
    NotAntipodal,

    #[error("invalid Sobolev index: weight order t = {t} must exceed -n/2 = {bound}")]
    SobolevIndex { t: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
