use thiserror::Error;

/// Every failure the kernel can report. The CLI maps these onto exit codes.
#[derive(Debug, Error)]
pub enum PlateauError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("orientability error: {0}")]
    Orientability(String),
    #[error("embedding error: {0}")]
    Embedding(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("degenerate triangle {triangle} (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("quadric fit is rank deficient at vertex {vertex} of patch {patch}")]
    FitRank { vertex: usize, patch: usize },
    #[error("field is not compatible (residual {residual:e} > {tol:e})")]
    IncompatibleField { residual: f64, tol: f64 },
    #[error("unknown complement region {0}")]
    RegionUnknown(usize),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("constrained subspace is empty")]
    EmptySubspace,
    #[error("mesh does not cover the ball of radius {radius} about the center (reach {reach})")]
    Extent { radius: f64, reach: f64 },
    #[error("complex is not stationary (residual {residual:e} > {tol:e})")]
    NotStationary { residual: f64, tol: f64 },
    #[error("area descent diverged at step {0}")]
    StepDivergence(usize),
    #[error("patch {0} is not flat")]
    NotFlat(usize),
    #[error("patch {patch} matches no planar region type: {reason}")]
    UnrecognizedRegion { patch: usize, reason: String },
    #[error("projection error: {0}")]
    Projection(String),
    #[error("no chain of sheets joins slot {from} to slot {to}")]
    Disconnected { from: usize, to: usize },
    #[error("normal angles vary along the junction by {deviation:e} rad (tolerance {tol:e})")]
    NoEquilibrium { deviation: f64, tol: f64 },
    #[error("test-field angle stays degenerate after {retries} retries")]
    AngleDegeneracy { retries: usize },
    #[error("unknown corpus '{0}'")]
    UnknownCorpus(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl PlateauError {
    /// Errors that mean "the input itself is malformed", as opposed to a
    /// numerical verdict failing.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            PlateauError::Parse(_)
                | PlateauError::Structure(_)
                | PlateauError::Orientability(_)
                | PlateauError::Embedding(_)
                | PlateauError::DegenerateTriangle { .. }
                | PlateauError::UnknownCorpus(_)
                | PlateauError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, PlateauError>;
