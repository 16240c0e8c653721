//! Discrete geometry kernel for minimal Plateau surfaces: non-manifold
//! complexes with Y-curves and T-points, compatible function spaces, first
//! and second variation, logarithmic-cutoff stability tests, flat
//! classification and weighted multiple-junction surfaces.

pub mod classify;
pub mod cli;
pub mod complex;
pub mod error;
pub mod funcspace;
pub mod geometry;
pub mod golden;
pub mod multijunction;
pub mod report;
pub mod tolerances;
pub mod variation;

pub use complex::{PlateauComplex, Vec3};
pub use error::{PlateauError, Result};
