//! First and second variation of area, the constrained stability spectrum,
//! the logarithmic-cutoff test, and area-descent relaxation.

mod cutoff;
mod first;
mod form;
mod relax;
mod spectrum;

pub use cutoff::{
    bernstein_test, cone_link_angles, cutoff_gradient_sq, log_cutoff, loglog_slope, mesh_reach, zeta,
    BernsteinReport, BernsteinRow, CutoffField, CutoffMode,
};
pub use first::{first_variation, stationarity, StationarityReport};
pub use form::{assemble_second_variation, direct_second_variation, Analysis, FormOptions, VariationForm};
pub use relax::{area_gradient, relax_to_minimal, shape_diagnostics, suggested_dt, RelaxReport, ShapeDiagnostics};
pub use spectrum::{compatible_basis, reduced_matrix, stability_spectrum, Spectrum};
