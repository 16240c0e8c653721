//! Default tolerances. Every value here can be overridden from the CLI with
//! the matching `--tol-*` flag; reports always print the value in effect.

/// Relative geometric tolerance; multiplied by the bounding-box diameter.
pub const GEOM_REL: f64 = 1e-8;

/// Absolute compatibility tolerance for exact inputs.
pub const COMPAT_ABS: f64 = 1e-9;

/// Lift round trip on exact cones.
pub const LIFT: f64 = 1e-10;

/// Eigenvalue tolerance, relative to the spectral norm of the mass-normalized form.
pub const EIG_REL: f64 = 1e-8;

/// Stationarity tolerance, relative to total area, per unit test-field norm.
pub const STAT_REL: f64 = 1e-6;

/// Flatness threshold on max |A|^2.
pub const FLAT: f64 = 1e-8;

/// Corner angles on exact inputs (radians).
pub const ANGLE_EXACT: f64 = 1e-6;

/// Corner angles on relaxed inputs (radians).
pub const ANGLE_RELAXED: f64 = 1e-2;

/// Recursion depth for clipping straddling triangles against a sphere.
pub const CLIP_DEPTH: u32 = 3;

/// Partition-of-unity blend radius in mean edge lengths.
pub const BLEND_EDGES: f64 = 2.0;

/// Largest reduced dimension the dense constrained eigensolver accepts.
pub const MAX_DENSE_DIM: usize = 6000;

/// Consecutive area increases tolerated by the relaxer.
pub const DIVERGENCE_STEPS: usize = 10;

/// Deterministic retry grid for the paired test-field angle (degrees).
pub const W1_GRID_STEP_DEG: f64 = 11.25;
pub const W1_MAX_RETRIES: usize = 16;

/// Log-log slope of the analytic cutoff energy against n, compared with −1.
pub const SLOPE: f64 = 1e-12;

/// Spread over sheets of (φ₁ⁱ)² + (φ₂ⁱ)² at a junction vertex.
pub const PAIRED_IDENTITY: f64 = 1e-10;

/// Weighted curve-term cancellation along Γ.
pub const CURVE_CANCEL: f64 = 1e-8;

/// Edge length used when a corpus member is generated on the fly.
pub const GOLDEN_RESOLUTION: f64 = 0.1;
