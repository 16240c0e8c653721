//! The `plateau` command line: argument parsing, input loading with
//! digests, one handler per subcommand, and exit-code mapping.

use std::ffi::OsString;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::classify::{classify_flat, FlatTag};
use crate::complex::{assign_signs, check_embedding, save_complex, LocalModel, MeshFile, PlateauComplex, Vec3};
use crate::error::{PlateauError, Result};
use crate::funcspace::{
    check_compatible, lift_to_vector_field, restrict_normal_component, CompatTolerance, FieldFile,
};
use crate::geometry::{area_growth_constant, check_triangles, compute_curvature};
use crate::golden::{generate_golden, CORPUS};
use crate::multijunction::{
    appendix_bernstein_test, build_paired_test_fields, check_equilibrium_angles, curve_term_cancellation,
    weighted_stability_form, MultiFile, MultiJunctionSurface, SurfacePoint,
};
use crate::report::{InputDigest, RunReport, ToleranceEntry};
use crate::tolerances as tol;
use crate::variation::{
    assemble_second_variation, bernstein_test, relax_to_minimal, stability_spectrum, stationarity, suggested_dt,
    Analysis, BernsteinRow, CutoffMode, FormOptions,
};

#[derive(Debug, Parser)]
#[command(name = "plateau", version, about = "Stability and classification tools for discrete Plateau complexes")]
pub struct Cli {
    /// Emit the machine-readable report instead of the human one.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides for every documented tolerance.
#[derive(Debug, Clone, Default, Args)]
pub struct TolArgs {
    /// Absolute geometric tolerance (default 1e-8 × bounding-box diameter).
    #[arg(long, global = true, value_name = "X")]
    pub tol_geom: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    pub tol_compat: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    pub tol_lift: Option<f64>,
    /// Relative to the spectral norm of the reduced form.
    #[arg(long, global = true, value_name = "X")]
    pub tol_eig: Option<f64>,
    /// Relative to the (weighted) total area.
    #[arg(long, global = true, value_name = "X")]
    pub tol_stat: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    pub tol_flat: Option<f64>,
    /// Radians.
    #[arg(long, global = true, value_name = "X")]
    pub tol_angle: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    pub tol_slope: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    pub tol_identity: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    pub tol_cancel: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a mesh and report its structure.
    Validate { file: PathBuf },
    /// Areas in balls, growth constant, curvature and stationarity.
    Measure {
        file: PathBuf,
        #[arg(long, value_parser = parse_point, default_value = "0,0,0")]
        center: Vec3,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
    },
    /// Compatible-field operations.
    Field {
        #[command(subcommand)]
        op: FieldOp,
    },
    /// Smallest eigenvalues of the second variation on compatible fields.
    Spectrum {
        mesh: PathBuf,
        #[arg(short = 'k', default_value_t = 6)]
        k: usize,
    },
    /// Logarithmic-cutoff test.
    Bernstein {
        mesh: PathBuf,
        #[arg(long, value_parser = parse_point, default_value = "0,0,0")]
        center: Vec3,
        #[arg(long = "n", value_parser = parse_ns, default_value = "1..8")]
        n: NList,
        #[arg(long)]
        analytic_cone: bool,
    },
    /// Area descent towards a minimal complex.
    Relax {
        mesh: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Step size (default 0.05 × shortest edge²).
        #[arg(long)]
        dt: Option<f64>,
        /// Write the relaxed mesh here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a flat complex.
    Classify {
        mesh: PathBuf,
        /// Write the planar cross-section network here.
        #[arg(long, value_name = "OUT")]
        emit_network: Option<PathBuf>,
    },
    /// Weighted multiple-junction surfaces.
    Multi {
        #[command(subcommand)]
        op: MultiOp,
    },
    /// Write a corpus mesh (NAME may be `all` with --out naming a directory).
    Golden {
        name: String,
        #[arg(long, default_value_t = tol::GOLDEN_RESOLUTION)]
        resolution: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FieldOp {
    /// Check the compatibility conditions of a scalar field.
    Check {
        mesh: PathBuf,
        field: PathBuf,
        /// Scale the tolerance by max |f|.
        #[arg(long)]
        relative: bool,
    },
    /// Realize a compatible scalar field as an ambient vector field.
    Lift {
        mesh: PathBuf,
        field: PathBuf,
        #[arg(long)]
        relative: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal components of a vector field.
    Restrict {
        mesh: PathBuf,
        field: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Sheet of the center point (default: first sheet on Γ).
    #[arg(long)]
    pub sheet: Option<usize>,
    /// Vertex of the center point (default: middle vertex of Γ).
    #[arg(long)]
    pub vertex: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum MultiOp {
    /// Weighted stationarity, equilibrium angles and paired-field identities.
    Check {
        file: PathBuf,
        #[command(flatten)]
        at: PointArgs,
    },
    /// Spectrum of the weighted second variation.
    Spectrum {
        file: PathBuf,
        #[arg(short = 'k', default_value_t = 6)]
        k: usize,
    },
    /// Weighted logarithmic-cutoff test with paired fields.
    Bernstein {
        file: PathBuf,
        #[command(flatten)]
        at: PointArgs,
        #[arg(long = "n", value_parser = parse_ns, default_value = "1..8")]
        n: NList,
        #[arg(long)]
        analytic_cone: bool,
        /// Angle of W₁ from the reference normal, degrees.
        #[arg(long, default_value_t = 20.0)]
        w1_deg: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NList(pub Vec<f64>);

fn parse_point(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("expected three finite coordinates x,y,z, got '{s}'")),
    }
}

/// `a..b` (inclusive integer range) or a comma list of positive numbers.
fn parse_ns(s: &str) -> std::result::Result<NList, String> {
    let ns: Vec<f64> = if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|e| format!("range start: {e}"))?;
        let b: u32 = b.trim().parse().map_err(|e| format!("range end: {e}"))?;
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).map(f64::from).collect()
    } else {
        s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"))).collect::<std::result::Result<_, _>>()?
    };
    if ns.is_empty() || ns.iter().any(|n| !(*n > 0.0 && n.is_finite())) {
        return Err(format!("n values must be positive, got '{s}'"));
    }
    Ok(NList(ns))
}

/// Tolerances in effect for one run.
#[derive(Debug, Clone, Copy)]
struct Tols {
    geom: Option<f64>,
    compat: f64,
    lift: f64,
    eig: f64,
    stat: f64,
    flat: f64,
    angle: f64,
    slope: f64,
    identity: f64,
    cancel: f64,
}

impl Tols {
    fn resolve(a: &TolArgs, rep: &mut RunReport) -> Self {
        let mut take = |name: &str, flag: Option<f64>, default: f64| {
            let value = flag.unwrap_or(default);
            rep.tolerances.insert(name.into(), ToleranceEntry { value, default, overridden: flag.is_some() });
            value
        };
        Tols {
            geom: a.tol_geom,
            compat: take("compat", a.tol_compat, tol::COMPAT_ABS),
            lift: take("lift", a.tol_lift, tol::LIFT),
            eig: take("eig_rel", a.tol_eig, tol::EIG_REL),
            stat: take("stat_rel", a.tol_stat, tol::STAT_REL),
            flat: take("flat", a.tol_flat, tol::FLAT),
            angle: take("angle", a.tol_angle, tol::ANGLE_EXACT),
            slope: take("slope", a.tol_slope, tol::SLOPE),
            identity: take("paired_identity", a.tol_identity, tol::PAIRED_IDENTITY),
            cancel: take("curve_cancel", a.tol_cancel, tol::CURVE_CANCEL),
        }
    }

    fn check(&self) -> Result<()> {
        let all = [self.geom.unwrap_or(1.0), self.compat, self.lift, self.eig, self.stat, self.flat, self.angle];
        let more = [self.slope, self.identity, self.cancel];
        if all.iter().chain(&more).any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(PlateauError::Parse("tolerances must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// What a run prints and how it exits.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Run one command line (including the program name) to completion.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    if let Err(msg) = init_threads() {
        return Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 2 };
    }
    let json = cli.json;
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let result = panic::catch_unwind(AssertUnwindSafe(|| execute(&cli)));
    panic::set_hook(hook);
    let (report, raw) = match result {
        Ok(pair) => pair,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            let mut rep = RunReport::new(command_name(&cli.command));
            rep.error = Some(crate::report::ErrorReport { kind: "Internal".into(), message: msg, structural: true });
            (rep, None)
        }
    };
    let code = report.exit_code();
    let stdout = match raw {
        Some(text) if report.error.is_none() => text,
        _ if json => report.to_json(),
        _ => report.to_human(),
    };
    let stderr = match &report.error {
        Some(e) if !json => format!("error: {}\n", e.message),
        _ => String::new(),
    };
    Outcome { stdout, stderr, code }
}

/// Cap the global worker pool from `PLATEAU_THREADS`.
fn init_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("PLATEAU_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("PLATEAU_THREADS must be a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err("PLATEAU_THREADS must be at least 1".into());
    }
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Validate { .. } => "validate".into(),
        Command::Measure { .. } => "measure".into(),
        Command::Field { op } => match op {
            FieldOp::Check { .. } => "field check".into(),
            FieldOp::Lift { .. } => "field lift".into(),
            FieldOp::Restrict { .. } => "field restrict".into(),
        },
        Command::Spectrum { .. } => "spectrum".into(),
        Command::Bernstein { .. } => "bernstein".into(),
        Command::Relax { .. } => "relax".into(),
        Command::Classify { .. } => "classify".into(),
        Command::Multi { op } => match op {
            MultiOp::Check { .. } => "multi check".into(),
            MultiOp::Spectrum { .. } => "multi spectrum".into(),
            MultiOp::Bernstein { .. } => "multi bernstein".into(),
        },
        Command::Golden { .. } => "golden".into(),
    }
}

/// The report, plus raw stdout text for commands that emit a document.
fn execute(cli: &Cli) -> (RunReport, Option<String>) {
    let mut rep = RunReport::new(command_name(&cli.command));
    let t = Tols::resolve(&cli.tol, &mut rep);
    let mut ctx = Ctx { rep, tols: t, started: Instant::now() };
    let raw = match t.check().and_then(|_| dispatch(&mut ctx, &cli.command)) {
        Ok(raw) => raw,
        Err(e) => {
            ctx.rep.fail(&e);
            None
        }
    };
    ctx.lap("compute");
    (ctx.rep, raw)
}

struct Ctx {
    rep: RunReport,
    tols: Tols,
    started: Instant,
}

impl Ctx {
    fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        self.rep.timings.push((phase.into(), (now - self.started).as_secs_f64()));
        self.started = now;
    }

    /// Read a document, falling back to `<path>.json` and then to a corpus
    /// member generated on the fly for `golden/<name>`.
    fn read(&mut self, path: &Path) -> Result<String> {
        let shown = path.display().to_string();
        if path.is_file() {
            let text = std::fs::read_to_string(path)?;
            self.rep.inputs.push(InputDigest::of(&shown, &text, false));
            return Ok(text);
        }
        let with_ext = PathBuf::from(format!("{shown}.json"));
        if with_ext.is_file() {
            let text = std::fs::read_to_string(&with_ext)?;
            self.rep.inputs.push(InputDigest::of(&with_ext.display().to_string(), &text, false));
            return Ok(text);
        }
        let in_golden = path.parent().and_then(|p| p.file_name()).is_some_and(|d| d == "golden");
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if in_golden && CORPUS.contains(&stem) {
            let text = generate_golden(stem, tol::GOLDEN_RESOLUTION)?.to_json();
            self.rep.inputs.push(InputDigest::of(&shown, &text, true));
            return Ok(text);
        }
        Err(PlateauError::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("{shown}: no such file"))))
    }

    fn record_geom(&mut self, c: &mut PlateauComplex) {
        let default = c.tol_geom();
        if let Some(g) = self.tols.geom {
            c.set_tol_geom(g);
        }
        self.rep.tolerances.insert(
            "geom".into(),
            ToleranceEntry { value: c.tol_geom(), default, overridden: self.tols.geom.is_some() },
        );
    }

    /// A Plateau complex, or a multiple-junction surface as a complex with
    /// its densities.
    fn load_any(&mut self, path: &Path) -> Result<(PlateauComplex, Option<Vec<f64>>)> {
        let text = self.read(path)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| PlateauError::Parse(e.to_string()))?;
        let (mut c, theta) = if value.get("sheets").is_some() {
            let (c, theta) = MultiFile::parse(&text)?.into_complex()?;
            (c, Some(theta))
        } else {
            let mut raw = MeshFile::parse(&text)?.into_raw()?;
            raw.tol_geom = self.tols.geom;
            (PlateauComplex::build(raw)?, None)
        };
        check_triangles(&c)?;
        self.record_geom(&mut c);
        self.lap("load");
        Ok((c, theta))
    }

    fn load_plateau(&mut self, path: &Path) -> Result<PlateauComplex> {
        match self.load_any(path)? {
            (c, None) => Ok(c),
            (_, Some(_)) => Err(PlateauError::Parse(
                "this is a multiple-junction document; use the `multi` subcommands".into(),
            )),
        }
    }

    /// A multiple-junction surface; a Plateau mesh is taken with θ ≡ 1.
    fn load_multi(&mut self, path: &Path) -> Result<MultiJunctionSurface> {
        let (c, theta) = self.load_any(path)?;
        let theta = theta.unwrap_or_else(|| vec![1.0; c.patches().len()]);
        MultiJunctionSurface::new(c, theta)
    }
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> Result<Option<String>> {
    match cmd {
        Command::Validate { file } => validate(ctx, file),
        Command::Measure { file, center, radii } => measure(ctx, file, *center, radii),
        Command::Field { op } => field(ctx, op),
        Command::Spectrum { mesh, k } => spectrum(ctx, mesh, *k),
        Command::Bernstein { mesh, center, n, analytic_cone } => bernstein(ctx, mesh, *center, &n.0, *analytic_cone),
        Command::Relax { mesh, steps, dt, out } => relax(ctx, mesh, *steps, *dt, out.as_deref()),
        Command::Classify { mesh, emit_network } => classify(ctx, mesh, emit_network.as_deref()),
        Command::Multi { op } => multi(ctx, op),
        Command::Golden { name, resolution, out } => golden(ctx, name, *resolution, out.as_deref()),
    }
}

fn validate(ctx: &mut Ctx, file: &Path) -> Result<Option<String>> {
    let (c, theta) = ctx.load_any(file)?;
    let mut models = [0usize; 4];
    for v in 0..c.vertices().len() {
        let k = match c.classify_local_model(v)? {
            LocalModel::P => 0,
            LocalModel::Y => 1,
            LocalModel::T => 2,
            LocalModel::Boundary => 3,
        };
        models[k] += 1;
    }
    check_embedding(&c)?;
    let signs = assign_signs(&c)?;
    ctx.rep.section(
        "complex",
        json!({
            "counts": c.counts(),
            "multi": theta.is_some(),
            "local_models": { "P": models[0], "Y": models[1], "T": models[2], "Boundary": models[3] },
            "tol_geom": c.tol_geom(),
            "max_sign_residual": signs.max_residual,
            "embedded": true,
        }),
    );
    match theta {
        Some(theta) => ctx.rep.section("multijunction", json!({ "theta": theta })),
        None => {
            let g = c.tol_geom();
            ctx.rep.at_most("sign_identity", "complex", signs.max_residual, g);
        }
    }
    Ok(None)
}

fn measure(ctx: &mut Ctx, file: &Path, center: Vec3, radii: &[f64]) -> Result<Option<String>> {
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(PlateauError::Parse("radii must be positive".into()));
    }
    let (c, theta) = ctx.load_any(file)?;
    let growth = area_growth_constant(&c, &center, radii);
    let stat = match theta {
        Some(theta) => MultiJunctionSurface::new(c.clone(), theta)?.weighted_stationarity(ctx.tols.stat),
        None => stationarity(&c, &Analysis::new(&c)?, ctx.tols.stat),
    };
    let curv = compute_curvature(&c)?;
    ctx.rep.section(
        "geometry",
        json!({
            "center": [center.x, center.y, center.z],
            "growth": growth,
            "max_abs_mean": curv.max_abs_mean(),
            "max_a2": curv.max_a2(),
            "total_area": c.total_area(),
        }),
    );
    ctx.rep.section("variation", &stat);
    ctx.rep.at_most("stationarity", "variation", stat.residual, stat.tol);
    Ok(None)
}

fn write_out(ctx: &mut Ctx, out: Option<&Path>, text: &str) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, text)?;
        ctx.rep.section("output", InputDigest::of(&path.display().to_string(), text, false));
    }
    Ok(())
}

fn field(ctx: &mut Ctx, op: &FieldOp) -> Result<Option<String>> {
    let (mesh, field_path) = match op {
        FieldOp::Check { mesh, field, .. } | FieldOp::Lift { mesh, field, .. } | FieldOp::Restrict { mesh, field, .. } => {
            (mesh, field)
        }
    };
    let c = ctx.load_plateau(mesh)?;
    let doc = FieldFile::parse(&ctx.read(field_path)?)?;
    let signs = assign_signs(&c)?;
    match op {
        FieldOp::Check { relative, .. } => {
            let f = doc.into_scalar(&c)?;
            let rep = check_compatible(&c, &signs, &f, CompatTolerance { abs: ctx.tols.compat, relative: *relative });
            ctx.rep.section("funcspace", &rep);
            ctx.rep.at_most("compatibility", "funcspace", rep.max_residual(), rep.tol);
        }
        FieldOp::Lift { relative, out, .. } => {
            let f = doc.into_scalar(&c)?;
            let v = lift_to_vector_field(&c, &signs, &f, CompatTolerance { abs: ctx.tols.compat, relative: *relative })?;
            let back = restrict_normal_component(&c, &signs, &v);
            let err = back.max_diff(&f);
            ctx.rep.section("funcspace", json!({ "round_trip": err, "max_abs_field": f.max_abs() }));
            ctx.rep.at_most("lift_round_trip", "funcspace", err, ctx.tols.lift);
            write_out(ctx, out.as_deref(), &FieldFile::from_vector(&v).to_json())?;
        }
        FieldOp::Restrict { out, .. } => {
            let v = doc.into_vector(&c)?;
            let f = restrict_normal_component(&c, &signs, &v);
            let rep = check_compatible(&c, &signs, &f, CompatTolerance { abs: ctx.tols.compat, relative: true });
            ctx.rep.section("funcspace", json!({ "max_abs_field": f.max_abs(), "compatibility": rep }));
            ctx.rep.at_most("compatibility", "funcspace", rep.max_residual(), rep.tol);
            write_out(ctx, out.as_deref(), &FieldFile::from_scalar(&c, &f).to_json())?;
        }
    }
    Ok(None)
}

fn spectrum(ctx: &mut Ctx, mesh: &Path, k: usize) -> Result<Option<String>> {
    let c = ctx.load_plateau(mesh)?;
    let an = Analysis::new(&c)?;
    let form = assemble_second_variation(&c, &an, &FormOptions::default());
    let spec = stability_spectrum(&form, c.num_slots(), k.max(1), ctx.tols.eig)?;
    let lambda1 = spec.eigenvalues.first().copied().unwrap_or(0.0);
    ctx.rep.section("variation", json!({ "spectrum": &spec, "asymmetry": form.asymmetry() }));
    ctx.rep.at_least("stability", "variation", lambda1, -spec.tol_eig);
    Ok(None)
}

fn inequality_verdicts(rep: &mut RunReport, module: &str, rows: &[BernsteinRow], holds: bool) {
    let excess = rows.iter().map(|r| r.lhs - r.rhs).fold(f64::NEG_INFINITY, f64::max);
    rep.holds("cutoff_inequality", module, excess, 1e-12, holds);
}

fn bernstein(ctx: &mut Ctx, mesh: &Path, center: Vec3, ns: &[f64], analytic: bool) -> Result<Option<String>> {
    let c = ctx.load_plateau(mesh)?;
    let an = Analysis::new(&c)?;
    let mode = if analytic { CutoffMode::AnalyticCone } else { CutoffMode::Mesh };
    let report = bernstein_test(&c, &an, center, ns, mode, ctx.tols.stat)?;
    ctx.rep.section("variation", &report);
    inequality_verdicts(&mut ctx.rep, "variation", &report.rows, report.holds);
    if analytic && ns.len() > 1 {
        ctx.rep.at_most("loglog_slope", "variation", (report.slope + 1.0).abs(), ctx.tols.slope);
    }
    Ok(None)
}

fn relax(ctx: &mut Ctx, mesh: &Path, steps: usize, dt: Option<f64>, out: Option<&Path>) -> Result<Option<String>> {
    let c = ctx.load_plateau(mesh)?;
    let dt = dt.unwrap_or_else(|| suggested_dt(&c));
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PlateauError::Parse(format!("step size must be positive, got {dt}")));
    }
    let (relaxed, report) = relax_to_minimal(&c, steps, dt)?;
    ctx.rep.section("variation", &report);
    ctx.rep.at_most("area_nonincreasing", "variation", report.last.area, report.initial.area);
    if let Some(path) = out {
        save_complex(&relaxed, path)?;
        let text = std::fs::read_to_string(path)?;
        ctx.rep.section("output", InputDigest::of(&path.display().to_string(), &text, false));
    }
    Ok(None)
}

fn classify(ctx: &mut Ctx, mesh: &Path, emit: Option<&Path>) -> Result<Option<String>> {
    let c = ctx.load_plateau(mesh)?;
    let curv = compute_curvature(&c)?;
    let cls = classify_flat(&c, &curv, ctx.tols.flat, ctx.tols.angle)?;
    ctx.rep.section("classify", &cls);
    ctx.rep.at_most("flat", "classify", cls.flatness.max_a2, cls.flatness.tol_flat);
    let recognized = !matches!(cls.tag, FlatTag::NonFlat | FlatTag::Indeterminate);
    ctx.rep.holds("recognized", "classify", if recognized { 1.0 } else { 0.0 }, ctx.tols.angle, recognized);
    if let Some(net) = &cls.network {
        ctx.rep.at_most("network_balance", "classify", net.max_balance(), ctx.tols.angle);
    }
    if let Some(path) = emit {
        match &cls.network {
            Some(net) => write_out(ctx, Some(path), &net.to_json())?,
            None => {
                ctx.rep.holds("network_emitted", "classify", 0.0, 0.0, false);
            }
        }
    }
    Ok(None)
}

/// The requested surface point, or the middle Γ vertex on its first sheet.
fn center_point(m: &MultiJunctionSurface, at: &PointArgs) -> Result<SurfacePoint> {
    let c = m.complex();
    let gamma = c
        .junctions()
        .first()
        .ok_or_else(|| PlateauError::Structure("the surface has no junction curve".into()))?;
    let p = SurfacePoint {
        sheet: at.sheet.unwrap_or(gamma.patches[0]),
        vertex: at.vertex.unwrap_or(gamma.vertices[gamma.vertices.len() / 2]),
    };
    m.slot(p)?;
    Ok(p)
}

fn multi(ctx: &mut Ctx, op: &MultiOp) -> Result<Option<String>> {
    match op {
        MultiOp::Check { file, at } => {
            let m = ctx.load_multi(file)?;
            let stat = m.weighted_stationarity(ctx.tols.stat);
            let eq = check_equilibrium_angles(&m, ctx.tols.angle);
            ctx.rep.section("multijunction", json!({ "theta": m.theta(), "stationarity": &stat, "equilibrium": &eq }));
            ctx.rep.at_most("weighted_stationarity", "multijunction", stat.residual, stat.tol);
            ctx.rep.at_most("equilibrium_angles", "multijunction", eq.max_deviation, eq.tol);
            if eq.equilibrium && m.complex().junctions().len() == 1 {
                let p0 = center_point(&m, at)?;
                let fields = build_paired_test_fields(&m, p0, 1.0, 20f64.to_radians(), ctx.tols.angle)?;
                let (worst, scale) = curve_term_cancellation(&m, &fields);
                ctx.rep.section(
                    "paired_fields",
                    json!({ "fields": &fields, "curve_term_residual": worst, "curve_term_scale": scale }),
                );
                ctx.rep.at_most("paired_identity", "multijunction", fields.identity_spread, ctx.tols.identity);
                ctx.rep.at_most("paired_compatibility", "multijunction", fields.compat_residual, ctx.tols.compat);
                ctx.rep.at_most("curve_term_cancellation", "multijunction", worst, ctx.tols.cancel);
            }
        }
        MultiOp::Spectrum { file, k } => {
            let m = ctx.load_multi(file)?;
            let form = weighted_stability_form(&m);
            let spec = stability_spectrum(&form, m.complex().num_slots(), (*k).max(1), ctx.tols.eig)?;
            let lambda1 = spec.eigenvalues.first().copied().unwrap_or(0.0);
            ctx.rep.section("multijunction", json!({ "theta": m.theta(), "spectrum": &spec }));
            ctx.rep.at_least("stability", "multijunction", lambda1, -spec.tol_eig);
        }
        MultiOp::Bernstein { file, at, n, analytic_cone, w1_deg } => {
            let m = ctx.load_multi(file)?;
            let p0 = center_point(&m, at)?;
            let mode = if *analytic_cone { CutoffMode::AnalyticCone } else { CutoffMode::Mesh };
            let report =
                appendix_bernstein_test(&m, p0, &n.0, mode, w1_deg.to_radians(), ctx.tols.stat, ctx.tols.angle)?;
            ctx.rep.section("multijunction", &report);
            inequality_verdicts(&mut ctx.rep, "multijunction", &report.rows, report.holds);
            ctx.rep.at_most("paired_identity", "multijunction", report.fields.identity_spread, ctx.tols.identity);
            if *analytic_cone && n.0.len() > 1 {
                ctx.rep.at_most("loglog_slope", "multijunction", (report.slope + 1.0).abs(), ctx.tols.slope);
            }
        }
    }
    Ok(None)
}

fn golden(ctx: &mut Ctx, name: &str, resolution: f64, out: Option<&Path>) -> Result<Option<String>> {
    if name == "all" {
        let dir = out.ok_or_else(|| PlateauError::Parse("`golden all` needs --out DIR".into()))?;
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for member in CORPUS {
            let text = generate_golden(member, resolution)?.to_json();
            let path = dir.join(format!("{member}.json"));
            std::fs::write(&path, &text)?;
            written.push(InputDigest::of(&path.display().to_string(), &text, true));
        }
        ctx.rep.section("golden", json!({ "resolution": resolution, "written": written }));
        return Ok(None);
    }
    let text = generate_golden(name, resolution)?.to_json();
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, &text)?;
            let digest = InputDigest::of(&path.display().to_string(), &text, true);
            ctx.rep.section("golden", json!({ "name": name, "resolution": resolution, "written": [digest] }));
            Ok(None)
        }
        None => Ok(Some(text + "\n")),
    }
}
