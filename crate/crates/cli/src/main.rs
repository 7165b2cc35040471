//! Command-line interface to the mixed-measures toolkit.
//!
//! Every subcommand renders one deterministic report: given the same
//! configuration the output bytes are identical run to run (floats print in
//! Rust's shortest round-trip form and nothing is timestamped). Configuration
//! echoes and summaries live on `#` comment lines so the CSV body stays
//! directly parseable.
//!
//! Exit codes: 0 success (a `violated` verdict in a report is a finding, not
//! an error), 1 a `repro` claim failed its stored expectation, 2 invalid
//! configuration (unparseable specs, wrong arity, unknown names).

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mixed_measures::bodies::Body;
use mixed_measures::convexfn::{self, ConvexPL};
use mixed_measures::error::Error as CoreError;
use mixed_measures::generate::{self, ChaCha8Rng};
use mixed_measures::inequalities::{self, FConcavity};
use mixed_measures::measures::{self, Measure, RadialExpFamily};
use mixed_measures::mixed::{self, FdSchedule};
use mixed_measures::planar::BoundaryPiece;
use mixed_measures::quad;
use mixed_measures::reports::{
    identity_verdict, inequality_verdict, InequalityReport, Verdict,
};
use mixed_measures::repro::{self, ClaimOutcome, ReportRow};
use mixed_measures::surface::{self, SphericalMeasure};

/// Column set shared by `check`, `search`, `convexfn`, and `repro`.
const CLAIM_COLUMNS: [&str; 10] = [
    "claim_id",
    "inequality",
    "measure",
    "body_ids",
    "lhs",
    "lhs_err",
    "rhs",
    "rhs_err",
    "margin",
    "verdict",
];

#[derive(Parser)]
#[command(
    name = "mixed-measures",
    version,
    about = "Convex bodies, weighted measures, mixed quantities, and inequality checks",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Master seed for randomized draws (sweeps, searches, repro claims).
    #[arg(long, global = true, default_value_t = repro::DEFAULT_SEED)]
    seed: u64,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Report layout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Instance budget for `search`.
    #[arg(long, global = true, default_value_t = 500)]
    budget: usize,
    /// Multiplies the numerical error budget behind verdicts in `check`,
    /// `search`, `convexfn`, and the `mixed` agreement flag (values above 1
    /// make verdicts more cautious). `repro` ignores it: stored claims are
    /// judged exactly as they were recorded.
    #[arg(long = "tolerance-scale", global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a body specification and print its basic geometry.
    Body(BodyArgs),
    /// Evaluate the mass of a body under a measure.
    Measure(MeasureArgs),
    /// Print the weighted surface-area measure of a body as normal/weight rows.
    Surface(SurfaceArgs),
    /// Evaluate first or second mixed quantities along one or both routes.
    Mixed(MixedArgs),
    /// Check one inequality on fixed bodies or a random sweep.
    Check(CheckArgs),
    /// Randomized search for violations of an inequality.
    Search(SearchArgs),
    /// Convex-function inequalities on piecewise-linear data.
    Convexfn(ConvexfnArgs),
    /// Re-run a stored claim (or all) and compare against its expectations.
    Repro(ReproArgs),
}

#[derive(Args)]
struct BodyArgs {
    /// Body spec: a JSON file path or inline JSON.
    #[arg(long, value_name = "SPEC")]
    body: String,
}

#[derive(Args)]
struct MeasureArgs {
    /// Measure spec: token (lebesgue, gaussian, radial_power:<p>,
    /// radial_exp:half_square, radial_exp:power:<q>, radial_exp:log:<c>),
    /// JSON file path, or inline JSON.
    #[arg(long, value_name = "SPEC")]
    measure: String,
    /// Body spec: a JSON file path or inline JSON.
    #[arg(long, value_name = "SPEC")]
    body: String,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long, value_name = "SPEC")]
    measure: String,
    #[arg(long, value_name = "SPEC")]
    body: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteChoice {
    Fd,
    Formula,
    Both,
}

#[derive(Args)]
struct MixedArgs {
    #[arg(long, value_name = "SPEC")]
    measure: String,
    /// First body (the base body for second-order quantities).
    #[arg(long = "bodyA", alias = "body-a", value_name = "SPEC")]
    body_a: String,
    /// Second body (the perturbation for first-order quantities).
    #[arg(long = "bodyB", alias = "body-b", value_name = "SPEC")]
    body_b: String,
    /// Third body; required for --order 2, rejected for --order 1.
    #[arg(long = "bodyC", alias = "body-c", value_name = "SPEC")]
    body_c: Option<String>,
    /// 1 for the first mixed quantity, 2 for the second.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: u8,
    /// Evaluation route: finite differences, closed formula, or both.
    #[arg(long, value_enum)]
    path: RouteChoice,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InequalityName {
    BrunnMinkowski,
    MinkowskiFirst,
    MinkowskiSecond,
    GaussianQuadratic,
    ReverseQuadratic,
    Fenchel,
    Supermodularity,
    LogSubmodularity,
    LogSubmodularityLocal,
    SurfaceMonotonicity,
}

impl InequalityName {
    fn arity(self) -> usize {
        match self {
            InequalityName::BrunnMinkowski
            | InequalityName::MinkowskiFirst
            | InequalityName::MinkowskiSecond
            | InequalityName::GaussianQuadratic
            | InequalityName::SurfaceMonotonicity => 2,
            InequalityName::ReverseQuadratic
            | InequalityName::Fenchel
            | InequalityName::Supermodularity
            | InequalityName::LogSubmodularity
            | InequalityName::LogSubmodularityLocal => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            InequalityName::BrunnMinkowski => "brunn-minkowski",
            InequalityName::MinkowskiFirst => "minkowski-first",
            InequalityName::MinkowskiSecond => "minkowski-second",
            InequalityName::GaussianQuadratic => "gaussian-quadratic",
            InequalityName::ReverseQuadratic => "reverse-quadratic",
            InequalityName::Fenchel => "fenchel",
            InequalityName::Supermodularity => "supermodularity",
            InequalityName::LogSubmodularity => "log-submodularity",
            InequalityName::LogSubmodularityLocal => "log-submodularity-local",
            InequalityName::SurfaceMonotonicity => "surface-monotonicity",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConcavityName {
    Power,
    Log,
    NormalInv,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    inequality: InequalityName,
    #[arg(long, value_name = "SPEC")]
    measure: String,
    /// Body sources, one per required slot: JSON file paths, inline JSON, or
    /// generator tokens (polygon, symmetric-polygon, origin-polygon,
    /// zonotope, ball, segment).
    #[arg(long, num_args = 1.., required = true, value_name = "SPEC")]
    bodies: Vec<String>,
    /// Number of random instances; above 1 every body must be a generator.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    sweep: u64,
    /// Power parameter for the concavity family (default 1/dim); also the
    /// bracketing exponent for fenchel (which needs 0 <= s < 1).
    #[arg(long)]
    s: Option<f64>,
    /// Concavity family for brunn-minkowski / minkowski / reverse-quadratic.
    #[arg(long, value_enum, default_value_t = ConcavityName::Power)]
    concavity: ConcavityName,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    inequality: InequalityName,
    #[arg(long, value_name = "SPEC")]
    measure: String,
    /// Generator tokens only (polygon, symmetric-polygon, origin-polygon,
    /// zonotope, ball, segment), one per required slot.
    #[arg(long, num_args = 1.., required = true, value_name = "TOKEN")]
    bodies: Vec<String>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, value_enum, default_value_t = ConcavityName::Power)]
    concavity: ConcavityName,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvexMode {
    /// Endpoint arc bounds for a nonnegative convex function.
    Check,
    /// The linear family attaining the strong endpoint bound with equality.
    Equality,
    /// Offset-optimized arc bound on [0,1] for sign-free convex functions.
    Optimized,
    /// Boundary graph probe over parametrized corner profiles.
    Naz,
}

#[derive(Args)]
struct ConvexfnArgs {
    #[arg(long, value_enum)]
    mode: ConvexMode,
    /// Comma-separated breakpoints (check/optimized modes).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    breakpoints: Vec<f64>,
    /// Comma-separated values at the breakpoints (check/optimized modes).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<f64>,
    /// Slope (equality mode) or integer corner exponent in 1..=3 (naz mode).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Second integer corner exponent in 1..=3 (naz mode).
    #[arg(long)]
    beta: Option<f64>,
    /// Domain endpoints for equality mode (defaults 0 and 1).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    hi: f64,
    /// Coupling weight (naz mode).
    #[arg(long)]
    lambda: Option<f64>,
    /// Corner sharpness (naz mode).
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct ReproArgs {
    /// Claim id, or `all`. See --list for the registry.
    #[arg(value_name = "CLAIM", required_unless_present = "list")]
    claim: Option<String>,
    /// List the registered claims instead of running anything.
    #[arg(long)]
    list: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    StructuredText,
}

/// One rendered report: comment lines plus a fixed-column table.
struct Table {
    comments: Vec<String>,
    columns: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &'static [&'static str]) -> Table {
        Table { comments: Vec::new(), columns, rows: Vec::new() }
    }

    fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        match format {
            OutputFormat::Csv => {
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            }
            OutputFormat::StructuredText => {
                for row in &self.rows {
                    let line: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(col, cell)| {
                            if cell.parse::<f64>().is_ok() {
                                format!("{col}={cell}")
                            } else {
                                format!("{col}=\"{cell}\"")
                            }
                        })
                        .collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// The CSV stays unquoted, so field separators inside text are replaced.
fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c == ',' || c == '\n' || c == '\r' { ';' } else { c })
        .collect()
}

fn fnum(v: f64) -> String {
    // Map negative zero to plain zero so reports never show `-0`.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fnum(*x)).collect();
    format!("[{}]", parts.join(" "))
}

fn claim_row_cells(r: &ReportRow) -> Vec<String> {
    vec![
        sanitize(&r.claim_id),
        sanitize(&r.inequality),
        sanitize(&r.measure),
        sanitize(&r.body_ids),
        fnum(r.lhs),
        fnum(r.lhs_err),
        fnum(r.rhs),
        fnum(r.rhs_err),
        fnum(r.margin),
        r.verdict.to_string(),
    ]
}

/// Re-derive a report's verdict under a scaled error budget. Identity-style
/// reports keep the scale-aware floor used when they were produced.
fn scaled_verdict(report: &InequalityReport, scale: f64, identity: bool) -> Verdict {
    if scale == 1.0 {
        return report.verdict;
    }
    if identity {
        let mag = report.lhs.value.abs().max(report.rhs.value.abs());
        identity_verdict(report.margin, report.budget * scale, mag)
    } else {
        inequality_verdict(report.margin, report.budget * scale)
    }
}

/// Errors that stem from what the user asked for (and would recur on every
/// instance), as opposed to instance-specific numerical trouble.
fn config_like(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::DimensionMismatch { .. }
            | CoreError::UnboundedBody(_)
            | CoreError::EmptyBody
            | CoreError::OriginNotContained { .. }
            | CoreError::MissingOrigin { .. }
            | CoreError::ClassViolation { .. }
            | CoreError::UnsupportedRepresentation(_)
            | CoreError::UnsupportedCase(_)
            | CoreError::NonPositiveMeasure(_)
            | CoreError::NotConvex(_)
            | CoreError::Negative(_)
            | CoreError::UnsupportedConfiguration(_)
            | CoreError::Invalid(_)
    )
}

// ---------------------------------------------------------------------------
// Spec parsing
// ---------------------------------------------------------------------------

fn parse_body_spec(spec: &str) -> Result<Body> {
    let trimmed = spec.trim();
    let text = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        std::fs::read_to_string(trimmed)
            .with_context(|| format!("reading body spec file `{trimmed}`"))?
    };
    let body: Body = serde_json::from_str(&text)
        .with_context(|| format!("parsing body spec `{trimmed}`"))?;
    body.validate().with_context(|| format!("validating body spec `{trimmed}`"))?;
    Ok(body)
}

fn parse_measure_spec(spec: &str) -> Result<Measure> {
    let trimmed = spec.trim();
    let mu = if trimmed.starts_with('{') {
        serde_json::from_str(trimmed).with_context(|| format!("parsing measure `{trimmed}`"))?
    } else if let Some(mu) = measure_token(trimmed) {
        mu?
    } else if std::path::Path::new(trimmed).exists() {
        let text = std::fs::read_to_string(trimmed)
            .with_context(|| format!("reading measure spec file `{trimmed}`"))?;
        serde_json::from_str(&text).with_context(|| format!("parsing measure `{trimmed}`"))?
    } else {
        bail!(
            "unknown measure `{trimmed}`: expected lebesgue, gaussian, radial_power:<p>, \
             radial_exp:half_square, radial_exp:power:<q>, radial_exp:log:<c>, a JSON file, \
             or inline JSON"
        );
    };
    mu.validate().with_context(|| format!("validating measure `{trimmed}`"))?;
    Ok(mu)
}

/// Shorthand tokens; `None` means "not a token" (fall through to file/JSON).
fn measure_token(s: &str) -> Option<Result<Measure>> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse_param = |name: &str, text: &str| -> Result<f64> {
        text.parse::<f64>()
            .map_err(|_| anyhow!("measure token parameter {name}=`{text}` is not a number"))
    };
    match parts.as_slice() {
        ["lebesgue"] => Some(Ok(Measure::Lebesgue)),
        ["gaussian"] => Some(Ok(Measure::Gaussian)),
        ["radial_power", p] => {
            Some(parse_param("p", p).map(|p| Measure::RadialPower { p }))
        }
        ["radial_exp", "half_square"] => {
            Some(Ok(Measure::RadialExp(RadialExpFamily::HalfSquare)))
        }
        ["radial_exp", "power", q] => Some(
            parse_param("q", q).map(|q| Measure::RadialExp(RadialExpFamily::Power { q })),
        ),
        ["radial_exp", "log", c] => Some(
            parse_param("c", c).map(|c| Measure::RadialExp(RadialExpFamily::Log { c })),
        ),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum GenToken {
    Polygon,
    SymmetricPolygon,
    OriginPolygon,
    Zonotope,
    Ball,
    Segment,
}

impl GenToken {
    fn parse(s: &str) -> Option<GenToken> {
        match s {
            "polygon" => Some(GenToken::Polygon),
            "symmetric-polygon" => Some(GenToken::SymmetricPolygon),
            "origin-polygon" => Some(GenToken::OriginPolygon),
            "zonotope" => Some(GenToken::Zonotope),
            "ball" => Some(GenToken::Ball),
            "segment" => Some(GenToken::Segment),
            _ => None,
        }
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> Body {
        match self {
            GenToken::Polygon => generate::random_polygon(rng),
            GenToken::SymmetricPolygon => generate::symmetric_polygon(rng),
            GenToken::OriginPolygon => generate::origin_polygon(rng),
            GenToken::Zonotope => generate::random_zonotope(rng),
            GenToken::Ball => Body::ball(vec![0.0, 0.0], generate::random_radius(rng))
                .expect("centered ball with positive radius"),
            GenToken::Segment => generate::random_segment(rng),
        }
    }
}

/// A body slot in `check`/`search`: fixed content or a fresh draw per instance.
enum BodySource {
    Fixed(Box<Body>),
    Generated(GenToken),
}

impl BodySource {
    fn parse(spec: &str) -> Result<BodySource> {
        if let Some(token) = GenToken::parse(spec.trim()) {
            Ok(BodySource::Generated(token))
        } else {
            Ok(BodySource::Fixed(Box::new(parse_body_spec(spec)?)))
        }
    }

    fn realize(&self, rng: &mut ChaCha8Rng) -> Body {
        match self {
            BodySource::Fixed(b) => (**b).clone(),
            BodySource::Generated(token) => token.draw(rng),
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

struct RunOutput {
    table: Table,
    exit: u8,
}

impl RunOutput {
    fn ok(table: Table) -> RunOutput {
        RunOutput { table, exit: 0 }
    }
}

fn run_body(args: &BodyArgs) -> Result<RunOutput> {
    const COLS: [&str; 2] = ["field", "value"];
    let body = parse_body_spec(&args.body)?;
    let mut table = Table::new(&COLS);
    table.comment("mixed-measures body");
    table.comment(format!("config: body={}", sanitize(args.body.trim())));
    table.row(vec!["describe".into(), sanitize(&body.describe())]);
    table.row(vec!["dim".into(), body.dim().to_string()]);
    table.row(vec!["affine_dim".into(), body.affine_dim()?.to_string()]);
    table.row(vec!["polytopal".into(), body.is_polytopal().to_string()]);
    table.row(vec![
        "contains_origin".into(),
        body.contains_origin()?.to_string(),
    ]);
    table.row(vec![
        "origin_symmetric".into(),
        body.is_origin_symmetric()?.to_string(),
    ]);
    let (lo, hi) = body.bounding_box()?;
    table.row(vec!["bbox_lo".into(), fmt_vec(&lo)]);
    table.row(vec!["bbox_hi".into(), fmt_vec(&hi)]);
    if body.is_polytopal() {
        table.row(vec![
            "vertex_count".into(),
            body.vertices()?.len().to_string(),
        ]);
    }
    let n = body.dim();
    for axis in 0..n {
        for sign in [1.0, -1.0] {
            let mut u = vec![0.0; n];
            u[axis] = sign;
            let label = format!(
                "support[{}e{}]",
                if sign > 0.0 { "+" } else { "-" },
                axis + 1
            );
            table.row(vec![label, fnum(body.support(&u)?)]);
        }
    }
    Ok(RunOutput::ok(table))
}

fn run_measure(args: &MeasureArgs) -> Result<RunOutput> {
    const COLS: [&str; 6] = ["quantity", "measure", "body", "value", "abs_error", "method"];
    let mu = parse_measure_spec(&args.measure)?;
    let body = parse_body_spec(&args.body)?;
    let result = measures::measure(&mu, &body)?;
    let mut table = Table::new(&COLS);
    table.comment("mixed-measures measure");
    table.comment(format!(
        "config: measure={} body={}",
        sanitize(args.measure.trim()),
        sanitize(args.body.trim())
    ));
    table.row(vec![
        "mass".into(),
        sanitize(&mu.name()),
        sanitize(&body.describe()),
        fnum(result.value),
        fnum(result.abs_error),
        result.method.as_str().into(),
    ]);
    Ok(RunOutput::ok(table))
}

fn run_surface(args: &SurfaceArgs) -> Result<RunOutput> {
    const COLS: [&str; 4] = ["kind", "normal", "weight", "weight_error"];
    let mu = parse_measure_spec(&args.measure)?;
    let body = parse_body_spec(&args.body)?;
    let sm = surface::weighted_surface_measure(&mu, &body)?;
    let mut table = Table::new(&COLS);
    table.comment("mixed-measures surface");
    table.comment(format!(
        "config: measure={} body={}",
        sanitize(args.measure.trim()),
        sanitize(args.body.trim())
    ));
    let total = sm.total_mass();
    let mut cell_sum = 0.0;
    match &sm {
        SphericalMeasure::Atomic { atoms } => {
            table.comment("representation: atomic (exact facet normals)");
            for atom in atoms {
                cell_sum += atom.weight;
                table.row(vec![
                    "atom".into(),
                    fmt_vec(&atom.normal),
                    fnum(atom.weight),
                    fnum(atom.weight_error),
                ]);
            }
            if let Some(residual) = sm.closedness_residual() {
                table.comment(format!("closure-residual: {residual:e}"));
            }
        }
        SphericalMeasure::Planar { shape, mu } => {
            table.comment(
                "representation: planar boundary; arcs are discretized into cells \
                 of at most 2*pi/256 radians",
            );
            let max_cell = std::f64::consts::TAU / 256.0;
            for piece in shape.boundary_pieces() {
                match piece {
                    BoundaryPiece::Edge { a, b, normal } => {
                        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                        let (val, err) = quad::integrate_refine(
                            &|t| {
                                mu.density(&[a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
                            },
                            0.0,
                            1.0,
                            16,
                        );
                        cell_sum += val * len;
                        table.row(vec![
                            "edge".into(),
                            fmt_vec(&normal),
                            fnum(val * len),
                            fnum(err * len),
                        ]);
                    }
                    BoundaryPiece::Arc { center, radius, th0, th1 } => {
                        let cells = ((th1 - th0) / max_cell).ceil().max(1.0) as usize;
                        let step = (th1 - th0) / cells as f64;
                        for c in 0..cells {
                            let u0 = th0 + step * c as f64;
                            let u1 = u0 + step;
                            let (val, err) = quad::integrate_refine(
                                &|th: f64| {
                                    radius
                                        * mu.density(&[
                                            center[0] + radius * th.cos(),
                                            center[1] + radius * th.sin(),
                                        ])
                                },
                                u0,
                                u1,
                                12,
                            );
                            let mid = 0.5 * (u0 + u1);
                            cell_sum += val;
                            table.row(vec![
                                "arc-cell".into(),
                                fmt_vec(&[mid.cos(), mid.sin()]),
                                fnum(val),
                                fnum(err),
                            ]);
                        }
                    }
                }
            }
        }
        SphericalMeasure::Sphere { center, radius, dim, mu } => {
            table.comment(
                "representation: sphere discretized into a 12x24 latitude-longitude grid",
            );
            anyhow::ensure!(
                *dim == 3,
                "sphere surface rendering expects dimension 3, got {dim}"
            );
            let r = *radius;
            let (n_lat, n_lon) = (12usize, 24usize);
            let dth = std::f64::consts::PI / n_lat as f64;
            let dph = std::f64::consts::TAU / n_lon as f64;
            for i in 0..n_lat {
                for j in 0..n_lon {
                    let (th0, th1) = (i as f64 * dth, (i + 1) as f64 * dth);
                    let (ph0, ph1) = (j as f64 * dph, (j + 1) as f64 * dph);
                    let cell = |m: usize| {
                        quad::integrate(
                            &|th: f64| {
                                quad::integrate(
                                    &|ph: f64| {
                                        let u = [
                                            th.sin() * ph.cos(),
                                            th.sin() * ph.sin(),
                                            th.cos(),
                                        ];
                                        let x = [
                                            center[0] + r * u[0],
                                            center[1] + r * u[1],
                                            center[2] + r * u[2],
                                        ];
                                        mu.density(&x) * r * r * th.sin()
                                    },
                                    ph0,
                                    ph1,
                                    m,
                                )
                            },
                            th0,
                            th1,
                            m,
                        )
                    };
                    let fine = cell(10);
                    let err = (fine - cell(5)).abs().max(f64::EPSILON * fine.abs());
                    let (thm, phm) = (0.5 * (th0 + th1), 0.5 * (ph0 + ph1));
                    let normal = [
                        thm.sin() * phm.cos(),
                        thm.sin() * phm.sin(),
                        thm.cos(),
                    ];
                    cell_sum += fine;
                    table.row(vec![
                        "sphere-cell".into(),
                        fmt_vec(&normal),
                        fnum(fine),
                        fnum(err),
                    ]);
                }
            }
        }
    }
    table.comment(format!(
        "discretization-gap: {:e} (sum of rows vs integrated total)",
        (cell_sum - total.value).abs()
    ));
    table.row(vec![
        "total".into(),
        "-".into(),
        fnum(total.value),
        fnum(total.abs_error),
    ]);
    Ok(RunOutput::ok(table))
}

fn run_mixed(args: &MixedArgs, tolerance_scale: f64) -> Result<RunOutput> {
    const COLS: [&str; 8] = [
        "path", "order", "measure", "bodies", "value", "abs_error", "method", "agreement",
    ];
    let mu = parse_measure_spec(&args.measure)?;
    let a = parse_body_spec(&args.body_a)?;
    let b = parse_body_spec(&args.body_b)?;
    let c = match (&args.body_c, args.order) {
        (Some(spec), 2) => Some(parse_body_spec(spec)?),
        (None, 2) => bail!("--order 2 needs --bodyC"),
        (Some(_), _) => bail!("--order 1 uses --bodyA and --bodyB only; drop --bodyC"),
        (None, _) => None,
    };
    let schedule = FdSchedule::default();
    let bodies_label = match &c {
        Some(c) => format!("{} | {} | {}", a.describe(), b.describe(), c.describe()),
        None => format!("{} | {}", a.describe(), b.describe()),
    };

    let eval = |route: RouteChoice| -> mixed_measures::error::Result<measures::EvalResult> {
        if args.order == 1 {
            match route {
                RouteChoice::Fd => mixed::mixed1_fd(&mu, &a, &b, &schedule),
                _ => mixed::mixed1_formula(&mu, &a, &b),
            }
        } else {
            let c = c.as_ref().expect("validated above");
            match route {
                RouteChoice::Fd => mixed::mixed2_fd(&mu, &a, &b, c, &schedule),
                _ => mixed::mixed2_formula(&mu, &a, &b, c),
            }
        }
    };

    let mut table = Table::new(&COLS);
    table.comment("mixed-measures mixed");
    table.comment(format!(
        "config: measure={} order={} path={} bodyA={} bodyB={}{}",
        sanitize(args.measure.trim()),
        args.order,
        match args.path {
            RouteChoice::Fd => "fd",
            RouteChoice::Formula => "formula",
            RouteChoice::Both => "both",
        },
        sanitize(args.body_a.trim()),
        sanitize(args.body_b.trim()),
        match &args.body_c {
            Some(s) => format!(" bodyC={}", sanitize(s.trim())),
            None => String::new(),
        }
    ));

    let push = |table: &mut Table, route: &str, r: &measures::EvalResult, agree: &str| {
        table.row(vec![
            route.into(),
            args.order.to_string(),
            sanitize(&mu.name()),
            sanitize(&bodies_label),
            fnum(r.value),
            fnum(r.abs_error),
            r.method.as_str().into(),
            agree.into(),
        ]);
    };

    match args.path {
        RouteChoice::Fd => {
            let r = eval(RouteChoice::Fd)?;
            push(&mut table, "fd", &r, "-");
        }
        RouteChoice::Formula => {
            let r = eval(RouteChoice::Formula)?;
            push(&mut table, "formula", &r, "-");
        }
        RouteChoice::Both => {
            let fd = eval(RouteChoice::Fd);
            let formula = eval(RouteChoice::Formula);
            match (fd, formula) {
                (Ok(fd), Ok(formula)) => {
                    let margin = fd.value - formula.value;
                    let budget = (fd.abs_error + formula.abs_error) * tolerance_scale;
                    let scale = fd.value.abs().max(formula.value.abs());
                    let agree = identity_verdict(margin, budget, scale).to_string();
                    push(&mut table, "fd", &fd, &agree);
                    push(&mut table, "formula", &formula, &agree);
                }
                (Ok(fd), Err(e)) => {
                    table.comment(format!("note: formula route unavailable: {e}"));
                    push(&mut table, "fd", &fd, "-");
                }
                (Err(e), Ok(formula)) => {
                    table.comment(format!("note: fd route unavailable: {e}"));
                    push(&mut table, "formula", &formula, "-");
                }
                (Err(fd_err), Err(formula_err)) => {
                    bail!("both routes failed: fd: {fd_err}; formula: {formula_err}")
                }
            }
        }
    }
    Ok(RunOutput::ok(table))
}

/// Shared checker dispatch for `check` and `search`.
fn run_inequality(
    ineq: InequalityName,
    mu: &Measure,
    family: &FConcavity,
    s: f64,
    bodies: &[Body],
) -> mixed_measures::error::Result<Vec<InequalityReport>> {
    match ineq {
        InequalityName::BrunnMinkowski => Ok(vec![inequalities::check_f_concavity(
            mu,
            family,
            &bodies[0],
            &bodies[1],
            &[0.25, 0.5, 0.75],
        )?]),
        InequalityName::MinkowskiFirst => Ok(vec![inequalities::minkowski_first(
            mu, family, &bodies[0], &bodies[1],
        )?]),
        InequalityName::MinkowskiSecond => Ok(vec![inequalities::minkowski_second(
            mu, family, &bodies[0], &bodies[1],
        )?]),
        InequalityName::GaussianQuadratic => {
            if !matches!(mu, Measure::Gaussian) {
                return Err(CoreError::UnsupportedCase(
                    "the quadratic corollary is a gaussian statement; pass --measure gaussian"
                        .into(),
                ));
            }
            Ok(vec![inequalities::gaussian_second_corollary(
                &bodies[0], &bodies[1],
            )?])
        }
        InequalityName::ReverseQuadratic => Ok(vec![inequalities::reverse_quadratic(
            mu, family, &bodies[0], &bodies[1], &bodies[2],
        )?]),
        InequalityName::Fenchel => {
            inequalities::fenchel_bounds(mu, s, &bodies[0], &bodies[1], &bodies[2])
        }
        InequalityName::Supermodularity => {
            let suite = inequalities::supermod_suite(mu, &bodies[0], &bodies[1], &bodies[2])?;
            Ok(vec![suite.global, suite.first_order, suite.second_order])
        }
        InequalityName::LogSubmodularity => Ok(vec![inequalities::log_submodularity(
            mu, &bodies[0], &bodies[1], &bodies[2],
        )?]),
        InequalityName::LogSubmodularityLocal => {
            Ok(vec![inequalities::log_submodularity_local(
                mu, &bodies[0], &bodies[1], &bodies[2],
            )?])
        }
        InequalityName::SurfaceMonotonicity => Ok(vec![inequalities::surface_monotonicity(
            mu, &bodies[0], &bodies[1],
        )?]),
    }
}

fn concavity_family(name: ConcavityName, s: f64) -> FConcavity {
    match name {
        ConcavityName::Power => FConcavity::Power { s },
        ConcavityName::Log => FConcavity::Log,
        ConcavityName::NormalInv => FConcavity::NormalInv,
    }
}

fn run_check(args: &CheckArgs, g: &GlobalOpts) -> Result<RunOutput> {
    let mu = parse_measure_spec(&args.measure)?;
    let sources: Vec<BodySource> = args
        .bodies
        .iter()
        .map(|s| BodySource::parse(s))
        .collect::<Result<_>>()?;
    let arity = args.inequality.arity();
    anyhow::ensure!(
        sources.len() == arity,
        "{} takes {arity} bodies, got {}",
        args.inequality.label(),
        sources.len()
    );
    if args.sweep > 1 {
        anyhow::ensure!(
            sources.iter().all(|s| matches!(s, BodySource::Generated(_))),
            "--sweep above 1 needs generator tokens for every body \
             (fixed specs give the same instance every time)"
        );
    }
    if let Some(s) = args.s {
        anyhow::ensure!(s.is_finite(), "--s must be finite, got {s}");
    }

    let mut table = Table::new(&CLAIM_COLUMNS);
    table.comment("mixed-measures check");
    table.comment(format!(
        "config: inequality={} measure={} bodies={} sweep={} seed={} tolerance-scale={}{}{}",
        args.inequality.label(),
        sanitize(args.measure.trim()),
        sanitize(&args.bodies.join(" ")),
        args.sweep,
        g.seed,
        g.tolerance_scale,
        match args.s {
            Some(s) => format!(" s={s}"),
            None => " s=1/dim".into(),
        },
        match args.concavity {
            ConcavityName::Power => String::new(),
            ConcavityName::Log => " concavity=log".into(),
            ConcavityName::NormalInv => " concavity=normal-inv".into(),
        },
    ));

    let (mut holds, mut violated, mut inconclusive) = (0usize, 0usize, 0usize);
    let mut error_notes = 0usize;
    for i in 0..args.sweep {
        let mut rng = generate::instance_rng(g.seed, i);
        let bodies: Vec<Body> = sources.iter().map(|s| s.realize(&mut rng)).collect();
        let dim = bodies[0].dim();
        let s = args.s.unwrap_or(1.0 / dim as f64);
        let family = concavity_family(args.concavity, s);
        let descs = bodies
            .iter()
            .map(|b| b.describe())
            .collect::<Vec<_>>()
            .join(" + ");
        match run_inequality(args.inequality, &mu, &family, s, &bodies) {
            Ok(reports) => {
                for report in reports {
                    let mut row = ReportRow::from_report(
                        "check",
                        &mu.name(),
                        &format!("i={i}: {descs}"),
                        &report,
                    );
                    row.verdict = scaled_verdict(&report, g.tolerance_scale, false);
                    match row.verdict {
                        Verdict::Holds => holds += 1,
                        Verdict::Violated => violated += 1,
                        Verdict::Inconclusive => inconclusive += 1,
                    }
                    table.row(claim_row_cells(&row));
                }
            }
            Err(e) if config_like(&e) => {
                return Err(anyhow!(e).context(format!(
                    "instance i={i} cannot be evaluated under this configuration"
                )));
            }
            Err(e) => {
                // Numerical failure on this instance: keep the row count
                // honest with an inconclusive placeholder row.
                if error_notes < 3 {
                    table.comment(format!("note: i={i}: {e}"));
                }
                error_notes += 1;
                inconclusive += 1;
                let row = ReportRow {
                    claim_id: "check".into(),
                    inequality: args.inequality.label().into(),
                    measure: mu.name(),
                    body_ids: format!("i={i}: {descs}"),
                    lhs: f64::NAN,
                    lhs_err: f64::NAN,
                    rhs: f64::NAN,
                    rhs_err: f64::NAN,
                    margin: f64::NAN,
                    verdict: Verdict::Inconclusive,
                };
                table.row(claim_row_cells(&row));
            }
        }
    }
    if error_notes > 3 {
        table.comment(format!("note: {} further instances failed numerically", error_notes - 3));
    }
    table.comment(format!(
        "summary: rows={} holds={holds} violated={violated} inconclusive={inconclusive}",
        holds + violated + inconclusive
    ));
    Ok(RunOutput::ok(table))
}

fn run_search(args: &SearchArgs, g: &GlobalOpts) -> Result<RunOutput> {
    let mu = parse_measure_spec(&args.measure)?;
    let tokens: Vec<GenToken> = args
        .bodies
        .iter()
        .map(|s| {
            GenToken::parse(s.trim()).ok_or_else(|| {
                anyhow!(
                    "search draws fresh instances, so `{s}` must be a generator token \
                     (polygon, symmetric-polygon, origin-polygon, zonotope, ball, segment)"
                )
            })
        })
        .collect::<Result<_>>()?;
    let arity = args.inequality.arity();
    anyhow::ensure!(
        tokens.len() == arity,
        "{} takes {arity} bodies, got {}",
        args.inequality.label(),
        tokens.len()
    );
    if let Some(s) = args.s {
        anyhow::ensure!(s.is_finite(), "--s must be finite, got {s}");
    }

    let mut table = Table::new(&CLAIM_COLUMNS);
    table.comment("mixed-measures search");
    table.comment(format!(
        "config: inequality={} measure={} bodies={} budget={} seed={} tolerance-scale={}",
        args.inequality.label(),
        sanitize(args.measure.trim()),
        sanitize(&args.bodies.join(" ")),
        g.budget,
        g.seed,
        g.tolerance_scale,
    ));

    let ineq = args.inequality;
    let concavity = args.concavity;
    let s_flag = args.s;
    let tolerance_scale = g.tolerance_scale;
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Body> {
        tokens.iter().map(|t| t.draw(rng)).collect()
    };
    // Multi-report inequalities are searched through their tightest member:
    // the report with the smallest margin is the one a violation shows up in.
    let check = |bodies: &[Body]| -> mixed_measures::error::Result<InequalityReport> {
        let dim = bodies[0].dim();
        let s = s_flag.unwrap_or(1.0 / dim as f64);
        let family = concavity_family(concavity, s);
        let reports = run_inequality(ineq, &mu, &family, s, bodies)?;
        let mut best = reports
            .into_iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .expect("every checker returns at least one report");
        best.verdict = scaled_verdict(&best, tolerance_scale, false);
        Ok(best)
    };

    match inequalities::counterexample_search(g.budget, g.seed, draw, check) {
        Ok(hits) => {
            let count = hits.len();
            for (idx, report) in hits {
                let row = ReportRow::from_report(
                    "search",
                    &mu.name(),
                    &format!("i={idx}: {}", report.inputs),
                    &report,
                );
                table.row(claim_row_cells(&row));
            }
            table.comment(format!("summary: hits={count} tried={}", g.budget));
        }
        Err(CoreError::BudgetExhausted { budget, .. }) => {
            table.comment(format!("summary: hits=0 tried={budget}"));
        }
        Err(e) => return Err(anyhow!(e)),
    }
    Ok(RunOutput::ok(table))
}

fn run_convexfn(args: &ConvexfnArgs, g: &GlobalOpts) -> Result<RunOutput> {
    let mut table = Table::new(&CLAIM_COLUMNS);
    table.comment("mixed-measures convexfn");

    let need = |name: &str, v: Option<f64>| -> Result<f64> {
        v.ok_or_else(|| anyhow!("mode needs --{name}"))
    };
    let build_pl = |nonnegative: bool| -> Result<ConvexPL> {
        anyhow::ensure!(
            !args.breakpoints.is_empty() && args.breakpoints.len() == args.values.len(),
            "this mode needs --breakpoints and --values of equal length, got {} and {}",
            args.breakpoints.len(),
            args.values.len()
        );
        let h = if nonnegative {
            ConvexPL::new_nonnegative(args.breakpoints.clone(), args.values.clone())?
        } else {
            ConvexPL::new(args.breakpoints.clone(), args.values.clone())?
        };
        Ok(h)
    };
    let describe_pl = |h: &ConvexPL| -> String {
        let (a, b) = h.domain();
        format!("piecewise-linear, {} pieces on [{a}, {b}]", h.breakpoints().len() - 1)
    };
    let push = |table: &mut Table, report: &InequalityReport, body_ids: &str| {
        let mut row = ReportRow::from_report("convexfn", "-", body_ids, report);
        row.verdict = scaled_verdict(report, g.tolerance_scale, false);
        table.row(claim_row_cells(&row));
    };

    match args.mode {
        ConvexMode::Check => {
            table.comment(format!(
                "config: mode=check breakpoints={} values={} tolerance-scale={}",
                args.breakpoints.len(),
                args.values.len(),
                g.tolerance_scale
            ));
            let h = build_pl(true)?;
            let reports = convexfn::endpoint_arc_check(&h)?;
            let ids = describe_pl(&h);
            push(&mut table, &reports.strong, &ids);
            push(&mut table, &reports.weak, &ids);
        }
        ConvexMode::Optimized => {
            table.comment(format!(
                "config: mode=optimized breakpoints={} values={} tolerance-scale={}",
                args.breakpoints.len(),
                args.values.len(),
                g.tolerance_scale
            ));
            let h = build_pl(false)?;
            let check = convexfn::optimized_arc_check(&h)?;
            table.comment(format!("optimizing-offset: {}", fnum(check.offset)));
            table.comment(format!("round-trip-gap: {:e}", check.round_trip_gap));
            table.comment(format!("normalization-gap: {:e}", check.normalization_gap));
            push(&mut table, &check.report, &describe_pl(&h));
        }
        ConvexMode::Equality => {
            let alpha = need("alpha", args.alpha)?;
            anyhow::ensure!(
                args.lo < args.hi,
                "equality mode needs --lo < --hi, got {} and {}",
                args.lo,
                args.hi
            );
            table.comment(format!(
                "config: mode=equality alpha={alpha} lo={} hi={}",
                args.lo, args.hi
            ));
            let h = convexfn::equality_family(alpha, args.lo, args.hi)?;
            table.comment(format!(
                "function: breakpoints={} values={}",
                fmt_vec(h.breakpoints()),
                fmt_vec(h.values())
            ));
            let reports = convexfn::endpoint_arc_check(&h)?;
            // The family is built to meet the strong bound exactly, so judge
            // it as an identity: a zero margin at zero quadrature error would
            // otherwise read as inconclusive.
            let equality = InequalityReport::identity(
                "endpoint-arc-equality",
                &reports.strong.inputs,
                reports.strong.lhs.clone(),
                reports.strong.rhs.clone(),
            );
            push(&mut table, &equality, &describe_pl(&h));
        }
        ConvexMode::Naz => {
            let alpha = need("alpha", args.alpha)?;
            let beta = need("beta", args.beta)?;
            let lambda = need("lambda", args.lambda)?;
            let eps = need("eps", args.eps)?;
            for (name, v) in [("alpha", alpha), ("beta", beta)] {
                anyhow::ensure!(
                    v.fract() == 0.0 && (1.0..=3.0).contains(&v),
                    "--{name} must be an integer in 1..=3, got {v}"
                );
            }
            table.comment(format!(
                "config: mode=naz alpha={alpha} beta={beta} lambda={lambda} eps={eps}"
            ));
            let report = convexfn::boundary_graph_probe(alpha as u32, beta as u32, lambda, eps)?;
            let ids = format!("alpha={alpha} beta={beta} lambda={lambda} eps={eps}");
            push(&mut table, &report, &ids);
        }
    }
    Ok(RunOutput::ok(table))
}

/// Exit code for a batch of claim outcomes: 0 when all stored expectations
/// held, 1 otherwise.
fn repro_exit(outcomes: &[ClaimOutcome]) -> u8 {
    if outcomes.iter().all(|o| o.passed) {
        0
    } else {
        1
    }
}

fn run_repro(args: &ReproArgs, g: &GlobalOpts) -> Result<RunOutput> {
    let mut table = Table::new(&CLAIM_COLUMNS);
    table.comment("mixed-measures repro");
    if args.list {
        table.comment("registered claims:");
        for spec in repro::claims() {
            table.comment(format!(
                "claim {} [instances={}]: {}",
                spec.id, spec.instances, spec.summary
            ));
        }
        return Ok(RunOutput::ok(table));
    }
    let claim = args.claim.as_deref().expect("clap requires CLAIM without --list");
    table.comment(format!("config: claim={claim} seed={}", g.seed));
    let outcomes = if claim == "all" {
        repro::run_all(g.seed)
    } else {
        vec![repro::run_claim(claim, g.seed)?]
    };
    for outcome in &outcomes {
        table.comment(format!(
            "claim {}: {} - {}",
            outcome.id,
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        ));
    }
    let (passed, total) = (
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len(),
    );
    table.comment(format!(
        "summary: claims={total} passed={passed} failed={}",
        total - passed
    ));
    for outcome in &outcomes {
        for row in &outcome.rows {
            table.row(claim_row_cells(row));
        }
    }
    let exit = repro_exit(&outcomes);
    Ok(RunOutput { table, exit })
}

fn run(cli: &Cli) -> Result<RunOutput> {
    match &cli.command {
        Command::Body(args) => run_body(args),
        Command::Measure(args) => run_measure(args),
        Command::Surface(args) => run_surface(args),
        Command::Mixed(args) => run_mixed(args, cli.global.tolerance_scale),
        Command::Check(args) => run_check(args, &cli.global),
        Command::Search(args) => run_search(args, &cli.global),
        Command::Convexfn(args) => run_convexfn(args, &cli.global),
        Command::Repro(args) => run_repro(args, &cli.global),
    }
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    if !(cli.global.tolerance_scale.is_finite() && cli.global.tolerance_scale > 0.0) {
        eprintln!(
            "{}",
            serde_json::json!({
                "error": format!(
                    "--tolerance-scale must be finite and positive, got {}",
                    cli.global.tolerance_scale
                )
            })
        );
        return std::process::ExitCode::from(2);
    }
    match run(&cli) {
        Ok(output) => {
            let text = output.table.render(cli.global.format);
            if let Some(path) = &cli.global.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!(
                        "{}",
                        serde_json::json!({
                            "error": format!("writing {}: {e}", path.display())
                        })
                    );
                    return std::process::ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            std::process::ExitCode::from(output.exit)
        }
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            std::process::ExitCode::from(2)
        }
    }
}
