//! Reproducible claim registry.
//!
//! A *claim* is a named, self-contained numerical experiment: it states up
//! front what must hold (an inequality sweep with zero violations, an
//! identity within a tolerance, a search that must find a witness), runs a
//! deterministic batch of checks derived from a master seed, and reports
//! honestly whether the expectation was met. Claims power the `repro`
//! command and the acceptance suite.
//!
//! Determinism contract: for a fixed claim id and seed, the emitted rows are
//! byte-identical across runs and thread counts. Instance streams are split
//! per index from the master seed, and rows are collected in index order.

use crate::bodies::{self, Body};
use crate::convexfn;
use crate::error::{Error, Result};
use crate::exec;
use crate::generate;
use crate::geom;
use crate::inequalities::{self, FConcavity};
use crate::measures::{self, EvalResult, Measure, RadialExpFamily};
use crate::mixed::{self, FdSchedule};
use crate::reports::{InequalityReport, Verdict};
use crate::stats;
use crate::surface;
use rand::Rng;

/// Master seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Fixed column set of every claim report.
pub const CSV_HEADER: &str =
    "claim_id,inequality,measure,body_ids,lhs,lhs_err,rhs,rhs_err,margin,verdict";

/// One row of a claim report, mirroring the CSV columns.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub claim_id: String,
    pub inequality: String,
    pub measure: String,
    pub body_ids: String,
    pub lhs: f64,
    pub lhs_err: f64,
    pub rhs: f64,
    pub rhs_err: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

/// Text fields may contain commas (body descriptions do); the CSV stays
/// unquoted, so separators inside fields are replaced.
fn sanitize_field(s: &str) -> String {
    s.chars()
        .map(|c| if c == ',' || c == '\n' || c == '\r' { ';' } else { c })
        .collect()
}

impl ReportRow {
    pub fn from_report(
        claim_id: &str,
        measure: &str,
        body_ids: &str,
        report: &InequalityReport,
    ) -> ReportRow {
        ReportRow {
            claim_id: claim_id.to_string(),
            inequality: report.name.clone(),
            measure: measure.to_string(),
            body_ids: body_ids.to_string(),
            lhs: report.lhs.value,
            lhs_err: report.lhs.abs_error,
            rhs: report.rhs.value,
            rhs_err: report.rhs.abs_error,
            margin: report.margin,
            verdict: report.verdict,
        }
    }

    /// One CSV line, without a trailing newline. Floats print in Rust's
    /// shortest round-trip form, so identical values give identical bytes.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            sanitize_field(&self.claim_id),
            sanitize_field(&self.inequality),
            sanitize_field(&self.measure),
            sanitize_field(&self.body_ids),
            self.lhs,
            self.lhs_err,
            self.rhs,
            self.rhs_err,
            self.margin,
            self.verdict
        )
    }
}

/// Header plus one line per row, newline-terminated.
pub fn csv_report(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(64 + 96 * rows.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Result of running one claim.
#[derive(Debug)]
pub struct ClaimOutcome {
    pub id: &'static str,
    pub passed: bool,
    /// One-line explanation: the headline numbers when passing, the first
    /// few problems when failing.
    pub detail: String,
    pub rows: Vec<ReportRow>,
}

/// Registry entry: what the claim asserts and how many randomized instances
/// it consumes (0 for deterministic grids).
#[derive(Debug, Clone, Copy)]
pub struct ClaimSpec {
    pub id: &'static str,
    pub summary: &'static str,
    pub instances: usize,
}

/// All registered claims, in canonical order.
pub fn claims() -> &'static [ClaimSpec] {
    &[
        ClaimSpec {
            id: "oracle-first-order",
            summary: "first mixed quantity: boundary formula agrees with finite differences \
                      on 50 polygon pairs under volume, gaussian, and |x|^2 weights",
            instances: 50,
        },
        ClaimSpec {
            id: "classical-reductions",
            summary: "volume mixed quantities reduce to classical values: self-pairing is \
                      twice the area, ball-pairing is the perimeter, and the second mixed \
                      quantity is base-independent and matches polarization",
            instances: 22,
        },
        ClaimSpec {
            id: "homogeneity-square",
            summary: "|x|^2 weight on the square: homogeneity identities of degree 4 within \
                      1e-3 relative, and the boundary mass 32/3 from three routes within 1e-6",
            instances: 0,
        },
        ClaimSpec {
            id: "sweep-brunn-minkowski",
            summary: "1/2-power concavity of volume along Minkowski interpolation: 200 \
                      polygon pairs, zero violations, under 10% inconclusive",
            instances: 200,
        },
        ClaimSpec {
            id: "sweep-minkowski",
            summary: "first and second Minkowski consequences of 1/2-concave volume on 100 \
                      polygon pairs: zero violations, under 10% inconclusive",
            instances: 100,
        },
        ClaimSpec {
            id: "sweep-gaussian-quadratic",
            summary: "gaussian quadratic corollary on 100 origin-symmetric polygon pairs: \
                      zero violations, under 10% inconclusive",
            instances: 100,
        },
        ClaimSpec {
            id: "sweep-reverse-quadratic",
            summary: "reverse quadratic bound on 100 volume triples and 100 symmetric \
                      gaussian triples: zero violations, under 10% inconclusive",
            instances: 200,
        },
        ClaimSpec {
            id: "sweep-fenchel",
            summary: "bracket, product, and classical Fenchel-type bounds on 100 \
                      origin-containing polygon triples: zero violations",
            instances: 100,
        },
        ClaimSpec {
            id: "lebesgue-supermodular",
            summary: "volume is supermodular: global, first-order, and second-order forms \
                      agree and hold on 100 polygon triples",
            instances: 100,
        },
        ClaimSpec {
            id: "gaussian-not-modular",
            summary: "gaussian measure on centered planar balls is neither supermodular nor \
                      submodular: a 500-instance search finds violations of both",
            instances: 1000,
        },
        ClaimSpec {
            id: "gaussian-1d-submodular",
            summary: "gaussian measure of symmetric intervals on the line is submodular \
                      across a 20^3 radius grid",
            instances: 0,
        },
        ClaimSpec {
            id: "ball-segment-negative",
            summary: "gaussian second mixed quantity of a centered ball with a symmetric \
                      segment pair is decisively negative and matches the closed form",
            instances: 0,
        },
        ClaimSpec {
            id: "surface-monotone-xsq",
            summary: "|x|^2 boundary mass grows under zonotope addition on 200 instances; \
                      a 100-instance non-symmetric falsifier family completes and is \
                      classified",
            instances: 300,
        },
        ClaimSpec {
            id: "log-submodularity-constant",
            summary: "volume ratio vol(A)vol(A+B+C) / (vol(A+B)vol(A+C)) stays at most 1 on \
                      300 polygon triples",
            instances: 300,
        },
        ClaimSpec {
            id: "log-submodular-dilates",
            summary: "log-concave radial measures are log-submodular when one summand \
                      dilates the other: 50 instances across gaussian and radial-exponential \
                      weights",
            instances: 50,
        },
        ClaimSpec {
            id: "log-submodular-interval",
            summary: "1-d gaussian is log-submodular for an arbitrary interval plus two \
                      symmetric intervals across a deterministic parameter grid",
            instances: 0,
        },
        ClaimSpec {
            id: "log-submodular-local",
            summary: "infinitesimal log-submodularity (mass times second mixed at most the \
                      product of first mixed) holds for volume on 50 polygon triples",
            instances: 50,
        },
        ClaimSpec {
            id: "convex-endpoint-bound",
            summary: "endpoint arc bound holds on 1000 random nonnegative convex \
                      piecewise-linear functions, with equality on the closed-form family",
            instances: 1000,
        },
        ClaimSpec {
            id: "convex-optimized-bound",
            summary: "optimized (sign-free) arc bound holds on 500 random convex functions \
                      on [0,1] and is translation invariant",
            instances: 500,
        },
        ClaimSpec {
            id: "convex-boundary-probe",
            summary: "boundary-vs-graph energy probe holds across the full \
                      exponent/amplitude/aspect grid (54 cases)",
            instances: 0,
        },
        ClaimSpec {
            id: "disk-flux",
            summary: "density-gradient flux through random disks vanishes for volume and \
                      has certified sign for the gaussian, matching the closed form",
            instances: 70,
        },
        ClaimSpec {
            id: "zonotope-roundtrip",
            summary: "origin-containing zonotopes decompose into segments from the origin \
                      whose sum reproduces the support function on a 1-degree net",
            instances: 50,
        },
    ]
}

/// Run one claim by id. Unknown ids are a configuration error; everything
/// else, including internal evaluation failures, is reported through the
/// outcome's `passed`/`detail`.
pub fn run_claim(id: &str, seed: u64) -> Result<ClaimOutcome> {
    let outcome = match id {
        "oracle-first-order" => claim_oracle_first_order(seed),
        "classical-reductions" => claim_classical_reductions(seed),
        "homogeneity-square" => claim_homogeneity_square(seed),
        "sweep-brunn-minkowski" => claim_sweep_brunn_minkowski(seed),
        "sweep-minkowski" => claim_sweep_minkowski(seed),
        "sweep-gaussian-quadratic" => claim_sweep_gaussian_quadratic(seed),
        "sweep-reverse-quadratic" => claim_sweep_reverse_quadratic(seed),
        "sweep-fenchel" => claim_sweep_fenchel(seed),
        "lebesgue-supermodular" => claim_lebesgue_supermodular(seed),
        "gaussian-not-modular" => claim_gaussian_not_modular(seed),
        "gaussian-1d-submodular" => claim_gaussian_1d_submodular(seed),
        "ball-segment-negative" => claim_ball_segment_negative(seed),
        "surface-monotone-xsq" => claim_surface_monotone_xsq(seed),
        "log-submodularity-constant" => claim_log_submodularity_constant(seed),
        "log-submodular-dilates" => claim_log_submodular_dilates(seed),
        "log-submodular-interval" => claim_log_submodular_interval(seed),
        "log-submodular-local" => claim_log_submodular_local(seed),
        "convex-endpoint-bound" => claim_convex_endpoint_bound(seed),
        "convex-optimized-bound" => claim_convex_optimized_bound(seed),
        "convex-boundary-probe" => claim_convex_boundary_probe(seed),
        "disk-flux" => claim_disk_flux(seed),
        "zonotope-roundtrip" => claim_zonotope_roundtrip(seed),
        _ => {
            return Err(Error::Invalid(format!(
                "unknown claim id '{id}'; list the registry for valid ids"
            )))
        }
    };
    Ok(outcome)
}

/// Run every registered claim in canonical order.
pub fn run_all(seed: u64) -> Vec<ClaimOutcome> {
    claims()
        .iter()
        .map(|c| run_claim(c.id, seed).expect("registry ids resolve"))
        .collect()
}

// ---------------------------------------------------------------------------
// shared plumbing

/// Row/failure accumulator used inside claims (and inside per-instance
/// closures, which merge their parts back in index order).
#[derive(Default)]
struct Part {
    rows: Vec<ReportRow>,
    failures: Vec<String>,
}

impl Part {
    fn row(&mut self, claim_id: &str, measure: &str, body_ids: &str, report: &InequalityReport) {
        self.rows
            .push(ReportRow::from_report(claim_id, measure, body_ids, report));
    }

    fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(note());
        }
    }

    fn fail(&mut self, note: String) {
        self.failures.push(note);
    }

    fn merge(&mut self, other: Part) {
        self.rows.extend(other.rows);
        self.failures.extend(other.failures);
    }

    fn finish(self, id: &'static str, ok_detail: String) -> ClaimOutcome {
        let passed = self.failures.is_empty();
        let detail = if passed {
            ok_detail
        } else {
            let shown: Vec<&str> = self.failures.iter().take(4).map(String::as_str).collect();
            let rest = self.failures.len().saturating_sub(shown.len());
            if rest > 0 {
                format!(
                    "{} problems: {}; and {rest} more",
                    self.failures.len(),
                    shown.join("; ")
                )
            } else {
                format!("{} problems: {}", self.failures.len(), shown.join("; "))
            }
        };
        ClaimOutcome { id, passed, detail, rows: self.rows }
    }
}

fn verdict_counts(rows: &[ReportRow]) -> (usize, usize, usize) {
    let mut holds = 0;
    let mut violated = 0;
    let mut inconclusive = 0;
    for row in rows {
        match row.verdict {
            Verdict::Holds => holds += 1,
            Verdict::Violated => violated += 1,
            Verdict::Inconclusive => inconclusive += 1,
        }
    }
    (holds, violated, inconclusive)
}

/// Sweep guard shared by the inequality sweeps: no violations and at most
/// `frac` of the rows inconclusive.
fn require_sweep_clean(part: &mut Part, frac: f64, context: &str) {
    let (_, violated, inconclusive) = verdict_counts(&part.rows);
    let total = part.rows.len().max(1);
    part.check(violated == 0, || {
        format!("{context}: {violated} violated rows")
    });
    part.check(
        (inconclusive as f64) < frac * total as f64,
        || format!("{context}: {inconclusive}/{total} inconclusive rows exceeds {frac:.0e}"),
    );
}

fn pair_ids(i: usize, k: &Body, l: &Body) -> String {
    format!("i={i}; {}; {}", k.describe(), l.describe())
}

fn triple_ids(i: usize, a: &Body, b: &Body, c: &Body) -> String {
    format!("i={i}; {}; {}; {}", a.describe(), b.describe(), c.describe())
}

// ---------------------------------------------------------------------------
// claims

fn claim_oracle_first_order(seed: u64) -> ClaimOutcome {
    const ID: &str = "oracle-first-order";
    let schedule = FdSchedule::default();
    let mus = [
        Measure::Lebesgue,
        Measure::Gaussian,
        Measure::RadialPower { p: 2.0 },
    ];
    let mut part = Part::default();
    let mut worst_rel: f64 = 0.0;
    let per: Vec<(Part, f64)> = exec::map_indexed(50, |i| {
        let mut local = Part::default();
        let mut rel: f64 = 0.0;
        let mut rng = generate::instance_rng(seed, i as u64);
        let k = generate::random_polygon(&mut rng);
        let l = generate::random_polygon(&mut rng);
        for mu in &mus {
            let formula = mixed::mixed1_formula(mu, &k, &l);
            let fd = mixed::mixed1_fd(mu, &k, &l, &schedule);
            match (formula, fd) {
                (Ok(formula), Ok(fd)) => {
                    let scale = formula.value.abs().max(fd.value.abs());
                    let diff = (formula.value - fd.value).abs();
                    let allow = (1e-3 * scale)
                        .max(3.0 * (formula.abs_error + fd.abs_error))
                        .max(1e-9);
                    rel = rel.max(diff / scale.max(1e-9));
                    let rep = InequalityReport::identity(
                        "first-order-route-agreement",
                        &format!("{}; formula vs finite differences", mu.name()),
                        formula,
                        fd,
                    );
                    local.row(ID, &mu.name(), &pair_ids(i, &k, &l), &rep);
                    local.check(diff <= allow, || {
                        format!(
                            "i={i} {}: routes differ by {diff:.3e} (allowance {allow:.3e})",
                            mu.name()
                        )
                    });
                }
                (Err(e), _) => local.fail(format!("i={i} {}: formula route: {e}", mu.name())),
                (_, Err(e)) => local.fail(format!("i={i} {}: fd route: {e}", mu.name())),
            }
        }
        (local, rel)
    });
    for (local, rel) in per {
        part.merge(local);
        worst_rel = worst_rel.max(rel);
    }
    let n = part.rows.len();
    part.finish(
        ID,
        format!("{n} route comparisons agree; worst relative gap {worst_rel:.2e}"),
    )
}

fn claim_classical_reductions(seed: u64) -> ClaimOutcome {
    const ID: &str = "classical-reductions";
    let mu = Measure::Lebesgue;
    let mut part = Part::default();
    let mut worst: f64 = 0.0;

    // Self-pairing doubles the area; pairing with the unit ball gives the
    // perimeter (edge-length oracle computed directly from the vertex list).
    for i in 0..20 {
        let mut rng = generate::instance_rng(seed, i as u64);
        let k = generate::random_polygon(&mut rng);
        let area = match measures::measure(&mu, &k) {
            Ok(v) => v,
            Err(e) => {
                part.fail(format!("i={i}: area: {e}"));
                continue;
            }
        };
        match mixed::mixed1_formula(&mu, &k, &k) {
            Ok(selfpair) => {
                let diff = (selfpair.value - 2.0 * area.value).abs();
                worst = worst.max(diff);
                let rep = InequalityReport::identity(
                    "self-pairing-doubles-area",
                    "volume; first mixed quantity of K with itself",
                    selfpair,
                    area.scale(2.0),
                );
                part.row(ID, "lebesgue", &pair_ids(i, &k, &k), &rep);
                part.check(diff <= 1e-9, || {
                    format!("i={i}: self-pairing differs from twice the area by {diff:.3e}")
                });
            }
            Err(e) => part.fail(format!("i={i}: self-pairing: {e}")),
        }
        let verts = match k.vertices() {
            Ok(v) => v,
            Err(e) => {
                part.fail(format!("i={i}: vertices: {e}"));
                continue;
            }
        };
        let mut perimeter = 0.0;
        for j in 0..verts.len() {
            let p = &verts[j];
            let q = &verts[(j + 1) % verts.len()];
            perimeter += (p[0] - q[0]).hypot(p[1] - q[1]);
        }
        let ball = Body::unit_ball(2);
        match mixed::mixed1_formula(&mu, &k, &ball) {
            Ok(ballpair) => {
                let diff = (ballpair.value - perimeter).abs();
                worst = worst.max(diff);
                let rep = InequalityReport::identity(
                    "ball-pairing-gives-perimeter",
                    "volume; first mixed quantity of K with the unit ball",
                    ballpair,
                    EvalResult::exact(perimeter),
                );
                part.row(ID, "lebesgue", &pair_ids(i, &k, &ball), &rep);
                part.check(diff <= 1e-9, || {
                    format!("i={i}: ball-pairing differs from the perimeter by {diff:.3e}")
                });
            }
            Err(e) => part.fail(format!("i={i}: ball-pairing: {e}")),
        }
    }

    // The second mixed quantity must not depend on the base body, and must
    // equal the polarization value vol(B+C) - vol(B) - vol(C).
    let mut rng = generate::instance_rng(seed, 1000);
    let b = generate::random_polygon(&mut rng);
    let c = generate::random_polygon(&mut rng);
    let bases: Vec<(&str, Body)> = vec![
        (
            "offset square",
            Body::polytope(vec![
                vec![0.3, -0.2],
                vec![1.3, -0.2],
                vec![1.3, 0.8],
                vec![0.3, 0.8],
            ])
            .expect("square"),
        ),
        ("ball", Body::ball(vec![0.4, -0.1], 0.7).expect("ball")),
        (
            "triangle",
            Body::polytope(vec![vec![0.0, 0.0], vec![2.0, 0.5], vec![0.5, 1.5]])
                .expect("triangle"),
        ),
        ("polygon", generate::random_polygon(&mut rng)),
        ("zonotope", generate::random_zonotope(&mut rng)),
    ];
    let polarization = (|| -> Result<EvalResult> {
        let sum = b.minkowski_sum(&c)?;
        Ok(measures::measure(&mu, &sum)?
            .sub(&measures::measure(&mu, &b)?)
            .sub(&measures::measure(&mu, &c)?))
    })();
    match polarization {
        Ok(pol) => {
            let mut values: Vec<EvalResult> = Vec::new();
            for (label, a) in &bases {
                match inequalities::mixed2_best(&mu, a, &b, &c) {
                    Ok(v) => {
                        let diff = (v.value - pol.value).abs();
                        worst = worst.max(diff);
                        let allow = (3.0 * (v.abs_error + pol.abs_error))
                            .max(1e-9 * (1.0 + pol.value.abs()));
                        let rep = InequalityReport::identity(
                            "second-mixed-base-independent",
                            &format!("volume; base {label}; target is the polarization value"),
                            v.clone(),
                            pol.clone(),
                        );
                        part.row(
                            ID,
                            "lebesgue",
                            &format!("base={label}; {}; {}", b.describe(), c.describe()),
                            &rep,
                        );
                        part.check(diff <= allow, || {
                            format!(
                                "base {label}: second mixed {:.6} differs from polarization \
                                 {:.6} by {diff:.3e} (allowance {allow:.3e})",
                                v.value, pol.value
                            )
                        });
                        values.push(v);
                    }
                    Err(e) => part.fail(format!("base {label}: second mixed: {e}")),
                }
            }
            if values.len() >= 2 {
                let hi = values
                    .iter()
                    .cloned()
                    .max_by(|x, y| x.value.partial_cmp(&y.value).unwrap())
                    .unwrap();
                let lo = values
                    .iter()
                    .cloned()
                    .min_by(|x, y| x.value.partial_cmp(&y.value).unwrap())
                    .unwrap();
                let spread = hi.value - lo.value;
                let allow =
                    (3.0 * (hi.abs_error + lo.abs_error)).max(1e-9 * (1.0 + pol.value.abs()));
                part.check(spread <= allow, || {
                    format!("base spread {spread:.3e} exceeds allowance {allow:.3e}")
                });
            }
        }
        Err(e) => part.fail(format!("polarization value: {e}")),
    }

    let n = part.rows.len();
    part.finish(
        ID,
        format!("{n} reductions matched; worst absolute gap {worst:.2e}"),
    )
}

fn claim_homogeneity_square(_seed: u64) -> ClaimOutcome {
    const ID: &str = "homogeneity-square";
    let mu = Measure::RadialPower { p: 2.0 };
    let schedule = FdSchedule::default();
    let square = Body::polytope(vec![
        vec![-1.0, -1.0],
        vec![1.0, -1.0],
        vec![1.0, 1.0],
        vec![-1.0, 1.0],
    ])
    .expect("square");
    let b = Body::polytope(vec![
        vec![0.2, 0.0],
        vec![1.1, 0.3],
        vec![-0.4, 0.9],
        vec![-0.8, -0.5],
    ])
    .expect("quadrilateral");
    let diamond = Body::polytope(vec![
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![-1.0, 0.0],
        vec![0.0, -1.0],
    ])
    .expect("diamond");
    let mut part = Part::default();
    let mut worst_rel: f64 = 0.0;

    match mixed::homogeneity_suite(&mu, &square, &b, &diamond, &schedule) {
        Ok(reports) => {
            for rep in &reports {
                let scale = 1.0 + rep.lhs.value.abs().max(rep.rhs.value.abs());
                let rel = rep.margin.abs() / scale;
                worst_rel = worst_rel.max(rel);
                part.row(ID, &mu.name(), "square [-1,1]^2 with two polygon probes", rep);
                part.check(rel <= 1e-3, || {
                    format!("{}: relative gap {rel:.3e} exceeds 1e-3", rep.name)
                });
            }
        }
        Err(e) => part.fail(format!("homogeneity identities: {e}")),
    }

    // Boundary mass of the square under |x|^2: integral of (1 + t^2) over
    // four unit-speed edges, i.e. 4 * (2 + 2/3) = 32/3.
    let golden = 32.0 / 3.0;
    match surface::weighted_surface_area(&mu, &square) {
        Ok(v) => {
            let diff = (v.value - golden).abs();
            let rep = InequalityReport::identity(
                "boundary-mass-formula-route",
                "|x|^2 boundary mass of the square against the closed form",
                v,
                EvalResult::exact(golden),
            );
            part.row(ID, &mu.name(), "square [-1,1]^2", &rep);
            part.check(diff <= 1e-6, || {
                format!("formula route misses 32/3 by {diff:.3e}")
            });
        }
        Err(e) => part.fail(format!("boundary mass formula route: {e}")),
    }
    match mixed::weighted_surface_area_fd(&mu, &square, &schedule) {
        Ok(v) => {
            let diff = (v.value - golden).abs();
            let rep = InequalityReport::identity(
                "boundary-mass-fd-route",
                "|x|^2 boundary mass of the square against the closed form",
                v,
                EvalResult::exact(golden),
            );
            part.row(ID, &mu.name(), "square [-1,1]^2", &rep);
            part.check(diff <= 1e-6, || {
                format!("fd route misses 32/3 by {diff:.3e}")
            });
        }
        Err(e) => part.fail(format!("boundary mass fd route: {e}")),
    }

    part.finish(
        ID,
        format!("degree-4 identities and the 32/3 golden value hold; worst relative gap {worst_rel:.2e}"),
    )
}

fn claim_sweep_brunn_minkowski(seed: u64) -> ClaimOutcome {
    const ID: &str = "sweep-brunn-minkowski";
    let mu = Measure::Lebesgue;
    let f = FConcavity::Power { s: 0.5 };
    let grid = [0.25, 0.5, 0.75];
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(200, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let k = generate::random_polygon(&mut rng);
        let l = generate::random_polygon(&mut rng);
        match inequalities::check_f_concavity(&mu, &f, &k, &l, &grid) {
            Ok(rep) => local.row(ID, "lebesgue", &pair_ids(i, &k, &l), &rep),
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    require_sweep_clean(&mut part, 0.10, "1/2-power concavity sweep");
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.finish(
        ID,
        format!("200 pairs: {holds} hold, {violated} violated, {inconclusive} inconclusive"),
    )
}

fn claim_sweep_minkowski(seed: u64) -> ClaimOutcome {
    const ID: &str = "sweep-minkowski";
    let mu = Measure::Lebesgue;
    let f = FConcavity::Power { s: 0.5 };
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(100, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let k = generate::random_polygon(&mut rng);
        let l = generate::random_polygon(&mut rng);
        let ids = pair_ids(i, &k, &l);
        match inequalities::minkowski_first(&mu, &f, &k, &l) {
            Ok(rep) => local.row(ID, "lebesgue", &ids, &rep),
            Err(e) => local.fail(format!("i={i} first: {e}")),
        }
        match inequalities::minkowski_second(&mu, &f, &k, &l) {
            Ok(rep) => local.row(ID, "lebesgue", &ids, &rep),
            Err(e) => local.fail(format!("i={i} second: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    require_sweep_clean(&mut part, 0.10, "Minkowski consequence sweep");
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.finish(
        ID,
        format!("200 checks: {holds} hold, {violated} violated, {inconclusive} inconclusive"),
    )
}

fn claim_sweep_gaussian_quadratic(seed: u64) -> ClaimOutcome {
    const ID: &str = "sweep-gaussian-quadratic";
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(100, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let k = generate::symmetric_polygon(&mut rng);
        let l = generate::symmetric_polygon(&mut rng);
        match inequalities::gaussian_second_corollary(&k, &l) {
            Ok(rep) => local.row(ID, "gaussian", &pair_ids(i, &k, &l), &rep),
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    require_sweep_clean(&mut part, 0.10, "gaussian quadratic sweep");
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.finish(
        ID,
        format!("100 pairs: {holds} hold, {violated} violated, {inconclusive} inconclusive"),
    )
}

fn claim_sweep_reverse_quadratic(seed: u64) -> ClaimOutcome {
    const ID: &str = "sweep-reverse-quadratic";
    let f = FConcavity::Power { s: 0.5 };
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(200, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        if i < 100 {
            let mu = Measure::Lebesgue;
            let a = generate::random_polygon(&mut rng);
            let b = generate::random_polygon(&mut rng);
            let c = generate::random_polygon(&mut rng);
            match inequalities::reverse_quadratic(&mu, &f, &a, &b, &c) {
                Ok(rep) => local.row(ID, "lebesgue", &triple_ids(i, &a, &b, &c), &rep),
                Err(e) => local.fail(format!("i={i} volume: {e}")),
            }
        } else {
            let mu = Measure::Gaussian;
            let a = generate::symmetric_polygon(&mut rng);
            let b = generate::symmetric_polygon(&mut rng);
            let c = generate::symmetric_polygon(&mut rng);
            match inequalities::reverse_quadratic(&mu, &f, &a, &b, &c) {
                Ok(rep) => local.row(ID, "gaussian", &triple_ids(i, &a, &b, &c), &rep),
                Err(e) => local.fail(format!("i={i} gaussian: {e}")),
            }
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    require_sweep_clean(&mut part, 0.10, "reverse quadratic sweep");
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.finish(
        ID,
        format!("200 triples: {holds} hold, {violated} violated, {inconclusive} inconclusive"),
    )
}

fn claim_sweep_fenchel(seed: u64) -> ClaimOutcome {
    const ID: &str = "sweep-fenchel";
    let mu = Measure::Lebesgue;
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(100, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let a = generate::origin_polygon(&mut rng);
        let b = generate::origin_polygon(&mut rng);
        let c = generate::origin_polygon(&mut rng);
        match inequalities::fenchel_bounds(&mu, 0.5, &a, &b, &c) {
            Ok(reports) => {
                for rep in &reports {
                    local.row(ID, "lebesgue", &triple_ids(i, &a, &b, &c), rep);
                }
            }
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    require_sweep_clean(&mut part, 0.10, "bracket and product bound sweep");
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    let total = part.rows.len();
    part.finish(
        ID,
        format!("{total} bounds: {holds} hold, {violated} violated, {inconclusive} inconclusive"),
    )
}

fn claim_lebesgue_supermodular(seed: u64) -> ClaimOutcome {
    const ID: &str = "lebesgue-supermodular";
    let mu = Measure::Lebesgue;
    let mut part = Part::default();
    let mut inconsistent = 0usize;
    let per: Vec<(Part, usize)> = exec::map_indexed(100, |i| {
        let mut local = Part::default();
        let mut bad = 0usize;
        let mut rng = generate::instance_rng(seed, i as u64);
        let a = generate::random_polygon(&mut rng);
        let b = generate::random_polygon(&mut rng);
        let c = generate::random_polygon(&mut rng);
        match inequalities::supermod_suite(&mu, &a, &b, &c) {
            Ok(suite) => {
                let ids = triple_ids(i, &a, &b, &c);
                for rep in [&suite.global, &suite.first_order, &suite.second_order] {
                    local.row(ID, "lebesgue", &ids, rep);
                }
                if !suite.consistent {
                    bad = 1;
                    local.fail(format!("i={i}: the three forms disagree"));
                }
            }
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        (local, bad)
    });
    for (local, bad) in per {
        part.merge(local);
        inconsistent += bad;
    }
    let (_, violated, _) = verdict_counts(&part.rows);
    part.check(violated == 0, || {
        format!("supermodularity violated on {violated} rows")
    });
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.finish(
        ID,
        format!(
            "300 rows: {holds} hold, {violated} violated, {inconclusive} inconclusive, \
             {inconsistent} inconsistent triples"
        ),
    )
}

fn claim_gaussian_not_modular(seed: u64) -> ClaimOutcome {
    const ID: &str = "gaussian-not-modular";
    let mu = Measure::Gaussian;
    let mut part = Part::default();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| generate::random_ball_triple(rng, 2).to_vec();

    let supermod = inequalities::counterexample_search(500, seed, draw, |bs: &[Body]| {
        inequalities::supermod_global(&mu, &bs[0], &bs[1], &bs[2])
    });
    match supermod {
        Ok(hits) => {
            let n = hits.len();
            for (idx, rep) in hits.iter().take(25) {
                part.row(ID, "gaussian", &format!("search i={idx}"), rep);
            }
            part.check(n > 0, || "no supermodularity violation found".into());
        }
        Err(Error::BudgetExhausted { budget, .. }) => part.fail(format!(
            "supermodularity direction: no violation in {budget} instances"
        )),
        Err(e) => part.fail(format!("supermodularity search: {e}")),
    }

    let submod = inequalities::counterexample_search(500, seed, draw, |bs: &[Body]| {
        let r = inequalities::supermod_global(&mu, &bs[0], &bs[1], &bs[2])?;
        Ok(InequalityReport::inequality(
            "submodularity-global",
            &r.inputs,
            r.rhs,
            r.lhs,
        ))
    });
    match submod {
        Ok(hits) => {
            let n = hits.len();
            for (idx, rep) in hits.iter().take(25) {
                part.row(ID, "gaussian", &format!("search i={idx}"), rep);
            }
            part.check(n > 0, || "no submodularity violation found".into());
        }
        Err(Error::BudgetExhausted { budget, .. }) => part.fail(format!(
            "submodularity direction: no violation in {budget} instances"
        )),
        Err(e) => part.fail(format!("submodularity search: {e}")),
    }

    let n = part.rows.len();
    part.finish(
        ID,
        format!("both directions violated on centered ball triples ({n} witness rows kept)"),
    )
}

fn claim_gaussian_1d_submodular(_seed: u64) -> ClaimOutcome {
    const ID: &str = "gaussian-1d-submodular";
    let mu = Measure::Gaussian;
    let mut part = Part::default();
    let radius = |j: usize| 0.05 * j as f64;
    let per: Vec<Part> = exec::map_indexed(20, |ja| {
        let mut local = Part::default();
        let ra = radius(ja + 1);
        let a = Body::segment(vec![-ra], vec![ra]).expect("interval");
        for jb in 1..=20 {
            let rb = radius(jb);
            let b = Body::segment(vec![-rb], vec![rb]).expect("interval");
            for jc in 1..=20 {
                let rc = radius(jc);
                let c = Body::segment(vec![-rc], vec![rc]).expect("interval");
                match inequalities::supermod_global(&mu, &a, &b, &c) {
                    Ok(r) => {
                        // Submodular orientation: swap the two sides.
                        let rep = InequalityReport::inequality(
                            "submodularity-global",
                            &r.inputs,
                            r.rhs,
                            r.lhs,
                        );
                        local.row(
                            ID,
                            "gaussian",
                            &format!("a={ra:.2} b={rb:.2} c={rc:.2}"),
                            &rep,
                        );
                    }
                    Err(e) => local.fail(format!("a={ra:.2} b={rb:.2} c={rc:.2}: {e}")),
                }
            }
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.check(violated == 0, || format!("{violated} violated grid points"));
    part.check(inconclusive == 0, || {
        format!("{inconclusive} inconclusive grid points")
    });
    part.finish(
        ID,
        format!("all {holds} grid points decisively submodular"),
    )
}

fn claim_ball_segment_negative(_seed: u64) -> ClaimOutcome {
    const ID: &str = "ball-segment-negative";
    let mu = Measure::Gaussian;
    let schedule = FdSchedule::default();
    let seg = Body::segment(vec![-1.0, 0.0], vec![1.0, 0.0]).expect("segment");
    let mut part = Part::default();
    let mut negative = 0usize;
    let mut worst: f64 = 0.0;
    for i in 1..=10 {
        let r = 0.5 * i as f64;
        let ball = Body::ball(vec![0.0, 0.0], r).expect("ball");
        let ids = format!("R={r:.1}; {}; segment pair", ball.describe());
        // Stadium closed form: mass of the ball grown by u along the segment
        // has second derivative -R^2 e^{-R^2/2} / 2 at u = 0.
        let closed = -0.5 * r * r * (-0.5 * r * r).exp();
        match mixed::mixed2_fd(&mu, &ball, &seg, &seg, &schedule) {
            Ok(fd) => {
                let sign = InequalityReport::inequality(
                    "gaussian-segment-pair-negativity",
                    "gaussian; centered ball with two copies of [-e1, e1]",
                    EvalResult::exact(0.0),
                    fd.clone(),
                );
                if sign.verdict == Verdict::Holds {
                    negative += 1;
                }
                part.row(ID, "gaussian", &ids, &sign);
                let diff = (fd.value - closed).abs();
                worst = worst.max(diff);
                let allow = (3.0 * fd.abs_error).max(1e-6 * (1.0 + closed.abs()));
                let agree = InequalityReport::identity(
                    "stadium-closed-form-agreement",
                    "gaussian; finite differences against the stadium derivative",
                    fd,
                    EvalResult::exact(closed),
                );
                part.row(ID, "gaussian", &ids, &agree);
                part.check(diff <= allow, || {
                    format!("R={r:.1}: fd {diff:.3e} off the closed form (allowance {allow:.3e})")
                });
            }
            Err(e) => part.fail(format!("R={r:.1}: fd route: {e}")),
        }
        // The sweep formula route is exercised when it supports the
        // combination; its absence is not an error (the fd route is the
        // claim's primary oracle target).
        if let Ok(v) = mixed::mixed2_formula(&mu, &ball, &seg, &seg) {
            let diff = (v.value - closed).abs();
            let allow = (3.0 * v.abs_error).max(1e-6 * (1.0 + closed.abs()));
            let agree = InequalityReport::identity(
                "sweep-formula-route-agreement",
                "gaussian; boundary sweep formula against the stadium derivative",
                v,
                EvalResult::exact(closed),
            );
            part.row(ID, "gaussian", &ids, &agree);
            part.check(diff <= allow, || {
                format!("R={r:.1}: formula {diff:.3e} off the closed form (allowance {allow:.3e})")
            });
        }
    }
    part.check(negative > 0, || {
        "no radius gave a decisively negative second mixed quantity".into()
    });
    part.finish(
        ID,
        format!(
            "{negative}/10 radii decisively negative; worst closed-form gap {worst:.2e}"
        ),
    )
}

fn claim_surface_monotone_xsq(seed: u64) -> ClaimOutcome {
    const ID: &str = "surface-monotone-xsq";
    let mu = Measure::RadialPower { p: 2.0 };
    let mut part = Part::default();

    let per: Vec<Part> = exec::map_indexed(200, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let k = generate::random_polygon(&mut rng);
        let l = generate::random_zonotope(&mut rng);
        match inequalities::surface_monotonicity(&mu, &k, &l) {
            Ok(rep) => local.row(ID, &mu.name(), &pair_ids(i, &k, &l), &rep),
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    let (_, violated, _) = verdict_counts(&part.rows);
    part.check(violated == 0, || {
        format!("zonotope family: {violated} violations")
    });
    let zonotope_rows = part.rows.len();

    // Falsifier family: non-symmetric origin-containing polygons. The run
    // must complete and classify every instance; violations here are
    // permitted (and informative), not required.
    let falsifier: Vec<Part> = exec::map_indexed(100, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, 5000 + i as u64);
        let k = generate::random_polygon(&mut rng);
        let l = generate::origin_polygon(&mut rng);
        match inequalities::surface_monotonicity(&mu, &k, &l) {
            Ok(rep) => local.row(
                ID,
                &mu.name(),
                &format!("falsifier {}", pair_ids(i, &k, &l)),
                &rep,
            ),
            Err(e) => local.fail(format!("falsifier i={i}: {e}")),
        }
        local
    });
    let mut fals_part = Part::default();
    for local in falsifier {
        fals_part.merge(local);
    }
    let (f_holds, f_violated, f_inconclusive) = verdict_counts(&fals_part.rows);
    part.merge(fals_part);

    let (holds, violated, inconclusive) = verdict_counts(&part.rows[..zonotope_rows]);
    part.finish(
        ID,
        format!(
            "zonotopes: {holds} hold, {violated} violated, {inconclusive} inconclusive; \
             falsifiers classified: {f_holds} hold, {f_violated} violated, \
             {f_inconclusive} inconclusive"
        ),
    )
}

fn claim_log_submodularity_constant(seed: u64) -> ClaimOutcome {
    const ID: &str = "log-submodularity-constant";
    let mu = Measure::Lebesgue;
    let mut part = Part::default();
    let mut max_c = f64::NEG_INFINITY;
    let per: Vec<(Part, f64)> = exec::map_indexed(300, |i| {
        let mut local = Part::default();
        let mut c_val = f64::NEG_INFINITY;
        let mut rng = generate::instance_rng(seed, i as u64);
        let a = generate::random_polygon(&mut rng);
        let b = generate::random_polygon(&mut rng);
        let c = generate::random_polygon(&mut rng);
        let ids = triple_ids(i, &a, &b, &c);
        match inequalities::bm_constant(&a, &b, &c) {
            Ok(ratio) => {
                c_val = ratio.value;
                local.check(ratio.value <= 1.0 + 1e-6, || {
                    format!("i={i}: ratio {c_val:.9} exceeds 1 + 1e-6")
                });
            }
            Err(e) => local.fail(format!("i={i} ratio: {e}")),
        }
        match inequalities::log_submodularity(&mu, &a, &b, &c) {
            Ok(rep) => local.row(ID, "lebesgue", &ids, &rep),
            Err(e) => local.fail(format!("i={i} products: {e}")),
        }
        (local, c_val)
    });
    for (local, c_val) in per {
        part.merge(local);
        max_c = max_c.max(c_val);
    }
    let (_, violated, _) = verdict_counts(&part.rows);
    part.check(violated == 0, || {
        format!("{violated} product-form violations")
    });
    part.finish(ID, format!("300 triples; largest ratio {max_c:.9}"))
}

fn claim_log_submodular_dilates(seed: u64) -> ClaimOutcome {
    const ID: &str = "log-submodular-dilates";
    let mus = [
        Measure::Gaussian,
        Measure::RadialExp(RadialExpFamily::HalfSquare),
        Measure::RadialExp(RadialExpFamily::Power { q: 2.0 }),
    ];
    let mut part = Part::default();
    let mut min_margin = f64::INFINITY;
    let per: Vec<(Part, f64)> = exec::map_indexed(50, |i| {
        let mut local = Part::default();
        let mut margin = f64::INFINITY;
        let mut rng = generate::instance_rng(seed, i as u64);
        let mu = &mus[i % mus.len()];
        let a = generate::random_polygon(&mut rng);
        let b = generate::random_polygon(&mut rng);
        let t = 0.2 + 1.6 * rng.random::<f64>();
        match b.dilate(t) {
            Ok(c) => match inequalities::log_submodularity(mu, &a, &b, &c) {
                Ok(rep) => {
                    margin = rep.margin;
                    local.check(rep.verdict == Verdict::Holds, || {
                        format!(
                            "i={i} {} t={t:.3}: verdict {} (margin {:.3e})",
                            mu.name(),
                            rep.verdict,
                            rep.margin
                        )
                    });
                    local.row(
                        ID,
                        &mu.name(),
                        &format!("i={i}; {}; {}; dilate t={t:.3}", a.describe(), b.describe()),
                        &rep,
                    );
                }
                Err(e) => local.fail(format!("i={i} {}: {e}", mu.name())),
            },
            Err(e) => local.fail(format!("i={i}: dilate: {e}")),
        }
        (local, margin)
    });
    for (local, margin) in per {
        part.merge(local);
        min_margin = min_margin.min(margin);
    }
    part.finish(
        ID,
        format!("50 dilate triples hold; smallest margin {min_margin:.3e}"),
    )
}

fn claim_log_submodular_interval(_seed: u64) -> ClaimOutcome {
    const ID: &str = "log-submodular-interval";
    let mu = Measure::Gaussian;
    let bases: [(f64, f64); 5] = [
        (-0.4, 0.9),
        (0.1, 1.2),
        (-1.5, -0.2),
        (-0.6, 0.6),
        (-2.0, 0.3),
    ];
    let radii = [0.1, 0.3, 0.5, 0.7, 0.9, 1.1];
    let mut part = Part::default();
    for (lo, hi) in bases {
        let a = Body::segment(vec![lo], vec![hi]).expect("interval");
        for rb in radii {
            let b = Body::segment(vec![-rb], vec![rb]).expect("interval");
            for rc in radii {
                let c = Body::segment(vec![-rc], vec![rc]).expect("interval");
                match inequalities::log_submodularity(&mu, &a, &b, &c) {
                    Ok(rep) => part.row(
                        ID,
                        "gaussian",
                        &format!("A=[{lo},{hi}] b={rb} c={rc}"),
                        &rep,
                    ),
                    Err(e) => part.fail(format!("A=[{lo},{hi}] b={rb} c={rc}: {e}")),
                }
            }
        }
    }
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.check(violated == 0, || format!("{violated} grid violations"));
    part.finish(
        ID,
        format!("{holds} hold, {inconclusive} inconclusive on the interval grid"),
    )
}

fn claim_log_submodular_local(seed: u64) -> ClaimOutcome {
    const ID: &str = "log-submodular-local";
    let mu = Measure::Lebesgue;
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(50, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let a = generate::random_polygon(&mut rng);
        let b = generate::random_polygon(&mut rng);
        let c = generate::random_polygon(&mut rng);
        match inequalities::log_submodularity_local(&mu, &a, &b, &c) {
            Ok(rep) => local.row(ID, "lebesgue", &triple_ids(i, &a, &b, &c), &rep),
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    let (holds, violated, inconclusive) = verdict_counts(&part.rows);
    part.check(violated == 0, || format!("{violated} local-form violations"));
    part.finish(
        ID,
        format!("50 triples: {holds} hold, {inconclusive} inconclusive"),
    )
}

fn claim_convex_endpoint_bound(seed: u64) -> ClaimOutcome {
    const ID: &str = "convex-endpoint-bound";
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(1000, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let h = generate::random_nonnegative_convex_pl(&mut rng);
        match convexfn::endpoint_arc_check(&h) {
            Ok(reports) => {
                let ids = format!("i={i}; {} pieces", h.breakpoints().len() - 1);
                local.check(reports.strong.margin >= -1e-12, || {
                    format!("i={i}: strong margin {:.3e} negative", reports.strong.margin)
                });
                local.check(
                    reports.weak.margin >= reports.strong.margin - 1e-12,
                    || format!("i={i}: weak bound below the strong bound"),
                );
                local.row(ID, "-", &ids, &reports.strong);
                local.row(ID, "-", &ids, &reports.weak);
            }
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }

    // The closed-form family attains equality for every slope and interval.
    let alphas = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];
    let intervals = [(0.0, 1.0), (-1.0, 1.0), (-2.5, -0.3), (0.7, 3.1)];
    let mut worst_eq: f64 = 0.0;
    for alpha in alphas {
        for (a, b) in intervals {
            match convexfn::equality_family(alpha, a, b)
                .and_then(|h| convexfn::endpoint_arc_check(&h))
            {
                Ok(reports) => {
                    worst_eq = worst_eq.max(reports.strong.margin.abs());
                    part.row(
                        ID,
                        "-",
                        &format!("equality alpha={alpha} on [{a},{b}]"),
                        &reports.strong,
                    );
                    part.check(reports.strong.margin.abs() <= 1e-9, || {
                        format!(
                            "equality family alpha={alpha} on [{a},{b}]: margin {:.3e}",
                            reports.strong.margin
                        )
                    });
                }
                Err(e) => part.fail(format!("equality alpha={alpha} on [{a},{b}]: {e}")),
            }
        }
    }
    part.finish(
        ID,
        format!("1000 random functions hold; equality family within {worst_eq:.2e}"),
    )
}

fn claim_convex_optimized_bound(seed: u64) -> ClaimOutcome {
    const ID: &str = "convex-optimized-bound";
    let mut part = Part::default();
    let per: Vec<Part> = exec::map_indexed(500, |i| {
        let mut local = Part::default();
        let mut rng = generate::instance_rng(seed, i as u64);
        let h = generate::random_convex_pl_unit(&mut rng);
        match convexfn::optimized_arc_check(&h) {
            Ok(check) => {
                local.check(check.report.margin >= -1e-12, || {
                    format!("i={i}: margin {:.3e} negative", check.report.margin)
                });
                local.row(
                    ID,
                    "-",
                    &format!("i={i}; {} pieces", h.breakpoints().len() - 1),
                    &check.report,
                );
                if i % 10 == 0 {
                    match convexfn::optimized_arc_check(&h.shift(7.0)) {
                        Ok(shifted) => {
                            let gap = (check.report.margin - shifted.report.margin).abs();
                            local.check(
                                gap <= 1e-9 * (1.0 + check.report.margin.abs()),
                                || format!("i={i}: translation moved the margin by {gap:.3e}"),
                            );
                            let off = (shifted.offset - check.offset - 7.0).abs();
                            local.check(off <= 1e-9, || {
                                format!("i={i}: recentering offset drifted by {off:.3e}")
                            });
                        }
                        Err(e) => local.fail(format!("i={i} shifted: {e}")),
                    }
                }
            }
            Err(e) => local.fail(format!("i={i}: {e}")),
        }
        local
    });
    for local in per {
        part.merge(local);
    }
    let (holds, _, inconclusive) = verdict_counts(&part.rows);
    part.finish(
        ID,
        format!("500 sign-free functions: {holds} decisive, {inconclusive} at equality"),
    )
}

fn claim_convex_boundary_probe(_seed: u64) -> ClaimOutcome {
    const ID: &str = "convex-boundary-probe";
    let mut part = Part::default();
    for alpha in 1..=3u32 {
        for beta in 1..=3u32 {
            for lambda in [0.5, 1.0, 10.0] {
                for eps in [0.1, 0.5] {
                    match convexfn::boundary_graph_probe(alpha, beta, lambda, eps) {
                        Ok(rep) => {
                            part.check(rep.verdict == Verdict::Holds, || {
                                format!(
                                    "alpha={alpha} beta={beta} lambda={lambda} eps={eps}: \
                                     verdict {} (margin {:.3e})",
                                    rep.verdict, rep.margin
                                )
                            });
                            part.row(
                                ID,
                                "|x|^2 boundary density",
                                &format!("alpha={alpha} beta={beta} lambda={lambda} eps={eps}"),
                                &rep,
                            );
                        }
                        Err(e) => part.fail(format!(
                            "alpha={alpha} beta={beta} lambda={lambda} eps={eps}: {e}"
                        )),
                    }
                }
            }
        }
    }
    let n = part.rows.len();
    part.finish(ID, format!("all {n} grid probes hold"))
}

fn claim_disk_flux(seed: u64) -> ClaimOutcome {
    const ID: &str = "disk-flux";
    let mut part = Part::default();

    // Volume: the density is constant, so the flux vanishes identically.
    for i in 0..50u64 {
        let mut rng = generate::instance_rng(seed, i);
        let n = 2 + (i as usize % 2);
        let x: Vec<f64> = (0..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
        let v = generate::random_direction(&mut rng, n);
        let r = 0.2 + 1.3 * rng.random::<f64>();
        match mixed::disk_normal_flux(&Measure::Lebesgue, &v, r, &x) {
            Ok(fl) => {
                let rep = InequalityReport::identity(
                    "flux-vanishes-for-volume",
                    &format!("volume; disk radius {r:.3} in R^{n}"),
                    fl.clone(),
                    EvalResult::exact(0.0),
                );
                part.row(ID, "lebesgue", &format!("i={i}; R^{n}"), &rep);
                part.check(fl.value.abs() <= 3.0 * fl.abs_error + 1e-12, || {
                    format!("i={i}: volume flux {:.3e} not zero", fl.value)
                });
            }
            Err(e) => part.fail(format!("i={i} volume: {e}")),
        }
    }

    // Gaussian golden case: disk centered at (1,0) with normal e1. The
    // normal component of the gradient is constant in sign on the disk.
    let closed = -(2.0 * stats::normal_cdf(0.5) - 1.0) * (-0.5f64).exp()
        / (2.0 * std::f64::consts::PI).sqrt();
    match mixed::disk_normal_flux(&Measure::Gaussian, &[1.0, 0.0], 0.5, &[1.0, 0.0]) {
        Ok(fl) => {
            let diff = (fl.value - closed).abs();
            let rep = InequalityReport::identity(
                "gaussian-flux-closed-form",
                "gaussian; disk at (1,0), normal e1, radius 1/2",
                fl.clone(),
                EvalResult::exact(closed),
            );
            part.row(ID, "gaussian", "x=(1,0) v=e1 r=0.5", &rep);
            part.check(diff <= (3.0 * fl.abs_error).max(1e-9), || {
                format!("golden flux off by {diff:.3e}")
            });
            part.check(fl.value < -3.0 * fl.abs_error, || {
                "golden flux not decisively negative".into()
            });
        }
        Err(e) => part.fail(format!("golden case: {e}")),
    }

    // Gaussian off-center disks: the flux sign is certified by the sign of
    // <x, v>, because the normal component of the position is constant on
    // the disk plane.
    for i in 0..20u64 {
        let mut rng = generate::instance_rng(seed, 9000 + i);
        let n = 2 + (i as usize % 2);
        let v = generate::random_direction(&mut rng, n);
        let mut x: Vec<f64> = vec![0.0; n];
        let mut dot = 0.0;
        for _ in 0..200 {
            x = (0..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            dot = geom::dot(&x, &v);
            if dot.abs() >= 0.3 {
                break;
            }
        }
        let r = 0.2 + rng.random::<f64>();
        match mixed::disk_normal_flux(&Measure::Gaussian, &v, r, &x) {
            Ok(fl) => {
                let rep = if dot > 0.0 {
                    InequalityReport::inequality(
                        "gaussian-flux-certified-sign",
                        &format!("gaussian; <x,v> = {dot:.3} > 0 so the flux is negative"),
                        EvalResult::exact(0.0),
                        fl,
                    )
                } else {
                    InequalityReport::inequality(
                        "gaussian-flux-certified-sign",
                        &format!("gaussian; <x,v> = {dot:.3} < 0 so the flux is positive"),
                        fl,
                        EvalResult::exact(0.0),
                    )
                };
                part.row(ID, "gaussian", &format!("i={i}; R^{n}; r={r:.3}"), &rep);
                part.check(rep.verdict == Verdict::Holds, || {
                    format!("i={i}: sign not certified (verdict {})", rep.verdict)
                });
            }
            Err(e) => part.fail(format!("i={i} gaussian: {e}")),
        }
    }

    let n = part.rows.len();
    part.finish(ID, format!("{n} flux probes behaved as certified"))
}

fn claim_zonotope_roundtrip(seed: u64) -> ClaimOutcome {
    const ID: &str = "zonotope-roundtrip";
    let mut part = Part::default();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = generate::instance_rng(seed, i);
        let z = generate::random_zonotope(&mut rng);
        let segments = match bodies::zonotope_origin_decomposition(&z) {
            Ok(s) => s,
            Err(e) => {
                part.fail(format!("i={i}: decomposition: {e}"));
                continue;
            }
        };
        for seg in &segments {
            if let Body::Segment { a, .. } = seg {
                part.check(geom::norm(a) == 0.0, || {
                    format!("i={i}: segment does not start at the origin")
                });
            } else {
                part.fail(format!("i={i}: decomposition returned a non-segment"));
            }
        }
        let terms: Vec<(f64, Body)> = segments.iter().map(|s| (1.0, s.clone())).collect();
        let sum = match Body::scaled_sum(&terms) {
            Ok(s) => s,
            Err(e) => {
                part.fail(format!("i={i}: recomposition: {e}"));
                continue;
            }
        };
        let mut dev: f64 = 0.0;
        let mut at = (0.0, 0.0);
        let mut err: Option<String> = None;
        for deg in 0..360 {
            let th = (deg as f64).to_radians();
            let u = [th.cos(), th.sin()];
            match (sum.support(&u), z.support(&u)) {
                (Ok(hs), Ok(hz)) => {
                    if (hs - hz).abs() > dev {
                        dev = (hs - hz).abs();
                        at = (hs, hz);
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    err = Some(format!("i={i}: support at {deg} degrees: {e}"));
                    break;
                }
            }
        }
        if let Some(e) = err {
            part.fail(e);
            continue;
        }
        worst = worst.max(dev);
        let rep = InequalityReport::identity(
            "segment-decomposition-support",
            &format!("supports at the worst of 360 directions; {} segments", segments.len()),
            EvalResult::exact(at.0),
            EvalResult::exact(at.1),
        );
        part.row(ID, "-", &format!("i={i}; {}", z.describe()), &rep);
        part.check(dev <= 1e-9, || {
            format!("i={i}: support deviation {dev:.3e} exceeds 1e-9")
        });
    }
    part.finish(
        ID,
        format!("50 zonotopes round-trip; worst support deviation {worst:.2e}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique_and_dispatch_rejects_unknowns() {
        let specs = claims();
        for (i, a) in specs.iter().enumerate() {
            assert!(!a.summary.is_empty());
            assert!(a.id.chars().all(|c| c.is_ascii_lowercase()
                || c.is_ascii_digit()
                || c == '-'));
            for b in &specs[i + 1..] {
                assert_ne!(a.id, b.id);
            }
        }
        assert!(matches!(
            run_claim("no-such-claim", 1),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn csv_rows_sanitize_separators_and_match_the_header() {
        let rep = InequalityReport::identity(
            "check,with comma",
            "inputs",
            EvalResult::exact(1.0),
            EvalResult::exact(1.0),
        );
        let row = ReportRow::from_report("claim", "measure, weird", "body(a, b)\nnext", &rep);
        let line = row.csv_line();
        assert_eq!(
            line.matches(',').count(),
            CSV_HEADER.matches(',').count(),
            "field separators must match the header: {line}"
        );
        assert!(line.contains("check;with comma"));
        assert!(line.contains("body(a; b);next"));
        let report = csv_report(&[row]);
        assert!(report.starts_with(CSV_HEADER));
        assert!(report.ends_with('\n'));
    }

    #[test]
    fn zonotope_roundtrip_claim_is_deterministic_and_passes() {
        let first = run_claim("zonotope-roundtrip", 5).unwrap();
        assert!(first.passed, "{}", first.detail);
        assert_eq!(first.rows.len(), 50);
        let second = run_claim("zonotope-roundtrip", 5).unwrap();
        let a: Vec<String> = first.rows.iter().map(ReportRow::csv_line).collect();
        let b: Vec<String> = second.rows.iter().map(ReportRow::csv_line).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_probe_claim_covers_the_grid_and_passes() {
        let outcome = run_claim("convex-boundary-probe", DEFAULT_SEED).unwrap();
        assert!(outcome.passed, "{}", outcome.detail);
        assert_eq!(outcome.rows.len(), 54);
        assert!(outcome.rows.iter().all(|r| r.verdict == Verdict::Holds));
    }

    #[test]
    fn interval_submodularity_grid_is_decisive() {
        let outcome = run_claim("gaussian-1d-submodular", DEFAULT_SEED).unwrap();
        assert!(outcome.passed, "{}", outcome.detail);
        assert_eq!(outcome.rows.len(), 20 * 20 * 20);
        assert!(outcome.rows.iter().all(|r| r.verdict == Verdict::Holds));
        // Spot-check one grid point against the closed form: a 1-d interval
        // mass is a difference of normal CDF values.
        let f = |x: f64| 2.0 * stats::normal_cdf(x) - 1.0;
        let margin = f(0.1) + f(0.1) - f(0.05) - f(0.15);
        let row = &outcome.rows[0];
        assert!((row.margin - margin).abs() <= 1e-12, "{}", row.margin);
    }

    #[test]
    fn ball_segment_claim_matches_the_stadium_derivative() {
        let outcome = run_claim("ball-segment-negative", DEFAULT_SEED).unwrap();
        assert!(outcome.passed, "{}", outcome.detail);
        let negativity: Vec<&ReportRow> = outcome
            .rows
            .iter()
            .filter(|r| r.inequality == "gaussian-segment-pair-negativity")
            .collect();
        assert_eq!(negativity.len(), 10);
        assert!(negativity.iter().any(|r| r.verdict == Verdict::Holds));
    }
}
