//! Radial reference measures and the measure-evaluation dispatcher.
//!
//! Every measure here has a density of the form `rho(|x|)`: Lebesgue
//! (`rho = 1`), the standard Gaussian, radial powers `|x|^p`, and the
//! radially decreasing exponential family `e^{-W(|x|)}`.
//!
//! [`measure`] routes each (measure, body) pair to the sharpest available
//! evaluator: closed forms where they exist, boundary-flux or interior
//! quadrature in the plane, and quasi-Monte Carlo sampling as the general
//! fallback. The result always carries an error budget and a tag describing
//! which route produced it.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::planar::{BoundaryPiece, PlanarShape};
use crate::stats::normal_cdf;
use crate::{geom, qmc, quad};

/// How a numerical value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form or polynomial-exact rule; error is pure floating-point
    /// roundoff (this includes normal-CDF evaluations, which are accurate to
    /// near machine precision — far below every tolerance used here).
    Exact,
    /// Deterministic quadrature with a computed refinement error.
    Quadrature,
    /// Quasi-Monte Carlo with a replicate-based standard error.
    Qmc,
    /// Finite differences with Richardson extrapolation.
    FdExtrapolated,
}

impl Method {
    fn rank(self) -> u8 {
        match self {
            Method::Exact => 0,
            Method::Quadrature => 1,
            Method::FdExtrapolated => 2,
            Method::Qmc => 3,
        }
    }

    /// Tag for a value combining two inputs: the less certain class wins.
    pub fn combine(a: Method, b: Method) -> Method {
        if a.rank() >= b.rank() {
            a
        } else {
            b
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Quadrature => "quadrature",
            Method::Qmc => "qmc",
            Method::FdExtrapolated => "fd_extrapolated",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A numerical value with an absolute error budget and provenance tag.
///
/// Invariant: `abs_error == 0` exactly when `method == Exact`; every
/// non-exact constructor floors the error at one ulp-scale unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

fn error_floor(value: f64, err: f64) -> f64 {
    err.abs().max(f64::EPSILON * (1.0 + value.abs()))
}

impl EvalResult {
    pub fn exact(value: f64) -> Self {
        EvalResult { value, abs_error: 0.0, method: Method::Exact }
    }

    pub fn quadrature(value: f64, abs_error: f64) -> Self {
        EvalResult {
            value,
            abs_error: error_floor(value, abs_error),
            method: Method::Quadrature,
        }
    }

    pub fn qmc(value: f64, abs_error: f64) -> Self {
        EvalResult { value, abs_error: error_floor(value, abs_error), method: Method::Qmc }
    }

    pub fn fd(value: f64, abs_error: f64) -> Self {
        EvalResult {
            value,
            abs_error: error_floor(value, abs_error),
            method: Method::FdExtrapolated,
        }
    }

    pub fn with_method(value: f64, abs_error: f64, method: Method) -> Self {
        match method {
            Method::Exact => EvalResult::exact(value),
            _ => EvalResult { value, abs_error: error_floor(value, abs_error), method },
        }
    }

    pub fn add(&self, other: &EvalResult) -> EvalResult {
        EvalResult::with_method(
            self.value + other.value,
            self.abs_error + other.abs_error,
            Method::combine(self.method, other.method),
        )
    }

    pub fn sub(&self, other: &EvalResult) -> EvalResult {
        EvalResult::with_method(
            self.value - other.value,
            self.abs_error + other.abs_error,
            Method::combine(self.method, other.method),
        )
    }

    pub fn scale(&self, k: f64) -> EvalResult {
        EvalResult::with_method(k * self.value, k.abs() * self.abs_error, self.method)
    }

    pub fn mul(&self, other: &EvalResult) -> EvalResult {
        let err = self.value.abs() * other.abs_error
            + other.value.abs() * self.abs_error
            + self.abs_error * other.abs_error;
        EvalResult::with_method(
            self.value * other.value,
            err,
            Method::combine(self.method, other.method),
        )
    }

    pub fn div(&self, other: &EvalResult) -> EvalResult {
        let method = Method::combine(self.method, other.method);
        if other.value == 0.0 {
            return EvalResult::with_method(f64::INFINITY, f64::INFINITY, method);
        }
        let ratio = self.value / other.value;
        let err = (self.abs_error + ratio.abs() * other.abs_error) / other.value.abs();
        EvalResult::with_method(ratio, err, method)
    }
}

/// Radially decreasing exponential weights `rho(r) = e^{-W(r)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialExpFamily {
    /// `W(r) = r^2 / 2` (unnormalized Gaussian shape).
    HalfSquare,
    /// `W(r) = r^q`, `q >= 1`.
    Power { q: f64 },
    /// `W(r) = c log(1 + r)`, `c > 0`; heavy-tailed, not log-concave.
    Log { c: f64 },
}

impl RadialExpFamily {
    pub fn weight(&self, r: f64) -> f64 {
        match self {
            RadialExpFamily::HalfSquare => 0.5 * r * r,
            RadialExpFamily::Power { q } => r.powf(*q),
            RadialExpFamily::Log { c } => c * r.ln_1p(),
        }
    }

    /// d/dr of the weight, for r > 0.
    pub fn weight_deriv(&self, r: f64) -> f64 {
        match self {
            RadialExpFamily::HalfSquare => r,
            RadialExpFamily::Power { q } => q * r.powf(q - 1.0),
            RadialExpFamily::Log { c } => c / (1.0 + r),
        }
    }
}

/// The reference measures the toolkit evaluates. All are rotation invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Measure {
    /// Volume: density 1.
    Lebesgue,
    /// Standard Gaussian: density `(2 pi)^{-n/2} e^{-|x|^2/2}` (unit mass).
    Gaussian,
    /// Homogeneous radial power: density `|x|^p`, `p >= 0`.
    RadialPower { p: f64 },
    /// Radially decreasing exponential: density `e^{-W(|x|)}`.
    RadialExp(RadialExpFamily),
}

impl Measure {
    pub fn validate(&self) -> Result<()> {
        match self {
            Measure::Lebesgue | Measure::Gaussian => Ok(()),
            Measure::RadialPower { p } => {
                if !p.is_finite() || *p < 0.0 {
                    return Err(Error::Invalid(format!(
                        "radial power exponent must be finite and >= 0, got {p}"
                    )));
                }
                Ok(())
            }
            Measure::RadialExp(family) => {
                match family {
                    RadialExpFamily::HalfSquare => {}
                    RadialExpFamily::Power { q } => {
                        if !q.is_finite() || *q < 1.0 {
                            return Err(Error::Invalid(format!(
                                "exponential family needs q >= 1, got {q}"
                            )));
                        }
                    }
                    RadialExpFamily::Log { c } => {
                        if !c.is_finite() || *c <= 0.0 {
                            return Err(Error::Invalid(format!(
                                "log family needs c > 0, got {c}"
                            )));
                        }
                    }
                }
                // The admissible class: W nondecreasing and t -> W(e^t) convex.
                if !weight_is_admissible(&|r| family.weight(r)) {
                    return Err(Error::ClassViolation {
                        context: "radial weight must be nondecreasing with W(e^t) convex",
                    });
                }
                Ok(())
            }
        }
    }

    /// Short human-readable identifier used in reports.
    pub fn name(&self) -> String {
        match self {
            Measure::Lebesgue => "lebesgue".into(),
            Measure::Gaussian => "gaussian".into(),
            Measure::RadialPower { p } => format!("radial_power(p={p})"),
            Measure::RadialExp(RadialExpFamily::HalfSquare) => {
                "radial_exp(half_square)".into()
            }
            Measure::RadialExp(RadialExpFamily::Power { q }) => {
                format!("radial_exp(power,q={q})")
            }
            Measure::RadialExp(RadialExpFamily::Log { c }) => {
                format!("radial_exp(log,c={c})")
            }
        }
    }

    /// Density at radius `r` in ambient dimension `n`.
    pub fn density_radial(&self, r: f64, n: usize) -> f64 {
        match self {
            Measure::Lebesgue => 1.0,
            Measure::Gaussian => {
                (2.0 * PI).powf(-(n as f64) / 2.0) * (-0.5 * r * r).exp()
            }
            Measure::RadialPower { p } => {
                if *p == 0.0 {
                    1.0
                } else {
                    r.powf(*p)
                }
            }
            Measure::RadialExp(family) => (-family.weight(r)).exp(),
        }
    }

    /// Density at a point.
    pub fn density(&self, x: &[f64]) -> f64 {
        self.density_radial(geom::norm(x), x.len())
    }

    /// Gradient of the density. Only meaningful where [`Measure::is_c1`]
    /// holds; at the origin the radial limit (zero for C^1 densities) is
    /// returned.
    pub fn density_gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let r = geom::norm(x);
        match self {
            Measure::Lebesgue => vec![0.0; n],
            Measure::Gaussian => {
                let d = self.density_radial(r, n);
                x.iter().map(|xi| -xi * d).collect()
            }
            Measure::RadialPower { p } => {
                if *p == 0.0 || r == 0.0 {
                    return vec![0.0; n];
                }
                // grad |x|^p = p |x|^{p-2} x
                let c = p * r.powf(p - 2.0);
                x.iter().map(|xi| c * xi).collect()
            }
            Measure::RadialExp(family) => {
                if r == 0.0 {
                    return vec![0.0; n];
                }
                let c = -family.weight_deriv(r) * (-family.weight(r)).exp() / r;
                x.iter().map(|xi| c * xi).collect()
            }
        }
    }

    /// Is the density continuously differentiable on all of R^n (origin
    /// included)? Gates every formula that integrates the density gradient.
    pub fn is_c1(&self) -> bool {
        match self {
            Measure::Lebesgue | Measure::Gaussian => true,
            Measure::RadialPower { p } => *p == 0.0 || *p > 1.0,
            Measure::RadialExp(RadialExpFamily::HalfSquare) => true,
            Measure::RadialExp(RadialExpFamily::Power { q }) => *q > 1.0,
            Measure::RadialExp(RadialExpFamily::Log { .. }) => false,
        }
    }

    /// Log-concavity of the density as a function on R^n.
    pub fn is_log_concave(&self) -> bool {
        match self {
            Measure::Lebesgue | Measure::Gaussian => true,
            Measure::RadialPower { p } => *p == 0.0,
            Measure::RadialExp(RadialExpFamily::HalfSquare) => true,
            // e^{-r^q} is log-concave iff r^q is convex, i.e. q >= 1.
            Measure::RadialExp(RadialExpFamily::Power { q }) => *q >= 1.0,
            // (1+r)^{-c} has concave weight: heavy tails, not log-concave.
            Measure::RadialExp(RadialExpFamily::Log { .. }) => false,
        }
    }

    /// Membership in the radially-decreasing class: density `e^{-W(|x|)}`
    /// with `W` nondecreasing and `t -> W(e^t)` convex (grid-checked).
    pub fn in_admissible_class(&self) -> bool {
        match self {
            Measure::Lebesgue => true, // W = 0
            Measure::Gaussian => true,
            Measure::RadialPower { p } => *p == 0.0, // increasing density otherwise
            Measure::RadialExp(family) => weight_is_admissible(&|r| family.weight(r)),
        }
    }

    /// Degree of homogeneity of `mu(t K)` in `t` for positively homogeneous
    /// densities, in ambient dimension `n`: Lebesgue `n`, `|x|^p` gives
    /// `n + p`, none otherwise.
    pub fn alpha_homogeneity(&self, n: usize) -> Option<f64> {
        match self {
            Measure::Lebesgue => Some(n as f64),
            Measure::RadialPower { p } => Some(n as f64 + p),
            _ => None,
        }
    }

    /// `M(r) = int_0^r t rho(t) dt`, the planar radial mass kernel.
    pub fn radial_mass_2d(&self, r: f64) -> f64 {
        match self {
            Measure::Lebesgue => 0.5 * r * r,
            Measure::Gaussian => (1.0 - (-0.5 * r * r).exp()) / (2.0 * PI),
            Measure::RadialPower { p } => r.powf(p + 2.0) / (p + 2.0),
            Measure::RadialExp(family) => match family {
                RadialExpFamily::HalfSquare => 1.0 - (-0.5 * r * r).exp(),
                RadialExpFamily::Power { q } if *q == 1.0 => 1.0 - (1.0 + r) * (-r).exp(),
                RadialExpFamily::Power { q } if *q == 2.0 => 0.5 * (1.0 - (-r * r).exp()),
                _ => {
                    if r <= 0.0 {
                        0.0
                    } else {
                        quad::integrate_adaptive(
                            &|t: f64| t * self.density_radial(t, 2),
                            0.0,
                            r,
                            1e-14 * (1.0 + r),
                        )
                    }
                }
            },
        }
    }

    /// Kernel `g(r) = M(r) / r^2` of the planar flux field `F(x) = g(|x|) x`,
    /// which satisfies `div F = rho(|x|)`. Guarded limit `rho(0)/2` at r = 0.
    pub fn flux_kernel_2d(&self, r: f64) -> f64 {
        if r < 1e-8 {
            return 0.5 * self.density_radial(0.0, 2);
        }
        self.radial_mass_2d(r) / (r * r)
    }
}

/// Grid check that `w` is nondecreasing on (0, inf) and `t -> w(e^t)` is
/// convex; the class of admissible radial weights.
fn weight_is_admissible(w: &dyn Fn(f64) -> f64) -> bool {
    let ts: Vec<f64> = (0..81).map(|i| -6.0 + 9.0 * i as f64 / 80.0).collect();
    let vals: Vec<f64> = ts.iter().map(|t| w(t.exp())).collect();
    let scale = vals.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let tol = 1e-9 * scale;
    for i in 1..vals.len() {
        if vals[i] < vals[i - 1] - tol {
            return false;
        }
    }
    for i in 1..vals.len() - 1 {
        if vals[i] > 0.5 * (vals[i - 1] + vals[i + 1]) + tol {
            return false;
        }
    }
    true
}

/// Sampling budget and seed for evaluations that need them.
#[derive(Debug, Clone, Copy)]
pub struct EvalBudget {
    pub qmc_points: usize,
    pub seed: u64,
}

/// Default RNG seed used across the toolkit (CLI `--seed` overrides it).
pub const DEFAULT_SEED: u64 = 0x5EED;

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { qmc_points: 1 << 14, seed: DEFAULT_SEED }
    }
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Evaluate `mu(K)` with default budget.
pub fn measure(mu: &Measure, body: &Body) -> Result<EvalResult> {
    measure_with(mu, body, &EvalBudget::default())
}

/// Evaluate `mu(K)`, dispatching to the sharpest applicable route:
///
/// 1. lower-dimensional bodies have measure zero (exact);
/// 2. Lebesgue: closed forms in dimensions 1-3 and for balls/boxes;
/// 3. Gaussian: CDF products on intervals and axis boxes, interior
///    quadrature on polygons, boundary flux for planar bodies with circular
///    arcs;
/// 4. `|x|^p`, p even <= 6: polynomial-exact boundary rule on polygons;
/// 5. other planar cases: boundary flux with adaptive quadrature;
/// 6. everything else: quasi-Monte Carlo over the bounding box.
pub fn measure_with(mu: &Measure, body: &Body, budget: &EvalBudget) -> Result<EvalResult> {
    mu.validate()?;
    body.validate()?;
    let n = body.dim();
    let body = body.canonical()?;
    if body.affine_dim()? < n {
        return Ok(EvalResult::exact(0.0));
    }
    match mu {
        Measure::Lebesgue => lebesgue_measure(&body, budget),
        Measure::RadialPower { p } if *p == 0.0 => lebesgue_measure(&body, budget),
        Measure::RadialPower { p } => {
            if n == 1 {
                let (lo, hi) = body.bounding_box()?;
                // antiderivative of |t|^p: sign(t) |t|^{p+1} / (p+1)
                let prim = |t: f64| t.signum() * t.abs().powf(p + 1.0) / (p + 1.0);
                return Ok(EvalResult::exact(prim(hi[0]) - prim(lo[0])));
            }
            if n == 2 {
                let shape = PlanarShape::from_body(&body)?;
                let half = (0.5 * p).round() as u32;
                let even = (p - 2.0 * half as f64).abs() < 1e-12 && *p <= 6.0 + 1e-12;
                if even && shape.radius == 0.0 {
                    return Ok(EvalResult::exact(radial_power_polygon(half, &shape.poly)));
                }
                return Ok(flux_measure_2d(mu, &shape));
            }
            qmc_measure(mu, &body, budget)
        }
        Measure::Gaussian => {
            if let Some((lo, hi)) = body.as_axis_box()? {
                let mut v = 1.0;
                for i in 0..n {
                    v *= normal_cdf(hi[i]) - normal_cdf(lo[i]);
                }
                return Ok(EvalResult::exact(v));
            }
            if n == 2 {
                let shape = PlanarShape::from_body(&body)?;
                if shape.radius == 0.0 {
                    return Ok(gaussian_polygon_triangulated(&shape.poly));
                }
                return Ok(flux_measure_2d(mu, &shape));
            }
            qmc_measure(mu, &body, budget)
        }
        Measure::RadialExp(_) => {
            if n == 1 {
                let (lo, hi) = body.bounding_box()?;
                let tol = 1e-13 * (1.0 + hi[0] - lo[0]);
                let v = quad::integrate_adaptive(
                    &|t: f64| mu.density_radial(t.abs(), 1),
                    lo[0],
                    hi[0],
                    tol,
                );
                return Ok(EvalResult::quadrature(v, tol));
            }
            if n == 2 {
                let shape = PlanarShape::from_body(&body)?;
                return Ok(flux_measure_2d(mu, &shape));
            }
            qmc_measure(mu, &body, budget)
        }
    }
}

fn lebesgue_measure(body: &Body, budget: &EvalBudget) -> Result<EvalResult> {
    let n = body.dim();
    match n {
        1 => {
            let (lo, hi) = body.bounding_box()?;
            Ok(EvalResult::exact(hi[0] - lo[0]))
        }
        2 => Ok(EvalResult::exact(PlanarShape::from_body(body)?.area())),
        _ => {
            if let Body::Ball { radius, .. } = body {
                return Ok(EvalResult::exact(unit_ball_volume(n) * radius.powi(n as i32)));
            }
            if let Some((lo, hi)) = body.as_axis_box()? {
                let v = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
                return Ok(EvalResult::exact(v));
            }
            if n == 3 && body.is_polytopal() {
                return Ok(EvalResult::exact(polytope_volume_3d(body)?));
            }
            qmc_measure(&Measure::Lebesgue, body, budget)
        }
    }
}

/// Exact volume of a full-dimensional 3-polytope by the divergence theorem:
/// `V = (1/3) sum_F h_F area(F)` over facets with outward offsets `h_F`.
fn polytope_volume_3d(body: &Body) -> Result<f64> {
    let verts = body.vertices()?;
    let (vs, facets) = geom::facets_nd(&verts)?;
    let mut vol = 0.0;
    for f in &facets {
        let pts: Vec<Vec<f64>> = f.vertices.iter().map(|&i| vs[i].clone()).collect();
        let (base, basis) = geom::affine_basis(&pts);
        if basis.len() != 2 {
            continue; // degenerate facet contributes nothing
        }
        let ordered = geom::order_cycle_in_plane(&pts, &base, &basis);
        let chart: Vec<Vec<f64>> =
            ordered.iter().map(|p| geom::to_chart(p, &base, &basis)).collect();
        vol += f.offset * geom::polygon_area(&chart).abs();
    }
    Ok(vol / 3.0)
}

/// Exact integral of the monomial `x^a y^b` over a CCW polygon, via the
/// boundary form `oint x^{a+1}/(a+1) y^b dy`. Committed for `a + b <= 6`
/// (the per-edge integrand has degree `a + b + 1 <= 7`, within the order-8
/// Gauss rule's exactness degree of 15).
pub fn polygon_monomial_integral(poly: &[[f64; 2]], a: u32, b: u32) -> f64 {
    debug_assert!(a + b <= 6, "polynomial exactness committed only up to degree 6");
    let mut total = 0.0;
    let k = poly.len();
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let dy = q[1] - p[1];
        if dy == 0.0 {
            continue;
        }
        let f = |t: f64| {
            let x = p[0] + t * (q[0] - p[0]);
            let y = p[1] + t * (q[1] - p[1]);
            x.powi(a as i32 + 1) * y.powi(b as i32)
        };
        total += dy / (a as f64 + 1.0) * quad::integrate(&f, 0.0, 1.0, 8);
    }
    total
}

/// Exact integral of `|x|^{2 m}` over a CCW polygon by binomial expansion
/// into monomials (requires `2 m <= 6`).
fn radial_power_polygon(m: u32, poly: &[[f64; 2]]) -> f64 {
    let mut total = 0.0;
    for i in 0..=m {
        total += binomial(m, i) * polygon_monomial_integral(poly, 2 * i, 2 * (m - i));
    }
    total
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for j in 0..k {
        v = v * (n - j) as f64 / (j + 1) as f64;
    }
    v
}

/// Gaussian mass of a polygon by fanning from the centroid and applying
/// tensor Gauss-Legendre (order 32) with one refinement on each triangle;
/// the reported error is the summed refinement delta.
pub(crate) fn gaussian_polygon_triangulated(poly: &[[f64; 2]]) -> EvalResult {
    if poly.len() < 3 {
        return EvalResult::exact(0.0);
    }
    let k = poly.len() as f64;
    let cx = poly.iter().map(|p| p[0]).sum::<f64>() / k;
    let cy = poly.iter().map(|p| p[1]).sum::<f64>() / k;
    let dens = |x: f64, y: f64| (-0.5 * (x * x + y * y)).exp() / (2.0 * PI);
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (v, e) = quad::triangle_integrate_refine(&dens, [cx, cy], p, q, 32);
        total += v;
        err += e;
    }
    EvalResult::quadrature(total, err)
}

/// Measure of a planar body by the boundary flux of `F(x) = g(|x|) x` with
/// `div F = rho(|x|)`; adaptive quadrature piece by piece.
pub(crate) fn flux_measure_2d(mu: &Measure, shape: &PlanarShape) -> EvalResult {
    let mut total = 0.0;
    let mut err = 0.0;
    for piece in shape.boundary_pieces() {
        let len = piece.length();
        if len <= 0.0 {
            continue;
        }
        let tol = 1e-12 * (1.0 + len);
        match piece {
            BoundaryPiece::Edge { a, b, normal } => {
                let f = |t: f64| {
                    let x = a[0] + t * (b[0] - a[0]);
                    let y = a[1] + t * (b[1] - a[1]);
                    let r = (x * x + y * y).sqrt();
                    mu.flux_kernel_2d(r) * (x * normal[0] + y * normal[1])
                };
                total += len * quad::integrate_adaptive(&f, 0.0, 1.0, tol / len);
            }
            BoundaryPiece::Arc { center, radius, th0, th1 } => {
                let f = |th: f64| {
                    let (u0, u1) = (th.cos(), th.sin());
                    let x = center[0] + radius * u0;
                    let y = center[1] + radius * u1;
                    let r = (x * x + y * y).sqrt();
                    mu.flux_kernel_2d(r) * (x * u0 + y * u1) * radius
                };
                total += quad::integrate_adaptive(&f, th0, th1, tol);
            }
        }
        err += tol;
    }
    EvalResult::quadrature(total, err)
}

/// Quasi-Monte Carlo over the bounding box with a precomputed membership
/// oracle; the error is the replicate standard error.
pub(crate) fn qmc_measure(mu: &Measure, body: &Body, budget: &EvalBudget) -> Result<EvalResult> {
    let oracle = body.membership_oracle()?;
    let (lo, hi) = body.bounding_box()?;
    let f = |x: &[f64]| {
        if oracle.contains(x) {
            mu.density(x)
        } else {
            0.0
        }
    };
    let est = qmc::integrate_box(&f, &lo, &hi, budget.qmc_points, budget.seed);
    Ok(EvalResult::qmc(est.value, est.std_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Body;

    fn unit_square() -> Body {
        Body::polytope(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap()
    }

    fn centered_square(h: f64) -> Body {
        Body::polytope(vec![
            vec![-h, -h],
            vec![h, -h],
            vec![h, h],
            vec![-h, h],
        ])
        .unwrap()
    }

    #[test]
    fn json_matches_documented_measure_format() {
        let cases = [
            (r#"{"type":"lebesgue"}"#, Measure::Lebesgue),
            (r#"{"type":"gaussian"}"#, Measure::Gaussian),
            (r#"{"type":"radial_power","p":2.0}"#, Measure::RadialPower { p: 2.0 }),
            (
                r#"{"type":"radial_exp","family":"power","q":1.5}"#,
                Measure::RadialExp(RadialExpFamily::Power { q: 1.5 }),
            ),
            (
                r#"{"type":"radial_exp","family":"half_square"}"#,
                Measure::RadialExp(RadialExpFamily::HalfSquare),
            ),
            (
                r#"{"type":"radial_exp","family":"log","c":2.0}"#,
                Measure::RadialExp(RadialExpFamily::Log { c: 2.0 }),
            ),
        ];
        for (text, expected) in cases {
            let parsed: Measure = serde_json::from_str(text).unwrap();
            assert_eq!(parsed, expected, "parsing {text}");
            let emitted = serde_json::to_string(&parsed).unwrap();
            let reparsed: Measure = serde_json::from_str(&emitted).unwrap();
            assert_eq!(reparsed, expected, "round-trip via {emitted}");
        }
    }

    #[test]
    fn eval_result_error_invariant() {
        let e = EvalResult::exact(2.0);
        assert_eq!(e.abs_error, 0.0);
        let q = EvalResult::quadrature(1.0, 0.0);
        assert!(q.abs_error > 0.0, "non-exact results must carry an error floor");
        assert_eq!(e.add(&e).method, Method::Exact);
        assert_eq!(e.add(&e).abs_error, 0.0);
        let m = e.mul(&q);
        assert_eq!(m.method, Method::Quadrature);
        assert!(m.abs_error > 0.0);
        let d = q.div(&EvalResult::exact(0.0));
        assert!(d.abs_error.is_infinite());
    }

    #[test]
    fn lebesgue_closed_forms() {
        assert_eq!(measure(&Measure::Lebesgue, &unit_square()).unwrap().value, 1.0);
        let tri = Body::polytope(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = measure(&Measure::Lebesgue, &tri).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.value - 1.0).abs() < 1e-14);

        let disk = Body::ball(vec![0.3, -0.2], 1.5).unwrap();
        let r = measure(&Measure::Lebesgue, &disk).unwrap();
        assert!((r.value - PI * 2.25).abs() < 1e-12);

        let ball3 = Body::ball(vec![0.0, 0.0, 0.0], 2.0).unwrap();
        let r = measure(&Measure::Lebesgue, &ball3).unwrap();
        assert!((r.value - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);

        // cube as a sum of three segments
        let cube = Body::scaled_sum(&[
            (1.0, Body::segment(vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]).unwrap()),
            (1.0, Body::segment(vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]).unwrap()),
            (1.0, Body::segment(vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]).unwrap()),
        ])
        .unwrap();
        let r = measure(&Measure::Lebesgue, &cube).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.value - 1.0).abs() < 1e-12, "cube volume: {}", r.value);
    }

    #[test]
    fn zonotope_volume_matches_determinant() {
        // volume of a zonotope spanned by g1, g2, g3 (segments [-g, g]):
        // 2^3 |det| for three generators in R^3
        let z = Body::zonotope(
            vec![0.0, 0.0, 0.0],
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.2, 1.0, 0.0],
                vec![-0.1, 0.3, 0.8],
            ],
        )
        .unwrap();
        let r = measure(&Measure::Lebesgue, &z).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.value - 8.0 * 0.8).abs() < 1e-9, "got {}", r.value);
    }

    #[test]
    fn lebesgue_qmc_agrees_with_exact_fan_in_3d() {
        // rotated cube: not an axis box, exercises the half-space oracle
        let c = 0.5_f64.sqrt();
        let verts: Vec<Vec<f64>> = (0..8)
            .map(|m| {
                let x = if m & 1 == 1 { 1.0 } else { -1.0 };
                let y = if m & 2 == 2 { 1.0 } else { -1.0 };
                let z: f64 = if m & 4 == 4 { 1.0 } else { -1.0 };
                vec![c * x - c * y, c * x + c * y, z]
            })
            .collect();
        let cube = Body::polytope(verts).unwrap();
        let exact = measure(&Measure::Lebesgue, &cube).unwrap();
        assert!((exact.value - 8.0).abs() < 1e-9);
        let budget = EvalBudget { qmc_points: 1 << 14, seed: DEFAULT_SEED };
        let est = qmc_measure(&Measure::Lebesgue, &cube, &budget).unwrap();
        assert!(
            (est.value - exact.value).abs() <= 4.0 * est.abs_error.max(2e-3 * exact.value),
            "qmc {} +- {} vs exact {}",
            est.value,
            est.abs_error,
            exact.value
        );
    }

    #[test]
    fn gaussian_interval_and_box_are_cdf_products() {
        let seg = Body::interval(-1.0, 1.0);
        let r = measure(&Measure::Gaussian, &seg).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.value - 0.6826894921370859).abs() < 1e-15);

        let sq = unit_square();
        let r = measure(&Measure::Gaussian, &sq).unwrap();
        assert_eq!(r.method, Method::Exact);
        let phi = |x: f64| normal_cdf(x);
        let expect = (phi(1.0) - phi(0.0)).powi(2);
        assert!((r.value - expect).abs() < 1e-15);
    }

    #[test]
    fn gaussian_triangulation_matches_cdf_product_and_flux() {
        // call the interior-quadrature route directly on a box shape
        let poly = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        let tri = gaussian_polygon_triangulated(&poly);
        let expect = 0.6826894921370859_f64.powi(2);
        assert!(
            (tri.value - expect).abs() < 1e-9,
            "triangulated {} vs product {}",
            tri.value,
            expect
        );
        assert!((tri.value - expect).abs() <= 3.0 * tri.abs_error.max(1e-12));

        // rotate by 30 degrees: no closed form; flux is the independent route
        let (c, s) = (3.0_f64.sqrt() / 2.0, 0.5);
        let rot: Vec<[f64; 2]> = poly
            .iter()
            .map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]])
            .collect();
        let tri = gaussian_polygon_triangulated(&rot);
        let shape = PlanarShape { poly: rot.clone(), radius: 0.0 };
        let flux = flux_measure_2d(&Measure::Gaussian, &shape);
        assert!(
            (tri.value - flux.value).abs() <= 3.0 * (tri.abs_error + flux.abs_error).max(1e-11),
            "triangulated {} vs flux {}",
            tri.value,
            flux.value
        );
        // rotation invariance of the Gaussian
        assert!((tri.value - expect).abs() < 1e-9);
    }

    #[test]
    fn gaussian_disk_flux_matches_closed_form() {
        for r in [0.5, 1.0, 2.0] {
            let disk = Body::ball(vec![0.0, 0.0], r).unwrap();
            let got = measure(&Measure::Gaussian, &disk).unwrap();
            let expect = 1.0 - (-0.5 * r * r).exp();
            assert_eq!(got.method, Method::Quadrature);
            assert!(
                (got.value - expect).abs() < 1e-10,
                "disk radius {r}: {} vs {expect}",
                got.value
            );
        }
    }

    #[test]
    fn gaussian_offcenter_disk_flux_vs_qmc() {
        let disk = Body::ball(vec![0.8, -0.4], 1.1).unwrap();
        let flux = measure(&Measure::Gaussian, &disk).unwrap();
        let budget = EvalBudget { qmc_points: 1 << 15, seed: DEFAULT_SEED };
        let est = qmc_measure(&Measure::Gaussian, &disk, &budget).unwrap();
        assert!(
            (flux.value - est.value).abs()
                <= (4.0 * est.abs_error).max(2e-3 * flux.value),
            "flux {} vs qmc {} +- {}",
            flux.value,
            est.value,
            est.abs_error
        );
    }

    #[test]
    fn gaussian_total_mass_is_one() {
        // big box still goes through the exact CDF product
        let big = Body::axis_box(&[-8.0, -8.0], &[8.0, 8.0]).unwrap();
        let r = measure(&Measure::Gaussian, &big).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        // and the QMC route on the smooth density agrees
        let budget = EvalBudget::default();
        let est = qmc_measure(&Measure::Gaussian, &big, &budget).unwrap();
        assert!((est.value - 1.0).abs() < 1e-3, "qmc mass {}", est.value);
    }

    #[test]
    fn radial_power_polygon_frozen_values() {
        // int over [-1,1]^2 of x^2 + y^2 = 8/3
        let sq = centered_square(1.0);
        let r = measure(&Measure::RadialPower { p: 2.0 }, &sq).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.value - 8.0 / 3.0).abs() < 1e-13, "got {}", r.value);

        // int over [-1,1]^2 of (x^2+y^2)^2 = 112/45
        let r = measure(&Measure::RadialPower { p: 4.0 }, &sq).unwrap();
        assert!((r.value - 112.0 / 45.0).abs() < 1e-13, "got {}", r.value);
    }

    #[test]
    fn radial_power_flux_agrees_with_exact_polynomial_route() {
        // irregular polygon, p = 2: boundary flux vs Green-theorem monomials
        let poly = vec![
            vec![0.2, -0.1],
            vec![1.3, 0.2],
            vec![0.9, 1.1],
            vec![-0.4, 0.8],
            vec![-0.7, 0.1],
        ];
        let body = Body::polytope(poly.clone()).unwrap();
        let exact = measure(&Measure::RadialPower { p: 2.0 }, &body).unwrap();
        assert_eq!(exact.method, Method::Exact);
        let shape = PlanarShape::from_body(&body).unwrap();
        let flux = flux_measure_2d(&Measure::RadialPower { p: 2.0 }, &shape);
        assert!(
            (exact.value - flux.value).abs() < 1e-10,
            "exact {} vs flux {}",
            exact.value,
            flux.value
        );
    }

    #[test]
    fn radial_power_homogeneity_is_exact() {
        // mu(tK) = t^{n+p} mu(K) for the degree-(n+p) homogeneous density
        let sq = centered_square(0.8);
        let t = 1.7;
        let base = measure(&Measure::RadialPower { p: 2.0 }, &sq).unwrap().value;
        let scaled = measure(&Measure::RadialPower { p: 2.0 }, &sq.dilate(t).unwrap())
            .unwrap()
            .value;
        assert!((scaled - t.powi(4) * base).abs() < 1e-12 * scaled.abs());
    }

    #[test]
    fn radial_power_interval_closed_form() {
        let seg = Body::interval(-1.0, 2.0);
        let r = measure(&Measure::RadialPower { p: 2.0 }, &seg).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.value - 3.0).abs() < 1e-14); // (8 + 1)/3
    }

    #[test]
    fn radial_exp_interval_matches_cdf_route() {
        // e^{-t^2/2} on [0, 3] equals sqrt(2 pi) (Phi(3) - Phi(0))
        let seg = Body::interval(0.0, 3.0);
        let mu = Measure::RadialExp(RadialExpFamily::HalfSquare);
        let r = measure(&mu, &seg).unwrap();
        let expect = (2.0 * PI).sqrt() * (normal_cdf(3.0) - 0.5);
        assert!((r.value - expect).abs() < 1e-10, "{} vs {expect}", r.value);
    }

    #[test]
    fn radial_exp_disk_flux_vs_qmc() {
        let mu = Measure::RadialExp(RadialExpFamily::Power { q: 1.5 });
        let disk = Body::ball(vec![0.3, -0.2], 1.2).unwrap();
        let flux = measure(&mu, &disk).unwrap();
        assert_eq!(flux.method, Method::Quadrature);
        let budget = EvalBudget { qmc_points: 1 << 15, seed: DEFAULT_SEED };
        let est = qmc_measure(&mu, &disk, &budget).unwrap();
        assert!(
            (flux.value - est.value).abs()
                <= (4.0 * est.abs_error).max(2e-3 * flux.value),
            "flux {} vs qmc {} +- {}",
            flux.value,
            est.value,
            est.abs_error
        );
    }

    #[test]
    fn centered_radial_exp_disk_has_closed_form() {
        // q = 2: mu(R B^2) = 2 pi int_0^R t e^{-t^2} dt = pi (1 - e^{-R^2})
        let mu = Measure::RadialExp(RadialExpFamily::Power { q: 2.0 });
        let disk = Body::ball(vec![0.0, 0.0], 1.3).unwrap();
        let r = measure(&mu, &disk).unwrap();
        let expect = PI * (1.0 - (-1.3_f64 * 1.3).exp());
        assert!((r.value - expect).abs() < 1e-10, "{} vs {expect}", r.value);
    }

    #[test]
    fn lower_dimensional_bodies_have_measure_zero() {
        let seg = Body::segment(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        for mu in [
            Measure::Lebesgue,
            Measure::Gaussian,
            Measure::RadialPower { p: 2.0 },
            Measure::RadialExp(RadialExpFamily::HalfSquare),
        ] {
            let r = measure(&mu, &seg).unwrap();
            assert_eq!(r.value, 0.0);
            assert_eq!(r.method, Method::Exact);
        }
    }

    #[test]
    fn measure_is_monotone_under_inclusion() {
        let k = unit_square();
        let kl = Body::scaled_sum(&[
            (1.0, k.clone()),
            (0.5, Body::unit_ball(2)),
        ])
        .unwrap();
        for mu in [
            Measure::Gaussian,
            Measure::RadialExp(RadialExpFamily::Power { q: 1.5 }),
            Measure::RadialExp(RadialExpFamily::Log { c: 2.0 }),
        ] {
            let a = measure(&mu, &k).unwrap();
            let b = measure(&mu, &kl).unwrap();
            assert!(
                b.value > a.value,
                "{}: {} should exceed {}",
                mu.name(),
                b.value,
                a.value
            );
        }
    }

    #[test]
    fn admissible_class_and_flags() {
        assert!(Measure::Gaussian.in_admissible_class());
        assert!(Measure::Lebesgue.in_admissible_class());
        assert!(!Measure::RadialPower { p: 2.0 }.in_admissible_class());
        let log = Measure::RadialExp(RadialExpFamily::Log { c: 2.0 });
        assert!(log.validate().is_ok());
        assert!(log.in_admissible_class());
        assert!(!log.is_log_concave(), "heavy-tailed family is not log-concave");
        assert!(!log.is_c1());
        assert!(Measure::RadialExp(RadialExpFamily::Power { q: 1.5 }).is_c1());
        assert!(!Measure::RadialExp(RadialExpFamily::Power { q: 1.0 }).is_c1());
        assert!(Measure::RadialPower { p: 2.0 }.is_c1());
        assert!(!Measure::RadialPower { p: 0.5 }.is_c1());
        assert!(Measure::RadialExp(RadialExpFamily::Power { q: 0.5 }).validate().is_err());
        assert!(Measure::RadialPower { p: -1.0 }.validate().is_err());
    }

    #[test]
    fn measure_names() {
        assert_eq!(Measure::Lebesgue.name(), "lebesgue");
        assert_eq!(Measure::RadialPower { p: 2.0 }.name(), "radial_power(p=2)");
        assert_eq!(
            Measure::RadialExp(RadialExpFamily::Power { q: 1.5 }).name(),
            "radial_exp(power,q=1.5)"
        );
    }

    #[test]
    fn density_gradient_matches_finite_differences() {
        let measures = [
            Measure::Gaussian,
            Measure::RadialPower { p: 2.0 },
            Measure::RadialExp(RadialExpFamily::Power { q: 1.5 }),
            Measure::RadialExp(RadialExpFamily::HalfSquare),
        ];
        let x = [0.7, -0.4];
        let h = 1e-6;
        for mu in measures {
            let g = mu.density_gradient(&x);
            for i in 0..2 {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                let fd = (mu.density(&xp) - mu.density(&xm)) / (2.0 * h);
                assert!(
                    (g[i] - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                    "{} grad[{i}]: {} vs fd {}",
                    mu.name(),
                    g[i],
                    fd
                );
            }
        }
    }
}
