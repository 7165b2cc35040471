//! Piecewise-linear convex functions on an interval and the arc-length
//! inequalities they satisfy: endpoint bounds for the arc-weighted integral
//! `∫ h √(1+h'²)`, the linear family of equality cases, the
//! translation-optimized form of the bound, a planar-domain probe of the
//! higher-dimensional analogue, and the chain decomposition of planar bodies
//! that connects these one-dimensional inequalities to boundary-measure
//! monotonicity for the squared-distance density.
//!
//! Piecewise-linear functions make every quantity here a closed form: the
//! arc-weighted integral of a linear piece with slope `m` over `[x0, x1]` is
//! `sqrt(1 + m^2)` times the trapezoid `(h(x0)+h(x1))/2 * (x1-x0)`, i.e. the
//! segment length times the mean height. No quadrature error enters the
//! module's core claims.

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::measures::EvalResult;
use crate::quad;
use crate::reports::InequalityReport;

/// A convex piecewise-linear function on an interval, stored as an
/// increasing breakpoint grid with one value per breakpoint. Convexity
/// (non-decreasing slopes) is enforced at construction; nonnegativity is
/// enforced when requested and remembered in a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPL {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    nonnegative: bool,
}

impl ConvexPL {
    /// Convex piecewise-linear function from breakpoints and values.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(Error::Invalid(format!(
                "need matching breakpoints and values with at least two points, got {} and {}",
                breakpoints.len(),
                values.len()
            )));
        }
        for (x, v) in breakpoints.iter().zip(&values) {
            if !x.is_finite() || !v.is_finite() {
                return Err(Error::Invalid("breakpoints and values must be finite".into()));
            }
        }
        for w in breakpoints.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Invalid(format!(
                    "breakpoints must increase strictly, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let pl = ConvexPL { breakpoints, values, nonnegative: false };
        let slopes = pl.slopes();
        let mut worst = 0.0_f64;
        for w in slopes.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
        if worst > 1e-12 {
            return Err(Error::NotConvex(worst));
        }
        Ok(pl)
    }

    /// Like [`ConvexPL::new`], but additionally requires the function to be
    /// nonnegative and records that in the flag.
    pub fn new_nonnegative(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let mut pl = ConvexPL::new(breakpoints, values)?;
        let min = pl.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = pl.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if min < -1e-12 * (1.0 + scale) {
            return Err(Error::Negative(min));
        }
        pl.nonnegative = true;
        Ok(pl)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// Domain endpoints `(a, b)`.
    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Values at the domain endpoints `(h(a), h(b))`.
    pub fn endpoint_values(&self) -> (f64, f64) {
        (self.values[0], *self.values.last().unwrap())
    }

    fn slopes(&self) -> Vec<f64> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Evaluate at `x`, which must lie in the domain (tolerance 1e-9 at the
    /// ends).
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.domain();
        assert!(
            x >= a - 1e-9 * (1.0 + a.abs()) && x <= b + 1e-9 * (1.0 + b.abs()),
            "evaluation point {x} outside domain [{a}, {b}]"
        );
        let x = x.clamp(a, b);
        let i = match self.breakpoints.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i.clamp(1, self.breakpoints.len() - 1),
        };
        let (x0, x1) = (self.breakpoints[i - 1], self.breakpoints[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (x - x0) / (x1 - x0) * (v1 - v0)
    }

    /// Arc length of the graph, `∫ sqrt(1 + h'²)`: the sum of segment
    /// lengths.
    pub fn arc_length(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (x[1] - x[0]).hypot(v[1] - v[0]))
            .sum()
    }

    /// The arc-weighted integral `∫ h sqrt(1 + h'²)`: per piece, the segment
    /// length times the mean height. Exact on piecewise-linear data; valid
    /// for signed values.
    pub fn arc_weighted_integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (x[1] - x[0]).hypot(v[1] - v[0]) * 0.5 * (v[0] + v[1]))
            .sum()
    }

    /// Vertical translate `h + c`. Translation preserves convexity exactly,
    /// so the result skips re-validation (re-deriving slopes from shifted
    /// values could spuriously reject through rounding); the nonnegativity
    /// flag is dropped.
    pub fn shift(&self, c: f64) -> Self {
        ConvexPL {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
            nonnegative: false,
        }
    }

    /// The same function on a grid with every piece split at its midpoint.
    /// The interpolated midpoint values are collinear with their neighbors by
    /// construction, so the result skips re-validation.
    pub fn refine_midpoints(&self) -> Self {
        let mut bp = Vec::with_capacity(2 * self.breakpoints.len() - 1);
        let mut vals = Vec::with_capacity(bp.capacity());
        for i in 0..self.breakpoints.len() - 1 {
            bp.push(self.breakpoints[i]);
            vals.push(self.values[i]);
            bp.push(0.5 * (self.breakpoints[i] + self.breakpoints[i + 1]));
            vals.push(0.5 * (self.values[i] + self.values[i + 1]));
        }
        bp.push(*self.breakpoints.last().unwrap());
        vals.push(*self.values.last().unwrap());
        ConvexPL { breakpoints: bp, values: vals, nonnegative: self.nonnegative }
    }
}

/// The two endpoint bounds for the arc-weighted integral of a nonnegative
/// convex `h` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct EndpointArcReports {
    /// `2((b-a)/2)² + h(a)² + h(b)² >= 2 ∫ h sqrt(1+h'²)`.
    pub strong: InequalityReport,
    /// `a² + b² + h(a)² + h(b)² >= 2 ∫ h sqrt(1+h'²)` (weaker since
    /// `2((b-a)/2)² <= a² + b²`).
    pub weak: InequalityReport,
}

/// Check the endpoint bounds for a nonnegative convex piecewise-linear
/// function. Both sides are closed forms on the breakpoint data.
pub fn endpoint_arc_check(h: &ConvexPL) -> Result<EndpointArcReports> {
    let min = h.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = h.values().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if min < -1e-12 * (1.0 + scale) {
        return Err(Error::Negative(min));
    }
    let (a, b) = h.domain();
    let (ha, hb) = h.endpoint_values();
    let rhs = EvalResult::exact(2.0 * h.arc_weighted_integral());
    let half = 0.5 * (b - a);
    let inputs = format!("[a,b]=[{a:.6}, {b:.6}]; h(a)={ha:.6}; h(b)={hb:.6}; pieces={}",
        h.breakpoints().len() - 1);
    let strong = InequalityReport::inequality(
        "endpoint-arc-bound",
        &inputs,
        EvalResult::exact(2.0 * half * half + ha * ha + hb * hb),
        rhs.clone(),
    );
    let weak = InequalityReport::inequality(
        "endpoint-arc-bound-weak",
        &inputs,
        EvalResult::exact(a * a + b * b + ha * ha + hb * hb),
        rhs,
    );
    Ok(EndpointArcReports { strong, weak })
}

/// The linear function for which the strong endpoint bound is an equality:
/// `h(x) = αx + ((sqrt(1+α²)-α)/2) b - ((sqrt(1+α²)+α)/2) a`. Its endpoint
/// values `(b-a)(sqrt(1+α²)∓α)/2` are positive for every finite `α` when
/// `b > a`.
pub fn equality_family(alpha: f64, a: f64, b: f64) -> Result<ConvexPL> {
    if !alpha.is_finite() || !a.is_finite() || !b.is_finite() {
        return Err(Error::Invalid("equality family needs finite alpha, a, b".into()));
    }
    if b <= a + 1e-12 {
        return Err(Error::Invalid(format!("equality family needs b > a, got [{a}, {b}]")));
    }
    let root = alpha.hypot(1.0);
    let offset = 0.5 * (root - alpha) * b - 0.5 * (root + alpha) * a;
    let h = |x: f64| alpha * x + offset;
    ConvexPL::new_nonnegative(vec![a, b], vec![h(a), h(b)])
}

/// The translation-optimized endpoint bound on `[0, 1]` together with its
/// construction diagnostics.
#[derive(Debug, Clone)]
pub struct OptimizedArcCheck {
    /// `∫ [(h(0)+h(1))/2 - h] sqrt(1+h'²) >= (L(h)² - L(h_lin)²)/4`, where
    /// `h_lin` interpolates the endpoint values.
    pub report: InequalityReport,
    /// The optimizing vertical offset `(h(0)+h(1))/2 - L(h)/2`; subtracting
    /// it yields the unique translate whose endpoint values sum to the arc
    /// length.
    pub offset: f64,
    /// Gap between the optimized margin and half the strong endpoint-bound
    /// margin of the shifted function (the two are algebraically equal).
    pub round_trip_gap: f64,
    /// Residual of the normalization identity
    /// `h_opt(0) + h_opt(1) = L(h_opt) = L(h)`.
    pub normalization_gap: f64,
}

/// Check the translation-optimized bound for a convex piecewise-linear `h`
/// on `[0, 1]`. Nonnegativity is not required: the optimal vertical
/// translate is applied internally and is always nonnegative.
pub fn optimized_arc_check(h: &ConvexPL) -> Result<OptimizedArcCheck> {
    let (a, b) = h.domain();
    if a.abs() > 1e-12 || (b - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!(
            "the optimized bound is stated on [0,1], got [{a}, {b}]"
        )));
    }
    let (h0, h1) = h.endpoint_values();
    let len = h.arc_length();
    let lhs = 0.5 * (h0 + h1) * len - h.arc_weighted_integral();
    let chord_sq = (h1 - h0) * (h1 - h0) + 1.0;
    let rhs = 0.25 * (len * len - chord_sq);
    let inputs =
        format!("h(0)={h0:.6}; h(1)={h1:.6}; L={len:.6}; pieces={}", h.breakpoints().len() - 1);
    let report = InequalityReport::inequality(
        "endpoint-arc-bound-optimized",
        &inputs,
        EvalResult::exact(lhs),
        EvalResult::exact(rhs),
    );

    let offset = 0.5 * (h0 + h1) - 0.5 * len;
    let shifted = h.shift(-offset);
    let strong = endpoint_arc_check(&shifted)?.strong;
    let round_trip_gap = (report.margin - 0.5 * strong.margin).abs();
    let scale = 1.0 + report.margin.abs();
    if round_trip_gap > 1e-9 * scale {
        return Err(Error::Invalid(format!(
            "optimized bound and shifted endpoint bound disagree by {round_trip_gap:.3e}"
        )));
    }
    let (s0, s1) = shifted.endpoint_values();
    let normalization_gap =
        ((s0 + s1 - len).abs()).max((shifted.arc_length() - len).abs());
    if normalization_gap > 1e-9 * (1.0 + len) {
        return Err(Error::Invalid(format!(
            "optimal translate misses its normalization by {normalization_gap:.3e}"
        )));
    }
    Ok(OptimizedArcCheck { report, offset, round_trip_gap, normalization_gap })
}

/// Probe of the open planar-domain analogue of the endpoint bound:
/// on `C = [0,1] x [0,eps]` with `h(y) = y1^alpha + lambda y2^beta`,
/// compare the boundary integral `∫_{∂C} (|y|² + h²) dH¹` against
/// `(2/(n-1)) ∫_C h sqrt(1 + |∇h|²)` for `n = 3`. The exponent family is
/// hard-limited to `alpha, beta ∈ {1, 2, 3}`; `lambda = 0` collapses the
/// probe to `h ≡ 0`, whose graph term vanishes while the boundary term stays
/// positive.
pub fn boundary_graph_probe(
    alpha: u32,
    beta: u32,
    lambda: f64,
    eps: f64,
) -> Result<InequalityReport> {
    if !(1..=3).contains(&alpha) || !(1..=3).contains(&beta) {
        return Err(Error::UnsupportedConfiguration(format!(
            "probe exponents are limited to {{1,2,3}}, got alpha={alpha}, beta={beta}"
        )));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::UnsupportedConfiguration(format!(
            "probe coupling must be finite and nonnegative, got {lambda}"
        )));
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::UnsupportedConfiguration(format!(
            "probe strip height must be positive, got {eps}"
        )));
    }
    let zero_fn = lambda == 0.0;
    let h = |y1: f64, y2: f64| {
        if zero_fn {
            0.0
        } else {
            y1.powi(alpha as i32) + lambda * y2.powi(beta as i32)
        }
    };
    // Boundary integrand (|y|² + h²) is a polynomial of degree <= 6 along
    // each edge, so a 20-node rule is exact up to rounding.
    let edge = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| quad::integrate(&|t| f(t), lo, hi, 20);
    let boundary = edge(&|t| t * t + h(t, 0.0) * h(t, 0.0), 0.0, 1.0)
        + edge(&|t| t * t + eps * eps + h(t, eps) * h(t, eps), 0.0, 1.0)
        + edge(&|t| t * t + h(0.0, t) * h(0.0, t), 0.0, eps)
        + edge(&|t| 1.0 + t * t + h(1.0, t) * h(1.0, t), 0.0, eps);
    let lhs = EvalResult::exact(boundary);

    let rhs = if zero_fn {
        EvalResult::exact(0.0)
    } else {
        let graph = |m: usize| {
            let rule = quad::gauss_legendre(m);
            let mut total = 0.0;
            for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
                let y1 = 0.5 * (xi + 1.0);
                let w1 = 0.5 * wi;
                let d1 = alpha as f64 * y1.powi(alpha as i32 - 1);
                for (xj, wj) in rule.nodes.iter().zip(&rule.weights) {
                    let y2 = 0.5 * eps * (xj + 1.0);
                    let w2 = 0.5 * eps * wj;
                    let d2 = lambda * beta as f64 * y2.powi(beta as i32 - 1);
                    total += w1 * w2 * h(y1, y2) * (1.0 + d1 * d1 + d2 * d2).sqrt();
                }
            }
            total
        };
        let coarse = graph(32);
        let fine = graph(48);
        EvalResult::quadrature(fine, (fine - coarse).abs())
    };
    let inputs = format!("alpha={alpha}; beta={beta}; lambda={lambda}; C=[0,1]x[0,{eps}]");
    Ok(InequalityReport::inequality("boundary-graph-probe", &inputs, lhs, rhs))
}

/// A planar body cut into the region between two function graphs after
/// rotating a chosen direction to the vertical: an interval `[a, b]` on the
/// horizontal axis, a concave upper chain, and a convex lower chain, so that
/// the rotated body is `{(x, y) : x ∈ [a,b], lower(x) <= y <= upper(x)}`.
#[derive(Debug, Clone)]
pub struct ChainDecomposition {
    pub a: f64,
    pub b: f64,
    /// Graph points `(x, f(x))` of the concave upper chain, increasing in x.
    pub upper: Vec<(f64, f64)>,
    /// Graph points `(x, g(x))` of the convex lower chain, increasing in x.
    pub lower: Vec<(f64, f64)>,
}

/// Decompose a planar polytope into upper/lower chains with respect to
/// direction `u`: `u` is rotated to the vertical axis and every vertical
/// line through the rotated body is cut at its top and bottom boundary
/// points. Chains and interval live in the rotated frame.
pub fn chain_decomposition(k: &Body, u: &[f64]) -> Result<ChainDecomposition> {
    if k.dim() != 2 || u.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: k.dim().max(u.len()) });
    }
    let norm = u[0].hypot(u[1]);
    if !norm.is_finite() || norm <= 0.0 {
        return Err(Error::Invalid("direction must be a nonzero vector".into()));
    }
    if !k.is_polytopal() {
        return Err(Error::UnsupportedRepresentation(
            "chain decomposition needs a polytopal body".into(),
        ));
    }
    if k.affine_dim()? != 2 {
        return Err(Error::UnsupportedCase(
            "chain decomposition needs a full-dimensional planar body".into(),
        ));
    }
    // Rotate u to e2.
    let phi = std::f64::consts::FRAC_PI_2 - u[1].atan2(u[0]);
    let (c, s) = (phi.cos(), phi.sin());
    let rotate = |p: &[f64]| (p[0] * c - p[1] * s, p[0] * s + p[1] * c);
    let verts: Vec<(f64, f64)> = k.vertices()?.iter().map(|v| rotate(v)).collect();

    let mut xs: Vec<f64> = verts.iter().map(|p| p.0).collect();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let span = xs.last().unwrap() - xs[0];
    let tol = 1e-12 * (1.0 + span.abs());
    xs.dedup_by(|p, q| (*p - *q).abs() <= tol);

    let m = verts.len();
    let mut upper = Vec::with_capacity(xs.len());
    let mut lower = Vec::with_capacity(xs.len());
    for &x in &xs {
        let mut top = f64::NEG_INFINITY;
        let mut bottom = f64::INFINITY;
        for i in 0..m {
            let (p, q) = (verts[i], verts[(i + 1) % m]);
            let (x0, x1) = (p.0.min(q.0), p.0.max(q.0));
            if x < x0 - tol || x > x1 + tol {
                continue;
            }
            if x1 - x0 <= tol {
                // Vertical edge at this x: both endpoints cut the line.
                top = top.max(p.1).max(q.1);
                bottom = bottom.min(p.1).min(q.1);
            } else {
                let t = ((x - p.0) / (q.0 - p.0)).clamp(0.0, 1.0);
                let y = p.1 + t * (q.1 - p.1);
                top = top.max(y);
                bottom = bottom.min(y);
            }
        }
        upper.push((x, top));
        lower.push((x, bottom));
    }
    Ok(ChainDecomposition { a: xs[0], b: *xs.last().unwrap(), upper, lower })
}

fn chain_arc_weighted_integral(chain: &[(f64, f64)]) -> f64 {
    chain
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1) * 0.5 * (w[0].1 + w[1].1))
        .sum()
}

impl ChainDecomposition {
    /// Rebuild the body (in the rotated frame) from the chain points.
    pub fn reconstruct(&self) -> Result<Body> {
        let pts: Vec<Vec<f64>> = self
            .upper
            .iter()
            .chain(self.lower.iter())
            .map(|&(x, y)| vec![x, y])
            .collect();
        Body::polytope(pts)
    }

    /// The first-order growth of the squared-distance boundary mass when the
    /// body is thickened upward:
    /// `a² + b² + f(a)² + f(b)² + 2 ∫ f sqrt(1+f'²)` over the upper chain
    /// `f`. Exact on the piecewise-linear chain; the integral term is signed.
    pub fn upper_energy(&self) -> f64 {
        let fa = self.upper.first().unwrap().1;
        let fb = self.upper.last().unwrap().1;
        self.a * self.a + self.b * self.b + fa * fa + fb * fb
            + 2.0 * chain_arc_weighted_integral(&self.upper)
    }

    /// Lower bound for [`Self::upper_energy`] through the negative part: the
    /// energy only decreases when `f` is replaced by `min(f, 0)`, and for
    /// the clipped chain it equals the weak endpoint-bound margin of the
    /// mirrored function `-min(f, 0)`, which is convex and nonnegative.
    pub fn upper_negative_part_margin(&self) -> Result<f64> {
        let span = self.b - self.a;
        let snap = 1e-9 * (1.0 + span.abs());
        let mut bp: Vec<f64> = Vec::with_capacity(self.upper.len() + 4);
        let mut vals: Vec<f64> = Vec::with_capacity(bp.capacity());
        let push = |x: f64, v: f64, bp: &mut Vec<f64>, vals: &mut Vec<f64>| {
            if let Some(&last) = bp.last() {
                if x - last <= snap {
                    return;
                }
            }
            bp.push(x);
            vals.push(v);
        };
        for w in self.upper.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            push(x0, (-y0).max(0.0), &mut bp, &mut vals);
            if (y0 > 0.0) != (y1 > 0.0) && y0 != y1 {
                let xc = x0 + (0.0 - y0) / (y1 - y0) * (x1 - x0);
                push(xc, 0.0, &mut bp, &mut vals);
            }
        }
        let (xb, yb) = *self.upper.last().unwrap();
        push(xb, (-yb).max(0.0), &mut bp, &mut vals);
        if bp.len() < 2 {
            // The whole chain collapsed into one snapped point; treat the
            // clipped function as identically zero on [a, b].
            bp = vec![self.a, self.b];
            vals = vec![0.0, 0.0];
        }
        let h = ConvexPL::new_nonnegative(bp, vals)?;
        Ok(endpoint_arc_check(&h)?.weak.margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::measures::Measure;
    use crate::mixed::mixed2_segment;
    use rand::Rng;

    #[test]
    fn construction_gates() {
        // Slopes must not decrease.
        let err = ConvexPL::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 1.0]);
        assert!(matches!(err, Err(Error::NotConvex(v)) if v > 1.0));
        // Negative values are rejected only by the nonnegative constructor.
        assert!(ConvexPL::new(vec![0.0, 1.0], vec![-1.0, 2.0]).is_ok());
        assert!(matches!(
            ConvexPL::new_nonnegative(vec![0.0, 1.0], vec![-1.0, 2.0]),
            Err(Error::Negative(v)) if v == -1.0
        ));
        // Grid must increase strictly and match the value count.
        assert!(ConvexPL::new(vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]).is_err());
        assert!(ConvexPL::new(vec![0.0, 1.0], vec![0.0]).is_err());
    }

    #[test]
    fn constant_half_is_the_flat_equality_case() {
        let h = equality_family(0.0, 0.0, 1.0).unwrap();
        assert_eq!(h.values(), &[0.5, 0.5]);
        let reports = endpoint_arc_check(&h).unwrap();
        assert!((reports.strong.lhs.value - 1.0).abs() <= 1e-15);
        assert!((reports.strong.rhs.value - 1.0).abs() <= 1e-15);
        assert!(reports.strong.margin.abs() <= 1e-15);
    }

    #[test]
    fn linear_ramp_margins_match_closed_forms() {
        // h(x) = x on [0,1]: strong side 3/2, arc side sqrt(2).
        let h = ConvexPL::new_nonnegative(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let reports = endpoint_arc_check(&h).unwrap();
        assert!((reports.strong.lhs.value - 1.5).abs() <= 1e-15);
        assert!((reports.strong.rhs.value - std::f64::consts::SQRT_2).abs() <= 1e-15);
        assert!(reports.strong.margin > 0.0);
        // Weak side replaces 2((b-a)/2)^2 = 1/2 by a^2 + b^2 = 1.
        assert!((reports.weak.lhs.value - 2.0).abs() <= 1e-15);
        assert!(reports.weak.margin > reports.strong.margin);
    }

    #[test]
    fn equality_family_margins_vanish() {
        let mut rng = generate::instance_rng(31, 0);
        let mut intervals = vec![(0.0, 1.0), (-1.0, 1.0), (2.0, 5.0), (-3.0, -0.5)];
        for _ in 0..20 {
            let a = rng.random_range(-3.0..2.0);
            let b = a + rng.random_range(0.2..4.0);
            intervals.push((a, b));
        }
        for alpha in [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0] {
            for &(a, b) in &intervals {
                let h = equality_family(alpha, a, b).unwrap();
                let margin = endpoint_arc_check(&h).unwrap().strong.margin;
                assert!(
                    margin.abs() <= 1e-9,
                    "alpha={alpha} [{a:.3},{b:.3}]: margin {margin:.3e}"
                );
            }
        }
        // alpha = 1 on [0,1] starts at (sqrt(2)-1)/2.
        let h = equality_family(1.0, 0.0, 1.0).unwrap();
        assert!((h.values()[0] - 0.5 * (std::f64::consts::SQRT_2 - 1.0)).abs() <= 1e-15);
        // alpha = -1 is the mirror of alpha = 1 under x -> 1-x.
        let m = equality_family(-1.0, 0.0, 1.0).unwrap();
        assert!((m.eval(0.0) - h.eval(1.0)).abs() <= 1e-15);
        assert!((m.eval(1.0) - h.eval(0.0)).abs() <= 1e-15);
        // Degenerate interval is rejected.
        assert!(equality_family(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn random_nonnegative_functions_obey_both_bounds() {
        let mut rng = generate::instance_rng(77, 3);
        for i in 0..300 {
            let h = generate::random_nonnegative_convex_pl(&mut rng);
            let reports = endpoint_arc_check(&h).unwrap();
            assert!(reports.strong.margin >= -1e-12, "case {i}: {:?}", reports.strong);
            assert!(reports.weak.margin >= reports.strong.margin - 1e-12, "case {i}");
        }
    }

    #[test]
    fn optimized_bound_trivial_and_curved_cases() {
        // A linear h makes both sides vanish.
        let lin = ConvexPL::new(vec![0.0, 1.0], vec![0.3, 1.7]).unwrap();
        let check = optimized_arc_check(&lin).unwrap();
        assert!(check.report.lhs.value.abs() <= 1e-12);
        assert!(check.report.rhs.value.abs() <= 1e-12);

        // A dense chord approximation of x^2 gives a positive margin, and
        // nonnegativity is not needed (shift the parabola below zero).
        let n = 200;
        let bp: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let vals: Vec<f64> = bp.iter().map(|x| x * x - 0.3).collect();
        let h = ConvexPL::new(bp, vals).unwrap();
        let check = optimized_arc_check(&h).unwrap();
        assert!(check.report.margin > 0.0, "{:?}", check.report);
        assert!(check.round_trip_gap <= 1e-9);
        assert!(check.normalization_gap <= 1e-9);

        // The bound is invariant under vertical translation.
        let shifted = optimized_arc_check(&h.shift(7.0)).unwrap();
        assert!(
            (shifted.report.margin - check.report.margin).abs() <= 1e-9,
            "{} vs {}",
            shifted.report.margin,
            check.report.margin
        );
        // Only the offset moves, by exactly the translation.
        assert!((shifted.offset - (check.offset + 7.0)).abs() <= 1e-9);

        // Domain gate.
        let off = ConvexPL::new(vec![0.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(optimized_arc_check(&off), Err(Error::Invalid(_))));
    }

    #[test]
    fn interval_scaling_matches_the_normalized_margin() {
        let (a, b) = (-0.5, 1.7);
        let h = ConvexPL::new_nonnegative(
            vec![-0.5, 0.3, 0.9, 1.7],
            vec![1.2, 0.4, 0.5, 1.5],
        )
        .unwrap();
        let margin = endpoint_arc_check(&h).unwrap().strong.margin;
        // Normalize to [0,1]: x -> (x-a)/(b-a), values scaled by 1/(b-a).
        let w = b - a;
        let bp: Vec<f64> = h.breakpoints().iter().map(|x| (x - a) / w).collect();
        let vals: Vec<f64> = h.values().iter().map(|v| v / w).collect();
        let unit = ConvexPL::new_nonnegative(bp, vals).unwrap();
        let unit_margin = endpoint_arc_check(&unit).unwrap().strong.margin;
        assert!(
            (margin - w * w * unit_margin).abs() <= 1e-10 * (1.0 + margin.abs()),
            "margin {margin} vs scaled {}",
            w * w * unit_margin
        );
    }

    #[test]
    fn refinement_leaves_both_sides_unchanged() {
        let h = ConvexPL::new_nonnegative(
            vec![0.0, 0.25, 0.6, 1.0],
            vec![1.0, 0.5, 0.45, 0.9],
        )
        .unwrap();
        let before = endpoint_arc_check(&h).unwrap();
        let twice = h.refine_midpoints().refine_midpoints();
        assert_eq!(twice.breakpoints().len(), 4 * (h.breakpoints().len() - 1) + 1);
        let after = endpoint_arc_check(&twice).unwrap();
        assert!((before.strong.lhs.value - after.strong.lhs.value).abs() < 1e-12);
        assert!((before.strong.rhs.value - after.strong.rhs.value).abs() < 1e-12);
    }

    #[test]
    fn boundary_graph_probe_cases() {
        let report = boundary_graph_probe(1, 1, 1.0, 0.1).unwrap();
        assert_eq!(report.verdict, crate::reports::Verdict::Holds, "{report:?}");
        let report = boundary_graph_probe(3, 3, 10.0, 0.5).unwrap();
        assert_eq!(report.verdict, crate::reports::Verdict::Holds, "{report:?}");

        // lambda = 0 collapses h: the graph side vanishes exactly and the
        // boundary side is the perimeter integral of |y|^2.
        let eps = 0.1;
        let report = boundary_graph_probe(2, 1, 0.0, eps).unwrap();
        assert_eq!(report.rhs.value, 0.0);
        let closed = 2.0 / 3.0 + eps * eps + eps + 2.0 * eps.powi(3) / 3.0;
        assert!((report.lhs.value - closed).abs() <= 1e-12, "{report:?}");
        assert_eq!(report.verdict, crate::reports::Verdict::Holds);

        // Configuration gates.
        assert!(matches!(
            boundary_graph_probe(4, 1, 1.0, 0.1),
            Err(Error::UnsupportedConfiguration(_))
        ));
        assert!(matches!(
            boundary_graph_probe(1, 1, -1.0, 0.1),
            Err(Error::UnsupportedConfiguration(_))
        ));
        assert!(matches!(
            boundary_graph_probe(1, 1, 1.0, 0.0),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn square_chains_are_flat_and_reconstruct() {
        let k = Body::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let d = chain_decomposition(&k, &[0.0, 1.0]).unwrap();
        assert!((d.a + 1.0).abs() <= 1e-12 && (d.b - 1.0).abs() <= 1e-12);
        for &(_, y) in &d.upper {
            assert!((y - 1.0).abs() <= 1e-12);
        }
        for &(_, y) in &d.lower {
            assert!((y + 1.0).abs() <= 1e-12);
        }
        let rebuilt = d.reconstruct().unwrap();
        assert_eq!(rebuilt.vertices().unwrap(), k.vertices().unwrap());
    }

    #[test]
    fn random_polygon_chains_reconstruct_vertex_exactly() {
        for idx in 0..12 {
            let mut rng = generate::instance_rng(99, idx);
            let k = generate::random_polygon(&mut rng);
            let u = [0.3, 0.8];
            let d = chain_decomposition(&k, &u).unwrap();
            let rebuilt = d.reconstruct().unwrap();
            // Compare against the independently rotated body.
            let norm = u[0].hypot(u[1]);
            let phi = std::f64::consts::FRAC_PI_2 - (u[1] / norm).atan2(u[0] / norm);
            let (c, s) = (phi.cos(), phi.sin());
            let rotated = Body::polytope(
                k.vertices()
                    .unwrap()
                    .iter()
                    .map(|v| vec![v[0] * c - v[1] * s, v[0] * s + v[1] * c])
                    .collect(),
            )
            .unwrap();
            let got = rebuilt.vertices().unwrap();
            let want = rotated.vertices().unwrap();
            assert_eq!(got.len(), want.len(), "instance {idx}");
            for (g, w) in got.iter().zip(&want) {
                assert!(
                    (g[0] - w[0]).abs() <= 1e-9 && (g[1] - w[1]).abs() <= 1e-9,
                    "instance {idx}: {g:?} vs {w:?}"
                );
            }
        }
    }

    #[test]
    fn upper_energy_matches_the_segment_derivative() {
        // The chain energy is the second mixed quantity of the
        // squared-distance measure against a vertical segment and the unit
        // ball, computed by completely different machinery.
        let mu = Measure::RadialPower { p: 2.0 };
        let polygons = [
            Body::polytope(vec![vec![-1.0, 0.5], vec![1.0, 0.5], vec![1.0, 2.5], vec![-1.0, 2.5]])
                .unwrap(),
            Body::polytope(vec![vec![-2.0, -1.5], vec![2.0, -1.5], vec![0.0, 1.0]]).unwrap(),
            Body::polytope(vec![vec![-1.2, -0.4], vec![0.8, -0.9], vec![1.4, 0.3], vec![0.1, 1.1]])
                .unwrap(),
        ];
        for (i, k) in polygons.iter().enumerate() {
            let d = chain_decomposition(k, &[0.0, 1.0]).unwrap();
            let energy = d.upper_energy();
            let engine = mixed2_segment(&mu, k, &[0.0, 1.0], &Body::unit_ball(2)).unwrap();
            assert!(
                (energy - engine.value).abs() <= 1e-6 * (1.0 + energy.abs()),
                "case {i}: chain energy {energy} vs engine {}",
                engine.value
            );
            assert_eq!(energy > 0.0, engine.value > 0.0, "case {i}: signs disagree");
            // The negative-part route bounds the energy from below.
            let clipped = d.upper_negative_part_margin().unwrap();
            assert!(clipped >= -1e-12, "case {i}: clipped margin {clipped}");
            assert!(energy >= clipped - 1e-12, "case {i}: {energy} < {clipped}");
        }
    }
}
