//! Convex bodies: a small symbolic algebra of polytopes, zonotopes, balls,
//! segments and nonnegatively-scaled Minkowski sums.
//!
//! The representation is chosen so that support functions are exact in every
//! case and so that sums of *polytopal* bodies collapse to an explicit vertex
//! form (convex hull of pairwise vertex sums). Balls never collapse: a sum with
//! a ball keeps an exact "polygon + radius" structure that the planar measure
//! paths exploit.
//!
//! JSON forms (serde):
//! `{"type":"polytope","vertices":[[x,y],...]}`,
//! `{"type":"zonotope","center":[...],"generators":[[...],...]}`,
//! `{"type":"ball","center":[...],"radius":r}`,
//! `{"type":"segment","a":[...],"b":[...]}`,
//! `{"type":"sum","terms":[{"scale":s,"body":{...}},...]}`.

use crate::error::{Error, Result};
use crate::geom;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SumTerm {
    pub scale: f64,
    pub body: Body,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Body {
    Polytope { vertices: Vec<Vec<f64>> },
    Zonotope { center: Vec<f64>, generators: Vec<Vec<f64>> },
    Ball { center: Vec<f64>, radius: f64 },
    Segment { a: Vec<f64>, b: Vec<f64> },
    Sum { terms: Vec<SumTerm> },
}

impl Body {
    // ---------- constructors ----------

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Body> {
        let b = Body::Polytope { vertices };
        b.validate()?;
        Ok(b)
    }

    pub fn zonotope(center: Vec<f64>, generators: Vec<Vec<f64>>) -> Result<Body> {
        let b = Body::Zonotope { center, generators };
        b.validate()?;
        Ok(b)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Body> {
        let b = Body::Ball { center, radius };
        b.validate()?;
        Ok(b)
    }

    pub fn segment(a: Vec<f64>, b: Vec<f64>) -> Result<Body> {
        let s = Body::Segment { a, b };
        s.validate()?;
        Ok(s)
    }

    /// Unit Euclidean ball centered at the origin.
    pub fn unit_ball(dim: usize) -> Body {
        Body::Ball { center: vec![0.0; dim], radius: 1.0 }
    }

    /// Axis-aligned box given by per-coordinate intervals.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Body> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Invalid("box bounds must have equal nonzero length".into()));
        }
        let n = lo.len();
        let mut vertices = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let v: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                .collect();
            vertices.push(v);
        }
        Body::polytope(vertices)
    }

    pub fn interval(a: f64, b: f64) -> Body {
        Body::Segment { a: vec![a.min(b)], b: vec![a.max(b)] }
    }

    // ---------- basic structure ----------

    pub fn dim(&self) -> usize {
        match self {
            Body::Polytope { vertices } => vertices.first().map_or(0, |v| v.len()),
            Body::Zonotope { center, .. } => center.len(),
            Body::Ball { center, .. } => center.len(),
            Body::Segment { a, .. } => a.len(),
            Body::Sum { terms } => terms.first().map_or(0, |t| t.body.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::EmptyBody);
        }
        match self {
            Body::Polytope { vertices } => {
                if vertices.is_empty() {
                    return Err(Error::EmptyBody);
                }
                for v in vertices {
                    if v.len() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
                    }
                    if !geom::all_finite(v) {
                        return Err(Error::UnboundedBody("non-finite vertex".into()));
                    }
                }
            }
            Body::Zonotope { center, generators } => {
                if !geom::all_finite(center) {
                    return Err(Error::UnboundedBody("non-finite center".into()));
                }
                if generators.is_empty() {
                    return Err(Error::EmptyBody);
                }
                for g in generators {
                    if g.len() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: g.len() });
                    }
                    if !geom::all_finite(g) {
                        return Err(Error::UnboundedBody("non-finite generator".into()));
                    }
                    if geom::norm(g) <= 1e-12 {
                        return Err(Error::Invalid("zonotope generators must be nonzero".into()));
                    }
                }
            }
            Body::Ball { center, radius } => {
                if !geom::all_finite(center) || !radius.is_finite() {
                    return Err(Error::UnboundedBody("non-finite ball".into()));
                }
                if *radius < 0.0 {
                    return Err(Error::Invalid("ball radius must be nonnegative".into()));
                }
            }
            Body::Segment { a, b } => {
                if b.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: b.len() });
                }
                if !geom::all_finite(a) || !geom::all_finite(b) {
                    return Err(Error::UnboundedBody("non-finite segment endpoint".into()));
                }
            }
            Body::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::EmptyBody);
                }
                for t in terms {
                    if !t.scale.is_finite() || t.scale < 0.0 {
                        return Err(Error::Invalid("sum scales must be finite and nonnegative".into()));
                    }
                    if t.body.dim() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: t.body.dim() });
                    }
                    t.body.validate()?;
                }
            }
        }
        Ok(())
    }

    // ---------- support function ----------

    /// Support function h(u) = sup over the body of <y, u>. Exact for every
    /// representation; additive over sums and positively homogeneous.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.len() });
        }
        Ok(self.support_unchecked(u))
    }

    fn support_unchecked(&self, u: &[f64]) -> f64 {
        match self {
            Body::Polytope { vertices } => vertices
                .iter()
                .map(|v| geom::dot(v, u))
                .fold(f64::NEG_INFINITY, f64::max),
            Body::Zonotope { center, generators } => {
                geom::dot(center, u)
                    + generators.iter().map(|g| geom::dot(g, u).abs()).sum::<f64>()
            }
            Body::Ball { center, radius } => geom::dot(center, u) + radius * geom::norm(u),
            Body::Segment { a, b } => geom::dot(a, u).max(geom::dot(b, u)),
            Body::Sum { terms } => terms
                .iter()
                .map(|t| t.scale * t.body.support_unchecked(u))
                .sum(),
        }
    }

    /// A maximizer of <y, u> over the body. For polytopal bodies this is a
    /// vertex (ties resolved to the first maximal vertex in storage order —
    /// callers that care about ties, like the segment mixed formulas, detect
    /// and handle them explicitly).
    pub fn support_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.len() });
        }
        Ok(self.support_point_unchecked(u))
    }

    fn support_point_unchecked(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Body::Polytope { vertices } => {
                let mut best = &vertices[0];
                let mut bv = geom::dot(best, u);
                for v in vertices.iter().skip(1) {
                    let d = geom::dot(v, u);
                    if d > bv + 1e-15 {
                        best = v;
                        bv = d;
                    }
                }
                best.clone()
            }
            Body::Zonotope { center, generators } => {
                let mut p = center.clone();
                for g in generators {
                    let s = if geom::dot(g, u) >= 0.0 { 1.0 } else { -1.0 };
                    p = geom::axpy(&p, s, g);
                }
                p
            }
            Body::Ball { center, radius } => match geom::normalize(u) {
                Some(un) => geom::axpy(center, *radius, &un),
                None => center.clone(),
            },
            Body::Segment { a, b } => {
                if geom::dot(a, u) >= geom::dot(b, u) {
                    a.clone()
                } else {
                    b.clone()
                }
            }
            Body::Sum { terms } => {
                let n = self.dim();
                let mut p = vec![0.0; n];
                for t in terms {
                    let q = t.body.support_point_unchecked(u);
                    p = geom::axpy(&p, t.scale, &q);
                }
                p
            }
        }
    }

    // ---------- vertex form / canonicalization ----------

    /// True when the body admits an exact finite vertex representation.
    pub fn is_polytopal(&self) -> bool {
        match self {
            Body::Polytope { .. } | Body::Segment { .. } => true,
            Body::Zonotope { generators, .. } => {
                self.dim() <= 2 || generators.len() <= 6
            }
            Body::Ball { radius, .. } => *radius == 0.0,
            Body::Sum { terms } => terms.iter().all(|t| t.body.is_polytopal()),
        }
    }

    /// Vertex candidates for polytopal bodies (not yet canonicalized).
    fn vertex_candidates(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            Body::Polytope { vertices } => Ok(vertices.clone()),
            Body::Segment { a, b } => Ok(vec![a.clone(), b.clone()]),
            Body::Ball { center, radius } if *radius == 0.0 => Ok(vec![center.clone()]),
            Body::Zonotope { center, generators } => {
                let n = self.dim();
                let m = generators.len();
                if n == 2 {
                    Ok(zonogon_vertices(center, generators))
                } else if m <= 6 {
                    let mut pts = Vec::with_capacity(1 << m);
                    for mask in 0..(1usize << m) {
                        let mut p = center.clone();
                        for (i, g) in generators.iter().enumerate() {
                            let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                            p = geom::axpy(&p, s, g);
                        }
                        pts.push(p);
                    }
                    Ok(pts)
                } else {
                    Err(Error::UnsupportedRepresentation(format!(
                        "zonotope with {m} generators in R^{n} kept symbolic"
                    )))
                }
            }
            Body::Ball { .. } => Err(Error::UnsupportedRepresentation(
                "ball with positive radius has no vertex form".into(),
            )),
            Body::Sum { terms } => {
                let n = self.dim();
                let mut acc: Vec<Vec<f64>> = vec![vec![0.0; n]];
                for t in terms {
                    if t.scale == 0.0 {
                        continue;
                    }
                    let vs = t.body.vertex_candidates()?;
                    let mut next = Vec::with_capacity(acc.len() * vs.len());
                    for a in &acc {
                        for v in &vs {
                            next.push(geom::axpy(a, t.scale, v));
                        }
                    }
                    // Keep the candidate cloud small as we go.
                    acc = extreme_points(&next)?;
                }
                Ok(acc)
            }
        }
    }

    /// Extreme points in canonical order (2-D: CCW starting at the
    /// lexicographic minimum; 1-D: increasing; higher dims: lexicographic).
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        let cand = self.vertex_candidates()?;
        extreme_points(&cand)
    }

    /// Canonical form: polytopal bodies collapse to `Polytope` with canonical
    /// vertex order; sums flatten, drop zero-scaled terms, and merge all ball
    /// content into a single trailing ball term. Idempotent.
    pub fn canonical(&self) -> Result<Body> {
        self.validate()?;
        if self.is_polytopal() {
            return Ok(Body::Polytope { vertices: self.vertices()? });
        }
        // Not polytopal: there is ball content (or a big symbolic zonotope).
        let n = self.dim();
        let mut poly_terms: Vec<(f64, Body)> = Vec::new();
        let mut ball_center = vec![0.0; n];
        let mut ball_radius = 0.0;
        let mut symbolic: Vec<SumTerm> = Vec::new();
        collect_terms(self, 1.0, &mut poly_terms, &mut ball_center, &mut ball_radius, &mut symbolic);
        let mut terms: Vec<SumTerm> = Vec::new();
        if !poly_terms.is_empty() {
            let sum = Body::Sum {
                terms: poly_terms
                    .into_iter()
                    .map(|(s, b)| SumTerm { scale: s, body: b })
                    .collect(),
            };
            terms.push(SumTerm { scale: 1.0, body: Body::Polytope { vertices: sum.vertices()? } });
        }
        terms.extend(symbolic);
        if ball_radius > 0.0 {
            terms.push(SumTerm {
                scale: 1.0,
                body: Body::Ball { center: ball_center, radius: ball_radius },
            });
        } else if geom::norm(&ball_center) > 0.0 {
            // translation from zero-radius balls
            terms.push(SumTerm {
                scale: 1.0,
                body: Body::Polytope { vertices: vec![ball_center] },
            });
        }
        if terms.len() == 1 && terms[0].scale == 1.0 {
            Ok(terms.pop().unwrap().body)
        } else {
            Ok(Body::Sum { terms })
        }
    }

    // ---------- arithmetic ----------

    /// Minkowski sum: explicit polytope when both operands are polytopal
    /// (convex hull of pairwise vertex sums), symbolic sum otherwise.
    pub fn minkowski_sum(&self, other: &Body) -> Result<Body> {
        Body::scaled_sum(&[(1.0, self.clone()), (1.0, other.clone())])
    }

    /// General nonnegative combination sum_i s_i K_i, normalized like
    /// [`Body::canonical`].
    pub fn scaled_sum(terms: &[(f64, Body)]) -> Result<Body> {
        if terms.is_empty() {
            return Err(Error::EmptyBody);
        }
        let n = terms[0].1.dim();
        for (s, b) in terms {
            if !s.is_finite() || *s < 0.0 {
                return Err(Error::Invalid("scales must be finite and nonnegative".into()));
            }
            if b.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
            }
        }
        let body = Body::Sum {
            terms: terms
                .iter()
                .filter(|(s, _)| *s > 0.0)
                .map(|(s, b)| SumTerm { scale: *s, body: b.clone() })
                .collect(),
        };
        if matches!(&body, Body::Sum { terms } if terms.is_empty()) {
            // all scales zero: the origin
            return Ok(Body::Polytope { vertices: vec![vec![0.0; n]] });
        }
        body.canonical()
    }

    pub fn translate(&self, v: &[f64]) -> Result<Body> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(match self {
            Body::Polytope { vertices } => Body::Polytope {
                vertices: vertices.iter().map(|p| geom::add(p, v)).collect(),
            },
            Body::Zonotope { center, generators } => Body::Zonotope {
                center: geom::add(center, v),
                generators: generators.clone(),
            },
            Body::Ball { center, radius } => {
                Body::Ball { center: geom::add(center, v), radius: *radius }
            }
            Body::Segment { a, b } => {
                Body::Segment { a: geom::add(a, v), b: geom::add(b, v) }
            }
            Body::Sum { .. } => {
                let shift = Body::Polytope { vertices: vec![v.to_vec()] };
                Body::Sum {
                    terms: vec![
                        SumTerm { scale: 1.0, body: self.clone() },
                        SumTerm { scale: 1.0, body: shift },
                    ],
                }
            }
        })
    }

    /// Dilate about the origin by t >= 0.
    pub fn dilate(&self, t: f64) -> Result<Body> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Invalid("dilation factor must be finite and nonnegative".into()));
        }
        Ok(match self {
            Body::Polytope { vertices } => Body::Polytope {
                vertices: vertices.iter().map(|p| geom::scale(p, t)).collect(),
            },
            Body::Zonotope { center, generators } => Body::Zonotope {
                center: geom::scale(center, t),
                generators: generators.iter().map(|g| geom::scale(g, t)).collect(),
            },
            Body::Ball { center, radius } => {
                Body::Ball { center: geom::scale(center, t), radius: radius * t }
            }
            Body::Segment { a, b } => {
                Body::Segment { a: geom::scale(a, t), b: geom::scale(b, t) }
            }
            Body::Sum { terms } => {
                if t == 0.0 {
                    Body::Polytope { vertices: vec![vec![0.0; self.dim()]] }
                } else {
                    Body::Sum {
                        terms: terms
                            .iter()
                            .map(|st| SumTerm { scale: st.scale * t, body: st.body.clone() })
                            .collect(),
                    }
                }
            }
        })
    }

    // ---------- predicates ----------

    /// Dimension of the affine hull (radius > 0 forces full dimension).
    pub fn affine_dim(&self) -> Result<usize> {
        let n = self.dim();
        if self.total_radius() > 0.0 {
            return Ok(n);
        }
        let verts = self.vertex_candidates()?;
        Ok(geom::affine_dim(&verts))
    }

    pub fn is_full_dimensional(&self) -> Result<bool> {
        Ok(self.affine_dim()? == self.dim())
    }

    /// Summed ball radius across the representation (0 for polytopal bodies).
    pub fn total_radius(&self) -> f64 {
        match self {
            Body::Ball { radius, .. } => *radius,
            Body::Sum { terms } => terms.iter().map(|t| t.scale * t.body.total_radius()).sum(),
            _ => 0.0,
        }
    }

    /// Exact symmetry center when one is structurally available.
    pub fn symmetry_center(&self) -> Result<Option<Vec<f64>>> {
        let n = self.dim();
        match self {
            Body::Zonotope { center, .. } => Ok(Some(center.clone())),
            Body::Ball { center, .. } => Ok(Some(center.clone())),
            Body::Segment { a, b } => Ok(Some(geom::scale(&geom::add(a, b), 0.5))),
            Body::Polytope { .. } => {
                let verts = self.vertices()?;
                let mut c = vec![0.0; n];
                for v in &verts {
                    c = geom::add(&c, v);
                }
                let c = geom::scale(&c, 1.0 / verts.len() as f64);
                let scale = geom::cloud_scale(&verts);
                let ok = verts.iter().all(|v| {
                    let refl: Vec<f64> = c.iter().zip(v).map(|(ci, vi)| 2.0 * ci - vi).collect();
                    verts.iter().any(|w| geom::dist(w, &refl) <= 1e-9 * scale)
                });
                Ok(ok.then_some(c))
            }
            Body::Sum { terms } => {
                let mut c = vec![0.0; n];
                for t in terms {
                    match t.body.symmetry_center()? {
                        Some(tc) => c = geom::axpy(&c, t.scale, &tc),
                        None => return Ok(None),
                    }
                }
                Ok(Some(c))
            }
        }
    }

    pub fn is_symmetric_about(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        match self.symmetry_center()? {
            Some(c) => Ok(geom::dist(&c, x) <= 1e-9 * geom::cloud_scale(&[c.clone(), x.to_vec()])),
            None => Ok(false),
        }
    }

    pub fn is_origin_symmetric(&self) -> Result<bool> {
        self.is_symmetric_about(&vec![0.0; self.dim()])
    }

    /// Does the body contain the origin? Exact for primitives and polytopal
    /// sums; sums with ball content use the planar exact test in 2-D and a
    /// support-function net (documented approximation) in higher dimensions.
    pub fn contains_origin(&self) -> Result<bool> {
        self.contains(&vec![0.0; self.dim()])
    }

    /// Membership test.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let n = self.dim();
        match self {
            Body::Ball { center, radius } => Ok(geom::dist(center, x) <= radius + 1e-12),
            Body::Segment { a, b } => {
                let d = geom::sub(b, a);
                let len2 = geom::dot(&d, &d);
                if len2 <= 1e-24 {
                    return Ok(geom::dist(a, x) <= 1e-10);
                }
                let t = geom::dot(&geom::sub(x, a), &d) / len2;
                if !(-1e-12..=1.0 + 1e-12).contains(&t) {
                    return Ok(false);
                }
                let proj = geom::axpy(a, t.clamp(0.0, 1.0), &d);
                Ok(geom::dist(&proj, x) <= 1e-9 * geom::cloud_scale(&[a.clone(), b.clone()]))
            }
            Body::Zonotope { center, generators } => {
                let target = geom::sub(x, center);
                let (_, residual) = box_least_squares(generators, &target);
                Ok(residual <= 1e-9 * geom::cloud_scale(&[x.to_vec(), center.clone()]))
            }
            Body::Polytope { .. } => polytope_contains(self, x),
            Body::Sum { .. } => {
                if self.is_polytopal() {
                    let poly = Body::Polytope { vertices: self.vertices()? };
                    return polytope_contains(&poly, x);
                }
                if n == 2 {
                    let shape = crate::planar::PlanarShape::from_body(self)?;
                    return Ok(shape.contains(x[0], x[1]));
                }
                // Support-function separation over a deterministic direction
                // net: conservative approximate membership.
                let net = crate::qmc::sphere_net(n, 512);
                let (lo, hi) = self.bounding_box()?;
                let scale = lo
                    .iter()
                    .chain(hi.iter())
                    .fold(1.0_f64, |acc, v| acc.max(v.abs()));
                for u in &net {
                    if geom::dot(x, u) > self.support(u)? + 1e-9 * scale {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Build a membership oracle with all per-body precomputation (hulls,
    /// direction nets, support values) done once, so repeated point queries
    /// are cheap. Used by sampling-based integration.
    pub fn membership_oracle(&self) -> Result<MembershipOracle> {
        let n = self.dim();
        self.validate()?;
        if n == 1 {
            let (lo, hi) = self.bounding_box()?;
            return Ok(MembershipOracle::Interval { lo: lo[0], hi: hi[0] });
        }
        if n == 2 {
            return Ok(MembershipOracle::Planar(
                crate::planar::PlanarShape::from_body(self)?,
            ));
        }
        match self {
            Body::Ball { center, radius } => Ok(MembershipOracle::Ball {
                center: center.clone(),
                radius: *radius,
            }),
            Body::Segment { .. } | Body::Zonotope { .. } => {
                Ok(MembershipOracle::Direct(self.clone()))
            }
            _ if self.is_polytopal() => {
                let verts = self.vertices()?;
                let (vs, facets) = geom::facets_nd(&verts)?;
                let tol = 1e-9 * geom::cloud_scale(&vs);
                Ok(MembershipOracle::HalfSpaces {
                    facets: facets.into_iter().map(|f| (f.normal, f.offset)).collect(),
                    tol,
                })
            }
            _ => {
                let net = crate::qmc::sphere_net(n, 1024);
                let mut supports = Vec::with_capacity(net.len());
                for u in &net {
                    supports.push(self.support(u)?);
                }
                let (lo, hi) = self.bounding_box()?;
                let scale = lo
                    .iter()
                    .chain(hi.iter())
                    .fold(1.0_f64, |acc, v| acc.max(v.abs()));
                Ok(MembershipOracle::SupportNet { net, supports, tol: 1e-9 * scale })
            }
        }
    }

    /// Axis-aligned bounding box from the support function.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            hi[i] = self.support(&e)?;
            e[i] = -1.0;
            lo[i] = -self.support(&e)?;
        }
        Ok((lo, hi))
    }

    /// If the body is an axis-aligned box (a product of intervals), return its
    /// bounds. Used by the exact Gaussian product rule. Structural detection
    /// only (1-D bodies, polytopes whose vertex list is exactly the corner
    /// set, zonotopes with axis-parallel generators) — no hull computation.
    pub fn as_axis_box(&self) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        let n = self.dim();
        if n == 1 {
            let (lo, hi) = self.bounding_box()?;
            return Ok(Some((lo, hi)));
        }
        match self {
            Body::Polytope { vertices } => {
                let verts = geom::dedup_points(vertices);
                if verts.len() != 1 << n {
                    return Ok(None);
                }
                let mut lo = verts[0].clone();
                let mut hi = verts[0].clone();
                for v in &verts {
                    for i in 0..n {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                let scale = geom::cloud_scale(&verts);
                for mask in 0..(1usize << n) {
                    let corner: Vec<f64> = (0..n)
                        .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                        .collect();
                    if !verts.iter().any(|v| geom::dist(v, &corner) <= 1e-9 * scale) {
                        return Ok(None);
                    }
                }
                Ok(Some((lo, hi)))
            }
            Body::Zonotope { center, generators } => {
                // Axis-aligned iff every generator has a single nonzero entry.
                let mut half = vec![0.0; n];
                for g in generators {
                    let nz: Vec<usize> =
                        (0..n).filter(|&i| g[i].abs() > 1e-12).collect();
                    if nz.len() != 1 {
                        return Ok(None);
                    }
                    half[nz[0]] += g[nz[0]].abs();
                }
                let lo: Vec<f64> = (0..n).map(|i| center[i] - half[i]).collect();
                let hi: Vec<f64> = (0..n).map(|i| center[i] + half[i]).collect();
                Ok(Some((lo, hi)))
            }
            _ => Ok(None),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Body::Polytope { vertices } => {
                format!("polytope({} verts, R^{})", vertices.len(), self.dim())
            }
            Body::Zonotope { generators, .. } => {
                format!("zonotope({} gens, R^{})", generators.len(), self.dim())
            }
            Body::Ball { radius, .. } => format!("ball(r={radius:.4}, R^{})", self.dim()),
            Body::Segment { .. } => format!("segment(R^{})", self.dim()),
            Body::Sum { terms } => format!("sum({} terms, R^{})", terms.len(), self.dim()),
        }
    }
}

// ---------- helpers ----------

fn collect_terms(
    body: &Body,
    scale: f64,
    poly: &mut Vec<(f64, Body)>,
    ball_center: &mut Vec<f64>,
    ball_radius: &mut f64,
    symbolic: &mut Vec<SumTerm>,
) {
    if scale == 0.0 {
        return;
    }
    match body {
        Body::Ball { center, radius } => {
            *ball_center = geom::axpy(ball_center, scale, center);
            *ball_radius += scale * radius;
        }
        Body::Sum { terms } => {
            for t in terms {
                collect_terms(&t.body, scale * t.scale, poly, ball_center, ball_radius, symbolic);
            }
        }
        b if b.is_polytopal() => poly.push((scale, b.clone())),
        b => symbolic.push(SumTerm { scale, body: b.clone() }),
    }
}

/// Extreme points of a point cloud, canonically ordered. Drops to the affine
/// hull chart first so degenerate clouds (segments in R^n, planar polytopes in
/// R^3) are handled exactly.
pub fn extreme_points(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let pts = geom::dedup_points(points);
    if pts.is_empty() {
        return Err(Error::EmptyBody);
    }
    if pts.len() == 1 {
        return Ok(pts);
    }
    let (base, basis) = geom::affine_basis(&pts);
    let adim = basis.len();
    if adim == 0 {
        return Ok(vec![pts[0].clone()]);
    }
    // Full-dimensional planar cloud: hull directly (the chart map could be
    // orientation-reversing, and 2-D callers rely on a CCW cycle).
    if pts[0].len() == 2 && adim == 2 {
        return Ok(geom::hull2d(&pts));
    }
    let chart: Vec<Vec<f64>> = pts.iter().map(|p| geom::to_chart(p, &base, &basis)).collect();
    let chart_extremes: Vec<Vec<f64>> = match adim {
        1 => {
            let mut xs: Vec<f64> = chart.iter().map(|c| c[0]).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vec![vec![xs[0]], vec![*xs.last().unwrap()]]
        }
        2 => geom::hull2d(&chart),
        _ => {
            let (verts, _) = geom::facets_nd(&chart)?;
            let mut v = verts;
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        }
    };
    let mut out: Vec<Vec<f64>> = chart_extremes
        .iter()
        .map(|c| geom::from_chart(c, &base, &basis))
        .collect();
    // Snap back to original input points where possible (avoids chart round-off).
    for o in &mut out {
        if let Some(orig) = pts.iter().find(|p| geom::dist(p, o) <= 1e-9 * geom::cloud_scale(&pts)) {
            *o = orig.clone();
        }
    }
    Ok(out)
}

/// CCW vertices of a planar zonotope (exact; standard generator sweep).
fn zonogon_vertices(center: &[f64], generators: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut gens: Vec<[f64; 2]> = generators
        .iter()
        .map(|g| {
            let v = [g[0], g[1]];
            if v[1] < 0.0 || (v[1] == 0.0 && v[0] < 0.0) {
                [-v[0], -v[1]]
            } else {
                v
            }
        })
        .collect();
    gens.sort_by(|a, b| a[1].atan2(a[0]).partial_cmp(&b[1].atan2(b[0])).unwrap());
    let mut start = center.to_vec();
    for g in &gens {
        start = geom::axpy(&start, -1.0, &[g[0], g[1]]);
    }
    let mut verts = vec![start.clone()];
    let mut cur = start.clone();
    for g in &gens {
        cur = geom::axpy(&cur, 2.0, &[g[0], g[1]]);
        verts.push(cur.clone());
    }
    for g in &gens {
        cur = geom::axpy(&cur, -2.0, &[g[0], g[1]]);
        verts.push(cur.clone());
    }
    verts.pop(); // closes the loop
    verts
}

fn polytope_contains(poly: &Body, x: &[f64]) -> Result<bool> {
    let verts = poly.vertices()?;
    let n = x.len();
    let scale = geom::cloud_scale(&verts).max(geom::cloud_scale(&[x.to_vec()]));
    let tol = 1e-9 * scale;
    let adim = geom::affine_dim(&verts);
    if adim < n {
        // Degenerate: membership within the affine hull.
        let (base, basis) = geom::affine_basis(&verts);
        // x must lie in the affine hull
        let c = geom::to_chart(x, &base, &basis);
        let back = geom::from_chart(&c, &base, &basis);
        if geom::dist(&back, x) > tol {
            return Ok(false);
        }
        if adim == 0 {
            return Ok(true);
        }
        let chart_pts: Vec<Vec<f64>> = verts.iter().map(|p| geom::to_chart(p, &base, &basis)).collect();
        let chart_poly = Body::Polytope { vertices: chart_pts };
        return polytope_contains(&chart_poly, &c);
    }
    match n {
        1 => {
            let lo = verts.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = verts.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(x[0] >= lo - tol && x[0] <= hi + tol)
        }
        2 => {
            let hull = geom::hull2d(&verts);
            if hull.len() < 3 {
                let seg = Body::Segment { a: hull[0].clone(), b: hull.last().unwrap().clone() };
                return seg.contains(x);
            }
            for i in 0..hull.len() {
                let a = &hull[i];
                let b = &hull[(i + 1) % hull.len()];
                if geom::cross2(a, b, &x.to_vec()) < -tol * geom::dist(a, b) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => {
            let (vs, facets) = geom::facets_nd(&verts)?;
            let scale = geom::cloud_scale(&vs);
            for f in &facets {
                if geom::dot(&f.normal, x) > f.offset + 1e-9 * scale {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Minimize ||sum_i t_i g_i - target||^2 over the box t in [-1,1]^m (convex
/// QP). Starts from the clamped minimal-norm unconstrained solution, runs
/// cyclic exact coordinate descent, and closes the slow linear-rate tail with
/// Newton steps on the free face whenever nearly parallel generators leave the
/// descent ill-conditioned. Returns the multipliers and the final residual
/// norm, recomputed from scratch so incremental round-off never inflates it.
pub fn box_least_squares(generators: &[Vec<f64>], target: &[f64]) -> (Vec<f64>, f64) {
    let m = generators.len();
    let n = target.len();
    let norms2: Vec<f64> = generators.iter().map(|g| geom::dot(g, g)).collect();
    let scale = generators
        .iter()
        .map(|g| geom::norm(g))
        .fold(geom::norm(target), f64::max)
        .max(1e-300);
    let tol2 = (1e-13 * scale) * (1e-13 * scale);
    let s2 = scale * scale;

    let exact_residual = |t: &[f64]| -> Vec<f64> {
        let mut res = geom::scale(target, -1.0); // res = sum t_i g_i - target
        for (ti, g) in t.iter().zip(generators) {
            if *ti != 0.0 {
                res = geom::axpy(&res, *ti, g);
            }
        }
        res
    };
    // Least-norm multiplier correction d with sum_i d_i g_i = -res over the
    // given coordinates, via the n x n Gram system (normalized so the
    // singularity threshold is scale-free). None when the coordinates do not
    // span the ambient space.
    let gram_step = |idx: &[usize], res: &[f64]| -> Option<Vec<f64>> {
        let mut gram = vec![vec![0.0; n]; n];
        for &i in idx {
            let g = &generators[i];
            for a in 0..n {
                for b in 0..n {
                    gram[a][b] += g[a] * g[b] / s2;
                }
            }
        }
        let rhs: Vec<f64> = res.iter().map(|v| -v / s2).collect();
        let y = geom::solve_linear(&gram, &rhs)?;
        Some(idx.iter().map(|&i| geom::dot(&generators[i], &y)).collect())
    };

    let mut t = vec![0.0; m];
    let live: Vec<usize> = (0..m).filter(|&i| norms2[i] > 0.0).collect();
    if let Some(d) = gram_step(&live, &geom::scale(target, -1.0)) {
        for (&i, di) in live.iter().zip(&d) {
            t[i] = di.clamp(-1.0, 1.0);
        }
    }
    let mut res = exact_residual(&t);

    for _round in 0..8 {
        let mut last = geom::dot(&res, &res);
        for sweep in 0..500 {
            for &i in &live {
                let g = &generators[i];
                // optimal unclamped step for coordinate i
                let grad = geom::dot(&res, g);
                let new_t = (t[i] - grad / norms2[i]).clamp(-1.0, 1.0);
                let dt = new_t - t[i];
                if dt != 0.0 {
                    for k in 0..n {
                        res[k] += dt * g[k];
                    }
                    t[i] = new_t;
                }
            }
            if sweep % 128 == 127 {
                res = exact_residual(&t);
            }
            let cur = geom::dot(&res, &res);
            if cur <= tol2 || last - cur <= 1e-30 + 1e-16 * cur {
                break;
            }
            last = cur;
        }
        res = exact_residual(&t);
        let cur = geom::dot(&res, &res);
        if cur <= tol2 {
            break;
        }
        // Newton polish: jump to the unconstrained minimizer of the current
        // free face, kept only when it actually reduces the exact residual.
        let free: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&i| t[i].abs() < 1.0 - 1e-12)
            .collect();
        if free.is_empty() {
            break;
        }
        let Some(d) = gram_step(&free, &res) else { break };
        let mut polished = t.clone();
        for (&i, di) in free.iter().zip(&d) {
            polished[i] = (polished[i] + di).clamp(-1.0, 1.0);
        }
        let polished_res = exact_residual(&polished);
        if geom::dot(&polished_res, &polished_res) < cur {
            t = polished;
            res = polished_res;
        } else {
            break;
        }
    }

    let res = exact_residual(&t);
    (t, geom::dot(&res, &res).sqrt())
}

/// Decompose a zonotope containing the origin into segments of the form
/// [0, v_i] whose Minkowski sum is exactly the zonotope. Errors with
/// `OriginNotContained` (and the best residual) otherwise.
pub fn zonotope_origin_decomposition(body: &Body) -> Result<Vec<Body>> {
    let (center, generators) = match body {
        Body::Zonotope { center, generators } => (center.clone(), generators.clone()),
        _ => {
            return Err(Error::UnsupportedRepresentation(
                "origin decomposition is defined for zonotopes".into(),
            ))
        }
    };
    body.validate()?;
    let target = geom::scale(&center, -1.0);
    let (t, residual) = box_least_squares(&generators, &target);
    let scale = geom::cloud_scale(&[center.clone()])
        .max(generators.iter().map(|g| geom::norm(g)).fold(1.0, f64::max));
    if residual > 1e-9 * scale {
        return Err(Error::OriginNotContained { residual });
    }
    let n = center.len();
    let zero = vec![0.0; n];
    let mut segments = Vec::new();
    for (ti, g) in t.iter().zip(&generators) {
        let lo = -(1.0 + ti); // endpoint multiplier on g for the negative part
        let hi = 1.0 - ti;
        for c in [lo, hi] {
            if c.abs() * geom::norm(g) > 1e-12 {
                segments.push(Body::Segment { a: zero.clone(), b: geom::scale(g, c) });
            }
        }
    }
    if segments.is_empty() {
        // zonotope degenerated to {0}
        segments.push(Body::Segment { a: zero.clone(), b: zero });
    }
    Ok(segments)
}

/// Point-membership oracle with per-body precomputation done at build time.
/// Queries never allocate beyond small temporaries.
#[derive(Debug, Clone)]
pub enum MembershipOracle {
    Interval { lo: f64, hi: f64 },
    Planar(crate::planar::PlanarShape),
    Ball { center: Vec<f64>, radius: f64 },
    /// Exact per-query tests that need no precomputation (segments, zonotopes).
    Direct(Body),
    /// Intersection of half-spaces `<normal, x> <= offset + tol`.
    HalfSpaces { facets: Vec<(Vec<f64>, f64)>, tol: f64 },
    /// Support-function separation over a fixed direction net (conservative
    /// approximate membership for non-polytopal sums in dimension >= 3).
    SupportNet { net: Vec<Vec<f64>>, supports: Vec<f64>, tol: f64 },
}

impl MembershipOracle {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            MembershipOracle::Interval { lo, hi } => {
                let t = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
                x[0] >= lo - t && x[0] <= hi + t
            }
            MembershipOracle::Planar(shape) => shape.contains(x[0], x[1]),
            MembershipOracle::Ball { center, radius } => {
                geom::dist(center, x) <= radius + 1e-12 * (1.0 + radius)
            }
            MembershipOracle::Direct(body) => body.contains(x).unwrap_or(false),
            MembershipOracle::HalfSpaces { facets, tol } => facets
                .iter()
                .all(|(normal, offset)| geom::dot(normal, x) <= offset + tol),
            MembershipOracle::SupportNet { net, supports, tol } => net
                .iter()
                .zip(supports)
                .all(|(u, h)| geom::dot(u, x) <= h + tol),
        }
    }
}
