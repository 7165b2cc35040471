//! Exact planar reduction: every two-dimensional body in this crate is a
//! Minkowski sum of a convex polygon (possibly a point or a segment) and a
//! Euclidean disk. [`PlanarShape`] materializes that pair, which makes areas
//! exact (Steiner formula) and boundaries a finite list of straight edges and
//! circular arcs — the basis for all planar boundary quadrature.

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::geom;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Convex polygon plus a disk of radius `radius`. The polygon is stored as a
/// canonical counterclockwise cycle (one point and two points are allowed,
/// meaning a disk / a stadium).
#[derive(Debug, Clone)]
pub struct PlanarShape {
    pub poly: Vec<[f64; 2]>,
    pub radius: f64,
}

/// One smooth piece of a planar boundary, oriented counterclockwise.
#[derive(Debug, Clone)]
pub enum BoundaryPiece {
    /// Straight edge from `a` to `b` with constant outward unit `normal`.
    Edge { a: [f64; 2], b: [f64; 2], normal: [f64; 2] },
    /// Circular arc around `center` swept counterclockwise from angle `th0`
    /// to `th1` (`th1 > th0`); the outward normal at angle t is
    /// `(cos t, sin t)`.
    Arc { center: [f64; 2], radius: f64, th0: f64, th1: f64 },
}

impl BoundaryPiece {
    pub fn length(&self) -> f64 {
        match self {
            BoundaryPiece::Edge { a, b, .. } => geom::dist(a, b),
            BoundaryPiece::Arc { radius, th0, th1, .. } => radius * (th1 - th0),
        }
    }
}

impl PlanarShape {
    /// Reduce an arbitrary 2-D body to polygon + disk. Exact: polytopal parts
    /// collapse through the hull machinery, ball parts accumulate into a
    /// single radius and translation.
    pub fn from_body(body: &Body) -> Result<PlanarShape> {
        if body.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: body.dim() });
        }
        body.validate()?;
        let mut poly_terms: Vec<(f64, Body)> = Vec::new();
        let mut shift = [0.0_f64, 0.0];
        let mut radius = 0.0_f64;
        collect(body, 1.0, &mut poly_terms, &mut shift, &mut radius);
        let verts: Vec<Vec<f64>> = if poly_terms.is_empty() {
            vec![vec![0.0, 0.0]]
        } else {
            Body::scaled_sum(&poly_terms)?.vertices()?
        };
        let poly: Vec<[f64; 2]> = verts
            .iter()
            .map(|v| [v[0] + shift[0], v[1] + shift[1]])
            .collect();
        Ok(PlanarShape { poly, radius })
    }

    /// Perimeter contribution of the polygonal skeleton in the Steiner sense:
    /// a two-point skeleton contributes both sides of the segment.
    fn skeleton_perimeter(&self) -> f64 {
        match self.poly.len() {
            0 | 1 => 0.0,
            2 => 2.0 * geom::dist(&self.poly[0], &self.poly[1]),
            _ => {
                let mut s = 0.0;
                for i in 0..self.poly.len() {
                    s += geom::dist(&self.poly[i], &self.poly[(i + 1) % self.poly.len()]);
                }
                s
            }
        }
    }

    /// Exact area by the Steiner formula.
    pub fn area(&self) -> f64 {
        let verts: Vec<Vec<f64>> = self.poly.iter().map(|p| p.to_vec()).collect();
        geom::polygon_area(&verts)
            + self.skeleton_perimeter() * self.radius
            + std::f64::consts::PI * self.radius * self.radius
    }

    /// Exact boundary length.
    pub fn perimeter(&self) -> f64 {
        self.skeleton_perimeter() + TWO_PI * self.radius
    }

    pub fn support(&self, u: &[f64; 2]) -> f64 {
        let hp = self
            .poly
            .iter()
            .map(|v| v[0] * u[0] + v[1] * u[1])
            .fold(f64::NEG_INFINITY, f64::max);
        hp + self.radius * (u[0] * u[0] + u[1] * u[1]).sqrt()
    }

    /// Boundary point with outward normal `u` (unit): the maximizing skeleton
    /// vertex pushed out by the radius. Unique whenever `u` is not one of the
    /// edge normals; on an edge normal the first maximizing vertex is taken.
    pub fn support_point(&self, u: &[f64; 2]) -> [f64; 2] {
        let mut best = self.poly[0];
        let mut bestdot = f64::NEG_INFINITY;
        for v in &self.poly {
            let d = v[0] * u[0] + v[1] * u[1];
            if d > bestdot {
                bestdot = d;
                best = *v;
            }
        }
        [best[0] + self.radius * u[0], best[1] + self.radius * u[1]]
    }

    /// Euclidean distance from a point to the polygonal skeleton (0 inside).
    fn skeleton_distance(&self, x: f64, y: f64) -> f64 {
        let p = [x, y];
        match self.poly.len() {
            1 => geom::dist(&self.poly[0], &p),
            2 => segment_distance(&self.poly[0], &self.poly[1], &p),
            _ => {
                let k = self.poly.len();
                let mut inside = true;
                let mut best = f64::INFINITY;
                for i in 0..k {
                    let a = &self.poly[i];
                    let b = &self.poly[(i + 1) % k];
                    if geom::cross2(a, b, &p) < 0.0 {
                        inside = false;
                    }
                    best = best.min(segment_distance(a, b, &p));
                }
                if inside {
                    0.0
                } else {
                    best
                }
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let scale = geom::cloud_scale(
            &self.poly.iter().map(|p| p.to_vec()).collect::<Vec<_>>(),
        )
        .max(x.abs())
        .max(y.abs());
        self.skeleton_distance(x, y) <= self.radius + 1e-9 * scale
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.poly {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        for k in 0..2 {
            lo[k] -= self.radius;
            hi[k] += self.radius;
        }
        (lo, hi)
    }

    /// The boundary as edges and arcs, counterclockwise. Zero-length pieces
    /// are omitted; a zero-radius segment skeleton yields the two coincident
    /// opposite-normal edges (so flux integrals correctly cancel).
    pub fn boundary_pieces(&self) -> Vec<BoundaryPiece> {
        let r = self.radius;
        let k = self.poly.len();
        let mut pieces = Vec::new();
        match k {
            0 => {}
            1 => {
                if r > 0.0 {
                    pieces.push(BoundaryPiece::Arc {
                        center: self.poly[0],
                        radius: r,
                        th0: 0.0,
                        th1: TWO_PI,
                    });
                }
            }
            2 => {
                let a = self.poly[0];
                let b = self.poly[1];
                let d = [b[0] - a[0], b[1] - a[1]];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                if len <= 0.0 {
                    return PlanarShape { poly: vec![a], radius: r }.boundary_pieces();
                }
                let n = [d[1] / len, -d[0] / len]; // outward on the right of a->b
                pieces.push(BoundaryPiece::Edge {
                    a: [a[0] + r * n[0], a[1] + r * n[1]],
                    b: [b[0] + r * n[0], b[1] + r * n[1]],
                    normal: n,
                });
                if r > 0.0 {
                    let th = n[1].atan2(n[0]);
                    pieces.push(BoundaryPiece::Arc {
                        center: b,
                        radius: r,
                        th0: th,
                        th1: th + std::f64::consts::PI,
                    });
                }
                pieces.push(BoundaryPiece::Edge {
                    a: [b[0] - r * n[0], b[1] - r * n[1]],
                    b: [a[0] - r * n[0], a[1] - r * n[1]],
                    normal: [-n[0], -n[1]],
                });
                if r > 0.0 {
                    let th = (-n[1]).atan2(-n[0]);
                    pieces.push(BoundaryPiece::Arc {
                        center: a,
                        radius: r,
                        th0: th,
                        th1: th + std::f64::consts::PI,
                    });
                }
            }
            _ => {
                // Edge normals, in cycle order.
                let normals: Vec<[f64; 2]> = (0..k)
                    .map(|i| {
                        let a = &self.poly[i];
                        let b = &self.poly[(i + 1) % k];
                        let d = [b[0] - a[0], b[1] - a[1]];
                        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                        [d[1] / len, -d[0] / len]
                    })
                    .collect();
                for i in 0..k {
                    let a = self.poly[i];
                    let b = self.poly[(i + 1) % k];
                    let n = normals[i];
                    pieces.push(BoundaryPiece::Edge {
                        a: [a[0] + r * n[0], a[1] + r * n[1]],
                        b: [b[0] + r * n[0], b[1] + r * n[1]],
                        normal: n,
                    });
                    if r > 0.0 {
                        // Arc at the far vertex, sweeping from this edge's
                        // normal to the next edge's normal.
                        let n2 = normals[(i + 1) % k];
                        let th0 = n[1].atan2(n[0]);
                        let mut sweep = n2[1].atan2(n2[0]) - th0;
                        while sweep < 0.0 {
                            sweep += TWO_PI;
                        }
                        while sweep >= TWO_PI {
                            sweep -= TWO_PI;
                        }
                        if sweep > 1e-14 {
                            pieces.push(BoundaryPiece::Arc {
                                center: b,
                                radius: r,
                                th0,
                                th1: th0 + sweep,
                            });
                        }
                    }
                }
            }
        }
        pieces
    }
}

fn collect(
    body: &Body,
    scale: f64,
    poly_terms: &mut Vec<(f64, Body)>,
    shift: &mut [f64; 2],
    radius: &mut f64,
) {
    if scale == 0.0 {
        return;
    }
    match body {
        Body::Ball { center, radius: r } => {
            shift[0] += scale * center[0];
            shift[1] += scale * center[1];
            *radius += scale * r;
        }
        Body::Sum { terms } => {
            for t in terms {
                collect(&t.body, scale * t.scale, poly_terms, shift, radius);
            }
        }
        b => poly_terms.push((scale, b.clone())),
    }
}

fn segment_distance(a: &[f64; 2], b: &[f64; 2], p: &[f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 <= 0.0 {
        return geom::dist(a, p);
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    geom::dist(&q, p)
}
