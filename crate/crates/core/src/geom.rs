//! Small dense linear-algebra and convex-hull helpers on `&[f64]` vectors.
//!
//! Everything here is deliberately dimension-generic but tuned for n <= 4:
//! facet enumeration is a brute-force hyperplane scan, which is exact and
//! entirely adequate at desk scale (tens of points). The planar (n = 2) hull is
//! the usual monotone chain and is the workhorse for the rest of the crate.

use crate::error::{Error, Result};

/// Absolute tolerance for vertex deduplication (per coordinate, Euclidean).
pub const DEDUP_TOL: f64 = 1e-10;
/// Relative tolerance used in facet side tests.
pub const SIDE_TOL: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn normalize(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n <= 1e-300 {
        None
    } else {
        Some(scale(a, 1.0 / n))
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Rotate a planar vector by +90 degrees.
pub fn rot90(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

pub fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Cross product of two vectors in R^3.
pub fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Deduplicate points within `DEDUP_TOL` (Euclidean), keeping first occurrences.
pub fn dedup_points(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| dist(p, q) <= DEDUP_TOL) {
            out.push(p.clone());
        }
    }
    out
}

/// Scale of a point cloud: max coordinate magnitude, floored at 1 so absolute
/// tolerances stay meaningful for bodies near the origin.
pub fn cloud_scale(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0_f64, |m, &x| m.max(x.abs()))
}

/// Convex hull of planar points, counterclockwise, strictly convex (collinear
/// interior points dropped). Returns at least one point; two points for a
/// degenerate segment cloud.
pub fn hull2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts = dedup_points(points);
    if pts.len() <= 2 {
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return pts;
    }
    let scale = cloud_scale(&pts);
    let turn_tol = 1e-12 * scale * scale;
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let build = |iter: &mut dyn Iterator<Item = &Vec<f64>>| {
        let mut chain: Vec<Vec<f64>> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross2(&chain[chain.len() - 2], &chain[chain.len() - 1], p) <= turn_tol
            {
                chain.pop();
            }
            chain.push(p.clone());
        }
        chain
    };
    let lower = build(&mut pts.iter());
    let upper = build(&mut pts.iter().rev());
    let mut hull = lower;
    hull.pop();
    hull.extend(upper);
    hull.pop();
    if hull.len() < 2 {
        // All points collinear: extremes only.
        let mut extremes = vec![pts.first().unwrap().clone(), pts.last().unwrap().clone()];
        extremes.dedup_by(|a, b| dist(a, b) <= DEDUP_TOL);
        return extremes;
    }
    canonical_cycle(hull)
}

/// Rotate a CCW vertex cycle so the lexicographically smallest vertex is first.
pub fn canonical_cycle(mut cycle: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if cycle.is_empty() {
        return cycle;
    }
    let start = cycle
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    cycle.rotate_left(start);
    cycle
}

/// Signed area of a CCW polygon (shoelace).
pub fn polygon_area(verts: &[Vec<f64>]) -> f64 {
    if verts.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..verts.len() {
        let a = &verts[i];
        let b = &verts[(i + 1) % verts.len()];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

pub fn polygon_perimeter(verts: &[Vec<f64>]) -> f64 {
    if verts.len() < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..verts.len() {
        s += dist(&verts[i], &verts[(i + 1) % verts.len()]);
    }
    if verts.len() == 2 {
        s / 2.0 // closed walk over a segment counts it twice
    } else {
        s
    }
}

/// A facet of a full-dimensional polytope: outward unit normal, offset
/// (h = max <v,u>), and indices of the incident vertices.
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

/// Orthonormal basis of the affine hull of `points` (directions only), plus the
/// base point. Gram-Schmidt with a rank tolerance relative to the cloud scale.
pub fn affine_basis(points: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let base = points[0].clone();
    let scale = cloud_scale(points);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in points.iter().skip(1) {
        let mut d = sub(p, &base);
        for b in &basis {
            let c = dot(&d, b);
            d = axpy(&d, -c, b);
        }
        if norm(&d) > 1e-9 * scale {
            let n = norm(&d);
            basis.push(scale_vec(&d, 1.0 / n));
        }
    }
    (base, basis)
}

fn scale_vec(a: &[f64], s: f64) -> Vec<f64> {
    scale(a, s)
}

pub fn affine_dim(points: &[Vec<f64>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    affine_basis(points).1.len()
}

/// Express `p` in the affine chart (base, basis).
pub fn to_chart(p: &[f64], base: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let d = sub(p, base);
    basis.iter().map(|b| dot(&d, b)).collect()
}

/// Map chart coordinates back to ambient space.
pub fn from_chart(c: &[f64], base: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut p = base.to_vec();
    for (ci, b) in c.iter().zip(basis) {
        p = axpy(&p, *ci, b);
    }
    p
}

/// Solve the (n x n) system A x = b by Gaussian elimination with partial
/// pivoting; returns None when the matrix is numerically singular.
pub fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Unit normal of the hyperplane through n affinely independent points in R^n,
/// via elimination on the direction matrix (null-vector of rank n-1 system).
fn hyperplane_normal(pts: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let n = pts[0].len();
    debug_assert_eq!(pts.len(), n);
    // Directions d_i = p_i - p_0, i = 1..n-1; find u with <d_i, u> = 0.
    let dirs: Vec<Vec<f64>> = (1..n).map(|i| sub(pts[i], pts[0])).collect();
    // Solve by fixing one coordinate of u to 1 and solving the rest; try each
    // choice until one is well conditioned.
    for fixed in 0..n {
        let mut a: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
        let mut b: Vec<f64> = Vec::with_capacity(n - 1);
        for d in &dirs {
            let mut row = Vec::with_capacity(n - 1);
            for (j, dj) in d.iter().enumerate() {
                if j != fixed {
                    row.push(*dj);
                }
            }
            a.push(row);
            b.push(-d[fixed]);
        }
        if let Some(sol) = solve_linear(&a, &b) {
            let mut u = Vec::with_capacity(n);
            let mut it = sol.into_iter();
            for j in 0..n {
                if j == fixed {
                    u.push(1.0);
                } else {
                    u.push(it.next().unwrap());
                }
            }
            if let Some(un) = normalize(&u) {
                if all_finite(&un) {
                    return Some(un);
                }
            }
        }
    }
    None
}

/// Brute-force facet enumeration of a full-dimensional polytope in R^n given by
/// its (deduplicated) vertex candidates. Exact at desk scale: every n-subset of
/// points spans a candidate hyperplane; a hyperplane is a facet when all points
/// lie weakly on one side. Points on >= n facets with rank-n normals are the
/// true vertices. Returns (extreme points, facets with indices into them).
pub fn facets_nd(points: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<Facet>)> {
    let n = points[0].len();
    let pts = dedup_points(points);
    let m = pts.len();
    if m < n + 1 {
        return Err(Error::UnsupportedRepresentation(format!(
            "facet enumeration needs a full-dimensional cloud ({m} points in R^{n})"
        )));
    }
    let scale = cloud_scale(&pts);
    let tol = SIDE_TOL * scale;
    let mut facets: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut idx = vec![0usize; n];
    combinations(m, n, &mut idx, &mut |sel| {
        let chosen: Vec<&Vec<f64>> = sel.iter().map(|&i| &pts[i]).collect();
        if let Some(mut u) = hyperplane_normal(&chosen) {
            let off = dot(&u, chosen[0]);
            let mut above = false;
            let mut below = false;
            for p in &pts {
                let d = dot(&u, p) - off;
                if d > tol {
                    above = true;
                }
                if d < -tol {
                    below = true;
                }
                if above && below {
                    break;
                }
            }
            if above ^ below {
                if above {
                    u = scale_vec(&u, -1.0);
                }
                let off = if above { -off } else { off };
                if !facets
                    .iter()
                    .any(|(fu, fo)| dist(fu, &u) < 1e-7 && (fo - off).abs() < tol.max(1e-9))
                {
                    facets.push((u, off));
                }
            }
        }
    });
    if facets.is_empty() {
        return Err(Error::UnsupportedRepresentation(
            "degenerate cloud: no facets found".into(),
        ));
    }
    // Incidences.
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (fi, (u, off)) in facets.iter().enumerate() {
        for (pi, p) in pts.iter().enumerate() {
            if (dot(u, p) - off).abs() <= tol {
                incident[pi].push(fi);
            }
        }
    }
    // A point is a vertex iff its incident facet normals span R^n.
    let mut keep: Vec<usize> = Vec::new();
    for (pi, fs) in incident.iter().enumerate() {
        if fs.len() >= n {
            let normals: Vec<Vec<f64>> = fs.iter().map(|&fi| facets[fi].0.clone()).collect();
            if rank(&normals) >= n {
                keep.push(pi);
            }
        }
    }
    if keep.is_empty() {
        return Err(Error::UnsupportedRepresentation(
            "no extreme points identified".into(),
        ));
    }
    let remap: std::collections::HashMap<usize, usize> =
        keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let verts: Vec<Vec<f64>> = keep.iter().map(|&i| pts[i].clone()).collect();
    let out_facets = facets
        .iter()
        .map(|(u, off)| {
            let vi: Vec<usize> = keep
                .iter()
                .filter(|&&pi| (dot(u, &pts[pi]) - off).abs() <= tol)
                .map(|&pi| remap[&pi])
                .collect();
            Facet {
                normal: u.clone(),
                offset: *off,
                vertices: vi,
            }
        })
        .collect();
    Ok((verts, out_facets))
}

fn rank(rows: &[Vec<f64>]) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m[0].len();
    let mut r = 0;
    for col in 0..ncols {
        if r >= m.len() {
            break;
        }
        let piv = (r..m.len()).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let piv = match piv {
            Some(p) => p,
            None => break,
        };
        if m[piv][col].abs() < 1e-8 {
            continue;
        }
        m.swap(r, piv);
        for i in 0..m.len() {
            if i != r {
                let f = m[i][col] / m[r][col];
                for k in col..ncols {
                    m[i][k] -= f * m[r][k];
                }
            }
        }
        r += 1;
    }
    r
}

fn combinations(m: usize, k: usize, idx: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, pos: usize, m: usize, k: usize, idx: &mut [usize], f: &mut dyn FnMut(&[usize])) {
        if pos == k {
            f(idx);
            return;
        }
        for i in start..m {
            idx[pos] = i;
            rec(i + 1, pos + 1, m, k, idx, f);
        }
    }
    rec(0, 0, m, k, idx, f);
}

/// Order the vertices of a convex planar polygon embedded in R^n (given by a
/// facet of a 3-polytope, say) counterclockwise around their centroid with
/// respect to the given in-plane orthonormal basis.
pub fn order_cycle_in_plane(verts: &[Vec<f64>], base: &[f64], basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    debug_assert_eq!(basis.len(), 2);
    let mut charted: Vec<(Vec<f64>, Vec<f64>)> = verts
        .iter()
        .map(|v| (to_chart(v, base, basis), v.clone()))
        .collect();
    let cx = charted.iter().map(|(c, _)| c[0]).sum::<f64>() / charted.len() as f64;
    let cy = charted.iter().map(|(c, _)| c[1]).sum::<f64>() / charted.len() as f64;
    charted.sort_by(|(a, _), (b, _)| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    charted.into_iter().map(|(_, v)| v).collect()
}
