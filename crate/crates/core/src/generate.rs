//! Deterministic random instance generators for sweeps and searches.
//!
//! Every generator draws from a caller-provided ChaCha stream; sweeps derive
//! one stream per instance from a master seed so results are reproducible
//! and independent of evaluation order or thread count.

use crate::bodies::Body;
use crate::convexfn::ConvexPL;
use crate::qmc;
use rand::Rng;
use rand::SeedableRng;
// Re-exported so downstream crates can name the stream type without pinning
// the rand_chacha version themselves.
pub use rand_chacha::ChaCha8Rng;

/// The per-instance random stream of a sweep: instance `index` under master
/// `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(qmc::mix_seed(seed, index))
}

fn uniform_point(rng: &mut ChaCha8Rng) -> Vec<f64> {
    vec![
        2.0 * rng.random::<f64>() - 1.0,
        2.0 * rng.random::<f64>() - 1.0,
    ]
}

/// Convex hull of 4..=10 uniform points in the square [-1,1]^2, resampled
/// until it is full-dimensional.
pub fn random_polygon(rng: &mut ChaCha8Rng) -> Body {
    loop {
        let k = rng.random_range(4..=10);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| uniform_point(rng)).collect();
        if let Ok(b) = Body::polytope(pts) {
            if matches!(b.affine_dim(), Ok(2)) {
                return b.canonical().expect("canonical form of a polygon");
            }
        }
    }
}

/// Origin-symmetric polygon: the hull of a point set united with its
/// reflection.
pub fn symmetric_polygon(rng: &mut ChaCha8Rng) -> Body {
    loop {
        let k = rng.random_range(2..=5);
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(2 * k);
        for _ in 0..k {
            let p = uniform_point(rng);
            pts.push(vec![-p[0], -p[1]]);
            pts.push(p);
        }
        if let Ok(b) = Body::polytope(pts) {
            if matches!(b.affine_dim(), Ok(2)) {
                return b.canonical().expect("canonical form of a polygon");
            }
        }
    }
}

/// Random polygon accepted only when it contains the origin.
pub fn origin_polygon(rng: &mut ChaCha8Rng) -> Body {
    loop {
        let b = random_polygon(rng);
        if matches!(b.contains(&[0.0, 0.0]), Ok(true)) {
            return b;
        }
    }
}

/// Planar zonotope with 2..=5 generators, centered so that it contains the
/// origin (zonotopes are always symmetric about their center).
pub fn random_zonotope(rng: &mut ChaCha8Rng) -> Body {
    loop {
        let m = rng.random_range(2..=5);
        let generators: Vec<Vec<f64>> = (0..m).map(|_| uniform_point(rng)).collect();
        let mut center = vec![0.0, 0.0];
        for g in &generators {
            let t = 2.0 * rng.random::<f64>() - 1.0;
            center[0] += t * g[0];
            center[1] += t * g[1];
        }
        if let Ok(b) = Body::zonotope(center, generators) {
            if matches!(b.affine_dim(), Ok(2)) {
                return b;
            }
        }
    }
}

/// Random planar segment with endpoints in [-1,1]^2.
pub fn random_segment(rng: &mut ChaCha8Rng) -> Body {
    loop {
        let a = uniform_point(rng);
        let b = uniform_point(rng);
        if (a[0] - b[0]).abs() + (a[1] - b[1]).abs() > 1e-6 {
            return Body::segment(a, b).expect("segment from distinct points");
        }
    }
}

/// Log-uniform radius in [0.2, 2.5].
pub fn random_radius(rng: &mut ChaCha8Rng) -> f64 {
    let lo: f64 = 0.2;
    let hi: f64 = 2.5;
    lo * (hi / lo).powf(rng.random::<f64>())
}

/// Triple of centered balls with log-uniform radii.
pub fn random_ball_triple(rng: &mut ChaCha8Rng, dim: usize) -> [Body; 3] {
    [
        Body::ball(vec![0.0; dim], random_radius(rng)).expect("centered ball"),
        Body::ball(vec![0.0; dim], random_radius(rng)).expect("centered ball"),
        Body::ball(vec![0.0; dim], random_radius(rng)).expect("centered ball"),
    ]
}

/// Uniform direction on the unit sphere in R^1, R^2, or R^3.
pub fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    match dim {
        1 => vec![if rng.random::<f64>() < 0.5 { -1.0 } else { 1.0 }],
        2 => {
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            vec![t.cos(), t.sin()]
        }
        3 => {
            let z = 2.0 * rng.random::<f64>() - 1.0;
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            let r = (1.0 - z * z).max(0.0).sqrt();
            vec![r * t.cos(), r * t.sin(), z]
        }
        _ => panic!("random_direction supports dimensions 1..=3"),
    }
}

fn convex_pl_on(rng: &mut ChaCha8Rng, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let pieces = rng.random_range(1..=8usize);
    let mut xs = vec![a, b];
    for _ in 1..pieces {
        xs.push(a + (b - a) * rng.random::<f64>());
    }
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs.dedup_by(|p, q| (*p - *q).abs() < 1e-6 * (1.0 + (b - a).abs()));
    // Increasing slopes make the piecewise-linear interpolant convex.
    let mut slopes: Vec<f64> = (0..xs.len() - 1)
        .map(|_| 6.0 * rng.random::<f64>() - 3.0)
        .collect();
    slopes.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut vals = vec![2.0 * rng.random::<f64>() - 1.0];
    for (i, s) in slopes.iter().enumerate() {
        let v = vals[i] + s * (xs[i + 1] - xs[i]);
        vals.push(v);
    }
    (xs, vals)
}

/// Random convex piecewise-linear function on a random interval within
/// [-2, 2], lifted so its minimum is zero (hence nonnegative).
pub fn random_nonnegative_convex_pl(rng: &mut ChaCha8Rng) -> ConvexPL {
    let a = -2.0 + 2.0 * rng.random::<f64>();
    let b = a + 0.5 + 1.5 * rng.random::<f64>();
    let (xs, mut vals) = convex_pl_on(rng, a, b);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let lift = rng.random::<f64>();
    for v in &mut vals {
        *v += lift - min;
    }
    ConvexPL::new_nonnegative(xs, vals).expect("lifted convex interpolant")
}

/// Random convex piecewise-linear function on [0, 1] with unconstrained sign.
pub fn random_convex_pl_unit(rng: &mut ChaCha8Rng) -> ConvexPL {
    let (xs, vals) = convex_pl_on(rng, 0.0, 1.0);
    ConvexPL::new(xs, vals).expect("convex interpolant")
}
