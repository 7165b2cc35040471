//! Gauss-Legendre quadrature: nodes by Newton iteration on Legendre
//! polynomials, cached per order. An order-m rule is exact for polynomials of
//! degree 2m-1, which several callers rely on to earn an `exact` method tag.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// Nodes and weights on [-1, 1].
#[derive(Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn cache() -> &'static Mutex<HashMap<usize, GlRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, GlRule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Legendre P_m and P_m' at x via the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub fn gauss_legendre(m: usize) -> GlRule {
    assert!(m >= 1);
    if let Some(r) = cache().lock().unwrap().get(&m) {
        return r.clone();
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        // Chebyshev initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(m, x);
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    let rule = GlRule { nodes, weights };
    cache().lock().unwrap().insert(m, rule.clone());
    rule
}

/// Integrate f over [a, b] with an order-m rule.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, m: usize) -> f64 {
    let rule = gauss_legendre(m);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        s += w * f(c + h * x);
    }
    s * h
}

/// Integrate with one refinement step (split at the midpoint); returns the
/// refined value and |refined - coarse| as an error estimate.
pub fn integrate_refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, m: usize) -> (f64, f64) {
    let coarse = integrate(f, a, b, m);
    let mid = 0.5 * (a + b);
    let fine = integrate(f, a, mid, m) + integrate(f, mid, b, m);
    (fine, (fine - coarse).abs().max(f64::EPSILON * fine.abs()))
}

/// Adaptive bisection to an absolute tolerance (smooth integrands; used for
/// radial mass profiles of the exponential families).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let whole = integrate(f, a, b, 16);
        let mid = 0.5 * (a + b);
        let split = integrate(f, a, mid, 16) + integrate(f, mid, b, 16);
        if (whole - split).abs() <= tol || depth >= 24 {
            split
        } else {
            rec(f, a, mid, 0.5 * tol, depth + 1) + rec(f, mid, b, 0.5 * tol, depth + 1)
        }
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, tol, 0)
}

/// Tensor Gauss-Legendre over the triangle (a, b, c) via the Duffy map
/// T(u, v) = a + u (b - a) + u v (c - b), Jacobian u |cross(b-a, c-b)|.
pub fn triangle_integrate<F: Fn(f64, f64) -> f64>(
    f: &F,
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    m: usize,
) -> f64 {
    let rule = gauss_legendre(m);
    let e1 = [b[0] - a[0], b[1] - a[1]];
    let e2 = [c[0] - b[0], c[1] - b[1]];
    let jac = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
    if jac == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for (xu, wu) in rule.nodes.iter().zip(&rule.weights) {
        let u = 0.5 * (xu + 1.0);
        for (xv, wv) in rule.nodes.iter().zip(&rule.weights) {
            let v = 0.5 * (xv + 1.0);
            let x = a[0] + u * (e1[0] + v * e2[0]);
            let y = a[1] + u * (e1[1] + v * e2[1]);
            s += wu * wv * u * f(x, y);
        }
    }
    s * jac * 0.25
}

/// Triangle quadrature with one refinement step (split into 4 at edge
/// midpoints); returns (refined, |refined - coarse|).
pub fn triangle_integrate_refine<F: Fn(f64, f64) -> f64>(
    f: &F,
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    m: usize,
) -> (f64, f64) {
    let coarse = triangle_integrate(f, a, b, c, m);
    let mab = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let mbc = [(b[0] + c[0]) / 2.0, (b[1] + c[1]) / 2.0];
    let mca = [(c[0] + a[0]) / 2.0, (c[1] + a[1]) / 2.0];
    let fine = triangle_integrate(f, a, mab, mca, m)
        + triangle_integrate(f, mab, b, mbc, m)
        + triangle_integrate(f, mca, mbc, c, m)
        + triangle_integrate(f, mab, mbc, mca, m);
    (fine, (fine - coarse).abs().max(f64::EPSILON * fine.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_exact_for_polynomials() {
        // order m exact through degree 2m-1
        let f = |x: f64| 3.0 * x.powi(5) - x.powi(3) + 2.0 * x + 1.0;
        let v = integrate(&f, -1.0, 1.0, 3);
        assert!((v - 2.0).abs() < 1e-13, "odd terms vanish, constant gives 2: {v}");
        let g = |x: f64| x.powi(6);
        let v = integrate(&g, -1.0, 1.0, 4); // degree 6 <= 2*4-1
        assert!((v - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn gl_smooth_integrand() {
        // int_{-6}^{6} e^{-x^2/2} dx, cross-checked against the CDF route
        let v = integrate(&|x: f64| (-x * x / 2.0).exp(), -6.0, 6.0, 48);
        let expect = (2.0 * std::f64::consts::PI).sqrt()
            * (2.0 * crate::stats::normal_cdf(6.0) - 1.0);
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn triangle_area_and_moment() {
        // unit right triangle: area 1/2, integral of x over it = 1/6
        let (v, err) = triangle_integrate_refine(&|_, _| 1.0, [0.0, 0.0], [1.0, 0.0], [0.0, 1.0], 8);
        assert!((v - 0.5).abs() < 1e-13);
        assert!(err < 1e-12);
        let (v, _) = triangle_integrate_refine(&|x, _| x, [0.0, 0.0], [1.0, 0.0], [0.0, 1.0], 8);
        assert!((v - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let v = integrate_adaptive(&|t: f64| t * (-t).exp(), 0.0, 10.0, 1e-13);
        let exact = 1.0 - 11.0 * (-10.0f64).exp();
        assert!((v - exact).abs() < 1e-12);
    }
}
