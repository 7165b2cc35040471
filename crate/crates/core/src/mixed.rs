//! First and second mixed weighted quantities of convex bodies.
//!
//! The first mixed quantity of `(K, L)` is the one-sided derivative of
//! `eps -> mu(K + eps L)` at zero; the second mixed quantity of `(A, B, C)`
//! is the corresponding second mixed derivative in two perturbation
//! parameters. Both are computed two independent ways: Richardson-extrapolated
//! difference quotients of the measure itself, and boundary formulas built on
//! the weighted surface measures of the `surface` module. The two routes
//! share no code beyond the measure evaluator, which is what makes their
//! agreement a meaningful check.

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::exec;
use crate::geom;
use crate::measures::{self, EvalResult, Measure};
use crate::planar::PlanarShape;
use crate::quad;
use crate::reports::InequalityReport;
use crate::surface;

/// Finite-difference schedule: the perturbation grid and the Richardson
/// extrapolation depth. Negative perturbations are meaningless for body
/// sums, so all quotients are one-sided; `two_sided` instead selects the
/// decoupled (s, t) grid for second differences (s = eps, t = eps/2), useful
/// when the two perturbing bodies must be treated asymmetrically.
#[derive(Debug, Clone)]
pub struct FdSchedule {
    pub epsilons: Vec<f64>,
    pub order: usize,
    pub two_sided: bool,
}

impl Default for FdSchedule {
    fn default() -> Self {
        FdSchedule {
            epsilons: (0..=6).map(|k| 0.2 * 0.5f64.powi(k)).collect(),
            order: 3,
            two_sided: false,
        }
    }
}

impl FdSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.len() < 3 {
            return Err(Error::Invalid(
                "finite-difference schedules need at least 3 epsilons".into(),
            ));
        }
        for w in self.epsilons.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::Invalid(
                    "finite-difference epsilons must be strictly decreasing".into(),
                ));
            }
        }
        if self.epsilons[self.epsilons.len() - 1] <= 0.0 {
            return Err(Error::Invalid(
                "finite-difference epsilons must be positive".into(),
            ));
        }
        if self.order == 0 {
            return Err(Error::Invalid(
                "Richardson order must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Richardson extrapolation of difference quotients `samples = (eps, value,
/// eval_error)` to eps -> 0, by Neville's scheme on the polynomial in eps.
/// Evaluation errors are propagated through the same tableau with absolute
/// coefficients; the truncation estimate is the last diagonal step. When the
/// diagonal stops contracting above the propagated noise the routine refuses
/// to return a value.
fn richardson(samples: &[(f64, f64, f64)], order: usize) -> Result<EvalResult> {
    let n = samples.len();
    let eps: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut t: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut e: Vec<Vec<f64>> = vec![Vec::new(); n];
    for k in 0..n {
        t[k].push(samples[k].1);
        e[k].push(samples[k].2);
        let jmax = k.min(order);
        for j in 1..=jmax {
            let d = eps[k - j] - eps[k];
            let tv = (eps[k - j] * t[k][j - 1] - eps[k] * t[k - 1][j - 1]) / d;
            let ev = (eps[k - j] * e[k][j - 1] + eps[k] * e[k - 1][j - 1]) / d;
            t[k].push(tv);
            e[k].push(ev);
        }
    }
    let diag: Vec<f64> = (0..n).map(|k| t[k][k.min(order)]).collect();
    let last = diag[n - 1];
    let prev = diag[n - 2];
    let t_last = (last - prev).abs();
    let t_prev = (prev - diag[n - 3]).abs();
    let quad_err = e[n - 1][(n - 1).min(order)];
    let floor = 1e-9 * (1.0 + last.abs());
    if t_last > t_prev && t_last > 3.0 * quad_err && t_last > floor {
        return Err(Error::Inconclusive { prev, last });
    }
    Ok(EvalResult::fd(last, t_last + quad_err))
}

fn check_dims(dims: &[usize]) -> Result<()> {
    for w in dims.windows(2) {
        if w[0] != w[1] {
            return Err(Error::DimensionMismatch {
                expected: w[0],
                got: w[1],
            });
        }
    }
    Ok(())
}

/// First mixed quantity `mu(K; L)` by one-sided difference quotients of the
/// measure, Richardson-extrapolated over the schedule grid.
pub fn mixed1_fd(mu: &Measure, k: &Body, l: &Body, schedule: &FdSchedule) -> Result<EvalResult> {
    schedule.validate()?;
    mu.validate()?;
    check_dims(&[k.dim(), l.dim()])?;
    let base = measures::measure(mu, k)?;
    let quotients = exec::map_indexed(schedule.epsilons.len(), |i| -> Result<(f64, f64, f64)> {
        let eps = schedule.epsilons[i];
        let sum = Body::scaled_sum(&[(1.0, k.clone()), (eps, l.clone())])?;
        let m = measures::measure(mu, &sum)?;
        Ok((
            eps,
            (m.value - base.value) / eps,
            (m.abs_error + base.abs_error) / eps,
        ))
    });
    let samples: Vec<(f64, f64, f64)> = quotients.into_iter().collect::<Result<_>>()?;
    richardson(&samples, schedule.order)
}

/// First mixed quantity by the boundary formula: the support function of `L`
/// integrated against the weighted surface measure of `K`.
pub fn mixed1_formula(mu: &Measure, k: &Body, l: &Body) -> Result<EvalResult> {
    mu.validate()?;
    l.validate()?;
    check_dims(&[k.dim(), l.dim()])?;
    let sm = surface::weighted_surface_measure(mu, k)?;
    Ok(sm.integrate(&|u: &[f64]| l.support(u).expect("validated body")))
}

/// Weighted surface area by finite differences: the first mixed quantity of
/// `K` with the unit ball. The formula route lives in the `surface` module;
/// keeping the two separate preserves the cross-check.
pub fn weighted_surface_area_fd(mu: &Measure, k: &Body, schedule: &FdSchedule) -> Result<EvalResult> {
    mixed1_fd(mu, k, &Body::unit_ball(k.dim()), schedule)
}

/// Second mixed quantity `mu(A; B, C)` by the second mixed difference
/// `[mu(A+sB+tC) - mu(A+sB) - mu(A+tC) + mu(A)] / (s t)`, extrapolated.
/// The default grid couples s = t = eps; `two_sided` selects s = eps,
/// t = eps/2 so the two slots are probed at genuinely different scales.
pub fn mixed2_fd(
    mu: &Measure,
    a: &Body,
    b: &Body,
    c: &Body,
    schedule: &FdSchedule,
) -> Result<EvalResult> {
    schedule.validate()?;
    mu.validate()?;
    check_dims(&[a.dim(), b.dim(), c.dim()])?;
    let base = measures::measure(mu, a)?;
    let quotients = exec::map_indexed(schedule.epsilons.len(), |i| -> Result<(f64, f64, f64)> {
        let s = schedule.epsilons[i];
        let t = if schedule.two_sided { 0.5 * s } else { s };
        let m_bc = measures::measure(
            mu,
            &Body::scaled_sum(&[(1.0, a.clone()), (s, b.clone()), (t, c.clone())])?,
        )?;
        let m_b = measures::measure(mu, &Body::scaled_sum(&[(1.0, a.clone()), (s, b.clone())])?)?;
        let m_c = measures::measure(mu, &Body::scaled_sum(&[(1.0, a.clone()), (t, c.clone())])?)?;
        let st = s * t;
        Ok((
            s,
            (m_bc.value - m_b.value - m_c.value + base.value) / st,
            (m_bc.abs_error + m_b.abs_error + m_c.abs_error + base.abs_error) / st,
        ))
    });
    let samples: Vec<(f64, f64, f64)> = quotients.into_iter().collect::<Result<_>>()?;
    richardson(&samples, schedule.order)
}

/// Second mixed quantity by the boundary sweep formula. In the plane the
/// perturbing body `b` must be polytopal (with `c` arbitrary; the two are
/// swapped when only `c` is polytopal, which the symmetry of the quantity
/// permits). In dimension 3 one of them must be a segment or point. On the
/// line the closed form needs only the density derivative at the endpoints.
pub fn mixed2_formula(mu: &Measure, a: &Body, b: &Body, c: &Body) -> Result<EvalResult> {
    mu.validate()?;
    a.validate()?;
    b.validate()?;
    c.validate()?;
    check_dims(&[a.dim(), b.dim(), c.dim()])?;
    let n = a.dim();
    match n {
        1 => {
            if !mu.is_c1() {
                return Err(Error::ClassViolation {
                    context: "the endpoint formula needs a continuously differentiable density",
                });
            }
            let (alo, ahi) = a.bounding_box()?;
            let (blo, bhi) = b.bounding_box()?;
            let (clo, chi) = c.bounding_box()?;
            let dhi = mu.density_gradient(&[ahi[0]])[0];
            let dlo = mu.density_gradient(&[alo[0]])[0];
            Ok(EvalResult::exact(
                dhi * bhi[0] * chi[0] - dlo * blo[0] * clo[0],
            ))
        }
        2 => {
            let shape = PlanarShape::from_body(a)?;
            let b_shape = PlanarShape::from_body(b)?;
            if b_shape.radius == 0.0 {
                let h_c = |x: f64, y: f64| c.support(&[x, y]).expect("validated body");
                return surface::planar_mixed_value(mu, &shape, &b_shape.poly, &h_c);
            }
            let c_shape = PlanarShape::from_body(c)?;
            if c_shape.radius == 0.0 {
                let h_b = |x: f64, y: f64| b.support(&[x, y]).expect("validated body");
                return surface::planar_mixed_value(mu, &shape, &c_shape.poly, &h_b);
            }
            Err(Error::UnsupportedCase(
                "the planar sweep formula needs a polytopal perturbing body in one slot".into(),
            ))
        }
        3 => {
            let ends = |k: &Body| -> Result<Option<(Vec<f64>, Vec<f64>)>> {
                if k.total_radius() > 0.0 {
                    return Ok(None);
                }
                let vs = k.vertices()?;
                Ok(match vs.len() {
                    1 => Some((vs[0].clone(), vs[0].clone())),
                    2 => Some((vs[0].clone(), vs[1].clone())),
                    _ => None,
                })
            };
            if let Some((b0, b1)) = ends(b)? {
                let h_c = |u: &[f64]| c.support(u).expect("validated body");
                return surface::polytope_segment_mixed_value_3d(mu, a, &b0, &b1, &h_c);
            }
            if let Some((c0, c1)) = ends(c)? {
                let h_b = |u: &[f64]| b.support(u).expect("validated body");
                return surface::polytope_segment_mixed_value_3d(mu, a, &c0, &c1, &h_b);
            }
            Err(Error::UnsupportedCase(
                "in dimension 3 the sweep formula needs a segment in one perturbing slot".into(),
            ))
        }
        _ => Err(Error::UnsupportedCase(format!(
            "sweep formulas are implemented for n <= 3, not n = {n}"
        ))),
    }
}

/// `mu(A; [0, v], C)` by the sweep formula: the second mixed quantity with
/// the segment from the origin to `v` in the middle slot.
pub fn mixed2_segment(mu: &Measure, a: &Body, v: &[f64], c: &Body) -> Result<EvalResult> {
    let b = Body::segment(vec![0.0; v.len()], v.to_vec())?;
    mixed2_formula(mu, a, &b, c)
}

/// Flux of the density gradient through the (n-1)-disk of radius `r`
/// centered at `x` and normal to `v`: the integral of the directional
/// derivative of the density along `v` over the disk. Identically zero for
/// every disk exactly when the density is constant.
pub fn disk_normal_flux(mu: &Measure, v: &[f64], r: f64, x: &[f64]) -> Result<EvalResult> {
    mu.validate()?;
    check_dims(&[v.len(), x.len()])?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Invalid("disk radius must be positive".into()));
    }
    let vn = geom::norm(v);
    if vn <= 0.0 {
        return Err(Error::Invalid("disk normal must be nonzero".into()));
    }
    if !mu.is_c1() {
        return Err(Error::ClassViolation {
            context: "flux probes need a continuously differentiable density",
        });
    }
    if matches!(mu, Measure::Lebesgue) {
        return Ok(EvalResult::exact(0.0));
    }
    let vhat = geom::scale(v, 1.0 / vn);
    let n = v.len();
    match n {
        1 => Ok(EvalResult::exact(
            geom::dot(&mu.density_gradient(x), &vhat),
        )),
        2 => {
            let t = geom::rot90([vhat[0], vhat[1]]);
            let g = |s: f64| {
                let y = [x[0] + s * t[0], x[1] + s * t[1]];
                geom::dot(&mu.density_gradient(&y), &vhat)
            };
            let tol = 1e-12 * (1.0 + 2.0 * r);
            let val = quad::integrate_adaptive(&g, -r, r, tol);
            Ok(EvalResult::quadrature(val, tol))
        }
        3 => {
            // Orthonormal frame spanning the disk plane.
            let seed = if vhat[0].abs() < 0.9 {
                vec![1.0, 0.0, 0.0]
            } else {
                vec![0.0, 1.0, 0.0]
            };
            let mut b1 = geom::axpy(&seed, -geom::dot(&seed, &vhat), &vhat);
            b1 = geom::scale(&b1, 1.0 / geom::norm(&b1));
            let b2 = geom::cross3(&vhat, &b1);
            let integrand = |rho: f64, th: f64| {
                let y: Vec<f64> = (0..3)
                    .map(|i| x[i] + rho * (th.cos() * b1[i] + th.sin() * b2[i]))
                    .collect();
                geom::dot(&mu.density_gradient(&y), &vhat) * rho
            };
            let radial = |m: usize| -> f64 {
                quad::integrate(
                    &|rho: f64| {
                        quad::integrate(&|th: f64| integrand(rho, th), 0.0, std::f64::consts::TAU, m)
                    },
                    0.0,
                    r,
                    m,
                )
            };
            let coarse = radial(24);
            let fine = radial(32);
            Ok(EvalResult::quadrature(
                fine,
                (fine - coarse).abs().max(1e-13 * (1.0 + fine.abs())),
            ))
        }
        _ => Err(Error::UnsupportedCase(format!(
            "disk flux probes are implemented for n <= 3, not n = {n}"
        ))),
    }
}

/// Identity checks tying the mixed quantities of a homogeneous measure to
/// plain masses: dilation scaling of the first mixed quantity, the
/// self-perturbation reductions in both orders, and the recovery of the mass
/// from dilated first mixed quantities by a Gauss grid in the dilation.
pub fn homogeneity_suite(
    mu: &Measure,
    a: &Body,
    b: &Body,
    c: &Body,
    schedule: &FdSchedule,
) -> Result<Vec<InequalityReport>> {
    mu.validate()?;
    check_dims(&[a.dim(), b.dim(), c.dim()])?;
    let n = a.dim();
    let alpha = mu.alpha_homogeneity(n).ok_or(Error::ClassViolation {
        context: "the homogeneity suite needs a positively homogeneous measure",
    })?;
    let mass = measures::measure(mu, a)?;
    let mut out = Vec::new();

    // mu(tA; B) = t^(alpha-1) mu(A; B).
    let t = 1.5;
    let lhs = mixed1_fd(mu, &a.dilate(t)?, b, schedule)?;
    let rhs = mixed1_fd(mu, a, b, schedule)?.scale(t.powf(alpha - 1.0));
    out.push(InequalityReport::identity(
        "dilation-scaling-first-mixed",
        &format!("{} with dilation t = {t}", mu.name()),
        lhs,
        rhs,
    ));

    // mu(A; A) = alpha mu(A).
    let lhs = mixed1_fd(mu, a, a, schedule)?;
    out.push(InequalityReport::identity(
        "self-perturbation-first-order",
        &mu.name(),
        lhs,
        mass.scale(alpha),
    ));

    // mu(A; A, C) = (alpha - 1) mu(A; C).
    let lhs = mixed2_fd(mu, a, a, c, schedule)?;
    let rhs = mixed1_fd(mu, a, c, schedule)?.scale(alpha - 1.0);
    out.push(InequalityReport::identity(
        "self-perturbation-second-order",
        &mu.name(),
        lhs,
        rhs,
    ));

    // mu(A; A, A) = alpha (alpha - 1) mu(A).
    let lhs = mixed2_fd(mu, a, a, a, schedule)?;
    out.push(InequalityReport::identity(
        "double-self-perturbation",
        &mu.name(),
        lhs,
        mass.scale(alpha * (alpha - 1.0)),
    ));

    // mu(A) = integral over [0,1] of mu(tA; A) dt, on a 33-node Gauss grid.
    let rule = quad::gauss_legendre(33);
    let mut integral = 0.0;
    let mut ierr = 0.0;
    for (node, weight) in rule.nodes.iter().zip(&rule.weights) {
        let tk = 0.5 * (node + 1.0);
        let w = 0.5 * weight;
        let m = mixed1_fd(mu, &a.dilate(tk)?, a, schedule)?;
        integral += w * m.value;
        ierr += w * m.abs_error;
    }
    out.push(InequalityReport::identity(
        "mass-from-dilated-perturbations",
        &mu.name(),
        mass,
        EvalResult::fd(integral, ierr),
    ));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Method;
    use crate::reports::Verdict;
    use std::f64::consts::TAU;

    fn unit_square() -> Body {
        Body::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    fn centered_square() -> Body {
        Body::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn lebesgue_self_mixed_of_square_is_twice_area() {
        let k = unit_square();
        let got = mixed1_fd(&Measure::Lebesgue, &k, &k, &FdSchedule::default()).unwrap();
        assert!((got.value - 2.0).abs() < 1e-9, "{}", got.value);
        assert_eq!(got.method, Method::FdExtrapolated);
    }

    #[test]
    fn lebesgue_square_segment_mixed_is_one() {
        let k = unit_square();
        let l = Body::segment(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let got = mixed1_fd(&Measure::Lebesgue, &k, &l, &FdSchedule::default()).unwrap();
        assert!((got.value - 1.0).abs() < 1e-9);
        let formula = mixed1_formula(&Measure::Lebesgue, &k, &l).unwrap();
        assert!((formula.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed1_formula_matches_volume_polarization() {
        // 2 V(K, L) = vol(K+L) - vol(K) - vol(L) in the plane.
        let k = Body::polytope(vec![
            vec![0.0, 0.0],
            vec![2.0, 0.2],
            vec![1.7, 1.9],
            vec![0.1, 1.4],
        ])
        .unwrap();
        let l = Body::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.3, 0.8]]).unwrap();
        let got = mixed1_formula(&Measure::Lebesgue, &k, &l).unwrap();
        let vol = |b: &Body| measures::measure(&Measure::Lebesgue, b).unwrap().value;
        let polarized = vol(&k.minkowski_sum(&l).unwrap()) - vol(&k) - vol(&l);
        assert!((got.value - polarized).abs() < 1e-9);
    }

    #[test]
    fn fd_and_formula_agree_for_gaussian_disk_against_square() {
        let k = Body::ball(vec![0.2, -0.1], 1.3).unwrap();
        let l = centered_square();
        let fd = mixed1_fd(&Measure::Gaussian, &k, &l, &FdSchedule::default()).unwrap();
        let formula = mixed1_formula(&Measure::Gaussian, &k, &l).unwrap();
        let tol = 1e-6 + 3.0 * (fd.abs_error + formula.abs_error);
        assert!(
            (fd.value - formula.value).abs() <= tol,
            "{} vs {} (tol {tol})",
            fd.value,
            formula.value
        );
    }

    #[test]
    fn weighted_surface_area_fd_matches_formula_for_quadratic_weight() {
        let mu = Measure::RadialPower { p: 2.0 };
        let k = centered_square();
        let fd = weighted_surface_area_fd(&mu, &k, &FdSchedule::default()).unwrap();
        assert!(
            (fd.value - 32.0 / 3.0).abs() < 1e-6 + 3.0 * fd.abs_error,
            "{}",
            fd.value
        );
    }

    #[test]
    fn planar_lebesgue_second_mixed_is_independent_of_base_body() {
        let b = Body::segment(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let c = Body::segment(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let schedule = FdSchedule::default();
        for a in [
            unit_square(),
            Body::ball(vec![0.5, 0.5], 0.8).unwrap(),
            Body::polytope(vec![vec![0.0, 0.0], vec![3.0, 0.1], vec![1.0, 2.0]]).unwrap(),
        ] {
            let got = mixed2_fd(&Measure::Lebesgue, &a, &b, &c, &schedule).unwrap();
            assert!(
                (got.value - 1.0).abs() < 1e-7 + 3.0 * got.abs_error,
                "{}",
                got.value
            );
        }
    }

    #[test]
    fn second_mixed_fd_is_symmetric_and_matches_formula() {
        let a = Body::polytope(vec![
            vec![0.1, 0.0],
            vec![1.8, 0.3],
            vec![2.0, 1.6],
            vec![0.6, 2.1],
        ])
        .unwrap();
        let b = Body::polytope(vec![vec![0.0, 0.0], vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let c = Body::segment(vec![-0.4, -0.2], vec![0.4, 0.6]).unwrap();
        let schedule = FdSchedule {
            two_sided: true,
            ..FdSchedule::default()
        };
        let bc = mixed2_fd(&Measure::Gaussian, &a, &b, &c, &schedule).unwrap();
        let cb = mixed2_fd(&Measure::Gaussian, &a, &c, &b, &schedule).unwrap();
        let tol = 1e-5 + 3.0 * (bc.abs_error + cb.abs_error);
        assert!((bc.value - cb.value).abs() <= tol);
        let formula = mixed2_formula(&Measure::Gaussian, &a, &b, &c).unwrap();
        let tol = 1e-5 + 3.0 * (bc.abs_error + formula.abs_error);
        assert!(
            (bc.value - formula.value).abs() <= tol,
            "{} vs {}",
            bc.value,
            formula.value
        );
    }

    #[test]
    fn gaussian_ball_against_centered_segments_is_negative() {
        // The headline sign example: the second self-perturbation of a large
        // centered disk by a centered segment is strictly negative.
        let r = 3.0;
        let a = Body::ball(vec![0.0, 0.0], r).unwrap();
        let b = Body::segment(vec![-1.0, 0.0], vec![1.0, 0.0]).unwrap();
        let got = mixed2_formula(&Measure::Gaussian, &a, &b, &b).unwrap();
        let expected = -r * r * (-0.5 * r * r).exp() / 2.0;
        assert!((got.value - expected).abs() < 1e-9, "{}", got.value);
        assert!(got.value < 0.0 && got.value.abs() > 3.0 * got.abs_error);
        // FD route agrees in sign and value.
        let fd = mixed2_fd(&Measure::Gaussian, &a, &b, &b, &FdSchedule::default()).unwrap();
        assert!(
            (fd.value - expected).abs() < 1e-4 + 3.0 * fd.abs_error,
            "{} vs {expected}",
            fd.value
        );
    }

    #[test]
    fn segment_form_is_bilinear_in_the_last_slot() {
        let mu = Measure::RadialPower { p: 2.0 };
        let a = centered_square();
        let v = [0.0, 1.0];
        let c1 = Body::unit_ball(2);
        let c2 = Body::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let combined = Body::scaled_sum(&[(2.0, c1.clone()), (3.0, c2.clone())]).unwrap();
        let m1 = mixed2_segment(&mu, &a, &v, &c1).unwrap();
        let m2 = mixed2_segment(&mu, &a, &v, &c2).unwrap();
        let mc = mixed2_segment(&mu, &a, &v, &combined).unwrap();
        let want = 2.0 * m1.value + 3.0 * m2.value;
        assert!(
            (mc.value - want).abs() <= 1e-9 + 3.0 * (mc.abs_error + 2.0 * m1.abs_error + 3.0 * m2.abs_error),
            "{} vs {want}",
            mc.value
        );
    }

    #[test]
    fn quadratic_weight_vertical_segment_sweep_is_positive() {
        // The regime where adding a symmetric segment grows the weighted
        // perimeter: positive sweep value for |x|^2 on a centered square.
        let mu = Measure::RadialPower { p: 2.0 };
        let got = mixed2_segment(&mu, &centered_square(), &[0.0, 1.0], &Body::unit_ball(2)).unwrap();
        assert!(got.value > 3.0 * got.abs_error, "{}", got.value);
    }

    #[test]
    fn lebesgue_segment_sweep_counts_the_side_boundary() {
        // Flat density, A = unit square, v = e2: only the two vertical sides
        // survive, each contributing its length.
        let got = mixed2_segment(
            &Measure::Lebesgue,
            &unit_square(),
            &[0.0, 1.0],
            &Body::unit_ball(2),
        )
        .unwrap();
        assert!((got.value - 2.0).abs() < 1e-12, "{}", got.value);
    }

    #[test]
    fn one_dimensional_second_mixed_matches_fd() {
        let a = Body::interval(-0.7, 1.2);
        let b = Body::interval(0.0, 1.0);
        let c = Body::interval(-0.5, 0.5);
        let formula = mixed2_formula(&Measure::Gaussian, &a, &b, &c).unwrap();
        let fd = mixed2_fd(&Measure::Gaussian, &a, &b, &c, &FdSchedule::default()).unwrap();
        assert!(
            (formula.value - fd.value).abs() < 1e-7 + 3.0 * fd.abs_error,
            "{} vs {}",
            formula.value,
            fd.value
        );
    }

    #[test]
    fn lebesgue_disk_flux_vanishes_exactly() {
        let got = disk_normal_flux(&Measure::Lebesgue, &[1.0, 0.0], 0.5, &[1.0, 0.0]).unwrap();
        assert_eq!(got.value, 0.0);
        assert_eq!(got.method, Method::Exact);
    }

    #[test]
    fn gaussian_disk_flux_off_center_matches_closed_form() {
        // Flux of the Gaussian gradient through the vertical segment at
        // x1 = 1: the x1-derivative integrates to -phi(1) * (Phi(1/2)-Phi(-1/2))
        // ... computed directly: integral of -x1 g(x) over the segment.
        let r = 0.5;
        let got = disk_normal_flux(&Measure::Gaussian, &[1.0, 0.0], r, &[1.0, 0.0]).unwrap();
        // Closed form: -(2 Phi(r) - 1) * exp(-1/2) / sqrt(2 pi).
        let expected = -((2.0 * crate::stats::normal_cdf(r) - 1.0) * (-0.5f64).exp())
            / (TAU).sqrt();
        assert!(
            (got.value - expected).abs() < 1e-10,
            "{} vs {expected}",
            got.value
        );
        assert!(got.value < -3.0 * got.abs_error);
    }

    #[test]
    fn centered_odd_flux_vanishes() {
        let got = disk_normal_flux(
            &Measure::RadialPower { p: 2.0 },
            &[1.0, 0.0],
            1.0,
            &[0.0, 0.0],
        )
        .unwrap();
        assert!(got.value.abs() < 1e-12);
    }

    #[test]
    fn flux_in_three_dimensions_matches_two_d_product_structure() {
        // Gaussian flux through a 2-disk: by factoring the density, the value
        // is -phi'(x1)-weighted disk mass = -x1 phi(x1) * (radial Gaussian
        // mass of the 2-disk).
        let r = 0.8;
        let x1 = 0.6;
        let got =
            disk_normal_flux(&Measure::Gaussian, &[1.0, 0.0, 0.0], r, &[x1, 0.0, 0.0]).unwrap();
        let planar_mass = 1.0 - (-0.5 * r * r).exp(); // 2-D standard Gaussian mass of r-disk
        let expected = -x1 * crate::stats::normal_pdf(x1) * planar_mass;
        assert!(
            (got.value - expected).abs() < 1e-9 + 3.0 * got.abs_error,
            "{} vs {expected}",
            got.value
        );
    }

    #[test]
    fn homogeneity_suite_holds_for_quadratic_weight() {
        // alpha = n + p = 4 in the plane for |x|^2.
        let mu = Measure::RadialPower { p: 2.0 };
        let a = centered_square();
        let b = Body::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.2], vec![0.3, 1.0]]).unwrap();
        let c = Body::unit_ball(2);
        let reports = homogeneity_suite(&mu, &a, &b, &c, &FdSchedule::default()).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            assert_eq!(
                r.verdict,
                Verdict::Holds,
                "{}: {} vs {} (budget {})",
                r.name,
                r.lhs.value,
                r.rhs.value,
                r.budget
            );
        }
        // Spot values: mu(A;A) = 4 mu(A) = 32/3 and mu(A;A,A) = 12 mu(A).
        let self1 = &reports[1];
        assert!((self1.lhs.value - 32.0 / 3.0).abs() < 1e-5);
        let self2 = &reports[3];
        assert!((self2.lhs.value - 32.0).abs() < 1e-3, "{}", self2.lhs.value);
    }

    #[test]
    fn lebesgue_homogeneity_spot_value() {
        let reports = homogeneity_suite(
            &Measure::Lebesgue,
            &unit_square(),
            &unit_square(),
            &Body::unit_ball(2),
            &FdSchedule::default(),
        )
        .unwrap();
        let self1 = &reports[1];
        assert!((self1.lhs.value - 2.0).abs() < 1e-8);
        for r in &reports {
            assert_eq!(r.verdict, Verdict::Holds, "{}", r.name);
        }
    }

    #[test]
    fn integral_identity_recovers_first_mixed_from_second() {
        // mu(A; C) equals the integral over t of mu(tA; A, C): check with
        // the sweep formula on a quadratic weight where both sides are cheap.
        let mu = Measure::RadialPower { p: 2.0 };
        let a = centered_square();
        let c = Body::unit_ball(2);
        let lhs = mixed1_formula(&mu, &a, &c).unwrap();
        let rule = quad::gauss_legendre(33);
        let mut integral = 0.0;
        let mut err = 0.0;
        for (node, weight) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * (node + 1.0);
            let w = 0.5 * weight;
            let at = a.dilate(t).unwrap();
            let shape = PlanarShape::from_body(&at).unwrap();
            // mu(tA; A, C) via the sweep with B = A.
            let bp = PlanarShape::from_body(&a).unwrap().poly;
            let m = surface::planar_mixed_value(&mu, &shape, &bp, &|x, y| {
                c.support(&[x, y]).unwrap()
            })
            .unwrap();
            integral += w * m.value;
            err += w * m.abs_error;
        }
        assert!(
            (lhs.value - integral).abs() <= 1e-9 + 3.0 * (lhs.abs_error + err),
            "{} vs {integral}",
            lhs.value
        );
    }

    #[test]
    fn inconclusive_when_the_quotients_do_not_contract() {
        // A measure evaluation that jumps around (simulated by a schedule too
        // coarse for the curvature of a rounded body at machine scale) should
        // refuse, not return garbage: feed richardson a non-contracting
        // series directly.
        let samples = [
            (0.2, 1.0, 1e-12),
            (0.1, 1.5, 1e-12),
            (0.05, 0.7, 1e-12),
            (0.025, 1.9, 1e-12),
        ];
        let err = richardson(&samples, 3);
        assert!(matches!(err, Err(Error::Inconclusive { .. })));
    }

    #[test]
    fn schedule_validation_rejects_bad_grids() {
        let bad = FdSchedule {
            epsilons: vec![0.1, 0.2, 0.3],
            order: 3,
            two_sided: false,
        };
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        let short = FdSchedule {
            epsilons: vec![0.1, 0.05],
            order: 3,
            two_sided: false,
        };
        assert!(matches!(short.validate(), Err(Error::Invalid(_))));
    }
}
