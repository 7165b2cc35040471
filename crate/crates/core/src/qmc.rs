//! Quasi-Monte-Carlo machinery: Halton low-discrepancy points, randomized
//! (Cranley-Patterson) shift replicates for defensible error bars, seed
//! splitting for thread-independent streams, and deterministic direction nets
//! on the sphere.

use crate::exec;
use crate::stats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bases for the Halton sequence: the first 16 primes (dimension cap 16).
pub const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Leading Halton points are skipped (they are strongly correlated across
/// bases at low indices).
pub const SKIP: u64 = 64;

/// Number of randomized-shift replicates used for the error estimate.
pub const REPLICATES: usize = 8;

/// Van der Corput radical inverse of `i` in the given base.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Derive an independent stream seed from a master seed and a task index
/// (splitmix64 of the golden-ratio-spread index). Deterministic and
/// independent of evaluation order or thread count.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy)]
pub struct QmcEstimate {
    pub value: f64,
    /// Standard error of the mean across the shift replicates.
    pub std_error: f64,
}

/// Integrate `f` over the axis box [lo, hi] with `points` Halton points per
/// replicate and [`REPLICATES`] Cranley-Patterson shifts drawn from the seed.
/// The reported error is the standard error across replicate estimates.
pub fn integrate_box<F>(f: &F, lo: &[f64], hi: &[f64], points: usize, seed: u64) -> QmcEstimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = lo.len();
    assert!(dim >= 1 && dim <= PRIMES.len(), "QMC dimension cap is {}", PRIMES.len());
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    if vol == 0.0 {
        return QmcEstimate { value: 0.0, std_error: 0.0 };
    }
    let estimates: Vec<f64> = exec::map_indexed(REPLICATES, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, r as u64));
        let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let mut acc = 0.0;
        let mut x = vec![0.0; dim];
        for i in 0..points {
            for d in 0..dim {
                let mut u = radical_inverse(i as u64 + SKIP, PRIMES[d]) + shift[d];
                if u >= 1.0 {
                    u -= 1.0;
                }
                x[d] = lo[d] + (hi[d] - lo[d]) * u;
            }
            acc += f(&x);
        }
        vol * acc / points as f64
    });
    let mean = estimates.iter().sum::<f64>() / REPLICATES as f64;
    let var = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
        / (REPLICATES - 1) as f64;
    QmcEstimate { value: mean, std_error: (var / REPLICATES as f64).sqrt() }
}

/// Deterministic direction net on the unit sphere: equally spaced angles in
/// the plane, Halton-seeded Gaussian directions in higher dimensions.
pub fn sphere_net(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(count);
            let mut i = 0u64;
            while out.len() < count {
                let g: Vec<f64> = (0..dim)
                    .map(|d| stats::normal_quantile(radical_inverse(i + SKIP, PRIMES[d % PRIMES.len()])))
                    .collect();
                i += 1;
                let n = crate::geom::norm(&g);
                if n > 1e-9 {
                    out.push(crate::geom::scale(&g, 1.0 / n));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base2_prefix() {
        // indices 1,2,3,4 in base 2: 0.5, 0.25, 0.75, 0.125
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(4, 2), 0.125);
    }

    #[test]
    fn box_integration_of_smooth_function() {
        // ∫∫ x y over [0,1]² = 1/4; error bar should cover the truth.
        let est = integrate_box(&|x: &[f64]| x[0] * x[1], &[0.0, 0.0], &[1.0, 1.0], 4096, 7);
        assert!((est.value - 0.25).abs() < 5e-4, "{}", est.value);
        assert!((est.value - 0.25).abs() <= 5.0 * est.std_error.max(1e-6));
    }

    #[test]
    fn deterministic_given_seed() {
        let f = |x: &[f64]| (x[0] + x[1]).sin();
        let a = integrate_box(&f, &[0.0, 0.0], &[1.0, 2.0], 512, 42);
        let b = integrate_box(&f, &[0.0, 0.0], &[1.0, 2.0], 512, 42);
        assert_eq!(a.value, b.value);
        assert_eq!(a.std_error, b.std_error);
        let c = integrate_box(&f, &[0.0, 0.0], &[1.0, 2.0], 512, 43);
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn sphere_net_is_unit_and_spread() {
        for dim in [2usize, 3, 4] {
            let net = sphere_net(dim, 128);
            assert_eq!(net.len(), 128);
            let mut mean = vec![0.0; dim];
            for u in &net {
                assert!((crate::geom::norm(u) - 1.0).abs() < 1e-12);
                mean = crate::geom::add(&mean, u);
            }
            // roughly balanced
            assert!(crate::geom::norm(&mean) / 128.0 < 0.2, "dim {dim}");
        }
    }
}
