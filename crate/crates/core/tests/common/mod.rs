#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiperiodic_core::{make_domain, Complex64, DomainSpec, Spectrum, TimePlan};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn domain(m: usize, n: usize) -> DomainSpec {
    // box half-width 16 pi gives d xi = 1/16
    make_domain(m, n, 6, 16.0 * std::f64::consts::PI, if m + n > 2 { 64 } else { 256 }, TimePlan::Uniform { points: 4 })
        .unwrap()
}

/// Gaussian coefficients on `|w| <= radius`.
pub fn random_spectrum(domain: &DomainSpec, radius: f64, rng: &mut impl Rng) -> Spectrum {
    Spectrum::from_fn(domain, |w| {
        if w.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn rel_diff(a: &Spectrum, b: &Spectrum) -> f64 {
    let num: f64 = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = a.coeffs.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    num / den
}
