//! Seeded random data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use semiperiodic_core::{Complex64, DomainSpec, NeighborhoodData, Spectrum};

/// Independent stream for scale `index`, trial `trial` of a seeded run.
pub fn scale_rng(seed: u64, index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((index as u64) << 32) | trial as u64);
    rng
}

/// Complex Gaussian with `E|z|^2 = 1`.
pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Gaussian coefficients on the frequencies accepted by `admissible`, zero elsewhere.
/// Coefficients are drawn in storage order; rejected frequencies draw nothing.
pub fn band_limited<F: Fn(&[f64]) -> bool>(domain: &DomainSpec, rng: &mut impl Rng, admissible: F) -> Spectrum {
    Spectrum::from_fn(domain, |w| if admissible(w) { gaussian(rng) } else { Complex64::new(0.0, 0.0) })
}

/// Frequencies in the closed ball of radius `r`.
pub fn ball(r: f64) -> impl Fn(&[f64]) -> bool {
    move |w| w.iter().map(|v| v * v).sum::<f64>() <= r * r + 1e-9
}

/// Frequencies with `r_in < |w| <= r_out`.
pub fn annulus(r_in: f64, r_out: f64) -> impl Fn(&[f64]) -> bool {
    move |w| {
        let s: f64 = w.iter().map(|v| v * v).sum();
        s > r_in * r_in && s <= r_out * r_out + 1e-9
    }
}

/// Unit-modulus random phases on every node, with vertical offsets uniform
/// in the open slab `|mu| < thickness / 2`.
pub fn random_phase_neighborhood(d: usize, points: usize, thickness: f64, rng: &mut impl Rng) -> NeighborhoodData {
    NeighborhoodData::from_fn(d, points, |_| {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let mu: f64 = rng.random_range(-0.5..0.5) * thickness;
        (Complex64::new(theta.cos(), theta.sin()), mu)
    })
}
