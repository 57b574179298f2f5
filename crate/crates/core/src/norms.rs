//! Lebesgue, mixed space-time, Sobolev, modulation and Littlewood–Paley
//! quantities.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::axis::{check_exponent, lp_of_samples, Axis, AxisSpectrum};
use crate::domain::{unravel, DomainSpec, TimeNodes, TimePlan};
use crate::error::{Error, Result};
use crate::fft::{map_lines, Fft};
use crate::field::{to_field, to_spectrum, Field, Spectrum};
use crate::math::*;
use crate::propagator::{EvolutionSlices, Trajectory};
use crate::quadrature::SmoothStep;
use crate::tensor::TensorSpectrum;

/// Exponent bundle; `inf` is allowed for `p`, `q`, `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
}

impl NormParams {
    pub fn validate(&self) -> Result<()> {
        check_exponent(self.p)?;
        check_exponent(self.q)?;
        check_exponent(self.r)?;
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidExponent(format!("regularity must be finite and >= 0, got {}", self.alpha)));
        }
        Ok(())
    }
}

pub fn lp_space_norm(f: &Field, p: f64) -> Result<f64> {
    f.lp_norm(p)
}

/// Streaming `L^q_{x,y} L^r_t` norm: push weighted time slices, then finish.
#[derive(Debug, Clone)]
pub struct MixedNormAccumulator {
    q: f64,
    r: f64,
    cell: f64,
    shape: Vec<usize>,
    acc: Vec<f64>,
    slices: usize,
}

impl MixedNormAccumulator {
    pub fn new(domain: &DomainSpec, q: f64, r: f64) -> Result<Self> {
        check_exponent(q)?;
        check_exponent(r)?;
        Ok(Self {
            q,
            r,
            cell: domain.cell_volume(),
            shape: domain.spatial_shape(),
            acc: alloc::vec![0.0; domain.spatial_len()],
            slices: 0,
        })
    }

    pub fn push(&mut self, weight: f64, field: &Field) -> Result<()> {
        if field.domain.spatial_shape() != self.shape {
            return Err(Error::ShapeMismatch { expected: self.acc.len(), actual: field.samples.len() });
        }
        if self.r.is_infinite() {
            for (a, v) in self.acc.iter_mut().zip(&field.samples) {
                *a = a.max(v.norm());
            }
        } else {
            for (a, v) in self.acc.iter_mut().zip(&field.samples) {
                *a += weight * pow_abs(v.norm(), self.r);
            }
        }
        self.slices += 1;
        Ok(())
    }

    /// Combines two accumulators over disjoint time sets.
    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.acc.iter_mut().zip(&other.acc) {
            if self.r.is_infinite() {
                *a = a.max(*b);
            } else {
                *a += b;
            }
        }
        self.slices += other.slices;
    }

    pub fn finish(&self) -> Result<f64> {
        if self.slices == 0 {
            return Err(Error::InvalidTimePlan("no time slices were accumulated".into()));
        }
        let inner = |a: f64| if self.r.is_infinite() { a } else { a.powf(1.0 / self.r) };
        if self.q.is_infinite() {
            return Ok(self.acc.iter().map(|a| inner(*a)).fold(0.0, f64::max));
        }
        let s: f64 = if self.q == self.r {
            self.acc.iter().sum()
        } else {
            self.acc.iter().map(|a| pow_abs(inner(*a), self.q)).sum()
        };
        Ok((s * self.cell).powf(1.0 / self.q))
    }
}

/// Inner `L^r` in time with the trajectory weights, outer `L^q` in space.
pub fn mixed_norm(traj: &Trajectory, q: f64, r: f64) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::InvalidTimePlan("empty trajectory".into()));
    }
    let mut acc = MixedNormAccumulator::new(&traj.domain, q, r)?;
    for (w, f) in traj.weights.iter().zip(&traj.fields) {
        acc.push(*w, f)?;
    }
    acc.finish()
}

/// [`mixed_norm`] of the evolution of `spectrum`, one time slice in memory at a time.
pub fn evolution_mixed_norm(spectrum: &Spectrum, plan: &TimePlan, q: f64, r: f64) -> Result<f64> {
    let nodes = plan.nodes()?;
    let mut acc = MixedNormAccumulator::new(&spectrum.domain, q, r)?;
    for (_, w, f) in EvolutionSlices::new(spectrum, nodes) {
        acc.push(w, &f)?;
    }
    acc.finish()
}

/// `L^p` space-time norm of the evolution of tensor data, using
/// `||prod f_a||_p^p = prod ||f_a||_p^p` at every time node.
pub fn tensor_space_time_norm(data: &TensorSpectrum, nodes: &TimeNodes, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if nodes.is_empty() {
        return Err(Error::InvalidTimePlan("empty time plan".into()));
    }
    let plans: Vec<Fft> = data.factors.iter().map(|f| f.axis.plan()).collect();
    let mut acc = 0.0;
    let mut sup: f64 = 0.0;
    for (t, w) in nodes.iter() {
        let mut slice = 1.0;
        for (f, plan) in data.factors.iter().zip(&plans) {
            let v = f.propagate(t).to_field_with(plan);
            slice *= if p.is_infinite() { v.sup() } else { pow_abs(v.lp_norm(p)?, p) };
        }
        if p.is_infinite() {
            sup = sup.max(slice);
        } else {
            acc += w * slice;
        }
    }
    Ok(if p.is_infinite() { sup } else { acc.powf(1.0 / p) })
}

/// Multiplies by `(1 + |k|^2 + |xi|^2)^{alpha/2}`.
pub fn bessel_multiplier(spectrum: &Spectrum, alpha: f64) -> Spectrum {
    if alpha == 0.0 {
        return spectrum.clone();
    }
    spectrum.multiply(|w| {
        let s: f64 = w.iter().map(|v| v * v).sum();
        Complex64::new((1.0 + s).powf(0.5 * alpha), 0.0)
    })
}

/// `||(1 - Delta)^{alpha/2} f||_{L^p}`.
pub fn sobolev_norm(f: &Field, alpha: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidExponent(format!("regularity must be finite and >= 0, got {alpha}")));
    }
    if alpha == 0.0 {
        return f.lp_norm(p);
    }
    let g = bessel_multiplier(&to_spectrum(f)?, alpha);
    to_field(&g)?.lp_norm(p)
}

/// Sobolev norm of tensor data: factored for `alpha = 0`, dense otherwise.
pub fn tensor_sobolev_norm(data: &TensorSpectrum, alpha: f64, p: f64) -> Result<f64> {
    if alpha == 0.0 {
        return data.to_field().lp_norm(p);
    }
    sobolev_norm(&to_field(&data.to_dense())?, alpha, p)
}

/// The unit-cube partition `sigma_K = sigma_0(. - K)`.
///
/// `sigma_0 = b / sum_K b(. - K)` where `b` is a product of mollified indicators
/// of `[-5/8, 5/8]` with mollifier width `1/16`, so that `sigma_0` is a product
/// of one-dimensional factors supported in `[-11/16, 11/16]`.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    step: SmoothStep,
    pub plateau: f64,
    pub width: f64,
}

pub fn build_partition(domain: &DomainSpec) -> Result<PartitionOfUnity> {
    let pou = PartitionOfUnity { step: SmoothStep::new(), plateau: 0.625, width: 0.0625 };
    if domain.dxi() > pou.width + 1e-15 {
        return Err(Error::Resolution(format!(
            "frequency spacing {} does not resolve the partition scale {}",
            domain.dxi(),
            pou.width
        )));
    }
    Ok(pou)
}

impl PartitionOfUnity {
    /// Support half-width of the one-dimensional generator.
    pub fn radius(&self) -> f64 {
        self.plateau + self.width
    }

    fn b(&self, x: f64) -> f64 {
        self.step.mollified_indicator(x, self.plateau, self.width)
    }

    /// One-dimensional generator `b(x) / sum_k b(x - k)`.
    pub fn generator(&self, x: f64) -> f64 {
        let bx = self.b(x);
        if bx == 0.0 {
            return 0.0;
        }
        let base = x.round();
        let mut total = 0.0;
        for j in -1..=1 {
            total += self.b(x - (base + j as f64));
        }
        bx / total
    }

    /// `sigma_0(xi - K)`.
    pub fn sigma(&self, cube: &[i64], freq: &[f64]) -> f64 {
        cube.iter().zip(freq).map(|(k, w)| self.generator(w - *k as f64)).product()
    }

    /// Generator values on one axis of the frequency grid.
    pub fn generator_samples(&self, axis: &Axis, shift: i64) -> Vec<f64> {
        (0..axis.spectral_len()).map(|i| self.generator(axis.frequency(i) - shift as f64)).collect()
    }

    /// `sum_K sigma_K(xi)` over the cubes that can touch `xi`.
    pub fn sum_at(&self, freq: &[f64]) -> f64 {
        freq.iter()
            .map(|w| {
                let base = w.round() as i64;
                (base - 1..=base + 1).map(|k| self.generator(w - k as f64)).sum::<f64>()
            })
            .product()
    }
}

/// Per-axis range of cube indices `K_a` whose cubes meet the frequency grid,
/// one shell beyond the spectral cutoff.
pub fn cube_range(axis: &Axis) -> (i64, i64) {
    let top = axis.max_frequency().ceil() as i64 + 1;
    let bottom = (axis.frequency(0)).floor() as i64 - 1;
    (bottom, top)
}

fn check_cube(domain: &DomainSpec, cube: &[i64]) -> Result<()> {
    if cube.len() != domain.dimension() {
        return Err(Error::Dimension(format!("cube index has {} entries, domain has {}", cube.len(), domain.dimension())));
    }
    for (k, a) in cube.iter().zip(domain.axes()) {
        let (lo, hi) = cube_range(&a);
        if *k < lo || *k > hi {
            return Err(Error::OutOfRange(format!("cube index {k} outside resolved range [{lo}, {hi}]")));
        }
    }
    Ok(())
}

/// `sigma_K f^` as coefficients.
pub fn box_project_spectrum(spectrum: &Spectrum, cube: &[i64], pou: &PartitionOfUnity) -> Result<Spectrum> {
    check_cube(&spectrum.domain, cube)?;
    Ok(spectrum.multiply(|w| Complex64::new(pou.sigma(cube, w), 0.0)))
}

/// `box_K f`, the Fourier restriction to the `K`-th unit cube.
pub fn box_project(f: &Field, cube: &[i64], pou: &PartitionOfUnity) -> Result<Field> {
    let s = box_project_spectrum(&to_spectrum(f)?, cube, pou)?;
    to_field(&s)
}

fn bracket(cube: &[i64]) -> f64 {
    (1.0 + cube.iter().map(|k| (*k * *k) as f64).sum::<f64>()).sqrt()
}

fn lq_sum(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|v| pow_abs(v, q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Oversampling factor for the reduced band grids used by the modulation norm.
pub const BAND_OVERSAMPLE: usize = 4;

/// Evaluates `||box_K f||_{L^p}` for every nonzero cube on a reduced grid:
/// the coefficients meeting the cube are shifted to baseband and transformed on
/// a small zero-padded grid. Torus axes carry a single mode per cube.
fn cube_norms(spectrum: &Spectrum, p: f64, pou: &PartitionOfUnity) -> Result<Vec<(Vec<i64>, f64)>> {
    check_exponent(p)?;
    let d = &spectrum.domain;
    let shape = d.spectral_shape();
    let axes = d.axes();
    let ranges: Vec<(i64, i64)> = axes.iter().map(cube_range).collect();
    let counts: Vec<usize> = ranges.iter().map(|(a, b)| (b - a + 1) as usize).collect();
    let total: usize = counts.iter().product();
    let radius = pou.radius();
    let mut out = Vec::new();
    let torus_factor = if p.is_infinite() { 1.0 } else { TAU.powf(d.m as f64 / p) };
    for flat in 0..total {
        let cube: Vec<i64> = unravel(flat, &counts).iter().zip(&ranges).map(|(i, r)| r.0 + *i as i64).collect();
        // index windows per axis
        let mut windows: Vec<Vec<usize>> = Vec::with_capacity(axes.len());
        let mut empty = false;
        for (a, (axis, k)) in axes.iter().zip(&cube).enumerate() {
            let w: Vec<usize> = if a < d.m {
                axis.index_of(*k).into_iter().collect()
            } else {
                (0..shape[a]).filter(|&i| (axis.frequency(i) - *k as f64).abs() < radius).collect()
            };
            if w.is_empty() {
                empty = true;
                break;
            }
            windows.push(w);
        }
        if empty {
            continue;
        }
        let block_shape: Vec<usize> = windows.iter().map(|w| w.len()).collect();
        let block_len: usize = block_shape.iter().product();
        let mut block = Vec::with_capacity(block_len);
        let mut any = false;
        for b in 0..block_len {
            let idx = unravel(b, &block_shape);
            let mut src = 0;
            let mut sig = 1.0;
            for (a, i) in idx.iter().enumerate() {
                let full = windows[a][*i];
                src = src * shape[a] + full;
                sig *= pou.generator(axes[a].frequency(full) - cube[a] as f64);
            }
            let v = spectrum.coeffs[src] * sig;
            any |= v != Complex64::new(0.0, 0.0);
            block.push(v);
        }
        if !any {
            continue;
        }
        let norm = band_norm(&block, &block_shape[d.m..], d.euclid_axis(), p)? * torus_factor;
        out.push((cube, norm));
    }
    Ok(out)
}

/// `L^p` norm over the Euclidean box of the function with the given block of
/// consecutive frequency coefficients (torus axes of length 1 in front).
fn band_norm(block: &[Complex64], euclid_shape: &[usize], axis: Axis, p: f64) -> Result<f64> {
    let (halfwidth, dxi) = match axis {
        Axis::Euclid { halfwidth, .. } => (halfwidth, axis.frequency_step()),
        Axis::Torus { .. } => return Err(Error::Dimension("expected a euclidean axis".into())),
    };
    let n = euclid_shape.len();
    let mut shape = euclid_shape.to_vec();
    let mut data = block.to_vec();
    for a in 0..n {
        let len = shape[a];
        let big = (BAND_OVERSAMPLE * len).next_power_of_two().max(2);
        let fft = Fft::new(big)?;
        data = map_lines(&data, &shape, a, big, |src, dst| {
            dst[..len].copy_from_slice(src);
            fft.inverse(dst);
        });
        shape[a] = big;
    }
    let scale = dxi.powi(n as i32);
    for v in data.iter_mut() {
        *v *= scale;
    }
    let cell: f64 = shape.iter().map(|s| 2.0 * halfwidth / *s as f64).product();
    lp_of_samples(&data, cell, p)
}

/// `(sum_K <K>^{q alpha} ||box_K f||_p^q)^{1/q}` over the resolved cube range.
pub fn modulation_norm(f: &Field, p: f64, q: f64, alpha: f64) -> Result<f64> {
    modulation_norm_spectrum(&to_spectrum(f)?, p, q, alpha)
}

pub fn modulation_norm_spectrum(spectrum: &Spectrum, p: f64, q: f64, alpha: f64) -> Result<f64> {
    NormParams { p, q, r: 1.0, alpha }.validate()?;
    let pou = build_partition(&spectrum.domain)?;
    let terms = cube_norms(spectrum, p, &pou)?;
    Ok(lq_sum(terms.iter().map(|(k, v)| bracket(k).powf(alpha) * v), q))
}

/// Modulation norm by full-grid projections, one inverse transform per cube.
/// Slow; meant as an independent check of [`modulation_norm`].
pub fn modulation_norm_direct(f: &Field, p: f64, q: f64, alpha: f64) -> Result<f64> {
    NormParams { p, q, r: 1.0, alpha }.validate()?;
    let s = to_spectrum(f)?;
    let pou = build_partition(&f.domain)?;
    let axes = f.domain.axes();
    let ranges: Vec<(i64, i64)> = axes.iter().map(cube_range).collect();
    let counts: Vec<usize> = ranges.iter().map(|(a, b)| (b - a + 1) as usize).collect();
    let total: usize = counts.iter().product();
    let mut terms = Vec::new();
    for flat in 0..total {
        let cube: Vec<i64> = unravel(flat, &counts).iter().zip(&ranges).map(|(i, r)| r.0 + *i as i64).collect();
        let piece = box_project_spectrum(&s, &cube, &pou)?;
        if piece.coeffs.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        terms.push(bracket(&cube).powf(alpha) * to_field(&piece)?.lp_norm(p)?);
    }
    Ok(lq_sum(terms.into_iter(), q))
}

/// Modulation norm of tensor data: `box_K` factors, so
/// `||box_K f||_p = prod_a ||box_{K_a} f_a||_p`.
pub fn tensor_modulation_norm(data: &TensorSpectrum, p: f64, q: f64, alpha: f64) -> Result<f64> {
    NormParams { p, q, r: 1.0, alpha }.validate()?;
    let pou = build_partition(&data.domain)?;
    let per_axis: Vec<Vec<(i64, f64)>> =
        data.factors.iter().map(|f| axis_cube_norms(f, p, &pou)).collect::<Result<_>>()?;
    let counts: Vec<usize> = per_axis.iter().map(|v| v.len()).collect();
    if counts.iter().any(|c| *c == 0) {
        return Ok(0.0);
    }
    let total: usize = counts.iter().product();
    let mut cube = alloc::vec![0i64; counts.len()];
    let terms = (0..total).map(|flat| {
        let mut v = 1.0;
        for (a, i) in unravel(flat, &counts).into_iter().enumerate() {
            cube[a] = per_axis[a][i].0;
            v *= per_axis[a][i].1;
        }
        bracket(&cube).powf(alpha) * v
    });
    Ok(lq_sum(terms, q))
}

/// `(K, ||box_K f||_{L^p})` for one factor, nonzero pieces only.
pub fn axis_cube_norms(f: &AxisSpectrum, p: f64, pou: &PartitionOfUnity) -> Result<Vec<(i64, f64)>> {
    check_exponent(p)?;
    let (lo, hi) = cube_range(&f.axis);
    let mut out = Vec::new();
    for k in lo..=hi {
        let v = match f.axis {
            Axis::Torus { .. } => match f.axis.index_of(k) {
                Some(i) => {
                    let c = f.coeffs[i].norm();
                    if p.is_infinite() {
                        c
                    } else {
                        c * TAU.powf(1.0 / p)
                    }
                }
                None => 0.0,
            },
            Axis::Euclid { .. } => {
                let idx: Vec<usize> = (0..f.coeffs.len())
                    .filter(|&i| (f.axis.frequency(i) - k as f64).abs() < pou.radius())
                    .collect();
                let block: Vec<Complex64> =
                    idx.iter().map(|&i| f.coeffs[i] * pou.generator(f.axis.frequency(i) - k as f64)).collect();
                if block.iter().all(|c| c.norm() == 0.0) {
                    0.0
                } else {
                    band_norm(&block, &[block.len()], f.axis, p)?
                }
            }
        };
        if v > 0.0 {
            out.push((k, v));
        }
    }
    Ok(out)
}

/// Telescoping radial family `psi_0 = Theta`, `psi_j = Theta(2^-j .) - Theta(2^-j+1 .)`
/// with `Theta = 1` on `|.| <= 1` and `Theta = 0` on `|.| >= 2`.
#[derive(Debug, Clone)]
pub struct DyadicFamily {
    step: SmoothStep,
    /// Highest level `J`; `sum_{j <= J} psi_j = 1` on `|.| <= 2^J`.
    pub levels: usize,
}

/// Family with enough levels to cover every grid frequency of `domain`.
pub fn build_dyadic_family(domain: &DomainSpec) -> DyadicFamily {
    let rmax: f64 = domain.axes().iter().map(|a| {
        let m = a.max_frequency().max(a.frequency(0).abs());
        m * m
    }).sum::<f64>().sqrt();
    let levels = if rmax <= 1.0 { 0 } else { rmax.log2().ceil() as usize };
    DyadicFamily { step: SmoothStep::new(), levels }
}

impl DyadicFamily {
    pub fn theta(&self, r: f64) -> f64 {
        self.step.mollified_indicator(r, 1.5, 0.5)
    }

    pub fn psi(&self, j: usize, r: f64) -> f64 {
        if j == 0 {
            self.theta(r)
        } else {
            let s = (j as f64).exp2();
            self.theta(r / s) - self.theta(2.0 * r / s)
        }
    }
}

fn radius(w: &[f64]) -> f64 {
    w.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn lp_project_spectrum(spectrum: &Spectrum, j: usize, family: &DyadicFamily) -> Result<Spectrum> {
    if j > family.levels {
        return Err(Error::OutOfRange(format!("level {j} exceeds the resolved range 0..={}", family.levels)));
    }
    Ok(spectrum.multiply(|w| Complex64::new(family.psi(j, radius(w)), 0.0)))
}

/// `P_j f`, the multiplier `psi_j(|(k, xi)|)`.
pub fn lp_project(f: &Field, j: usize, family: &DyadicFamily) -> Result<Field> {
    to_field(&lp_project_spectrum(&to_spectrum(f)?, j, family)?)
}

/// `(sum_j |P_j f|^2)^{1/2}` at every grid node.
pub fn square_function(f: &Field, family: &DyadicFamily) -> Result<Field> {
    let s = to_spectrum(f)?;
    let mut acc = alloc::vec![0.0; f.samples.len()];
    for j in 0..=family.levels {
        let pj = to_field(&lp_project_spectrum(&s, j, family)?)?;
        for (a, v) in acc.iter_mut().zip(&pj.samples) {
            *a += v.norm_sqr();
        }
    }
    Field::new(f.domain.clone(), acc.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::make_domain;
    use crate::propagator::evolve_trajectory;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> DomainSpec {
        // d xi = 1/16 exactly resolves the partition
        make_domain(1, 1, 4, 16.0 * core::f64::consts::PI, 128, TimePlan::Uniform { points: 8 }).unwrap()
    }

    fn random_band(d: &DomainSpec, seed: u64, radius: f64) -> Spectrum {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Spectrum::from_fn(d, |w| {
            let a: f64 = rng.random_range(-1.0..1.0);
            let b: f64 = rng.random_range(-1.0..1.0);
            if w.iter().all(|v| v.abs() <= radius) {
                Complex64::new(a, b)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn partition_sums_to_one() {
        let d = small();
        let pou = build_partition(&d).unwrap();
        for flat in 0..d.spectral_len() {
            let w = d.frequency_of(flat);
            assert!((pou.sum_at(&w) - 1.0).abs() < 1e-12);
        }
        assert!(pou.generator(0.0) > 0.99);
        assert_eq!(pou.generator(0.75), 0.0);
        assert_eq!(pou.generator(-0.8), 0.0);
        assert_eq!(pou.generator(1.0), 0.0);
        // integers see a single cube
        assert_eq!(pou.generator(0.0), 1.0);
    }

    #[test]
    fn partition_needs_fine_grid() {
        let d = make_domain(1, 1, 4, 8.0, 64, TimePlan::instant()).unwrap();
        assert!(matches!(build_partition(&d), Err(Error::Resolution(_))));
    }

    #[test]
    fn cubes_reconstruct() {
        let d = small();
        let s = random_band(&d, 1, 1.6);
        let pou = build_partition(&d).unwrap();
        let mut sum = Spectrum::zeros(&d);
        for k0 in -5..=5 {
            for k1 in -5..=5 {
                sum = sum.add(&box_project_spectrum(&s, &[k0, k1], &pou).unwrap()).unwrap();
            }
        }
        let a = to_field(&sum).unwrap();
        let b = to_field(&s).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10 * b.sup());
    }

    #[test]
    fn reduced_band_matches_direct() {
        let d = small();
        let f = to_field(&random_band(&d, 2, 1.3)).unwrap();
        for (p, q, alpha) in [(2.0, 2.0, 0.0), (4.0, 1.0, 0.0), (3.0, 2.0, 1.5), (4.0, 3.0, 0.5)] {
            let a = modulation_norm(&f, p, q, alpha).unwrap();
            let b = modulation_norm_direct(&f, p, q, alpha).unwrap();
            assert!((a - b).abs() < 1e-9 * b, "p={p} q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn modulation_l2_comparable() {
        let d = small();
        let f = to_field(&random_band(&d, 3, 1.8)).unwrap();
        let m = modulation_norm(&f, 2.0, 2.0, 0.0).unwrap();
        let l2 = f.lp_norm(2.0).unwrap();
        assert!(m <= l2 * (1.0 + 1e-12));
        assert!(m >= 0.5 * l2);
    }

    #[test]
    fn tensor_modulation_matches_dense() {
        let d = small();
        let t = AxisSpectrum::from_fn(d.torus_axis(), |k| Complex64::new(1.0 / (1.0 + k * k), 0.2 * k));
        let e = AxisSpectrum::from_fn(d.euclid_axis(), |x| Complex64::new((-2.0 * x * x).exp(), 0.0));
        let ts = TensorSpectrum::isotropic(&d, &t, &e).unwrap();
        let dense = ts.to_dense();
        for (p, q) in [(4.0, 1.0), (2.0, 2.0), (8.0, 4.0)] {
            let a = tensor_modulation_norm(&ts, p, q, 0.5).unwrap();
            let b = modulation_norm_spectrum(&dense, p, q, 0.5).unwrap();
            assert!((a - b).abs() < 1e-10 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn dyadic_telescopes() {
        let d = small();
        let fam = build_dyadic_family(&d);
        let s = random_band(&d, 4, 3.5);
        let mut sum = Spectrum::zeros(&d);
        for j in 0..=fam.levels {
            sum = sum.add(&lp_project_spectrum(&s, j, &fam).unwrap()).unwrap();
        }
        let a = to_field(&sum).unwrap();
        let b = to_field(&s).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10 * b.sup());
        assert!(lp_project_spectrum(&s, fam.levels + 1, &fam).is_err());
        for j in 0..=fam.levels {
            for jj in 0..=fam.levels {
                if j.abs_diff(jj) >= 2 {
                    let twice = lp_project_spectrum(&lp_project_spectrum(&s, j, &fam).unwrap(), jj, &fam).unwrap();
                    assert!(twice.coeffs.iter().all(|c| c.norm() == 0.0));
                }
            }
        }
    }

    #[test]
    fn mode_at_radius_three() {
        let fam = DyadicFamily { step: SmoothStep::new(), levels: 6 };
        let live: Vec<usize> = (0..=6).filter(|j| fam.psi(*j, 3.0) != 0.0).collect();
        assert!(live.iter().all(|j| *j == 1 || *j == 2));
    }

    #[test]
    fn mixed_norm_of_constant_trajectory() {
        let d = small();
        let s = random_band(&d, 5, 1.0);
        let f = to_field(&s).unwrap();
        let tr = Trajectory {
            domain: d.clone(),
            times: alloc::vec![0.1, 0.5],
            weights: alloc::vec![0.25, 0.75],
            fields: alloc::vec![f.clone(), f.clone()],
        };
        for r in [1.0, 3.0, f64::INFINITY] {
            let a = mixed_norm(&tr, 4.0, r).unwrap();
            assert!((a - f.lp_norm(4.0).unwrap()).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn streaming_and_stored_agree() {
        let d = small();
        let s = random_band(&d, 6, 1.0);
        let plan = TimePlan::GaussLegendre { points: 6 };
        let tr = evolve_trajectory(&s, &plan).unwrap();
        let a = mixed_norm(&tr, 6.0, 3.0).unwrap();
        let b = evolution_mixed_norm(&s, &plan, 6.0, 3.0).unwrap();
        assert_eq!(a, b);
        let l2 = mixed_norm(&tr, 2.0, 2.0).unwrap();
        assert!((l2 - s.l2_norm()).abs() < 1e-8 * l2);
    }

    #[test]
    fn bessel_single_mode() {
        let d = small();
        let mut s = Spectrum::zeros(&d);
        let i = d.torus_axis().index_of(1).unwrap() * 128 + 64;
        s.coeffs[i] = Complex64::new(1.0, 0.0);
        let b = bessel_multiplier(&s, 2.0);
        assert!((b.coeffs[i].re - 2.0).abs() < 1e-15);
    }
}
