//! One-dimensional factors of the product domain and their transforms.
//!
//! Every multi-dimensional transform in the crate is a composition of the
//! line transforms defined here.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::math::*;

/// A single coordinate axis, either periodic (`T`) or a periodized box
/// standing in for `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    /// Modes `k = -modes..=modes` sampled on `points` equispaced nodes of `[0, 2pi)`.
    Torus { modes: usize, points: usize },
    /// Box `[-halfwidth, halfwidth)` with `points` nodes and frequencies
    /// `xi = (q - points/2) * pi / halfwidth`.
    Euclid { halfwidth: f64, points: usize },
}

impl Axis {
    /// Torus axis with the smallest power-of-two grid holding `2 * modes + 1` modes.
    pub fn torus(modes: usize) -> Result<Self> {
        Self::torus_with_points(modes, (2 * modes + 1).next_power_of_two())
    }

    pub fn torus_with_points(modes: usize, points: usize) -> Result<Self> {
        if !points.is_power_of_two() {
            return Err(Error::NotPowerOfTwo("torus points", points));
        }
        if points < 2 * modes + 1 {
            return Err(Error::InvalidSize(format!(
                "{points} torus points cannot hold {} modes",
                2 * modes + 1
            )));
        }
        Ok(Axis::Torus { modes, points })
    }

    pub fn euclid(halfwidth: f64, points: usize) -> Result<Self> {
        if !(halfwidth > 0.0) || !halfwidth.is_finite() {
            return Err(Error::InvalidSize(format!("box half-width must be positive, got {halfwidth}")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::NotPowerOfTwo("euclidean points", points));
        }
        Ok(Axis::Euclid { halfwidth, points })
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Axis::Torus { .. })
    }

    /// Number of stored Fourier coefficients.
    pub fn spectral_len(&self) -> usize {
        match *self {
            Axis::Torus { modes, .. } => 2 * modes + 1,
            Axis::Euclid { points, .. } => points,
        }
    }

    /// Number of spatial samples.
    pub fn spatial_len(&self) -> usize {
        match *self {
            Axis::Torus { points, .. } | Axis::Euclid { points, .. } => points,
        }
    }

    /// Frequency spacing: 1 on the torus, `pi / L` on the box.
    pub fn frequency_step(&self) -> f64 {
        match *self {
            Axis::Torus { .. } => 1.0,
            Axis::Euclid { halfwidth, .. } => PI / halfwidth,
        }
    }

    /// Weight of one coefficient in `sum_k \int d xi`: 1 on the torus, `d xi` on the box.
    pub fn spectral_weight(&self) -> f64 {
        self.frequency_step()
    }

    /// Frequency of coefficient `idx`.
    pub fn frequency(&self, idx: usize) -> f64 {
        match *self {
            Axis::Torus { modes, .. } => idx as f64 - modes as f64,
            Axis::Euclid { points, .. } => (idx as f64 - (points / 2) as f64) * self.frequency_step(),
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.spectral_len()).map(|i| self.frequency(i)).collect()
    }

    /// Largest representable |frequency|.
    pub fn max_frequency(&self) -> f64 {
        match *self {
            Axis::Torus { modes, .. } => modes as f64,
            Axis::Euclid { points, .. } => (points / 2) as f64 * self.frequency_step(),
        }
    }

    /// Coefficient index of an integer frequency on the torus, or of the grid
    /// point `xi = q * d xi` on the box.
    pub fn index_of(&self, lattice: i64) -> Option<usize> {
        let (offset, len) = match *self {
            Axis::Torus { modes, .. } => (modes as i64, 2 * modes + 1),
            Axis::Euclid { points, .. } => ((points / 2) as i64, points),
        };
        let idx = lattice + offset;
        (idx >= 0 && (idx as usize) < len).then_some(idx as usize)
    }

    /// Spatial node `j`.
    pub fn node(&self, j: usize) -> f64 {
        match *self {
            Axis::Torus { points, .. } => TAU * j as f64 / points as f64,
            Axis::Euclid { halfwidth, points } => -halfwidth + 2.0 * halfwidth * j as f64 / points as f64,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.spatial_len()).map(|j| self.node(j)).collect()
    }

    /// Spatial cell size of the trapezoid/rectangle rule.
    pub fn cell(&self) -> f64 {
        self.period() / self.spatial_len() as f64
    }

    /// Length of the fundamental domain: `2 pi` or `2 L`.
    pub fn period(&self) -> f64 {
        match *self {
            Axis::Torus { .. } => TAU,
            Axis::Euclid { halfwidth, .. } => 2.0 * halfwidth,
        }
    }

    pub fn plan(&self) -> Fft {
        Fft::new(self.spatial_len()).expect("axis lengths are powers of two")
    }

    /// Spatial samples to coefficients along one line.
    pub fn forward_line(&self, plan: &Fft, samples: &[Complex64], out: &mut [Complex64]) {
        let mut buf = samples.to_vec();
        plan.forward(&mut buf);
        match *self {
            Axis::Torus { modes, points } => {
                let scale = 1.0 / points as f64;
                for (i, o) in out.iter_mut().enumerate() {
                    let k = i as i64 - modes as i64;
                    *o = buf[k.rem_euclid(points as i64) as usize] * scale;
                }
            }
            Axis::Euclid { halfwidth, points } => {
                // (1 / 2pi) * dy = L / (pi N); the box origin -L contributes (-1)^s.
                let scale = halfwidth / (PI * points as f64);
                let half = (points / 2) as i64;
                for (q, o) in out.iter_mut().enumerate() {
                    let s = q as i64 - half;
                    let sign = if s.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    *o = buf[s.rem_euclid(points as i64) as usize] * (scale * sign);
                }
            }
        }
    }

    /// Coefficients to spatial samples along one line.
    pub fn inverse_line(&self, plan: &Fft, coeffs: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        match *self {
            Axis::Torus { modes, points } => {
                for (i, c) in coeffs.iter().enumerate() {
                    let k = i as i64 - modes as i64;
                    out[k.rem_euclid(points as i64) as usize] = *c;
                }
                plan.inverse(out);
            }
            Axis::Euclid { points, .. } => {
                let half = (points / 2) as i64;
                let w = self.frequency_step();
                for (q, c) in coeffs.iter().enumerate() {
                    let s = q as i64 - half;
                    let sign = if s.rem_euclid(2) == 0 { w } else { -w };
                    out[s.rem_euclid(points as i64) as usize] = *c * sign;
                }
                plan.inverse(out);
            }
        }
    }
}

/// Coefficients of a function of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpectrum {
    pub axis: Axis,
    pub coeffs: Vec<Complex64>,
}

/// Samples of a function of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisField {
    pub axis: Axis,
    pub samples: Vec<Complex64>,
}

impl AxisSpectrum {
    pub fn new(axis: Axis, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != axis.spectral_len() {
            return Err(Error::ShapeMismatch { expected: axis.spectral_len(), actual: coeffs.len() });
        }
        Ok(Self { axis, coeffs })
    }

    /// Coefficients `profile(frequency)` at every stored frequency.
    pub fn from_fn<F: FnMut(f64) -> Complex64>(axis: Axis, mut profile: F) -> Self {
        let coeffs = (0..axis.spectral_len()).map(|i| profile(axis.frequency(i))).collect();
        Self { axis, coeffs }
    }

    pub fn to_field(&self) -> AxisField {
        let plan = self.axis.plan();
        self.to_field_with(&plan)
    }

    pub fn to_field_with(&self, plan: &Fft) -> AxisField {
        let mut samples = vec![Complex64::new(0.0, 0.0); self.axis.spatial_len()];
        self.axis.inverse_line(plan, &self.coeffs, &mut samples);
        AxisField { axis: self.axis, samples }
    }

    /// Free evolution `e^{-it freq^2}` applied coefficientwise.
    pub fn propagate(&self, t: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let w = self.axis.frequency(i);
                c * phase(-t * w * w)
            })
            .collect();
        Self { axis: self.axis, coeffs }
    }

    /// `L^2` norm by Parseval: `(2 pi sum |c|^2 w)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let w = self.axis.spectral_weight();
        (TAU * w * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }
}

impl AxisField {
    pub fn new(axis: Axis, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != axis.spatial_len() {
            return Err(Error::ShapeMismatch { expected: axis.spatial_len(), actual: samples.len() });
        }
        Ok(Self { axis, samples })
    }

    pub fn to_spectrum(&self) -> AxisSpectrum {
        let plan = self.axis.plan();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.axis.spectral_len()];
        self.axis.forward_line(&plan, &self.samples, &mut coeffs);
        AxisSpectrum { axis: self.axis, coeffs }
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_of_samples(&self.samples, self.axis.cell(), p)
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `e^{i theta}`.
#[inline]
pub(crate) fn phase(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Rectangle-rule `L^p` norm of samples with a uniform cell volume.
pub(crate) fn lp_of_samples(samples: &[Complex64], cell: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(samples.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let s: f64 = samples.iter().map(|v| pow_abs(v.norm(), p)).sum();
    Ok((s * cell).powf(1.0 / p))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(format!("exponent must lie in [1, inf], got {p}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_grid_is_padded_power_of_two() {
        let a = Axis::torus(32).unwrap();
        assert_eq!(a.spectral_len(), 65);
        assert_eq!(a.spatial_len(), 128);
        assert!(Axis::torus_with_points(32, 64).is_err());
    }

    #[test]
    fn euclid_spacing() {
        let a = Axis::euclid(64.0, 2048).unwrap();
        assert!((a.frequency_step() - PI / 64.0).abs() < 1e-15);
        assert_eq!(a.frequency(1024), 0.0);
        assert!(Axis::euclid(-1.0, 2048).is_err());
        assert!(Axis::euclid(1.0, 1000).is_err());
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // g(y) = exp(-y^2/2)  =>  g^(xi) = exp(-xi^2/2) / sqrt(2 pi)
        let axis = Axis::euclid(20.0, 256).unwrap();
        let samples = axis.nodes().iter().map(|y| Complex64::new((-y * y / 2.0).exp(), 0.0)).collect();
        let f = AxisField::new(axis, samples).unwrap();
        let s = f.to_spectrum();
        for (i, c) in s.coeffs.iter().enumerate() {
            let xi = axis.frequency(i);
            let exact = (-xi * xi / 2.0).exp() / TAU.sqrt();
            assert!((c - Complex64::new(exact, 0.0)).norm() < 1e-13, "xi={xi}");
        }
        let back = s.to_field();
        for (a, b) in back.samples.iter().zip(&f.samples) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn torus_single_mode() {
        let axis = Axis::torus(4).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 9];
        c[4 + 3] = Complex64::new(1.0, 0.0);
        let f = AxisSpectrum::new(axis, c).unwrap().to_field();
        for (j, v) in f.samples.iter().enumerate() {
            let x = axis.node(j);
            assert!((v - phase(3.0 * x)).norm() < 1e-13);
        }
        let s = f.to_spectrum();
        assert!((s.coeffs[7].re - 1.0).abs() < 1e-14);
    }
}
