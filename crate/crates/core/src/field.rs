//! Sampled fields and their mixed Fourier coefficients on `T^m x R^n`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::axis::{lp_of_samples, Axis};
use crate::domain::{unravel, DomainSpec};
use crate::error::{Error, Result};
use crate::fft::{map_lines, Fft};
use crate::math::*;

/// Coefficients `f^(k, xi)` on the truncated lattice of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub domain: DomainSpec,
    pub coeffs: Vec<Complex64>,
}

/// Complex samples on the spatial grid of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub domain: DomainSpec,
    pub samples: Vec<Complex64>,
}

/// Reusable per-axis FFT plans for one domain.
#[derive(Debug, Clone)]
pub struct Transform {
    axes: Vec<Axis>,
    torus: Fft,
    euclid: Fft,
}

impl Transform {
    pub fn new(domain: &DomainSpec) -> Self {
        Self { axes: domain.axes(), torus: domain.torus_axis().plan(), euclid: domain.euclid_axis().plan() }
    }

    fn plan(&self, axis: &Axis) -> &Fft {
        if axis.is_torus() {
            &self.torus
        } else {
            &self.euclid
        }
    }

    /// Samples to coefficients (truncating torus modes beyond the cutoff).
    pub fn forward(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut shape: Vec<usize> = self.axes.iter().map(|a| a.spatial_len()).collect();
        let mut data = samples.to_vec();
        for (i, axis) in self.axes.iter().enumerate() {
            let plan = self.plan(axis);
            let new_len = axis.spectral_len();
            data = map_lines(&data, &shape, i, new_len, |src, dst| axis.forward_line(plan, src, dst));
            shape[i] = new_len;
        }
        data
    }

    /// Coefficients to samples.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut shape: Vec<usize> = self.axes.iter().map(|a| a.spectral_len()).collect();
        let mut data = coeffs.to_vec();
        for (i, axis) in self.axes.iter().enumerate() {
            let plan = self.plan(axis);
            let new_len = axis.spatial_len();
            data = map_lines(&data, &shape, i, new_len, |src, dst| axis.inverse_line(plan, src, dst));
            shape[i] = new_len;
        }
        data
    }
}

impl Spectrum {
    pub fn new(domain: DomainSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = domain.spectral_len();
        if coeffs.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: coeffs.len() });
        }
        Ok(Self { domain, coeffs })
    }

    pub fn zeros(domain: &DomainSpec) -> Self {
        Self { coeffs: alloc::vec![Complex64::new(0.0, 0.0); domain.spectral_len()], domain: domain.clone() }
    }

    /// Coefficients `symbol(frequency)` at every lattice point.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(domain: &DomainSpec, mut symbol: F) -> Self {
        let axes = domain.axes();
        let shape = domain.spectral_shape();
        let mut freq = alloc::vec![0.0; axes.len()];
        let coeffs = (0..domain.spectral_len())
            .map(|flat| {
                for ((f, i), a) in freq.iter_mut().zip(unravel(flat, &shape)).zip(&axes) {
                    *f = a.frequency(i);
                }
                symbol(&freq)
            })
            .collect();
        Self { domain: domain.clone(), coeffs }
    }

    /// Multiplies every coefficient by `symbol(frequency)`.
    pub fn multiply<F: FnMut(&[f64]) -> Complex64>(&self, mut symbol: F) -> Self {
        let axes = self.domain.axes();
        let shape = self.domain.spectral_shape();
        let mut freq = alloc::vec![0.0; axes.len()];
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| {
                for ((f, i), a) in freq.iter_mut().zip(unravel(flat, &shape)).zip(&axes) {
                    *f = a.frequency(i);
                }
                c * symbol(&freq)
            })
            .collect();
        Self { domain: self.domain.clone(), coeffs }
    }

    /// `L^2(T^m x R^n)` norm via Parseval:
    /// `||f||_2^2 = (2 pi)^(m+n) d xi^n sum |f^|^2`.
    pub fn l2_norm(&self) -> f64 {
        let d = self.domain.dimension() as i32;
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (TAU.powi(d) * self.domain.spectral_weight() * s).sqrt()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { domain: self.domain.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn add(&self, other: &Spectrum) -> Result<Self> {
        check_same(&self.domain, &other.domain)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { domain: self.domain.clone(), coeffs })
    }

    /// Largest `|f^|` among coefficients whose frequency has max-norm above `radius`.
    pub fn max_outside(&self, radius: f64) -> f64 {
        let shape = self.domain.spectral_shape();
        let axes = self.domain.axes();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(flat, _)| {
                unravel(*flat, &shape).iter().zip(&axes).any(|(i, a)| a.frequency(*i).abs() > radius)
            })
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}

impl Field {
    pub fn new(domain: DomainSpec, samples: Vec<Complex64>) -> Result<Self> {
        let expected = domain.spatial_len();
        if samples.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: samples.len() });
        }
        Ok(Self { domain, samples })
    }

    /// Samples `f(point)` at every grid node.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(domain: &DomainSpec, mut f: F) -> Self {
        let axes = domain.axes();
        let shape = domain.spatial_shape();
        let mut pt = alloc::vec![0.0; axes.len()];
        let samples = (0..domain.spatial_len())
            .map(|flat| {
                for ((p, i), a) in pt.iter_mut().zip(unravel(flat, &shape)).zip(&axes) {
                    *p = a.node(i);
                }
                f(&pt)
            })
            .collect();
        Self { domain: domain.clone(), samples }
    }

    /// Rectangle/trapezoid `L^p` norm; `p = inf` is the maximum over nodes.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_of_samples(&self.samples, self.domain.cell_volume(), p)
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Fraction of `L^2` mass outside the central half `[-L/2, L/2)^n` of the box.
    pub fn outer_mass_fraction(&self) -> f64 {
        let shape = self.domain.spatial_shape();
        let axes = self.domain.axes();
        let half = 0.5 * self.domain.box_halfwidth;
        let mut outer = 0.0;
        let mut total = 0.0;
        for (flat, v) in self.samples.iter().enumerate() {
            let e = v.norm_sqr();
            total += e;
            let idx = unravel(flat, &shape);
            let out = idx.iter().zip(&axes).any(|(i, a)| !a.is_torus() && a.node(*i).abs() > half);
            if out {
                outer += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn check_same(a: &DomainSpec, b: &DomainSpec) -> Result<()> {
    if a.spectral_shape() != b.spectral_shape() || a.box_halfwidth != b.box_halfwidth {
        return Err(Error::Dimension("operands live on different domains".into()));
    }
    Ok(())
}

/// Samples to coefficients; the continuous `\int dy` is the rectangle rule
/// with spacing `2L / N_R` and the torus integral is the trapezoid rule.
pub fn to_spectrum(f: &Field) -> Result<Spectrum> {
    let expected = f.domain.spatial_len();
    if f.samples.len() != expected {
        return Err(Error::ShapeMismatch { expected, actual: f.samples.len() });
    }
    let coeffs = Transform::new(&f.domain).forward(&f.samples);
    Ok(Spectrum { domain: f.domain.clone(), coeffs })
}

/// Coefficients to samples; `\int d xi` is the `d xi`-weighted sum.
pub fn to_field(s: &Spectrum) -> Result<Field> {
    let expected = s.domain.spectral_len();
    if s.coeffs.len() != expected {
        return Err(Error::ShapeMismatch { expected, actual: s.coeffs.len() });
    }
    let samples = Transform::new(&s.domain).inverse(&s.coeffs);
    Ok(Field { domain: s.domain.clone(), samples })
}
