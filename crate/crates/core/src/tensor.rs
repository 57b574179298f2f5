//! Separable data `f(x, y) = prod_a f_a(z_a)`.
//!
//! Products evolve factor by factor and their `L^p` norms factor, so norms of
//! tensor data on very fine grids are computed from one-dimensional samples.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::axis::{check_exponent, AxisField, AxisSpectrum};
use crate::domain::{unravel, DomainSpec};
use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};

/// A product of per-axis spectra, ordered torus axes first.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpectrum {
    pub domain: DomainSpec,
    pub factors: Vec<AxisSpectrum>,
}

/// A product of per-axis samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub domain: DomainSpec,
    pub factors: Vec<AxisField>,
}

fn check_axes<'a>(domain: &DomainSpec, axes: impl Iterator<Item = &'a crate::axis::Axis>) -> Result<()> {
    let want = domain.axes();
    let got: Vec<_> = axes.collect();
    if got.len() != want.len() || got.iter().zip(&want).any(|(g, w)| *g != w) {
        return Err(Error::Dimension("tensor factors do not match the domain axes".into()));
    }
    Ok(())
}

impl TensorSpectrum {
    pub fn new(domain: &DomainSpec, factors: Vec<AxisSpectrum>) -> Result<Self> {
        check_axes(domain, factors.iter().map(|f| &f.axis))?;
        Ok(Self { domain: domain.clone(), factors })
    }

    /// Same torus factor on each of the `m` periodic axes and same Euclidean
    /// factor on each of the `n` others.
    pub fn isotropic(domain: &DomainSpec, torus: &AxisSpectrum, euclid: &AxisSpectrum) -> Result<Self> {
        let mut factors = alloc::vec![torus.clone(); domain.m];
        factors.extend(core::iter::repeat(euclid.clone()).take(domain.n));
        Self::new(domain, factors)
    }

    pub fn propagate(&self, t: f64) -> Self {
        Self { domain: self.domain.clone(), factors: self.factors.iter().map(|f| f.propagate(t)).collect() }
    }

    pub fn l2_norm(&self) -> f64 {
        self.factors.iter().map(|f| f.l2_norm()).product()
    }

    pub fn to_field(&self) -> TensorField {
        TensorField { domain: self.domain.clone(), factors: self.factors.iter().map(|f| f.to_field()).collect() }
    }

    /// Dense coefficient array; only sensible on small domains.
    pub fn to_dense(&self) -> Spectrum {
        let shape = self.domain.spectral_shape();
        let coeffs = dense_product(&shape, |a, i| self.factors[a].coeffs[i]);
        Spectrum { domain: self.domain.clone(), coeffs }
    }
}

impl TensorField {
    pub fn new(domain: &DomainSpec, factors: Vec<AxisField>) -> Result<Self> {
        check_axes(domain, factors.iter().map(|f| &f.axis))?;
        Ok(Self { domain: domain.clone(), factors })
    }

    /// `||f||_p = prod_a ||f_a||_p`, including `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let mut acc = 1.0;
        for f in &self.factors {
            acc *= f.lp_norm(p)?;
        }
        Ok(acc)
    }

    pub fn sup(&self) -> f64 {
        self.factors.iter().map(|f| f.sup()).product()
    }

    pub fn to_dense(&self) -> Field {
        let shape = self.domain.spatial_shape();
        let samples = dense_product(&shape, |a, i| self.factors[a].samples[i]);
        Field { domain: self.domain.clone(), samples }
    }
}

fn dense_product<F: Fn(usize, usize) -> Complex64>(shape: &[usize], entry: F) -> Vec<Complex64> {
    let total: usize = shape.iter().product();
    (0..total)
        .map(|flat| {
            unravel(flat, shape).iter().enumerate().map(|(a, i)| entry(a, *i)).product()
        })
        .collect()
}
