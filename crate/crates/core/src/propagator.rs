//! The free Schrödinger flow `e^{it Delta}` as an exact Fourier multiplier, and
//! the paraboloid extension operator over `R^{-1}`-separated slices.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::axis::{check_exponent, phase};
use crate::domain::{DomainSpec, TimeNodes, TimePlan};
use crate::error::{Error, Result};
use crate::fft::map_lines;
use crate::field::{Field, Spectrum, Transform};
use crate::math::*;

/// Multiplies `f^(k, xi)` by `e^{-it(|k|^2 + |xi|^2)}`. Any real `t` is allowed.
pub fn propagate(spectrum: &Spectrum, t: f64) -> Spectrum {
    spectrum.multiply(|w| {
        let s: f64 = w.iter().map(|v| v * v).sum();
        phase(-t * s)
    })
}

/// Time-sampled evolution with quadrature weights on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub domain: DomainSpec,
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
    pub fields: Vec<Field>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

/// Materializes `to_field(propagate(F, t))` at every node of `plan`.
pub fn evolve_trajectory(spectrum: &Spectrum, plan: &TimePlan) -> Result<Trajectory> {
    let nodes = plan.nodes()?;
    let fields = EvolutionSlices::new(spectrum, nodes.clone()).map(|(_, _, f)| f).collect();
    Ok(Trajectory { domain: spectrum.domain.clone(), times: nodes.times, weights: nodes.weights, fields })
}

/// Streams `(t, weight, field)` one time slice at a time.
pub struct EvolutionSlices<'a> {
    spectrum: &'a Spectrum,
    transform: Transform,
    symbol: Vec<f64>,
    nodes: TimeNodes,
    next: usize,
}

impl<'a> EvolutionSlices<'a> {
    pub fn new(spectrum: &'a Spectrum, nodes: TimeNodes) -> Self {
        let shape = spectrum.domain.spectral_shape();
        let axes = spectrum.domain.axes();
        let symbol = (0..spectrum.coeffs.len())
            .map(|flat| {
                crate::domain::unravel(flat, &shape)
                    .iter()
                    .zip(&axes)
                    .map(|(i, a)| {
                        let w = a.frequency(*i);
                        w * w
                    })
                    .sum()
            })
            .collect();
        Self { spectrum, transform: Transform::new(&spectrum.domain), symbol, nodes, next: 0 }
    }
}

impl Iterator for EvolutionSlices<'_> {
    type Item = (f64, f64, Field);

    fn next(&mut self) -> Option<Self::Item> {
        let i = self.next;
        if i >= self.nodes.len() {
            return None;
        }
        self.next += 1;
        let t = self.nodes.times[i];
        let coeffs: Vec<Complex64> =
            self.spectrum.coeffs.iter().zip(&self.symbol).map(|(c, s)| c * phase(-t * s)).collect();
        let samples = self.transform.inverse(&coeffs);
        Some((t, self.nodes.weights[i], Field { domain: self.spectrum.domain.clone(), samples }))
    }
}

/// Frequency data on `R^{-1}`-separated slices of the truncated paraboloid.
///
/// `coeffs` has shape `[tau.len(); m] ++ [xi.len(); n]`; every `xi` node
/// carries quadrature weight `xi_weight` per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionData {
    pub m: usize,
    pub n: usize,
    pub scale: f64,
    pub tau: Vec<f64>,
    pub xi: Vec<f64>,
    pub xi_weight: f64,
    pub coeffs: Vec<Complex64>,
}

impl ExtensionData {
    pub fn new(
        m: usize,
        n: usize,
        scale: f64,
        tau: Vec<f64>,
        xi: Vec<f64>,
        xi_weight: f64,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if !(scale >= 1.0) {
            return Err(Error::InvalidSize(format!("rescaling parameter must be >= 1, got {scale}")));
        }
        for t in &tau {
            let j = t * scale;
            if (j - j.round()).abs() > 1e-9 || t.abs() > 1.0 + 1e-12 {
                return Err(Error::Support(format!("slice {t} is not on (1/R)Z within [-1, 1]")));
            }
        }
        if tau.windows(2).any(|p| ((p[1] - p[0]) * scale - 1.0).abs() > 1e-9) {
            return Err(Error::Support("slices must be consecutive multiples of 1/R".into()));
        }
        if xi.iter().any(|x| x.abs() > 1.0 + 1e-12) {
            return Err(Error::Support("xi nodes must lie in [-1, 1]".into()));
        }
        let expected = tau.len().pow(m as u32) * xi.len().pow(n as u32);
        if coeffs.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: coeffs.len() });
        }
        Ok(Self { m, n, scale, tau, xi, xi_weight, coeffs })
    }

    /// `g(tau, xi) = f^(R tau, R xi)` restricted to `|R tau|, |R xi| <= R`.
    pub fn rescaled(spectrum: &Spectrum, scale: f64) -> Result<Self> {
        let d = &spectrum.domain;
        let ta = d.torus_axis();
        let ea = d.euclid_axis();
        let ks: Vec<usize> = (0..ta.spectral_len()).filter(|&i| ta.frequency(i).abs() <= scale).collect();
        let qs: Vec<usize> =
            (0..ea.spectral_len()).filter(|&i| ea.frequency(i).abs() <= scale + 1e-12).collect();
        let tau: Vec<f64> = ks.iter().map(|&i| ta.frequency(i) / scale).collect();
        let xi: Vec<f64> = qs.iter().map(|&i| ea.frequency(i) / scale).collect();
        let shape = d.spectral_shape();
        let sub_shape: Vec<usize> =
            (0..d.m).map(|_| ks.len()).chain((0..d.n).map(|_| qs.len())).collect();
        let total: usize = sub_shape.iter().product();
        let coeffs = (0..total)
            .map(|flat| {
                let idx = crate::domain::unravel(flat, &sub_shape);
                let mut src = 0;
                for (a, i) in idx.iter().enumerate() {
                    let full = if a < d.m { ks[*i] } else { qs[*i] };
                    src = src * shape[a] + full;
                }
                spectrum.coeffs[src]
            })
            .collect();
        Self::new(d.m, d.n, scale, tau, xi, d.dxi() / scale, coeffs)
    }
}

/// One-dimensional quadrature: nodes with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature1D {
    /// `count` rectangle-rule nodes `a + j (b - a) / count`.
    pub fn uniform(a: f64, b: f64, count: usize) -> Self {
        let h = (b - a) / count as f64;
        Self { nodes: (0..count).map(|j| a + h * j as f64).collect(), weights: alloc::vec![h; count] }
    }

    pub fn gauss_legendre(a: f64, b: f64, count: usize) -> Self {
        let (nodes, weights) = crate::quadrature::GaussLegendre::new(count).on_interval(a, b).unzip();
        Self { nodes, weights }
    }
}

/// Product space-time evaluation grid: every torus-slot axis uses `x`,
/// every euclidean axis uses `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    pub x: Quadrature1D,
    pub y: Quadrature1D,
    pub t: Quadrature1D,
}

/// Pointwise values of
/// `E g(x, y, t) = sum_tau \int g(tau, xi) e^{i(tau.x + xi.y + (|tau|^2 + |xi|^2) t)} d xi`
/// with shape `[t] ++ [x; m] ++ [y; n]`.
pub fn extension_apply(e: &ExtensionData, grid: &SpaceTimeGrid) -> Vec<Complex64> {
    let mut out = Vec::new();
    for &t in &grid.t.nodes {
        out.extend(extension_slice(e, grid, t));
    }
    out
}

/// `E g(., ., t)` on the spatial part of `grid`, shape `[x; m] ++ [y; n]`.
pub fn extension_slice(e: &ExtensionData, grid: &SpaceTimeGrid, t: f64) -> Vec<Complex64> {
    let d = e.m + e.n;
    let mut shape: Vec<usize> =
        (0..e.m).map(|_| e.tau.len()).chain((0..e.n).map(|_| e.xi.len())).collect();
    let wn = e.xi_weight.powi(e.n as i32);
    let freq_sq = |idx: &[usize]| -> f64 {
        idx.iter()
            .enumerate()
            .map(|(a, i)| {
                let w = if a < e.m { e.tau[*i] } else { e.xi[*i] };
                w * w
            })
            .sum()
    };
    let mut data: Vec<Complex64> = e
        .coeffs
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            let idx = crate::domain::unravel(flat, &shape);
            c * phase(freq_sq(&idx) * t) * wn
        })
        .collect();
    let tau_mat = oscillation_matrix(&e.tau, &grid.x.nodes);
    let xi_mat = oscillation_matrix(&e.xi, &grid.y.nodes);
    for a in 0..d {
        let (mat, out_len, in_len) = if a < e.m {
            (&tau_mat, grid.x.nodes.len(), e.tau.len())
        } else {
            (&xi_mat, grid.y.nodes.len(), e.xi.len())
        };
        data = map_lines(&data, &shape, a, out_len, |src, dst| {
            for (i, o) in dst.iter_mut().enumerate() {
                let row = &mat[i * in_len..(i + 1) * in_len];
                *o = row.iter().zip(src).map(|(m, s)| m * s).sum();
            }
        });
        shape[a] = out_len;
    }
    data
}

fn oscillation_matrix(freqs: &[f64], nodes: &[f64]) -> Vec<Complex64> {
    let mut m = Vec::with_capacity(freqs.len() * nodes.len());
    for x in nodes {
        for w in freqs {
            m.push(phase(w * x));
        }
    }
    m
}

/// `||E g||_{L^p}` over the weighted product grid.
pub fn extension_lp_norm(e: &ExtensionData, grid: &SpaceTimeGrid, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let d = e.m + e.n;
    let mut shape = alloc::vec![grid.x.nodes.len(); e.m];
    shape.extend(core::iter::repeat(grid.y.nodes.len()).take(e.n));
    let mut acc = 0.0;
    let mut sup: f64 = 0.0;
    for (&t, &wt) in grid.t.nodes.iter().zip(&grid.t.weights) {
        let slice = extension_slice(e, grid, t);
        for (flat, v) in slice.iter().enumerate() {
            if p.is_infinite() {
                sup = sup.max(v.norm());
                continue;
            }
            let idx = crate::domain::unravel(flat, &shape);
            let w: f64 = (0..d)
                .map(|a| if a < e.m { grid.x.weights[idx[a]] } else { grid.y.weights[idx[a]] })
                .product();
            acc += wt * w * pow_abs(v.norm(), p);
        }
    }
    Ok(if p.is_infinite() { sup } else { acc.powf(1.0 / p) })
}

/// Exponent `n - (2m + n + 2)/p` relating the space-time norm of the flow to the
/// norm of the parabolically rescaled extension.
pub fn rescaling_exponent(m: usize, n: usize, p: f64) -> f64 {
    n as f64 - (2 * m + n + 2) as f64 / p
}
