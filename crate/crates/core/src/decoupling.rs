//! Disjoint cap covers of `[-1, 1)^d` and the `l^2` decoupling ratio for data
//! near the truncated paraboloid.
//!
//! Frequencies live on the cell-centered grid `eta_j = -1 + (j + 1/2) spacing`.
//! The function `f(x, t) = sum_eta g(eta) e^{i(eta.x + (|eta|^2 + mu(eta)) t)}`
//! has `|f|` periodic in `x` with period `2 pi / spacing`, and the spatial
//! integrals below are taken over one period.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::axis::{check_exponent, phase};
use crate::domain::unravel;
use crate::error::{Error, Result};
use crate::fft::{for_each_line, Fft};
use crate::math::*;
use crate::quadrature::bump;

/// One cube `corner + [0, delta)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cap {
    /// Integer position `j` with `corner = -1 + j delta`.
    pub index: Vec<usize>,
    pub corner: Vec<f64>,
    pub delta: f64,
}

impl Cap {
    pub fn center(&self) -> Vec<f64> {
        self.corner.iter().map(|c| c + 0.5 * self.delta).collect()
    }

    pub fn contains(&self, eta: &[f64]) -> bool {
        eta.iter().zip(&self.corner).all(|(e, c)| *e >= *c && *e < *c + self.delta)
    }

    /// The `2^d` caps of side `delta / 2` tiling this one.
    pub fn children(&self) -> Vec<Cap> {
        let d = self.index.len();
        (0..1usize << d)
            .map(|bits| {
                let index: Vec<usize> =
                    self.index.iter().enumerate().map(|(a, j)| 2 * j + ((bits >> (d - 1 - a)) & 1)).collect();
                let corner = index.iter().map(|j| -1.0 + *j as f64 * 0.5 * self.delta).collect();
                Cap { index, corner, delta: 0.5 * self.delta }
            })
            .collect()
    }
}

/// Disjoint tiling of `[-1, 1)^d` by cubes of side `delta` with corners on
/// `delta Z^d`; each cap lifts to the slab of thickness `delta^2` above it.
#[derive(Debug, Clone, PartialEq)]
pub struct CapCover {
    pub d: usize,
    pub delta: f64,
    pub caps: Vec<Cap>,
}

impl CapCover {
    pub fn thickness(&self) -> f64 {
        self.delta * self.delta
    }

    pub fn per_axis(&self) -> usize {
        (2.0 / self.delta).round() as usize
    }
}

fn dyadic_level(delta: f64) -> Option<u32> {
    if !(delta > 0.0 && delta <= 1.0) {
        return None;
    }
    let j = (-delta.log2()).round();
    if (j.exp2() * delta - 1.0).abs() > 1e-12 {
        return None;
    }
    Some(j as u32)
}

pub fn cap_cover(d: usize, delta: f64) -> Result<CapCover> {
    if d == 0 {
        return Err(Error::Dimension("cap dimension must be at least 1".into()));
    }
    let j = dyadic_level(delta).ok_or_else(|| Error::InvalidSize(format!("cap scale {delta} is not 2^-j")))?;
    let delta = (-(j as f64)).exp2();
    let per = 2usize << j as usize;
    let shape = alloc::vec![per; d];
    let caps = (0..per.pow(d as u32))
        .map(|flat| {
            let index = unravel(flat, &shape);
            let corner = index.iter().map(|i| -1.0 + *i as f64 * delta).collect();
            Cap { index, corner, delta }
        })
        .collect();
    Ok(CapCover { d, delta, caps })
}

/// Coefficients `g(eta)` and vertical offsets `mu(eta)` on the cell-centered
/// grid of `[-1, 1]^d` with `points` nodes per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodData {
    pub d: usize,
    pub points: usize,
    pub coeffs: Vec<Complex64>,
    pub offsets: Vec<f64>,
}

impl NeighborhoodData {
    pub fn new(d: usize, points: usize, coeffs: Vec<Complex64>, offsets: Vec<f64>) -> Result<Self> {
        let len = points.pow(d as u32);
        if coeffs.len() != len || offsets.len() != len {
            return Err(Error::ShapeMismatch { expected: len, actual: coeffs.len().min(offsets.len()) });
        }
        if points == 0 {
            return Err(Error::InvalidSize("empty frequency grid".into()));
        }
        Ok(Self { d, points, coeffs, offsets })
    }

    /// Samples `profile(eta) = (g, mu)` on the grid.
    pub fn from_fn<F: FnMut(&[f64]) -> (Complex64, f64)>(d: usize, points: usize, mut profile: F) -> Self {
        let shape = alloc::vec![points; d];
        let spacing = 2.0 / points as f64;
        let mut eta = alloc::vec![0.0; d];
        let (coeffs, offsets) = (0..points.pow(d as u32))
            .map(|flat| {
                for (e, i) in eta.iter_mut().zip(unravel(flat, &shape)) {
                    *e = -1.0 + (i as f64 + 0.5) * spacing;
                }
                profile(&eta)
            })
            .unzip();
        Self { d, points, coeffs, offsets }
    }

    pub fn spacing(&self) -> f64 {
        2.0 / self.points as f64
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let s = self.spacing();
        unravel(flat, &alloc::vec![self.points; self.d]).iter().map(|i| -1.0 + (*i as f64 + 0.5) * s).collect()
    }

    /// `|mu| <= thickness / 2` wherever `g != 0`.
    pub fn check_support(&self, thickness: f64) -> Result<()> {
        for (i, (c, mu)) in self.coeffs.iter().zip(&self.offsets).enumerate() {
            if c.norm() > 0.0 && mu.abs() > 0.5 * thickness * (1.0 + 1e-12) {
                return Err(Error::Support(format!(
                    "offset {mu} at node {:?} leaves the slab of thickness {thickness}",
                    self.node(i)
                )));
            }
        }
        Ok(())
    }

    /// Sum of `|g|^2` (the `l^2` mass of the coefficients).
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Nodes per cap axis for caps of side `delta`.
    fn per_cap(&self, delta: f64) -> Result<usize> {
        let r = delta / self.spacing();
        let n = r.round();
        if n < 1.0 || (r - n).abs() > 1e-9 {
            return Err(Error::Resolution(format!(
                "cap side {delta} is not a multiple of the grid spacing {}",
                self.spacing()
            )));
        }
        Ok(n as usize)
    }
}

/// Sharp restriction of the coefficients to the cube of `cap`.
pub fn cap_restrict(data: &NeighborhoodData, cap: &Cap) -> Result<NeighborhoodData> {
    if cap.index.len() != data.d {
        return Err(Error::Dimension(format!("cap has dimension {}, data has {}", cap.index.len(), data.d)));
    }
    let per = data.per_cap(cap.delta)?;
    let shape = alloc::vec![data.points; data.d];
    let coeffs = data
        .coeffs
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            let inside = unravel(flat, &shape).iter().zip(&cap.index).all(|(i, j)| i / per == *j);
            if inside {
                *c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(NeighborhoodData { d: data.d, points: data.points, coeffs, offsets: data.offsets.clone() })
}

/// Space-time region for the `L^p` norms: one spatial period and `[0, duration]`
/// in time with a midpoint rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingWindow {
    pub duration: f64,
    pub time_points: usize,
    /// Spatial oversampling relative to the number of frequencies per axis.
    pub oversample: usize,
    /// Multiply the time weights by a smooth bump adapted to `[0, duration]`.
    pub taper: bool,
}

impl DecouplingWindow {
    /// Duration `delta^-2`, enough nodes to resolve the time oscillation of
    /// `|f|^p` for frequencies in `[-1, 1]^d`.
    pub fn for_scale(d: usize, delta: f64, p: f64) -> Self {
        let duration = 1.0 / (delta * delta);
        let pe = if p.is_infinite() { 8.0 } else { p.max(2.0) };
        let band = pe * (d as f64 + 1.0);
        let time_points = ((4.0 * duration * band / TAU).ceil() as usize).max(128);
        Self { duration, time_points, oversample: 2, taper: false }
    }

    fn time_nodes(&self) -> Result<Vec<(f64, f64)>> {
        if self.time_points == 0 || !(self.duration > 0.0) {
            return Err(Error::InvalidTimePlan("decoupling window needs a positive duration and nodes".into()));
        }
        let h = self.duration / self.time_points as f64;
        Ok((0..self.time_points)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                let w = if self.taper { h * bump(2.0 * t / self.duration - 1.0) } else { h };
                (t, w)
            })
            .collect())
    }
}

/// `||f||_{L^p(window)}` for the coefficients in `block` (shape `[n; d]`),
/// frequencies `-1 + (offset_a + j + 1/2) spacing`.
struct BlockEvaluator {
    d: usize,
    n: usize,
    big: usize,
    fft: Fft,
    spacing: f64,
}

impl BlockEvaluator {
    fn new(d: usize, n: usize, oversample: usize, spacing: f64) -> Result<Self> {
        let big = (oversample.max(2) * n).next_power_of_two();
        Ok(Self { d, n, big, fft: Fft::new(big)?, spacing })
    }

    /// `sum_x |F(x, t)|^p cell` for the baseband block at time `t`.
    fn slice_power(&self, coeffs: &[Complex64], freq_sq: &[f64], t: f64, p: f64, buf: &mut Vec<Complex64>) -> f64 {
        let shape = alloc::vec![self.big; self.d];
        buf.clear();
        buf.resize(self.big.pow(self.d as u32), Complex64::new(0.0, 0.0));
        let small = alloc::vec![self.n; self.d];
        for (flat, (c, s)) in coeffs.iter().zip(freq_sq).enumerate() {
            let mut dst = 0;
            for i in unravel(flat, &small) {
                dst = dst * self.big + i;
            }
            buf[dst] = c * phase(s * t);
        }
        for a in 0..self.d {
            for_each_line(buf, &shape, a, |line| self.fft.inverse(line));
        }
        let cell = (TAU / self.spacing / self.big as f64).powi(self.d as i32);
        if p.is_infinite() {
            buf.iter().map(|v| v.norm()).fold(0.0, f64::max)
        } else {
            buf.iter().map(|v| pow_abs(v.norm(), p)).sum::<f64>() * cell
        }
    }
}

fn time_reduce(slices: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    if p.is_infinite() {
        slices.map(|(v, _)| v).fold(0.0, f64::max)
    } else {
        slices.map(|(v, w)| v * w).sum::<f64>().powf(1.0 / p)
    }
}

/// `L^p` norm of the full function over the window.
pub fn window_norm(data: &NeighborhoodData, p: f64, window: &DecouplingWindow) -> Result<f64> {
    check_exponent(p)?;
    let nodes = window.time_nodes()?;
    let ev = BlockEvaluator::new(data.d, data.points, window.oversample, data.spacing())?;
    let freq_sq: Vec<f64> = (0..data.coeffs.len())
        .map(|i| data.node(i).iter().map(|e| e * e).sum::<f64>() + data.offsets[i])
        .collect();
    let mut buf = Vec::new();
    let slices: Vec<(f64, f64)> =
        nodes.iter().map(|(t, w)| (ev.slice_power(&data.coeffs, &freq_sq, *t, p, &mut buf), *w)).collect();
    Ok(time_reduce(slices.into_iter(), p))
}

/// `||f_theta||_{L^p(window)}` for every cap, by the Galilean change of
/// variables `x -> x + 2 c t` that moves the cap to a small baseband grid.
pub fn cap_norms(data: &NeighborhoodData, cover: &CapCover, p: f64, window: &DecouplingWindow) -> Result<Vec<f64>> {
    check_exponent(p)?;
    if cover.d != data.d {
        return Err(Error::Dimension(format!("cover has dimension {}, data has {}", cover.d, data.d)));
    }
    let per = data.per_cap(cover.delta)?;
    let nodes = window.time_nodes()?;
    let spacing = data.spacing();
    let ev = BlockEvaluator::new(data.d, per, window.oversample, spacing)?;
    let small = alloc::vec![per; data.d];
    let mut buf = Vec::new();
    let mut out = Vec::with_capacity(cover.caps.len());
    for cap in &cover.caps {
        let mut coeffs = Vec::with_capacity(per.pow(data.d as u32));
        let mut freq_sq = Vec::with_capacity(coeffs.capacity());
        for flat in 0..per.pow(data.d as u32) {
            let local = unravel(flat, &small);
            let mut src = 0;
            let mut zeta2 = 0.0;
            for (a, i) in local.iter().enumerate() {
                src = src * data.points + cap.index[a] * per + i;
                let zeta = (*i as f64 + 0.5) * spacing;
                zeta2 += zeta * zeta;
            }
            coeffs.push(data.coeffs[src]);
            freq_sq.push(zeta2 + data.offsets[src]);
        }
        if coeffs.iter().all(|c| c.norm() == 0.0) {
            out.push(0.0);
            continue;
        }
        let slices: Vec<(f64, f64)> =
            nodes.iter().map(|(t, w)| (ev.slice_power(&coeffs, &freq_sq, *t, p, &mut buf), *w)).collect();
        out.push(time_reduce(slices.into_iter(), p));
    }
    Ok(out)
}

/// `||f||_p / (sum_theta ||f_theta||_p^2)^{1/2}` over `window`.
pub fn decoupling_ratio(data: &NeighborhoodData, delta: f64, p: f64, window: &DecouplingWindow) -> Result<f64> {
    let cover = cap_cover(data.d, delta)?;
    data.check_support(cover.thickness())?;
    let whole = window_norm(data, p, window)?;
    let parts = cap_norms(data, &cover, p, window)?;
    let denom = parts.iter().map(|v| v * v).sum::<f64>().sqrt();
    if denom == 0.0 {
        return Err(Error::Support("data vanishes on every cap".into()));
    }
    Ok(whole / denom)
}

/// Critical exponent `2(d + 2)/d`.
pub fn critical_exponent(d: usize) -> f64 {
    2.0 * (d as f64 + 2.0) / d as f64
}
