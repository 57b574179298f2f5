//! Discretization of `T^m x R^n` and time quadrature plans.

use alloc::format;
use alloc::vec::Vec;

use crate::axis::Axis;
use crate::error::{Error, Result};
use crate::math::*;
use crate::quadrature::GaussLegendre;

/// Quadrature in time on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum TimePlan {
    /// Caller-supplied nodes and weights.
    Explicit { times: Vec<f64>, weights: Vec<f64> },
    /// Midpoint rule with `points` cells.
    Uniform { points: usize },
    /// Gauss–Legendre rule with `points` nodes.
    GaussLegendre { points: usize },
    /// Midpoint rule with `fine_points` cells on `[0, window]`, then
    /// `coarse_points` geometrically graded cells on `[window, 1]`.
    Stratified { window: f64, fine_points: usize, coarse_points: usize },
}

/// Validated nodes and weights of a [`TimePlan`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeNodes {
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeNodes {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.weights.iter().copied())
    }
}

impl TimePlan {
    /// The single instant `t = 0` with unit weight.
    pub fn instant() -> Self {
        TimePlan::Explicit { times: alloc::vec![0.0], weights: alloc::vec![1.0] }
    }

    pub fn nodes(&self) -> Result<TimeNodes> {
        let (times, weights) = match self {
            TimePlan::Explicit { times, weights } => {
                if times.len() != weights.len() {
                    return Err(Error::InvalidTimePlan("times and weights differ in length".into()));
                }
                (times.clone(), weights.clone())
            }
            TimePlan::Uniform { points } => {
                let n = *points;
                let times = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
                (times, alloc::vec![1.0 / n as f64; n])
            }
            TimePlan::GaussLegendre { points } => {
                let gl = GaussLegendre::new(*points);
                gl.on_interval(0.0, 1.0).unzip()
            }
            TimePlan::Stratified { window, fine_points, coarse_points } => {
                let w = *window;
                if !(w > 0.0 && w < 1.0) {
                    return Err(Error::InvalidTimePlan(format!("window {w} must lie in (0, 1)")));
                }
                if *fine_points == 0 || *coarse_points == 0 {
                    return Err(Error::InvalidTimePlan("stratified plan needs points on both parts".into()));
                }
                let nf = *fine_points;
                let mut times: Vec<f64> = (0..nf).map(|i| w * (i as f64 + 0.5) / nf as f64).collect();
                let mut weights = alloc::vec![w / nf as f64; nf];
                let nc = *coarse_points;
                let ratio = (1.0 / w).ln() / nc as f64;
                let edge = |i: usize| if i == nc { 1.0 } else { w * (ratio * i as f64).exp() };
                for i in 0..nc {
                    let (a, b) = (edge(i), edge(i + 1));
                    times.push((a * b).sqrt());
                    weights.push(b - a);
                }
                (times, weights)
            }
        };
        validate_nodes(&times, &weights)?;
        Ok(TimeNodes { times, weights })
    }
}

fn validate_nodes(times: &[f64], weights: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimePlan("empty time plan".into()));
    }
    if times.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidTimePlan("times must lie in [0, 1]".into()));
    }
    if times.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidTimePlan("times must be strictly increasing".into()));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidTimePlan("weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidTimePlan(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Discretized product domain `T^m x R^n`.
///
/// Coefficient arrays have shape `[2M+1; m] ++ [N_R; n]`, sample arrays have
/// shape `[N_T; m] ++ [N_R; n]`, both row-major with the torus axes first.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub m: usize,
    pub n: usize,
    pub torus_modes: usize,
    pub box_halfwidth: f64,
    pub euclid_points: usize,
    pub time_plan: TimePlan,
    torus_points: usize,
}

/// Largest supported `m + n`.
pub const MAX_DIMENSION: usize = 4;

/// Validates sizes and builds a [`DomainSpec`].
pub fn make_domain(
    m: usize,
    n: usize,
    torus_modes: usize,
    box_halfwidth: f64,
    euclid_points: usize,
    time_plan: TimePlan,
) -> Result<DomainSpec> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidSize(format!("dimensions must be positive, got m={m}, n={n}")));
    }
    if m + n > MAX_DIMENSION {
        return Err(Error::InvalidSize(format!("m + n = {} exceeds {MAX_DIMENSION}", m + n)));
    }
    if torus_modes == 0 {
        return Err(Error::InvalidSize("torus mode cutoff must be positive".into()));
    }
    if !(box_halfwidth > 0.0) || !box_halfwidth.is_finite() {
        return Err(Error::InvalidSize(format!("box half-width must be positive, got {box_halfwidth}")));
    }
    if euclid_points < 2 || !euclid_points.is_power_of_two() {
        return Err(Error::NotPowerOfTwo("euclid_points", euclid_points));
    }
    time_plan.nodes()?;
    Ok(DomainSpec {
        m,
        n,
        torus_modes,
        box_halfwidth,
        euclid_points,
        time_plan,
        torus_points: (2 * torus_modes + 1).next_power_of_two(),
    })
}

impl DomainSpec {
    /// Same discretization with another time plan.
    pub fn with_time_plan(&self, time_plan: TimePlan) -> Result<Self> {
        time_plan.nodes()?;
        Ok(Self { time_plan, ..self.clone() })
    }

    /// Same discretization with a finer torus sampling grid.
    pub fn with_torus_points(&self, points: usize) -> Result<Self> {
        Axis::torus_with_points(self.torus_modes, points)?;
        Ok(Self { torus_points: points, ..self.clone() })
    }

    pub fn dimension(&self) -> usize {
        self.m + self.n
    }

    pub fn torus_points(&self) -> usize {
        self.torus_points
    }

    pub fn torus_axis(&self) -> Axis {
        Axis::Torus { modes: self.torus_modes, points: self.torus_points }
    }

    pub fn euclid_axis(&self) -> Axis {
        Axis::Euclid { halfwidth: self.box_halfwidth, points: self.euclid_points }
    }

    /// Axes in storage order: `m` torus axes then `n` euclidean axes.
    pub fn axes(&self) -> Vec<Axis> {
        let mut v = alloc::vec![self.torus_axis(); self.m];
        v.extend(core::iter::repeat(self.euclid_axis()).take(self.n));
        v
    }

    /// Frequency spacing `d xi = pi / L`.
    pub fn dxi(&self) -> f64 {
        PI / self.box_halfwidth
    }

    pub fn spectral_shape(&self) -> Vec<usize> {
        self.axes().iter().map(|a| a.spectral_len()).collect()
    }

    pub fn spatial_shape(&self) -> Vec<usize> {
        self.axes().iter().map(|a| a.spatial_len()).collect()
    }

    pub fn spectral_len(&self) -> usize {
        self.spectral_shape().iter().product()
    }

    pub fn spatial_len(&self) -> usize {
        self.spatial_shape().iter().product()
    }

    /// Volume of one spatial quadrature cell.
    pub fn cell_volume(&self) -> f64 {
        self.axes().iter().map(|a| a.cell()).product()
    }

    /// Weight `d xi^n` of one coefficient.
    pub fn spectral_weight(&self) -> f64 {
        self.dxi().powi(self.n as i32)
    }

    /// Frequency vector `(k, xi)` of a flat coefficient index.
    pub fn frequency_of(&self, flat: usize) -> Vec<f64> {
        let axes = self.axes();
        let shape = self.spectral_shape();
        let idx = unravel(flat, &shape);
        idx.iter().zip(&axes).map(|(i, a)| a.frequency(*i)).collect()
    }

    /// Spatial point `(x, y)` of a flat sample index.
    pub fn point_of(&self, flat: usize) -> Vec<f64> {
        let axes = self.axes();
        let shape = self.spatial_shape();
        let idx = unravel(flat, &shape);
        idx.iter().zip(&axes).map(|(i, a)| a.node(*i)).collect()
    }
}

/// Row-major multi-index of a flat index.
pub fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = alloc::vec![0; shape.len()];
    for (slot, len) in idx.iter_mut().zip(shape).rev() {
        *slot = flat % len;
        flat /= len;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_examples() {
        let d = make_domain(1, 1, 128, 64.0, 2048, TimePlan::Uniform { points: 256 }).unwrap();
        assert!((d.dxi() - PI / 64.0).abs() < 1e-15);
        let d2 = make_domain(2, 1, 32, 32.0, 1024, TimePlan::Uniform { points: 128 }).unwrap();
        assert_eq!(d2.spectral_shape(), alloc::vec![65, 65, 1024]);
        assert!(make_domain(1, 1, 128, -1.0, 2048, TimePlan::Uniform { points: 256 }).is_err());
        assert!(make_domain(1, 1, 128, 1.0, 2000, TimePlan::Uniform { points: 256 }).is_err());
        assert!(make_domain(0, 1, 8, 1.0, 64, TimePlan::instant()).is_err());
        assert!(make_domain(3, 2, 8, 1.0, 64, TimePlan::instant()).is_err());
    }

    #[test]
    fn stratified_weights_sum_to_one() {
        let h: f64 = 1.0 / 32.0;
        let plan = TimePlan::Stratified { window: 0.25 * h * h, fine_points: 4096, coarse_points: 64 };
        let nodes = plan.nodes().unwrap();
        let s: f64 = nodes.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(nodes.len(), 4160);
    }

    #[test]
    fn plan_validation() {
        assert!(TimePlan::Explicit { times: alloc::vec![], weights: alloc::vec![] }.nodes().is_err());
        let bad = TimePlan::Explicit { times: alloc::vec![0.5, 0.2], weights: alloc::vec![0.5, 0.5] };
        assert!(bad.nodes().is_err());
        assert!(TimePlan::GaussLegendre { points: 32 }.nodes().is_ok());
    }

    #[test]
    fn unravel_row_major() {
        assert_eq!(unravel(7, &[2, 3, 4]), alloc::vec![0, 1, 3]);
    }
}
