//! Gauss–Legendre rules and the compactly supported exponential mollifier
//! used to build every smooth cutoff in the crate.

use alloc::vec::Vec;

use crate::math::*;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        // ascending order
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let s = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + s * x, s * w))
    }

    /// Composite rule: `panels` equal panels on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in self.on_interval(lo, lo + h) {
                acc += w * f(x);
            }
        }
        acc
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The standard bump `exp(-1 / (1 - s^2))` on `(-1, 1)`, zero outside.
#[inline]
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Normalized cumulative integral of [`bump`]: a `C^inf` step that is exactly
/// 0 for `u <= -1` and exactly 1 for `u >= 1`.
#[derive(Debug, Clone)]
pub struct SmoothStep {
    rule: GaussLegendre,
    total: f64,
}

const STEP_PANELS: usize = 6;

impl Default for SmoothStep {
    fn default() -> Self {
        Self::new()
    }
}

impl SmoothStep {
    pub fn new() -> Self {
        let rule = GaussLegendre::new(24);
        let half = rule.integrate(-1.0, 0.0, STEP_PANELS, bump);
        Self { rule, total: 2.0 * half }
    }

    /// `\int_{-1}^1 bump`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u <= -1.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else if u <= 0.0 {
            self.rule.integrate(-1.0, u, STEP_PANELS, bump) / self.total
        } else {
            1.0 - self.eval(-u)
        }
    }

    /// Indicator of `[-a, a]` convolved with the bump rescaled to `[-w, w]`.
    /// Equals 1 on `|x| <= a - w` and vanishes on `|x| >= a + w`.
    pub fn mollified_indicator(&self, x: f64, a: f64, w: f64) -> f64 {
        let x = x.abs();
        if x >= a + w {
            return 0.0;
        }
        if x <= a - w {
            return 1.0;
        }
        let v = self.eval((x + a) / w) - self.eval((x - a) / w);
        v.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(10);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 19 is exact
        let v: f64 = gl.on_interval(0.0, 1.0).map(|(x, w)| w * x.powi(19)).sum();
        assert!((v - 1.0 / 20.0).abs() < 1e-14);
        assert!(gl.nodes.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn gauss_legendre_oscillatory() {
        let gl = GaussLegendre::new(80);
        let v: f64 = gl.on_interval(0.0, 1.0).map(|(x, w)| w * (60.0 * x).cos()).sum();
        assert!((v - (60.0f64).sin() / 60.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_step_properties() {
        let s = SmoothStep::new();
        // known value of \int_{-1}^1 exp(-1/(1-x^2)) dx
        assert!((s.total() - 0.443_993_816_168_079_4).abs() < 1e-12);
        assert_eq!(s.eval(-1.0), 0.0);
        assert_eq!(s.eval(1.0), 1.0);
        assert!((s.eval(0.0) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 0..=200 {
            let u = -1.0 + i as f64 / 100.0;
            let v = s.eval(u);
            assert!(v >= prev - 1e-15);
            prev = v;
            assert!((v + s.eval(-u) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn mollified_indicator_plateau_and_support() {
        let s = SmoothStep::new();
        assert_eq!(s.mollified_indicator(0.0, 0.7, 0.15), 1.0);
        assert_eq!(s.mollified_indicator(0.55, 0.7, 0.15), 1.0);
        assert_eq!(s.mollified_indicator(0.85, 0.7, 0.15), 0.0);
        assert!((s.mollified_indicator(0.7, 0.7, 0.15) - 0.5).abs() < 1e-14);
    }
}
