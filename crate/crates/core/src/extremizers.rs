//! Semiclassical wave packets and the sharpness families built from them.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::axis::{phase, Axis, AxisField, AxisSpectrum};
use crate::domain::{make_domain, DomainSpec, TimePlan};
use crate::error::{Error, Result};
use crate::math::*;
use crate::norms::PartitionOfUnity;
use crate::quadrature::{GaussLegendre, SmoothStep};
use crate::tensor::TensorSpectrum;

/// Default bound on the fraction of `L^2` mass in the outer half of the box.
pub const LEAK_TOLERANCE: f64 = 1e-8;

/// Even bump `phi^ = 1.05 * (mollified indicator of [-0.7, 0.7], width 0.15)`,
/// supported in `[-0.85, 0.85]` and at least 1 on `[-0.55, 0.55]`.
#[derive(Debug, Clone)]
pub struct ProfileSpec {
    step: SmoothStep,
    pub amplitude: f64,
    pub plateau: f64,
    pub width: f64,
}

/// Builds the profile; `resolution` is the spacing at which it will be
/// sampled and must be at most `1/32`.
pub fn build_profile(resolution: f64) -> Result<ProfileSpec> {
    if !(resolution > 0.0 && resolution <= 1.0 / 32.0) {
        return Err(Error::Resolution(format!("profile needs sampling step <= 1/32, got {resolution}")));
    }
    let p = ProfileSpec { step: SmoothStep::new(), amplitude: 1.05, plateau: 0.7, width: 0.15 };
    p.verify()?;
    Ok(p)
}

impl ProfileSpec {
    pub fn value(&self, xi: f64) -> f64 {
        self.amplitude * self.step.mollified_indicator(xi, self.plateau, self.width)
    }

    pub fn support_radius(&self) -> f64 {
        self.plateau + self.width
    }

    /// `max |D^k phi^|` for `k = 1..=4` by central differences with spacing `step`.
    pub fn derivative_bounds(&self, step: f64) -> [f64; 4] {
        let r = self.support_radius() + 4.0 * step;
        let count = (2.0 * r / step).ceil() as usize;
        let vals: Vec<f64> = (0..=count + 8).map(|i| self.value(-r - 4.0 * step + i as f64 * step)).collect();
        let mut out = [0.0; 4];
        let mut diff = vals;
        for slot in out.iter_mut() {
            diff = diff.windows(2).map(|w| (w[1] - w[0]) / step).collect();
            *slot = diff.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        }
        out
    }

    /// `\int |phi^|^2` by Gauss–Legendre panels split at the kinks of the construction.
    pub fn l2_squared(&self) -> f64 {
        self.integrate(|x| {
            let v = self.value(x);
            v * v
        })
    }

    fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let gl = GaussLegendre::new(40);
        let a = self.plateau - self.width;
        let b = self.support_radius();
        gl.integrate(-b, -a, 4, &mut f) + gl.integrate(-a, a, 4, &mut f) + gl.integrate(a, b, 4, &mut f)
    }

    pub fn verify(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Support(format!("profile invariant violated: {what}")));
        if self.value(0.0) < 1.0 || self.value(0.5) < 1.0 || self.value(-0.5) < 1.0 {
            return bad("plateau below 1");
        }
        if self.value(self.support_radius()) != 0.0 || self.support_radius() >= 1.0 {
            return bad("support not inside (-1, 1)");
        }
        let bounds = self.derivative_bounds(1.0 / 512.0);
        if bounds.iter().any(|b| !b.is_finite()) {
            return bad("non-finite derivative");
        }
        Ok(())
    }

    /// `phi_h(y)` evolved by `e^{i tau Delta}` at `y`, by quadrature of
    /// `h^{-1/2} \int phi^(eta) e^{i(eta y / h - tau eta^2 / h^2)} d eta`.
    pub fn euclid_packet_value(&self, h: f64, tau: f64, y: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        let gl = GaussLegendre::new(40);
        let a = self.plateau - self.width;
        let b = self.support_radius();
        for (lo, hi) in [(-b, -a), (-a, a), (a, b)] {
            re += gl.integrate(lo, hi, 4, |eta| {
                self.value(eta) * (eta * y / h - tau * eta * eta / (h * h)).cos()
            });
            im += gl.integrate(lo, hi, 4, |eta| {
                self.value(eta) * (eta * y / h - tau * eta * eta / (h * h)).sin()
            });
        }
        Complex64::new(re, im) / h.sqrt()
    }

    /// `~phi_h(x)` evolved by `e^{i tau Delta}`, by direct summation over modes.
    pub fn torus_packet_value(&self, h: f64, tau: f64, x: f64) -> Complex64 {
        let kmax = (self.support_radius() / h).ceil() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -kmax..=kmax {
            let kf = k as f64;
            let c = self.value(h * kf);
            if c != 0.0 {
                acc += phase(kf * x - tau * kf * kf) * c;
            }
        }
        acc * h.sqrt()
    }
}

/// Scale and calibration constant of a packet family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams {
    pub h: f64,
    pub eps0: f64,
}

impl PacketParams {
    pub fn new(h: f64, eps0: f64) -> Result<Self> {
        check_h(h)?;
        if !(eps0 > 0.0 && eps0 <= 0.25) {
            return Err(Error::InvalidSize(format!("eps0 must lie in (0, 1/4], got {eps0}")));
        }
        Ok(Self { h, eps0 })
    }

    /// `2 pi - eps0 h`.
    pub fn return_time(&self) -> f64 {
        TAU - self.eps0 * self.h
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::InvalidSize(format!("semiclassical scale must lie in (0, 1/2), got {h}")));
    }
    Ok(())
}

/// Largest sampling step of `phi^` on the scaled box grid; below it the
/// Riemann sum of `|phi^|^2` matches the integral to `1e-8`.
pub const PACKET_RESOLUTION: f64 = 1.0 / 128.0;

/// Coefficients `sqrt(h) phi^(h xi)` of `phi_h(y) = h^{-1/2} phi(y / h)`.
pub fn wavepacket_euclid(profile: &ProfileSpec, h: f64, axis: Axis) -> Result<AxisSpectrum> {
    check_h(h)?;
    if axis.is_torus() {
        return Err(Error::Dimension("euclidean packet needs a box axis".into()));
    }
    let reach = profile.support_radius() / h;
    if axis.max_frequency() - axis.frequency_step() <= reach {
        return Err(Error::Resolution(format!(
            "box frequencies reach {} but the packet needs {reach}",
            axis.max_frequency()
        )));
    }
    if h * axis.frequency_step() > PACKET_RESOLUTION {
        return Err(Error::Resolution(format!("frequency step {} does not resolve scale 1/h", axis.frequency_step())));
    }
    let sh = h.sqrt();
    Ok(AxisSpectrum::from_fn(axis, |xi| Complex64::new(sh * profile.value(h * xi), 0.0)))
}

/// Coefficients `sqrt(h) phi^(h k)` of the periodic packet `~phi_h`.
pub fn wavepacket_torus(profile: &ProfileSpec, h: f64, axis: Axis) -> Result<AxisSpectrum> {
    check_h(h)?;
    let modes = match axis {
        Axis::Torus { modes, .. } => modes,
        Axis::Euclid { .. } => return Err(Error::Dimension("periodic packet needs a torus axis".into())),
    };
    if (modes as f64) < (1.0 / h).ceil() {
        return Err(Error::Resolution(format!("torus cutoff {modes} is below 1/h = {}", 1.0 / h)));
    }
    let sh = h.sqrt();
    Ok(AxisSpectrum::from_fn(axis, |k| Complex64::new(sh * profile.value(h * k), 0.0)))
}

/// Fraction of `L^2` mass outside the central half of a box axis.
pub fn axis_outer_mass_fraction(f: &AxisField) -> f64 {
    let half = 0.5 * f.axis.period() * 0.5;
    let mut outer = 0.0;
    let mut total = 0.0;
    for (j, v) in f.samples.iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        if !f.axis.is_torus() && f.axis.node(j).abs() > half {
            outer += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

fn check_leak(f: &AxisSpectrum, tolerance: f64) -> Result<()> {
    let leak = axis_outer_mass_fraction(&f.to_field());
    if leak > tolerance {
        return Err(Error::Resolution(format!("packet leaks {leak:e} of its mass into the outer box (tolerance {tolerance:e})")));
    }
    Ok(())
}

/// Torus grid with eight samples per mode so that rectangle sums of `|u|^p`,
/// `p <= 8`, are exact.
fn oversampled(domain: DomainSpec) -> Result<DomainSpec> {
    let pts = (8 * domain.torus_modes + 1).next_power_of_two();
    domain.with_torus_points(pts)
}

/// Domain for the backward-evolved packets: box `L = 16 pi / h`, frequencies
/// up to `2/h`, torus cutoff `ceil(1/h)`.
pub fn part_i_domain(m: usize, n: usize, h: f64, plan: TimePlan) -> Result<DomainSpec> {
    check_h(h)?;
    let l = 16.0 * PI / h;
    let points = ((4.0 * l / (PI * h)).ceil() as usize).next_power_of_two();
    oversampled(make_domain(m, n, (1.0 / h).ceil() as usize, l, points, plan)?)
}

/// Domain for the product packets: `d xi <= 1/16` and box `L >= 8/h`.
pub fn part_ii_domain(m: usize, n: usize, h: f64, plan: TimePlan) -> Result<DomainSpec> {
    check_h(h)?;
    let l = (16.0 * PI).max(8.0 * PI / h);
    let points = ((4.0 * l / (PI * h)).ceil() as usize).next_power_of_two();
    oversampled(make_domain(m, n, (1.0 / h).ceil() as usize + 1, l, points, plan)?)
}

/// `e^{-i(2 pi - eps0 h) Delta} (~Phi_h (x) Phi_h)`, with the torus factor
/// evolved by the equivalent time `eps0 h`.
pub fn extremizer_part_i(profile: &ProfileSpec, params: PacketParams, domain: &DomainSpec) -> Result<TensorSpectrum> {
    let t = wavepacket_torus(profile, params.h, domain.torus_axis())?.propagate(params.eps0 * params.h);
    let e = wavepacket_euclid(profile, params.h, domain.euclid_axis())?.propagate(-params.return_time());
    check_leak(&e, LEAK_TOLERANCE)?;
    TensorSpectrum::isotropic(domain, &t, &e)
}

/// `~Phi_h (x) Phi_h`.
pub fn extremizer_part_ii(profile: &ProfileSpec, h: f64, domain: &DomainSpec) -> Result<TensorSpectrum> {
    let t = wavepacket_torus(profile, h, domain.torus_axis())?;
    let e = wavepacket_euclid(profile, h, domain.euclid_axis())?;
    check_leak(&e, LEAK_TOLERANCE)?;
    TensorSpectrum::isotropic(domain, &t, &e)
}

/// Diagonal cube `K0 = (a, ..., a)` with `a = round(1/(2h))`, so that
/// `1/(2h) <= |K0| <= 1/h` for `m + n <= 4`.
pub fn single_cap_index(h: f64, dimension: usize) -> Vec<i64> {
    alloc::vec![(0.5 / h).round() as i64; dimension]
}

/// Domain holding `sigma_{K0}` with room for the cube and its neighbours.
pub fn single_cap_domain(m: usize, n: usize, h: f64, plan: TimePlan) -> Result<DomainSpec> {
    check_h(h)?;
    let a = single_cap_index(h, m + n)[0] as f64;
    let l = 16.0 * PI;
    let points = ((2.0 * (a + 4.0) * l / PI).ceil() as usize).next_power_of_two().max(256);
    oversampled(make_domain(m, n, a as usize + 2, l, points, plan)?)
}

/// `f^ = sigma_{K0}` as a tensor of per-axis generator translates.
pub fn single_cap_data(h: f64, domain: &DomainSpec, pou: &PartitionOfUnity) -> Result<TensorSpectrum> {
    check_h(h)?;
    let k0 = single_cap_index(h, domain.dimension());
    let mut factors = Vec::with_capacity(k0.len());
    for (axis, k) in domain.axes().into_iter().zip(&k0) {
        let need = if axis.is_torus() { *k as f64 + 1.0 } else { *k as f64 + pou.radius() + 1.0 };
        if axis.max_frequency() - axis.frequency_step() < need {
            return Err(Error::OutOfRange(format!("cube {k} does not fit in frequency range {}", axis.max_frequency())));
        }
        let coeffs = pou.generator_samples(&axis, *k).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        factors.push(AxisSpectrum::new(axis, coeffs)?);
    }
    TensorSpectrum::new(domain, factors)
}

/// Grid of the pointwise calibration checks on `[-eps0 h^2, eps0 h^2] x [-eps0 h, eps0 h]`.
const CALIBRATION_NODES: usize = 9;

fn symmetric_nodes(r: f64) -> impl Iterator<Item = f64> {
    (0..CALIBRATION_NODES).map(move |i| -r + 2.0 * r * i as f64 / (CALIBRATION_NODES - 1) as f64)
}

/// Worst values of `h^{1/2} |u|` for the periodic and Euclidean packets over
/// the calibration box.
pub fn calibration_margins(profile: &ProfileSpec, h: f64, eps0: f64) -> (f64, f64) {
    let mut torus = f64::INFINITY;
    let mut euclid = f64::INFINITY;
    for tau in symmetric_nodes(eps0 * h * h) {
        for x in symmetric_nodes(eps0 * h) {
            torus = torus.min(profile.torus_packet_value(h, tau, x).norm() * h.sqrt());
            euclid = euclid.min(profile.euclid_packet_value(h, tau, x).norm() * h.sqrt());
        }
    }
    (torus, euclid)
}

/// Threshold constant of the pointwise lower bounds.
pub const CALIBRATION_THRESHOLD: f64 = 0.1;

/// Candidates `2^-2, ..., 2^-6`, largest first.
pub const EPS0_CANDIDATES: [f64; 5] = [0.25, 0.125, 0.0625, 0.03125, 0.015625];

/// The scales in `h_list` that violate the bounds for `eps0`.
pub fn calibration_failures(profile: &ProfileSpec, m: usize, n: usize, h_list: &[f64], eps0: f64) -> Vec<f64> {
    h_list
        .iter()
        .copied()
        .filter(|&h| {
            let (t, e) = calibration_margins(profile, h, eps0);
            t.powi(m as i32) < CALIBRATION_THRESHOLD || e.powi(n as i32) < CALIBRATION_THRESHOLD
        })
        .collect()
}

/// Largest candidate `eps0` for which the packets keep pointwise size
/// `0.1 h^{-d/2}` on the calibration box at every `h`.
pub fn calibrate_eps0(profile: &ProfileSpec, m: usize, n: usize, h_list: &[f64]) -> Result<f64> {
    if h_list.is_empty() {
        return Err(Error::Calibration("empty scale list".into()));
    }
    for &h in h_list {
        check_h(h)?;
    }
    EPS0_CANDIDATES
        .iter()
        .copied()
        .find(|&e| calibration_failures(profile, m, n, h_list, e).is_empty())
        .ok_or_else(|| Error::Calibration("no candidate eps0 satisfies the pointwise bounds".into()))
}

/// `||e^{i eps0 h Delta} ~phi_h||_{L^inf(T)}`, the grid maximum on an eightfold
/// oversampled torus grid.
pub fn torus_dispersion(profile: &ProfileSpec, params: PacketParams) -> Result<f64> {
    let modes = (1.0 / params.h).ceil() as usize;
    let axis = Axis::torus_with_points(modes, (8 * modes + 1).next_power_of_two())?;
    Ok(wavepacket_torus(profile, params.h, axis)?.propagate(params.eps0 * params.h).to_field().sup())
}

/// `||e^{-i(2 pi - eps0 h) Delta} phi_h||_{L^inf(R)}` on the part-(i) box.
pub fn euclid_dispersion(profile: &ProfileSpec, params: PacketParams) -> Result<f64> {
    let d = part_i_domain(1, 1, params.h, TimePlan::instant())?;
    let e = wavepacket_euclid(profile, params.h, d.euclid_axis())?.propagate(-params.return_time());
    let f = e.to_field();
    let leak = axis_outer_mass_fraction(&f);
    if leak > LEAK_TOLERANCE {
        return Err(Error::Resolution(format!("dispersed packet leaks {leak:e}")));
    }
    Ok(f.sup())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::to_field;
    use crate::norms::build_partition;

    fn profile() -> ProfileSpec {
        build_profile(1.0 / 64.0).unwrap()
    }

    #[test]
    fn profile_shape() {
        let p = profile();
        assert!(p.value(0.0) >= 1.0);
        assert_eq!(p.value(0.95), 0.0);
        assert!(p.value(0.55) >= 1.0);
        assert!(build_profile(0.1).is_err());
    }

    #[test]
    fn profile_derivatives_converge() {
        let p = profile();
        let a = p.derivative_bounds(1.0 / 1024.0);
        let b = p.derivative_bounds(1.0 / 2048.0);
        for k in 0..4 {
            assert!((a[k] - b[k]).abs() < 0.05 * b[k], "order {}: {} vs {}", k + 1, a[k], b[k]);
        }
    }

    #[test]
    fn euclid_packet_normalized() {
        let p = profile();
        let reference = (TAU * p.l2_squared()).sqrt();
        for h in [0.125, 0.0625, 0.03125] {
            let axis = Axis::euclid(64.0, ((64.0 / (PI * h)) as usize * 4).next_power_of_two()).unwrap();
            let s = wavepacket_euclid(&p, h, axis).unwrap();
            assert!((s.l2_norm() / reference - 1.0).abs() < 1e-8, "h={h} {} {reference}", s.l2_norm());
            let f = s.to_field();
            let phi0 = p.euclid_packet_value(h, 0.0, 0.0);
            assert!((f.sup() - phi0.norm()).abs() < 1e-8 * f.sup());
            assert!((phi0 * h.sqrt() - p.euclid_packet_value(0.25, 0.0, 0.0) * 0.5).norm() < 1e-10);
        }
    }

    #[test]
    fn torus_packet_normalization_stable() {
        let p = profile();
        let reference = (TAU * p.l2_squared()).sqrt();
        for j in 3..8 {
            let h = 0.5f64.powi(j);
            let s = wavepacket_torus(&p, h, Axis::torus((1.0 / h) as usize).unwrap()).unwrap();
            let ratio = s.l2_norm() / reference;
            assert!(ratio > 1.0 / 1.05 && ratio < 1.05);
            assert!((s.coeffs[s.axis.index_of(0).unwrap()].re - h.sqrt() * p.value(0.0)).abs() < 1e-15);
            let center = s.to_field().samples[0].norm();
            assert!(center * h.sqrt() > 1.0);
            assert!((center - p.torus_packet_value(h, 0.0, 0.0).norm()).abs() < 1e-10 * center);
        }
        assert!(wavepacket_torus(&p, 0.125, Axis::torus(7).unwrap()).is_err());
    }

    #[test]
    fn part_i_returns_to_packets() {
        let p = profile();
        let params = PacketParams::new(0.125, 0.25).unwrap();
        let d = part_i_domain(1, 1, params.h, TimePlan::instant()).unwrap();
        let f = extremizer_part_i(&p, params, &d).unwrap();
        let back = f.propagate(params.return_time());
        let t = wavepacket_torus(&p, params.h, d.torus_axis()).unwrap();
        let e = wavepacket_euclid(&p, params.h, d.euclid_axis()).unwrap();
        let err_t = back.factors[0].coeffs.iter().zip(&t.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let err_e = back.factors[1].coeffs.iter().zip(&e.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err_t < 1e-8 && err_e < 1e-8, "{err_t} {err_e}");
        assert!((f.l2_norm() - t.l2_norm() * e.l2_norm()).abs() < 1e-8);
    }

    #[test]
    fn part_ii_tensor_norm() {
        let p = profile();
        let d = part_ii_domain(1, 1, 0.125, TimePlan::instant()).unwrap();
        let f = extremizer_part_ii(&p, 0.125, &d).unwrap();
        let reference = TAU * p.l2_squared();
        assert!((f.l2_norm() / reference - 1.0).abs() < 0.05);
        assert!((f.l2_norm() - f.factors[0].l2_norm() * f.factors[1].l2_norm()).abs() < 1e-10);
    }

    #[test]
    fn single_cap_norm_is_scale_free() {
        let mut norms = Vec::new();
        for h in [0.125, 0.0625, 0.03125] {
            let d = single_cap_domain(1, 1, h, TimePlan::instant()).unwrap();
            let pou = build_partition(&d).unwrap();
            let f = single_cap_data(h, &d, &pou).unwrap();
            norms.push(f.l2_norm());
            let dense = to_field(&f.to_dense());
            assert!(dense.is_ok());
        }
        for v in &norms {
            assert!((v / norms[0] - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn calibration_contract() {
        let p = profile();
        let hs = [0.125, 0.0625, 0.03125];
        let e = calibrate_eps0(&p, 1, 1, &hs).unwrap();
        assert!(EPS0_CANDIDATES.contains(&e));
        for h in hs {
            assert!(p.torus_packet_value(h, 0.0, 0.0).norm() >= 0.1 / h.sqrt());
        }
        for eps in EPS0_CANDIDATES {
            let all = calibration_failures(&p, 1, 1, &hs, eps).len();
            let fewer = calibration_failures(&p, 1, 1, &hs[..2], eps).len();
            assert!(fewer <= all);
        }
    }
}
