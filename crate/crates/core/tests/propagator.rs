mod common;

use std::f64::consts::TAU;

use common::{domain, random_spectrum, rel_diff, rng};
use rand::Rng;
use semiperiodic_core::axis::AxisSpectrum;
use semiperiodic_core::{propagate, to_field, Complex64, Spectrum, TensorSpectrum};

const FIELDS: u64 = 50;

fn dims() -> [(usize, usize, f64); 2] {
    [(1, 1, 4.0), (2, 1, 1.5)]
}

#[test]
fn isometry_on_random_fields() {
    for (m, n, radius) in dims() {
        let d = domain(m, n);
        let mut g = rng(100 + m as u64);
        for _ in 0..FIELDS {
            let s = random_spectrum(&d, radius, &mut g);
            let t: f64 = g.random_range(-3.0..3.0);
            let before = to_field(&s).unwrap().lp_norm(2.0).unwrap();
            let after = to_field(&propagate(&s, t)).unwrap().lp_norm(2.0).unwrap();
            assert!((after - before).abs() <= 1e-10 * before, "({m},{n}) t={t}: {before} vs {after}");
            assert!((s.l2_norm() - before).abs() <= 1e-10 * before);
        }
    }
}

#[test]
fn group_law_on_random_fields() {
    for (m, n, radius) in dims() {
        let d = domain(m, n);
        let mut g = rng(200 + m as u64);
        for _ in 0..FIELDS {
            let s = random_spectrum(&d, radius, &mut g);
            let a: f64 = g.random_range(-2.0..2.0);
            let b: f64 = g.random_range(-2.0..2.0);
            let e = rel_diff(&propagate(&propagate(&s, a), b), &propagate(&s, a + b));
            assert!(e <= 1e-10, "({m},{n}): {e}");
        }
    }
}

#[test]
fn torus_periodicity_without_euclidean_frequency() {
    for (m, n, radius) in dims() {
        let d = domain(m, n);
        let mut g = rng(300 + m as u64);
        for _ in 0..FIELDS {
            let s = random_spectrum(&d, radius + 2.0, &mut g);
            let s = s.multiply(|w| if w[m..].iter().all(|v| *v == 0.0) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
            assert!(s.l2_norm() > 0.0);
            let t: f64 = g.random_range(0.0..1.0);
            let e = rel_diff(&propagate(&s, t + TAU), &propagate(&s, t));
            assert!(e <= 1e-10, "({m},{n}): {e}");
        }
    }
}

#[test]
fn products_evolve_factor_by_factor() {
    for (m, n, radius) in dims() {
        let d = domain(m, n);
        let mut g = rng(400 + m as u64);
        for _ in 0..FIELDS {
            let factors: Vec<AxisSpectrum> = d
                .axes()
                .into_iter()
                .map(|a| {
                    AxisSpectrum::from_fn(a, |w| {
                        if w.abs() <= radius {
                            Complex64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0))
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                })
                .collect();
            let tensor = TensorSpectrum::new(&d, factors).unwrap();
            let t: f64 = g.random_range(-1.0..1.0);
            let dense: Spectrum = tensor.to_dense();
            let joint = to_field(&propagate(&dense, t)).unwrap();
            let separate = tensor.propagate(t).to_field().to_dense();
            let scale = joint.sup();
            assert!(joint.max_abs_diff(&separate) <= 1e-10 * scale, "({m},{n})");
            let e = (tensor.propagate(t).l2_norm() - dense.l2_norm()).abs() / dense.l2_norm();
            assert!(e <= 1e-10);
        }
    }
}

#[test]
fn integer_eigenvalue_mode_returns_at_full_period() {
    let d = domain(1, 1);
    let s = Spectrum::from_fn(&d, |w| if w[0] == 2.0 && w[1] == 0.0 { Complex64::new(1.0, 0.5) } else { Complex64::new(0.0, 0.0) });
    assert!(rel_diff(&propagate(&s, TAU), &s) < 1e-12);
}
