//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiperiodic_core::decoupling::DecouplingWindow;
use semiperiodic_core::domain::unravel;
use semiperiodic_core::norms::{
    box_project_spectrum, build_dyadic_family, build_partition, cube_range, lp_project_spectrum, modulation_norm_spectrum,
};
use semiperiodic_core::thresholds::ModulationCase;
use semiperiodic_core::{
    cap_cover, decoupling_ratio, make_domain, propagate, threshold_table, to_field, Complex64, DomainSpec, Exponent,
    NeighborhoodData, Rational, Spectrum, TensorSpectrum, TimePlan,
};
use semiperiodic_core::axis::AxisSpectrum;
use semiperiodic_lab::data::{random_phase_neighborhood, scale_rng};
use semiperiodic_lab::experiments::rescaling_sides;
use semiperiodic_lab::report::SeriesReport;
use semiperiodic_lab::{run_experiment, ExperimentConfig, ScalingReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::load(&configs().join(name)).expect("config");
    cfg.cache_dir = None;
    cfg
}

fn run(name: &str) -> ScalingReport {
    run_experiment(&load(name)).expect("experiment")
}

fn slope(r: &ScalingReport, series: &str) -> f64 {
    r.series(series).and_then(|s: &SeriesReport| s.slope).unwrap_or(f64::NAN)
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn domain(m: usize, n: usize) -> DomainSpec {
    make_domain(m, n, 6, 16.0 * PI, if m + n > 2 { 64 } else { 256 }, TimePlan::Uniform { points: 4 }).unwrap()
}

fn random_spectrum(d: &DomainSpec, radius: f64, rng: &mut impl Rng) -> Spectrum {
    Spectrum::from_fn(d, |w| {
        if w.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn rel_diff(a: &Spectrum, b: &Spectrum) -> f64 {
    let num: f64 = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    num / b.coeffs.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn ac1() -> Outcome {
    let mut worst = [0.0f64; 4];
    for (m, n, radius) in [(1, 1, 4.0), (2, 1, 1.5)] {
        let d = domain(m, n);
        let mut g = ChaCha8Rng::seed_from_u64(1000 + m as u64);
        for _ in 0..50 {
            let s = random_spectrum(&d, radius, &mut g);
            let t: f64 = g.random_range(-3.0..3.0);
            let u: f64 = g.random_range(-3.0..3.0);
            let before = to_field(&s).unwrap().lp_norm(2.0).unwrap();
            let after = to_field(&propagate(&s, t)).unwrap().lp_norm(2.0).unwrap();
            worst[0] = worst[0].max((after - before).abs() / before);
            worst[1] = worst[1].max(rel_diff(&propagate(&propagate(&s, t), u), &propagate(&s, t + u)));

            let zero_xi = s.multiply(|w| {
                if w[m..].iter().all(|v| *v == 0.0) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            });
            worst[2] = worst[2].max(rel_diff(&propagate(&zero_xi, t + TAU), &propagate(&zero_xi, t)));

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
            let joint = to_field(&propagate(&tensor.to_dense(), t)).unwrap();
            let separate = tensor.propagate(t).to_field().to_dense();
            worst[3] = worst[3].max(joint.max_abs_diff(&separate) / joint.sup());
        }
    }
    let pass = worst.iter().all(|w| *w <= 1e-10);
    outcome(
        pass,
        format!(
            "isometry {:.1e}, group {:.1e}, period {:.1e}, tensor {:.1e} (tol 1e-10)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn ac2() -> Outcome {
    let mut worst = 0.0f64;
    for p in [2.0, 4.0] {
        let mut cfg = ExperimentConfig::from_yaml(&format!(
            "kind: rescaling-identity\nm: 1\nn: 1\np: {p}\nscales: [2, 4]\nseed: 3\n"
        ))
        .unwrap();
        cfg.cache_dir = None;
        for (i, radius) in [2usize, 4].into_iter().enumerate() {
            let (lhs, rhs) = rescaling_sides(&cfg, i, radius).expect("rescaling");
            worst = worst.max((lhs - rhs).abs() / lhs);
        }
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.2e} (tol 1e-6)"))
}

fn ac3() -> Outcome {
    let mut sum_err = 0.0f64;
    let mut box_err = 0.0f64;
    let mut lp_err = 0.0f64;
    let mut monotone = true;
    let mut m22 = true;
    for (m, n, radius) in [(1, 1, 4.0), (2, 1, 1.5)] {
        let d = domain(m, n);
        let pou = build_partition(&d).unwrap();
        let family = build_dyadic_family(&d);
        for i in 0..d.spectral_len() {
            sum_err = sum_err.max((pou.sum_at(&d.frequency_of(i)) - 1.0).abs());
        }
        let ranges: Vec<(i64, i64)> = d.axes().iter().map(cube_range).collect();
        let counts: Vec<usize> = ranges.iter().map(|(a, b)| (b - a + 1) as usize).collect();
        let total: usize = counts.iter().product();
        let lower = 2f64.powf(-((m + n) as f64) / 2.0);
        let mut g = ChaCha8Rng::seed_from_u64(2000 + m as u64);
        for _ in 0..5 {
            let s = random_spectrum(&d, radius, &mut g);
            let mut acc = Spectrum::zeros(&d);
            for flat in 0..total {
                let cube: Vec<i64> = unravel(flat, &counts).iter().zip(&ranges).map(|(i, r)| r.0 + *i as i64).collect();
                acc = acc.add(&box_project_spectrum(&s, &cube, &pou).unwrap()).unwrap();
            }
            box_err = box_err.max(rel_diff(&acc, &s));
            let mut acc = Spectrum::zeros(&d);
            for j in 0..=family.levels {
                acc = acc.add(&lp_project_spectrum(&s, j, &family).unwrap()).unwrap();
            }
            lp_err = lp_err.max(rel_diff(&acc, &s));
            let vals: Vec<f64> =
                [1.0, 2.0, 4.0, f64::INFINITY].iter().map(|q| modulation_norm_spectrum(&s, 4.0, *q, 0.0).unwrap()).collect();
            monotone &= vals.windows(2).all(|w| w[1] <= w[0]);
            let v = modulation_norm_spectrum(&s, 2.0, 2.0, 0.0).unwrap();
            let l2 = s.l2_norm();
            m22 &= v <= l2 * (1.0 + 1e-12) && v >= lower * l2 * (1.0 - 1e-12);
        }
    }
    let pass = sum_err <= 1e-12 && box_err <= 1e-10 && lp_err <= 1e-10 && monotone && m22;
    outcome(
        pass,
        format!(
            "partition {sum_err:.1e}, boxes {box_err:.1e}, dyadic {lp_err:.1e}, q-monotone {monotone}, M22 bounds {m22}"
        ),
    )
}

fn ac4() -> Outcome {
    let e = slope(&run("dispersion-euclid.yaml"), "dispersion");
    let t = slope(&run("dispersion-torus.yaml"), "dispersion");
    outcome(within(e, 0.5, 0.1) && within(t, 0.0, 0.15), format!("euclid {e:.4} (0.5 +- 0.1), torus {t:.4} (0 +- 0.15)"))
}

fn ac5() -> Outcome {
    let r = run("part-i-necessity.yaml");
    let (d, e) = (slope(&r, "data"), slope(&r, "evolution"));
    outcome(within(d, 0.25, 0.1) && e <= -0.5 + 0.1, format!("data {d:.4} (0.25 +- 0.1), evolution {e:.4} (<= -0.4)"))
}

fn ac6() -> Outcome {
    let r = run("part-ii-modulation.yaml");
    let (d, e) = (slope(&r, "data"), slope(&r, "evolution"));
    let c = run("single-cap.yaml");
    let alpha = c.alpha;
    let (cd, ce) = (slope(&c, "data"), slope(&c, "evolution"));
    let pass = within(d, -1.0, 0.1) && e <= -0.5 + 0.1 && within(cd, -alpha, 0.05) && within(ce, 0.0, 0.1);
    outcome(
        pass,
        format!(
            "modulation {d:.4} (-1 +- 0.1), evolution {e:.4} (<= -0.4), single-cap {cd:.4} (-{alpha} +- 0.05) / {ce:.4} (0 +- 0.1)"
        ),
    )
}

fn ac7() -> Outcome {
    let s = slope(&run("strichartz-endpoint.yaml"), "ratio");
    outcome(s <= 0.1, format!("ratio slope {s:.4} (<= 0.1)"))
}

fn ac8() -> Outcome {
    let s = slope(&run("decoupling-ratio.yaml"), "ratio");

    let delta = 0.25;
    let cover = cap_cover(2, delta).unwrap();
    let cap = &cover.caps[cover.caps.len() / 3];
    let mut g = scale_rng(17, 0, 0);
    let points = (2.0 / (delta * delta)) as usize;
    let single = NeighborhoodData::from_fn(2, points, |w| {
        let mu = g.random_range(-0.5..0.5) * cover.thickness();
        let c = if cap.contains(w) { Complex64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)) } else { Complex64::new(0.0, 0.0) };
        (c, mu)
    });
    let one = decoupling_ratio(&single, delta, 4.0, &DecouplingWindow::for_scale(2, delta, 4.0)).unwrap();

    let mut p2 = 0.0f64;
    for (i, delta) in [0.25, 0.125].into_iter().enumerate() {
        let points = (2.0 / (delta * delta)) as usize;
        let data = random_phase_neighborhood(2, points, delta * delta, &mut scale_rng(23, i, 0));
        p2 = p2.max(decoupling_ratio(&data, delta, 2.0, &DecouplingWindow::for_scale(2, delta, 2.0)).unwrap());
    }
    let pass = s <= 0.2 && (one - 1.0).abs() <= 1e-12 && p2 <= 1.0 + 1e-10;
    outcome(pass, format!("growth slope {s:.4} (<= 0.2), single cap {one:.15}, p=2 max {p2:.12} (<= 1 + 1e-10)"))
}

fn ac9() -> Outcome {
    let t = threshold_table(1, 1);
    let e = |p: i64| Exponent::integer(p).unwrap();
    let a = t.sobolev_smoothing(e(4)) == Some(Rational::new(1, 4));
    let b = t.modulation_case(e(3), e(2)) == Some(ModulationCase::Low)
        && t.modulation_smoothing(e(3), e(2)) == Some(Rational::from_integer(0));
    let c = t.necessary_modulation(e(4), e(1)) == Rational::from_integer(0);
    outcome(a && b && c, format!("(1,1,4) -> 1/4 {a}, (1,1,3,2) -> 0 {b}, (1,1,4,1) -> 0 {c}"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("AC1 propagator exactness", 60, ac1),
        ("AC2 rescaling identity", 120, ac2),
        ("AC3 function-space machinery", 60, ac3),
        ("AC4 dispersion rates", 300, ac4),
        ("AC5 part-(i) necessity", 900, ac5),
        ("AC6 part-(ii) and single-cap rates", 600, ac6),
        ("AC7 Strichartz endpoint", 600, ac7),
        ("AC8 decoupling growth", 600, ac8),
        ("AC9 threshold table", 1, ac9),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut failed = 0;
    for (name, limit, check) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let in_time = took < Duration::from_secs(limit);
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} {name}: {}; {:.1}s (limit {limit}s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
