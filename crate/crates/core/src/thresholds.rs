//! Closed-form regularity thresholds and scaling rates in exact rational
//! arithmetic.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

#[allow(unused_imports)]
use crate::math::Float;
use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// A Lebesgue exponent `p` in `[1, inf]`, stored as `1/p` so that `inf` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    inv: Rational,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent { inv: Ratio::new_raw(0, 1) };

    pub fn new(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::InvalidExponent(alloc::format!("exponent {p} is below 1")));
        }
        Ok(Self { inv: p.recip() })
    }

    pub fn integer(p: i64) -> Result<Self> {
        Self::new(Rational::from_integer(p))
    }

    /// Nearest rational with denominator at most 1000; `inf` maps exactly.
    pub fn from_f64(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Self::INFINITY);
        }
        let r = Rational::approximate_float(p)
            .ok_or_else(|| Error::InvalidExponent(alloc::format!("cannot represent {p}")))?;
        Self::new(limit_denominator(r, 1000))
    }

    pub fn reciprocal(&self) -> Rational {
        self.inv
    }

    pub fn is_infinite(&self) -> bool {
        self.inv.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            *self.inv.denom() as f64 / *self.inv.numer() as f64
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Self::INFINITY);
        }
        let bad = || Error::InvalidExponent(alloc::format!("cannot parse exponent {s:?}"));
        if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            return Self::new(Rational::new(a, b));
        }
        if let Ok(i) = t.parse::<i64>() {
            return Self::integer(i);
        }
        let f: f64 = t.parse().map_err(|_| bad())?;
        Self::from_f64(f)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.inv.recip())
        }
    }
}

fn limit_denominator(r: Rational, max: i64) -> Rational {
    if *r.denom() <= max {
        return r;
    }
    let x = *r.numer() as f64 / *r.denom() as f64;
    let mut best = Rational::from_integer(x.round() as i64);
    for d in 1..=max {
        let c = Rational::new((x * d as f64).round() as i64, d);
        if (c - r).abs() < (best - r).abs() {
            best = c;
        }
    }
    best
}

fn half() -> Rational {
    Rational::new(1, 2)
}

fn int(v: usize) -> Rational {
    Rational::from_integer(v as i64)
}

fn max0(v: Rational) -> Rational {
    if v < Rational::zero() {
        Rational::zero()
    } else {
        v
    }
}

/// Which branch of the modulation smoothing threshold applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulationCase {
    /// `2 <= p <= 2 + 4/(m+n)`.
    Low,
    /// `p >= 2 + 4/(m+n)` and `q >= 2`.
    HighLargeQ,
    /// `p >= 2 + 4/(m+n)` and `1 <= q <= 2`.
    HighSmallQ,
}

/// Threshold formulas for fixed dimensions `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdTable {
    pub m: usize,
    pub n: usize,
}

pub fn threshold_table(m: usize, n: usize) -> ThresholdTable {
    ThresholdTable { m, n }
}

/// One named row of an evaluated table; `value` is `None` outside the
/// formula's range of validity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub value: Option<Rational>,
}

impl ThresholdTable {
    fn d(&self) -> Rational {
        int(self.m + self.n)
    }

    /// `2 + 4/(m+n)`.
    pub fn critical_exponent(&self) -> Rational {
        Rational::from_integer(2) + Rational::new(4, (self.m + self.n) as i64)
    }

    fn is_high(&self, p: Exponent) -> bool {
        p.is_infinite() || p.reciprocal().recip() >= self.critical_exponent()
    }

    /// `(m + 2n)(1/2 - 1/p) - 2/p` for `p >= 2 + 4/(m+n)`.
    pub fn sobolev_smoothing(&self, p: Exponent) -> Option<Rational> {
        if !self.is_high(p) {
            return None;
        }
        let ip = p.reciprocal();
        Some(int(self.m + 2 * self.n) * (half() - ip) - ip * 2)
    }

    /// `(m + n)(1/2 - 1/p) - 2/p` for `p >= 2 + 4/(m+n)`, the `L^2`-based
    /// Strichartz regularity.
    pub fn strichartz_l2(&self, p: Exponent) -> Option<Rational> {
        if !self.is_high(p) {
            return None;
        }
        let ip = p.reciprocal();
        Some(self.d() * (half() - ip) - ip * 2)
    }

    pub fn modulation_case(&self, p: Exponent, q: Exponent) -> Option<ModulationCase> {
        let ip = p.reciprocal();
        if ip > half() || q.reciprocal() > Rational::one() {
            return None;
        }
        if !self.is_high(p) {
            Some(ModulationCase::Low)
        } else if q.reciprocal() <= half() {
            Some(ModulationCase::HighLargeQ)
        } else {
            Some(ModulationCase::HighSmallQ)
        }
    }

    /// Modulation-space smoothing threshold `alpha(p, q)` for `p >= 2`.
    /// On the overlap `p = 2 + 4/(m+n)` the low branch is used.
    pub fn modulation_smoothing(&self, p: Exponent, q: Exponent) -> Option<Rational> {
        let (ip, iq) = (p.reciprocal(), q.reciprocal());
        let d = self.d();
        Some(match self.modulation_case(p, q)? {
            ModulationCase::Low => max0(d * (half() - iq)),
            ModulationCase::HighLargeQ => d * (Rational::one() - ip - iq) - ip * 2,
            ModulationCase::HighSmallQ => {
                (Rational::one() - iq) * 2 * (d * (half() - ip) - ip * 2)
            }
        })
    }

    /// Necessary condition for `L^q_{x,y} L^r_t` smoothing from `W^{alpha,p}`:
    /// `(m+n)(1/2 - 1/q) + n(1/2 - 1/p) - 2/r`.
    pub fn necessary_sobolev(&self, p: Exponent, q: Exponent, r: Exponent) -> Rational {
        self.d() * (half() - q.reciprocal()) + int(self.n) * (half() - p.reciprocal())
            - r.reciprocal() * 2
    }

    /// Necessary condition for smoothing from `M^alpha_{p,q}`:
    /// `max{0, (m+n)(1 - 1/p - 1/q) - 2/p}`.
    pub fn necessary_modulation(&self, p: Exponent, q: Exponent) -> Rational {
        let ip = p.reciprocal();
        max0(self.d() * (Rational::one() - ip - q.reciprocal()) - ip * 2)
    }

    /// Fixed-time regularity `(m + 2n)|1/2 - 1/p|`.
    pub fn fixed_time(&self, p: Exponent) -> Rational {
        int(self.m + 2 * self.n) * (half() - p.reciprocal()).abs()
    }

    pub fn evaluate(&self, p: Exponent, q: Exponent, r: Exponent) -> Vec<ThresholdEntry> {
        alloc::vec![
            ThresholdEntry {
                name: "sobolev_smoothing",
                formula: "(m+2n)(1/2-1/p)-2/p",
                value: self.sobolev_smoothing(p),
            },
            ThresholdEntry {
                name: "strichartz_l2",
                formula: "(m+n)(1/2-1/p)-2/p",
                value: self.strichartz_l2(p),
            },
            ThresholdEntry {
                name: "modulation_smoothing",
                formula: "alpha(p,q) by case",
                value: self.modulation_smoothing(p, q),
            },
            ThresholdEntry {
                name: "necessary_sobolev",
                formula: "(m+n)(1/2-1/q)+n(1/2-1/p)-2/r",
                value: Some(self.necessary_sobolev(p, q, r)),
            },
            ThresholdEntry {
                name: "necessary_modulation",
                formula: "max{0,(m+n)(1-1/p-1/q)-2/p}",
                value: Some(self.necessary_modulation(p, q)),
            },
            ThresholdEntry {
                name: "fixed_time",
                formula: "(m+2n)|1/2-1/p|",
                value: Some(self.fixed_time(p)),
            },
        ]
    }
}

/// Predicted log-log slopes of the sharpness families and auxiliary checks.
pub mod rates {
    use super::*;

    /// Data norm `||f||_{W^{alpha,p}}` of the backward-evolved packet:
    /// `n(1/2 - 1/p) - alpha`.
    pub fn part_i_data(n: usize, p: Exponent, alpha: Rational) -> Rational {
        int(n) * (half() - p.reciprocal()) - alpha
    }

    /// Space-time lower bound `-(m+n)(1/2 - 1/q) + 2/r`.
    pub fn part_i_evolution(m: usize, n: usize, q: Exponent, r: Exponent) -> Rational {
        -int(m + n) * (half() - q.reciprocal()) + r.reciprocal() * 2
    }

    /// Modulation norm of the product packet: `(m+n)(1/2 - 1/q) - alpha`.
    pub fn part_ii_data(m: usize, n: usize, q: Exponent, alpha: Rational) -> Rational {
        int(m + n) * (half() - q.reciprocal()) - alpha
    }

    /// `L^p` space-time lower bound `-(m+n)(1/2 - 1/p) + 2/p`.
    pub fn part_ii_evolution(m: usize, n: usize, p: Exponent) -> Rational {
        -int(m + n) * (half() - p.reciprocal()) + p.reciprocal() * 2
    }

    /// Modulation norm of a single frequency cube at distance `~1/h`: `-alpha`.
    pub fn single_cap_data(alpha: Rational) -> Rational {
        -alpha
    }

    pub fn single_cap_evolution() -> Rational {
        Rational::zero()
    }

    /// Sup norm of the short-time evolved periodic packet.
    pub fn torus_dispersion() -> Rational {
        Rational::zero()
    }

    /// Sup norm of the dispersed Euclidean packet: `n/2`.
    pub fn euclid_dispersion(n: usize) -> Rational {
        Rational::new(n as i64, 2)
    }

    /// `||e^{it Delta} f||_{L^p} / ||f||_{L^2}` in the frequency radius, at the
    /// exponent where the required regularity vanishes.
    pub fn strichartz_ratio(m: usize, n: usize, p: Exponent) -> Rational {
        max0(threshold_table(m, n).strichartz_l2(p).unwrap_or_else(Rational::zero))
    }

    /// The loss `d/2 - (d+2)/p` in `delta^{-1}` of the decoupling inequality,
    /// zero at `p = 2(d+2)/d`.
    pub fn decoupling_growth(d: usize, p: Exponent) -> Rational {
        max0(Rational::new(d as i64, 2) - int(d + 2) * p.reciprocal())
    }

    /// Bernstein loss `alpha` of `(1 - Delta)^{alpha/2}` on data at frequency `~R`.
    pub fn bernstein(alpha: Rational) -> Rational {
        alpha
    }

    /// Parabolic rescaling exponent `n - (2m + n + 2)/p`.
    pub fn rescaling(m: usize, n: usize, p: Exponent) -> Rational {
        int(n) - int(2 * m + n + 2) * p.reciprocal()
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn format_rational(r: Option<Rational>) -> String {
    match r {
        Some(v) => alloc::format!("{v}"),
        None => String::from("n/a"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: i64) -> Exponent {
        Exponent::integer(p).unwrap()
    }

    #[test]
    fn reference_values() {
        let t = threshold_table(1, 1);
        assert_eq!(t.sobolev_smoothing(e(4)), Some(Rational::new(1, 4)));
        assert_eq!(t.modulation_smoothing(e(3), e(2)), Some(Rational::zero()));
        assert_eq!(t.modulation_case(e(3), e(2)), Some(ModulationCase::Low));
        assert_eq!(t.necessary_modulation(e(4), e(1)), Rational::zero());
    }

    #[test]
    fn sobolev_threshold_vanishes_at_its_root() {
        // (m+2n)(1/2-1/p) = 2/p at p = 2 + 4/(m+2n); valid only when that is >= 2 + 4/(m+n)
        let t = threshold_table(2, 2);
        assert_eq!(t.sobolev_smoothing(Exponent::new(Rational::new(8, 3)).unwrap()), None);
        let t = threshold_table(1, 1);
        assert_eq!(t.strichartz_l2(e(4)), Some(Rational::zero()));
    }

    #[test]
    fn modulation_cases_agree_on_shared_boundary() {
        let t = threshold_table(1, 2);
        for q in [e(1), e(2), Exponent::new(Rational::new(3, 2)).unwrap()] {
            let p = Exponent::new(t.critical_exponent()).unwrap();
            let a = max0(t.d() * (half() - q.reciprocal()));
            assert_eq!(t.modulation_smoothing(p, q), Some(a));
        }
        let p = e(6);
        let b = t.modulation_smoothing(p, e(2)).unwrap();
        let c = (Rational::one() - half()) * 2 * (t.d() * (half() - p.reciprocal()) - p.reciprocal() * 2);
        assert_eq!(b, c);
    }

    #[test]
    fn necessity_specializations() {
        let t = threshold_table(1, 2);
        for p in [e(3), e(4), e(10)] {
            let a = t.necessary_sobolev(p, p, p);
            assert_eq!(a, int(5) * (half() - p.reciprocal()) - p.reciprocal() * 2);
        }
        let q = e(6);
        assert_eq!(t.necessary_sobolev(e(2), q, q), int(3) * (half() - q.reciprocal()) - q.reciprocal() * 2);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::INFINITY);
        assert_eq!("8/3".parse::<Exponent>().unwrap(), Exponent::new(Rational::new(8, 3)).unwrap());
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::new(Rational::new(5, 2)).unwrap());
        assert!("0.5".parse::<Exponent>().is_err());
        assert_eq!(e(4).to_string(), "4");
    }

    #[test]
    fn part_rates_at_reference_parameters() {
        assert_eq!(rates::part_i_data(1, e(4), Rational::zero()), Rational::new(1, 4));
        assert_eq!(rates::part_i_evolution(1, 1, e(8), e(8)), Rational::new(-1, 2));
        assert_eq!(rates::part_ii_data(1, 1, e(1), Rational::zero()), Rational::from_integer(-1));
        assert_eq!(rates::part_ii_evolution(1, 1, e(8)), Rational::new(-1, 2));
        assert_eq!(rates::decoupling_growth(2, e(4)), Rational::zero());
        assert_eq!(rates::rescaling(1, 1, e(2)), Rational::new(-3, 2));
    }
}
