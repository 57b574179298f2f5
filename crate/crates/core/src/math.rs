//! Float helpers that work with and without `std`.

#[allow(unused_imports)]
pub(crate) use num_traits::Float;


pub(crate) const TAU: f64 = core::f64::consts::TAU;
pub(crate) const PI: f64 = core::f64::consts::PI;

/// `p`-th power of a nonnegative number, using repeated squaring for small
/// integer exponents so that even-integer norms stay exact in structure.
#[inline]
pub(crate) fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else if p == 4.0 {
        let s = x * x;
        s * s
    } else if p == 8.0 {
        let s = x * x;
        let s = s * s;
        s * s
    } else if p == 1.0 {
        x
    } else {
        x.powf(p)
    }
}
