//! Radix-2 complex FFT and axis-wise transforms of row-major arrays.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::*;

/// Precomputed radix-2 plan. Transforms are unnormalized:
/// `forward` uses `e^{-2 pi i jk/n}`, `inverse` uses `e^{+2 pi i jk/n}`.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo("fft length", len));
        }
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        // Each twiddle is evaluated directly so accuracy does not degrade with len.
        let twiddles = (0..len / 2)
            .map(|j| {
                let a = -TAU * j as f64 / len as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        Ok(Self { len, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, false);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, true);
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(buf.len(), n, "fft buffer length");
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let step = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Applies `op` to every 1-d line of a row-major array along `axis`.
///
/// `op` receives a contiguous scratch copy of the line and may modify it in
/// place; the result is written back.
pub fn for_each_line<F>(data: &mut [Complex64], shape: &[usize], axis: usize, mut op: F)
where
    F: FnMut(&mut [Complex64]),
{
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    debug_assert_eq!(data.len(), inner * outer * len);
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        let base = o * len * inner;
        for i in 0..inner {
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[base + j * inner + i];
            }
            op(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[base + j * inner + i] = *v;
            }
        }
    }
}

/// Maps every line along `axis` through `op`, which may change the line
/// length from `shape[axis]` to `new_len`. Returns the new array.
pub fn map_lines<F>(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    new_len: usize,
    mut op: F,
) -> Vec<Complex64>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; outer * new_len * inner];
    let mut src = vec![zero; len];
    let mut dst = vec![zero; new_len];
    for o in 0..outer {
        let ib = o * len * inner;
        let ob = o * new_len * inner;
        for i in 0..inner {
            for (j, v) in src.iter_mut().enumerate() {
                *v = data[ib + j * inner + i];
            }
            dst.iter_mut().for_each(|v| *v = zero);
            op(&src, &mut dst);
            for (j, v) in dst.iter().enumerate() {
                out[ob + j * inner + i] = *v;
            }
        }
    }
    out
}
