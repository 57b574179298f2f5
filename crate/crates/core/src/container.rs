//! Flat binary container for spectra, fields and tensor data.
//!
//! A UTF-8 text header of `key: value` lines terminated by `end`, followed by
//! little-endian `f64` pairs `(re, im)` in row-major order:
//!
//! ```text
//! semiperiodic-container 1
//! kind: spectrum
//! m: 1
//! n: 1
//! M: 16
//! L: 25.132741228718345
//! N_R: 256
//! N_T: 64
//! lengths: 33,256
//! end
//! ```
//!
//! For `kind: tensor` the payload is the per-axis factors one after another
//! and `lengths` lists the factor lengths; otherwise `lengths` is the array
//! shape. The time plan is not stored; decoded domains carry
//! [`TimePlan::instant`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_complex::Complex64;

use crate::axis::AxisSpectrum;
use crate::domain::{make_domain, DomainSpec, TimePlan};
use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};
use crate::tensor::TensorSpectrum;

const MAGIC: &str = "semiperiodic-container 1";

/// Decoded container contents.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Spectrum(Spectrum),
    Field(Field),
    Tensor(TensorSpectrum),
}

fn header(kind: &str, d: &DomainSpec, lengths: &[usize]) -> String {
    let mut s = String::new();
    let lens: Vec<String> = lengths.iter().map(|l| format!("{l}")).collect();
    // Writing into a String cannot fail.
    let _ = write!(
        s,
        "{MAGIC}\nkind: {kind}\nm: {}\nn: {}\nM: {}\nL: {}\nN_R: {}\nN_T: {}\nlengths: {}\nend\n",
        d.m,
        d.n,
        d.torus_modes,
        d.box_halfwidth,
        d.euclid_points,
        d.torus_points(),
        lens.join(",")
    );
    s
}

fn push_values<'a>(out: &mut Vec<u8>, values: impl Iterator<Item = &'a Complex64>) {
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

pub fn encode_spectrum(s: &Spectrum) -> Vec<u8> {
    let mut out = header("spectrum", &s.domain, &s.domain.spectral_shape()).into_bytes();
    push_values(&mut out, s.coeffs.iter());
    out
}

pub fn encode_field(f: &Field) -> Vec<u8> {
    let mut out = header("field", &f.domain, &f.domain.spatial_shape()).into_bytes();
    push_values(&mut out, f.samples.iter());
    out
}

pub fn encode_tensor(t: &TensorSpectrum) -> Vec<u8> {
    let lengths: Vec<usize> = t.factors.iter().map(|f| f.coeffs.len()).collect();
    let mut out = header("tensor", &t.domain, &lengths).into_bytes();
    for f in &t.factors {
        push_values(&mut out, f.coeffs.iter());
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

struct Header<'a> {
    kind: &'a str,
    domain: DomainSpec,
    lengths: Vec<usize>,
}

fn parse_header(text: &str) -> Result<Header<'_>> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing container magic line"));
    }
    let mut fields: Vec<(&str, &str)> = Vec::new();
    for line in lines {
        if line == "end" {
            break;
        }
        let (k, v) = line.split_once(": ").ok_or_else(|| bad(format!("malformed header line {line:?}")))?;
        fields.push((k, v));
    }
    let get = |key: &str| {
        fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).ok_or_else(|| bad(format!("header lacks {key}")))
    };
    let int = |key: &str| -> Result<usize> { get(key)?.parse().map_err(|_| bad(format!("{key} is not an integer"))) };
    let l: f64 = get("L")?.parse().map_err(|_| bad("L is not a number"))?;
    let domain = make_domain(int("m")?, int("n")?, int("M")?, l, int("N_R")?, TimePlan::instant())?
        .with_torus_points(int("N_T")?)?;
    let lengths = get("lengths")?
        .split(',')
        .map(|v| v.parse::<usize>().map_err(|_| bad("lengths must be integers")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Header { kind: get("kind")?, domain, lengths })
}

fn read_values(bytes: &[u8], count: usize) -> Result<Vec<Complex64>> {
    if bytes.len() != 16 * count {
        return Err(bad(format!("payload holds {} bytes, expected {}", bytes.len(), 16 * count)));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let mut re = [0u8; 8];
            let mut im = [0u8; 8];
            re.copy_from_slice(&c[..8]);
            im.copy_from_slice(&c[8..]);
            Complex64::new(f64::from_le_bytes(re), f64::from_le_bytes(im))
        })
        .collect())
}

pub fn decode(bytes: &[u8]) -> Result<Payload> {
    const END: &[u8] = b"\nend\n";
    let split = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| bad("header is not terminated"))?
        + END.len();
    let text = core::str::from_utf8(&bytes[..split]).map_err(|_| bad("header is not UTF-8"))?;
    let h = parse_header(text)?;
    let body = &bytes[split..];
    let total: usize = match h.kind {
        "tensor" => h.lengths.iter().sum(),
        _ => h.lengths.iter().product(),
    };
    let values = read_values(body, total)?;
    match h.kind {
        "spectrum" => {
            if h.lengths != h.domain.spectral_shape() {
                return Err(bad("spectrum shape disagrees with the domain"));
            }
            Ok(Payload::Spectrum(Spectrum::new(h.domain, values)?))
        }
        "field" => {
            if h.lengths != h.domain.spatial_shape() {
                return Err(bad("field shape disagrees with the domain"));
            }
            Ok(Payload::Field(Field::new(h.domain, values)?))
        }
        "tensor" => {
            let axes = h.domain.axes();
            if axes.len() != h.lengths.len() {
                return Err(bad("tensor factor count disagrees with the domain"));
            }
            let mut rest = &values[..];
            let mut factors = Vec::with_capacity(axes.len());
            for (axis, len) in axes.into_iter().zip(&h.lengths) {
                let (head, tail) = rest.split_at(*len);
                factors.push(AxisSpectrum::new(axis, head.to_vec())?);
                rest = tail;
            }
            Ok(Payload::Tensor(TensorSpectrum::new(&h.domain, factors)?))
        }
        other => Err(bad(format!("unknown container kind {other:?}"))),
    }
}

/// FNV-1a hash of the discretization parameters, stable across builds.
pub fn domain_fingerprint(d: &DomainSpec) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for v in [d.m, d.n, d.torus_modes, d.euclid_points, d.torus_points()] {
        eat(&(v as u64).to_le_bytes());
    }
    eat(&d.box_halfwidth.to_bits().to_le_bytes());
    h
}
