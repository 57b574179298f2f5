//! Spectral numerics for the free Schrödinger flow on the product space
//! `T^m x R^n`.
//!
//! The torus factor `T^m` is the periodic cube `[0, 2pi)^m` with integer
//! frequencies `k`; the Euclidean factor `R^n` is represented by a periodic box
//! `[-L, L)^n` whose frequency grid has spacing `pi / L`. Fourier coefficients
//! follow the normalization
//!
//! ```text
//! f^(k, xi) = (2 pi)^-(m+n) \int f(x, y) e^{-i(k.x + xi.y)} dx dy
//! f(x, y)   = sum_k \int f^(k, xi) e^{i(k.x + xi.y)} d xi
//! ```
//!
//! so that `||f||_2^2 = (2 pi)^(m+n) * sum_k \int |f^|^2 d xi`.
//!
//! The crate is `no_std` (with `alloc`). IO, configuration and reporting live
//! in the `semiperiodic-lab` companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod axis;
pub mod container;
pub mod decoupling;
pub mod domain;
pub mod error;
pub mod extremizers;
pub mod fft;
pub mod field;
pub mod fit;
pub mod norms;
pub mod propagator;
pub mod quadrature;
pub mod tensor;
pub mod thresholds;

mod math;

pub use num_complex::Complex64;

pub use crate::domain::{make_domain, DomainSpec, TimePlan};
pub use crate::error::{Error, Result};
pub use crate::field::{to_field, to_spectrum, Field, Spectrum};
pub use crate::propagator::{evolve_trajectory, propagate, Trajectory};
pub use crate::tensor::{TensorField, TensorSpectrum};
pub use crate::thresholds::{threshold_table, Exponent, Rational, ThresholdTable};
pub use crate::fit::{fit_exponent, ExponentFit};
pub use crate::norms::{lp_space_norm, mixed_norm, modulation_norm, sobolev_norm};
pub use crate::decoupling::{cap_cover, cap_restrict, decoupling_ratio, CapCover, NeighborhoodData};
pub use crate::extremizers::{build_profile, calibrate_eps0, ProfileSpec};
