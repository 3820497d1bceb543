//! Core algorithms for universal decoding over Gaussian intersymbol-interference
//! channels.
//!
//! The crate is organized around the signal path of a block-coded ISI link:
//!
//! * [`spectral`] — unitary DFT/IDFT, banded Toeplitz channel operators, and a
//!   Szegő approximation diagnostic built on dense singular values.
//! * [`ensemble`] — the random-coding ensemble: i.i.d. Gaussian codewords
//!   truncated to an energy shell, with reproducible seeded sampling.
//! * [`channel`] — forward simulation of the ISI channel, optionally with a
//!   deterministic interference term expanded over an orthonormal basis.
//! * [`decoder`] — maximum-likelihood, δ-perturbed, and frequency-domain
//!   universal (GLRT/MMI-style) decoding metrics, including the backward-channel
//!   least-squares fit they are built on.
//! * [`typicality`] — executable versions of the analysis machinery:
//!   sufficient statistics, conditional ε-types, the `H_n(B)` predicate, and an
//!   importance-sampling estimator for conditional-type volumes.
//!
//! Everything here is `no_std` (with `alloc`) and deterministic: random draws
//! go through the splittable seeded generator in [`rng`], so identical seeds
//! reproduce identical bytes on every platform.

#![no_std]
#![allow(clippy::needless_range_loop)] // indexed loops run over several arrays at once here

extern crate alloc;

pub mod channel;
pub mod decoder;
pub mod ensemble;
pub mod error;
pub mod rng;
pub mod spectral;
pub mod typicality;

pub use channel::{ChannelParams, InterferenceModel};
pub use decoder::{BackwardParams, DecodeRule, DecoderVerdict};
pub use ensemble::{Codebook, EnsembleConfig};
pub use error::CoreError;
pub use rng::Rng;
pub use spectral::{Complex64, ComplexSpectrum, DftPlan, RealSignal, ToeplitzOperator};
pub use typicality::{SufficientStats, VolumeEstimate};
