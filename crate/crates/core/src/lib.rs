//! Discrete-Fresnel-domain multiplexing for joint radar sensing and communication.
//!
//! The crate covers the transform pair, frame construction, radar and
//! communication channel models, radar receive processing (SISO, MIMO and
//! RadCom), communication equalization and the analysis utilities used to
//! characterize the waveform.

// `!(x > 0.0)` is used deliberately so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod comms;
mod dft;
pub mod error;
pub mod export;
pub mod framing;
pub mod fresnel;
pub mod matrix;
pub mod noise;
pub mod rxproc;

/// Propagation speed used for range and velocity conversions, in m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

pub use num_complex::Complex64;

pub use channel::{DopplerSign, RadarChannelConfig, Scatterer, Target};
pub use error::{Error, Result};
pub use framing::{MimoConfig, RadComFrameSpec, SampleStream, WaveformParams};
pub use fresnel::FresnelTransform;
pub use matrix::{ComplexMatrix, FresnelFrame, TimeFrame};
pub use rxproc::{CirMatrix, CirMode, Peak, RadarMode, RadarParams, RangeVelocityImage};
