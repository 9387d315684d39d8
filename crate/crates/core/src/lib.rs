//! Channel model and receiver for respiration sensing through a 1-bit
//! reconfigurable intelligent surface.
//!
//! The crate covers the surface itself (geometry, coding patterns, far-field
//! array factor), space-time coding that places beams on harmonic tones, a
//! scene simulator producing the complex baseband record at the receiver, and
//! the DSP chain that recovers per-person breathing rates from it.
//!
//! Everything numeric is generic over [`Scalar`], implemented for `f32` and
//! `f64`. The `*F64` aliases below name the common double precision types.

pub mod dsp;
pub mod geometry;
pub mod ris;
pub mod scalar;
pub mod scene;
pub mod signal;
pub mod stc;

pub use dsp::{
    demux_two_person, estimate_respiration_rate, process_channel, ChannelResult, DspError,
    DspParams, Respiration, Spectrogram, VitalsEstimate,
};
pub use geometry::Vec3;
pub use ris::{Bit, CodingPattern, GainDb, MetaAtomProfile, RisArray, RisError};
pub use scalar::Scalar;
pub use scene::{
    add_awgn, path_gain, synthesize_clean, synthesize_received, BreathingTarget, Propagation,
    RisMode, Scene, SceneError, TxConfig,
};
pub use signal::{BasebandSignal, RealSignal, SignalError};
pub use stc::{HarmonicSpectrum, SpaceTimeCode, StcError};

pub type Vec3F64 = Vec3<f64>;
pub type RisArrayF64 = RisArray<f64>;
pub type SpaceTimeCodeF64 = SpaceTimeCode<f64>;
pub type SceneF64 = Scene<f64>;
pub type BreathingTargetF64 = BreathingTarget<f64>;
pub type BasebandSignalF64 = BasebandSignal<f64>;
pub type RealSignalF64 = RealSignal<f64>;
pub type DspParamsF64 = DspParams<f64>;
pub type SceneF32 = Scene<f32>;
pub type BasebandSignalF32 = BasebandSignal<f32>;
