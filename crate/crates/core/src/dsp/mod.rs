//! Receiver chain: tone extraction, envelope conditioning, time-frequency
//! analysis and respiration-rate estimation.

mod envelope;
pub mod fir;
mod peaks;
mod spectral;
mod vitals;

use thiserror::Error;

pub use envelope::{decimate, extract_tone_envelope, lowpass};
pub use peaks::{detect_peaks, find_peaks, Peak};
pub use spectral::{band_power_ratio, bandpass_fft, periodogram, stft, Spectrogram};
pub use vitals::{
    demux_two_person, estimate_respiration_rate, estimate_respiration_rate_with, process_channel,
    ChannelResult, DspParams, Respiration, VitalsEstimate,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("tone {tone_hz} Hz with bandwidth {bandwidth_hz} Hz does not fit below Nyquist ({nyquist_hz} Hz)")]
    ToneOutsideNyquist {
        tone_hz: f64,
        bandwidth_hz: f64,
        nyquist_hz: f64,
    },
    #[error("channels at {a_hz} Hz and {b_hz} Hz overlap for bandwidth {bandwidth_hz} Hz")]
    OverlappingChannels {
        a_hz: f64,
        b_hz: f64,
        bandwidth_hz: f64,
    },
    #[error("decimation from {from_hz} Hz to {to_hz} Hz is not an integer factor")]
    NonIntegerDecimation { from_hz: f64, to_hz: f64 },
    #[error("invalid cutoff {cutoff_hz} Hz for sample rate {fs_hz} Hz")]
    InvalidCutoff { cutoff_hz: f64, fs_hz: f64 },
    #[error("window {window_len} / hop {hop} invalid for {len} samples")]
    DegenerateFrames {
        window_len: usize,
        hop: usize,
        len: usize,
    },
    #[error("record lasts {duration_s} s, at least {required_s} s required")]
    TooShort { duration_s: f64, required_s: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn as_f64<T: crate::scalar::Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
