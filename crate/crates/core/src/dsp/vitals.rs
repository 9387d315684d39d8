use std::io::{self, Write};

use super::envelope::{decimate, extract_tone_envelope, lowpass};
use super::peaks::detect_peaks;
use super::spectral::{band_power_ratio, bandpass_fft, stft, Spectrogram};
use super::{as_f64, DspError};
use crate::scalar::Scalar;
use crate::signal::{BasebandSignal, RealSignal};

/// Receiver-chain settings.
#[derive(Debug, Clone, PartialEq)]
pub struct DspParams<T> {
    /// Width of each tone channel, Hz.
    pub channel_bandwidth_hz: T,
    /// Envelope rate after decimation, Hz.
    pub decimated_rate_hz: T,
    /// Cutoff of the envelope smoothing low-pass, Hz.
    pub lowpass_cutoff_hz: T,
    /// Respiration analysis band, Hz.
    pub band_lo_hz: T,
    pub band_hi_hz: T,
    /// Raised-cosine skirt of the analysis band-pass, Hz.
    pub band_taper_hz: T,
    /// Minimum time between breaths; 2 s caps the rate at 30 bpm.
    pub min_peak_spacing_s: T,
    /// Minimum peak prominence as a fraction of the record's range.
    pub min_prominence: T,
    /// Shortest record the estimator accepts, s.
    pub min_duration_s: T,
    pub stft_window_s: T,
    pub stft_hop_s: T,
    /// Envelope trimmed from each end of the record after tone extraction,
    /// where filter truncation transients of neighbouring tones live.
    pub edge_guard_s: T,
    /// A channel whose mean envelope sits this far below the strongest
    /// channel is treated as leakage and reports no breathing.
    pub crosstalk_floor_db: T,
}

impl<T: Scalar> Default for DspParams<T> {
    fn default() -> Self {
        Self {
            channel_bandwidth_hz: T::lit(200.0),
            decimated_rate_hz: T::lit(200.0),
            lowpass_cutoff_hz: T::lit(1.0),
            band_lo_hz: T::lit(0.1),
            band_hi_hz: T::lit(0.5),
            band_taper_hz: T::lit(0.05),
            min_peak_spacing_s: T::lit(2.0),
            min_prominence: T::lit(0.1),
            min_duration_s: T::lit(15.0),
            stft_window_s: T::lit(30.0),
            stft_hop_s: T::lit(1.0),
            edge_guard_s: T::lit(0.25),
            crosstalk_floor_db: T::lit(-15.0),
        }
    }
}

/// Respiration rate recovered from one envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct VitalsEstimate<T> {
    pub rate_bpm: T,
    pub peak_times: Vec<T>,
    /// Share of the envelope's non-DC power inside the respiration band.
    pub band_power_ratio: T,
}

impl<T: Scalar> VitalsEstimate<T> {
    pub fn write_report<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "rate_bpm: {}", self.rate_bpm)?;
        writeln!(out, "band_power_ratio: {}", self.band_power_ratio)?;
        writeln!(out, "peak_count: {}", self.peak_times.len())?;
        let times: Vec<String> = self.peak_times.iter().map(|t| t.to_string()).collect();
        writeln!(out, "peak_times_s: [{}]", times.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Respiration<T> {
    Detected(VitalsEstimate<T>),
    /// Fewer than two breaths were found.
    NoBreathDetected {
        band_power_ratio: T,
    },
}

impl<T: Scalar> Respiration<T> {
    pub fn estimate(&self) -> Option<&VitalsEstimate<T>> {
        match self {
            Respiration::Detected(e) => Some(e),
            Respiration::NoBreathDetected { .. } => None,
        }
    }

    pub fn rate_bpm(&self) -> Option<T> {
        self.estimate().map(|e| e.rate_bpm)
    }

    pub fn band_power_ratio(&self) -> T {
        match self {
            Respiration::Detected(e) => e.band_power_ratio,
            Respiration::NoBreathDetected { band_power_ratio } => *band_power_ratio,
        }
    }
}

/// [`estimate_respiration_rate_with`] using default parameters.
pub fn estimate_respiration_rate<T: Scalar>(
    signal: &RealSignal<T>,
) -> Result<Respiration<T>, DspError> {
    estimate_respiration_rate_with(signal, &DspParams::default())
}

/// Band-pass to the respiration band, pick breaths, and convert the span
/// between the first and last breath into a rate:
/// `60·(peaks - 1) / (t_last - t_first)`.
pub fn estimate_respiration_rate_with<T: Scalar>(
    signal: &RealSignal<T>,
    params: &DspParams<T>,
) -> Result<Respiration<T>, DspError> {
    let duration = signal.duration();
    if duration < params.min_duration_s {
        return Err(DspError::TooShort {
            duration_s: as_f64(duration),
            required_s: as_f64(params.min_duration_s),
        });
    }
    let ratio = band_power_ratio(signal, params.band_lo_hz, params.band_hi_hz);
    let band = bandpass_fft(
        signal,
        params.band_lo_hz,
        params.band_hi_hz,
        params.band_taper_hz,
    );
    let peaks = detect_peaks(&band, params.min_peak_spacing_s, params.min_prominence)?;
    if peaks.len() < 2 {
        return Ok(Respiration::NoBreathDetected {
            band_power_ratio: ratio,
        });
    }
    let span = peaks[peaks.len() - 1] - peaks[0];
    let rate_bpm = T::lit(60.0) * T::count(peaks.len() - 1) / span;
    Ok(Respiration::Detected(VitalsEstimate {
        rate_bpm,
        peak_times: peaks,
        band_power_ratio: ratio,
    }))
}

/// Everything the receiver derives from one tone channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResult<T> {
    pub tone_hz: T,
    /// Decimated, low-passed envelope: the estimate of `m(t)`.
    pub envelope: RealSignal<T>,
    /// Mean of `envelope`.
    pub level: T,
    pub spectrogram: Option<Spectrogram<T>>,
    pub respiration: Respiration<T>,
}

/// Extract, decimate, smooth and analyse the channel at `tone_hz`.
pub fn process_channel<T: Scalar>(
    signal: &BasebandSignal<T>,
    tone_hz: T,
    params: &DspParams<T>,
) -> Result<ChannelResult<T>, DspError> {
    let raw = extract_tone_envelope(signal, tone_hz, params.channel_bandwidth_hz)?;
    let raw = trim_edges(raw, params)?;
    let decimated = decimate(&raw, params.decimated_rate_hz)?;
    let envelope = lowpass(&decimated, params.lowpass_cutoff_hz)?;
    let respiration = estimate_respiration_rate_with(&envelope, params)?;

    let window = (params.stft_window_s * envelope.fs)
        .round()
        .to_usize()
        .unwrap_or(0);
    let hop = (params.stft_hop_s * envelope.fs)
        .round()
        .to_usize()
        .unwrap_or(0);
    let spectrogram = if window > 0 && window <= envelope.len() {
        let mean = envelope.mean();
        let centered = RealSignal {
            fs: envelope.fs,
            t0: envelope.t0,
            samples: envelope.samples.iter().map(|&v| v - mean).collect(),
        };
        Some(stft(&centered, window, hop)?)
    } else {
        None
    };
    Ok(ChannelResult {
        tone_hz,
        level: envelope.mean(),
        envelope,
        spectrogram,
        respiration,
    })
}

/// Drops `edge_guard_s` from both ends, rounded up to whole output samples
/// of the decimated rate so the decimated grid stays aligned to `t = 0`.
fn trim_edges<T: Scalar>(
    raw: RealSignal<T>,
    params: &DspParams<T>,
) -> Result<RealSignal<T>, DspError> {
    if !(params.edge_guard_s >= T::zero()) {
        return Err(DspError::InvalidParameter(
            "edge_guard_s must be >= 0".into(),
        ));
    }
    let step = (raw.fs / params.decimated_rate_hz)
        .round()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let guard = (params.edge_guard_s * raw.fs)
        .ceil()
        .to_usize()
        .unwrap_or(0);
    let guard = guard.div_ceil(step) * step;
    if 2 * guard >= raw.len() {
        return Err(DspError::TooShort {
            duration_s: as_f64(raw.duration()),
            required_s: as_f64(params.edge_guard_s * T::lit(2.0)),
        });
    }
    let t0 = raw.time(guard);
    let end = raw.len() - guard;
    Ok(RealSignal {
        fs: raw.fs,
        t0,
        samples: raw.samples[guard..end].to_vec(),
    })
}

/// Separates two persons carried on different tones of one receiver.
///
/// Each tone is processed independently; afterwards a channel whose level is
/// more than `crosstalk_floor_db` below the other is reported as
/// [`Respiration::NoBreathDetected`].
pub fn demux_two_person<T: Scalar>(
    signal: &BasebandSignal<T>,
    tones_hz: (T, T),
    params: &DspParams<T>,
) -> Result<[ChannelResult<T>; 2], DspError> {
    let (a, b) = tones_hz;
    let bw = params.channel_bandwidth_hz;
    if !(num_traits::Float::abs(a - b) > T::lit(2.0) * bw) {
        return Err(DspError::OverlappingChannels {
            a_hz: as_f64(a),
            b_hz: as_f64(b),
            bandwidth_hz: as_f64(bw),
        });
    }
    let mut channels = [
        process_channel(signal, a, params)?,
        process_channel(signal, b, params)?,
    ];
    let strongest = channels[0].level.max(channels[1].level);
    if strongest > T::zero() {
        for ch in &mut channels {
            let rel_db = T::lit(20.0) * (ch.level / strongest).log10();
            if rel_db < params.crosstalk_floor_db {
                ch.respiration = Respiration::NoBreathDetected {
                    band_power_ratio: ch.respiration.band_power_ratio(),
                };
            }
        }
    }
    Ok(channels)
}
