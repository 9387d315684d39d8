use num_complex::Complex;
use num_traits::Float;

use super::fir::{design_lowpass, filtfilt, filtfilt_real, lowpass_len};
use super::{as_f64, DspError};
use crate::scalar::Scalar;
use crate::signal::{BasebandSignal, RealSignal};

/// Magnitude of the component of `signal` within `tone_hz ± bandwidth_hz/2`.
///
/// The record is mixed down by `e^{-j2π·tone·t}` and then low-passed at
/// `bandwidth/2` forward and backward; at baseband the first pass is the
/// channel band-pass and the second the envelope smoother. The returned
/// envelope keeps the input sample rate and time base.
pub fn extract_tone_envelope<T: Scalar>(
    signal: &BasebandSignal<T>,
    tone_hz: T,
    bandwidth_hz: T,
) -> Result<RealSignal<T>, DspError> {
    let nyquist = signal.fs / T::lit(2.0);
    if !(bandwidth_hz > T::zero())
        || !tone_hz.is_finite()
        || Float::abs(tone_hz) + bandwidth_hz / T::lit(2.0) >= nyquist
    {
        return Err(DspError::ToneOutsideNyquist {
            tone_hz: as_f64(tone_hz),
            bandwidth_hz: as_f64(bandwidth_hz),
            nyquist_hz: as_f64(nyquist),
        });
    }
    let cycles_per_sample = tone_hz / signal.fs;
    let start_cycles = tone_hz * signal.t0;
    let mixed: Vec<Complex<T>> = signal
        .samples
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let cycles = (start_cycles + cycles_per_sample * T::count(i)).fract();
            s * Complex::from_polar(T::one(), -T::two_pi() * cycles)
        })
        .collect();
    let cutoff = bandwidth_hz / T::lit(2.0);
    let taps = design_lowpass(cutoff, signal.fs, lowpass_len(cutoff, signal.fs));
    let baseband = filtfilt(&mixed, &taps);
    Ok(RealSignal {
        fs: signal.fs,
        t0: signal.t0,
        samples: baseband.iter().map(|c| c.norm()).collect(),
    })
}

/// Anti-alias low-pass at `0.4·target_fs`, then keep every `fs/target_fs`-th sample.
pub fn decimate<T: Scalar>(
    signal: &RealSignal<T>,
    target_fs: T,
) -> Result<RealSignal<T>, DspError> {
    let err = || DspError::NonIntegerDecimation {
        from_hz: as_f64(signal.fs),
        to_hz: as_f64(target_fs),
    };
    if !(target_fs > T::zero()) || target_fs > signal.fs {
        return Err(err());
    }
    let ratio = signal.fs / target_fs;
    let factor = ratio.round();
    if Float::abs(ratio - factor) > T::lit(1e-9) * ratio {
        return Err(err());
    }
    let factor = factor.to_usize().ok_or_else(err)?;
    if factor == 1 {
        return Ok(signal.clone());
    }
    let cutoff = T::lit(0.4) * target_fs;
    let taps = design_lowpass(cutoff, signal.fs, lowpass_len(cutoff, signal.fs));
    let filtered = filtfilt_real(&signal.samples, &taps);
    Ok(RealSignal {
        fs: target_fs,
        t0: signal.t0,
        samples: filtered.into_iter().step_by(factor).collect(),
    })
}

/// Zero-phase windowed-sinc low-pass (see [`super::fir`] for the design).
pub fn lowpass<T: Scalar>(signal: &RealSignal<T>, cutoff_hz: T) -> Result<RealSignal<T>, DspError> {
    if !(cutoff_hz > T::zero()) || cutoff_hz >= signal.fs / T::lit(2.0) {
        return Err(DspError::InvalidCutoff {
            cutoff_hz: as_f64(cutoff_hz),
            fs_hz: as_f64(signal.fs),
        });
    }
    let taps = design_lowpass(cutoff_hz, signal.fs, lowpass_len(cutoff_hz, signal.fs));
    Ok(RealSignal {
        fs: signal.fs,
        t0: signal.t0,
        samples: filtfilt_real(&signal.samples, &taps),
    })
}
