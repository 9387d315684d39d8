//! Short-time Fourier analysis and periodogram helpers.

use std::io::{self, Write};

use num_complex::Complex;
use num_traits::Float;
use rustfft::FftPlanner;

use super::fir::hann_periodic;
use super::DspError;
use crate::scalar::Scalar;
use crate::signal::RealSignal;

/// Magnitude time-frequency map of a real record.
///
/// Frame `i` covers samples `[i·hop, i·hop + window_len)`; its time stamp is
/// the frame center `t0 + (i·hop + window_len/2)/fs`. Bin `k` sits at
/// `k·fs/window_len` for `k = 0..=window_len/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram<T> {
    pub frame_times: Vec<T>,
    pub bin_freqs: Vec<T>,
    /// Row-major `frames × bins`.
    pub magnitudes: Vec<T>,
    pub window_len: usize,
    pub hop: usize,
}

impl<T: Scalar> Spectrogram<T> {
    pub fn frames(&self) -> usize {
        self.frame_times.len()
    }

    pub fn bins(&self) -> usize {
        self.bin_freqs.len()
    }

    pub fn frame(&self, i: usize) -> &[T] {
        let b = self.bins();
        &self.magnitudes[i * b..(i + 1) * b]
    }

    /// Strongest bin of frame `i` within `[lo_hz, hi_hz]`, refined by a
    /// parabola through the log-magnitudes of the neighbouring bins.
    pub fn ridge_frequency(&self, i: usize, lo_hz: T, hi_hz: T) -> Option<T> {
        let frame = self.frame(i);
        let (best, _) = self
            .bin_freqs
            .iter()
            .enumerate()
            .filter(|(_, &f)| f >= lo_hz && f <= hi_hz)
            .map(|(k, _)| (k, frame[k]))
            .fold(None::<(usize, T)>, |acc, (k, m)| match acc {
                Some((_, bm)) if bm >= m => acc,
                _ => Some((k, m)),
            })?;
        let df = self.bin_freqs.get(1).copied().unwrap_or(T::zero()) - self.bin_freqs[0];
        let base = self.bin_freqs[best];
        if best == 0 || best + 1 >= frame.len() {
            return Some(base);
        }
        let tiny = T::min_positive_value();
        let (a, b, c) = (
            frame[best - 1].max(tiny).ln(),
            frame[best].max(tiny).ln(),
            frame[best + 1].max(tiny).ln(),
        );
        let denom = a - T::lit(2.0) * b + c;
        if denom >= T::zero() {
            return Some(base);
        }
        let delta = (T::lit(0.5) * (a - c) / denom)
            .max(T::lit(-0.5))
            .min(T::lit(0.5));
        Some(base + delta * df)
    }

    /// Median ridge frequency across frames, in breaths per minute.
    pub fn ridge_rate_bpm(&self, lo_hz: T, hi_hz: T) -> Option<T> {
        let mut ridge: Vec<T> = (0..self.frames())
            .filter_map(|i| self.ridge_frequency(i, lo_hz, hi_hz))
            .collect();
        if ridge.is_empty() {
            return None;
        }
        ridge.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mid = ridge.len() / 2;
        let median = if ridge.len() % 2 == 1 {
            ridge[mid]
        } else {
            (ridge[mid - 1] + ridge[mid]) / T::lit(2.0)
        };
        Some(median * T::lit(60.0))
    }

    /// Long-format CSV: `frame_time,bin_freq,magnitude`, frames outermost.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "frame_time,bin_freq,magnitude")?;
        for (i, t) in self.frame_times.iter().enumerate() {
            for (f, m) in self.bin_freqs.iter().zip(self.frame(i)) {
                writeln!(out, "{t},{f},{m}")?;
            }
        }
        Ok(())
    }
}

/// Hann-windowed magnitude STFT.
pub fn stft<T: Scalar>(
    signal: &RealSignal<T>,
    window_len: usize,
    hop: usize,
) -> Result<Spectrogram<T>, DspError> {
    if window_len == 0 || hop == 0 || hop > window_len || window_len > signal.len() {
        return Err(DspError::DegenerateFrames {
            window_len,
            hop,
            len: signal.len(),
        });
    }
    let window = hann_periodic::<T>(window_len);
    let frames = 1 + (signal.len() - window_len) / hop;
    let bins = window_len / 2 + 1;
    let fft = FftPlanner::<T>::new().plan_fft_forward(window_len);

    let mut magnitudes = Vec::with_capacity(frames * bins);
    let mut frame_times = Vec::with_capacity(frames);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); window_len];
    for i in 0..frames {
        let start = i * hop;
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(signal.samples[start + k] * window[k], T::zero());
        }
        fft.process(&mut buf);
        magnitudes.extend(buf[..bins].iter().map(|c| c.norm()));
        frame_times
            .push(signal.t0 + (T::count(start) + T::count(window_len) / T::lit(2.0)) / signal.fs);
    }
    let bin_freqs = (0..bins)
        .map(|k| T::count(k) * signal.fs / T::count(window_len))
        .collect();
    Ok(Spectrogram {
        frame_times,
        bin_freqs,
        magnitudes,
        window_len,
        hop,
    })
}

/// One-sided periodogram `|X_k|²` of the mean-removed record with bin
/// frequencies `k·fs/n`.
pub fn periodogram<T: Scalar>(signal: &RealSignal<T>) -> (Vec<T>, Vec<T>) {
    let n = signal.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mean = signal.mean();
    let mut buf: Vec<Complex<T>> = signal
        .samples
        .iter()
        .map(|&x| Complex::new(x - mean, T::zero()))
        .collect();
    FftPlanner::<T>::new().plan_fft_forward(n).process(&mut buf);
    let bins = n / 2 + 1;
    let freqs = (0..bins)
        .map(|k| T::count(k) * signal.fs / T::count(n))
        .collect();
    let power = buf[..bins].iter().map(|c| c.norm_sqr()).collect();
    (freqs, power)
}

/// Fraction of the non-DC periodogram power inside `[lo_hz, hi_hz]`.
pub fn band_power_ratio<T: Scalar>(signal: &RealSignal<T>, lo_hz: T, hi_hz: T) -> T {
    let (freqs, power) = periodogram(signal);
    let mut band = T::zero();
    let mut total = T::zero();
    for (&f, &p) in freqs.iter().zip(&power).skip(1) {
        total = total + p;
        if f >= lo_hz && f <= hi_hz {
            band = band + p;
        }
    }
    if total > T::zero() {
        band / total
    } else {
        T::zero()
    }
}

/// Raised-cosine band gain: 1 on `[lo, hi]`, tapering to 0 over `taper` Hz
/// on either side.
fn band_gain<T: Scalar>(f: T, lo: T, hi: T, taper: T) -> T {
    let f = Float::abs(f);
    let half = T::lit(0.5);
    if f >= lo && f <= hi {
        T::one()
    } else if f < lo && f > lo - taper {
        half + half * (T::PI() * (lo - f) / taper).cos()
    } else if f > hi && f < hi + taper {
        half + half * (T::PI() * (f - hi) / taper).cos()
    } else {
        T::zero()
    }
}

/// Zero-phase band-pass by spectral masking.
///
/// The record is linearly detrended and extended by odd reflection on both
/// sides before the FFT so that the circular wrap does not ring at the edges.
pub fn bandpass_fft<T: Scalar>(
    signal: &RealSignal<T>,
    lo_hz: T,
    hi_hz: T,
    taper_hz: T,
) -> RealSignal<T> {
    let n = signal.len();
    if n < 3 {
        return RealSignal {
            fs: signal.fs,
            t0: signal.t0,
            samples: vec![T::zero(); n],
        };
    }
    // least-squares line through the samples
    let t_mean = T::count(n - 1) / T::lit(2.0);
    let y_mean = signal.mean();
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (i, &y) in signal.samples.iter().enumerate() {
        let dt = T::count(i) - t_mean;
        sxy = sxy + dt * (y - y_mean);
        sxx = sxx + dt * dt;
    }
    let slope = if sxx > T::zero() {
        sxy / sxx
    } else {
        T::zero()
    };
    let detrended: Vec<T> = signal
        .samples
        .iter()
        .enumerate()
        .map(|(i, &y)| y - y_mean - slope * (T::count(i) - t_mean))
        .collect();

    let pad = n - 1;
    let total = n + 2 * pad;
    let first = detrended[0];
    let last = detrended[n - 1];
    let mut buf: Vec<Complex<T>> = Vec::with_capacity(total);
    for k in (1..=pad).rev() {
        buf.push(Complex::new(T::lit(2.0) * first - detrended[k], T::zero()));
    }
    buf.extend(detrended.iter().map(|&v| Complex::new(v, T::zero())));
    for k in 1..=pad {
        buf.push(Complex::new(
            T::lit(2.0) * last - detrended[n - 1 - k],
            T::zero(),
        ));
    }

    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(total).process(&mut buf);
    let df = signal.fs / T::count(total);
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if k <= total / 2 {
            k as f64
        } else {
            k as f64 - total as f64
        };
        let f = T::lit(kk) * df;
        *c = *c * band_gain(f, lo_hz, hi_hz, taper_hz);
    }
    planner.plan_fft_inverse(total).process(&mut buf);
    let scale = T::one() / T::count(total);
    RealSignal {
        fs: signal.fs,
        t0: signal.t0,
        samples: buf[pad..pad + n].iter().map(|c| c.re * scale).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn sine(fs: f64, secs: f64, f: f64) -> RealSignal<f64> {
        RealSignal::from_fn(fs, (fs * secs) as usize, |t| (TAU * f * t).sin())
    }

    #[test]
    fn constant_input_has_only_dc() {
        let s = RealSignal::new(200.0, vec![2.0; 2000]).unwrap();
        let spec = stft(&s, 400, 100).unwrap();
        assert_eq!(spec.frames(), 17);
        assert_eq!(spec.bins(), 201);
        for i in 0..spec.frames() {
            let frame = spec.frame(i);
            assert!((frame[0] - 2.0 * 200.0).abs() < 1e-9);
            assert!(frame[2..].iter().all(|&m| m < 1e-9));
        }
    }

    #[test]
    fn ridge_tracks_quarter_hertz() {
        let spec = stft(&sine(200.0, 120.0, 0.25), 12_000, 200).unwrap();
        for i in 0..spec.frames() {
            let f = spec.ridge_frequency(i, 0.1, 0.5).unwrap();
            assert!((f - 0.25).abs() < 1e-3, "frame {i}: {f}");
        }
        assert!((spec.ridge_rate_bpm(0.1, 0.5).unwrap() - 15.0).abs() < 0.06);
    }

    #[test]
    fn frame_parseval() {
        let s = RealSignal::from_fn(200.0, 4000, |t| {
            (TAU * 0.3 * t).sin() + 0.1 * (TAU * 7.0 * t).cos() + 0.5
        });
        let n = 512;
        let spec = stft(&s, n, 128).unwrap();
        let w = hann_periodic::<f64>(n);
        for i in 0..spec.frames() {
            let start = i * 128;
            let time: f64 = (0..n).map(|k| (s.samples[start + k] * w[k]).powi(2)).sum();
            // one-sided bins stand in for their mirror images
            let freq: f64 = spec
                .frame(i)
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    if k == 0 || k == n / 2 {
                        m * m
                    } else {
                        2.0 * m * m
                    }
                })
                .sum::<f64>()
                / n as f64;
            assert!(((time - freq) / time).abs() <= 1e-9);
        }
    }

    #[test]
    fn degenerate_frames_rejected() {
        let s = sine(200.0, 1.0, 1.0);
        assert!(stft(&s, 0, 1).is_err());
        assert!(stft(&s, 100, 0).is_err());
        assert!(stft(&s, 100, 101).is_err());
        assert!(stft(&s, 201, 100).is_err());
    }

    #[test]
    fn band_power_ratio_separates_in_and_out_of_band() {
        assert!(band_power_ratio(&sine(200.0, 60.0, 0.25), 0.1, 0.5) > 0.99);
        assert!(band_power_ratio(&sine(200.0, 60.0, 5.0), 0.1, 0.5) < 1e-6);
        let flat = RealSignal::new(200.0, vec![1.0; 100]).unwrap();
        assert_eq!(band_power_ratio(&flat, 0.1, 0.5), 0.0);
    }

    #[test]
    fn bandpass_keeps_band_and_drops_drift() {
        let s = RealSignal::from_fn(200.0, 12_000, |t| {
            (TAU * 0.25 * t).sin() + 0.05 * t + (TAU * 3.0 * t).sin()
        });
        let out = bandpass_fft(&s, 0.1, 0.5, 0.05);
        // the ramp's edge residue leaks into the band near the ends
        let skip = 2000;
        let err = out.samples[skip..out.len() - skip]
            .iter()
            .enumerate()
            .map(|(i, v)| (v - (TAU * 0.25 * s.time(i + skip)).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.02, "{err}");
    }
}
