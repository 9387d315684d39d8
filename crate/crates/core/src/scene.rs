//! Synthetic received signal for a transmitter, a reflecting surface and
//! breathing persons.
//!
//! The transmitter radiates a baseband tone `A·e^{j2π·f_tone·t}` on the carrier.
//! Each person is a point scatterer whose reflectivity follows the breathing
//! waveform `m(t)`, so the echo reaching the receiver is amplitude modulated.
//! A person is illuminated by the line-of-sight path from the transmitter and,
//! when a surface is configured, by the surface. A space-time-coded surface
//! moves its contribution onto harmonic tones `f_tone + q/T0`.

use num_complex::Complex;
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::geometry::{wavelength, wavenumber, Vec3};
use crate::ris::{
    synthesize_focus_pattern_with_offset, CodingPattern, MetaAtomProfile, RisArray, RisError,
};
use crate::scalar::Scalar;
use crate::signal::BasebandSignal;
use crate::stc::{HarmonicSpectrum, SpaceTimeCode, StcError};

/// Harmonics synthesized for a space-time-coded surface: `|q| ≤ 5`.
pub const HARMONIC_TRUNCATION: i32 = 5;

/// Clearance kept between the highest synthesized tone and Nyquist, Hz.
pub const NYQUIST_GUARD_HZ: f64 = 200.0;

/// Carrier of the reference setup, `3.5 GHz + 1 kHz`.
pub const DEFAULT_CARRIER_HZ: f64 = 3.500_001e9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("invalid scene: {0}")]
    Invalid(String),
    #[error("sample rate {fs_hz} Hz cannot carry a tone at {tone_hz} Hz (needs |f| + {guard_hz} Hz guard below fs/2)")]
    Nyquist {
        fs_hz: f64,
        tone_hz: f64,
        guard_hz: f64,
    },
    #[error("coincident points: {0}")]
    Coincident(&'static str),
    #[error("{0} lies behind the array plane")]
    BehindArray(String),
    #[error("signal has zero power, SNR is undefined")]
    ZeroPowerSignal,
    #[error("signal is empty")]
    EmptySignal,
    #[error(transparent)]
    Ris(#[from] RisError),
    #[error(transparent)]
    Stc(#[from] StcError),
}

fn f64_of<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Transmit tone and radio placement.
#[derive(Debug, Clone, PartialEq)]
pub struct TxConfig<T> {
    pub tone_offset_hz: T,
    pub amplitude: T,
    pub carrier_hz: T,
    pub tx_pos: Vec3<T>,
    pub rx_pos: Vec3<T>,
}

impl<T: Scalar> TxConfig<T> {
    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.tone_offset_hz > T::zero()) {
            return Err(SceneError::Invalid("tone_offset must be > 0".into()));
        }
        if !(self.amplitude > T::zero()) {
            return Err(SceneError::Invalid("amplitude A must be > 0".into()));
        }
        if !(self.carrier_hz > T::zero()) {
            return Err(SceneError::Invalid("carrier must be > 0".into()));
        }
        if !self.tx_pos.is_finite() || !self.rx_pos.is_finite() {
            return Err(SceneError::Invalid("radio positions must be finite".into()));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for TxConfig<T> {
    /// 1 kHz tone, unit amplitude, radios half a meter in front of a surface
    /// at the origin facing `+x`, receiver 30 cm above the transmitter.
    fn default() -> Self {
        Self {
            tone_offset_hz: T::lit(1000.0),
            amplitude: T::one(),
            carrier_hz: T::lit(DEFAULT_CARRIER_HZ),
            tx_pos: Vec3::from_f64([0.5, 0.0, 0.0]),
            rx_pos: Vec3::from_f64([0.5, 0.0, 0.3]),
        }
    }
}

/// A breathing person modeled as a point reflector.
#[derive(Debug, Clone, PartialEq)]
pub struct BreathingTarget<T> {
    pub position: Vec3<T>,
    /// Breathing frequency `f_b`, Hz.
    pub rate_hz: T,
    /// Peak chest displacement `Δd`, m.
    pub displacement_m: T,
    /// Baseline reflectivity `μ0`.
    pub baseline: T,
    /// Reflectivity swing `μ1` at full displacement.
    pub mod_depth: T,
    pub phase_offset: T,
}

impl<T: Scalar> BreathingTarget<T> {
    /// Target with the default chest model (`Δd` = 5 mm, `μ0` = 1, `μ1` = 0.2).
    pub fn new(position: Vec3<T>, rate_bpm: T) -> Self {
        Self {
            position,
            rate_hz: rate_bpm / T::lit(60.0),
            displacement_m: T::lit(0.005),
            baseline: T::one(),
            mod_depth: T::lit(0.2),
            phase_offset: T::zero(),
        }
    }

    /// Target at azimuth `angle_deg` and `range_m` from the array center.
    pub fn at_azimuth(array: &RisArray<T>, angle_deg: T, range_m: T, rate_bpm: T) -> Self {
        Self::new(
            array.center() + array.azimuth_direction(angle_deg) * range_m,
            rate_bpm,
        )
    }

    pub fn rate_bpm(&self) -> T {
        self.rate_hz * T::lit(60.0)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.rate_hz > T::zero()) {
            return Err(SceneError::Invalid("breathing rate f_b must be > 0".into()));
        }
        if !(self.displacement_m > T::zero()) {
            return Err(SceneError::Invalid("chest displacement must be > 0".into()));
        }
        if !(self.baseline > T::zero()) {
            return Err(SceneError::Invalid("baseline mu0 must be > 0".into()));
        }
        if !(self.mod_depth >= T::zero() && self.mod_depth < self.baseline) {
            return Err(SceneError::Invalid(
                "mod_depth must satisfy 0 <= mu1 < mu0".into(),
            ));
        }
        if !self.position.is_finite() || !self.phase_offset.is_finite() {
            return Err(SceneError::Invalid(
                "target position/phase must be finite".into(),
            ));
        }
        Ok(())
    }

    /// `Δd·sin(2π·f_b·t + φ)`.
    pub fn chest_displacement(&self, t: T) -> T {
        self.displacement_m * (T::two_pi() * self.rate_hz * t + self.phase_offset).sin()
    }

    /// `m(t) = μ0 + μ1·displacement(t)/Δd`.
    pub fn modulation(&self, t: T) -> T {
        self.baseline + self.mod_depth * self.chest_displacement(t) / self.displacement_m
    }
}

pub fn chest_displacement<T: Scalar>(target: &BreathingTarget<T>, t: T) -> T {
    target.chest_displacement(t)
}

pub fn modulation_waveform<T: Scalar>(target: &BreathingTarget<T>, t: T) -> T {
    target.modulation(t)
}

/// What the surface is doing during the record.
#[derive(Debug, Clone, PartialEq)]
pub enum RisMode<T> {
    Absent,
    Sdc(CodingPattern),
    Stc(SpaceTimeCode<T>),
}

/// How the surface contribution between two points is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagation {
    /// Array factor between plane-wave directions seen from the array center,
    /// times the scalar path gains to and from the center.
    #[default]
    FarField,
    /// Exact spherical paths summed element by element.
    NearField,
}

/// Free-space gain `λ/(4π·r)·e^{-j2π·f·r/c}` between two points.
pub fn path_gain<T: Scalar>(a: Vec3<T>, b: Vec3<T>, freq_hz: T) -> Result<Complex<T>, SceneError> {
    let r = a.distance(b);
    if !(r > T::zero()) {
        return Err(SceneError::Coincident("path endpoints"));
    }
    let amplitude = wavelength(freq_hz) / (T::lit(4.0) * T::PI() * r);
    Ok(Complex::from_polar(amplitude, -wavenumber(freq_hz) * r))
}

/// Complete description of one synthetic record.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T> {
    pub tx: TxConfig<T>,
    pub array: RisArray<T>,
    pub ris_mode: RisMode<T>,
    pub targets: Vec<BreathingTarget<T>>,
    /// Static transmitter-to-receiver leakage.
    pub direct_path: bool,
    /// Also impose the round-trip phase of the chest displacement.
    pub phase_modulation: bool,
    pub propagation: Propagation,
    /// Receiver SNR relative to the mean received power; `None` is noiseless.
    pub snr_db: Option<T>,
    pub duration_s: T,
    pub sample_rate_hz: T,
    pub seed: u64,
}

impl<T: Scalar> Scene<T> {
    /// Checks every scene invariant, naming the first one violated.
    pub fn validate(&self) -> Result<(), SceneError> {
        self.tx.validate()?;
        if !(self.duration_s > T::zero()) || !(self.sample_rate_hz > T::zero()) {
            return Err(SceneError::Invalid(
                "duration and sample rate must be > 0".into(),
            ));
        }
        if let Some(snr) = self.snr_db {
            if snr.is_nan() {
                return Err(SceneError::Invalid("snr_db must be a number".into()));
            }
        }
        let nyquist = self.sample_rate_hz / T::lit(2.0);
        let guard = T::lit(NYQUIST_GUARD_HZ);
        for f in self.tone_frequencies() {
            if Float::abs(f) + guard >= nyquist {
                return Err(SceneError::Nyquist {
                    fs_hz: f64_of(self.sample_rate_hz),
                    tone_hz: f64_of(f),
                    guard_hz: NYQUIST_GUARD_HZ,
                });
            }
        }
        if self.tx.tx_pos.distance(self.tx.rx_pos) <= T::zero() {
            return Err(SceneError::Coincident("transmitter and receiver"));
        }
        match &self.ris_mode {
            RisMode::Absent => {}
            RisMode::Sdc(p) => p.check_matches(&self.array)?,
            RisMode::Stc(c) => c.check_matches(&self.array)?,
        }
        let has_ris = !matches!(self.ris_mode, RisMode::Absent);
        if has_ris && !(self.array.height_of(self.tx.tx_pos) > T::zero()) {
            return Err(SceneError::BehindArray("transmitter".into()));
        }
        for (i, target) in self.targets.iter().enumerate() {
            target.validate()?;
            if self.duration_s * target.rate_hz < T::lit(3.0) {
                return Err(SceneError::Invalid(format!(
                    "target {i}: duration*f_b must be >= 3 breathing cycles"
                )));
            }
            if target.position.distance(self.array.center()) <= T::zero() {
                return Err(SceneError::Coincident("target and array"));
            }
            if target.position.distance(self.tx.tx_pos) <= T::zero()
                || target.position.distance(self.tx.rx_pos) <= T::zero()
            {
                return Err(SceneError::Coincident("target and radio"));
            }
            if has_ris && !(self.array.height_of(target.position) > T::zero()) {
                return Err(SceneError::BehindArray(format!("target {i}")));
            }
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.duration_s * self.sample_rate_hz)
            .round()
            .to_usize()
            .unwrap_or(0)
    }

    /// Harmonic indices carrying energy in this mode.
    pub fn harmonics(&self) -> Vec<i32> {
        match self.ris_mode {
            RisMode::Stc(_) => (-HARMONIC_TRUNCATION..=HARMONIC_TRUNCATION).collect(),
            _ => vec![0],
        }
    }

    /// Frequency offset of harmonic `q`, Hz.
    pub fn harmonic_offset_hz(&self, q: i32) -> T {
        match &self.ris_mode {
            RisMode::Stc(code) => T::from_i32(q).unwrap() * code.harmonic_spacing_hz(),
            _ => T::zero(),
        }
    }

    /// Every baseband tone frequency the synthesis may emit.
    pub fn tone_frequencies(&self) -> Vec<T> {
        self.harmonics()
            .into_iter()
            .map(|q| self.tx.tone_offset_hz + self.harmonic_offset_hz(q))
            .collect()
    }

    fn carrier(&self) -> T {
        self.tx.carrier_hz
    }

    /// Surface contribution from the transmitter to `point` for per-element
    /// weights `w`, including the element scattering gain.
    fn surface_gain(
        &self,
        weights: &[Complex<T>],
        point: Vec3<T>,
    ) -> Result<Complex<T>, SceneError> {
        let array = &self.array;
        let f = self.carrier();
        let g = array.element_gain();
        match self.propagation {
            Propagation::FarField => {
                let c = array.center();
                let inc = (self.tx.tx_pos - c)
                    .normalized()
                    .ok_or(SceneError::Coincident("transmitter and array"))?;
                let obs = (point - c)
                    .normalized()
                    .ok_or(SceneError::Coincident("target and array"))?;
                let af = crate::ris::weighted_array_factor(array, weights, inc, obs)?;
                let legs = path_gain(self.tx.tx_pos, c, f)? * path_gain(c, point, f)?;
                Ok(legs * af * g)
            }
            Propagation::NearField => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for m in 0..array.rows() {
                    for n in 0..array.cols() {
                        let w = weights[m * array.cols() + n];
                        if w.norm_sqr() == T::zero() {
                            continue;
                        }
                        let r = array.element_position(m, n);
                        acc = acc + w * path_gain(self.tx.tx_pos, r, f)? * path_gain(r, point, f)?;
                    }
                }
                Ok(acc * g)
            }
        }
    }

    /// Complex field incident on target `index`, per harmonic `q`
    /// (unit transmit amplitude). `q = 0` includes the line-of-sight path.
    pub fn illumination(&self, index: usize) -> Result<Vec<(i32, Complex<T>)>, SceneError> {
        let target = self
            .targets
            .get(index)
            .ok_or_else(|| SceneError::Invalid(format!("no target {index}")))?;
        let direct = path_gain(self.tx.tx_pos, target.position, self.carrier())?;
        let profile = MetaAtomProfile::<T>::default();
        match &self.ris_mode {
            RisMode::Absent => Ok(vec![(0, direct)]),
            RisMode::Sdc(pattern) => {
                let w = pattern.coefficients(&profile);
                Ok(vec![(0, direct + self.surface_gain(&w, target.position)?)])
            }
            RisMode::Stc(code) => {
                let spectrum = HarmonicSpectrum::of_code(
                    code,
                    &profile,
                    -HARMONIC_TRUNCATION..=HARMONIC_TRUNCATION,
                )?;
                let mut out = Vec::new();
                for q in spectrum.q_range() {
                    let w = spectrum.harmonic(q).expect("q within computed range");
                    let mut field = self.surface_gain(w, target.position)?;
                    if q == 0 {
                        field = field + direct;
                    }
                    out.push((q, field));
                }
                Ok(out)
            }
        }
    }

    /// Focusing pattern on target `index` that also respects the
    /// line-of-sight field. The 1-bit quantization reference is free: the
    /// four choices `k·π/2` have the same surface gain but different phase
    /// against the direct path, so the one giving the strongest total field
    /// at the target is kept.
    pub fn focused_pattern(&self, index: usize) -> Result<CodingPattern, SceneError> {
        let target = self
            .targets
            .get(index)
            .ok_or_else(|| SceneError::Invalid(format!("no target {index}")))?;
        let mut probe = self.clone();
        let mut best: Option<(CodingPattern, T)> = None;
        for k in 0..4 {
            let offset = T::FRAC_PI_2() * T::count(k);
            let pattern = synthesize_focus_pattern_with_offset(
                &self.array,
                self.tx.tx_pos,
                target.position,
                offset,
            )?;
            probe.ris_mode = RisMode::Sdc(pattern.clone());
            let power = probe.illumination(index)?[0].1.norm_sqr();
            if best.as_ref().is_none_or(|(_, p)| power > *p) {
                best = Some((pattern, power));
            }
        }
        Ok(best.expect("four candidates evaluated").0)
    }

    /// Received tone components `(frequency, complex gain, target)`.
    fn components(&self) -> Result<Vec<Component<T>>, SceneError> {
        let a = self.tx.amplitude;
        let mut out = Vec::new();
        if self.direct_path {
            out.push(Component {
                freq_hz: self.tx.tone_offset_hz,
                gain: path_gain(self.tx.tx_pos, self.tx.rx_pos, self.carrier())? * a,
                target: None,
            });
        }
        for (i, target) in self.targets.iter().enumerate() {
            let echo = path_gain(target.position, self.tx.rx_pos, self.carrier())?;
            for (q, field) in self.illumination(i)? {
                out.push(Component {
                    freq_hz: self.tx.tone_offset_hz + self.harmonic_offset_hz(q),
                    gain: field * echo * a,
                    target: Some(i),
                });
            }
        }
        Ok(out)
    }
}

struct Component<T> {
    freq_hz: T,
    gain: Complex<T>,
    target: Option<usize>,
}

/// Noiseless received baseband record.
pub fn synthesize_clean<T: Scalar>(scene: &Scene<T>) -> Result<BasebandSignal<T>, SceneError> {
    scene.validate()?;
    let components = scene.components()?;
    let fs = scene.sample_rate_hz;
    let n = scene.sample_count();
    let k2 = T::lit(2.0) * wavenumber(scene.carrier());
    let steps: Vec<f64> = components
        .iter()
        .map(|c| f64_of(c.freq_hz) / f64_of(fs))
        .collect();
    let mut samples = vec![Complex::new(T::zero(), T::zero()); n];
    let mut reflect = vec![Complex::new(T::zero(), T::zero()); scene.targets.len()];
    for (i, out) in samples.iter_mut().enumerate() {
        let t = T::count(i) / fs;
        for (slot, target) in reflect.iter_mut().zip(&scene.targets) {
            let m = target.modulation(t);
            *slot = if scene.phase_modulation {
                Complex::from_polar(m, -k2 * target.chest_displacement(t))
            } else {
                Complex::new(m, T::zero())
            };
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (c, &step) in components.iter().zip(&steps) {
            // phase accumulated in f64 so long f32 records keep their tone purity
            let cycles = T::lit((step * i as f64).fract());
            let tone = Complex::from_polar(T::one(), T::two_pi() * cycles);
            let mut term = c.gain * tone;
            if let Some(idx) = c.target {
                term = term * reflect[idx];
            }
            acc = acc + term;
        }
        *out = acc;
    }
    Ok(BasebandSignal {
        fs,
        t0: T::zero(),
        samples,
    })
}

/// Received record with receiver noise at the scene's SNR, seeded by `scene.seed`.
pub fn synthesize_received<T: Scalar>(scene: &Scene<T>) -> Result<BasebandSignal<T>, SceneError> {
    let clean = synthesize_clean(scene)?;
    match scene.snr_db {
        Some(snr) if snr.is_finite() => add_awgn(&clean, snr, scene.seed),
        _ => Ok(clean),
    }
}

/// Adds circular complex Gaussian noise so that signal power over noise
/// power equals `10^(snr_db/10)`. `snr_db = +∞` returns the input unchanged.
pub fn add_awgn<T: Scalar>(
    signal: &BasebandSignal<T>,
    snr_db: T,
    seed: u64,
) -> Result<BasebandSignal<T>, SceneError> {
    if signal.is_empty() {
        return Err(SceneError::EmptySignal);
    }
    if snr_db == T::infinity() {
        return Ok(signal.clone());
    }
    let power = signal.mean_power();
    if !(power > T::zero()) {
        return Err(SceneError::ZeroPowerSignal);
    }
    let noise_power = power / T::lit(10.0).powf(snr_db / T::lit(10.0));
    add_noise_power(signal, noise_power, seed)
}

/// Adds circular complex Gaussian noise of absolute mean power `noise_power`.
pub fn add_noise_power<T: Scalar>(
    signal: &BasebandSignal<T>,
    noise_power: T,
    seed: u64,
) -> Result<BasebandSignal<T>, SceneError> {
    if signal.is_empty() {
        return Err(SceneError::EmptySignal);
    }
    if !(noise_power >= T::zero()) || !noise_power.is_finite() {
        return Err(SceneError::Invalid(
            "noise power must be finite and >= 0".into(),
        ));
    }
    let sigma = (noise_power / T::lit(2.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = signal
        .samples
        .iter()
        .map(|&s| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            s + Complex::new(T::lit(re), T::lit(im)) * sigma
        })
        .collect();
    Ok(BasebandSignal {
        fs: signal.fs,
        t0: signal.t0,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ris::Bit;
    use std::f64::consts::TAU;

    fn sdc_scene(targets: Vec<BreathingTarget<f64>>) -> Scene<f64> {
        let array = RisArray::half_wavelength(16, 16, DEFAULT_CARRIER_HZ).unwrap();
        Scene {
            tx: TxConfig::default(),
            ris_mode: RisMode::Sdc(CodingPattern::uniform(16, 16, Bit::Zero)),
            array,
            targets,
            direct_path: false,
            phase_modulation: false,
            propagation: Propagation::FarField,
            snr_db: None,
            duration_s: 20.0,
            sample_rate_hz: 10_000.0,
            seed: 1,
        }
    }

    #[test]
    fn displacement_examples() {
        let mut t = BreathingTarget::new(Vec3::from_f64([2.0, 0.0, 0.0]), 15.0);
        assert_eq!(t.chest_displacement(0.0), 0.0);
        assert!((t.chest_displacement(1.0) - 0.005).abs() < 1e-15);
        let n = 4000;
        let mean: f64 = (0..n)
            .map(|i| t.chest_displacement(4.0 * i as f64 / n as f64))
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 1e-15);

        t.mod_depth = 0.0;
        assert_eq!(t.modulation(1.3), 1.0);
        t.mod_depth = 0.2;
        assert!((t.modulation(1.0) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn target_invariants() {
        let mut t = BreathingTarget::new(Vec3::from_f64([2.0, 0.0, 0.0]), 15.0);
        t.mod_depth = 1.0;
        assert!(t.validate().is_err());
        t.mod_depth = 0.2;
        t.rate_hz = 0.0;
        assert!(t.validate().is_err());
    }

    #[test]
    fn path_gain_examples() {
        let f = DEFAULT_CARRIER_HZ;
        let lambda = wavelength(f);
        let o = Vec3::zero();
        let g1 = path_gain(o, Vec3::new(1.0, 0.0, 0.0), f).unwrap();
        let g2 = path_gain(o, Vec3::new(2.0, 0.0, 0.0), f).unwrap();
        assert!((g1.norm() / g2.norm() - 2.0).abs() < 1e-12);

        let g = path_gain(o, Vec3::new(lambda, 0.0, 0.0), f).unwrap();
        assert!(g.arg().abs() < 1e-9);
        let g = path_gain(o, Vec3::new(lambda / 2.0, 0.0, 0.0), f).unwrap();
        assert!((g.arg().abs() - std::f64::consts::PI).abs() < 1e-9);

        assert_eq!(
            path_gain(o, o, f),
            Err(SceneError::Coincident("path endpoints"))
        );
    }

    #[test]
    fn empty_scene_is_silent() {
        let s = synthesize_clean(&sdc_scene(vec![])).unwrap();
        assert_eq!(s.len(), 200_000);
        assert!(s.samples.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn unmodulated_target_is_a_single_line() {
        let array = RisArray::half_wavelength(16, 16, DEFAULT_CARRIER_HZ).unwrap();
        let mut target = BreathingTarget::at_azimuth(&array, 30.0, 2.0, 15.0);
        target.mod_depth = 0.0;
        let scene = sdc_scene(vec![target]);
        let s = synthesize_clean(&scene).unwrap();
        // constant gain at exactly the tone: de-rotating leaves a constant
        let first = s.samples[0];
        for (i, c) in s.samples.iter().enumerate().step_by(997) {
            let derot = c * Complex::from_polar(1.0, -TAU * 1000.0 * i as f64 / 10_000.0);
            assert!((derot - first).norm() < 1e-9 * first.norm());
        }
    }

    #[test]
    fn nyquist_violation_named() {
        let mut scene = sdc_scene(vec![]);
        scene.sample_rate_hz = 2000.0;
        assert!(matches!(scene.validate(), Err(SceneError::Nyquist { .. })));
    }

    #[test]
    fn too_few_breaths_rejected() {
        let array = RisArray::half_wavelength(16, 16, DEFAULT_CARRIER_HZ).unwrap();
        let mut scene = sdc_scene(vec![BreathingTarget::at_azimuth(&array, 30.0, 2.0, 12.0)]);
        scene.duration_s = 10.0;
        assert!(matches!(scene.validate(), Err(SceneError::Invalid(_))));
    }

    #[test]
    fn target_on_array_rejected() {
        let scene = sdc_scene(vec![BreathingTarget::new(Vec3::zero(), 15.0)]);
        assert!(scene.validate().is_err());
        let behind = sdc_scene(vec![BreathingTarget::new(
            Vec3::from_f64([-1.0, 0.5, 0.0]),
            15.0,
        )]);
        assert!(matches!(behind.validate(), Err(SceneError::BehindArray(_))));
    }

    #[test]
    fn awgn_infinite_snr_and_determinism() {
        let array = RisArray::half_wavelength(16, 16, DEFAULT_CARRIER_HZ).unwrap();
        let scene = sdc_scene(vec![BreathingTarget::at_azimuth(&array, 30.0, 2.0, 15.0)]);
        let clean = synthesize_clean(&scene).unwrap();
        assert_eq!(add_awgn(&clean, f64::INFINITY, 3).unwrap(), clean);
        let a = add_awgn(&clean, 10.0, 3).unwrap();
        let b = add_awgn(&clean, 10.0, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_awgn(&clean, 10.0, 4).unwrap());
    }

    #[test]
    fn awgn_zero_power_rejected() {
        let zero = BasebandSignal::<f64>::zeros(100.0, 10);
        assert_eq!(add_awgn(&zero, 10.0, 1), Err(SceneError::ZeroPowerSignal));
    }
}
