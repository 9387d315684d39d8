//! Space-time coding: periodic per-element switching of the 1-bit states.
//!
//! An element driven by an `L`-slot sequence `Γ_1..Γ_L` with slot duration `τ`
//! reflects a piecewise-constant periodic waveform of period `T0 = L·τ`. Its
//! Fourier-series coefficient at harmonic `q` (offset `q/T0` Hz) is
//!
//! ```text
//! c_q = sinc(πq/L)/L · Σ_l Γ_l · e^{-jπq(2l-1)/L}
//! ```
//!
//! Delaying a sequence by `s` slots multiplies `c_q` by `e^{-j2πqs/L}`, which is
//! how per-column time shifts steer the `±1` harmonics in opposite directions.

use std::fmt;
use std::ops::RangeInclusive;

use num_complex::Complex;
use num_traits::Float;
use thiserror::Error;

use crate::geometry::Vec3;
use crate::ris::{
    parse_bit_row, reflection_coeff, weighted_array_factor, Bit, MetaAtomProfile, RisArray,
    RisError,
};
use crate::scalar::Scalar;

/// Sideband offset of the first harmonics in the two-person experiment, Hz.
pub const HARMONIC_OFFSET_HZ: f64 = 455.0;

/// Default sequence length of the two-beam design.
pub const DEFAULT_SLOTS: usize = 16;

/// Slot duration giving `1/(L·τ) = 455 Hz`.
pub fn default_slot_duration<T: Scalar>(slots: usize) -> T {
    T::one() / (T::lit(HARMONIC_OFFSET_HZ) * T::count(slots))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StcError {
    #[error("empty reflection sequence")]
    EmptySequence,
    #[error("oversample {oversample} is not a multiple of the sequence length {slots}")]
    GridNotSlotAligned { oversample: usize, slots: usize },
    #[error("oversample {oversample} below the required {required}")]
    GridTooCoarse { oversample: usize, required: usize },
    #[error("element ({m}, {n}) outside a {rows}x{cols} code")]
    ElementOutOfRange {
        m: usize,
        n: usize,
        rows: usize,
        cols: usize,
    },
    #[error("invalid space-time code: {0}")]
    InvalidCode(String),
    #[error("only mirrored beam pairs are supported (got {plus}° and {minus}°)")]
    AsymmetricBeams { plus: f64, minus: f64 },
    #[error("{slots} slots cannot resolve the phase ramp (max error {max_error_rad} rad)")]
    UnresolvablePhaseRamp { slots: usize, max_error_rad: f64 },
    #[error(transparent)]
    Ris(#[from] RisError),
}

/// Fourier coefficients of one periodic sequence over a contiguous `q` range.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients<T> {
    q_min: i32,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> HarmonicCoefficients<T> {
    pub fn q_range(&self) -> RangeInclusive<i32> {
        self.q_min..=self.q_min + self.values.len() as i32 - 1
    }

    pub fn get(&self, q: i32) -> Option<Complex<T>> {
        let idx = q.checked_sub(self.q_min)?;
        usize::try_from(idx)
            .ok()
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex<T>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.q_min + i as i32, c))
    }

    /// `Σ |c_q|²` over the stored range.
    pub fn power(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }
}

fn sinc<T: Scalar>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        x.sin() / x
    }
}

/// `e^{-jπ·num/den}` with the integer numerator reduced modulo `2·den`.
fn unit_phasor<T: Scalar>(num: i64, den: i64) -> Complex<T> {
    let reduced = num.rem_euclid(2 * den);
    let angle = -T::PI() * T::from_i64(reduced).unwrap() / T::from_i64(den).unwrap();
    Complex::from_polar(T::one(), angle)
}

/// Closed-form harmonic coefficients of a piecewise-constant periodic sequence.
pub fn harmonic_coefficients<T: Scalar>(
    sequence: &[Complex<T>],
    q_range: RangeInclusive<i32>,
) -> Result<HarmonicCoefficients<T>, StcError> {
    if sequence.is_empty() {
        return Err(StcError::EmptySequence);
    }
    let slots = sequence.len() as i64;
    let len_t = T::count(sequence.len());
    let values = q_range
        .clone()
        .map(|q| {
            let sum = sequence.iter().enumerate().fold(
                Complex::new(T::zero(), T::zero()),
                |acc, (i, &g)| {
                    let l = i as i64 + 1;
                    acc + g * unit_phasor::<T>(q as i64 * (2 * l - 1), slots)
                },
            );
            let envelope = sinc(T::PI() * T::from_i32(q).unwrap() / len_t) / len_t;
            sum * envelope
        })
        .collect();
    Ok(HarmonicCoefficients {
        q_min: *q_range.start(),
        values,
    })
}

/// Independent route to the same coefficients: the period is cut into
/// `oversample` slot-aligned cells, the waveform value of each cell is taken
/// at its midpoint, and the projection kernel `e^{-j2πqt/T0}` is integrated
/// exactly across each cell.
pub fn harmonic_coefficients_oracle<T: Scalar>(
    sequence: &[Complex<T>],
    q_range: RangeInclusive<i32>,
    oversample: usize,
) -> Result<HarmonicCoefficients<T>, StcError> {
    if sequence.is_empty() {
        return Err(StcError::EmptySequence);
    }
    let slots = sequence.len();
    if oversample % slots != 0 {
        return Err(StcError::GridNotSlotAligned { oversample, slots });
    }
    let max_q = q_range
        .clone()
        .map(|q| q.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let required = 8 * max_q * slots;
    if oversample < required || oversample == 0 {
        return Err(StcError::GridTooCoarse {
            oversample,
            required: required.max(slots),
        });
    }

    let cells = oversample as i64;
    let per_slot = oversample / slots;
    let values = q_range
        .clone()
        .map(|q| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for p in 0..oversample {
                let x = sequence[p / per_slot];
                let weight = if q == 0 {
                    Complex::new(T::one() / T::count(oversample), T::zero())
                } else {
                    // (1/T0)∫ e^{-j2πqt/T0} dt over [p, p+1]·T0/P
                    let a = unit_phasor::<T>(2 * q as i64 * p as i64, cells);
                    let b = unit_phasor::<T>(2 * q as i64 * (p as i64 + 1), cells);
                    let denom = Complex::new(T::zero(), T::two_pi() * T::from_i32(q).unwrap());
                    (a - b) / denom
                };
                acc = acc + x * weight;
            }
            acc
        })
        .collect();
    Ok(HarmonicCoefficients {
        q_min: *q_range.start(),
        values,
    })
}

/// Per-element periodic 1-bit sequences with a common slot duration.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeCode<T> {
    rows: usize,
    cols: usize,
    slots: usize,
    slot_duration: T,
    /// Index `((m·cols) + n)·slots + l`.
    bits: Vec<Bit>,
}

impl<T: Scalar> SpaceTimeCode<T> {
    pub fn new(
        rows: usize,
        cols: usize,
        slots: usize,
        slot_duration: T,
        bits: Vec<Bit>,
    ) -> Result<Self, StcError> {
        if rows == 0 || cols == 0 {
            return Err(StcError::InvalidCode("rows and cols must be >= 1".into()));
        }
        if slots == 0 {
            return Err(StcError::InvalidCode("sequence length must be >= 1".into()));
        }
        if !(slot_duration > T::zero()) || !slot_duration.is_finite() {
            return Err(StcError::InvalidCode("slot duration must be > 0".into()));
        }
        if bits.len() != rows * cols * slots {
            return Err(StcError::InvalidCode(format!(
                "{} bits cannot form a {rows}x{cols}x{slots} code",
                bits.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            slots,
            slot_duration,
            bits,
        })
    }

    /// Every element runs the same `sequence`.
    pub fn uniform(
        rows: usize,
        cols: usize,
        sequence: &[Bit],
        slot_duration: T,
    ) -> Result<Self, StcError> {
        let bits = sequence
            .iter()
            .copied()
            .cycle()
            .take(rows * cols * sequence.len())
            .collect();
        Self::new(rows, cols, sequence.len(), slot_duration, bits)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn slot_duration(&self) -> T {
        self.slot_duration
    }

    /// `T0 = L·τ`.
    pub fn period(&self) -> T {
        T::count(self.slots) * self.slot_duration
    }

    /// Frequency offset between adjacent harmonics, `1/T0`.
    pub fn harmonic_spacing_hz(&self) -> T {
        T::one() / self.period()
    }

    pub fn sequence(&self, m: usize, n: usize) -> &[Bit] {
        let start = (m * self.cols + n) * self.slots;
        &self.bits[start..start + self.slots]
    }

    /// Static pattern applied during slot `l`.
    pub fn slot_pattern(&self, l: usize) -> crate::ris::CodingPattern {
        crate::ris::CodingPattern::from_fn(self.rows, self.cols, |m, n| self.sequence(m, n)[l])
    }

    pub fn check_matches(&self, array: &RisArray<T>) -> Result<(), StcError> {
        if self.rows != array.rows() || self.cols != array.cols() {
            return Err(RisError::DimensionMismatch {
                rows: array.rows(),
                cols: array.cols(),
                found_rows: self.rows,
                found_cols: self.cols,
            }
            .into());
        }
        Ok(())
    }

    /// Parses the text form written by `Display`: a `tau_s <seconds>` line
    /// followed by `L` blank-line-separated `M`-row bit matrices.
    pub fn from_text(text: &str) -> Result<Self, StcError> {
        let mut tau: Option<T> = None;
        let mut blocks: Vec<Vec<Vec<Bit>>> = Vec::new();
        let mut current: Vec<Vec<Bit>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let line_no = idx + 1;
            if line.is_empty() {
                if !current.is_empty() {
                    blocks.push(std::mem::take(&mut current));
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("tau_s") {
                let value: f64 = rest.trim().parse().map_err(|_| {
                    StcError::Ris(RisError::Parse {
                        line: line_no,
                        message: format!("invalid slot duration {:?}", rest.trim()),
                    })
                })?;
                tau = Some(T::lit(value));
                continue;
            }
            current.push(parse_bit_row(line, line_no)?);
        }
        if !current.is_empty() {
            blocks.push(current);
        }
        let tau = tau.ok_or_else(|| {
            StcError::Ris(RisError::Parse {
                line: 1,
                message: "missing `tau_s` line".into(),
            })
        })?;
        let first = blocks
            .first()
            .ok_or_else(|| StcError::InvalidCode("no slot matrices".into()))?;
        let rows = first.len();
        let cols = first[0].len();
        if blocks
            .iter()
            .any(|b| b.len() != rows || b.iter().any(|r| r.len() != cols))
        {
            return Err(StcError::InvalidCode(
                "slot matrices have inconsistent shapes".into(),
            ));
        }
        let slots = blocks.len();
        let mut bits = Vec::with_capacity(rows * cols * slots);
        for m in 0..rows {
            for n in 0..cols {
                for block in &blocks {
                    bits.push(block[m][n]);
                }
            }
        }
        Self::new(rows, cols, slots, tau, bits)
    }
}

impl<T: Scalar> fmt::Display for SpaceTimeCode<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tau_s {:e}", self.slot_duration)?;
        for l in 0..self.slots {
            writeln!(f)?;
            write!(f, "{}", self.slot_pattern(l))?;
        }
        Ok(())
    }
}

/// Cyclically delays element `(m, n)` by `shift` slots (`shift` taken mod `L`).
pub fn apply_time_shift<T: Scalar>(
    code: &SpaceTimeCode<T>,
    element: (usize, usize),
    shift: usize,
) -> Result<SpaceTimeCode<T>, StcError> {
    let (m, n) = element;
    if m >= code.rows || n >= code.cols {
        return Err(StcError::ElementOutOfRange {
            m,
            n,
            rows: code.rows,
            cols: code.cols,
        });
    }
    let mut out = code.clone();
    let start = (m * code.cols + n) * code.slots;
    out.bits[start..start + code.slots].rotate_right(shift % code.slots);
    Ok(out)
}

/// Harmonic coefficients of every element of a code, for a fixed `q` range.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum<T> {
    rows: usize,
    cols: usize,
    q_min: i32,
    q_max: i32,
    /// Index `(q - q_min)·rows·cols + m·cols + n`.
    data: Vec<Complex<T>>,
}

impl<T: Scalar> HarmonicSpectrum<T> {
    pub fn of_code(
        code: &SpaceTimeCode<T>,
        profile: &MetaAtomProfile<T>,
        q_range: RangeInclusive<i32>,
    ) -> Result<Self, StcError> {
        let (q_min, q_max) = (*q_range.start(), *q_range.end());
        if q_max < q_min {
            return Err(StcError::InvalidCode("empty harmonic range".into()));
        }
        let elements = code.rows * code.cols;
        let width = (q_max - q_min + 1) as usize;
        let mut data = vec![Complex::new(T::zero(), T::zero()); width * elements];
        for m in 0..code.rows {
            for n in 0..code.cols {
                let seq: Vec<Complex<T>> = code
                    .sequence(m, n)
                    .iter()
                    .map(|&b| reflection_coeff(b, profile))
                    .collect();
                let coeffs = harmonic_coefficients(&seq, q_range.clone())?;
                for (q, c) in coeffs.iter() {
                    data[(q - q_min) as usize * elements + m * code.cols + n] = c;
                }
            }
        }
        Ok(Self {
            rows: code.rows,
            cols: code.cols,
            q_min,
            q_max,
            data,
        })
    }

    pub fn q_range(&self) -> RangeInclusive<i32> {
        self.q_min..=self.q_max
    }

    /// Row-major per-element coefficients of harmonic `q`.
    pub fn harmonic(&self, q: i32) -> Option<&[Complex<T>]> {
        if q < self.q_min || q > self.q_max {
            return None;
        }
        let elements = self.rows * self.cols;
        let start = (q - self.q_min) as usize * elements;
        Some(&self.data[start..start + elements])
    }

    pub fn array_factor(
        &self,
        array: &RisArray<T>,
        q: i32,
        incidence: Vec3<T>,
        observation: Vec3<T>,
    ) -> Result<Complex<T>, StcError> {
        let weights = self.harmonic(q).ok_or_else(|| {
            StcError::InvalidCode(format!("harmonic {q} outside {:?}", self.q_range()))
        })?;
        if self.rows != array.rows() || self.cols != array.cols() {
            return Err(RisError::DimensionMismatch {
                rows: array.rows(),
                cols: array.cols(),
                found_rows: self.rows,
                found_cols: self.cols,
            }
            .into());
        }
        Ok(weighted_array_factor(
            array,
            weights,
            incidence,
            observation,
        )?)
    }
}

/// Array factor of harmonic `q` with the default 0/π meta-atom profile.
pub fn harmonic_array_factor<T: Scalar>(
    array: &RisArray<T>,
    code: &SpaceTimeCode<T>,
    q: i32,
    incidence: Vec3<T>,
    observation: Vec3<T>,
) -> Result<Complex<T>, StcError> {
    code.check_matches(array)?;
    let spectrum = HarmonicSpectrum::of_code(code, &MetaAtomProfile::default(), q..=q)?;
    spectrum.array_factor(array, q, incidence, observation)
}

/// Balanced square wave: `L/2` slots of state 0 then `L/2` of state 1.
pub fn square_wave(slots: usize) -> Vec<Bit> {
    (0..slots).map(|l| Bit::from(l >= slots / 2)).collect()
}

/// Integer slot delays that put the phase ramp `k·d·n·sin(angle)` on the
/// `q = +1` harmonic, with the largest residual phase error in radians.
pub fn two_beam_column_shifts<T: Scalar>(
    array: &RisArray<T>,
    angle_deg: T,
    slots: usize,
) -> (Vec<usize>, T) {
    let per_column = array.wavenumber() * array.spacing() * angle_deg.to_radians().sin();
    let slot_phase = T::two_pi() / T::count(slots);
    let mut max_err = T::zero();
    let shifts = (0..array.cols())
        .map(|n| {
            let ideal = per_column * T::count(n) / slot_phase;
            let rounded = ideal.round();
            max_err = max_err.max(Float::abs(ideal - rounded) * slot_phase);
            let s = rounded.to_i64().unwrap_or(0);
            s.rem_euclid(slots as i64) as usize
        })
        .collect();
    (shifts, max_err)
}

/// Two mirrored harmonic beams: `q = +1` towards `angle_plus`, `q = -1`
/// towards `angle_minus = -angle_plus`, assuming broadside illumination.
pub fn design_two_beam_code<T: Scalar>(
    array: &RisArray<T>,
    angle_plus_deg: T,
    angle_minus_deg: T,
    slots: usize,
    slot_duration: T,
) -> Result<SpaceTimeCode<T>, StcError> {
    if Float::abs(angle_plus_deg + angle_minus_deg) > T::lit(1e-9) {
        return Err(StcError::AsymmetricBeams {
            plus: angle_plus_deg.to_f64().unwrap_or(f64::NAN),
            minus: angle_minus_deg.to_f64().unwrap_or(f64::NAN),
        });
    }
    if slots < 8 || slots % 2 != 0 {
        return Err(StcError::InvalidCode(format!(
            "two-beam design needs an even sequence length >= 8, got {slots}"
        )));
    }
    let (shifts, max_err) = two_beam_column_shifts(array, angle_plus_deg, slots);
    if max_err > T::FRAC_PI_4() {
        return Err(StcError::UnresolvablePhaseRamp {
            slots,
            max_error_rad: max_err.to_f64().unwrap_or(f64::NAN),
        });
    }
    let base = SpaceTimeCode::uniform(
        array.rows(),
        array.cols(),
        &square_wave(slots),
        slot_duration,
    )?;
    let mut code = base;
    for m in 0..array.rows() {
        for (n, &s) in shifts.iter().enumerate() {
            code = apply_time_shift(&code, (m, n), s)?;
        }
    }
    Ok(code)
}
