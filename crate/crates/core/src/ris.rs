//! 1-bit reconfigurable reflecting surface.
//!
//! Each meta-atom is collapsed to its two-state reflection at the operating
//! frequency: unit amplitude, phase 0 for state `0` and π for state `1`.
//! The array lies in the plane spanned by a column axis and a row axis, both
//! orthogonal to the surface normal. Element `(m, n)` sits at
//!
//! ```text
//! r_mn = center + (n - (N-1)/2)·d·col_axis + (m - (M-1)/2)·d·row_axis
//! ```
//!
//! Angles quoted in degrees are azimuths measured from the normal towards the
//! column axis, so `+45°` points at `cos45·normal + sin45·col_axis`.

use std::fmt;

use num_complex::Complex;
use num_traits::Float;
use thiserror::Error;

use crate::geometry::{wavelength, wavenumber, Vec3};
use crate::scalar::Scalar;

/// Tolerance on `‖v‖ = 1` for direction arguments.
const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RisError {
    #[error("invalid array geometry: {0}")]
    InvalidArray(String),
    #[error("pattern is {found_rows}x{found_cols} but the array is {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("{0} direction is not a unit vector")]
    NonUnitDirection(&'static str),
    #[error("{0} lies behind the array plane")]
    BehindArray(&'static str),
    #[error("meta-atom amplitude {0} outside [0, 1]")]
    InvalidAmplitude(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Binary control state of one meta-atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum Bit {
    #[default]
    Zero,
    One,
}

impl Bit {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Bit::Zero),
            '1' => Some(Bit::One),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Bit::Zero => '0',
            Bit::One => '1',
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase<T: Scalar>(phase: T) -> T {
    let two_pi = T::two_pi();
    let pi = T::PI();
    let mut p = phase % two_pi;
    if p <= -pi {
        p = p + two_pi;
    } else if p > pi {
        p = p - two_pi;
    }
    p
}

/// Measured reflection of one meta-atom state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaAtomResponse<T> {
    pub state: Bit,
    amplitude: T,
    phase: T,
}

impl<T: Scalar> MetaAtomResponse<T> {
    pub fn new(state: Bit, amplitude: T, phase: T) -> Result<Self, RisError> {
        if !(amplitude >= T::zero() && amplitude <= T::one()) {
            return Err(RisError::InvalidAmplitude(
                amplitude.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self {
            state,
            amplitude,
            phase: wrap_phase(phase),
        })
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    /// Phase in `(-π, π]`.
    pub fn phase(&self) -> T {
        self.phase
    }

    pub fn coefficient(&self) -> Complex<T> {
        Complex::from_polar(self.amplitude, self.phase)
    }
}

/// Responses of both states of a 1-bit meta-atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaAtomProfile<T> {
    zero: MetaAtomResponse<T>,
    one: MetaAtomResponse<T>,
}

impl<T: Scalar> Default for MetaAtomProfile<T> {
    /// Lossless atom with states at phase 0 and π.
    fn default() -> Self {
        Self {
            zero: MetaAtomResponse {
                state: Bit::Zero,
                amplitude: T::one(),
                phase: T::zero(),
            },
            one: MetaAtomResponse {
                state: Bit::One,
                amplitude: T::one(),
                phase: T::PI(),
            },
        }
    }
}

impl<T: Scalar> MetaAtomProfile<T> {
    pub fn new(zero: MetaAtomResponse<T>, one: MetaAtomResponse<T>) -> Result<Self, RisError> {
        if zero.state != Bit::Zero || one.state != Bit::One {
            return Err(RisError::InvalidArray(
                "profile responses must be given for state 0 then state 1".into(),
            ));
        }
        Ok(Self { zero, one })
    }

    pub fn response(&self, state: Bit) -> &MetaAtomResponse<T> {
        match state {
            Bit::Zero => &self.zero,
            Bit::One => &self.one,
        }
    }

    /// State whose realized phase is angularly closest to `ideal_phase`.
    /// Equidistant phases resolve to state `0`.
    pub fn quantize(&self, ideal_phase: T) -> Bit {
        let d0 = Float::abs(wrap_phase(ideal_phase - self.zero.phase));
        let d1 = Float::abs(wrap_phase(ideal_phase - self.one.phase));
        if d0 <= d1 {
            Bit::Zero
        } else {
            Bit::One
        }
    }
}

/// `amplitude·e^{j·phase}` of `state` under `profile`.
pub fn reflection_coeff<T: Scalar>(state: Bit, profile: &MetaAtomProfile<T>) -> Complex<T> {
    profile.response(state).coefficient()
}

/// 1-bit quantization against the default 0/π profile.
pub fn quantize_phase_1bit<T: Scalar>(ideal_phase: T) -> Bit {
    MetaAtomProfile::<T>::default().quantize(ideal_phase)
}

/// Planar rectangular reflecting array.
#[derive(Debug, Clone, PartialEq)]
pub struct RisArray<T> {
    rows: usize,
    cols: usize,
    spacing: T,
    center: Vec3<T>,
    normal: Vec3<T>,
    carrier_hz: T,
}

impl<T: Scalar> RisArray<T> {
    /// Validates the geometry; `normal` is normalized.
    pub fn new(
        rows: usize,
        cols: usize,
        spacing: T,
        center: Vec3<T>,
        normal: Vec3<T>,
        carrier_hz: T,
    ) -> Result<Self, RisError> {
        if rows == 0 || cols == 0 {
            return Err(RisError::InvalidArray("rows and cols must be >= 1".into()));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(RisError::InvalidArray("element spacing must be > 0".into()));
        }
        if !(carrier_hz > T::zero()) || !carrier_hz.is_finite() {
            return Err(RisError::InvalidArray("carrier must be > 0".into()));
        }
        if !center.is_finite() {
            return Err(RisError::InvalidArray("center must be finite".into()));
        }
        let normal = normal
            .normalized()
            .ok_or_else(|| RisError::InvalidArray("normal must be non-zero".into()))?;
        Ok(Self {
            rows,
            cols,
            spacing,
            center,
            normal,
            carrier_hz,
        })
    }

    /// Array at the origin facing `+x` with half-wavelength spacing.
    pub fn half_wavelength(rows: usize, cols: usize, carrier_hz: T) -> Result<Self, RisError> {
        let spacing = wavelength(carrier_hz) / T::lit(2.0);
        Self::new(
            rows,
            cols,
            spacing,
            Vec3::zero(),
            Vec3::new(T::one(), T::zero(), T::zero()),
            carrier_hz,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn center(&self) -> Vec3<T> {
        self.center
    }

    pub fn normal(&self) -> Vec3<T> {
        self.normal
    }

    pub fn carrier_hz(&self) -> T {
        self.carrier_hz
    }

    pub fn wavelength(&self) -> T {
        wavelength(self.carrier_hz)
    }

    pub fn wavenumber(&self) -> T {
        wavenumber(self.carrier_hz)
    }

    /// In-plane axis along which column index grows (horizontal).
    pub fn col_axis(&self) -> Vec3<T> {
        let up = Vec3::new(T::zero(), T::zero(), T::one());
        up.cross(self.normal)
            .normalized()
            .unwrap_or_else(|| Vec3::new(T::zero(), T::one(), T::zero()))
    }

    /// In-plane axis along which row index grows.
    pub fn row_axis(&self) -> Vec3<T> {
        self.normal.cross(self.col_axis())
    }

    /// Centered coordinate of column `n` along the column axis.
    pub fn col_coord(&self, n: usize) -> T {
        (T::count(n) - T::count(self.cols - 1) / T::lit(2.0)) * self.spacing
    }

    /// Centered coordinate of row `m` along the row axis.
    pub fn row_coord(&self, m: usize) -> T {
        (T::count(m) - T::count(self.rows - 1) / T::lit(2.0)) * self.spacing
    }

    /// Position of element `(m, n)` relative to the array center.
    pub fn element_offset(&self, m: usize, n: usize) -> Vec3<T> {
        self.col_axis() * self.col_coord(n) + self.row_axis() * self.row_coord(m)
    }

    pub fn element_position(&self, m: usize, n: usize) -> Vec3<T> {
        self.center + self.element_offset(m, n)
    }

    /// Unit vector at azimuth `angle_deg` from the normal towards the column axis.
    pub fn azimuth_direction(&self, angle_deg: T) -> Vec3<T> {
        let a = angle_deg.to_radians();
        self.normal * a.cos() + self.col_axis() * a.sin()
    }

    /// Signed height of `point` above the array plane.
    pub fn height_of(&self, point: Vec3<T>) -> T {
        (point - self.center).dot(self.normal)
    }

    /// `2·D²/λ` with `D` the aperture diagonal.
    pub fn fraunhofer_distance(&self) -> T {
        let w = T::count(self.cols) * self.spacing;
        let h = T::count(self.rows) * self.spacing;
        T::lit(2.0) * (w * w + h * h) / self.wavelength()
    }

    /// Effective scattering amplitude of one element: `4π·d²/λ²`,
    /// the aperture gain of a `d × d` patch.
    pub fn element_gain(&self) -> T {
        let lambda = self.wavelength();
        T::lit(4.0) * T::PI() * self.spacing * self.spacing / (lambda * lambda)
    }
}

/// Static (space-domain) 1-bit coding pattern, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodingPattern {
    rows: usize,
    cols: usize,
    bits: Vec<Bit>,
}

impl CodingPattern {
    pub fn uniform(rows: usize, cols: usize, bit: Bit) -> Self {
        Self {
            rows,
            cols,
            bits: vec![bit; rows * cols],
        }
    }

    pub fn from_bits(rows: usize, cols: usize, bits: Vec<Bit>) -> Result<Self, RisError> {
        if rows == 0 || cols == 0 || bits.len() != rows * cols {
            return Err(RisError::InvalidArray(format!(
                "{} bits cannot form a {rows}x{cols} pattern",
                bits.len()
            )));
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Bit) -> Self {
        let mut bits = Vec::with_capacity(rows * cols);
        for m in 0..rows {
            for n in 0..cols {
                bits.push(f(m, n));
            }
        }
        Self { rows, cols, bits }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, m: usize, n: usize) -> Bit {
        self.bits[m * self.cols + n]
    }

    pub fn set(&mut self, m: usize, n: usize, bit: Bit) {
        self.bits[m * self.cols + n] = bit;
    }

    pub fn bits(&self) -> &[Bit] {
        &self.bits
    }

    pub fn check_matches<T>(&self, array: &RisArray<T>) -> Result<(), RisError> {
        if self.rows != array.rows || self.cols != array.cols {
            return Err(RisError::DimensionMismatch {
                rows: array.rows,
                cols: array.cols,
                found_rows: self.rows,
                found_cols: self.cols,
            });
        }
        Ok(())
    }

    /// Per-element reflection coefficients under `profile`, row-major.
    pub fn coefficients<T: Scalar>(&self, profile: &MetaAtomProfile<T>) -> Vec<Complex<T>> {
        self.bits
            .iter()
            .map(|&b| reflection_coeff(b, profile))
            .collect()
    }

    /// Parses rows of `0`/`1` characters; blank lines and surrounding
    /// whitespace are ignored.
    pub fn from_text(text: &str) -> Result<Self, RisError> {
        let mut rows: Vec<Vec<Bit>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = parse_bit_row(line, idx + 1)?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(RisError::Parse {
                        line: idx + 1,
                        message: format!("row has {} bits, expected {}", row.len(), first.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(RisError::Parse {
                line: 1,
                message: "empty pattern".into(),
            });
        }
        let (r, c) = (rows.len(), rows[0].len());
        Self::from_bits(r, c, rows.into_iter().flatten().collect())
    }
}

pub(crate) fn parse_bit_row(line: &str, line_no: usize) -> Result<Vec<Bit>, RisError> {
    line.chars()
        .map(|ch| {
            Bit::from_char(ch).ok_or_else(|| RisError::Parse {
                line: line_no,
                message: format!("unexpected character {ch:?} in bit row"),
            })
        })
        .collect()
}

impl fmt::Display for CodingPattern {
    /// One line of `0`/`1` characters per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in 0..self.rows {
            let row: String = (0..self.cols).map(|n| self.get(m, n).as_char()).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

fn check_unit<T: Scalar>(v: Vec3<T>, what: &'static str) -> Result<(), RisError> {
    let n = v.norm();
    if !n.is_finite() || Float::abs(n - T::one()) > T::lit(UNIT_TOLERANCE) {
        return Err(RisError::NonUnitDirection(what));
    }
    Ok(())
}

/// Far-field sum `Σ w_mn·e^{jk·r_mn·(incidence + observation)}` for arbitrary
/// row-major element weights.
///
/// Evaluated separably: the exponent splits into a column term and a row term,
/// so the double sum costs one phasor per row and per column.
pub fn weighted_array_factor<T: Scalar>(
    array: &RisArray<T>,
    weights: &[Complex<T>],
    incidence: Vec3<T>,
    observation: Vec3<T>,
) -> Result<Complex<T>, RisError> {
    if weights.len() != array.len() {
        return Err(RisError::DimensionMismatch {
            rows: array.rows,
            cols: array.cols,
            found_rows: weights.len() / array.cols.max(1),
            found_cols: array.cols,
        });
    }
    check_unit(incidence, "incidence")?;
    check_unit(observation, "observation")?;

    let k = array.wavenumber();
    let s = incidence + observation;
    let col_rate = k * array.col_axis().dot(s);
    let row_rate = k * array.row_axis().dot(s);
    let col_phasors: Vec<Complex<T>> = (0..array.cols)
        .map(|n| Complex::from_polar(T::one(), col_rate * array.col_coord(n)))
        .collect();

    let mut total = Complex::new(T::zero(), T::zero());
    for (m, row) in weights.chunks_exact(array.cols).enumerate() {
        let row_sum = row
            .iter()
            .zip(&col_phasors)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (w, p)| {
                acc + w * p
            });
        total = total + row_sum * Complex::from_polar(T::one(), row_rate * array.row_coord(m));
    }
    Ok(total)
}

/// Far-field array factor of a 1-bit pattern with the default profile.
pub fn array_factor<T: Scalar>(
    array: &RisArray<T>,
    pattern: &CodingPattern,
    incidence: Vec3<T>,
    observation: Vec3<T>,
) -> Result<Complex<T>, RisError> {
    pattern.check_matches(array)?;
    let weights = pattern.coefficients(&MetaAtomProfile::default());
    weighted_array_factor(array, &weights, incidence, observation)
}

/// 1-bit quantization of per-element ideal phases (row-major), trying a
/// reference offset of 0 and of π/2 and keeping whichever pattern sums the
/// phase-compensated elements more coherently. Since `|cos φ| + |sin φ| ≥ 1`,
/// the better of the two keeps at least half of the continuous-phase gain.
/// Ties keep the zero offset.
fn quantize_best_offset<T: Scalar>(rows: usize, cols: usize, ideal: &[T]) -> CodingPattern {
    let profile = MetaAtomProfile::<T>::default();
    let candidate = |offset: T| {
        let pattern = CodingPattern::from_fn(rows, cols, |m, n| {
            quantize_phase_1bit(ideal[m * cols + n] + offset)
        });
        let score = pattern
            .coefficients(&profile)
            .iter()
            .zip(ideal)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (g, &phi)| {
                acc + g * Complex::from_polar(T::one(), -phi)
            })
            .norm();
        (pattern, score)
    };
    let (p0, s0) = candidate(T::zero());
    let (p1, s1) = candidate(T::FRAC_PI_2());
    if s1 > s0 * (T::one() + T::lit(1e-12)) {
        p1
    } else {
        p0
    }
}

fn focus_phases<T: Scalar>(
    array: &RisArray<T>,
    tx_pos: Vec3<T>,
    target_pos: Vec3<T>,
) -> Result<Vec<T>, RisError> {
    if !(array.height_of(tx_pos) > T::zero()) {
        return Err(RisError::BehindArray("transmitter"));
    }
    if !(array.height_of(target_pos) > T::zero()) {
        return Err(RisError::BehindArray("target"));
    }
    let k = array.wavenumber();
    let c = array.center();
    let reference = tx_pos.distance(c) + c.distance(target_pos);
    let mut ideal = Vec::with_capacity(array.len());
    for m in 0..array.rows {
        for n in 0..array.cols {
            let r = array.element_position(m, n);
            ideal.push(k * (tx_pos.distance(r) + r.distance(target_pos) - reference));
        }
    }
    Ok(ideal)
}

/// Focusing pattern for the exact spherical path `tx → element → target`.
///
/// Each element's ideal phase cancels its excess path length relative to the
/// path through the array center, then is quantized to 1 bit.
pub fn synthesize_focus_pattern<T: Scalar>(
    array: &RisArray<T>,
    tx_pos: Vec3<T>,
    target_pos: Vec3<T>,
) -> Result<CodingPattern, RisError> {
    let ideal = focus_phases(array, tx_pos, target_pos)?;
    Ok(quantize_best_offset(array.rows, array.cols, &ideal))
}

/// [`synthesize_focus_pattern`] with the quantization reference fixed at
/// `offset` radians instead of chosen automatically.
pub fn synthesize_focus_pattern_with_offset<T: Scalar>(
    array: &RisArray<T>,
    tx_pos: Vec3<T>,
    target_pos: Vec3<T>,
    offset: T,
) -> Result<CodingPattern, RisError> {
    let ideal = focus_phases(array, tx_pos, target_pos)?;
    Ok(CodingPattern::from_fn(array.rows, array.cols, |m, n| {
        quantize_phase_1bit(ideal[m * array.cols + n] + offset)
    }))
}

/// Plane-wave focusing pattern for unit `incidence`/`observation` directions.
pub fn focus_pattern_far_field<T: Scalar>(
    array: &RisArray<T>,
    incidence: Vec3<T>,
    observation: Vec3<T>,
) -> Result<CodingPattern, RisError> {
    check_unit(incidence, "incidence")?;
    check_unit(observation, "observation")?;
    let k = array.wavenumber();
    let s = incidence + observation;
    let mut ideal = Vec::with_capacity(array.len());
    for m in 0..array.rows {
        for n in 0..array.cols {
            ideal.push(-k * array.element_offset(m, n).dot(s));
        }
    }
    Ok(quantize_best_offset(array.rows, array.cols, &ideal))
}

/// Relative gain between two patterns towards one observation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainDb<T> {
    Db(T),
    /// The reference pattern radiates nothing towards the observation.
    ReferenceNull,
}

impl<T: Scalar> GainDb<T> {
    pub fn db(self) -> Option<T> {
        match self {
            GainDb::Db(v) => Some(v),
            GainDb::ReferenceNull => None,
        }
    }
}

/// `20·log10(|AF(a)| / |AF(b)|)`.
pub fn received_gain_db<T: Scalar>(
    array: &RisArray<T>,
    pattern_a: &CodingPattern,
    pattern_b: &CodingPattern,
    incidence: Vec3<T>,
    observation: Vec3<T>,
) -> Result<GainDb<T>, RisError> {
    let a = array_factor(array, pattern_a, incidence, observation)?.norm();
    let b = array_factor(array, pattern_b, incidence, observation)?.norm();
    // Residual of an exact cancellation is rounding noise on O(M·N) terms.
    let null_floor = T::count(array.len()) * T::epsilon() * T::lit(16.0);
    if b <= null_floor {
        return Ok(GainDb::ReferenceNull);
    }
    Ok(GainDb::Db(T::lit(20.0) * (a / b).log10()))
}
