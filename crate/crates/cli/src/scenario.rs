//! Scenario files: TOML with units in the key names, layered over a preset.
//!
//! A file may name a `preset`; its own keys are then deep-merged over the
//! preset's fully populated scenario. Without a preset the base is
//! [`Scenario::default`]. Arrays (including `[[targets]]`) replace the base
//! array wholesale.

use std::path::Path;

use ris_vitals::scene::{DEFAULT_CARRIER_HZ, NYQUIST_GUARD_HZ};
use ris_vitals::stc::{default_slot_duration, design_two_beam_code};
use ris_vitals::{
    Bit, BreathingTarget, CodingPattern, DspParams, Propagation, RisArray, RisMode, Scene,
    SpaceTimeCode, TxConfig, Vec3,
};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{HarnessError, Stage};
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// One scene, every configured channel processed independently.
    Single,
    /// The configured SDC scene against the same scene without a surface,
    /// both at the noise power implied by `snr_db` on the surface-free run.
    SdcVsAbsent,
    /// Two persons on the two STC harmonic channels.
    TwoPerson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSpec {
    pub tone_offset_hz: f64,
    pub amplitude: f64,
    pub carrier_hz: f64,
    pub tx_pos_m: [f64; 3],
    pub rx_pos_m: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RisModeKind {
    Absent,
    Sdc,
    Stc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationKind {
    FarField,
    NearField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdcPatternKind {
    /// Exact-path focusing from the transmitter onto `focus_target`.
    Focus,
    AllZeros,
    AllOnes,
    /// `bits` holds one string of '0'/'1' per row.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdcSpec {
    pub pattern: SdcPatternKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus_target: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StcDesignKind {
    /// Mirrored `q = ±1` beams at `angle_plus_deg` / `angle_minus_deg`.
    TwoBeam,
    /// `sequences` holds one string of '0'/'1' slots per element, row-major.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StcSpec {
    pub design: StcDesignKind,
    pub slots: usize,
    /// Defaults to `1/(455 Hz · slots)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_plus_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_minus_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequences: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisSpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing_m: f64,
    pub center_m: [f64; 3],
    pub normal: [f64; 3],
    pub mode: RisModeKind,
    pub propagation: PropagationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdc: Option<SdcSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stc: Option<StcSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub direct_path: bool,
    pub phase_modulation: bool,
    /// Omitted means a noiseless record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
}

/// A person, placed either by `azimuth_deg` + `range_m` from the array
/// center or by an absolute `position_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub azimuth_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_m: Option<[f64; 3]>,
    pub rate_bpm: f64,
    #[serde(default = "default_displacement")]
    pub displacement_m: f64,
    #[serde(default = "default_baseline")]
    pub baseline: f64,
    #[serde(default = "default_mod_depth")]
    pub mod_depth: f64,
    #[serde(default)]
    pub phase_offset_rad: f64,
}

fn default_displacement() -> f64 {
    0.005
}

fn default_baseline() -> f64 {
    1.0
}

fn default_mod_depth() -> f64 {
    0.2
}

impl TargetSpec {
    pub fn at_azimuth(azimuth_deg: f64, range_m: f64, rate_bpm: f64) -> Self {
        Self {
            azimuth_deg: Some(azimuth_deg),
            range_m: Some(range_m),
            position_m: None,
            rate_bpm,
            displacement_m: default_displacement(),
            baseline: default_baseline(),
            mod_depth: default_mod_depth(),
            phase_offset_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DspSpec {
    /// Tone channels to demodulate. Omitted: the transmit tone, or the
    /// `q = +1` and `q = -1` harmonics in STC mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels_hz: Option<Vec<f64>>,
    pub channel_bandwidth_hz: f64,
    pub decimated_rate_hz: f64,
    pub lowpass_cutoff_hz: f64,
    pub band_lo_hz: f64,
    pub band_hi_hz: f64,
    pub band_taper_hz: f64,
    pub min_peak_spacing_s: f64,
    pub min_prominence: f64,
    pub min_duration_s: f64,
    pub stft_window_s: f64,
    pub stft_hop_s: f64,
    pub edge_guard_s: f64,
    pub crosstalk_floor_db: f64,
}

impl Default for DspSpec {
    fn default() -> Self {
        let p = DspParams::<f64>::default();
        Self {
            channels_hz: None,
            channel_bandwidth_hz: p.channel_bandwidth_hz,
            decimated_rate_hz: p.decimated_rate_hz,
            lowpass_cutoff_hz: p.lowpass_cutoff_hz,
            band_lo_hz: p.band_lo_hz,
            band_hi_hz: p.band_hi_hz,
            band_taper_hz: p.band_taper_hz,
            min_peak_spacing_s: p.min_peak_spacing_s,
            min_prominence: p.min_prominence,
            min_duration_s: p.min_duration_s,
            stft_window_s: p.stft_window_s,
            stft_hop_s: p.stft_hop_s,
            edge_guard_s: p.edge_guard_s,
            crosstalk_floor_db: p.crosstalk_floor_db,
        }
    }
}

impl DspSpec {
    pub fn params(&self) -> DspParams<f64> {
        DspParams {
            channel_bandwidth_hz: self.channel_bandwidth_hz,
            decimated_rate_hz: self.decimated_rate_hz,
            lowpass_cutoff_hz: self.lowpass_cutoff_hz,
            band_lo_hz: self.band_lo_hz,
            band_hi_hz: self.band_hi_hz,
            band_taper_hz: self.band_taper_hz,
            min_peak_spacing_s: self.min_peak_spacing_s,
            min_prominence: self.min_prominence,
            min_duration_s: self.min_duration_s,
            stft_window_s: self.stft_window_s,
            stft_hop_s: self.stft_hop_s,
            edge_guard_s: self.edge_guard_s,
            crosstalk_floor_db: self.crosstalk_floor_db,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    /// Raw received record(s), `t,I,Q`.
    Baseband,
    Envelopes,
    Spectrograms,
    /// SVG line plot per envelope.
    Plots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub name: String,
    pub seed: u64,
    pub experiment: ExperimentKind,
    pub radio: RadioSpec,
    pub ris: RisSpec,
    pub channel: ChannelSpec,
    pub dsp: DspSpec,
    pub outputs: OutputSpec,
    pub targets: Vec<TargetSpec>,
}

impl Default for Scenario {
    /// One person at 30°, 2 m, 15 bpm, with the surface focused on them.
    fn default() -> Self {
        let tx = TxConfig::<f64>::default();
        Self {
            preset: None,
            name: "single".into(),
            seed: 1,
            experiment: ExperimentKind::Single,
            radio: RadioSpec {
                tone_offset_hz: tx.tone_offset_hz,
                amplitude: tx.amplitude,
                carrier_hz: tx.carrier_hz,
                tx_pos_m: tx.tx_pos.to_f64(),
                rx_pos_m: tx.rx_pos.to_f64(),
            },
            ris: RisSpec {
                rows: 16,
                cols: 16,
                spacing_m: ris_vitals::geometry::wavelength(DEFAULT_CARRIER_HZ) / 2.0,
                center_m: [0.0; 3],
                normal: [1.0, 0.0, 0.0],
                mode: RisModeKind::Sdc,
                propagation: PropagationKind::NearField,
                sdc: Some(SdcSpec {
                    pattern: SdcPatternKind::Focus,
                    focus_target: Some(0),
                    bits: None,
                }),
                stc: None,
            },
            channel: ChannelSpec {
                direct_path: false,
                phase_modulation: false,
                snr_db: Some(10.0),
                duration_s: 60.0,
                sample_rate_hz: 10_000.0,
            },
            dsp: DspSpec::default(),
            outputs: OutputSpec {
                artifacts: vec![Artifact::Envelopes, Artifact::Spectrograms, Artifact::Plots],
            },
            targets: vec![TargetSpec::at_azimuth(30.0, 2.0, 15.0)],
        }
    }
}

/// Deep merge: tables merge key by key, everything else is replaced.
fn merge(base: &mut Table, overlay: Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

impl Scenario {
    /// Parses scenario text; `origin` names the source in diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, HarnessError> {
        let overlay: Table = text.parse().map_err(|e: toml::de::Error| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            HarnessError::Syntax {
                origin: origin.into(),
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })?;
        let base = match overlay.get("preset") {
            None => Scenario::default(),
            Some(Value::String(name)) => {
                presets::preset(name).ok_or_else(|| HarnessError::Field {
                    origin: origin.into(),
                    field: "preset".into(),
                    message: format!(
                        "unknown preset `{name}` (expected one of {})",
                        presets::NAMES.join(", ")
                    ),
                })?
            }
            Some(_) => {
                return Err(HarnessError::Field {
                    origin: origin.into(),
                    field: "preset".into(),
                    message: "expected a string".into(),
                })
            }
        };
        let mut merged = Table::try_from(&base).expect("scenario serializes to a table");
        merge(&mut merged, overlay);
        let scenario: Scenario =
            serde_path_to_error::deserialize(merged).map_err(|e| HarnessError::Field {
                origin: origin.into(),
                field: e.path().to_string(),
                message: e.inner().message().trim().to_string(),
            })?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Canonical TOML with every default spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn array(&self) -> Result<RisArray<f64>, HarnessError> {
        RisArray::new(
            self.ris.rows,
            self.ris.cols,
            self.ris.spacing_m,
            Vec3::from_f64(self.ris.center_m),
            Vec3::from_f64(self.ris.normal),
            self.radio.carrier_hz,
        )
        .map_err(|source| HarnessError::Ris {
            stage: Stage::Validate,
            source,
        })
    }

    fn tx(&self) -> TxConfig<f64> {
        TxConfig {
            tone_offset_hz: self.radio.tone_offset_hz,
            amplitude: self.radio.amplitude,
            carrier_hz: self.radio.carrier_hz,
            tx_pos: Vec3::from_f64(self.radio.tx_pos_m),
            rx_pos: Vec3::from_f64(self.radio.rx_pos_m),
        }
    }

    fn target(
        &self,
        array: &RisArray<f64>,
        i: usize,
    ) -> Result<BreathingTarget<f64>, HarnessError> {
        let spec = &self.targets[i];
        let position = match (spec.position_m, spec.azimuth_deg, spec.range_m) {
            (Some(p), None, None) => Vec3::from_f64(p),
            (None, Some(az), Some(range)) => {
                if !(range > 0.0) {
                    return Err(HarnessError::invalid(format!(
                        "targets[{i}]: range_m must be > 0"
                    )));
                }
                array.center() + array.azimuth_direction(az) * range
            }
            _ => {
                return Err(HarnessError::invalid(format!(
                    "targets[{i}]: give either position_m or both azimuth_deg and range_m"
                )))
            }
        };
        Ok(BreathingTarget {
            position,
            rate_hz: spec.rate_bpm / 60.0,
            displacement_m: spec.displacement_m,
            baseline: spec.baseline,
            mod_depth: spec.mod_depth,
            phase_offset: spec.phase_offset_rad,
        })
    }

    fn slot_duration(stc: &StcSpec) -> f64 {
        stc.slot_duration_s
            .unwrap_or_else(|| default_slot_duration(stc.slots))
    }

    /// Surface state for `base`, a scene identical to the final one except
    /// that its surface is absent.
    fn ris_mode(&self, base: &Scene<f64>) -> Result<RisMode<f64>, HarnessError> {
        let array = &base.array;
        let ris_err = |source| HarnessError::Ris {
            stage: Stage::Validate,
            source,
        };
        let stc_err = |source| HarnessError::Stc {
            stage: Stage::Validate,
            source,
        };
        match self.ris.mode {
            RisModeKind::Absent => Ok(RisMode::Absent),
            RisModeKind::Sdc => {
                let sdc = self.ris.sdc.as_ref().ok_or_else(|| {
                    HarnessError::invalid("ris.mode = \"sdc\" requires a [ris.sdc] table")
                })?;
                let (rows, cols) = (self.ris.rows, self.ris.cols);
                let pattern = match sdc.pattern {
                    SdcPatternKind::AllZeros => CodingPattern::uniform(rows, cols, Bit::Zero),
                    SdcPatternKind::AllOnes => CodingPattern::uniform(rows, cols, Bit::One),
                    SdcPatternKind::Focus => {
                        let i = sdc.focus_target.ok_or_else(|| {
                            HarnessError::invalid(
                                "ris.sdc.pattern = \"focus\" requires focus_target",
                            )
                        })?;
                        if i >= base.targets.len() {
                            return Err(HarnessError::invalid(format!(
                                "ris.sdc.focus_target = {i} but only {} targets",
                                base.targets.len()
                            )));
                        }
                        base.focused_pattern(i)
                            .map_err(|source| HarnessError::Scene {
                                stage: Stage::Validate,
                                source,
                            })?
                    }
                    SdcPatternKind::Explicit => {
                        let bits = sdc.bits.as_ref().ok_or_else(|| {
                            HarnessError::invalid("ris.sdc.pattern = \"explicit\" requires bits")
                        })?;
                        let pattern =
                            CodingPattern::from_text(&bits.join("\n")).map_err(ris_err)?;
                        pattern.check_matches(array).map_err(ris_err)?;
                        pattern
                    }
                };
                Ok(RisMode::Sdc(pattern))
            }
            RisModeKind::Stc => {
                let stc = self.ris.stc.as_ref().ok_or_else(|| {
                    HarnessError::invalid("ris.mode = \"stc\" requires a [ris.stc] table")
                })?;
                let tau = Self::slot_duration(stc);
                let code = match stc.design {
                    StcDesignKind::TwoBeam => {
                        let (Some(plus), Some(minus)) = (stc.angle_plus_deg, stc.angle_minus_deg)
                        else {
                            return Err(HarnessError::invalid(
                                "ris.stc.design = \"two_beam\" requires angle_plus_deg and angle_minus_deg",
                            ));
                        };
                        design_two_beam_code(array, plus, minus, stc.slots, tau).map_err(stc_err)?
                    }
                    StcDesignKind::Explicit => {
                        let seqs = stc.sequences.as_ref().ok_or_else(|| {
                            HarnessError::invalid(
                                "ris.stc.design = \"explicit\" requires sequences",
                            )
                        })?;
                        if seqs.len() != array.len() {
                            return Err(HarnessError::invalid(format!(
                                "ris.stc.sequences has {} entries, array has {} elements",
                                seqs.len(),
                                array.len()
                            )));
                        }
                        let mut bits = Vec::with_capacity(array.len() * stc.slots);
                        for (e, s) in seqs.iter().enumerate() {
                            if s.chars().count() != stc.slots {
                                return Err(HarnessError::invalid(format!(
                                    "ris.stc.sequences[{e}] must have {} slots",
                                    stc.slots
                                )));
                            }
                            for c in s.chars() {
                                bits.push(Bit::from_char(c).ok_or_else(|| {
                                    HarnessError::invalid(format!(
                                        "ris.stc.sequences[{e}]: '{c}' is not 0 or 1"
                                    ))
                                })?);
                            }
                        }
                        SpaceTimeCode::new(self.ris.rows, self.ris.cols, stc.slots, tau, bits)
                            .map_err(stc_err)?
                    }
                };
                Ok(RisMode::Stc(code))
            }
        }
    }

    /// The core scene described by this scenario.
    pub fn scene(&self) -> Result<Scene<f64>, HarnessError> {
        let array = self.array()?;
        let targets = (0..self.targets.len())
            .map(|i| self.target(&array, i))
            .collect::<Result<Vec<_>, _>>()?;
        let mut scene = Scene {
            tx: self.tx(),
            array,
            ris_mode: RisMode::Absent,
            targets,
            direct_path: self.channel.direct_path,
            phase_modulation: self.channel.phase_modulation,
            propagation: match self.ris.propagation {
                PropagationKind::FarField => Propagation::FarField,
                PropagationKind::NearField => Propagation::NearField,
            },
            snr_db: self.channel.snr_db,
            duration_s: self.channel.duration_s,
            sample_rate_hz: self.channel.sample_rate_hz,
            seed: self.seed,
        };
        scene.ris_mode = self.ris_mode(&scene)?;
        scene.validate().map_err(|source| HarnessError::Scene {
            stage: Stage::Validate,
            source,
        })?;
        Ok(scene)
    }

    /// Tone channels the receiver demodulates.
    pub fn channels_hz(&self) -> Vec<f64> {
        if let Some(ch) = &self.dsp.channels_hz {
            return ch.clone();
        }
        let tone = self.radio.tone_offset_hz;
        match (&self.ris.mode, &self.ris.stc) {
            (RisModeKind::Stc, Some(stc)) => {
                let spacing = 1.0 / (Self::slot_duration(stc) * stc.slots as f64);
                vec![tone + spacing, tone - spacing]
            }
            _ => vec![tone],
        }
    }

    /// Checks every invariant a run depends on, naming the first violated.
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.scene()?;
        let d = &self.dsp;
        let positive = [
            ("dsp.channel_bandwidth_hz", d.channel_bandwidth_hz),
            ("dsp.decimated_rate_hz", d.decimated_rate_hz),
            ("dsp.lowpass_cutoff_hz", d.lowpass_cutoff_hz),
            ("dsp.min_peak_spacing_s", d.min_peak_spacing_s),
            ("dsp.stft_window_s", d.stft_window_s),
            ("dsp.stft_hop_s", d.stft_hop_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(HarnessError::invalid(format!("{name} must be > 0")));
            }
        }
        if !(d.band_lo_hz > 0.0 && d.band_lo_hz < d.band_hi_hz) {
            return Err(HarnessError::invalid(
                "respiration band needs 0 < band_lo_hz < band_hi_hz",
            ));
        }
        if !(d.band_taper_hz >= 0.0) || !(d.edge_guard_s >= 0.0) || !(d.min_prominence >= 0.0) {
            return Err(HarnessError::invalid(
                "band_taper_hz, edge_guard_s and min_prominence must be >= 0",
            ));
        }
        if d.stft_hop_s > d.stft_window_s {
            return Err(HarnessError::invalid(
                "dsp.stft_hop_s must not exceed dsp.stft_window_s",
            ));
        }
        let fs = self.channel.sample_rate_hz;
        let factor = fs / d.decimated_rate_hz;
        if (factor - factor.round()).abs() > 1e-9 || factor < 1.0 {
            return Err(HarnessError::invalid(format!(
                "sample_rate_hz / decimated_rate_hz = {factor} must be a whole number >= 1"
            )));
        }
        if d.lowpass_cutoff_hz >= d.decimated_rate_hz / 2.0 {
            return Err(HarnessError::invalid(
                "dsp.lowpass_cutoff_hz must lie below the decimated Nyquist rate",
            ));
        }
        let usable = self.channel.duration_s - 2.0 * d.edge_guard_s;
        if usable < d.min_duration_s {
            return Err(HarnessError::invalid(format!(
                "duration_s minus edge guards ({usable} s) is shorter than dsp.min_duration_s ({} s)",
                d.min_duration_s
            )));
        }
        let channels = self.channels_hz();
        if channels.is_empty() {
            return Err(HarnessError::invalid("at least one channel is required"));
        }
        for &f in &channels {
            if f.abs() + d.channel_bandwidth_hz / 2.0 >= fs / 2.0 - NYQUIST_GUARD_HZ {
                return Err(HarnessError::invalid(format!(
                    "Nyquist: channel at {f} Hz with bandwidth {} Hz does not fit below fs/2 = {} Hz minus {NYQUIST_GUARD_HZ} Hz guard",
                    d.channel_bandwidth_hz,
                    fs / 2.0
                )));
            }
        }
        for (i, &a) in channels.iter().enumerate() {
            for &b in &channels[i + 1..] {
                if (a - b).abs() <= 2.0 * d.channel_bandwidth_hz {
                    return Err(HarnessError::invalid(format!(
                        "overlapping channels: {a} Hz and {b} Hz are within twice the {} Hz channel bandwidth",
                        d.channel_bandwidth_hz
                    )));
                }
            }
        }
        match self.experiment {
            ExperimentKind::Single => {}
            ExperimentKind::SdcVsAbsent => {
                if self.ris.mode != RisModeKind::Sdc {
                    return Err(HarnessError::invalid(
                        "experiment sdc_vs_absent requires ris.mode = \"sdc\"",
                    ));
                }
                if self.targets.is_empty() {
                    return Err(HarnessError::invalid(
                        "experiment sdc_vs_absent requires a target",
                    ));
                }
            }
            ExperimentKind::TwoPerson => {
                if self.ris.mode != RisModeKind::Stc {
                    return Err(HarnessError::invalid(
                        "experiment two_person requires ris.mode = \"stc\"",
                    ));
                }
                if self.targets.len() != 2 || channels.len() != 2 {
                    return Err(HarnessError::invalid(
                        "experiment two_person requires exactly two targets and two channels",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::parse(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_only_file_is_fully_populated() {
        let s = Scenario::parse("preset = \"fig7\"\n", "mem").unwrap();
        let mut expected = presets::fig7();
        expected.preset = Some("fig7".into());
        assert_eq!(s, expected);
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Scenario::parse("", "mem").unwrap(), Scenario::default());
    }

    #[test]
    fn round_trip_is_stable() {
        for name in presets::NAMES {
            let s = Scenario::parse(&format!("preset = \"{name}\"\nseed = 42\n"), "mem").unwrap();
            let again = Scenario::parse(&s.to_toml(), "mem").unwrap();
            assert_eq!(s, again);
        }
    }

    #[test]
    fn nyquist_violation_is_named() {
        let err = Scenario::parse(
            "preset = \"fig4\"\n[channel]\nsample_rate_hz = 3000.0\n",
            "mem",
        )
        .unwrap_err();
        assert_eq!(err.stage(), Stage::Validate);
        assert!(
            err.to_string().contains("Nyquist") || err.to_string().contains("fs/2"),
            "{err}"
        );
    }

    #[test]
    fn overlapping_channels_are_named() {
        let err = Scenario::parse(
            "preset = \"fig4\"\n[dsp]\nchannels_hz = [1455.0, 1300.0]\n",
            "mem",
        )
        .unwrap_err();
        assert!(err.to_string().contains("overlapping channels"), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = Scenario::parse("seed = 3\n[channel\n", "mem").unwrap_err();
        match err {
            HarnessError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_and_mistyped_fields_report_path() {
        let err = Scenario::parse("[channel]\nduraton_s = 3.0\n", "mem").unwrap_err();
        assert!(
            matches!(&err, HarnessError::Field { field, .. } if field == "channel.duraton_s"),
            "{err}"
        );
        let err = Scenario::parse("[[targets]]\nrate_bpm = \"fast\"\n", "mem").unwrap_err();
        assert!(err.to_string().contains("targets"), "{err}");
    }

    #[test]
    fn stc_mode_requires_code() {
        let err = Scenario::parse("[ris]\nmode = \"stc\"\n", "mem").unwrap_err();
        assert!(err.to_string().contains("[ris.stc]"), "{err}");
    }

    #[test]
    fn unknown_preset_rejected() {
        let err = Scenario::parse("preset = \"fig9\"\n", "mem").unwrap_err();
        assert!(err.to_string().contains("unknown preset"));
    }
}
