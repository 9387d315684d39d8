//! Runs a scenario end to end: synthesis, receiver chain, measurements.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use ris_vitals::dsp::periodogram;
use ris_vitals::scene::{add_noise_power, synthesize_clean};
use ris_vitals::{
    demux_two_person, process_channel, synthesize_received, BasebandSignal, Bit, ChannelResult,
    CodingPattern, DspParams, RisMode, Scene, SceneError,
};

use crate::error::{HarnessError, Stage};
use crate::scenario::{Artifact, ExperimentKind, Scenario};

/// Ground truth against the receiver's estimate for one person.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetReport {
    /// Which record the estimate came from, e.g. `sdc` or `ch1455hz`.
    pub label: String,
    pub target: usize,
    pub channel_hz: f64,
    pub true_bpm: f64,
    /// `None` when the channel reported no breathing.
    pub estimated_bpm: Option<f64>,
    pub band_power_ratio: f64,
}

impl TargetReport {
    pub fn error_bpm(&self) -> Option<f64> {
        self.estimated_bpm.map(|e| e - self.true_bpm)
    }
}

/// A named scalar result; `None` when undefined (e.g. a reference null).
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub name: String,
    pub value: Option<f64>,
    pub unit: &'static str,
}

/// Data a run keeps for export.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Baseband {
        label: String,
        signal: BasebandSignal<f64>,
    },
    Channel {
        label: String,
        result: ChannelResult<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Relative to the output directory.
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: Scenario,
    pub targets: Vec<TargetReport>,
    pub measurements: Vec<Measurement>,
    pub records: Vec<Record>,
    /// Filled by [`crate::export_results`].
    pub manifest: Vec<ManifestEntry>,
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements
            .iter()
            .find(|m| m.name == name)
            .and_then(|m| m.value)
    }

    pub fn channel(&self, label: &str) -> Option<&ChannelResult<f64>> {
        self.records.iter().find_map(|r| match r {
            Record::Channel { label: l, result } if l == label => Some(result),
            _ => None,
        })
    }
}

fn synthesis(source: SceneError) -> HarnessError {
    HarnessError::Scene {
        stage: Stage::Synthesis,
        source,
    }
}

fn process(
    signal: &BasebandSignal<f64>,
    tone: f64,
    params: &DspParams<f64>,
    label: &str,
) -> Result<ChannelResult<f64>, HarnessError> {
    process_channel(signal, tone, params).map_err(|source| HarnessError::Dsp {
        label: label.into(),
        source,
    })
}

fn db_power(a: f64, b: f64) -> Option<f64> {
    (a > 0.0 && b > 0.0).then(|| 10.0 * (a / b).log10())
}

pub fn channel_label(tone_hz: f64) -> String {
    format!("ch{tone_hz:.0}hz")
}

/// Strongest periodogram bin within one and a half bins of `freq`.
fn line_power(result: &ChannelResult<f64>, freq: f64) -> f64 {
    let (freqs, power) = periodogram(&result.envelope);
    let df = result.envelope.fs / result.envelope.len() as f64;
    freqs
        .iter()
        .zip(&power)
        .filter(|(f, _)| (**f - freq).abs() <= 1.5 * df)
        .map(|(_, p)| *p)
        .fold(0.0, f64::max)
}

struct Run {
    targets: Vec<TargetReport>,
    measurements: Vec<Measurement>,
    records: Vec<Record>,
}

fn target_report(
    label: &str,
    target: usize,
    scenario: &Scenario,
    tone: f64,
    ch: &ChannelResult<f64>,
) -> TargetReport {
    TargetReport {
        label: label.into(),
        target,
        channel_hz: tone,
        true_bpm: scenario.targets[target].rate_bpm,
        estimated_bpm: ch.respiration.rate_bpm(),
        band_power_ratio: ch.respiration.band_power_ratio(),
    }
}

fn run_single(
    scenario: &Scenario,
    scene: &Scene<f64>,
    keep_baseband: bool,
) -> Result<Run, HarnessError> {
    let params = scenario.dsp.params();
    let signal = synthesize_received(scene).map_err(synthesis)?;
    let channels = scenario.channels_hz();
    let mut run = Run {
        targets: Vec::new(),
        measurements: vec![Measurement {
            name: "received_power".into(),
            value: Some(signal.mean_power()),
            unit: "",
        }],
        records: Vec::new(),
    };
    let mut results = Vec::new();
    for &tone in &channels {
        let label = channel_label(tone);
        results.push((
            label.clone(),
            tone,
            process(&signal, tone, &params, &label)?,
        ));
    }
    for i in 0..scenario.targets.len() {
        let (label, tone, ch) = &results[i.min(results.len() - 1)];
        run.targets
            .push(target_report(label, i, scenario, *tone, ch));
    }
    if keep_baseband {
        run.records.push(Record::Baseband {
            label: "received".into(),
            signal,
        });
    }
    run.records.extend(
        results
            .into_iter()
            .map(|(label, _, result)| Record::Channel { label, result }),
    );
    Ok(run)
}

fn run_sdc_vs_absent(
    scenario: &Scenario,
    scene: &Scene<f64>,
    keep_baseband: bool,
) -> Result<Run, HarnessError> {
    let params = scenario.dsp.params();
    let tone = scenario.radio.tone_offset_hz;
    let with_mode = |mode: RisMode<f64>| {
        let mut s = scene.clone();
        s.ris_mode = mode;
        s.snr_db = None;
        s
    };
    let (rows, cols) = (scene.array.rows(), scene.array.cols());
    let clean_sdc = synthesize_clean(&with_mode(scene.ris_mode.clone())).map_err(synthesis)?;
    let clean_absent = synthesize_clean(&with_mode(RisMode::Absent)).map_err(synthesis)?;
    let clean_zeros = synthesize_clean(&with_mode(RisMode::Sdc(CodingPattern::uniform(
        rows,
        cols,
        Bit::Zero,
    ))))
    .map_err(synthesis)?;
    let (p_sdc, p_absent, p_zeros) = (
        clean_sdc.mean_power(),
        clean_absent.mean_power(),
        clean_zeros.mean_power(),
    );

    // both records get the same absolute noise, referenced to the surface-free run
    let (sdc, absent, noise_power) = match scene.snr_db {
        Some(snr) if snr.is_finite() => {
            let noise_power = p_absent / 10f64.powf(snr / 10.0);
            (
                add_noise_power(&clean_sdc, noise_power, scene.seed).map_err(synthesis)?,
                add_noise_power(&clean_absent, noise_power, scene.seed).map_err(synthesis)?,
                noise_power,
            )
        }
        _ => (clean_sdc, clean_absent, 0.0),
    };
    let ch_sdc = process(&sdc, tone, &params, "sdc")?;
    let ch_absent = process(&absent, tone, &params, "absent")?;
    let focus = 0;
    let run = Run {
        targets: vec![
            target_report("sdc", focus, scenario, tone, &ch_sdc),
            target_report("absent", focus, scenario, tone, &ch_absent),
        ],
        measurements: vec![
            Measurement {
                name: "received_gain_vs_absent_db".into(),
                value: db_power(p_sdc, p_absent),
                unit: "dB",
            },
            Measurement {
                name: "received_gain_vs_all_zeros_db".into(),
                value: db_power(p_sdc, p_zeros),
                unit: "dB",
            },
            Measurement {
                name: "noise_power".into(),
                value: Some(noise_power),
                unit: "",
            },
            Measurement {
                name: "band_power_ratio_sdc".into(),
                value: Some(ch_sdc.respiration.band_power_ratio()),
                unit: "",
            },
            Measurement {
                name: "band_power_ratio_absent".into(),
                value: Some(ch_absent.respiration.band_power_ratio()),
                unit: "",
            },
        ],
        records: {
            let mut r = Vec::new();
            if keep_baseband {
                r.push(Record::Baseband {
                    label: "sdc".into(),
                    signal: sdc,
                });
                r.push(Record::Baseband {
                    label: "absent".into(),
                    signal: absent,
                });
            }
            r.push(Record::Channel {
                label: "sdc".into(),
                result: ch_sdc,
            });
            r.push(Record::Channel {
                label: "absent".into(),
                result: ch_absent,
            });
            r
        },
    };
    Ok(run)
}

fn run_two_person(
    scenario: &Scenario,
    scene: &Scene<f64>,
    keep_baseband: bool,
) -> Result<Run, HarnessError> {
    let params = scenario.dsp.params();
    let channels = scenario.channels_hz();
    let signal = synthesize_received(scene).map_err(synthesis)?;
    let results =
        demux_two_person(&signal, (channels[0], channels[1]), &params).map_err(|source| {
            HarnessError::Dsp {
                label: "demux".into(),
                source,
            }
        })?;
    let mut run = Run {
        targets: Vec::new(),
        measurements: Vec::new(),
        records: Vec::new(),
    };
    if keep_baseband {
        run.records.push(Record::Baseband {
            label: "received".into(),
            signal,
        });
    }
    let rates: Vec<f64> = scenario.targets.iter().map(|t| t.rate_bpm / 60.0).collect();
    for (i, result) in results.into_iter().enumerate() {
        let label = channel_label(channels[i]);
        run.targets
            .push(target_report(&label, i, scenario, channels[i], &result));
        let own = line_power(&result, rates[i]);
        let other = line_power(&result, rates[1 - i]);
        run.measurements.push(Measurement {
            name: format!("crosstalk_{label}_db"),
            value: db_power(other, own),
            unit: "dB",
        });
        run.records.push(Record::Channel { label, result });
    }
    Ok(run)
}

/// Synthesizes the scenario's records, runs the receiver on each channel and
/// collects the per-person estimates and derived measurements.
pub fn run_experiment(scenario: &Scenario) -> Result<RunReport, HarnessError> {
    let start = Instant::now();
    scenario.validate()?;
    let scene = scenario.scene()?;
    let keep_baseband = scenario.outputs.artifacts.contains(&Artifact::Baseband);
    let run = match scenario.experiment {
        ExperimentKind::Single => run_single(scenario, &scene, keep_baseband)?,
        ExperimentKind::SdcVsAbsent => run_sdc_vs_absent(scenario, &scene, keep_baseband)?,
        ExperimentKind::TwoPerson => run_two_person(scenario, &scene, keep_baseband)?,
    };
    Ok(RunReport {
        scenario: scenario.clone(),
        targets: run.targets,
        measurements: run.measurements,
        records: run.records,
        manifest: Vec::new(),
        wall_clock: start.elapsed(),
    })
}
