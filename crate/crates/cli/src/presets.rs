//! The two reference experiments.

use crate::scenario::{
    Artifact, ExperimentKind, PropagationKind, RisModeKind, Scenario, StcDesignKind, StcSpec,
    TargetSpec,
};

pub const NAMES: [&str; 2] = ["fig7", "fig4"];

/// SNR of the surface-free run in the fig7 comparison. Both runs receive
/// noise of this absolute power.
pub const FIG7_REFERENCE_SNR_DB: f64 = -5.0;

pub fn preset(name: &str) -> Option<Scenario> {
    match name {
        "fig7" => Some(fig7()),
        "fig4" => Some(fig4()),
        _ => None,
    }
}

/// One person at 30°, 2 m, 15 bpm; the surface focused on them against no
/// surface at all, at a matched noise floor.
pub fn fig7() -> Scenario {
    let mut s = Scenario::default();
    s.name = "fig7".into();
    s.seed = 7;
    s.experiment = ExperimentKind::SdcVsAbsent;
    s.channel.snr_db = Some(FIG7_REFERENCE_SNR_DB);
    s
}

/// Two persons at ±45°, 2 m, breathing at 12 and 18 bpm, separated onto the
/// `q = ±1` harmonics (tone ± 455 Hz) of a two-beam space-time code.
pub fn fig4() -> Scenario {
    let mut s = Scenario::default();
    s.name = "fig4".into();
    s.seed = 4;
    s.experiment = ExperimentKind::TwoPerson;
    s.ris.mode = RisModeKind::Stc;
    s.ris.propagation = PropagationKind::FarField;
    s.ris.sdc = None;
    s.ris.stc = Some(StcSpec {
        design: StcDesignKind::TwoBeam,
        slots: 16,
        slot_duration_s: None,
        angle_plus_deg: Some(45.0),
        angle_minus_deg: Some(-45.0),
        sequences: None,
    });
    s.channel.snr_db = Some(20.0);
    s.targets = vec![
        TargetSpec::at_azimuth(45.0, 2.0, 12.0),
        TargetSpec::at_azimuth(-45.0, 2.0, 18.0),
    ];
    s.outputs.artifacts = vec![Artifact::Envelopes, Artifact::Spectrograms, Artifact::Plots];
    s
}
