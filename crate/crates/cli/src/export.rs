//! Writes a run's artifacts, a text report and a checksummed manifest.
//!
//! Every file is a pure function of the report's data, so re-exporting a run
//! (or rerunning it with the same seed) reproduces identical checksums. The
//! wall-clock time is deliberately left out of the files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ris_vitals::RealSignal;
use sha2::{Digest, Sha256};

use crate::error::HarnessError;
use crate::experiment::{ManifestEntry, Record, RunReport};
use crate::scenario::Artifact;

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Plain-text summary of a run.
pub fn render_report(report: &RunReport) -> String {
    let s = &report.scenario;
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", s.name);
    let _ = writeln!(out, "experiment: {:?}", s.experiment);
    let _ = writeln!(out, "seed: {}", s.seed);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "label,target,channel_hz,true_bpm,estimated_bpm,error_bpm,band_power_ratio"
    );
    for t in &report.targets {
        let est = t
            .estimated_bpm
            .map_or("none".to_string(), |v| format!("{v:.3}"));
        let err = t
            .error_bpm()
            .map_or("none".to_string(), |v| format!("{v:+.3}"));
        let _ = writeln!(
            out,
            "{},{},{:.3},{:.3},{},{},{:.6}",
            t.label, t.target, t.channel_hz, t.true_bpm, est, err, t.band_power_ratio
        );
    }
    let _ = writeln!(out);
    for m in &report.measurements {
        let value = m
            .value
            .map_or("undefined".to_string(), |v| format!("{v:.6e}"));
        let unit = if m.unit.is_empty() {
            String::new()
        } else {
            format!(" {}", m.unit)
        };
        let _ = writeln!(out, "{}: {value}{unit}", m.name);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "# resolved scenario");
    out.push_str(&s.to_toml());
    out
}

/// Minimal SVG line plot of one envelope.
pub fn envelope_svg(title: &str, signal: &RealSignal<f64>) -> String {
    const W: f64 = 800.0;
    const H: f64 = 300.0;
    const PAD: f64 = 40.0;
    let n = signal.len();
    let stride = n.div_ceil(2000).max(1);
    let (lo, hi) = signal
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let t_end = signal.time(n.saturating_sub(1));
    let t_span = if t_end > signal.t0 {
        t_end - signal.t0
    } else {
        1.0
    };
    let mut points = String::new();
    for i in (0..n).step_by(stride) {
        let x = PAD + (signal.time(i) - signal.t0) / t_span * (W - 2.0 * PAD);
        let y = H - PAD - (signal.samples[i] - lo) / span * (H - 2.0 * PAD);
        let _ = write!(points, "{x:.2},{y:.2} ");
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "<rect x=\"{p}\" y=\"{p}\" width=\"{iw}\" height=\"{ih}\" fill=\"none\" stroke=\"#888\"/>\n",
            "<text x=\"{p}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
            "<text x=\"{p}\" y=\"{by}\" font-family=\"sans-serif\" font-size=\"11\">{t0:.1} s</text>\n",
            "<text x=\"{rx}\" y=\"{by}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{t1:.1} s</text>\n",
            "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1\" points=\"{pts}\"/>\n",
            "</svg>\n"
        ),
        w = W,
        h = H,
        p = PAD,
        iw = W - 2.0 * PAD,
        ih = H - 2.0 * PAD,
        title = title,
        by = H - PAD + 16.0,
        rx = W - PAD,
        t0 = signal.t0,
        t1 = t_end,
        pts = points.trim_end(),
    )
}

fn csv<F>(write: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory cannot fail");
    buf
}

/// Writes every requested artifact into `out_dir`, then `manifest.txt` in
/// `sha256sum` format. The manifest is stored in the report and returned.
pub fn export_results(
    report: &mut RunReport,
    out_dir: &Path,
) -> Result<Vec<ManifestEntry>, HarnessError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Write { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let wants = |a: Artifact| report.scenario.outputs.artifacts.contains(&a);

    let mut files: Vec<(String, Vec<u8>)> = vec![
        (
            "scenario.toml".into(),
            report.scenario.to_toml().into_bytes(),
        ),
        ("report.txt".into(), render_report(report).into_bytes()),
    ];
    for record in &report.records {
        match record {
            Record::Baseband { label, signal } if wants(Artifact::Baseband) => {
                files.push((
                    format!("baseband_{label}.csv"),
                    csv(|b| signal.write_csv(b)),
                ));
            }
            Record::Baseband { .. } => {}
            Record::Channel { label, result } => {
                if wants(Artifact::Envelopes) {
                    files.push((
                        format!("envelope_{label}.csv"),
                        csv(|b| result.envelope.write_csv(b)),
                    ));
                }
                if wants(Artifact::Spectrograms) {
                    if let Some(spec) = &result.spectrogram {
                        files.push((
                            format!("spectrogram_{label}.csv"),
                            csv(|b| spec.write_csv(b)),
                        ));
                    }
                }
                if wants(Artifact::Plots) {
                    let title = format!("{} envelope, {label}", report.scenario.name);
                    files.push((
                        format!("envelope_{label}.svg"),
                        envelope_svg(&title, &result.envelope).into_bytes(),
                    ));
                }
            }
        }
    }

    let mut manifest = Vec::with_capacity(files.len());
    let mut listing = String::new();
    for (name, bytes) in files {
        let path = out_dir.join(&name);
        fs::write(&path, &bytes).map_err(io_err(&path))?;
        let sha256 = hex::encode(Sha256::digest(&bytes));
        let _ = writeln!(listing, "{sha256}  {name}");
        manifest.push(ManifestEntry {
            path: PathBuf::from(name),
            sha256,
            bytes: bytes.len() as u64,
        });
    }
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, listing).map_err(io_err(&path))?;
    report.manifest = manifest.clone();
    Ok(manifest)
}
