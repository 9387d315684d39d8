//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ris_vitals::dsp::fir::lowpass_len;
use ris_vitals::dsp::{decimate, detect_peaks, lowpass, stft};
use ris_vitals::ris::{array_factor, reflection_coeff};
use ris_vitals::stc::{
    default_slot_duration, design_two_beam_code, harmonic_coefficients,
    harmonic_coefficients_oracle, square_wave,
};
use ris_vitals::{
    Bit, CodingPattern, HarmonicSpectrum, MetaAtomProfile, RealSignal, RisArray, Vec3,
};
use ris_vitals_cli::presets::{self, FIG7_REFERENCE_SNR_DB};
use ris_vitals_cli::scenario::{Artifact, ExperimentKind, TargetSpec};
use ris_vitals_cli::{export_results, run_experiment, RunReport, Scenario};

const FC: f64 = 3.500001e9;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Runs `f` over `0..n` on all cores, preserving order.
fn parallel_map<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism()
        .map_or(4, |p| p.get())
        .min(n.max(1));
    let mut out: Vec<Option<R>> = (0..n).map(|_| None).collect();
    thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    (w..n)
                        .step_by(workers)
                        .map(|i| (i, f(i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                out[i] = Some(r);
            }
        }
    });
    out.into_iter()
        .map(|r| r.expect("every index computed"))
        .collect()
}

fn run(s: &Scenario) -> RunReport {
    run_experiment(s).unwrap_or_else(|e| panic!("{e}"))
}

fn ac1_sdc_gain() -> Verdict {
    let start = Instant::now();
    let mut worst: (f64, f64, f64) = (0.0, f64::INFINITY, f64::INFINITY);
    let mut pass = true;
    for angle in [30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0] {
        let mut s = presets::fig7();
        s.channel.snr_db = None;
        s.targets = vec![TargetSpec::at_azimuth(angle, 2.0, 15.0)];
        let r = run(&s);
        let vs_absent = r
            .measurement("received_gain_vs_absent_db")
            .unwrap_or(f64::NEG_INFINITY);
        let vs_zeros = r
            .measurement("received_gain_vs_all_zeros_db")
            .unwrap_or(f64::NEG_INFINITY);
        if vs_absent.min(vs_zeros) < worst.1.min(worst.2) {
            worst = (angle, vs_absent, vs_zeros);
        }
        pass &= vs_absent >= 10.0 && vs_zeros >= 10.0;
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    verdict(
        pass,
        format!(
            "30-60 deg: worst at {} deg: {:.2} dB vs absent, {:.2} dB vs all-zeros (need >= 10); {:.1} s",
            worst.0,
            worst.1,
            worst.2,
            elapsed.as_secs_f64()
        ),
    )
}

fn ac2_single_person() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for bpm in [12.0, 15.0, 20.0] {
        let hits = parallel_map(100, |seed| {
            let mut s = Scenario::default();
            s.experiment = ExperimentKind::Single;
            s.seed = 1000 + seed as u64;
            s.channel.snr_db = Some(10.0);
            s.targets = vec![TargetSpec::at_azimuth(30.0, 2.0, bpm)];
            s.targets[0].phase_offset_rad = TAU * ((seed as f64 * 0.618_034) % 1.0);
            let r = run(&s);
            r.targets[0].error_bpm().is_some_and(|e| e.abs() <= 0.5)
        })
        .into_iter()
        .filter(|&h| h)
        .count();
        pass &= hits >= 95;
        parts.push(format!("{bpm} bpm {hits}/100"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    verdict(
        pass,
        format!(
            "SNR 10 dB, within 0.5 bpm: {} (need >= 95); {:.1} s",
            parts.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn ac3_fig7() -> Verdict {
    let start = Instant::now();
    let wins = parallel_map(50, |seed| {
        let mut s = presets::fig7();
        s.seed = 7000 + seed as u64;
        let r = run(&s);
        let sdc = r.measurement("band_power_ratio_sdc").unwrap();
        let absent = r.measurement("band_power_ratio_absent").unwrap();
        sdc > absent
    })
    .into_iter()
    .filter(|&w| w)
    .count();
    verdict(
        wins >= 48,
        format!(
            "SDC band power ratio above RIS-absent in {wins}/50 runs (need >= 48), reference SNR {FIG7_REFERENCE_SNR_DB} dB; {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn ac4_two_person() -> Verdict {
    let start = Instant::now();
    let r = run(&presets::fig4());
    let mut pass = true;
    let mut parts = Vec::new();
    for t in &r.targets {
        let err = t.error_bpm();
        pass &= err.is_some_and(|e| e.abs() <= 0.5);
        let xt = r.measurement(&format!("crosstalk_{}_db", t.label));
        pass &= xt.is_some_and(|x| x <= -15.0);
        parts.push(format!(
            "{}: true {} est {} crosstalk {} dB",
            t.label,
            t.true_bpm,
            t.estimated_bpm.map_or("none".into(), |v| format!("{v:.2}")),
            xt.map_or("undefined".into(), |v| format!("{v:.1}"))
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    verdict(
        pass,
        format!("{}; {:.1} s", parts.join("; "), elapsed.as_secs_f64()),
    )
}

fn coeffs(bits: &[Bit]) -> Vec<Complex<f64>> {
    let p = MetaAtomProfile::default();
    bits.iter().map(|&b| reflection_coeff(b, &p)).collect()
}

fn ac5_harmonic_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let lengths = [2usize, 4, 8, 16, 32];
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let l = lengths[i % lengths.len()];
        let seq = coeffs(
            &(0..l)
                .map(|_| Bit::from(rng.random::<bool>()))
                .collect::<Vec<_>>(),
        );
        let fast = harmonic_coefficients(&seq, -8..=8).unwrap();
        let slow = harmonic_coefficients_oracle(&seq, -8..=8, 64 * l).unwrap();
        let peak = fast.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        for ((_, a), (_, b)) in fast.iter().zip(slow.iter()) {
            worst = worst.max((a - b).norm() / peak);
        }
    }
    let sq = harmonic_coefficients(&coeffs(&square_wave(16)), -1..=1).unwrap();
    let c1_err = (sq.get(1).unwrap().norm() - 2.0 / PI)
        .abs()
        .max((sq.get(-1).unwrap().norm() - 2.0 / PI).abs());
    let c0 = sq.get(0).unwrap().norm();
    verdict(
        worst <= 1e-9 && c1_err <= 1e-9 && c0 <= 1e-12,
        format!("max rel err {worst:.2e} (<= 1e-9); ||c±1| - 2/pi| {c1_err:.2e}; |c0| {c0:.2e}"),
    )
}

fn ac6_beam_pointing() -> Verdict {
    let array = RisArray::half_wavelength(16, 16, FC).unwrap();
    let code = design_two_beam_code(&array, 45.0, -45.0, 16, default_slot_duration(16)).unwrap();
    let spec = HarmonicSpectrum::of_code(&code, &MetaAtomProfile::default(), -1..=1).unwrap();
    let inc = Vec3::new(1.0, 0.0, 0.0);
    let scan = |q: i32| -> Vec<f64> {
        (-900..=900)
            .map(|i| {
                spec.array_factor(&array, q, inc, array.azimuth_direction(i as f64 / 10.0))
                    .unwrap()
                    .norm()
            })
            .collect()
    };
    let (plus, minus) = (scan(1), scan(-1));
    let argmax = |v: &[f64]| {
        let i = v
            .iter()
            .enumerate()
            .fold(0, |b, (i, &x)| if x > v[b] { i } else { b });
        i as f64 / 10.0 - 90.0
    };
    let (p, m) = (argmax(&plus), argmax(&minus));
    let peak = plus.iter().cloned().fold(0.0, f64::max);
    let symmetry = plus
        .iter()
        .zip(minus.iter().rev())
        .map(|(a, b)| (a - b).abs() / peak)
        .fold(0.0, f64::max);
    verdict(
        (p - 45.0).abs() <= 2.0 && (m + 45.0).abs() <= 2.0 && symmetry <= 1e-9,
        format!("q=+1 peak {p:.1} deg, q=-1 peak {m:.1} deg (within 2); mirror asymmetry {symmetry:.2e} (<= 1e-9)"),
    )
}

fn ac7_array_factor() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let profile = MetaAtomProfile::<f64>::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (rows, cols) = (rng.random_range(1..=8usize), rng.random_range(1..=8usize));
        let array = RisArray::half_wavelength(rows, cols, FC).unwrap();
        let pattern = CodingPattern::from_fn(rows, cols, |_, _| Bit::from(rng.random::<bool>()));
        let dir = |rng: &mut ChaCha8Rng| {
            let (az, el): (f64, f64) = (rng.random_range(-1.4..1.4), rng.random_range(-1.0..1.0));
            Vec3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin())
        };
        let (inc, obs) = (dir(&mut rng), dir(&mut rng));
        let got = array_factor(&array, &pattern, inc, obs).unwrap();
        let (k, d) = (array.wavenumber(), array.spacing());
        let w = pattern.coefficients(&profile);
        let mut want = Complex::new(0.0, 0.0);
        for m in 0..rows {
            for n in 0..cols {
                let y = (n as f64 - (cols as f64 - 1.0) / 2.0) * d;
                let z = (m as f64 - (rows as f64 - 1.0) / 2.0) * d;
                want += w[m * cols + n]
                    * Complex::from_polar(1.0, k * (y * (inc.y + obs.y) + z * (inc.z + obs.z)));
            }
        }
        worst = worst.max((got - want).norm() / (rows * cols) as f64);
    }
    verdict(
        worst <= 1e-12,
        format!("max error relative to M*N: {worst:.2e} (<= 1e-12)"),
    )
}

fn steady<'a>(x: &'a [f64], skip: usize) -> &'a [f64] {
    &x[skip.min(x.len() / 2)..x.len() - skip.min(x.len() / 2)]
}

fn ac8_dsp() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;

    let fast = RealSignal::from_fn(10_000.0, 600_000, |t| 1.0 + 0.2 * (TAU * 0.25 * t).sin());
    let dec = decimate(&fast, 200.0).unwrap();
    let skip = 2 * lowpass_len(0.4 * 200.0, 10_000.0) / 50;
    let swing = steady(&dec.samples, skip)
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let amp_err = ((swing.1 - swing.0) / 2.0 - 0.2).abs() / 0.2;
    pass &= amp_err <= 0.01;
    notes.push(format!("decimation amplitude err {:.3}%", amp_err * 100.0));

    let mut stop_db = f64::INFINITY;
    for f in [3.0, 5.0, 10.0, 50.0] {
        let tone = RealSignal::from_fn(200.0, 12_000, |t| (TAU * f * t).sin());
        let out = lowpass(&tone, 1.0).unwrap();
        let leak = steady(&out.samples, 2 * lowpass_len(1.0, 200.0))
            .iter()
            .fold(0.0f64, |a, &v| a.max(v.abs()));
        stop_db = stop_db.min(-20.0 * leak.max(1e-300).log10());
    }
    pass &= stop_db >= 60.0;
    notes.push(format!("low-pass stopband (3-50 Hz) {stop_db:.1} dB"));

    let noisy = RealSignal::from_fn(200.0, 6000, |t| {
        (TAU * 0.3 * t).sin() + 0.3 * (TAU * 13.0 * t).cos()
    });
    let n = 512;
    let spec = stft(&noisy, n, 100).unwrap();
    let w = ris_vitals::dsp::fir::hann_periodic::<f64>(n);
    let mut parseval = 0.0f64;
    for i in 0..spec.frames() {
        let time: f64 = (0..n)
            .map(|k| (noisy.samples[i * 100 + k] * w[k]).powi(2))
            .sum();
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
        parseval = parseval.max(((time - freq) / time).abs());
    }
    pass &= parseval <= 1e-9;
    notes.push(format!("STFT Parseval {parseval:.1e}"));

    let mut counts = Vec::new();
    for bpm in [12.0, 15.0, 20.0] {
        let s = RealSignal::from_fn(200.0, 12_000, |t| (TAU * bpm / 60.0 * t).sin());
        let got = detect_peaks(&s, 2.0, 0.1).unwrap().len();
        pass &= got == bpm as usize;
        counts.push(format!("{got}/{bpm}"));
    }
    notes.push(format!("peaks {}", counts.join(" ")));

    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let manifests: Vec<_> = dirs
        .iter()
        .map(|d| {
            let mut s = presets::fig4();
            s.outputs.artifacts.push(Artifact::Baseband);
            s.channel.duration_s = 20.0;
            let mut r = run(&s);
            export_results(&mut r, d.path()).unwrap();
            r.manifest
        })
        .collect();
    let identical = manifests[0] == manifests[1]
        && manifests[0]
            .iter()
            .any(|e| e.path.to_string_lossy().ends_with(".csv"))
        && manifests[0].iter().all(|e| {
            std::fs::read(dirs[0].path().join(&e.path)).unwrap()
                == std::fs::read(dirs[1].path().join(&e.path)).unwrap()
        });
    pass &= identical;
    notes.push(format!(
        "determinism {}",
        if identical {
            "byte-identical"
        } else {
            "DIFFERS"
        }
    ));

    verdict(pass, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("AC-1 SDC gain >= 10 dB", ac1_sdc_gain),
        ("AC-2 single-person rate recovery", ac2_single_person),
        ("AC-3 fig7 band power ratio", ac3_fig7),
        ("AC-4 two-person STC demux", ac4_two_person),
        ("AC-5 harmonic oracle equivalence", ac5_harmonic_oracle),
        ("AC-6 harmonic beam pointing", ac6_beam_pointing),
        ("AC-7 array factor brute force", ac7_array_factor),
        ("AC-8 DSP unit properties", ac8_dsp),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} {name} ({:.1} s): {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
