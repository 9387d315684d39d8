use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ris_vitals::ris::reflection_coeff;
use ris_vitals::stc::{
    apply_time_shift, default_slot_duration, design_two_beam_code, harmonic_coefficients,
    harmonic_coefficients_oracle, square_wave,
};
use ris_vitals::{Bit, HarmonicSpectrum, MetaAtomProfile, RisArray, SpaceTimeCode, Vec3};
use std::f64::consts::PI;

const FC: f64 = 3.500001e9;

fn as_coeffs(bits: &[Bit]) -> Vec<Complex<f64>> {
    let p = MetaAtomProfile::default();
    bits.iter().map(|&b| reflection_coeff(b, &p)).collect()
}

#[test]
fn closed_form_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lengths = [2usize, 4, 8, 16, 32];
    for i in 0..1000 {
        let l = lengths[i % lengths.len()];
        let seq: Vec<Complex<f64>> = if i % 2 == 0 {
            as_coeffs(
                &(0..l)
                    .map(|_| Bit::from(rng.random::<bool>()))
                    .collect::<Vec<_>>(),
            )
        } else {
            (0..l)
                .map(|_| Complex::from_polar(rng.random_range(0.0..1.0), rng.random_range(-PI..PI)))
                .collect()
        };
        let fast = harmonic_coefficients(&seq, -8..=8).unwrap();
        let slow = harmonic_coefficients_oracle(&seq, -8..=8, 64 * l).unwrap();
        let peak = fast
            .iter()
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for ((q, a), (_, b)) in fast.iter().zip(slow.iter()) {
            assert!((a - b).norm() / peak <= 1e-9, "L={l} q={q}: {a} vs {b}");
        }
    }
}

#[test]
fn square_wave_harmonics() {
    for l in [8, 16, 32] {
        let c = harmonic_coefficients(&as_coeffs(&square_wave(l)), -3..=3).unwrap();
        assert!(c.get(0).unwrap().norm() <= 1e-12);
        assert!((c.get(1).unwrap().norm() - 2.0 / PI).abs() <= 1e-9);
        assert!((c.get(-1).unwrap().norm() - 2.0 / PI).abs() <= 1e-9);
    }
}

fn bit_sequence() -> impl Strategy<Value = Vec<Bit>> {
    prop::sample::select(vec![2usize, 4, 8, 16])
        .prop_flat_map(|l| prop::collection::vec(any::<bool>().prop_map(Bit::from), l))
}

proptest! {
    #[test]
    fn time_shift_is_a_linear_phase(bits in bit_sequence(), shift in 0usize..40) {
        let l = bits.len();
        let code = SpaceTimeCode::<f64>::uniform(1, 1, &bits, default_slot_duration(l)).unwrap();
        let shifted = apply_time_shift(&code, (0, 0), shift).unwrap();
        let a = harmonic_coefficients(&as_coeffs(code.sequence(0, 0)), -6..=6).unwrap();
        let b = harmonic_coefficients(&as_coeffs(shifted.sequence(0, 0)), -6..=6).unwrap();
        for ((q, ca), (_, cb)) in a.iter().zip(b.iter()) {
            let rot = Complex::from_polar(1.0, -2.0 * PI * q as f64 * shift as f64 / l as f64);
            prop_assert!((ca * rot - cb).norm() <= 1e-12);
        }
    }

    #[test]
    fn parseval_converges(bits in bit_sequence()) {
        let l = bits.len() as i32;
        let c = harmonic_coefficients(&as_coeffs(&bits), -50 * l..=50 * l).unwrap();
        // unit-magnitude states carry unit mean power
        prop_assert!(c.power() >= 0.99);
        prop_assert!(c.power() <= 1.0 + 1e-9);
    }

    #[test]
    fn harmonic_energy_is_bounded(bits in prop::collection::vec(any::<bool>(), 16 * 8), az in -80.0..80.0f64) {
        let array = RisArray::half_wavelength(4, 4, FC).unwrap();
        let bits: Vec<Bit> = bits.into_iter().map(Bit::from).collect();
        let code = SpaceTimeCode::new(4, 4, 8, default_slot_duration(8), bits).unwrap();
        let spec = HarmonicSpectrum::of_code(&code, &MetaAtomProfile::default(), -5..=5).unwrap();
        let inc = Vec3::new(1.0, 0.0, 0.0);
        let obs = array.azimuth_direction(az);
        let total: f64 = (-5..=5).map(|q| spec.array_factor(&array, q, inc, obs).unwrap().norm_sqr()).sum();
        prop_assert!(total <= 16.0 * 16.0 + 1e-9);
    }
}

fn harmonic_scan(q: i32) -> Vec<(f64, f64)> {
    let array = RisArray::half_wavelength(16, 16, FC).unwrap();
    let code = design_two_beam_code(&array, 45.0, -45.0, 16, default_slot_duration(16)).unwrap();
    let spec = HarmonicSpectrum::of_code(&code, &MetaAtomProfile::default(), q..=q).unwrap();
    let inc = Vec3::new(1.0, 0.0, 0.0);
    (-900..=900)
        .map(|i| {
            let deg = i as f64 / 10.0;
            let af = spec
                .array_factor(&array, q, inc, array.azimuth_direction(deg))
                .unwrap();
            (deg, af.norm())
        })
        .collect()
}

fn argmax(scan: &[(f64, f64)]) -> f64 {
    scan.iter()
        .fold(
            (0.0, -1.0),
            |best, &(d, v)| if v > best.1 { (d, v) } else { best },
        )
        .0
}

#[test]
fn two_beam_code_points_at_plus_minus_45() {
    let plus = harmonic_scan(1);
    let minus = harmonic_scan(-1);
    assert!((argmax(&plus) - 45.0).abs() <= 2.0, "{}", argmax(&plus));
    assert!((argmax(&minus) + 45.0).abs() <= 2.0, "{}", argmax(&minus));
    let peak = plus.iter().map(|p| p.1).fold(0.0, f64::max);
    for (&(d, a), &(_, b)) in plus.iter().zip(minus.iter().rev()) {
        assert!((a - b).abs() / peak <= 1e-9, "{d}: {a} vs {b}");
    }
}
