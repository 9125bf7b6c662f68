use std::f64::consts::TAU;

use proptest::prelude::*;
use rfwpt::channel::{received_signal, ChannelMatrix};
use rfwpt::power::hpa_power;
use rfwpt::rectenna::{dc_output_voltage, harvest, solve_implicit_oracle, RectennaParams};
use rfwpt::signal::{
    hpa_rapp, lowpass_filter, synthesize_multitone, upconvert, PhaseWord, Quantizer, RappHpa,
    SampledSignal, ToneSet,
};
use rfwpt::system::{Profile, SystemConfig, SystemModel};
use rfwpt::{Complex, PowerParams64};

fn rectenna() -> RectennaParams<f64> {
    RectennaParams {
        source_resistance: 50.0,
        load_resistance: 1600.0,
        saturation_current: 5e-6,
        thermal_voltage: 25.86e-3,
        ideality: 1.05,
    }
}

fn tones_strategy(max_k: usize) -> impl Strategy<Value = ToneSet<f64>> {
    (1..=max_k).prop_flat_map(|k| {
        (prop::collection::vec(0.0..2.0f64, k), prop::collection::vec(0.0..TAU, k))
            .prop_map(|(a, p)| ToneSet::new(a, p, 1e6).unwrap())
    })
}

fn direct_sum(t: &ToneSet<f64>, n: usize, rate: f64) -> Complex<f64> {
    let k = t.len() as f64;
    t.amplitudes()
        .iter()
        .zip(t.phases())
        .enumerate()
        .map(|(i, (&a, &p))| Complex::from_polar(a, TAU * i as f64 * 1e6 * n as f64 / rate + p))
        .sum::<Complex<f64>>()
        / k
}

fn baseband(v: Vec<(f64, f64)>) -> SampledSignal<f64> {
    let n = v.len() as f64;
    SampledSignal::baseband(v.into_iter().map(|(a, b)| Complex::new(a, b)).collect(), n, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantizer_error_and_image(bits in 1u32..=10, range in prop::sample::select(vec![0.5, 1.0, 2.0]), v in -3.0..3.0f64) {
        let q = Quantizer::new(bits, range);
        let out = q.quantize(v);
        let step = 2.0 * range / f64::from(1u32 << bits);
        let clamped = v.clamp(-range, range);
        prop_assert!((out - clamped).abs() <= step / 2.0 + 1e-15);
        prop_assert!(out.abs() <= range);
        let m = out / step;
        prop_assert!((m - m.round()).abs() < 1e-9);
    }

    #[test]
    fn lowpass_is_idempotent_and_linear(
        a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 32),
        b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 32),
        alpha in -3.0..3.0f64,
        cutoff in 1.0..15.0f64,
    ) {
        let x = baseband(a);
        let y = baseband(b);
        let once = lowpass_filter(&x, cutoff);
        let twice = lowpass_filter(&once, cutoff);
        for (p, q) in once.samples().iter().zip(twice.samples()) {
            prop_assert!((p - q).norm() < 1e-12);
        }
        let mix: Vec<_> = x.samples().iter().zip(y.samples()).map(|(p, q)| p * alpha + q).collect();
        let mixed = lowpass_filter(&SampledSignal::baseband(mix, 32.0, 1.0).unwrap(), cutoff);
        let fy = lowpass_filter(&y, cutoff);
        for ((m, p), q) in mixed.samples().iter().zip(once.samples()).zip(fy.samples()) {
            let expect = p * alpha + q;
            prop_assert!((m - expect).norm() <= 1e-12 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn rapp_is_odd_bounded_and_monotone(x in 0.0..1e3f64, dx in 1e-9..1.0f64) {
        let h = RappHpa::new(10.0, 10.0, 4.0).unwrap();
        prop_assert_eq!(h.apply(-x), -h.apply(x));
        prop_assert!(h.apply(x).abs() < 10.0);
        prop_assert!(h.apply(x + dx) >= h.apply(x));
    }

    #[test]
    fn synthesis_matches_direct_summation(tones in tones_strategy(16)) {
        let rate = 40e6;
        let x = synthesize_multitone(&tones, rate).unwrap();
        prop_assert_eq!(x.len(), 40);
        let scale = tones.amplitudes().iter().sum::<f64>().max(1e-300);
        for (n, s) in x.samples().iter().enumerate() {
            prop_assert!((s - direct_sum(&tones, n, rate)).norm() <= 1e-10 * scale);
        }
        // The period closes: the sample one period on equals the first.
        prop_assert!((direct_sum(&tones, x.len(), rate) - x.samples()[0]).norm() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn closed_form_matches_implicit_equation(y in 0.0..1e3f64) {
        let p = rectenna();
        let a = dc_output_voltage(y, &p).unwrap();
        let b = solve_implicit_oracle(y, &p).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn harvest_grows_with_scale(amp in 1e-3..0.2f64, alpha in 1.0..4.0f64, phase in 0.0..TAU) {
        let p = rectenna();
        let sig = |a: f64| {
            let s: Vec<f64> = (0..64).map(|n| a * (TAU * 7.0 * n as f64 / 64.0 + phase).cos()).collect();
            SampledSignal::passband(s, 64.0, 1.0).unwrap()
        };
        let lo = harvest(&sig(amp), &p).unwrap();
        let hi = harvest(&sig(alpha * amp), &p).unwrap();
        prop_assert!(lo.v_out_dc >= 0.0);
        prop_assert!(hi.v_out_dc >= lo.v_out_dc);
    }

    #[test]
    fn received_signal_is_linear(
        a in prop::collection::vec(-1.0..1.0f64, 2 * 32),
        b in prop::collection::vec(-1.0..1.0f64, 2 * 32),
        h in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * 7),
        alpha in -2.0..2.0f64,
    ) {
        let coeffs: Vec<Vec<Complex<f64>>> = h.chunks(7).map(|c| c.iter().map(|&(r, i)| Complex::new(r, i)).collect()).collect();
        let ch = ChannelMatrix::from_coefficients(10, 3, coeffs).unwrap();
        let split = |v: &[f64]| -> Vec<SampledSignal<f64>> {
            v.chunks(32).map(|c| SampledSignal::passband(c.to_vec(), 32.0, 1.0).unwrap()).collect()
        };
        let (xa, xb) = (split(&a), split(&b));
        let mix: Vec<f64> = a.iter().zip(&b).map(|(p, q)| alpha * p + q).collect();
        let ra = received_signal(&xa, &ch).unwrap();
        let rb = received_signal(&xb, &ch).unwrap();
        let rm = received_signal(&split(&mix), &ch).unwrap();
        for ((m, p), q) in rm.samples().iter().zip(ra.samples()).zip(rb.samples()) {
            prop_assert!((m.re - (alpha * p.re + q.re)).abs() < 1e-10);
        }
    }

    #[test]
    fn hpa_power_is_non_negative_for_unit_resistances(v in prop::collection::vec(-2.0..2.0f64, 64)) {
        let x = SampledSignal::passband(v, 64.0, 1.0).unwrap();
        let params = SystemConfig::<f64>::reference(8, Profile::Desk);
        let y = hpa_rapp(&x, &params.chain.hpa);
        let power: PowerParams64 = params.power;
        prop_assert!(hpa_power(&x, &y, &power).unwrap() >= 0.0);
    }
}

#[test]
fn upconversion_halves_power() {
    let tones = ToneSet::new(vec![0.4, 0.8, 0.3, 0.5], vec![0.1, 2.0, 4.0, 5.5], 1.25e6).unwrap();
    let x = synthesize_multitone(&tones, 20e6).unwrap();
    let bw = 5e6;
    let lp = lowpass_filter(&x, bw);
    let up = upconvert(&lp, bw, 80e6, 250e6).unwrap();
    let ratio: f64 = up.mean_power() / lp.mean_power();
    assert!((ratio - 0.5).abs() < 1e-6 * 0.5);
}

#[test]
fn every_stage_is_one_period_long() {
    let model = SystemModel::new(SystemConfig::reference(8, Profile::Desk)).unwrap();
    let tones = ToneSet::uniform(8, 0.4, model.tone_spacing()).unwrap();
    let r = model.simulate(&tones, &PhaseWord::zeros(25, 3).unwrap()).unwrap();
    for s in [&r.digital, &r.dac, &r.lowpass, &r.mixer, &r.hpa, &r.receiver] {
        let period = s.len() as f64 / s.sample_rate();
        assert!((period * model.tone_spacing() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn received_power_stays_below_radiated_power() {
    let model = SystemModel::new(SystemConfig::reference(8, Profile::Desk)).unwrap();
    let tones = ToneSet::uniform(8, 0.6, model.tone_spacing()).unwrap();
    let r = model.simulate(&tones, &PhaseWord::zeros(25, 3).unwrap()).unwrap();
    // Every element radiates the shifted HPA output; the sum of their powers
    // bounds what the receiver can collect.
    let radiated = r.hpa.mean_power() / 10f64.powf(0.05);
    let received = r.receiver.mean_power();
    assert!(received > 0.0);
    assert!(received < 1e-2 * radiated, "{received} vs {radiated}");
}

#[test]
fn single_precision_model_tracks_double() {
    let m64 = SystemModel::new(SystemConfig::<f64>::reference(8, Profile::Desk)).unwrap();
    let m32 = SystemModel::new(SystemConfig::<f32>::reference(8, Profile::Desk)).unwrap();
    let amps = [0.3, 0.1, 0.25, 0.4, 0.05, 0.2, 0.33, 0.15];
    let t64 = ToneSet::new(amps.to_vec(), vec![0.0; 8], m64.tone_spacing()).unwrap();
    let t32 = ToneSet::new(amps.iter().map(|&a| a as f32).collect(), vec![0.0; 8], m32.tone_spacing()).unwrap();
    let w = PhaseWord::zeros(25, 3).unwrap();
    let e64 = m64.evaluate(&t64, &w).unwrap();
    let e32 = m32.evaluate(&t32, &w).unwrap();
    let rel = (f64::from(e32.breakdown.total) - e64.breakdown.total).abs() / e64.breakdown.total;
    assert!(rel < 1e-4, "{rel}");
    let rel = (f64::from(e32.harvest.p_out_dc) - e64.harvest.p_out_dc).abs() / e64.harvest.p_out_dc;
    assert!(rel < 1e-2, "{rel}");
}
