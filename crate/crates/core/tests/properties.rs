use std::f64::consts::PI;

use proptest::prelude::*;
use vsi_fault::features::{inst_distortions, inst_rms, DEFAULT_H_MAX};
use vsi_fault::*;

const FS: f64 = 10_000.0;

fn signal(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

fn switch() -> impl Strategy<Value = SwitchId> {
    (0usize..6).prop_map(|i| SwitchId::ALL[i])
}

fn fault() -> impl Strategy<Value = FaultSpec> {
    (
        switch(),
        any::<bool>(),
        0.12f64..0.25,
        prop::sample::select(vec![0.06, 0.08, 0.10]),
    )
        .prop_map(|(sw, open, start, dur)| {
            let f = if open {
                FaultSpec::open(sw)
            } else {
                FaultSpec::short(sw)
            };
            f.with_window(start, dur)
        })
}

fn faulty_record(f: &FaultSpec, snr: Option<f64>, seed: u64) -> ThreePhaseRecord {
    let rec = inject_fault(&synth_healthy(&SignalConfig::default()).unwrap(), f).unwrap();
    match snr {
        Some(s) => add_noise(&rec, s, seed).unwrap(),
        None => rec,
    }
}

fn window() -> impl Strategy<Value = WindowSpec> {
    (64usize..400, 1usize..80, 0usize..300, any::<bool>()).prop_map(|(len, hop, pad, hann)| {
        if hann {
            WindowSpec::hann(len, hop.min(len), len + pad)
        } else {
            WindowSpec::rectangular(len, hop.min(len), len + pad)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stft_is_linear(x in signal(700), y in signal(700), a in -2.0f64..2.0, b in -2.0f64..2.0, w in window()) {
        let z: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let (tx, ty, tz) = (stft(&x, FS, &w).unwrap(), stft(&y, FS, &w).unwrap(), stft(&z, FS, &w).unwrap());
        for k in 0..tz.num_frames() {
            for bin in 0..tz.num_bins() {
                let expect = tx.frames()[k][bin] * a + ty.frames()[k][bin] * b;
                prop_assert!((tz.frames()[k][bin] - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn shifting_by_one_hop_shifts_frames(x in signal(900), w in window()) {
        let t0 = stft(&x, FS, &w).unwrap();
        let t1 = stft(&x[w.hop..], FS, &w).unwrap();
        prop_assert_eq!(t1.num_frames() + 1, t0.num_frames());
        for k in 0..t1.num_frames() {
            for bin in 0..t1.num_bins() {
                prop_assert!((t1.frames()[k][bin] - t0.frames()[k + 1][bin]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rectangular_parseval(x in signal(800), len in 16usize..500, hop in 1usize..100, pad in 0usize..200) {
        let w = WindowSpec::rectangular(len, 1 + hop % len, len + pad);
        let tfr = stft(&x, FS, &w).unwrap();
        let rms = inst_rms(&x, &w);
        for (k, r) in rms.iter().enumerate() {
            let ms = r * r;
            prop_assert!((band_energy(&tfr, k) - ms).abs() <= 1e-6 * ms.max(1e-300));
        }
    }

    #[test]
    fn amplitude_scales_linearly(x in signal(700), k in 0.01f64..50.0, w in window()) {
        let y: Vec<f64> = x.iter().map(|v| v * k).collect();
        let (tx, ty) = (stft(&x, FS, &w).unwrap(), stft(&y, FS, &w).unwrap());
        for f in 0..tx.num_frames() {
            for b in 0..tx.num_bins() {
                let a = tx.amplitude(f, b);
                prop_assert!((ty.amplitude(f, b) - k * a).abs() <= 1e-9 * (1.0 + k * a));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distortion_identity(f in fault(), snr in prop::option::of(20.0f64..60.0), seed in any::<u64>()) {
        let rec = faulty_record(&f, snr, seed);
        let tracks = extract(&rec, &WindowSpec::default()).unwrap();
        for p in Phase::ALL {
            let t = tracks.phase(p);
            for k in 0..t.len() {
                let (twd, thd, tnhd) = (t.twd[k], t.thd[k], t.tnhd[k]);
                prop_assert!(twd >= 0.0 && thd >= 0.0 && tnhd >= 0.0);
                prop_assert!((twd * twd - thd * thd - tnhd * tnhd).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn distortions_are_scale_invariant(f in fault(), k in 0.1f64..10.0) {
        let rec = faulty_record(&f, None, 0);
        let w = WindowSpec::default();
        let (t0, t1) = (extract(&rec, &w).unwrap(), extract(&rec.scaled(k), &w).unwrap());
        for p in Phase::ALL {
            let (a, b) = (t0.phase(p), t1.phase(p));
            for i in 0..a.len() {
                prop_assert!((a.twd[i] - b.twd[i]).abs() < 1e-9 * (1.0 + a.twd[i]));
                prop_assert!((a.thd[i] - b.thd[i]).abs() < 1e-9 * (1.0 + a.thd[i]));
                prop_assert!((b.i_rms[i] - k * a.i_rms[i]).abs() < 1e-9 * k);
                prop_assert!((b.i_fund[i] - k * a.i_fund[i]).abs() < 1e-9 * k);
                prop_assert!((b.i_ave[i] - k * a.i_ave[i]).abs() < 1e-9 * k);
            }
        }
    }

    #[test]
    fn td_fault_is_monotone_in_threshold(f in fault(), snr in 25.0f64..45.0, seed in any::<u64>(), lo in 0.01f64..0.3, d in 0.0f64..0.5) {
        let tracks = extract(&faulty_record(&f, Some(snr), seed), &WindowSpec::default()).unwrap();
        let (s0, s1) = (summarize(&tracks, lo).unwrap(), summarize(&tracks, lo + d).unwrap());
        for p in Phase::ALL {
            prop_assert!(s1.phase(p).td_fault <= s0.phase(p).td_fault);
        }
    }

    #[test]
    fn diagnosis_is_rotation_equivariant(f in fault(), snr in prop::option::of(30.0f64..45.0), seed in any::<u64>()) {
        let rec = faulty_record(&f, snr, seed);
        let (w, thr) = (WindowSpec::default(), Thresholds::default());
        let d0 = diagnose(&rec, &w, &thr).unwrap();
        let d1 = diagnose(&rec.rotate_phases(), &w, &thr).unwrap();
        prop_assert_eq!(d1.label, d0.label.rotate());
        prop_assert_eq!(d1.td_fault, d0.td_fault);
    }

    #[test]
    fn common_scale_keeps_presence_signature_and_phase(f in fault(), k in 0.5f64..2.0) {
        let rec = faulty_record(&f, None, 0);
        let (w, thr) = (WindowSpec::default(), Thresholds::default());
        let c0 = diagnose(&rec, &w, &thr).unwrap().code;
        let c1 = diagnose(&rec.scaled(k), &w, &thr).unwrap().code;
        prop_assert_eq!(c0.fault_present, c1.fault_present);
        prop_assert_eq!(c0.harmonic_signature, c1.harmonic_signature);
        prop_assert_eq!(c0.phase, c1.phase);
    }

    #[test]
    fn negating_currents_swaps_upper_and_lower(f in fault()) {
        let rec = faulty_record(&f, None, 0);
        let (w, thr) = (WindowSpec::default(), Thresholds::default());
        let d0 = diagnose(&rec, &w, &thr).unwrap();
        let d1 = diagnose(&rec.scaled(-1.0), &w, &thr).unwrap();
        let mirror = |l: Label| match l {
            Label::Open(s) => Label::Open(SwitchId::new(s.leg(), !s.is_upper())),
            Label::Short(s) => Label::Short(SwitchId::new(s.leg(), !s.is_upper())),
            other => other,
        };
        prop_assert_eq!(d1.label, mirror(d0.label));
    }

    #[test]
    fn raising_td_min_only_clears_fault_bit(f in fault(), snr in 25.0f64..45.0, seed in any::<u64>(), td_min in 1e-3f64..0.2) {
        let rec = faulty_record(&f, Some(snr), seed);
        let w = WindowSpec::default();
        let lo = Thresholds { td_min: 1e-3, ..Thresholds::default() };
        let hi = Thresholds { td_min, ..Thresholds::default() };
        let (a, b) = (diagnose(&rec, &w, &lo).unwrap(), diagnose(&rec, &w, &hi).unwrap());
        prop_assert!(b.code.fault_present <= a.code.fault_present);
        if b.code.fault_present {
            prop_assert_eq!(a.code, b.code);
        }
    }
}

proptest! {
    #[test]
    fn rule_code_round_trips(bits in prop::array::uniform6(0u8..2)) {
        match RuleCode::from_bits(bits) {
            Ok(code) => {
                prop_assert_eq!(code.bits(), bits);
                prop_assert_eq!(code.to_string().parse::<RuleCode>().unwrap(), code);
                prop_assert!(RuleCode::all_valid().contains(&code));
            }
            Err(_) => prop_assert!((bits[4], bits[5]) == (1, 1) || (bits[0] == 0 && bits.contains(&1))),
        }
    }

    #[test]
    fn label_round_trips(i in 0usize..14) {
        let l = Label::all()[i];
        prop_assert_eq!(l.to_string().parse::<Label>().unwrap(), l);
        prop_assert_eq!(l.rotate().rotate().rotate(), l);
    }

    #[test]
    fn pure_tone_fundamental(amp in 0.1f64..20.0, phase in 0.0f64..(2.0 * PI)) {
        let x: Vec<f64> = (0..2000).map(|n| amp * (2.0 * PI * 60.0 * n as f64 / FS + phase).sin()).collect();
        let tfr = stft(&x, FS, &WindowSpec::default()).unwrap();
        let d = inst_distortions(&tfr, &x, 60.0, DEFAULT_H_MAX).unwrap();
        for v in harmonic_track(&tfr, 60.0, 1).unwrap() {
            prop_assert!((v - amp / 2f64.sqrt()).abs() < 1e-9 * amp);
        }
        prop_assert!(d.twd.iter().all(|&t| t < 1e-6));
    }
}
