//! Reported fault signature levels reproduced by the behavioral model and
//! the default analysis chain.

use vsi_fault::*;

fn defaults() -> (WindowSpec, Thresholds) {
    (WindowSpec::default(), Thresholds::default())
}

fn healthy() -> ThreePhaseRecord {
    synth_healthy(&SignalConfig::default()).unwrap()
}

fn analysis(fault: FaultSpec) -> Analysis {
    let (w, thr) = defaults();
    analyze(&inject_fault(&healthy(), &fault).unwrap(), &w, &thr).unwrap()
}

#[test]
fn healthy_levels() {
    let (w, thr) = defaults();
    let rec = healthy();
    let tracks = extract(&rec, &w).unwrap();
    for p in Phase::ALL {
        let t = tracks.phase(p);
        assert!(t.i_rms.iter().all(|v| (v - 1.17).abs() < 0.01));
        assert!(t.i_fund.iter().all(|v| (v - 1.167).abs() / 1.167 < 0.01));
        assert!(t.twd.iter().all(|v| (v - 0.02).abs() < 1e-3));
        assert!(t.i_ave.iter().all(|v| v.abs() < 1e-3));
    }
    let s = summarize(&tracks, thr.twd_fault).unwrap();
    for p in Phase::ALL {
        assert_eq!(s.phase(p).td_fault, 0.0);
        assert!((s.phase(p).twd_mean - 0.02).abs() < 1e-3);
        assert!(s.phase(p).i_ave_mean.abs() < 1e-3);
    }
    let d = diagnose(&rec, &w, &thr).unwrap();
    assert_eq!(d.label, Label::Healthy);
    assert_eq!(d.code, RuleCode::HEALTHY);
}

#[test]
fn open_upper_phase_c_suppresses_positive_half_cycles() {
    let rec = inject_fault(&healthy(), &FaultSpec::open(SwitchId::S5)).unwrap();
    let c = rec.phase(Phase::C);
    let before = c[..1950].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let during_pos = c[1950..2550].iter().fold(f64::MIN, |m, &v| m.max(v));
    assert!(before > 1.6);
    assert!(during_pos <= 0.05);
    assert_eq!(&c[2550..], &healthy().phase(Phase::C)[2550..]);
}

#[test]
fn open_fault_levels_and_code() {
    let a = analysis(FaultSpec::open(SwitchId::S5));
    let s = a.summary.c;
    assert!((0.75..=1.05).contains(&s.i_rms_mean), "{}", s.i_rms_mean);
    assert!((-0.90..=-0.40).contains(&s.i_ave_mean), "{}", s.i_ave_mean);
    assert!(s.thd_mean >= 0.15 && s.tnhd_mean >= 0.25);
    // non-harmonic content dominates harmonic content for opens
    assert!(s.tnhd_mean > s.thd_mean);
    assert_eq!(a.diagnosis.code.to_string(), "101110");
    assert_eq!(a.diagnosis.label, Label::Open(SwitchId::S5));
    assert_eq!(a.diagnosis.faulty_phase, Some(Phase::C));
}

#[test]
fn short_fault_levels_and_code() {
    let a = analysis(FaultSpec::short(SwitchId::S2));
    let s = a.summary.a;
    assert!((1.20..=1.50).contains(&s.i_rms_mean), "{}", s.i_rms_mean);
    assert!((s.i_rms_mean - (1.1f64.powi(2) + (0.64 * 1.167f64).powi(2)).sqrt()).abs() < 0.01);
    assert!((0.60..=0.90).contains(&s.i_fund_mean), "{}", s.i_fund_mean);
    assert!((-1.30..=-0.90).contains(&s.i_ave_mean), "{}", s.i_ave_mean);
    assert!(s.thd_mean <= 0.10 && s.tnhd_mean >= 0.30);
    assert_eq!(a.diagnosis.code.to_string(), "110100");
    assert_eq!(a.diagnosis.label, Label::Short(SwitchId::S2));
}

#[test]
fn short_fault_under_noise() {
    let (w, thr) = defaults();
    for seed in 0..5 {
        let rec = add_noise(
            &inject_fault(&healthy(), &FaultSpec::short(SwitchId::S2)).unwrap(),
            40.0,
            seed,
        )
        .unwrap();
        assert_eq!(
            diagnose(&rec, &w, &thr).unwrap().label,
            Label::Short(SwitchId::S2)
        );
    }
}

#[test]
fn noise_level_follows_snr() {
    let clean = healthy();
    let noisy = add_noise(&clean, 40.0, 1).unwrap();
    let p = Phase::B;
    let n = clean.len() as f64;
    let rms = (clean
        .phase(p)
        .iter()
        .zip(noisy.phase(p))
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    assert!((rms - 0.01167).abs() / 0.01167 < 0.05, "{rms}");
    assert_eq!(add_noise(&clean, f64::INFINITY, 1).unwrap(), clean);
}

#[test]
fn fault_duration_window_bounds() {
    let (w, thr) = defaults();
    for label in Label::fault_classes() {
        let sw = label.switch().unwrap();
        let f = match label {
            Label::Open(_) => FaultSpec::open(sw),
            _ => FaultSpec::short(sw),
        };
        let d = diagnose(&inject_fault(&healthy(), &f).unwrap(), &w, &thr).unwrap();
        assert!(
            (0.060..=0.110 + 1e-12).contains(&d.td_fault),
            "{label}: {}",
            d.td_fault
        );
    }
    let all = vec![1.0; 20];
    let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.001).collect();
    let fd = fault_duration(&all, &times, 0.001, 0.05).unwrap();
    assert!((fd.td_fault - 0.020).abs() < 1e-12);
}

#[test]
fn decision_table_rows() {
    let code = |s: &str| s.parse::<RuleCode>().unwrap();
    assert_eq!(classify(&code("101110")), Label::Open(SwitchId::S5));
    assert_eq!(classify(&code("110100")), Label::Short(SwitchId::S2));
    for s in ["111000", "111101", "111110", "111010"] {
        assert_eq!(classify(&code(s)), Label::Unknown);
    }
}

#[test]
fn table_lists_open_then_short() {
    let report = evaluate(
        &gen_corpus(&CorpusSpec::default()).unwrap(),
        &WindowSpec::default(),
        &Thresholds::default(),
    )
    .unwrap();
    assert_eq!(report.total, 60);
    let table = report.to_table();
    let rows: Vec<&str> = table
        .lines()
        .filter(|l| l.split_whitespace().any(|w| w.parse::<SwitchId>().is_ok()))
        .collect();
    assert_eq!(rows.len(), 12);
    assert!(rows[0].starts_with("Open-Circuit") && rows[6].starts_with("Short-Circuit"));
    for (i, r) in rows.iter().enumerate() {
        assert!(r.contains(&format!("S{}", i % 6 + 1)));
    }
}
