//! Pipeline values checked against independent computations: direct DFT
//! sums, closed-form Fourier series and brute-force sample summation.

use std::f64::consts::{PI, SQRT_2};

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vsi_fault::features::{inst_distortions, DEFAULT_H_MAX};
use vsi_fault::*;

const FS: f64 = 10_000.0;
const F0: f64 = 60.0;

fn tone(amp: f64, f: f64, n: usize, phase: f64) -> Vec<f64> {
    (0..n)
        .map(|i| amp * (2.0 * PI * f * i as f64 / FS + phase).sin())
        .collect()
}

/// sum_n w[n] x[n] exp(-j 2 pi k n / N) / sum w, evaluated literally.
fn direct_dft(slice: &[f64], w: &[f64], n_fft: usize, k: usize) -> (f64, f64) {
    let norm: f64 = w.iter().sum();
    let (mut re, mut im) = (0.0, 0.0);
    for (n, (&x, &wn)) in slice.iter().zip(w).enumerate() {
        let arg = -2.0 * PI * (k * n % n_fft) as f64 / n_fft as f64;
        re += wn * x * arg.cos();
        im += wn * x * arg.sin();
    }
    (re / norm, im / norm)
}

#[test]
fn stft_matches_direct_dft() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..900).map(|_| rng.random_range(-1.0..1.0)).collect();
    for window in [
        WindowSpec::hann(256, 64, 512),
        WindowSpec::rectangular(300, 100, 300),
    ] {
        let tfr = stft(&x, FS, &window).unwrap();
        let w = window.coefficients();
        for frame in [0, tfr.num_frames() / 2, tfr.num_frames() - 1] {
            let s = &x[frame * window.hop..frame * window.hop + window.length];
            for bin in [0, 1, 7, 50, tfr.num_bins() - 1] {
                let (re, im) = direct_dft(s, &w, window.dft_size, bin);
                let c = tfr.frames()[frame][bin];
                assert!((c.re - re).abs() < 1e-12 && (c.im - im).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn hann_coefficients_are_periodic() {
    let w = WindowSpec::hann(8, 1, 8).coefficients();
    for (n, v) in w.iter().enumerate() {
        let expect = 0.5 - 0.5 * (2.0 * PI * n as f64 / 8.0).cos();
        assert!((v - expect).abs() < 1e-15);
    }
}

#[test]
fn band_energy_includes_dc() {
    // 0.3 A DC plus a 60 Hz tone of 1 A peak: power 0.09 + 0.5
    let x: Vec<f64> = tone(1.0, F0, 1500, 0.4).iter().map(|v| v + 0.3).collect();
    let tfr = stft(&x, FS, &WindowSpec::default()).unwrap();
    for k in 0..tfr.num_frames() {
        assert_relative_eq!(band_energy(&tfr, k), 0.59, max_relative = 1e-9);
    }
}

#[test]
fn two_tone_thd_matches_closed_form() {
    // fundamental plus 10 % third harmonic: THD = 0.10, TnHD = 0
    let f = tone(1.65, F0, 4000, 0.0);
    let h3 = tone(0.165, 3.0 * F0, 4000, 1.0);
    let x: Vec<f64> = f.iter().zip(&h3).map(|(a, b)| a + b).collect();
    let w = WindowSpec::default();
    let tfr = stft(&x, FS, &w).unwrap();
    let d = inst_distortions(&tfr, &x, F0, DEFAULT_H_MAX).unwrap();
    for k in 0..tfr.num_frames() {
        assert!((d.thd[k] - 0.10).abs() < 1e-9, "{}", d.thd[k]);
        assert!(d.tnhd[k] < 1e-5);
    }
}

/// Half-wave-suppressed sine: the positive half of the upper switch's leg
/// current is removed for the whole record, nothing else changes.
fn half_wave_record() -> ThreePhaseRecord {
    let cfg = SignalConfig {
        baseline_distortion: 0.0,
        ..SignalConfig::default()
    };
    let fault = FaultSpec {
        open_residual: 0.0,
        open_compensation: 1.0,
        ..FaultSpec::open(SwitchId::S1)
    }
    .with_window(0.0, cfg.duration);
    inject_fault(&synth_healthy(&cfg).unwrap(), &fault).unwrap()
}

/// Brute-force sliding statistics at a 1-sample hop over `len` samples.
fn sliding(x: &[f64], len: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rms = Vec::new();
    let mut mean = Vec::new();
    let mut fund = Vec::new();
    for s in 0..=x.len() - len {
        let w = &x[s..s + len];
        mean.push(w.iter().sum::<f64>() / len as f64);
        rms.push((w.iter().map(|v| v * v).sum::<f64>() / len as f64).sqrt());
        let (mut re, mut im) = (0.0, 0.0);
        for (n, v) in w.iter().enumerate() {
            let arg = 2.0 * PI * F0 * n as f64 / FS;
            re += v * arg.cos();
            im += v * arg.sin();
        }
        fund.push(2.0 * (re * re + im * im).sqrt() / len as f64 / SQRT_2);
    }
    (rms, mean, fund)
}

fn avg(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[test]
fn half_wave_sine_matches_fourier_series() {
    let rec = half_wave_record();
    let a = rec.config.fundamental_peak;
    let x = rec.phase(Phase::A);
    let tracks = extract(&rec, &WindowSpec::default()).unwrap();
    let t = tracks.phase(Phase::A);

    let (rms_bf, mean_bf, fund_bf) = sliding(x, 500);
    let (rms_ref, mean_ref, fund_ref) = (a / 2.0, -a / PI, a / 2.0 / SQRT_2);
    for (got, bf, exact) in [
        (avg(&t.i_rms), avg(&rms_bf), rms_ref),
        (avg(&t.i_ave), avg(&mean_bf), mean_ref),
        (avg(&t.i_fund), avg(&fund_bf), fund_ref),
    ] {
        assert!(((got - exact) / exact).abs() < 0.03, "{got} vs {exact}");
        assert!(((bf - exact) / exact).abs() < 0.03, "{bf} vs {exact}");
        assert!(((got - bf) / bf).abs() < 1e-6, "{got} vs {bf}");
    }
    // each frame agrees with the brute-force value at the same offset
    for k in 0..t.len() {
        let s = k * 10;
        assert!((t.i_rms[k] - rms_bf[s]).abs() < 1e-9);
        assert!((t.i_ave[k] - mean_bf[s]).abs() < 1e-9);
        assert!((t.i_fund[k] - fund_bf[s]).abs() < 1e-9);
    }
    // whole-period windows of a half-wave sine: exact closed form
    assert!((t.i_rms[0] - rms_ref).abs() < 1e-9);
    assert!((t.i_fund[0] - fund_ref).abs() < 1e-9);
}

#[test]
fn fault_duration_matches_brute_force_crossings() {
    // TWD at 1-sample hop; the hop-10 estimator counts every tenth of them
    let rec = inject_fault(
        &synth_healthy(&SignalConfig::default()).unwrap(),
        &FaultSpec::open(SwitchId::S5),
    )
    .unwrap();
    let x = rec.phase(Phase::C);
    let (rms, _, fund) = sliding(x, 500);
    let twd: Vec<f64> = rms
        .iter()
        .zip(&fund)
        .map(|(r, f)| (r * r - f * f).max(0.0).sqrt() / f)
        .collect();
    let above: Vec<usize> = (0..twd.len()).filter(|&i| twd[i] >= 0.05).collect();
    let bf_td = above.len() as f64 / FS;
    let sampled = above.iter().filter(|&&i| i % 10 == 0).count() as f64 * 10.0 / FS;

    let summary = summarize(&extract(&rec, &WindowSpec::default()).unwrap(), 0.05).unwrap();
    let td = summary.c.td_fault;
    assert!((td - sampled).abs() < 1e-12, "{td} vs {sampled}");
    assert!((td - bf_td).abs() <= 10.0 / FS, "{td} vs {bf_td}");
    assert!((0.060..=0.110).contains(&td));
}
