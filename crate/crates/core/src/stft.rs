//! Short-time Fourier transform and per-harmonic amplitude tracks.
//!
//! Frame `k` covers samples `[k * hop, k * hop + length)`, is multiplied by
//! the analysis window and zero-padded to `dft_size`. Coefficients are
//! stored divided by the window's coherent sum, so a unit-amplitude tone
//! sitting on a bin has two-sided magnitude 0.5 and single-sided amplitude 1.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowShape {
    Hann,
    Rectangular,
}

/// Analysis window and framing.
///
/// The default is a rectangular 500-sample window (three 60 Hz periods at
/// 10 kHz), hop 10, padded to 2000 points: every harmonic of 60 Hz then
/// falls exactly on a DFT bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowSpec {
    pub shape: WindowShape,
    pub length: usize,
    pub hop: usize,
    pub dft_size: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            shape: WindowShape::Rectangular,
            length: 500,
            hop: 10,
            dft_size: 2000,
        }
    }
}

impl WindowSpec {
    pub fn hann(length: usize, hop: usize, dft_size: usize) -> Self {
        WindowSpec {
            shape: WindowShape::Hann,
            length,
            hop,
            dft_size,
        }
    }

    pub fn rectangular(length: usize, hop: usize, dft_size: usize) -> Self {
        WindowSpec {
            shape: WindowShape::Rectangular,
            length,
            hop,
            dft_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.hop && self.hop <= self.length && self.length <= self.dft_size) {
            return Err(Error::Config(format!(
                "window requires 1 <= hop ({}) <= length ({}) <= dft_size ({})",
                self.hop, self.length, self.dft_size
            )));
        }
        if self.coefficients().iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config(
                "window coherent gain must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Periodic window coefficients of length `self.length`.
    pub fn coefficients(&self) -> Vec<f64> {
        let n = self.length;
        match self.shape {
            WindowShape::Rectangular => vec![1.0; n],
            WindowShape::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }

    /// Mean of the window coefficients.
    pub fn coherent_gain(&self) -> f64 {
        self.coefficients().iter().sum::<f64>() / self.length as f64
    }

    /// Number of full frames a signal of `len` samples yields.
    pub fn num_frames(&self, len: usize) -> usize {
        if len < self.length {
            0
        } else {
            (len - self.length) / self.hop + 1
        }
    }

    /// Time of frame `k`: the centre of its slice.
    pub fn frame_time(&self, k: usize, sample_rate: f64) -> f64 {
        (k * self.hop) as f64 / sample_rate + self.length as f64 / 2.0 / sample_rate
    }

    pub fn span_seconds(&self, sample_rate: f64) -> f64 {
        self.length as f64 / sample_rate
    }

    pub fn hop_seconds(&self, sample_rate: f64) -> f64 {
        self.hop as f64 / sample_rate
    }
}

/// Complex STFT coefficients, one row per frame, bins `0..=dft_size/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyMap {
    frames: Vec<Vec<Complex64>>,
    frame_times: Vec<f64>,
    bin_spacing: f64,
    sample_rate: f64,
    window: WindowSpec,
    /// (sum w)^2 / (N * sum w^2), converts calibrated |c|^2 sums into power.
    power_factor: f64,
}

impl TimeFrequencyMap {
    pub fn frames(&self) -> &[Vec<Complex64>] {
        &self.frames
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_bins(&self) -> usize {
        self.window.dft_size / 2 + 1
    }

    pub fn frame_times(&self) -> &[f64] {
        &self.frame_times
    }

    pub fn bin_spacing(&self) -> f64 {
        self.bin_spacing
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn window(&self) -> &WindowSpec {
        &self.window
    }

    pub fn bin_frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_spacing
    }

    fn is_unpaired(&self, bin: usize) -> bool {
        bin == 0 || (self.window.dft_size.is_multiple_of(2) && bin == self.window.dft_size / 2)
    }

    /// Single-sided amplitude (peak) at `bin` of frame `frame`.
    pub fn amplitude(&self, frame: usize, bin: usize) -> f64 {
        let m = self.frames[frame][bin].norm();
        if self.is_unpaired(bin) {
            m
        } else {
            2.0 * m
        }
    }

    /// Single-sided RMS at `bin` (DC is its own RMS).
    pub fn rms(&self, frame: usize, bin: usize) -> f64 {
        if self.is_unpaired(bin) {
            self.amplitude(frame, bin)
        } else {
            self.amplitude(frame, bin) / SQRT_2
        }
    }

    /// Magnitude matrix of single-sided amplitudes.
    pub fn amplitudes(&self) -> Vec<Vec<f64>> {
        (0..self.num_frames())
            .map(|k| (0..self.num_bins()).map(|b| self.amplitude(k, b)).collect())
            .collect()
    }
}

struct Transformer {
    fft: Arc<dyn Fft<f64>>,
    coeffs: Vec<f64>,
    norm: f64,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Transformer {
    fn new(window: &WindowSpec) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(window.dft_size);
        let coeffs = window.coefficients();
        let norm = coeffs.iter().sum::<f64>();
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        Transformer {
            buf: vec![Complex64::default(); window.dft_size],
            fft,
            coeffs,
            norm,
            scratch,
        }
    }

    fn frame(&mut self, slice: &[f64], bins: usize) -> Vec<Complex64> {
        self.buf.fill(Complex64::default());
        for ((b, &x), &w) in self.buf.iter_mut().zip(slice).zip(&self.coeffs) {
            *b = Complex64::new(x * w, 0.0);
        }
        self.fft
            .process_with_scratch(&mut self.buf, &mut self.scratch);
        self.buf[..bins].iter().map(|c| c / self.norm).collect()
    }
}

/// Windowed, zero-padded STFT of a real signal.
pub fn stft(signal: &[f64], sample_rate: f64, window: &WindowSpec) -> Result<TimeFrequencyMap> {
    window.validate()?;
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::Config(format!(
            "sample_rate must be positive, got {sample_rate}"
        )));
    }
    if signal.len() < window.length {
        return Err(Error::Size {
            len: signal.len(),
            needed: window.length,
        });
    }
    if let Some((index, &value)) = signal.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Data { index, value });
    }
    let bins = window.dft_size / 2 + 1;
    let num_frames = window.num_frames(signal.len());
    let mut tr = Transformer::new(window);
    let frames = (0..num_frames)
        .map(|k| {
            let s = k * window.hop;
            tr.frame(&signal[s..s + window.length], bins)
        })
        .collect();
    let frame_times = (0..num_frames)
        .map(|k| window.frame_time(k, sample_rate))
        .collect();
    let sum_w: f64 = tr.coeffs.iter().sum();
    let sum_w2: f64 = tr.coeffs.iter().map(|w| w * w).sum();
    Ok(TimeFrequencyMap {
        frames,
        frame_times,
        bin_spacing: sample_rate / window.dft_size as f64,
        sample_rate,
        window: *window,
        power_factor: sum_w * sum_w / (window.dft_size as f64 * sum_w2),
    })
}

fn check_harmonic(tfr: &TimeFrequencyMap, f0: f64, h: u32) -> Result<f64> {
    if h == 0 || f0.is_nan() || f0 <= 0.0 {
        return Err(Error::Range(format!(
            "harmonic {h} of {f0} Hz is not a positive frequency"
        )));
    }
    let f = f0 * h as f64;
    if f >= tfr.sample_rate / 2.0 {
        return Err(Error::Range(format!(
            "harmonic {h} at {f} Hz is not below Nyquist ({} Hz)",
            tfr.sample_rate / 2.0
        )));
    }
    Ok(f)
}

/// Per-frame RMS of harmonic `h`, read from the bin nearest `h * f0`.
pub fn harmonic_track(tfr: &TimeFrequencyMap, f0: f64, h: u32) -> Result<Vec<f64>> {
    harmonic_track_in_band(tfr, f0, h, tfr.bin_spacing / 2.0)
}

/// Per-frame RMS of harmonic `h`: the peak single-sided amplitude over bins
/// within `half_width` Hz of `h * f0`, divided by sqrt(2).
pub fn harmonic_track_in_band(
    tfr: &TimeFrequencyMap,
    f0: f64,
    h: u32,
    half_width: f64,
) -> Result<Vec<f64>> {
    let f = check_harmonic(tfr, f0, h)?;
    let df = tfr.bin_spacing;
    let last = tfr.num_bins() - 1;
    // tiny slack so a band edge landing on a bin keeps that bin
    let slack = 1e-9 * df;
    let lo = ((f - half_width - slack) / df).ceil().max(0.0) as usize;
    let hi = (((f + half_width + slack) / df).floor() as usize).min(last);
    let (lo, hi) = if lo > hi {
        let nearest = ((f / df).round() as usize).min(last);
        (nearest, nearest)
    } else {
        (lo, hi)
    };
    Ok((0..tfr.num_frames())
        .map(|k| (lo..=hi).map(|b| tfr.amplitude(k, b)).fold(0.0, f64::max) / SQRT_2)
        .collect())
}

/// Total power of one frame, A^2.
///
/// For the rectangular window this equals the mean square of the slice.
pub fn band_energy(tfr: &TimeFrequencyMap, frame: usize) -> f64 {
    let row = &tfr.frames[frame];
    let two_sided: f64 = row
        .iter()
        .enumerate()
        .map(|(b, c)| {
            let p = c.norm_sqr();
            if tfr.is_unpaired(b) {
                p
            } else {
                2.0 * p
            }
        })
        .sum();
    two_sided * tfr.power_factor
}
