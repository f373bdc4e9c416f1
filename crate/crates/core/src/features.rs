//! The six per-phase signal parameters and their fault-interval summary.
//!
//! Per frame, with `I1` the fundamental RMS, `Ih` the RMS of harmonic `h`
//! and `Irms` the RMS of the raw slice:
//!
//! ```text
//! THD  = sqrt(sum_{h>=2} Ih^2) / I1
//! TWD  = sqrt(max(Irms^2 - I1^2, 0)) / I1
//! TnHD = sqrt(max(TWD^2 - THD^2, 0))
//! ```
//!
//! so `TWD^2 = THD^2 + TnHD^2` holds exactly. DC is non-harmonic content.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigmodel::{Phase, ThreePhaseRecord};
use crate::stft::{harmonic_track, stft, TimeFrequencyMap, WindowSpec};

/// Highest harmonic order included in THD (further limited by Nyquist).
pub const DEFAULT_H_MAX: u32 = 50;

/// Below this fundamental RMS (A) distortion ratios are not meaningful.
pub const FUNDAMENTAL_FLOOR: f64 = 1e-6;

/// Reported TWD / TnHD for frames with a vanishing fundamental.
pub const SATURATION_CAP: f64 = 10.0;

/// Default TWD detection threshold.
pub const DEFAULT_TWD_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTracks {
    pub i_rms: Vec<f64>,
    pub i_fund: Vec<f64>,
    pub i_ave: Vec<f64>,
    pub thd: Vec<f64>,
    pub tnhd: Vec<f64>,
    pub twd: Vec<f64>,
    /// Frames where `I1` fell below [`FUNDAMENTAL_FLOOR`].
    pub saturated: Vec<bool>,
}

impl PhaseTracks {
    pub fn len(&self) -> usize {
        self.i_rms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_rms.is_empty()
    }
}

/// Feature tracks for all three phases on a shared frame grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTracks {
    pub frame_times: Vec<f64>,
    /// Seconds between frames.
    pub frame_period: f64,
    /// Seconds covered by one analysis window.
    pub window_span: f64,
    pub phases: [PhaseTracks; 3],
}

impl FeatureTracks {
    pub fn phase(&self, p: Phase) -> &PhaseTracks {
        &self.phases[p.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Distortions {
    pub thd: Vec<f64>,
    pub tnhd: Vec<f64>,
    pub twd: Vec<f64>,
    pub saturated: Vec<bool>,
}

fn frame_slices<'a>(
    signal: &'a [f64],
    window: &WindowSpec,
) -> impl Iterator<Item = &'a [f64]> + 'a {
    let (len, hop) = (window.length, window.hop);
    (0..window.num_frames(signal.len())).map(move |k| &signal[k * hop..k * hop + len])
}

/// RMS of each raw slice (uniform weighting regardless of window shape).
pub fn inst_rms(signal: &[f64], window: &WindowSpec) -> Vec<f64> {
    frame_slices(signal, window)
        .map(|s| (s.iter().map(|x| x * x).sum::<f64>() / s.len() as f64).sqrt())
        .collect()
}

/// Arithmetic mean of each raw slice.
pub fn inst_average(signal: &[f64], window: &WindowSpec) -> Vec<f64> {
    frame_slices(signal, window)
        .map(|s| s.iter().sum::<f64>() / s.len() as f64)
        .collect()
}

/// Fundamental RMS per frame.
pub fn inst_fundamental(tfr: &TimeFrequencyMap, f0: f64) -> Result<Vec<f64>> {
    harmonic_track(tfr, f0, 1)
}

/// Largest usable harmonic order: `min(h_max, last order below Nyquist)`.
pub fn effective_h_max(sample_rate: f64, f0: f64, h_max: u32) -> u32 {
    let below_nyquist = ((sample_rate / 2.0) / f0).ceil() as u32 - 1;
    h_max.min(below_nyquist)
}

/// THD, TnHD and TWD per frame.
pub fn inst_distortions(
    tfr: &TimeFrequencyMap,
    signal: &[f64],
    f0: f64,
    h_max: u32,
) -> Result<Distortions> {
    let h_max = effective_h_max(tfr.sample_rate(), f0, h_max);
    let fund = harmonic_track(tfr, f0, 1)?;
    let mut harmonic_power = vec![0.0; fund.len()];
    for h in 2..=h_max {
        for (acc, v) in harmonic_power.iter_mut().zip(harmonic_track(tfr, f0, h)?) {
            *acc += v * v;
        }
    }
    let irms = inst_rms(signal, tfr.window());
    if irms.len() != fund.len() {
        return Err(Error::Input(format!(
            "signal framing ({} frames) does not match the TFR ({} frames)",
            irms.len(),
            fund.len()
        )));
    }

    let n = fund.len();
    let mut out = Distortions {
        thd: Vec::with_capacity(n),
        tnhd: Vec::with_capacity(n),
        twd: Vec::with_capacity(n),
        saturated: Vec::with_capacity(n),
    };
    for ((&i1, &ph), &ir) in fund.iter().zip(&harmonic_power).zip(&irms) {
        if i1 < FUNDAMENTAL_FLOOR {
            out.thd.push(0.0);
            out.tnhd.push(SATURATION_CAP);
            out.twd.push(SATURATION_CAP);
            out.saturated.push(true);
            continue;
        }
        let twd = (ir * ir - i1 * i1).max(0.0).sqrt() / i1;
        // the harmonic sum can exceed the total residue under noise
        let thd = (ph.sqrt() / i1).min(twd);
        let tnhd = (twd * twd - thd * thd).max(0.0).sqrt();
        out.thd.push(thd);
        out.tnhd.push(tnhd);
        out.twd.push(twd);
        out.saturated.push(false);
    }
    Ok(out)
}

/// Feature tracks of one phase signal.
pub fn phase_tracks(
    signal: &[f64],
    sample_rate: f64,
    f0: f64,
    window: &WindowSpec,
    h_max: u32,
) -> Result<(PhaseTracks, TimeFrequencyMap)> {
    let tfr = stft(signal, sample_rate, window)?;
    let d = inst_distortions(&tfr, signal, f0, h_max)?;
    let tracks = PhaseTracks {
        i_rms: inst_rms(signal, window),
        i_fund: inst_fundamental(&tfr, f0)?,
        i_ave: inst_average(signal, window),
        thd: d.thd,
        tnhd: d.tnhd,
        twd: d.twd,
        saturated: d.saturated,
    };
    Ok((tracks, tfr))
}

/// All three phases' feature tracks, with default harmonic limit.
pub fn extract(record: &ThreePhaseRecord, window: &WindowSpec) -> Result<FeatureTracks> {
    extract_with(record, window, DEFAULT_H_MAX).map(|(t, _)| t)
}

/// Feature tracks plus the per-phase TFRs they were computed from.
pub fn extract_with(
    record: &ThreePhaseRecord,
    window: &WindowSpec,
    h_max: u32,
) -> Result<(FeatureTracks, [TimeFrequencyMap; 3])> {
    let fs = record.sample_rate();
    let f0 = record.config.fundamental;
    let [a, b, c] = Phase::ALL.map(|p| phase_tracks(record.phase(p), fs, f0, window, h_max));
    let (ta, fa) = a?;
    let (tb, fb) = b?;
    let (tc, fc) = c?;
    let tracks = FeatureTracks {
        frame_times: fa.frame_times().to_vec(),
        frame_period: window.hop_seconds(fs),
        window_span: window.span_seconds(fs),
        phases: [ta, tb, tc],
    };
    Ok((tracks, [fa, fb, fc]))
}

/// Detected time above the TWD threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultDuration {
    /// Seconds.
    pub td_fault: f64,
    /// `[first crossing, last crossing + one frame period]`, seconds.
    pub interval: Option<[f64; 2]>,
}

/// Frames with `twd >= threshold`, each worth one frame period.
pub fn fault_duration(
    twd: &[f64],
    frame_times: &[f64],
    frame_period: f64,
    threshold: f64,
) -> Result<FaultDuration> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Config(format!(
            "TWD threshold must be positive, got {threshold}"
        )));
    }
    if twd.len() != frame_times.len() {
        return Err(Error::Input(
            "twd track and frame times differ in length".into(),
        ));
    }
    let above = || {
        twd.iter()
            .enumerate()
            .filter(|(_, &v)| v >= threshold)
            .map(|(i, _)| i)
    };
    let count = above().count();
    let interval = match (above().next(), above().next_back()) {
        (Some(first), Some(last)) => Some([frame_times[first], frame_times[last] + frame_period]),
        _ => None,
    };
    Ok(FaultDuration {
        td_fault: count as f64 * frame_period,
        interval,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    /// Seconds.
    pub td_fault: f64,
    pub fault_interval: Option<[f64; 2]>,
    pub thd_mean: f64,
    pub tnhd_mean: f64,
    pub twd_mean: f64,
    pub i_rms_mean: f64,
    pub i_fund_mean: f64,
    pub i_ave_mean: f64,
}

/// Per-phase summaries, serialized as an object keyed `a`, `b`, `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub a: PhaseSummary,
    pub b: PhaseSummary,
    pub c: PhaseSummary,
}

impl FeatureSummary {
    pub fn phase(&self, p: Phase) -> &PhaseSummary {
        match p {
            Phase::A => &self.a,
            Phase::B => &self.b,
            Phase::C => &self.c,
        }
    }

    pub fn to_array(&self) -> [PhaseSummary; 3] {
        [self.a, self.b, self.c]
    }
}

/// Frames the means are taken over.
///
/// With a detected interval, this is its steady core: frames whose whole
/// analysis window sits inside the estimated fault span, i.e. centres in
/// `[t_on + W, t_off - W]`. When the fault is shorter than the window the
/// bounds cross and select the frames of maximal overlap instead. Empty
/// cores fall back to the whole interval; no detection means all frames.
fn mean_frames(times: &[f64], period: f64, span: f64, interval: Option<[f64; 2]>) -> Vec<usize> {
    let Some([t_on, t_off]) = interval else {
        return (0..times.len()).collect();
    };
    let eps = 1e-9;
    let last = t_off - period;
    let inside = |t: f64| t >= t_on - eps && t <= last + eps;
    let (lo, hi) = {
        let (x, y) = (t_on + span, t_off - span);
        (x.min(y), x.max(y))
    };
    let core: Vec<usize> = (0..times.len())
        .filter(|&i| inside(times[i]) && times[i] >= lo - eps && times[i] <= hi + eps)
        .collect();
    if core.is_empty() {
        (0..times.len()).filter(|&i| inside(times[i])).collect()
    } else {
        core
    }
}

fn mean_at(track: &[f64], idx: &[usize]) -> f64 {
    if idx.is_empty() {
        0.0
    } else {
        idx.iter().map(|&i| track[i]).sum::<f64>() / idx.len() as f64
    }
}

pub fn summarize_phase(
    tracks: &PhaseTracks,
    frame_times: &[f64],
    frame_period: f64,
    window_span: f64,
    threshold: f64,
) -> Result<PhaseSummary> {
    let fd = fault_duration(&tracks.twd, frame_times, frame_period, threshold)?;
    let idx = mean_frames(frame_times, frame_period, window_span, fd.interval);
    Ok(PhaseSummary {
        td_fault: fd.td_fault,
        fault_interval: fd.interval,
        thd_mean: mean_at(&tracks.thd, &idx),
        tnhd_mean: mean_at(&tracks.tnhd, &idx),
        twd_mean: mean_at(&tracks.twd, &idx),
        i_rms_mean: mean_at(&tracks.i_rms, &idx),
        i_fund_mean: mean_at(&tracks.i_fund, &idx),
        i_ave_mean: mean_at(&tracks.i_ave, &idx),
    })
}

pub fn summarize(tracks: &FeatureTracks, threshold: f64) -> Result<FeatureSummary> {
    let s = |p: Phase| {
        summarize_phase(
            tracks.phase(p),
            &tracks.frame_times,
            tracks.frame_period,
            tracks.window_span,
            threshold,
        )
    };
    Ok(FeatureSummary {
        a: s(Phase::A)?,
        b: s(Phase::B)?,
        c: s(Phase::C)?,
    })
}
