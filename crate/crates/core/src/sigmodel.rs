//! Behavioral three-phase inverter current model.
//!
//! Healthy output currents are three sinusoids 120° apart with a small
//! 5th/7th harmonic floor. Switch faults are injected directly at the
//! current-waveform level:
//!
//! * open upper switch: positive half-cycles collapse to a small residual,
//!   negative half-cycles are scaled up; open lower switch is the mirror.
//! * short lower switch: the phase current is scaled down and pushed by a
//!   negative DC offset; short upper switch is the mirror.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that a time span maps onto whole samples.
const SAMPLE_EPS: f64 = 1e-9;

/// Output phase (inverter leg).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    A,
    B,
    C,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::A, Phase::B, Phase::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Phase> {
        Phase::ALL.get(i).copied()
    }

    /// a -> b -> c -> a
    pub fn rotate(self) -> Phase {
        Phase::ALL[(self.index() + 1) % 3]
    }

    /// Lower-case name used in file names and JSON keys.
    pub fn key(self) -> &'static str {
        match self {
            Phase::A => "a",
            Phase::B => "b",
            Phase::C => "c",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::A => "A",
            Phase::B => "B",
            Phase::C => "C",
        };
        f.write_str(s)
    }
}

/// One of the six inverter switches, numbered leg-major:
/// S1/S2 = leg A upper/lower, S3/S4 = leg B, S5/S6 = leg C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SwitchId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl SwitchId {
    pub const ALL: [SwitchId; 6] = [
        SwitchId::S1,
        SwitchId::S2,
        SwitchId::S3,
        SwitchId::S4,
        SwitchId::S5,
        SwitchId::S6,
    ];

    pub fn new(leg: Phase, upper: bool) -> SwitchId {
        SwitchId::ALL[leg.index() * 2 + usize::from(!upper)]
    }

    pub fn leg(self) -> Phase {
        Phase::ALL[self as usize / 2]
    }

    pub fn is_upper(self) -> bool {
        (self as usize).is_multiple_of(2)
    }

    /// Same position (upper/lower) on the next leg.
    pub fn rotate(self) -> SwitchId {
        SwitchId::new(self.leg().rotate(), self.is_upper())
    }

    pub fn number(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for SwitchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.number())
    }
}

impl FromStr for SwitchId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: usize = s
            .trim()
            .strip_prefix(['S', 's'])
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| Error::Input(format!("bad switch id {s:?}")))?;
        n.checked_sub(1)
            .and_then(|i| SwitchId::ALL.get(i).copied())
            .ok_or_else(|| Error::Input(format!("switch must be S1..S6, got {s:?}")))
    }
}

/// Parameters of the healthy operating point.
///
/// Phase order is fixed: a, b, c at 0°, -120°, -240°.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalConfig {
    /// Hz.
    pub sample_rate: f64,
    /// Hz.
    pub fundamental: f64,
    /// Seconds.
    pub duration: f64,
    /// Peak of the fundamental, amperes.
    pub fundamental_peak: f64,
    /// Healthy TWD, split evenly (in RMS) between the 5th and 7th harmonics.
    pub baseline_distortion: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig {
            sample_rate: 10_000.0,
            fundamental: 60.0,
            duration: 0.4,
            fundamental_peak: 1.65,
            baseline_distortion: 0.02,
        }
    }
}

impl SignalConfig {
    /// Harmonic orders carrying the healthy distortion floor.
    pub const BASELINE_HARMONICS: [u32; 2] = [5, 7];

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.sample_rate,
            self.fundamental,
            self.duration,
            self.fundamental_peak,
            self.baseline_distortion,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("signal parameters must be finite".into()));
        }
        if self.sample_rate <= 0.0 {
            return Err(Error::Config(format!(
                "sample_rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if self.duration <= 0.0 {
            return Err(Error::Config(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if self.fundamental <= 0.0 {
            return Err(Error::Config("fundamental must be positive".into()));
        }
        if self.fundamental_peak < 0.0 {
            return Err(Error::Config("fundamental_peak must be >= 0".into()));
        }
        if self.baseline_distortion < 0.0 {
            return Err(Error::Config("baseline_distortion must be >= 0".into()));
        }
        let highest = if self.baseline_distortion > 0.0 {
            self.fundamental * 7.0
        } else {
            self.fundamental
        };
        if self.sample_rate <= 2.0 * highest {
            return Err(Error::Config(format!(
                "sample_rate {} Hz does not exceed twice the highest synthesized frequency {} Hz",
                self.sample_rate, highest
            )));
        }
        let n = self.duration * self.sample_rate;
        if (n - n.round()).abs() > SAMPLE_EPS * n.max(1.0) || n.round() < 1.0 {
            return Err(Error::Config(format!(
                "duration * sample_rate must be a positive integer, got {n}"
            )));
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    /// RMS of the healthy fundamental.
    pub fn fundamental_rms(&self) -> f64 {
        self.fundamental_peak / SQRT_2
    }

    /// Electrical angle offset of a phase, radians.
    pub fn phase_offset(phase: Phase) -> f64 {
        -(phase.index() as f64) * 2.0 * PI / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultKind {
    None,
    Open,
    Short,
}

/// A single-switch fault and its severity parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FaultSpec {
    pub kind: FaultKind,
    #[serde(rename = "switch_id")]
    pub switch: SwitchId,
    /// Seconds from record start.
    pub start: f64,
    /// Seconds.
    pub duration: f64,
    /// Bound on what is left of the suppressed half-cycle, amperes.
    pub open_residual: f64,
    /// Gain applied to the surviving half-cycle.
    pub open_compensation: f64,
    /// Magnitude of the DC shift during a short, amperes.
    pub short_dc_offset: f64,
    /// Gain applied to the phase current during a short.
    pub short_fundamental_scale: f64,
}

impl Default for FaultSpec {
    fn default() -> Self {
        FaultSpec {
            kind: FaultKind::None,
            switch: SwitchId::S1,
            start: 0.195,
            duration: 0.060,
            open_residual: 0.05,
            open_compensation: 1.15,
            short_dc_offset: 1.1,
            short_fundamental_scale: 0.64,
        }
    }
}

impl FaultSpec {
    pub fn none() -> Self {
        FaultSpec::default()
    }

    pub fn open(switch: SwitchId) -> Self {
        FaultSpec {
            kind: FaultKind::Open,
            switch,
            ..FaultSpec::default()
        }
    }

    pub fn short(switch: SwitchId) -> Self {
        FaultSpec {
            kind: FaultKind::Short,
            switch,
            ..FaultSpec::default()
        }
    }

    pub fn with_window(mut self, start: f64, duration: f64) -> Self {
        self.start = start;
        self.duration = duration;
        self
    }

    pub fn is_fault(&self) -> bool {
        self.kind != FaultKind::None
    }

    /// Half-open sample range `[n0, n1)` covered by the fault window.
    fn sample_range(&self, sample_rate: f64, len: usize) -> Result<(usize, usize)> {
        let record_duration = len as f64 / sample_rate;
        let end = self.start + self.duration;
        if !(self.start.is_finite() && self.duration.is_finite()) {
            return Err(Error::Range("fault window must be finite".into()));
        }
        if self.start < 0.0 || self.duration < 0.0 {
            return Err(Error::Range(format!(
                "fault window [{}, {}) starts before the record",
                self.start, end
            )));
        }
        if end > record_duration + SAMPLE_EPS {
            return Err(Error::Range(format!(
                "fault window [{}, {}) s exceeds record duration {} s",
                self.start, end, record_duration
            )));
        }
        let to_index = |t: f64| ((t * sample_rate - SAMPLE_EPS).ceil().max(0.0) as usize).min(len);
        Ok((to_index(self.start), to_index(end)))
    }

    fn validate_severity(&self) -> Result<()> {
        let vals = [
            self.open_residual,
            self.open_compensation,
            self.short_dc_offset,
            self.short_fundamental_scale,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "fault severity parameters must be finite".into(),
            ));
        }
        if self.open_residual < 0.0 {
            return Err(Error::Config("open_residual must be >= 0".into()));
        }
        Ok(())
    }
}

/// Uniformly sampled three-phase currents plus their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseRecord {
    pub config: SignalConfig,
    pub label: FaultSpec,
    samples: [Vec<f64>; 3],
}

impl ThreePhaseRecord {
    pub fn new(config: SignalConfig, label: FaultSpec, samples: [Vec<f64>; 3]) -> Result<Self> {
        let len = samples[0].len();
        if len == 0 || samples.iter().any(|s| s.len() != len) {
            return Err(Error::Input(
                "all three phases must have the same non-zero length".into(),
            ));
        }
        if config.sample_rate <= 0.0 || !config.sample_rate.is_finite() {
            return Err(Error::Config("sample_rate must be positive".into()));
        }
        for s in &samples {
            if let Some((index, &value)) = s.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::Data { index, value });
            }
        }
        Ok(ThreePhaseRecord {
            config,
            label,
            samples,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.config.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate()
    }

    pub fn phase(&self, phase: Phase) -> &[f64] {
        &self.samples[phase.index()]
    }

    pub fn phases(&self) -> &[Vec<f64>; 3] {
        &self.samples
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 / self.sample_rate()
    }

    /// Relabel phases a -> b -> c -> a. The fault label moves with its leg.
    pub fn rotate_phases(&self) -> ThreePhaseRecord {
        let [a, b, c] = self.samples.clone();
        let mut label = self.label;
        label.switch = label.switch.rotate();
        ThreePhaseRecord {
            config: self.config,
            label,
            samples: [c, a, b],
        }
    }

    /// Multiply every sample by `k`.
    pub fn scaled(&self, k: f64) -> ThreePhaseRecord {
        let mut out = self.clone();
        for s in out.samples.iter_mut() {
            s.iter_mut().for_each(|x| *x *= k);
        }
        out
    }
}

/// Fault-free three-phase currents.
pub fn synth_healthy(config: &SignalConfig) -> Result<ThreePhaseRecord> {
    config.validate()?;
    let n = config.num_samples();
    let w = 2.0 * PI * config.fundamental;
    // equal RMS split of the distortion floor across the two harmonics
    let harmonic_gain = config.baseline_distortion / SQRT_2;
    let samples = Phase::ALL.map(|p| {
        let offset = SignalConfig::phase_offset(p);
        (0..n)
            .map(|i| {
                let theta = w * (i as f64 / config.sample_rate) + offset;
                let floor: f64 = SignalConfig::BASELINE_HARMONICS
                    .iter()
                    .map(|&h| (h as f64 * theta).sin())
                    .sum();
                config.fundamental_peak * (theta.sin() + harmonic_gain * floor)
            })
            .collect()
    });
    ThreePhaseRecord::new(*config, FaultSpec::none(), samples)
}

/// Apply a switch fault signature to the faulty leg inside the fault window.
///
/// Samples outside the window and the two healthy legs are left untouched.
pub fn inject_fault(record: &ThreePhaseRecord, fault: &FaultSpec) -> Result<ThreePhaseRecord> {
    if !fault.is_fault() {
        return Ok(record.clone());
    }
    fault.validate_severity()?;
    let (n0, n1) = fault.sample_range(record.sample_rate(), record.len())?;
    let mut out = record.clone();
    out.label = *fault;
    let upper = fault.switch.is_upper();
    let phase = &mut out.samples[fault.switch.leg().index()];
    let window = &mut phase[n0..n1];
    match fault.kind {
        FaultKind::Open => {
            let r = fault.open_residual;
            let gain = fault.open_compensation;
            for x in window.iter_mut() {
                *x = match (upper, *x > 0.0, *x < 0.0) {
                    (true, true, _) => x.min(r),
                    (true, false, _) => *x * gain,
                    (false, _, true) => x.max(-r),
                    (false, _, false) => *x * gain,
                };
            }
        }
        FaultKind::Short => {
            let dc = if upper {
                fault.short_dc_offset
            } else {
                -fault.short_dc_offset
            };
            let scale = fault.short_fundamental_scale;
            window.iter_mut().for_each(|x| *x = *x * scale + dc);
        }
        FaultKind::None => unreachable!(),
    }
    Ok(out)
}

/// Add zero-mean Gaussian noise at `snr_db` relative to the healthy
/// fundamental power. `f64::INFINITY` means no noise.
pub fn add_noise(record: &ThreePhaseRecord, snr_db: f64, seed: u64) -> Result<ThreePhaseRecord> {
    if snr_db == f64::INFINITY {
        return Ok(record.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::Config(format!(
            "snr_db must be finite or +inf, got {snr_db}"
        )));
    }
    let sigma = record.config.fundamental_rms() / 10f64.powf(snr_db / 20.0);
    if sigma == 0.0 {
        return Ok(record.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = record.clone();
    for s in out.samples.iter_mut() {
        s.iter_mut().for_each(|x| *x += normal.sample(&mut rng));
    }
    Ok(out)
}
