//! Rule-based switch fault classifier.
//!
//! Per-phase summaries are reduced to a six-bit rule code taken from the
//! phase with the longest detected fault, then mapped through a fixed
//! decision table:
//!
//! | b0 | b1 rms up | b2 harmonic | b3 negative shift | label            |
//! |----|-----------|-------------|-------------------|------------------|
//! | 0  | -         | -           | -                 | Healthy          |
//! | 1  | 0         | 1           | 1                 | Open, upper      |
//! | 1  | 0         | 1           | 0                 | Open, lower      |
//! | 1  | 1         | 0           | 1                 | Short, lower     |
//! | 1  | 1         | 0           | 0                 | Short, upper     |
//! | 1  | 1         | 1           | -                 | Unknown          |
//! | 1  | 0         | 0           | -                 | Unknown          |

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract, summarize, FeatureSummary, PhaseSummary};
use crate::sigmodel::{Phase, SwitchId, ThreePhaseRecord};
use crate::stft::WindowSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// TWD level counted as faulty.
    pub twd_fault: f64,
    /// Minimum detected fault time, seconds.
    pub td_min: f64,
    /// Relative RMS rise over `nominal_rms` that marks a short.
    pub rms_rise: f64,
    /// THD at or above which the signature is harmonic-rich (open).
    pub thd_open: f64,
    /// Average current at or below `-ave_shift` A is a negative shift.
    pub ave_shift: f64,
    /// Healthy phase RMS, amperes.
    pub nominal_rms: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            twd_fault: 0.05,
            td_min: 0.020,
            rms_rise: 0.05,
            thd_open: 0.10,
            ave_shift: 0.20,
            nominal_rms: 1.167,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.twd_fault,
            self.td_min,
            self.rms_rise,
            self.thd_open,
            self.ave_shift,
            self.nominal_rms,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!(
                "thresholds must be positive and finite: {self:?}"
            )));
        }
        if self.twd_fault >= 1.0 {
            return Err(Error::Config("twd_fault must be below 1".into()));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let t: Thresholds = serde_json::from_str(s)?;
        t.validate()?;
        Ok(t)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&s)
    }
}

/// Thresholded feature bits of the faulty phase plus its phase code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleCode {
    pub fault_present: bool,
    pub rms_increased: bool,
    pub harmonic_signature: bool,
    pub negative_shift: bool,
    pub phase: Phase,
}

impl RuleCode {
    pub const HEALTHY: RuleCode = RuleCode {
        fault_present: false,
        rms_increased: false,
        harmonic_signature: false,
        negative_shift: false,
        phase: Phase::A,
    };

    /// `[b0, b1, b2, b3, b4, b5]`, phase code in b4b5 (00 = A, 01 = B, 10 = C).
    pub fn bits(&self) -> [u8; 6] {
        let pc = self.phase.index() as u8;
        [
            self.fault_present as u8,
            self.rms_increased as u8,
            self.harmonic_signature as u8,
            self.negative_shift as u8,
            pc >> 1,
            pc & 1,
        ]
    }

    pub fn from_bits(bits: [u8; 6]) -> Result<RuleCode> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Input(format!(
                "rule code bits must be 0/1: {bits:?}"
            )));
        }
        let phase = Phase::from_index(usize::from(bits[4] << 1 | bits[5]))
            .ok_or_else(|| Error::Input("phase code 11 is invalid".into()))?;
        let code = RuleCode {
            fault_present: bits[0] == 1,
            rms_increased: bits[1] == 1,
            harmonic_signature: bits[2] == 1,
            negative_shift: bits[3] == 1,
            phase,
        };
        if !code.fault_present && code != RuleCode::HEALTHY {
            return Err(Error::Input(
                "b0 = 0 requires every other bit to be 0".into(),
            ));
        }
        Ok(code)
    }

    /// Every code satisfying the invariants (b0 = 0 only as all zeros).
    pub fn all_valid() -> Vec<RuleCode> {
        let mut out = vec![RuleCode::HEALTHY];
        for m in 0..8u8 {
            for phase in Phase::ALL {
                out.push(RuleCode {
                    fault_present: true,
                    rms_increased: m & 1 != 0,
                    harmonic_signature: m & 2 != 0,
                    negative_shift: m & 4 != 0,
                    phase,
                });
            }
        }
        out
    }
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for RuleCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Input(format!("bad rule code {s:?}"))),
            })
            .collect::<Result<_>>()?;
        let bits: [u8; 6] = digits
            .try_into()
            .map_err(|_| Error::Input(format!("rule code must have 6 bits: {s:?}")))?;
        RuleCode::from_bits(bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Healthy,
    Open(SwitchId),
    Short(SwitchId),
    Unknown,
}

impl Label {
    /// Healthy, Open S1..S6, Short S1..S6, Unknown.
    pub fn all() -> Vec<Label> {
        let mut v = vec![Label::Healthy];
        v.extend(SwitchId::ALL.map(Label::Open));
        v.extend(SwitchId::ALL.map(Label::Short));
        v.push(Label::Unknown);
        v
    }

    /// The twelve fault classes, opens first.
    pub fn fault_classes() -> Vec<Label> {
        let mut v: Vec<Label> = SwitchId::ALL.map(Label::Open).to_vec();
        v.extend(SwitchId::ALL.map(Label::Short));
        v
    }

    pub fn switch(&self) -> Option<SwitchId> {
        match self {
            Label::Open(s) | Label::Short(s) => Some(*s),
            _ => None,
        }
    }

    pub fn rotate(self) -> Label {
        match self {
            Label::Open(s) => Label::Open(s.rotate()),
            Label::Short(s) => Label::Short(s.rotate()),
            other => other,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::Healthy => "Healthy".to_string(),
            Label::Open(s) => format!("Open:{s}"),
            Label::Short(s) => format!("Short:{s}"),
            Label::Unknown => "Unknown".to_string(),
        };
        f.pad(&s)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Healthy" => Ok(Label::Healthy),
            "Unknown" => Ok(Label::Unknown),
            _ => match s.split_once(':') {
                Some(("Open", sw)) => Ok(Label::Open(sw.parse()?)),
                Some(("Short", sw)) => Ok(Label::Short(sw.parse()?)),
                _ => Err(Error::Input(format!("bad label {s:?}"))),
            },
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiagnosisJson", into = "DiagnosisJson")]
pub struct Diagnosis {
    pub label: Label,
    pub code: RuleCode,
    pub faulty_phase: Option<Phase>,
    /// Seconds.
    pub td_fault: f64,
}

impl Diagnosis {
    pub fn from_code(code: RuleCode, td_fault: f64) -> Diagnosis {
        Diagnosis {
            label: classify(&code),
            code,
            faulty_phase: code.fault_present.then_some(code.phase),
            td_fault,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DiagnosisJson {
    label: Label,
    code_bits: String,
    phase: Option<Phase>,
    td_fault_s: f64,
}

impl From<Diagnosis> for DiagnosisJson {
    fn from(d: Diagnosis) -> Self {
        DiagnosisJson {
            label: d.label,
            code_bits: d.code.to_string(),
            phase: d.faulty_phase,
            td_fault_s: d.td_fault,
        }
    }
}

impl TryFrom<DiagnosisJson> for Diagnosis {
    type Error = Error;

    fn try_from(j: DiagnosisJson) -> Result<Self> {
        let code: RuleCode = j.code_bits.parse()?;
        let d = Diagnosis::from_code(code, j.td_fault_s);
        if d.label != j.label || d.faulty_phase != j.phase {
            return Err(Error::Input(format!(
                "diagnosis label {} / phase {:?} inconsistent with code {}",
                j.label, j.phase, j.code_bits
            )));
        }
        Ok(d)
    }
}

/// Phase with the longest detected fault; the first maximum wins, so ties
/// resolve A < B < C.
fn argmax_td(summaries: &[PhaseSummary]) -> (usize, &PhaseSummary) {
    summaries
        .iter()
        .enumerate()
        .fold((0, &summaries[0]), |best, (i, s)| {
            if s.td_fault > best.1.td_fault {
                (i, s)
            } else {
                best
            }
        })
}

/// Threshold the faulty phase's summary into a rule code.
pub fn encode(summaries: &[PhaseSummary], thr: &Thresholds) -> Result<RuleCode> {
    if summaries.len() != 3 {
        return Err(Error::Input(format!(
            "expected 3 phase summaries, got {}",
            summaries.len()
        )));
    }
    let (idx, s) = argmax_td(summaries);
    if s.td_fault < thr.td_min {
        return Ok(RuleCode::HEALTHY);
    }
    Ok(RuleCode {
        fault_present: true,
        rms_increased: s.i_rms_mean > (1.0 + thr.rms_rise) * thr.nominal_rms,
        harmonic_signature: s.thd_mean >= thr.thd_open,
        negative_shift: s.i_ave_mean <= -thr.ave_shift,
        phase: Phase::ALL[idx],
    })
}

/// The decision table.
pub fn classify(code: &RuleCode) -> Label {
    if !code.fault_present {
        return Label::Healthy;
    }
    let leg = code.phase;
    match (code.rms_increased, code.harmonic_signature) {
        (false, true) => Label::Open(SwitchId::new(leg, code.negative_shift)),
        (true, false) => Label::Short(SwitchId::new(leg, !code.negative_shift)),
        _ => Label::Unknown,
    }
}

/// Full pipeline output for one record.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub summary: FeatureSummary,
    pub diagnosis: Diagnosis,
}

pub fn diagnose_summary(summary: &FeatureSummary, thr: &Thresholds) -> Result<Diagnosis> {
    let phases = summary.to_array();
    let code = encode(&phases, thr)?;
    let (_, longest) = argmax_td(&phases);
    Ok(Diagnosis::from_code(code, longest.td_fault))
}

/// STFT -> features -> summary -> rule code -> label.
pub fn diagnose(
    record: &ThreePhaseRecord,
    window: &WindowSpec,
    thr: &Thresholds,
) -> Result<Diagnosis> {
    analyze(record, window, thr).map(|a| a.diagnosis)
}

pub fn analyze(
    record: &ThreePhaseRecord,
    window: &WindowSpec,
    thr: &Thresholds,
) -> Result<Analysis> {
    thr.validate()?;
    let tracks = extract(record, window)?;
    let summary = summarize(&tracks, thr.twd_fault)?;
    let diagnosis = diagnose_summary(&summary, thr)?;
    Ok(Analysis { summary, diagnosis })
}
