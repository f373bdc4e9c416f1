//! Switch fault diagnosis for three-phase voltage source inverters.
//!
//! The pipeline runs per record:
//!
//! 1. [`sigmodel`] synthesizes healthy phase currents and injects
//!    open/short switch fault signatures,
//! 2. [`stft`] computes the windowed time-frequency map of each phase,
//! 3. [`features`] derives RMS, fundamental RMS, average current, THD,
//!    TnHD and TWD per frame, the TWD-threshold fault duration, and
//!    fault-interval means,
//! 4. [`classifier`] thresholds the faulty phase's means into a six-bit rule
//!    code and maps it to a switch label,
//! 5. [`harness`] generates seeded corpora and tallies accuracy.
//!
//! ```
//! use vsi_fault::{diagnose, inject_fault, synth_healthy};
//! use vsi_fault::{FaultSpec, Label, SignalConfig, SwitchId, Thresholds, WindowSpec};
//!
//! let healthy = synth_healthy(&SignalConfig::default()).unwrap();
//! let faulty = inject_fault(&healthy, &FaultSpec::open(SwitchId::S5)).unwrap();
//! let d = diagnose(&faulty, &WindowSpec::default(), &Thresholds::default()).unwrap();
//! assert_eq!(d.label, Label::Open(SwitchId::S5));
//! ```

pub mod classifier;
pub mod error;
pub mod features;
pub mod harness;
pub mod io;
pub mod sigmodel;
pub mod stft;

pub use classifier::{
    analyze, classify, diagnose, encode, Analysis, Diagnosis, Label, RuleCode, Thresholds,
};
pub use error::{Error, Result};
pub use features::{
    extract, fault_duration, summarize, FeatureSummary, FeatureTracks, PhaseSummary, PhaseTracks,
};
pub use harness::{evaluate, gen_corpus, AccuracyReport, Corpus, CorpusSpec, LabeledRecord};
pub use sigmodel::{
    add_noise, inject_fault, synth_healthy, FaultKind, FaultSpec, Phase, SignalConfig, SwitchId,
    ThreePhaseRecord,
};
pub use stft::{band_energy, harmonic_track, stft, TimeFrequencyMap, WindowShape, WindowSpec};
