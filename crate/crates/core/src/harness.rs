//! Seeded fault corpus, batch evaluation and the accuracy report.

use std::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{diagnose, Label, Thresholds};
use crate::error::Result;
use crate::sigmodel::{
    add_noise, inject_fault, synth_healthy, FaultKind, FaultSpec, SignalConfig, ThreePhaseRecord,
};
use crate::stft::WindowSpec;

impl Label {
    /// Ground-truth label of a fault specification.
    pub fn from_fault(fault: &FaultSpec) -> Label {
        match fault.kind {
            FaultKind::None => Label::Healthy,
            FaultKind::Open => Label::Open(fault.switch),
            FaultKind::Short => Label::Short(fault.switch),
        }
    }
}

/// How the corpus varies. Each record draws one value from every grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSpec {
    pub seed: u64,
    /// Records per fault class (12 classes).
    pub per_class: usize,
    /// Fault start times, seconds.
    pub starts: Vec<f64>,
    /// Fault durations, seconds.
    pub durations: Vec<f64>,
    /// SNR in dB; `None` is noiseless.
    pub snr_db: Vec<Option<f64>>,
    /// Multiplies the healthy fundamental peak.
    pub amplitude_scales: Vec<f64>,
    pub signal: SignalConfig,
    /// Severity parameters shared by every fault; kind, switch and window
    /// are overwritten per record.
    pub fault: FaultSpec,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 42,
            per_class: 5,
            starts: vec![0.150, 0.180, 0.195, 0.210, 0.240],
            durations: vec![0.060, 0.080, 0.100],
            snr_db: vec![Some(30.0), Some(40.0)],
            amplitude_scales: vec![0.9, 1.0, 1.1],
            signal: SignalConfig::default(),
            fault: FaultSpec::default(),
        }
    }
}

impl CorpusSpec {
    /// Noiseless, nominal operating point: 195 ms start, 60 ms duration.
    pub fn nominal() -> Self {
        CorpusSpec {
            per_class: 1,
            starts: vec![0.195],
            durations: vec![0.060],
            snr_db: vec![None],
            amplitude_scales: vec![1.0],
            ..CorpusSpec::default()
        }
    }

    pub fn size(&self) -> usize {
        self.per_class * 12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRecord {
    pub record: ThreePhaseRecord,
    pub truth: Label,
    pub snr_db: Option<f64>,
    pub amplitude_scale: f64,
}

impl LabeledRecord {
    pub fn noiseless(record: ThreePhaseRecord) -> Self {
        LabeledRecord {
            truth: Label::from_fault(&record.label),
            record,
            snr_db: None,
            amplitude_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub seed: Option<u64>,
    pub records: Vec<LabeledRecord>,
}

impl Corpus {
    pub fn from_records(records: Vec<LabeledRecord>) -> Self {
        Corpus {
            seed: None,
            records,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

struct Draw {
    fault: FaultSpec,
    snr_db: Option<f64>,
    scale: f64,
    noise_seed: u64,
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, grid: &[T], fallback: T) -> T {
    if grid.is_empty() {
        fallback
    } else {
        grid[rng.random_range(0..grid.len())]
    }
}

/// Deterministic corpus: same spec, same records.
pub fn gen_corpus(spec: &CorpusSpec) -> Result<Corpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let defaults = FaultSpec::default();
    let mut draws = Vec::with_capacity(spec.size());
    for class in Label::fault_classes() {
        for _ in 0..spec.per_class {
            let start = pick(&mut rng, &spec.starts, defaults.start);
            let duration = pick(&mut rng, &spec.durations, defaults.duration);
            let snr_db = pick(&mut rng, &spec.snr_db, None);
            let scale = pick(&mut rng, &spec.amplitude_scales, 1.0);
            let noise_seed = rng.next_u64();
            let mut fault = spec.fault.with_window(start, duration);
            match class {
                Label::Open(s) => {
                    fault.kind = FaultKind::Open;
                    fault.switch = s;
                }
                Label::Short(s) => {
                    fault.kind = FaultKind::Short;
                    fault.switch = s;
                }
                _ => unreachable!(),
            }
            draws.push(Draw {
                fault,
                snr_db,
                scale,
                noise_seed,
            });
        }
    }

    let records = draws
        .par_iter()
        .map(|d| {
            let config = SignalConfig {
                fundamental_peak: spec.signal.fundamental_peak * d.scale,
                ..spec.signal
            };
            let healthy = synth_healthy(&config)?;
            let faulted = inject_fault(&healthy, &d.fault)?;
            let record = match d.snr_db {
                Some(snr) => add_noise(&faulted, snr, d.noise_seed)?,
                None => faulted,
            };
            Ok(LabeledRecord {
                record,
                truth: Label::from_fault(&d.fault),
                snr_db: d.snr_db,
                amplitude_scale: d.scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus {
        seed: Some(spec.seed),
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub label: Label,
    pub correct: usize,
    pub total: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    /// `None` is the noiseless subset.
    pub snr_db: Option<f64>,
    pub correct: usize,
    pub total: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: Option<u64>,
    pub thresholds: Thresholds,
    pub window: WindowSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    /// Classes present in the corpus, in table order.
    pub classes: Vec<ClassScore>,
    pub correct: usize,
    pub total: usize,
    pub overall_percent: f64,
    /// Row/column labels of `confusion`.
    pub labels: Vec<Label>,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub by_snr: Vec<SubsetScore>,
    pub metadata: RunMetadata,
}

fn percent(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * correct as f64 / total as f64
    }
}

/// Diagnose every record and tally the results. Unknown counts as wrong.
pub fn evaluate(corpus: &Corpus, window: &WindowSpec, thr: &Thresholds) -> Result<AccuracyReport> {
    let predictions = corpus
        .records
        .par_iter()
        .map(|r| diagnose(&r.record, window, thr).map(|d| d.label))
        .collect::<Result<Vec<_>>>()?;

    let labels = Label::all();
    let index = |l: &Label| labels.iter().position(|x| x == l).expect("label in table");
    let mut confusion = vec![vec![0usize; labels.len()]; labels.len()];
    let mut snrs: Vec<Option<f64>> = Vec::new();
    for (r, p) in corpus.records.iter().zip(&predictions) {
        confusion[index(&r.truth)][index(p)] += 1;
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    // noisiest first, noiseless last
    snrs.sort_by(|a, b| match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(y),
        (None, None) => std::cmp::Ordering::Equal,
        (None, _) => std::cmp::Ordering::Greater,
        (_, None) => std::cmp::Ordering::Less,
    });

    let classes = labels
        .iter()
        .enumerate()
        .filter_map(|(i, &label)| {
            let total: usize = confusion[i].iter().sum();
            (total > 0).then(|| ClassScore {
                label,
                correct: confusion[i][i],
                total,
                percent: percent(confusion[i][i], total),
            })
        })
        .collect::<Vec<_>>();
    let correct = classes.iter().map(|c| c.correct).sum();
    let total = corpus.len();

    let by_snr = snrs
        .into_iter()
        .map(|snr| {
            let (c, t) = corpus
                .records
                .iter()
                .zip(&predictions)
                .filter(|(r, _)| r.snr_db == snr)
                .fold((0, 0), |(c, t), (r, p)| {
                    (c + usize::from(r.truth == *p), t + 1)
                });
            SubsetScore {
                snr_db: snr,
                correct: c,
                total: t,
                percent: percent(c, t),
            }
        })
        .collect();

    Ok(AccuracyReport {
        classes,
        correct,
        total,
        overall_percent: percent(correct, total),
        labels,
        confusion,
        by_snr,
        metadata: RunMetadata {
            seed: corpus.seed,
            thresholds: *thr,
            window: *window,
        },
    })
}

impl AccuracyReport {
    pub fn score(&self, label: Label) -> Option<&ClassScore> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// Plain-text table: fault type, switch, counts and percent per class.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Switch fault classification performance");
        let _ = writeln!(
            out,
            "{:<15} {:<7} {:>8} {:>6} {:>10}",
            "Type of fault", "Switch", "Correct", "Total", "% Correct"
        );
        let _ = writeln!(out, "{}", "-".repeat(50));
        let mut last_kind = "";
        for c in &self.classes {
            let (kind, switch) = match c.label {
                Label::Open(s) => ("Open-Circuit", s.to_string()),
                Label::Short(s) => ("Short-Circuit", s.to_string()),
                Label::Healthy => ("Healthy", "-".to_string()),
                Label::Unknown => ("Unknown", "-".to_string()),
            };
            let shown = if kind == last_kind { "" } else { kind };
            last_kind = kind;
            let _ = writeln!(
                out,
                "{:<15} {:<7} {:>8} {:>6} {:>10.1}",
                shown, switch, c.correct, c.total, c.percent
            );
        }
        let _ = writeln!(out, "{}", "-".repeat(50));
        let _ = writeln!(
            out,
            "{:<15} {:<7} {:>8} {:>6} {:>10.1}",
            "Overall", "", self.correct, self.total, self.overall_percent
        );
        for s in &self.by_snr {
            let name = match s.snr_db {
                Some(db) => format!("SNR {db} dB"),
                None => "noiseless".to_string(),
            };
            let _ = writeln!(
                out,
                "{:<23} {:>8} {:>6} {:>10.1}",
                name, s.correct, s.total, s.percent
            );
        }
        out
    }
}
