//! CSV / JSON import and export.
//!
//! * record: `t,ia,ib,ic` CSV plus a JSON sidecar `{config, fault}` with the
//!   same stem.
//! * feature tracks: one `t,irms,ifund,iave,thd,tnhd,twd` CSV per phase.
//! * feature summary: JSON object keyed by phase (`a`, `b`, `c`).
//! * TFR: header-less magnitude matrix (rows = frames, columns = bins) plus
//!   a JSON sidecar with frame times, bin spacing and the window.
//! * accuracy report: `report.json` and `report.txt`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::classifier::Thresholds;
use crate::error::{Error, Result};
use crate::features::{FeatureSummary, FeatureTracks, PhaseTracks};
use crate::harness::AccuracyReport;
use crate::sigmodel::{FaultSpec, Phase, SignalConfig, ThreePhaseRecord};
use crate::stft::{TimeFrequencyMap, WindowSpec};

pub const RECORD_HEADER: [&str; 4] = ["t", "ia", "ib", "ic"];
pub const TRACK_HEADER: [&str; 7] = ["t", "irms", "ifund", "iave", "thd", "tnhd", "twd"];

/// Optional settings file accepted by the command-line tool. Every
/// section falls back to its defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub signal: SignalConfig,
    pub fault: FaultSpec,
    pub window: WindowSpec,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: RunConfig = read_json(path)?;
        cfg.thresholds.validate()?;
        cfg.window.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSidecar {
    pub config: SignalConfig,
    pub fault: FaultSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfrSidecar {
    pub frame_times: Vec<f64>,
    pub bin_spacing: f64,
    pub sample_rate: f64,
    pub window: WindowSpec,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")
        .and_then(|_| f.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&s)?)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

/// Write `record` as CSV at `path` and its sidecar next to it.
pub fn write_record(record: &ThreePhaseRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let err = |e| Error::csv(path, e);
    w.write_record(RECORD_HEADER).map_err(err)?;
    let [a, b, c] = record.phases();
    for n in 0..record.len() {
        w.write_record(&[
            record.time(n).to_string(),
            a[n].to_string(),
            b[n].to_string(),
            c[n].to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    write_json(
        &RecordSidecar {
            config: record.config,
            fault: record.label,
        },
        sidecar_path(path),
    )
}

/// Read a record CSV. The sidecar is used when present; otherwise the
/// sample rate comes from the `t` column and the label is "no fault".
pub fn read_record(path: impl AsRef<Path>) -> Result<ThreePhaseRecord> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    if header.iter().map(str::trim).ne(RECORD_HEADER) {
        return Err(Error::Input(format!(
            "{}: expected header t,ia,ib,ic, got {}",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut t = Vec::new();
    let mut phases: [Vec<f64>; 3] = Default::default();
    for (line, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let parse = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::Input(format!("{}: bad value in row {}", path.display(), line + 2))
                })
        };
        t.push(parse(0)?);
        for (p, col) in phases.iter_mut().zip(1..) {
            p.push(parse(col)?);
        }
    }
    if t.is_empty() {
        return Err(Error::Input(format!("{}: no samples", path.display())));
    }

    let side = sidecar_path(path);
    let (mut config, fault) = if side.exists() {
        let s: RecordSidecar = read_json(&side)?;
        (s.config, s.fault)
    } else {
        if t.len() < 2 {
            return Err(Error::Input(format!(
                "{}: cannot infer the sample rate from a single row without a sidecar",
                path.display()
            )));
        }
        let span = t[t.len() - 1] - t[0];
        let fs = (t.len() - 1) as f64 / span;
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::Input(format!(
                "{}: time column is not increasing",
                path.display()
            )));
        }
        let rounded = fs.round();
        let fs = if (fs - rounded).abs() < 1e-6 * fs {
            rounded
        } else {
            fs
        };
        (
            SignalConfig {
                sample_rate: fs,
                ..SignalConfig::default()
            },
            FaultSpec::none(),
        )
    };
    config.duration = t.len() as f64 / config.sample_rate;
    ThreePhaseRecord::new(config, fault, phases)
}

/// One phase's tracks as `t,irms,ifund,iave,thd,tnhd,twd`.
pub fn write_phase_tracks(
    tracks: &PhaseTracks,
    frame_times: &[f64],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let err = |e| Error::csv(path, e);
    w.write_record(TRACK_HEADER).map_err(err)?;
    for (k, t) in frame_times.iter().enumerate() {
        w.write_record(&[
            t.to_string(),
            tracks.i_rms[k].to_string(),
            tracks.i_fund[k].to_string(),
            tracks.i_ave[k].to_string(),
            tracks.thd[k].to_string(),
            tracks.tnhd[k].to_string(),
            tracks.twd[k].to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `{stem}_tracks_{a,b,c}.csv` into `dir`; returns the paths.
pub fn write_tracks(
    tracks: &FeatureTracks,
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    Phase::ALL
        .iter()
        .map(|&p| {
            let path = dir.as_ref().join(format!("{stem}_tracks_{}.csv", p.key()));
            write_phase_tracks(tracks.phase(p), &tracks.frame_times, &path)?;
            Ok(path)
        })
        .collect()
}

pub fn write_summary(summary: &FeatureSummary, path: impl AsRef<Path>) -> Result<()> {
    write_json(summary, path)
}

/// TFR magnitudes as a CSV matrix plus sidecar.
pub fn write_tfr(tfr: &TimeFrequencyMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    for row in tfr.amplitudes() {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    write_json(
        &TfrSidecar {
            frame_times: tfr.frame_times().to_vec(),
            bin_spacing: tfr.bin_spacing(),
            sample_rate: tfr.sample_rate(),
            window: *tfr.window(),
        },
        sidecar_path(path),
    )
}

/// Writes `report.json` and `report.txt` into `dir`.
pub fn export_report(report: &AccuracyReport, dir: impl AsRef<Path>) -> Result<[PathBuf; 2]> {
    if report.total == 0 {
        return Err(Error::EmptyReport);
    }
    let dir = dir.as_ref();
    let json = dir.join("report.json");
    let txt = dir.join("report.txt");
    write_json(report, &json)?;
    std::fs::write(&txt, report.to_table()).map_err(|e| Error::io(&txt, e))?;
    Ok([json, txt])
}
