use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vsi_fault::io::{self, RunConfig};
use vsi_fault::{
    add_noise, diagnose, evaluate, gen_corpus, inject_fault, synth_healthy, CorpusSpec, FaultKind,
    FaultSpec, Phase, SwitchId,
};

#[derive(Parser)]
#[command(
    name = "vsi-fault",
    version,
    about = "Inverter switch fault synthesis and diagnosis"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// RNG seed for noise and corpus sampling.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// JSON file with optional `signal`, `fault`, `window`, `thresholds` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// STFT window length, samples.
    #[arg(long, global = true)]
    window_len: Option<usize>,
    /// STFT hop, samples.
    #[arg(long, global = true)]
    hop: Option<usize>,
    /// TWD fault-detection threshold (fraction, e.g. 0.05).
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, env = "VSI_FAULT_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a three-phase record and write it as CSV.
    Synth {
        /// `none`, `open:S1`..`open:S6` or `short:S1`..`short:S6`.
        #[arg(long, default_value = "none")]
        fault: String,
        /// Fault start, seconds.
        #[arg(long)]
        start: Option<f64>,
        /// Fault duration, seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Add white noise at this SNR (dB, relative to the fundamental).
        #[arg(long)]
        snr: Option<f64>,
        /// Output file name inside the output directory.
        #[arg(long, short, default_value = "record.csv")]
        output: String,
    },
    /// Export feature tracks, TFRs and the feature summary of a record.
    Analyze { record: PathBuf },
    /// Diagnose a record and print the diagnosis as JSON.
    Diagnose { record: PathBuf },
    /// Generate a seeded corpus and write the accuracy report.
    Bench {
        /// Records per fault class.
        #[arg(long)]
        per_class: Option<usize>,
        /// Noiseless corpus at the nominal fault window.
        #[arg(long)]
        nominal: bool,
    },
}

fn parse_fault(s: &str, base: FaultSpec) -> Result<FaultSpec> {
    let s = s.trim().to_ascii_lowercase();
    if s == "none" || s == "healthy" {
        return Ok(FaultSpec {
            kind: FaultKind::None,
            ..base
        });
    }
    let Some((kind, sw)) = s.split_once(':') else {
        bail!("fault must be `none`, `open:Sn` or `short:Sn`, got `{s}`");
    };
    let kind = match kind {
        "open" => FaultKind::Open,
        "short" => FaultKind::Short,
        other => bail!("unknown fault kind `{other}`"),
    };
    let switch: SwitchId = sw.to_ascii_uppercase().parse()?;
    Ok(FaultSpec {
        kind,
        switch,
        ..base
    })
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::from_json_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(l) = g.window_len {
        cfg.window.length = l;
        cfg.window.dft_size = cfg.window.dft_size.max(l);
    }
    if let Some(h) = g.hop {
        cfg.window.hop = h;
    }
    if let Some(t) = g.threshold {
        cfg.thresholds.twd_fault = t;
    }
    cfg.window.validate()?;
    cfg.thresholds.validate()?;
    Ok(cfg)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let cfg = load_config(g)?;
    match cli.command {
        Command::Synth {
            fault,
            start,
            duration,
            snr,
            output,
        } => {
            let mut spec = parse_fault(&fault, cfg.fault)?;
            spec.start = start.unwrap_or(spec.start);
            spec.duration = duration.unwrap_or(spec.duration);
            let mut rec = synth_healthy(&cfg.signal)?;
            if spec.is_fault() {
                rec = inject_fault(&rec, &spec)?;
            }
            if let Some(snr) = snr {
                rec = add_noise(&rec, snr, g.seed)?;
            }
            ensure_dir(&g.out_dir)?;
            let path = g.out_dir.join(output);
            io::write_record(&rec, &path)?;
            println!("{}", path.display());
        }
        Command::Analyze { record } => {
            let rec = io::read_record(&record)?;
            let (tracks, tfrs) = vsi_fault::features::extract_with(
                &rec,
                &cfg.window,
                vsi_fault::features::DEFAULT_H_MAX,
            )?;
            let summary = vsi_fault::summarize(&tracks, cfg.thresholds.twd_fault)?;
            ensure_dir(&g.out_dir)?;
            let stem = record
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("record")
                .to_string();
            for path in io::write_tracks(&tracks, &g.out_dir, &stem)? {
                println!("{}", path.display());
            }
            for (p, tfr) in Phase::ALL.iter().zip(&tfrs) {
                let path = g.out_dir.join(format!("{stem}_tfr_{}.csv", p.key()));
                io::write_tfr(tfr, &path)?;
                println!("{}", path.display());
            }
            let path = g.out_dir.join(format!("{stem}_summary.json"));
            io::write_summary(&summary, &path)?;
            println!("{}", path.display());
        }
        Command::Diagnose { record } => {
            let rec = io::read_record(&record)?;
            let d = diagnose(&rec, &cfg.window, &cfg.thresholds)?;
            println!("{}", serde_json::to_string_pretty(&d)?);
        }
        Command::Bench { per_class, nominal } => {
            let mut spec = if nominal {
                CorpusSpec::nominal()
            } else {
                CorpusSpec::default()
            };
            spec.seed = g.seed;
            spec.signal = cfg.signal;
            spec.fault = cfg.fault;
            if let Some(n) = per_class {
                spec.per_class = n;
            }
            let corpus = gen_corpus(&spec)?;
            let report = evaluate(&corpus, &cfg.window, &cfg.thresholds)?;
            ensure_dir(&g.out_dir)?;
            io::export_report(&report, &g.out_dir)?;
            print!("{}", report.to_table());
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
