//! End-to-end diagnosis of all twelve fault classes at 30 dB SNR, with the
//! record round-tripped through the CSV format.
//!
//! ```bash
//! cargo run --release --example diagnose_pipeline
//! ```

use vsi_fault::{add_noise, diagnose, inject_fault, io, synth_healthy};
use vsi_fault::{FaultSpec, Label, SignalConfig, Thresholds, WindowSpec};

fn main() -> vsi_fault::Result<()> {
    let dir = std::env::temp_dir().join("vsi_fault_pipeline");
    std::fs::create_dir_all(&dir).map_err(|e| vsi_fault::Error::Input(e.to_string()))?;
    let healthy = synth_healthy(&SignalConfig::default())?;
    let (window, thr) = (WindowSpec::default(), Thresholds::default());

    for (i, truth) in Label::fault_classes().into_iter().enumerate() {
        let sw = truth.switch().expect("fault class");
        let fault = match truth {
            Label::Open(_) => FaultSpec::open(sw),
            _ => FaultSpec::short(sw),
        };
        let rec = add_noise(&inject_fault(&healthy, &fault)?, 30.0, i as u64)?;
        let path = dir.join(format!("rec_{i:02}.csv"));
        io::write_record(&rec, &path)?;
        let d = diagnose(&io::read_record(&path)?, &window, &thr)?;
        println!(
            "{truth:>9}  ->  {:>9}  code {}  td {:5.1} ms  {}",
            d.label,
            d.code,
            1e3 * d.td_fault,
            if d.label == truth { "ok" } else { "MISS" }
        );
    }
    Ok(())
}
