//! Synthesize a healthy record, inject an open and a short fault, add noise
//! and print per-phase RMS and mean inside the fault window.
//!
//! ```bash
//! cargo run --example healthy_and_faulty
//! ```

use vsi_fault::{add_noise, inject_fault, synth_healthy, FaultSpec, Phase, SignalConfig, SwitchId};

fn stats(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    (rms, mean)
}

fn main() -> vsi_fault::Result<()> {
    let cfg = SignalConfig::default();
    let healthy = synth_healthy(&cfg)?;

    let faults = [
        ("healthy", FaultSpec::none()),
        ("open S5", FaultSpec::open(SwitchId::S5)),
        ("short S2", FaultSpec::short(SwitchId::S2)),
    ];
    // three full periods inside the default 195..255 ms window
    let (n0, n1) = (1950, 2450);
    for (name, fault) in faults {
        let rec = if fault.is_fault() {
            inject_fault(&healthy, &fault)?
        } else {
            healthy.clone()
        };
        let rec = add_noise(&rec, 40.0, 7)?;
        println!("{name}:");
        for p in Phase::ALL {
            let (rms, mean) = stats(&rec.phase(p)[n0..n1]);
            println!("  phase {p}: rms {rms:.3} A, mean {mean:+.3} A");
        }
    }
    Ok(())
}
