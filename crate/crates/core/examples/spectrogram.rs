//! STFT of a faulty phase current: prints the dominant harmonic amplitudes
//! before, during and after an open-circuit fault, and optionally writes the
//! full magnitude matrix.
//!
//! ```bash
//! cargo run --example spectrogram -- /tmp/tfr.csv
//! ```

use vsi_fault::{harmonic_track, inject_fault, io, stft, synth_healthy};
use vsi_fault::{FaultSpec, Phase, SignalConfig, SwitchId, WindowSpec};

fn main() -> vsi_fault::Result<()> {
    let cfg = SignalConfig::default();
    let rec = inject_fault(&synth_healthy(&cfg)?, &FaultSpec::open(SwitchId::S1))?;
    let window = WindowSpec::default();
    let tfr = stft(rec.phase(Phase::A), rec.sample_rate(), &window)?;
    println!(
        "{} frames x {} bins, {:.1} Hz per bin, hop {:.1} ms",
        tfr.num_frames(),
        tfr.num_bins(),
        tfr.bin_spacing(),
        1e3 * window.hop_seconds(cfg.sample_rate)
    );

    let tracks: Vec<Vec<f64>> = (1..=4)
        .map(|h| harmonic_track(&tfr, cfg.fundamental, h))
        .collect::<Result<_, _>>()?;
    println!("  t [ms]   I1      I2      I3      I4   (RMS, A)");
    for k in (0..tfr.num_frames()).step_by(25) {
        print!("{:7.1}", 1e3 * tfr.frame_times()[k]);
        for t in &tracks {
            print!("  {:.4}", t[k]);
        }
        println!();
    }

    if let Some(path) = std::env::args().nth(1) {
        io::write_tfr(&tfr, &path)?;
        println!("wrote {path}");
    }
    Ok(())
}
