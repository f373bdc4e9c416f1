//! Feature tracks of a short-circuit fault and the fault-window summary.
//!
//! ```bash
//! cargo run --example feature_tracks
//! ```

use vsi_fault::{extract, inject_fault, summarize, synth_healthy};
use vsi_fault::{FaultSpec, Phase, SignalConfig, SwitchId, WindowSpec};

fn main() -> vsi_fault::Result<()> {
    let rec = inject_fault(
        &synth_healthy(&SignalConfig::default())?,
        &FaultSpec::short(SwitchId::S2),
    )?;
    let tracks = extract(&rec, &WindowSpec::default())?;
    let a = tracks.phase(Phase::A);
    println!("phase A  t[ms]  irms   ifund  iave    thd    tnhd   twd");
    for k in (0..a.len()).step_by(20) {
        println!(
            "       {:6.1}  {:.3}  {:.3}  {:+.3}  {:.3}  {:.3}  {:.3}",
            1e3 * tracks.frame_times[k],
            a.i_rms[k],
            a.i_fund[k],
            a.i_ave[k],
            a.thd[k],
            a.tnhd[k],
            a.twd[k]
        );
    }

    let summary = summarize(&tracks, 0.05)?;
    for p in Phase::ALL {
        let s = summary.phase(p);
        println!(
            "phase {p}: td_fault {:5.1} ms, irms {:.3}, iave {:+.3}, thd {:.3}, tnhd {:.3}",
            1e3 * s.td_fault,
            s.i_rms_mean,
            s.i_ave_mean,
            s.thd_mean,
            s.tnhd_mean
        );
    }
    Ok(())
}
