//! Noise on the travelling qubits versus noise after every gate.

use qbroadcast::metrics::{receiver_fidelities, BranchFilter};
use qbroadcast::noise::{NoiseKind, NoiseSpec};
use qbroadcast::protocol::{run_bell_rsp_broadcast, run_cluster_broadcast, BroadcastMode, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let target = KnownQubit::real_polar(0.4);
    for kind in NoiseKind::STANDARD {
        let channel = kind.channel(0.1)?;
        for spec in [
            NoiseSpec::transmitted(channel.clone()),
            NoiseSpec::per_gate(channel.clone()),
        ] {
            let bell = run_bell_rsp_broadcast(&target, 2, BroadcastMode::Rsp, Some(&spec))?;
            let cluster = run_cluster_broadcast(&target, Some(&spec))?;
            let f =
                |t| -> qbroadcast::Result<f64> { Ok(receiver_fidelities(t, &target, BranchFilter::All)?[0].average) };
            println!(
                "{:<18} {:<18} bell {:.6}  cluster {:.6}",
                kind.name(),
                spec.mode.name(),
                f(&bell)?,
                f(&cluster)?
            );
        }
    }
    Ok(())
}
