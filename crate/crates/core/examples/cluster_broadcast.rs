//! Broadcast a real qubit to two receivers from one four-qubit cluster state.

use qbroadcast::metrics::{receiver_fidelities, BranchFilter};
use qbroadcast::protocol::{cluster_basis, run_cluster_broadcast, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let target = KnownQubit::real_polar(0.6);
    for (k, v) in cluster_basis(target.alpha(), target.beta())?.iter().enumerate() {
        let amps: Vec<String> = v.amplitudes().iter().map(|a| format!("{:+.3}", a.re)).collect();
        println!("basis {k}: [{}]", amps.join(", "));
    }
    let t = run_cluster_broadcast(&target, None)?;
    for b in &t.branches {
        let frames: Vec<String> = b
            .corrections
            .iter()
            .map(|c| format!("{}:{}", c.party, c.pauli))
            .collect();
        println!(
            "outcome {}  p = {:.4}  {}",
            b.outcome_bits(),
            b.probability,
            frames.join(" ")
        );
    }
    for r in receiver_fidelities(&t, &target, BranchFilter::All)? {
        println!("{}: fidelity {:.12}", r.slot.receiver, r.average);
    }
    Ok(())
}
