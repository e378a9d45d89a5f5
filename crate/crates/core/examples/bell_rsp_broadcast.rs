//! Broadcast an equatorial qubit to three receivers over Bell pairs, one
//! classical bit each.

use std::f64::consts::PI;

use qbroadcast::metrics::{receiver_fidelities, BranchFilter};
use qbroadcast::protocol::{run_bell_rsp_broadcast, BroadcastMode, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let target = KnownQubit::equatorial(PI / 3.0);
    let t = run_bell_rsp_broadcast(&target, 3, BroadcastMode::Rsp, None)?;
    println!("{} branches, {} Bell pairs", t.branches.len(), t.bell_pairs);
    for b in &t.branches {
        let frames: Vec<String> = b
            .corrections
            .iter()
            .map(|c| format!("{}:{}", c.party, c.pauli))
            .collect();
        println!("  {}  p = {:.4}  {}", b.outcome_bits(), b.probability, frames.join(" "));
    }
    for r in receiver_fidelities(&t, &target, BranchFilter::All)? {
        println!("{}: fidelity {:.12}", r.slot.receiver, r.average);
    }
    Ok(())
}
