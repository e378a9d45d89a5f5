//! A general qubit: one bit per receiver succeeds only on some outcomes,
//! two bits (teleporting a local copy) always succeed.

use qbroadcast::metrics::{receiver_fidelities, BranchFilter};
use qbroadcast::protocol::{run_bell_rsp_broadcast, BroadcastMode, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let target = KnownQubit::general(0.9, -1.2);
    let one_bit = run_bell_rsp_broadcast(&target, 2, BroadcastMode::Rsp, None)?;
    println!(
        "one bit per receiver: success probability {:.4}",
        one_bit.success_probability
    );
    let t = run_bell_rsp_broadcast(&target, 2, BroadcastMode::Teleport, None)?;
    for (party, bits) in t.cbits_per_receiver() {
        println!("{party}: {bits} classical bits");
    }
    for r in receiver_fidelities(&t, &target, BranchFilter::All)? {
        println!("{}: fidelity {:.12}", r.slot.receiver, r.average);
    }
    Ok(())
}
