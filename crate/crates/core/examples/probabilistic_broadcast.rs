//! Broadcast over partially entangled links; receivers filter and sometimes
//! fail.

use qbroadcast::metrics::{receiver_fidelities, BranchFilter};
use qbroadcast::protocol::{run_probabilistic_broadcast, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let target = KnownQubit::real_polar(1.0);
    let links = [(0.8, 0.6), (0.9, 0.9f64.mul_add(-0.9, 1.0).sqrt())];
    let t = run_probabilistic_broadcast(&target, &links, None)?;
    println!("success probability {:.6}", t.success_probability);
    for (all, ok) in receiver_fidelities(&t, &target, BranchFilter::All)?
        .iter()
        .zip(receiver_fidelities(&t, &target, BranchFilter::SuccessOnly)?)
    {
        println!(
            "{}: average {:.6}, on success {:.12}",
            all.slot.receiver, all.average, ok.average
        );
    }
    Ok(())
}
