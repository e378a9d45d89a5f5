//! Two senders, one knowing the amplitude and one the phase, prepare the
//! target jointly; a chain of phase holders extends the idea.

use qbroadcast::metrics::{receiver_fidelities, BranchFilter};
use qbroadcast::protocol::{run_joint_broadcast, run_phase_chain, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let (theta, phi) = (0.7, 2.1);
    let target = KnownQubit::general(theta, phi);
    for adaptive in [true, false] {
        let t = run_joint_broadcast(theta, phi, 2, adaptive, None)?;
        let f = receiver_fidelities(&t, &target, BranchFilter::SuccessOnly)?;
        println!(
            "{}: success {:.4}, fidelity on success {:.12}",
            t.protocol, t.success_probability, f[0].average
        );
    }
    let phases = [0.4, -1.1, 0.9];
    let t = run_phase_chain(theta, &phases, 2, None)?;
    let total = KnownQubit::general(theta, phases.iter().sum());
    let f = receiver_fidelities(&t, &total, BranchFilter::All)?;
    println!("{}: fidelity with the summed phase {:.12}", t.protocol, f[0].average);
    Ok(())
}
