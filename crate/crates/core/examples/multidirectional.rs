//! Every party sends its own qubit to every other party.

use std::collections::BTreeMap;

use qbroadcast::channels::ordered_pairs;
use qbroadcast::metrics::{receiver_fidelities_with, BranchFilter};
use qbroadcast::protocol::{run_multidirectional, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let n = 3;
    let targets: BTreeMap<_, _> = ordered_pairs(n)
        .into_iter()
        .map(|(s, r)| ((s, r), KnownQubit::real_polar(0.2 * (s + 2 * r) as f64)))
        .collect();
    let t = run_multidirectional(n, &targets, None)?;
    println!("{} Bell pairs, {} branches", t.bell_pairs, t.branches.len());
    let per = receiver_fidelities_with(&t, BranchFilter::All, |slot| {
        let key = match (slot.sender, slot.receiver) {
            (qbroadcast::channels::PartyId::Sender(s), qbroadcast::channels::PartyId::Receiver(r)) => (s, r),
            _ => unreachable!("multidirectional slots pair a sender with a receiver"),
        };
        targets[&key].state()
    })?;
    for r in per {
        println!("{} -> {}: fidelity {:.12}", r.slot.sender, r.slot.receiver, r.average);
    }
    Ok(())
}
