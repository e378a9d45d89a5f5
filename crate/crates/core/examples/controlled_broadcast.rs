//! A controller's secret Bell choices gate the broadcast until disclosed.

use qbroadcast::metrics::{receiver_fidelities, BranchFilter};
use qbroadcast::protocol::{ControlledSession, KnownQubit};

fn main() -> qbroadcast::Result<()> {
    let target = KnownQubit::real_polar(0.5);
    let session = ControlledSession::new(target, 3, 42)?;
    println!("secret: {:?}", session.kinds());
    for disclose in [false, true] {
        let t = session.run(disclose)?;
        let f: Vec<String> = receiver_fidelities(&t, &target, BranchFilter::All)?
            .iter()
            .map(|r| format!("{:.6}", r.average))
            .collect();
        println!("disclosed = {disclose}: fidelities [{}]", f.join(", "));
    }
    Ok(())
}
