//! Uhlmann fidelity between mixed states, and the pure-state shortcut.

use qbroadcast::channels::{bell, BellKind};
use qbroadcast::metrics::{pure_overlap_fidelity, uhlmann_fidelity, uhlmann_fidelity_general};
use qbroadcast::noise::{apply_kraus, NoiseKind};
use qbroadcast::tensor::QubitIndex;

fn main() -> qbroadcast::Result<()> {
    let phi = bell(BellKind::PhiPlus);
    for p in [0.0, 0.1, 0.3] {
        let noisy = apply_kraus(
            &phi.to_density(),
            &NoiseKind::AmplitudeDamping.channel(p)?,
            QubitIndex(1),
        )?;
        let dephased = apply_kraus(&noisy, &NoiseKind::PhaseDamping.channel(0.2)?, QubitIndex(0))?;
        println!(
            "p = {p}: pure {:.9}  general {:.9}  mixed pair {:.9}",
            pure_overlap_fidelity(&phi, &noisy)?,
            uhlmann_fidelity_general(&phi.to_density(), &noisy)?,
            uhlmann_fidelity(&noisy, &dephased)?
        );
    }
    Ok(())
}
