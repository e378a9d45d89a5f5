use std::collections::BTreeMap;

use super::broadcast::{link_piece, BroadcastMode, Link};
use super::engine::product;
use super::transcript::Transcript;
use super::KnownQubit;
use crate::channels::{bell, channel_multidirectional, ordered_pairs, BellKind, PartyId};
use crate::noise::NoiseSpec;
use crate::{Error, Result};

/// Every party sends its own state to every other party, one Bell pair per
/// ordered pair `(i, j)`. Directions run independently in lexicographic
/// order; general targets go by teleportation, the others by one-bit
/// preparation. Outputs are labelled `(Sender(i), Receiver(j))`.
pub fn run_multidirectional(
    n: usize,
    targets: &BTreeMap<(usize, usize), KnownQubit>,
    noise: Option<&NoiseSpec>,
) -> Result<Transcript> {
    let links: BTreeMap<_, _> = targets.keys().map(|&k| (k, bell(BellKind::PhiPlus))).collect();
    let channel = channel_multidirectional(n, &links)?;
    let pairs = ordered_pairs(n);
    let pieces = pairs
        .iter()
        .map(|&(i, j)| {
            let target = targets
                .get(&(i, j))
                .ok_or_else(|| Error::InvalidArgument(format!("no target for direction ({i}, {j})")))?;
            link_piece(
                target,
                BroadcastMode::for_class(target.class()),
                Link::PHI_PLUS,
                PartyId::Sender(i),
                PartyId::Receiver(j),
                None,
                noise,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Transcript::new(
        "multidirectional",
        product(pieces),
        pairs.len(),
        channel.n_qubits(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run_bell_rsp_broadcast;
    use crate::tensor::max_abs_diff;

    fn uniform(n: usize, q: KnownQubit) -> BTreeMap<(usize, usize), KnownQubit> {
        ordered_pairs(n).into_iter().map(|p| (p, q)).collect()
    }

    #[test]
    fn three_parties() {
        let t = run_multidirectional(3, &uniform(3, KnownQubit::real_polar(0.0)), None).unwrap();
        assert_eq!(t.bell_pairs, 6);
        assert_eq!(t.channel_qubits, 12);
        assert_eq!(t.slots().len(), 6);
        for b in &t.branches {
            for (_, rho) in &b.outputs {
                assert!((rho.entry(0, 0).re - 1.0).abs() < 1e-12);
            }
        }
        assert!((t.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_parties_factorize() {
        let (a, b) = (KnownQubit::real_polar(0.3), KnownQubit::real_polar(1.2));
        let targets: BTreeMap<_, _> = [((1, 2), a), ((2, 1), b)].into_iter().collect();
        let t = run_multidirectional(2, &targets, None).unwrap();
        let ta = run_bell_rsp_broadcast(&a, 1, BroadcastMode::Rsp, None).unwrap();
        let tb = run_bell_rsp_broadcast(&b, 1, BroadcastMode::Rsp, None).unwrap();
        assert_eq!(t.branches.len(), ta.branches.len() * tb.branches.len());
        for (k, branch) in t.branches.iter().enumerate() {
            let (x, y) = (&ta.branches[k / 2], &tb.branches[k % 2]);
            assert!((branch.probability - x.probability * y.probability).abs() < 1e-12);
            assert!(max_abs_diff(branch.outputs[0].1.matrix(), x.outputs[0].1.matrix()) < 1e-12);
            assert!(max_abs_diff(branch.outputs[1].1.matrix(), y.outputs[0].1.matrix()) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(run_multidirectional(1, &BTreeMap::new(), None).is_err());
        let mut targets = uniform(3, KnownQubit::real_polar(0.1));
        targets.remove(&(3, 1));
        assert!(run_multidirectional(3, &targets, None).is_err());
    }
}
