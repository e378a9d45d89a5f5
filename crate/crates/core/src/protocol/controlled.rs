use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::broadcast::{link_piece, BroadcastMode, Link};
use super::engine::product;
use super::transcript::Transcript;
use super::KnownQubit;
use crate::channels::{BellKind, PartyId};
use crate::noise::NoiseSpec;
use crate::{Error, Result};

/// A controller secretly picks one Bell state per link. Until the choice is
/// disclosed, receivers can only average over it.
#[derive(Debug, Clone)]
pub struct ControlledSession {
    target: KnownQubit,
    mode: BroadcastMode,
    kinds: Vec<BellKind>,
    noise: Option<NoiseSpec>,
}

impl ControlledSession {
    /// Draws one Bell state per receiver, uniformly, from a generator seeded
    /// with `seed`.
    pub fn new(target: KnownQubit, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("at least one receiver is required".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kinds = (0..m).map(|_| BellKind::ALL[rng.random_range(0..4)]).collect();
        Ok(Self {
            target,
            mode: BroadcastMode::for_class(target.class()),
            kinds,
            noise: None,
        })
    }

    pub fn with_noise(mut self, noise: Option<NoiseSpec>) -> Self {
        self.noise = noise;
        self
    }

    /// The controller's secret, one entry per receiver.
    pub fn kinds(&self) -> &[BellKind] {
        &self.kinds
    }

    pub fn mode(&self) -> BroadcastMode {
        self.mode
    }

    /// Runs the broadcast. Without disclosure each link is, from the
    /// receivers' point of view, the uniform Bell mixture; with it, each
    /// receiver folds the announced Pauli into its correction.
    pub fn run(&self, disclose: bool) -> Result<Transcript> {
        let noise = self.noise.as_ref();
        let pieces = self
            .kinds
            .iter()
            .enumerate()
            .map(|(i, &kind)| {
                let (link, disclosed) = if disclose {
                    (Link::Bell(kind), Some(kind))
                } else {
                    (Link::Secret, None)
                };
                link_piece(
                    &self.target,
                    self.mode,
                    link,
                    PartyId::Sender(1),
                    PartyId::Receiver(i + 1),
                    disclosed,
                    noise,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let m = self.kinds.len();
        let mut t = Transcript::new("controlled", product(pieces), m, 2 * m);
        if !disclose {
            for b in &mut t.branches {
                b.success = false;
            }
            t.success_probability = 0.0;
        }
        Ok(t)
    }
}

/// Noiseless controlled broadcast: one session, run once.
pub fn run_controlled_broadcast(target: &KnownQubit, m: usize, disclose: bool, seed: u64) -> Result<Transcript> {
    ControlledSession::new(*target, m, seed)?.run(disclose)
}
