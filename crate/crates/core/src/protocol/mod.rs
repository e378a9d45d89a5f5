//! Broadcasting protocols as exhaustively enumerated branch trees.
//!
//! Every runner returns a [`Transcript`] listing each measurement history
//! with its probability, the classical messages sent, the Pauli corrections
//! applied, and the reduced state left at each receiver. Nothing is sampled.
//!
//! Protocols whose resource is a product of independent links are simulated
//! link by link and the branch trees are combined as a product, which is
//! exact because neither the gates nor the single-qubit noise couple links.

mod broadcast;
mod controlled;
mod corrections;
mod engine;
mod joint;
mod multidirectional;
mod transcript;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tensor::{c, r, StateVector, C64};

pub use broadcast::{
    cluster_basis, run_bell_rsp_broadcast, run_cluster_broadcast, run_cluster_plus_broadcast,
    run_probabilistic_broadcast, BroadcastMode,
};
pub use controlled::{run_controlled_broadcast, ControlledSession};
pub use corrections::{derive_corrections, CorrectionRule, PauliFrame, ProtocolKind};
pub use joint::{run_joint_broadcast, run_phase_chain};
pub use multidirectional::run_multidirectional;
pub use transcript::{Branch, Correction, Message, Outcome, OutputSlot, Transcript};

/// Coarse family of a known single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetClass {
    RealPolar,
    Equatorial,
    General,
}

impl TargetClass {
    pub fn name(self) -> &'static str {
        match self {
            TargetClass::RealPolar => "real-polar",
            TargetClass::Equatorial => "equatorial",
            TargetClass::General => "general",
        }
    }
}

impl fmt::Display for TargetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `cos θ|0⟩ + e^{iφ} sin θ|1⟩`, known to the sender.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum KnownQubit {
    /// `φ = 0`.
    RealPolar {
        theta: f64,
    },
    /// `θ = π/4`.
    Equatorial {
        phi: f64,
    },
    General {
        theta: f64,
        phi: f64,
    },
}

impl KnownQubit {
    pub fn real_polar(theta: f64) -> Self {
        KnownQubit::RealPolar { theta }
    }

    pub fn equatorial(phi: f64) -> Self {
        KnownQubit::Equatorial { phi }
    }

    pub fn general(theta: f64, phi: f64) -> Self {
        KnownQubit::General { theta, phi }
    }

    pub fn class(&self) -> TargetClass {
        match self {
            KnownQubit::RealPolar { .. } => TargetClass::RealPolar,
            KnownQubit::Equatorial { .. } => TargetClass::Equatorial,
            KnownQubit::General { .. } => TargetClass::General,
        }
    }

    pub fn theta(&self) -> f64 {
        match *self {
            KnownQubit::RealPolar { theta } | KnownQubit::General { theta, .. } => theta,
            KnownQubit::Equatorial { .. } => std::f64::consts::FRAC_PI_4,
        }
    }

    pub fn phi(&self) -> f64 {
        match *self {
            KnownQubit::RealPolar { .. } => 0.0,
            KnownQubit::Equatorial { phi } | KnownQubit::General { phi, .. } => phi,
        }
    }

    pub fn alpha(&self) -> C64 {
        match self {
            KnownQubit::Equatorial { .. } => r(FRAC_1_SQRT_2),
            _ => r(self.theta().cos()),
        }
    }

    pub fn beta(&self) -> C64 {
        match *self {
            KnownQubit::RealPolar { theta } => r(theta.sin()),
            KnownQubit::Equatorial { phi } => C64::from_polar(FRAC_1_SQRT_2, phi),
            KnownQubit::General { theta, phi } => {
                let s = theta.sin();
                c(s * phi.cos(), s * phi.sin())
            }
        }
    }

    pub fn state(&self) -> StateVector {
        StateVector::new(vec![self.alpha(), self.beta()]).expect("two amplitudes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_are_normalized() {
        for q in [
            KnownQubit::real_polar(1.1),
            KnownQubit::equatorial(2.0),
            KnownQubit::general(0.3, -1.7),
        ] {
            assert!((q.alpha().norm_sqr() + q.beta().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn class_invariants() {
        assert_eq!(KnownQubit::real_polar(0.8).beta().im, 0.0);
        let e = KnownQubit::equatorial(0.4);
        assert!((e.alpha().norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((e.beta().norm() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn general_matches_special_cases() {
        let g = KnownQubit::general(0.7, 0.0).state();
        assert!((g.overlap_sqr(&KnownQubit::real_polar(0.7).state()) - 1.0).abs() < 1e-15);
        let g = KnownQubit::general(std::f64::consts::FRAC_PI_4, 1.3).state();
        assert!((g.overlap_sqr(&KnownQubit::equatorial(1.3).state()) - 1.0).abs() < 1e-15);
    }
}
