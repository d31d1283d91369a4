//! Momentum-space kinetic solver for doublon and holon distributions of
//! the Fermi-Hubbard model in its Mott-insulating phase.
//!
//! The evolved state holds the particle (`+`) and hole (`-`) occupations
//! `f^a_{k,s}` on a periodic hypercubic momentum grid. Three collision
//! integrals are available: strong coupling, weak coupling and a general
//! form built from the full rotation between on-site and band bases.

pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod observables;
pub mod oracle;
pub mod scenarios;
pub mod spectrum;
pub mod state;

pub use error::{Error, Result};
pub use kernels::{
    default_eta, delta_broadened, general_rhs, rhs, strong_rhs, weak_rhs, Channel, ChannelSet,
    KernelConfig, Potential, Regime, RhsEvaluator, RhsField,
};
pub use lattice::{build_grid, dispersion, ModelParams, MomentumGrid};
pub use spectrum::{Band, Ordering, SpectralTable};
pub use state::{DistributionState, Spin};
