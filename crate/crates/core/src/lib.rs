//! Simulation engine for physical-layer-secure transmission in a two-tier
//! UAV network.
//!
//! The network consists of UAV transmitters (UTs) that collect sensing data,
//! UAV receivers (URs) that aggregate it, and UAV eavesdroppers (UEs) that
//! try to overhear. Securing every UT-UR link is organised as two sequential
//! games:
//!
//! 1. **Association** ([`matching`]): a many-to-one matching of UTs to URs
//!    under per-UR quotas, driven by secrecy-rate preferences on the UT side
//!    and throughput preferences on the UR side, stabilised by swap
//!    operations until pairwise stable.
//! 2. **Cooperative transmission** ([`coalition`]): an overlapping coalition
//!    formation over the UTs. Members of a UT's group act as its
//!    decode-and-forward relays and jointly null-steer their beam so that
//!    all eavesdroppers receive nothing ([`beamforming`]).
//!
//! [`harness`] runs seeded Monte-Carlo experiments over random deployments
//! and aggregates per-scheme metrics; [`verify`] hosts the randomized
//! invariant suites behind the CLI `verify` subcommand.
//!
//! All randomness flows through explicitly seeded ChaCha12 generators with a
//! documented seed-splitting rule ([`rng`]), so every result is reproducible
//! bit-for-bit from a single master seed.

pub mod beamforming;
pub mod channel;
pub mod coalition;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod matching;
pub mod params;
pub mod rng;
pub mod units;
pub mod utility;
pub mod verify;

pub use channel::{realize_channels, snr, ChannelSet, ComplexGain};
pub use error::{Error, Result};
pub use geometry::{distance, sample_scenario, DeploymentRegion, Position3D, Scenario};
pub use params::PhysicalParams;
pub use utility::Utility;
