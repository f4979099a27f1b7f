//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field is out of range or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// Total quota cannot seat every UT (requires sum of quotas >= N).
    #[error("infeasible instance: {seats} seats for {uts} UTs")]
    Infeasible { seats: usize, uts: usize },

    /// Two nodes coincide, so the path-loss channel model is undefined.
    #[error("degenerate geometry: zero distance between {a} and {b}")]
    DegenerateGeometry { a: String, b: String },

    /// The eavesdropper channel matrix is rank deficient.
    #[error("singular projector: eavesdropper channels are rank deficient")]
    SingularProjector,

    /// The receiver channel lies in the eavesdropper span; no null-steering
    /// weight vector has any gain toward the receiver.
    #[error("zero projection: receiver channel lies in the eavesdropper span")]
    ZeroProjection,

    /// Broadcast power is undefined for a group without relays.
    #[error("no relays: group of UT {0} is a singleton")]
    NoRelays(usize),

    /// An iterative algorithm exceeded its round cap.
    #[error("{algorithm} did not converge within {rounds} rounds")]
    NonConvergence { algorithm: &'static str, rounds: usize },

    /// An internal invariant was violated; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
