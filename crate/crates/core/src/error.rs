//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad key, bad value, or a violated invariant.
    #[error("config error: {0}")]
    Config(String),

    /// Numerical domain violation (nonpositive distance, out-of-range
    /// percentile, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The channel Gram matrix is rank deficient; `index` is the Cholesky
    /// pivot that fell below tolerance. The Monte-Carlo layer treats this as
    /// a redrawable degenerate placement.
    #[error("singular channel: Gram pivot {index} below tolerance")]
    SingularChannel { index: usize },

    /// Antenna search exhausted its upper bound without meeting the target.
    #[error("target {target_db} dB unattainable with at most {m_max} antennas")]
    TargetUnattainable { target_db: f64, m_max: usize },

    /// Too many degenerate placements: the scenario itself is suspect.
    #[error("degenerate placements exceeded 1% of trials ({redraws} redraws in {n_trials} trials)")]
    DegenerateAbort { redraws: usize, n_trials: usize },

    /// Max-min SINR has no finite optimum (zero noise and zero coupling).
    #[error("max-min SINR is unbounded: zero noise and zero interference")]
    UnboundedSinr,
}
