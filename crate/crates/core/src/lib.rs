//! Link-level simulation of large multi-user MIMO arrays under pure
//! line-of-sight propagation.
//!
//! The crate answers one family of questions: given a base station with M
//! antennas serving K single-antenna terminals on the same time-frequency
//! resource, with free-space propagation, perfect channel knowledge,
//! zero-forcing processing, and max-min fair power control, what SINR does
//! every terminal get, and how does that depend on the carrier frequency,
//! the array shape, and M?
//!
//! Pipeline per Monte-Carlo realization:
//!
//! 1. [`geometry`] builds the array and draws terminal positions.
//! 2. [`channel`] turns geometry into a deterministic complex channel matrix.
//! 3. [`zf_core`] computes the Gram matrix and the zero-forcing gains.
//! 4. [`power_control`] solves the max-min SINR allocation (closed form for
//!    one cell, bisection over a fixed point for coupled cells).
//! 5. [`montecarlo`] repeats over seeded placements, builds CDFs, and
//!    searches for the smallest M that meets an SINR target.
//!
//! [`bandwidth`] is a standalone Shannon-capacity calculator for the
//! bandwidth-versus-power side of the story, and [`config`] holds the
//! scenario parameter set shared by the CLI and the library.

pub mod bandwidth;
pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod power_control;
pub mod zf_core;

pub use channel::{AmplitudeMode, ChannelMatrix, NoiseModel};
pub use config::{Layout, ScenarioConfig};
pub use error::Error;
pub use geometry::{ArrayLayout, ArrayShape, CellLayout, TerminalPlacement};
pub use montecarlo::{CdfSummary, Link, SearchResult, TrialsOutput};
pub use power_control::{Binding, PowerAllocation};
pub use zf_core::{ZfDiagnostics, ZfPrecoders};
