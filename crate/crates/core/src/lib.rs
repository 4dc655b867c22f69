//! Concurrent encryption and authentication for wireless links built on
//! compressed sensing.
//!
//! Both ends of a link derive the same measurement matrix from shared channel
//! gains ([`key_schedule`]). The transmitter compresses a sparse signal with
//! that matrix, hides authentication tags at matrix-determined positions of
//! the measurement vector ([`tagcrypt`]) and sends it over a fading MIMO link
//! ([`phy_channel`]). The receiver splits tags from data, authenticates the
//! sender and recovers the signal with orthogonal matching pursuit
//! ([`cs_core`]). [`experiments`] drives the whole chain in Monte Carlo sweeps.

pub mod cs_core;
pub mod error;
pub mod experiments;
pub mod format;
pub mod key_schedule;
pub mod phy_channel;
pub mod tagcrypt;

pub use cs_core::{MeasurementVector, RecoveryReport, SparseBasis, SparseSignal};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, SweepAxis, SweepResult, TrialOutcome};
pub use key_schedule::{ChannelGains, MeasurementMatrix, ShiftStrategy};
pub use phy_channel::{ChannelConfig, QuantizerSpec};
pub use tagcrypt::{AuthDecision, AuthThresholds, TagIndex, TagValues, TaggedMessage};
