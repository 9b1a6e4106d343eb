//! Gaussian quantum discord of two-mode states and its remote transfer through
//! homodyne detection and classical feedforward.
//!
//! * [`gaussian`]: covariance matrices, beam splitters, loss, feedforward.
//! * [`discord`]: discord, mutual information and classical correlation.
//! * [`protocol`]: input states, closed-form and simulated transfer outputs.
//! * [`optimize`]: grid + golden-section maximizers for gains, squeezing,
//!   ancilla noise and attenuation.
//! * [`montecarlo`]: seeded sampling oracle for the protocol.
//! * [`sweep`] and [`figures`]: parameter sweeps and figure definitions.
//!
//! Data-parallel loops run on rayon when the `parallel` feature (default) is
//! enabled; see [`Execution`].

pub mod discord;
pub mod error;
pub mod exec;
pub mod figures;
pub mod gaussian;
pub mod montecarlo;
pub mod optimize;
pub mod protocol;
pub mod sweep;

pub use discord::{gaussian_discord, ppt_min_eigenvalue, Branch, DiscordBreakdown, SymplecticInvariants};
pub use error::{Error, Result};
pub use exec::Execution;
pub use gaussian::{MultimodeGaussianState, QuadratureLinearMap, TwoModeCovariance};
pub use optimize::Optimum;
pub use protocol::{Ancilla, Efficiencies, TransferScenario};
