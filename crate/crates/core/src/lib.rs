//! Variable-length coding over discrete memoryless channels with noiseless
//! feedback, driven by the extrinsic Jensen-Shannon (EJS) divergence.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root pin the common `f64` instantiations.

pub mod belief;
pub mod divergences;
pub mod dmc;
pub mod encoder;
pub mod error;
mod scalar;
pub mod schemes;
pub mod session;

pub use belief::{Belief, ThresholdParams};
pub use divergences::{DistributionFamily, EjsEstimate, WeightVector};
pub use dmc::{Channel, ChannelConstants, ChannelSpec};
pub use encoder::{Encoder, EncodingFunction, RandomizedEncoder};
pub use error::{Error, Result};
pub use scalar::Real;
pub use schemes::{Scheme, SchemeId};
pub use session::{MonteCarloReport, SessionConfig, SessionTrace, TrueMessage};

pub type Channel64 = Channel<f64>;
pub type Channel32 = Channel<f32>;
pub type ChannelConstants64 = ChannelConstants<f64>;
pub type Belief64 = Belief<f64>;
pub type Belief32 = Belief<f32>;
pub type ThresholdParams64 = ThresholdParams<f64>;
pub type Scheme64 = Scheme<f64>;
pub type SessionConfig64 = SessionConfig<f64>;
pub type SessionTrace64 = SessionTrace<f64>;
pub type MonteCarloReport64 = MonteCarloReport<f64>;
