//! Athermality, signalling and joint resource measures of finite-dimensional quantum
//! channels relative to Gibbs-preserving free operations.
//!
//! The dense kernel ([`qmat`]), channel representations ([`channels`]), thermal states
//! ([`thermo`]) and closed-form measures are generic over [`Real`] (`f32` or `f64`).
//! Quantities that need an SDP ([`sdp`]), the verification suites ([`verify`]) and
//! file I/O ([`io`]) work in `f64`.

pub mod channels;
pub mod error;
pub mod io;
pub mod measures;
pub mod qmat;
pub mod scalar;
pub mod sdp;
pub mod superops;
pub mod thermo;
pub mod verify;

pub use channels::QuantumChannel;
pub use error::{Error, Result};
pub use io::{ChannelJson, ChannelSpec};
pub use measures::{resource_report, ResourceReport};
pub use qmat::CMatrix;
pub use scalar::Real;
pub use sdp::{SdpOptions, SdpSolution, SdpStatus};
pub use superops::ControlQubitSpec;
pub use thermo::ThermalState;
pub use verify::{Grid, Suite, TheoremReport, VerifyConfig};

/// Double-precision complex matrix.
pub type CMat = CMatrix<f64>;
/// Double-precision channel.
pub type Channel = QuantumChannel<f64>;
/// Double-precision Gibbs state.
pub type Thermal = ThermalState<f64>;
