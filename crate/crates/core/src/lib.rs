//! Pseudo-spectral time integrators for the periodic Korteweg-de Vries equation
//!
//! ```text
//! ∂t u + ∂x³ u = ½ ∂x (u²),   x ∈ T = [0, 2π)
//! ```
//!
//! The crate provides three one-step maps on a Fourier grid:
//!
//! * [`Scheme::Lri2`]: the explicit second-order low-regularity exponential
//!   integrator. It integrates the resonant phases of the twisted Duhamel
//!   formula exactly, so second order holds for `H^{γ+4}` data.
//! * [`Scheme::Lri1`]: its first-order ancestor.
//! * [`Scheme::Strang`]: Strang splitting of the free Airy flow and an exact
//!   (characteristics + Newton) inviscid Burgers flow.
//!
//! Supporting modules hold brute-force oracles used to verify the fast
//! schemes ([`oracles`]) and experiment drivers that measure convergence
//! orders on rough random data ([`harness`]).

pub mod error;
pub mod harness;
pub mod oracles;
pub mod schemes;
pub mod spectral;

pub use error::{Error, Result};
pub use harness::{ConvergenceReport, DataDescriptor, RoughDataSpec};
pub use schemes::{evolve, Scheme, SchemeConfig, SolverState};
pub use spectral::{Dealias, Field, SobolevIndex, SpectralGrid};
