//! Numerical realization of the integrable structure of the Benjamin–Ono
//! equation on the torus,
//!
//! ```text
//!     ∂t v = H ∂x² v − ∂x(v²),
//! ```
//!
//! built around the Lax operator `L_u = D − T_u` acting on the Hardy space.
//!
//! * [`spectral`]: Fourier/Hardy coefficient fields, Sobolev norms, the Szegő
//!   projector, Hilbert transform and Toeplitz action.
//! * [`lax`]: Galerkin truncation of `L_u`, its eigendecomposition with the
//!   phase-chain normalization, gaps and the generating function.
//! * [`birkhoff`]: the forward Birkhoff (nonlinear Fourier) map, normalizing
//!   constants, frequencies and the Hamiltonian in Birkhoff variables.
//! * [`inverse`]: the finite-gap inverse map `Πu = −zQ'(z)/Q(z)`.
//! * [`flow`]: exact flow by phase rotation and a pseudospectral integrator.
//! * [`illposed`]: the deep-ground-state family and the two-gap divergence
//!   family, with the eigenvalue condition `F(μ, ε, q) = 0`.
//! * [`probes`]: orbital stability, recurrence and norm tracking experiments.

pub mod birkhoff;
pub mod error;
pub mod fft;
pub mod flow;
pub mod illposed;
pub mod inverse;
pub mod io;
pub mod lax;
pub mod probes;
pub mod quadrature;
pub mod random;
pub mod spectral;

pub use num_complex::Complex64 as C64;

pub use birkhoff::{birkhoff_forward, BirkhoffConfig, BirkhoffState, FrequencyVector};
pub use error::{Error, Result};
pub use lax::{LaxConfig, LaxMatrix, LaxSpectrum};
pub use spectral::{HardyField, RealField, SobolevIndex};
