//! Heat kernels for the Zaremba (mixed Dirichlet/Neumann) boundary value
//! problem, and the machinery needed to verify their small-time trace
//! coefficients numerically.
//!
//! The library is organised around the model problem on the half-plane wedge
//! of opening π, where the boundary condition jumps from Dirichlet (θ = π/2)
//! to Neumann (θ = −π/2) across the codimension-2 interface at ρ = 0:
//!
//! * [`numerics`] — adaptive quadrature, bracketed root finding, and weighted
//!   least-squares fitting of power-law expansions;
//! * [`specfun`] — error-function family (including the scaled complement
//!   `erfcx`), Bessel J of integer and half-integer order, scaled modified
//!   Bessel I of half-integer order, and certified Bessel-zero enumeration;
//! * [`halfline`] — 1D heat kernels on the half-axis (free, Dirichlet,
//!   Neumann, Robin);
//! * [`wedge`] — the mixed kernel Ψ on the wedge: angular/radial modes, the
//!   Ω summation and its closed form, the full leading parametrix, its
//!   diagonal, and the strip-trace integral near the interface;
//! * [`coeffs`] — evaluators for the published heat-trace coefficients
//!   (interior, codimension-1, codimension-2) and sector predictions;
//! * [`spectra`] — an exact spectral brute-force oracle on flat disk sectors
//!   (eigenvalues are squared Bessel zeros) used to verify the wedge
//!   analytics independently;
//! * [`verify`] — the acceptance-check battery shared by the CLI and the
//!   integration tests;
//! * [`cli`] — the batch command-line front end (`kernel`, `trace`, `fit`,
//!   `verify`).
//!
//! Every kernel that multiplies a Gaussian by an exponentially growing
//! special function (`exp` × `erfc`, `exp` × `I_ν`) is assembled in scaled
//! form, so the t → 0 regime probed by the verification suites does not
//! overflow.

pub mod cli;
pub mod coeffs;
pub mod halfline;
pub mod numerics;
pub mod specfun;
pub mod spectra;
pub mod verify;
pub mod wedge;

// TEMP pub use coeffs::{Bc, GeometryData};
pub use numerics::{AsymptoticFit, QuadratureSpec};
// TEMP pub use spectra::{HeatTraceSample, SectorSpec};
// TEMP pub use wedge::{PolarPoint, VertexCondition, WedgeConfig};
