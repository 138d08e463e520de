//! Collision-model simulation of heat flow between a multipartite spin system
//! and a thermal reservoir, with coherence between degenerate levels of the
//! system as the control knob.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! numerics; file formats, configuration and the command-line runner live in
//! the companion `heatflow` crate.
//!
//! Layout:
//!
//!  - [`linalg`]: dense complex matrices, tensor products, partial traces,
//!    Hermitian eigendecomposition and the spectral functions built on it.
//!  - [`model`]: spin Hamiltonians, thermal states, coherence injection,
//!    dephasing and Bohr-frequency mode decomposition.
//!  - [`collision`]: the repeated-interaction engine (cascade and
//!    simultaneous variants) with bath refresh.
//!  - [`thermo`]: energies, heat, free energy, information measures,
//!    apparent temperatures and the resource-inequality auditor.
//!  - [`lindblad`]: the cascaded master equation, an RK4 integrator and the
//!    analytic heat currents.
//!  - [`toys`]: closed-form few-level models used as independent oracles.
//!
//! Units: energies in the level spacing δ, times in 1/δ, `k_B = 1`,
//! entropies in nats.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod collision;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod model;
pub mod thermo;
pub mod toys;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, HermitianOperator, Spectrum, C64};
