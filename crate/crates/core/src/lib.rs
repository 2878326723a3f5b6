//! Entanglement dynamics of two cavity photons dissipating into two
//! independent reservoirs, under local unitary modulation of the initial
//! state.
//!
//! The crate is organized around the four-qubit effective picture
//! (cavity 1, reservoir 1, cavity 2, reservoir 2):
//!
//! - [`qmath`]: dense complex linear algebra at small dimensions
//!   (Kronecker products, partial traces, a Jacobi eigensolver).
//! - [`states`]: the effective output state under an `Ry(gamma)`
//!   rotation, arbitrary two-cavity initial states, and the exact
//!   (unreduced) local-unitary modulation.
//! - [`measures`]: Wootters concurrence, linear-entropy tangles, block
//!   and qubit-block entanglement, three-tangle decompositions and the
//!   aggregated [`measures::EntanglementReport`].
//! - [`dynamics`]: closed-form concurrence curves, sudden-death and
//!   sudden-birth times, critical rotation angles, plateau geometry and
//!   grid scans, each validated against the state-vector oracle.
//! - [`reservoir`]: exact finite-N single-excitation simulation backing
//!   the flat-spectrum amplitude approximation.
//! - [`checks`]: seeded invariant suites across all of the above.
//!
//! Grid scans and sampled checks run data-parallel under the `parallel`
//! feature (enabled by default); disabling it leaves a sequential build
//! with identical results.

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod qmath;
pub mod reservoir;
pub mod states;

pub use error::{Error, Result};
