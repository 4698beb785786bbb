//! Quench dynamics, canonical equilibrium and the ergodicity of local
//! observables in the spin-1/2 XY model in a transverse field.
//!
//! Finite lattices (chain, two-leg ladder, torus) are treated by exact
//! diagonalization in the two parity sectors; the infinite chain by
//! closed-form momentum integrals.

pub mod analytic;
pub mod config;
pub mod dynamics;
pub mod ergodicity;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod observables;
pub mod output;
pub mod pauli;
pub mod quadrature;
pub mod quench;
pub mod runner;
pub mod spectral;

pub use error::{Error, Result};
