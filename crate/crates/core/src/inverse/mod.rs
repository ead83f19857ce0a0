//! Forward and inverse spectral problems for fixed-fixed spring–mass chains.

mod chain;
mod jacobi;
mod lanczos;
mod spectrum;

pub use chain::{
    chain_to_jacobi, jacobi_to_chain, reconstruct_chain, ChainReconstruction, SpringMassChain, PERSYMMETRY_TOL,
};
pub use jacobi::{eigen_tridiagonal, EigenDecomposition, JacobiMatrix};
pub use lanczos::{lanczos_reconstruct, persymmetric_weights, WeightVector};
pub use spectrum::{equal_mass_chain_spectrum, string_spectrum, Spectrum};
