//! Exact verification of local distinguishability, orthogonality-preserving
//! measurements and nonlocality activation for small multipartite sets of
//! orthogonal pure states.

pub mod activation;
pub mod algebra;
pub mod cli;
pub mod diagram;
pub mod ket;
pub mod measure;
pub mod opsolve;
pub mod protocol;
pub mod states;
pub mod fixtures;
pub mod theorems;
