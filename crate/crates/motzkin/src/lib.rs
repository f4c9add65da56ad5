//! Exact and asymptotic computation engine for s-colored Motzkin spin chains.
//!
//! The crate is organized bottom-up: `walks` enumerates small chains and is
//! the ground-truth oracle for everything else; `combinatorics` counts walks
//! exactly or in extended-precision float mode; `spectrum` builds Schmidt
//! spectra and entanglement entropies; `correlations` evaluates one- and
//! two-point spin correlators; `hamiltonian` constructs and diagonalizes the
//! frustration-free Hamiltonian at small sizes; `cli` wires it all to the
//! `motzkin` binary.

pub mod arith;
pub mod cli;
pub mod combinatorics;
pub mod correlations;
pub mod hamiltonian;
pub mod spectrum;
pub mod walks;
