//! Exact statevector simulation of quantum algorithms built from interference
//! and phase kick-back.
//!
//! Every algorithm here follows the same pattern: a Hadamard or Fourier
//! transform opens a superposition of computational paths, a controlled
//! function evaluation kicks phases back onto the control register, and a
//! second transform recombines the paths so the phases can be read out.
//!
//! * [`state`] holds the amplitude array and the gate kernels.
//! * [`gates`] builds the standard gates and oracle adapters.
//! * [`qft`] is the quantum Fourier transform network and its DFT reference.
//! * [`phase_estimation`] turns controlled powers of a unitary into an
//!   n-bit estimate of an eigenphase.
//! * [`number_theory`] is the exact classical post-processing for order finding.
//! * [`algorithms`] assembles the pieces: Mach-Zehnder, Deutsch, order finding
//!   and factoring, hidden subgroups over Z₂ⁿ, Grover counting and search.
//! * [`cli`] is the command-line front end with JSON reports.
//!
//! Qubit `i` is bit `i` of a basis index, so `x = Σ x_i 2^i`.

pub mod algorithms;
pub mod cli;
pub mod error;
pub mod gates;
pub mod number_theory;
pub mod phase_estimation;
pub mod qft;
pub mod state;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use state::{BasisIndex, Field, MeasurementOutcome, QuantumRegister};
