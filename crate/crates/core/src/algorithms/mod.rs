//! End-to-end pipelines.

pub mod grover;
pub mod hidden_subgroup;
pub mod interference;
pub mod shor;

pub use grover::{
    grover_iterate, grover_search, grover_spectrum, quantum_count, CountingResult, GroverSpectrum,
    HadamardPreparation, SearchResult, StatePreparation,
};
pub use hidden_subgroup::{simon_solve, HiddenSubgroupInstance, SimonResult};
pub use interference::{deutsch, mach_zehnder, DeutschVerdict, Verdict};
pub use shor::{shor_factor, shor_order, FactorReport, OrderResult};
