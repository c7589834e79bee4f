//! Comparison tolerances shared by the library and its tests.

/// Default tolerance for comparing amplitudes and probabilities.
pub const TOL: f64 = 1e-9;

/// Tolerance for single-gate identities (unitarity, involutions).
pub const STRICT_TOL: f64 = 1e-12;

/// Registers larger than this are refused unless the limit is raised.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Hard ceiling on [`crate::state::set_max_qubits`].
pub const HARD_MAX_QUBITS: usize = 30;

pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
