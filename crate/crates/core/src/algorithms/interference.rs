//! Single-interferometer algorithms: Mach-Zehnder and Deutsch.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{f_controlled_not, hadamard, OracleFunction, PhaseAngle};
use crate::state::{Field, QuantumRegister};

/// Detector probabilities `(P₀, P₁)` of `H · diag(e^{iφ₀}, e^{iφ₁}) · H |0⟩`.
pub fn mach_zehnder(phi0: PhaseAngle, phi1: PhaseAngle) -> (f64, f64) {
    let mut reg = QuantumRegister::new(1, 0).expect("one qubit");
    let h = hadamard();
    reg.apply_single_qubit(0, &h).expect("valid gate");
    let (a, b) = (phi0.radians(), phi1.radians());
    reg.apply_diagonal(|x| if x == 0 { a } else { b });
    reg.apply_single_qubit(0, &h).expect("valid gate");
    (reg.amplitude(0).norm_sqr(), reg.amplitude(1).norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Constant,
    Balanced,
}

#[derive(Clone, Debug)]
pub struct DeutschVerdict {
    pub verdict: Verdict,
    pub measured_bit: u8,
    /// Pre-measurement probability of `measured_bit`.
    pub bit_probability: f64,
    pub oracle_calls: usize,
    /// State before measurement: `(−1)^{f(0)} |f(0)⊕f(1)⟩ ⊗ |−⟩`.
    pub final_state: QuantumRegister,
}

/// Decides whether a one-bit Boolean `f` is constant or balanced with a single
/// f-controlled-NOT. Qubit 0 is the query qubit, qubit 1 the `|−⟩` ancilla.
///
/// The outcome is certain, so the verdict is read off the exact distribution
/// rather than sampled.
pub fn deutsch(f: &OracleFunction) -> Result<DeutschVerdict> {
    if f.domain_bits() != 1 || !f.is_boolean() {
        return Err(Error::invalid("Deutsch's problem needs a Boolean function of one bit"));
    }
    let h = hadamard();
    let mut reg = QuantumRegister::new(2, 0b10)?;
    reg.apply_single_qubit(0, &h)?;
    reg.apply_single_qubit(1, &h)?;
    f_controlled_not(f)?.apply(&mut reg, Field::new(0, 1), Field::new(1, 1))?;
    reg.apply_single_qubit(0, &h)?;
    let dist = reg.marginal(&[0])?;
    let measured_bit = u8::from(dist[1] > dist[0]);
    let verdict = if measured_bit == 0 {
        Verdict::Constant
    } else {
        Verdict::Balanced
    };
    Ok(DeutschVerdict {
        verdict,
        measured_bit,
        bit_probability: dist[measured_bit as usize],
        oracle_calls: 1,
        final_state: reg,
    })
}
