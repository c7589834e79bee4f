//! Quantum Fourier transform.
//!
//! `qft` realises `|x⟩ ↦ 2^{-n/2} Σ_y e^{2πixy/2^n} |y⟩` on an ordered list of
//! qubits, where `qubits[i]` carries bit `i` of `x`. The gate network built by
//! [`network`] alone leaves qubit `k` in `|0⟩ + e^{i 2^{n-1-k} φ_x}|1⟩` with
//! `φ_x = 2πx/2^n`; `qft` follows it with a bit-reversal index remap so the
//! overall map is exactly the Fourier matrix above.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{apply_conditional_phase, hadamard, PhaseAngle};
use crate::state::QuantumRegister;

/// One gate of the Fourier network, in terms of positions in the qubit list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QftGate {
    Hadamard(usize),
    /// `R(π/2^exponent)` between list positions `control` and `target`.
    ConditionalPhase {
        control: usize,
        target: usize,
        exponent: u32,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCount {
    pub hadamards: usize,
    pub conditional_phases: usize,
}

/// Gates of the forward network on `n` qubits, keeping rotations
/// `R(π/2^k)` with `k ≤ max_exponent` (all of them when `None`).
pub fn network(n: usize, max_exponent: Option<u32>) -> Vec<QftGate> {
    let mut gates = Vec::with_capacity(n * (n + 1) / 2);
    for k in (0..n).rev() {
        gates.push(QftGate::Hadamard(k));
        for l in (0..k).rev() {
            let exponent = (k - l) as u32;
            if max_exponent.is_none_or(|m| exponent <= m) {
                gates.push(QftGate::ConditionalPhase {
                    control: l,
                    target: k,
                    exponent,
                });
            }
        }
    }
    gates
}

pub fn gate_count(n: usize, max_exponent: Option<u32>) -> GateCount {
    network(n, max_exponent)
        .iter()
        .fold(GateCount::default(), |mut c, g| {
            match g {
                QftGate::Hadamard(_) => c.hadamards += 1,
                QftGate::ConditionalPhase { .. } => c.conditional_phases += 1,
            }
            c
        })
}

fn rotation_angle(exponent: u32, inverse: bool) -> PhaseAngle {
    let a = PI / (1u64 << exponent) as f64;
    PhaseAngle::new(if inverse { -a } else { a })
}

fn check_qubits(reg: &QuantumRegister, qubits: &[usize]) -> Result<()> {
    let mut seen = 0usize;
    for &q in qubits {
        if q >= reg.n_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: reg.n_qubits(),
            });
        }
        if seen & (1 << q) != 0 {
            return Err(Error::DuplicateQubit(q));
        }
        seen |= 1 << q;
    }
    if qubits.is_empty() {
        return Err(Error::invalid("QFT needs at least one qubit"));
    }
    Ok(())
}

fn run_gates(reg: &mut QuantumRegister, qubits: &[usize], gates: &[QftGate], inverse: bool) -> Result<()> {
    let h = hadamard();
    let mut apply = |g: &QftGate| -> Result<()> {
        match *g {
            QftGate::Hadamard(k) => reg.apply_single_qubit(qubits[k], &h),
            QftGate::ConditionalPhase {
                control,
                target,
                exponent,
            } => apply_conditional_phase(reg, qubits[control], qubits[target], rotation_angle(exponent, inverse)),
        }
    };
    if inverse {
        gates.iter().rev().try_for_each(&mut apply)
    } else {
        gates.iter().try_for_each(&mut apply)
    }
}

/// Reverses the order of the listed qubits by remapping basis indices.
pub fn reverse_qubits(reg: &mut QuantumRegister, qubits: &[usize]) -> Result<()> {
    check_qubits(reg, qubits)?;
    let n = qubits.len();
    reg.apply_permutation(|x| {
        let mut y = x;
        for i in 0..n {
            let bit = (x >> qubits[n - 1 - i]) & 1;
            y = (y & !(1 << qubits[i])) | (bit << qubits[i]);
        }
        y
    })
}

/// The bare network, without the final reversal.
pub fn qft_no_reversal(reg: &mut QuantumRegister, qubits: &[usize], max_exponent: Option<u32>) -> Result<()> {
    check_qubits(reg, qubits)?;
    run_gates(reg, qubits, &network(qubits.len(), max_exponent), false)
}

pub fn qft(reg: &mut QuantumRegister, qubits: &[usize]) -> Result<()> {
    qft_no_reversal(reg, qubits, None)?;
    reverse_qubits(reg, qubits)
}

/// The network run backwards with conjugated rotations, after undoing the reversal.
pub fn inverse_qft(reg: &mut QuantumRegister, qubits: &[usize]) -> Result<()> {
    check_qubits(reg, qubits)?;
    reverse_qubits(reg, qubits)?;
    run_gates(reg, qubits, &network(qubits.len(), None), true)
}

/// `qft` with every `R(π/2^k)`, `k > min_angle_exponent`, left out.
pub fn approximate_qft(reg: &mut QuantumRegister, qubits: &[usize], min_angle_exponent: u32) -> Result<()> {
    qft_no_reversal(reg, qubits, Some(min_angle_exponent))?;
    reverse_qubits(reg, qubits)
}

pub fn inverse_approximate_qft(reg: &mut QuantumRegister, qubits: &[usize], min_angle_exponent: u32) -> Result<()> {
    check_qubits(reg, qubits)?;
    reverse_qubits(reg, qubits)?;
    run_gates(reg, qubits, &network(qubits.len(), Some(min_angle_exponent)), true)
}

fn check_power_of_two(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!("DFT length {len} is not a power of two")));
    }
    Ok(())
}

fn dft_with_sign(f: &[Complex64], sign: f64) -> Result<Vec<Complex64>> {
    check_power_of_two(f.len())?;
    let s = f.len();
    let norm = 1.0 / (s as f64).sqrt();
    Ok((0..s)
        .map(|y| {
            f.iter()
                .enumerate()
                .map(|(x, fx)| {
                    let k = (x * y) % s;
                    fx * Complex64::from_polar(1.0, sign * TAU * k as f64 / s as f64)
                })
                .sum::<Complex64>()
                * norm
        })
        .collect())
}

/// Dense `O(s²)` transform `f̃(y) = s^{-1/2} Σ_x e^{2πixy/s} f(x)`.
pub fn dft_reference(f: &[Complex64]) -> Result<Vec<Complex64>> {
    dft_with_sign(f, 1.0)
}

/// Conjugate transpose of [`dft_reference`].
pub fn inverse_dft_reference(f: &[Complex64]) -> Result<Vec<Complex64>> {
    dft_with_sign(f, -1.0)
}
