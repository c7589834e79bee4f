//! Phase estimation: controlled powers `U^{2^j}` kick `e^{i 2^j φ}` back onto
//! control qubit `j`, producing `Σ_y e^{iyφ}|y⟩`, and the inverse QFT reads out
//! an n-bit estimate `y/2^n` of `ω = φ/2π`.
//!
//! Register layout used throughout: controls occupy qubits `0..n_bits`
//! (control `j` drives `U^{2^j}`), the target register sits directly above.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{phase_shift, PhaseAngle};
use crate::qft::inverse_qft;
use crate::state::{check_register_size, Action, Field, QuantumRegister};

/// How powers of the base unitary are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CostModel {
    /// `U^{2^j}` is a single gate found by classical squaring (e.g. `U_a^{2^j} = U_{a^{2^j}}`).
    Squaring,
    /// `U^{2^j}` needs `2^j` applications of `U`.
    Repetition,
}

/// A unitary that can be applied conditioned on one control qubit.
pub trait ControlledUnitary {
    fn target_qubits(&self) -> usize;
    fn apply_controlled(&self, reg: &mut QuantumRegister, control: usize, target: Field) -> Result<()>;
}

/// Source of controlled-`U^{2^j}` gates.
pub trait ControlledPowerDevice {
    fn target_qubits(&self) -> usize;
    fn cost_model(&self) -> CostModel;
    fn apply_power(&self, reg: &mut QuantumRegister, control: usize, target: Field, j: u32) -> Result<()>;

    /// Applications of the base device spent on `U^{2^j}`.
    fn base_applications(&self, j: u32) -> u64 {
        match self.cost_model() {
            CostModel::Squaring => 1,
            CostModel::Repetition => 1u64 << j,
        }
    }
}

/// Builds `U^{2^j}` by applying controlled-`U` `2^j` times.
#[derive(Clone, Debug)]
pub struct Repeated<U>(pub U);

impl<U: ControlledUnitary> ControlledPowerDevice for Repeated<U> {
    fn target_qubits(&self) -> usize {
        self.0.target_qubits()
    }

    fn cost_model(&self) -> CostModel {
        CostModel::Repetition
    }

    fn apply_power(&self, reg: &mut QuantumRegister, control: usize, target: Field, j: u32) -> Result<()> {
        for _ in 0..1u64 << j {
            self.0.apply_controlled(reg, control, target)?;
        }
        Ok(())
    }
}

/// Single-qubit `diag(1, e^{iφ})`; eigenstate `|1⟩` has eigenphase `φ`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseShiftDevice {
    pub phi: PhaseAngle,
}

impl ControlledUnitary for PhaseShiftDevice {
    fn target_qubits(&self) -> usize {
        1
    }

    fn apply_controlled(&self, reg: &mut QuantumRegister, control: usize, target: Field) -> Result<()> {
        reg.apply_controlled(
            control,
            &Action::Single {
                qubit: target.offset,
                matrix: phase_shift(self.phi),
            },
        )
    }
}

impl ControlledPowerDevice for PhaseShiftDevice {
    fn target_qubits(&self) -> usize {
        1
    }

    fn cost_model(&self) -> CostModel {
        CostModel::Squaring
    }

    fn apply_power(&self, reg: &mut QuantumRegister, control: usize, target: Field, j: u32) -> Result<()> {
        reg.apply_controlled(
            control,
            &Action::Single {
                qubit: target.offset,
                matrix: phase_shift(self.phi.times(1u64 << j)),
            },
        )
    }
}

/// Diagonal unitary `|x⟩ ↦ e^{2πi·fractions[x]}|x⟩`; every basis state is an eigenstate.
#[derive(Clone, Debug)]
pub struct DiagonalDevice {
    width: usize,
    fractions: Vec<f64>,
}

impl DiagonalDevice {
    pub fn new(fractions: Vec<f64>) -> Result<Self> {
        let len = fractions.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid("diagonal needs 2^w entries"));
        }
        Ok(DiagonalDevice {
            width: len.trailing_zeros() as usize,
            fractions,
        })
    }

    pub fn identity(width: usize) -> Self {
        DiagonalDevice {
            width,
            fractions: vec![0.0; 1 << width],
        }
    }
}

impl ControlledPowerDevice for DiagonalDevice {
    fn target_qubits(&self) -> usize {
        self.width
    }

    fn cost_model(&self) -> CostModel {
        CostModel::Squaring
    }

    fn apply_power(&self, reg: &mut QuantumRegister, control: usize, target: Field, j: u32) -> Result<()> {
        let scale = (1u64 << j) as f64;
        let phase = |x: usize| (TAU * self.fractions[x] * scale).rem_euclid(TAU);
        reg.apply_controlled(control, &Action::Diagonal { field: target, phase: &phase })
    }
}

/// An `n_bits`-bit phase estimate `ω̂ = y/2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseEstimate {
    pub y: usize,
    pub omega_hat: f64,
    pub n_bits: usize,
    /// Exact pre-measurement probability of this `y`, when known.
    pub success_probability: Option<f64>,
}

impl PhaseEstimate {
    pub fn new(y: usize, n_bits: usize, success_probability: Option<f64>) -> Self {
        assert!(y < 1 << n_bits);
        PhaseEstimate {
            y,
            omega_hat: y as f64 / (1u64 << n_bits) as f64,
            n_bits,
            success_probability,
        }
    }

    pub fn phase(&self) -> PhaseAngle {
        PhaseAngle::from_fraction(self.omega_hat)
    }
}

/// The phase-estimation network evaluated up to (not including) measurement.
#[derive(Clone, Debug)]
pub struct NetworkState {
    pub register: QuantumRegister,
    pub n_bits: usize,
    pub target: Field,
    pub base_applications: u64,
}

impl NetworkState {
    /// Exact distribution of the control register readout `y`.
    pub fn distribution(&self) -> Vec<f64> {
        self.register
            .field_distribution(Field::new(0, self.n_bits))
            .expect("control field is in range")
    }

    pub fn control_qubits(&self) -> Vec<usize> {
        (0..self.n_bits).collect()
    }
}

/// Outcome of a sampled estimate together with the collapsed register.
#[derive(Clone, Debug)]
pub struct EstimationRun {
    pub estimate: PhaseEstimate,
    pub post_state: QuantumRegister,
    pub base_applications: u64,
    pub register_qubits: usize,
}

/// `2^{-n/2} Σ_y e^{iyφ}|y⟩`: qubit `k` holds `(|0⟩ + e^{i 2^k φ}|1⟩)/√2`.
/// For `φ = 2πx/2^n` this is exactly `qft(|x⟩)`.
pub fn kickback_state(n: usize, phi: PhaseAngle) -> Result<QuantumRegister> {
    check_register_size(n)?;
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    let amps = (0..dim)
        .map(|y| {
            let angle: f64 = (0..n)
                .filter(|k| (y >> k) & 1 == 1)
                .map(|k| (phi.radians() * (1u64 << k) as f64).rem_euclid(TAU))
                .sum();
            Complex64::from_polar(norm, angle)
        })
        .collect();
    QuantumRegister::from_amplitudes(amps)
}

/// Runs Hadamards, the controlled-power ladder and the inverse QFT.
pub fn run_network<D: ControlledPowerDevice + ?Sized>(
    device: &D,
    target_state: &QuantumRegister,
    n_bits: usize,
) -> Result<NetworkState> {
    if n_bits == 0 {
        return Err(Error::invalid("at least one control qubit is needed"));
    }
    let width = device.target_qubits();
    if target_state.n_qubits() != width {
        return Err(Error::invalid(format!(
            "target state has {} qubits, device acts on {width}",
            target_state.n_qubits()
        )));
    }
    check_register_size(n_bits + width)?;
    let controls = QuantumRegister::new(n_bits, 0)?;
    let mut reg = controls.tensor(target_state)?;
    let h = crate::gates::hadamard();
    for q in 0..n_bits {
        reg.apply_single_qubit(q, &h)?;
    }
    let target = Field::new(n_bits, width);
    let mut base_applications = 0u64;
    for j in 0..n_bits {
        device.apply_power(&mut reg, j, target, j as u32)?;
        base_applications += device.base_applications(j as u32);
    }
    let control_list: Vec<usize> = (0..n_bits).collect();
    inverse_qft(&mut reg, &control_list)?;
    Ok(NetworkState {
        register: reg,
        n_bits,
        target,
        base_applications,
    })
}

/// One sampled `n_bits`-bit estimate of the eigenphase seen by `target_state`.
pub fn estimate_phase<D: ControlledPowerDevice + ?Sized, R: Rng + ?Sized>(
    device: &D,
    target_state: &QuantumRegister,
    n_bits: usize,
    rng: &mut R,
) -> Result<EstimationRun> {
    let net = run_network(device, target_state, n_bits)?;
    let register_qubits = net.register.n_qubits();
    let controls = net.control_qubits();
    let outcome = net.register.measure_qubits(&controls, rng)?;
    Ok(EstimationRun {
        estimate: PhaseEstimate::new(outcome.result, n_bits, Some(outcome.probability)),
        post_state: outcome.post_state,
        base_applications: net.base_applications,
        register_qubits,
    })
}

/// `|2^{-n} Σ_x e^{2πi x (ω − y/2^n)}|²` in closed form.
fn grid_probability(omega: f64, y: usize, n_bits: usize) -> f64 {
    let s = (1u64 << n_bits) as f64;
    let d = omega - y as f64 / s;
    let d = d - d.round();
    if d == 0.0 {
        return 1.0;
    }
    let ratio = (PI * s * d).sin() / (s * (PI * d).sin());
    ratio * ratio
}

/// Exact readout distribution for a single eigenvector with eigenvalue `e^{iφ}`.
pub fn exact_output_distribution(phi: PhaseAngle, n_bits: usize) -> Vec<f64> {
    output_distribution_for_fraction(phi.fraction(), n_bits)
}

/// [`exact_output_distribution`] with the phase given as `ω = φ/2π`.
pub fn output_distribution_for_fraction(omega: f64, n_bits: usize) -> Vec<f64> {
    (0..1usize << n_bits)
        .map(|y| grid_probability(omega, y, n_bits))
        .collect()
}

/// Distance between two phase fractions on the unit circle, in `[0, 1/2]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// The grid points `y/2^n` nearest to `ω`: one, or two on an exact tie.
pub fn best_estimates(omega: f64, n_bits: usize) -> Vec<usize> {
    let s = 1usize << n_bits;
    let scaled = omega.rem_euclid(1.0) * s as f64;
    let lo = scaled.floor() as usize % s;
    let hi = (lo + 1) % s;
    let dl = circular_distance(omega, lo as f64 / s as f64);
    let dh = circular_distance(omega, hi as f64 / s as f64);
    if dl < dh {
        vec![lo]
    } else if dh < dl {
        vec![hi]
    } else {
        vec![lo, hi]
    }
}

/// Exact probability that the readout is a best `n_bits`-bit estimate of `ω`.
/// On a tie either neighbour counts, and the larger is reported.
pub fn best_estimate_probability(omega: f64, n_bits: usize) -> f64 {
    best_estimates(omega, n_bits)
        .into_iter()
        .map(|y| grid_probability(omega, y, n_bits))
        .fold(0.0, f64::max)
}

/// Extra control qubits for failure probability `δ`: `⌈log₂(2 + 1/(2δ))⌉`.
pub fn extra_qubits(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("δ = {delta} must lie in (0, 1)")));
    }
    Ok((2.0 + 1.0 / (2.0 * delta)).log2().ceil() as usize)
}

/// Rounds a `(n_bits + extra)`-bit readout to the nearest `n_bits`-bit grid
/// point on the circle, ties to even.
pub fn round_to_bits(y: usize, extra: usize, n_bits: usize) -> usize {
    let modulus = 1usize << n_bits;
    if extra == 0 {
        return y % modulus;
    }
    let q = y >> extra;
    let rem = y & ((1 << extra) - 1);
    let half = 1 << (extra - 1);
    let up = rem > half || (rem == half && q % 2 == 1);
    (q + usize::from(up)) % modulus
}

/// Estimate with `n_bits + extra_qubits(δ)` controls, rounded to `n_bits`.
pub fn boosted_estimate<D: ControlledPowerDevice + ?Sized, R: Rng + ?Sized>(
    device: &D,
    target_state: &QuantumRegister,
    n_bits: usize,
    delta: f64,
    rng: &mut R,
) -> Result<EstimationRun> {
    let extra = extra_qubits(delta)?;
    let net = run_network(device, target_state, n_bits + extra)?;
    let dist = net.distribution();
    let register_qubits = net.register.n_qubits();
    let base_applications = net.base_applications;
    let controls = net.control_qubits();
    let outcome = net.register.measure_qubits(&controls, rng)?;
    let y = round_to_bits(outcome.result, extra, n_bits);
    let p: f64 = dist
        .iter()
        .enumerate()
        .filter(|(raw, _)| round_to_bits(*raw, extra, n_bits) == y)
        .map(|(_, p)| p)
        .sum();
    Ok(EstimationRun {
        estimate: PhaseEstimate::new(y, n_bits, Some(p)),
        post_state: outcome.post_state,
        base_applications,
        register_qubits,
    })
}

/// Exact probability that the boosted, rounded estimate lies within `2^{-n}`
/// of `ω` on the circle.
pub fn boosted_success_probability(omega: f64, n_bits: usize, delta: f64) -> Result<f64> {
    let extra = extra_qubits(delta)?;
    let total = n_bits + extra;
    let tol = 1.0 / (1u64 << n_bits) as f64;
    Ok(output_distribution_for_fraction(omega, total)
        .iter()
        .enumerate()
        .filter(|(raw, _)| {
            let y = round_to_bits(*raw, extra, n_bits);
            circular_distance(y as f64 * tol, omega) <= tol
        })
        .map(|(_, p)| p)
        .sum())
}
