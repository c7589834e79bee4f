//! Grover's iterate `G = −A U₀ A⁻¹ U_f`, its spectrum, counting and search.
//!
//! With `|X₁⟩`, `|X₀⟩` the normalised uniform superpositions over solutions and
//! non-solutions, `A|0⟩ = sin α |X₁⟩ + cos α |X₀⟩` where `sin α = √(j/N)`, and
//! `G` rotates that plane by `2α`. Its eigenvectors there are
//! `ψ± = (|X₁⟩ ± i|X₀⟩)/√2` with eigenvalues `e^{±2πiω}`, `ω = α/π`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{hadamard, phase_shift, OracleFunction, PhaseAngle};
use crate::phase_estimation::{estimate_phase, run_network, ControlledUnitary, Repeated};
use crate::state::{check_register_size, max_qubits, Action, Field, QuantumRegister};

/// Largest counting precision accepted; the cost is `2^t − 1` iterates.
pub const MAX_COUNTING_PRECISION: usize = 14;
/// Search attempts before [`grover_search`] gives up.
pub const MAX_SEARCH_ATTEMPTS: usize = 10;

/// The state preparation `A` of amplitude amplification.
pub trait StatePreparation: Sync {
    /// Applies `A` (or `A⁻¹`) to `field`, conditioned on `control` if given.
    fn apply(&self, reg: &mut QuantumRegister, field: Field, control: Option<usize>, inverse: bool) -> Result<()>;

    /// True when `A|0⟩` is the uniform superposition, which lets the
    /// uncontrolled iterate use inversion about the mean directly.
    fn is_uniform(&self) -> bool {
        false
    }
}

/// `A = H^{⊗n}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HadamardPreparation;

impl StatePreparation for HadamardPreparation {
    fn apply(&self, reg: &mut QuantumRegister, field: Field, control: Option<usize>, _inverse: bool) -> Result<()> {
        let h = hadamard();
        for q in field.qubits() {
            match control {
                None => reg.apply_single_qubit(q, &h)?,
                Some(c) => reg.apply_controlled(c, &Action::Single { qubit: q, matrix: h })?,
            }
        }
        Ok(())
    }

    fn is_uniform(&self) -> bool {
        true
    }
}

fn check_boolean(f: &OracleFunction) -> Result<()> {
    if !f.is_boolean() {
        return Err(Error::invalid("Grover's iterate needs a Boolean oracle"));
    }
    Ok(())
}

/// Applies `G` to the search register `search`, optionally controlled.
pub fn apply_grover(
    reg: &mut QuantumRegister,
    search: Field,
    f: &OracleFunction,
    prep: &dyn StatePreparation,
    control: Option<usize>,
) -> Result<()> {
    check_boolean(f)?;
    if search.width != f.domain_bits() {
        return Err(Error::invalid(format!(
            "search register has {} qubits, oracle expects {}",
            search.width,
            f.domain_bits()
        )));
    }
    if control.is_none() && prep.is_uniform() && search.offset == 0 && search.width == reg.n_qubits() {
        reg.apply_sign_flip(|x| f.eval(x) == 1);
        let amps = reg.amplitudes_mut();
        let mean = amps.iter().sum::<Complex64>() / amps.len() as f64;
        amps.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
        return Ok(());
    }
    let ctrl: Vec<usize> = control.into_iter().collect();
    let oracle = |x: usize| if f.eval(x) == 1 { PI } else { 0.0 };
    reg.apply_multi_controlled(&ctrl, &Action::Diagonal { field: search, phase: &oracle })?;
    prep.apply(reg, search, control, true)?;
    let zero = |x: usize| if x == 0 { PI } else { 0.0 };
    reg.apply_multi_controlled(&ctrl, &Action::Diagonal { field: search, phase: &zero })?;
    prep.apply(reg, search, control, false)?;
    match control {
        None => reg.apply_global_phase(PI),
        Some(c) => reg.apply_single_qubit(c, &phase_shift(PhaseAngle::new(PI)))?,
    }
    Ok(())
}

/// One application of `G` to the low `n` qubits of `reg`, `n` the oracle's domain.
pub fn grover_iterate(reg: &mut QuantumRegister, f: &OracleFunction, prep: &dyn StatePreparation) -> Result<()> {
    apply_grover(reg, Field::new(0, f.domain_bits()), f, prep, None)
}

/// `A|0⟩` on `n` qubits.
pub fn prepared_state(n: usize, prep: &dyn StatePreparation) -> Result<QuantumRegister> {
    let mut reg = QuantumRegister::new(n, 0)?;
    prep.apply(&mut reg, Field::new(0, n), None, false)?;
    Ok(reg)
}

/// Dense matrix of `G`, row-major, column `x` being `G|x⟩`.
pub fn grover_matrix(f: &OracleFunction, prep: &dyn StatePreparation) -> Result<Vec<Complex64>> {
    let n = f.domain_bits();
    check_register_size(n)?;
    let dim = 1usize << n;
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for x in 0..dim {
        let mut reg = QuantumRegister::new(n, x)?;
        grover_iterate(&mut reg, f, prep)?;
        for (row, a) in reg.amplitudes().iter().enumerate() {
            m[row * dim + x] = *a;
        }
    }
    Ok(m)
}

/// `|X₁⟩` and `|X₀⟩` for a Boolean oracle with `0 < j < N`.
pub fn solution_states(f: &OracleFunction) -> Result<(QuantumRegister, QuantumRegister)> {
    check_boolean(f)?;
    let table = f.truth_table();
    let j = table.iter().filter(|&&v| v == 1).count();
    if j == 0 || j == table.len() {
        return Err(Error::invalid("the solution plane is degenerate when j = 0 or j = N"));
    }
    let uniform = |want: usize, count: usize| {
        let a = 1.0 / (count as f64).sqrt();
        table
            .iter()
            .map(|&v| Complex64::new(if v == want { a } else { 0.0 }, 0.0))
            .collect::<Vec<_>>()
    };
    Ok((
        QuantumRegister::from_amplitudes(uniform(1, j))?,
        QuantumRegister::from_amplitudes(uniform(0, table.len() - j))?,
    ))
}

/// `ψ± = (|X₁⟩ ± i|X₀⟩)/√2`, eigenvectors of `G` with eigenvalues `e^{±2πiω}`.
pub fn grover_eigenvectors(f: &OracleFunction) -> Result<(QuantumRegister, QuantumRegister)> {
    let (x1, x0) = solution_states(f)?;
    let combine = |sign: f64| {
        x1.amplitudes()
            .iter()
            .zip(x0.amplitudes())
            .map(|(a, b)| (a + Complex64::new(0.0, sign) * b) * FRAC_1_SQRT_2)
            .collect::<Vec<_>>()
    };
    Ok((
        QuantumRegister::from_amplitudes(combine(1.0))?,
        QuantumRegister::from_amplitudes(combine(-1.0))?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroverSpectrum {
    pub capacity: u64,
    pub solutions: u64,
    /// `ω_j ∈ [0, 1/2]` with `cos(2πω_j) = 1 − 2j/N`.
    pub omega: f64,
    /// `A|0⟩ = (e^{−2πiθ}ψ₊ + e^{2πiθ}ψ₋)/√2`.
    pub theta: f64,
}

impl GroverSpectrum {
    pub fn eigenvalue(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.omega)
    }

    /// `α = πω`, half the rotation angle of `G`.
    pub fn alpha(&self) -> f64 {
        PI * self.omega
    }
}

/// Spectrum of `G` for `j` solutions among `N`.
///
/// `θ` is read from the overlaps of `A|0⟩ = (sin α, cos α)` with `ψ±` in the
/// `(X₁, X₀)` plane.
pub fn grover_spectrum(capacity: u64, solutions: u64) -> Result<GroverSpectrum> {
    if capacity == 0 {
        return Err(Error::invalid("search space must be non-empty"));
    }
    if solutions > capacity {
        return Err(Error::invalid(format!("j = {solutions} exceeds N = {capacity}")));
    }
    let ratio = solutions as f64 / capacity as f64;
    let alpha = ratio.sqrt().asin();
    let omega = alpha / PI;
    let start = [Complex64::new(alpha.sin(), 0.0), Complex64::new(alpha.cos(), 0.0)];
    let psi_plus = [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)];
    // ⟨ψ₊|A0⟩ = e^{−2πiθ}/√2
    let overlap: Complex64 = psi_plus.iter().zip(&start).map(|(p, s)| p.conj() * s).sum();
    let theta = -overlap.arg() / (2.0 * PI);
    Ok(GroverSpectrum {
        capacity,
        solutions,
        omega,
        theta,
    })
}

/// Iterations maximising `sin²((2k+1)α)`: the real optimum `1/(4ω) − 1/2`
/// rounded with ties down. `None` when `j = 0`.
pub fn optimal_iterations(capacity: u64, solutions: u64) -> Result<Option<u64>> {
    let s = grover_spectrum(capacity, solutions)?;
    if solutions == 0 {
        return Ok(None);
    }
    let real = 1.0 / (4.0 * s.omega) - 0.5;
    Ok(Some((real - 0.5).ceil().max(0.0) as u64))
}

/// Exact `P(solution)` after `k` iterations: `sin²((2k+1)α)`.
pub fn success_probability(capacity: u64, solutions: u64, k: u64) -> Result<f64> {
    let s = grover_spectrum(capacity, solutions)?;
    Ok(((2 * k + 1) as f64 * s.alpha()).sin().powi(2))
}

/// Controlled-`G` with the search register as target.
#[derive(Clone, Debug)]
pub struct GroverDevice<P> {
    pub oracle: OracleFunction,
    pub prep: P,
}

impl<P: StatePreparation> ControlledUnitary for GroverDevice<P> {
    fn target_qubits(&self) -> usize {
        self.oracle.domain_bits()
    }

    fn apply_controlled(&self, reg: &mut QuantumRegister, control: usize, target: Field) -> Result<()> {
        apply_grover(reg, target, &self.oracle, &self.prep, Some(control))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountingResult {
    pub y: usize,
    pub precision_bits: usize,
    /// Readout `y/2^t` folded into `[0, 1/2]`.
    pub omega_estimate: f64,
    /// `N sin²(π ω̂)`.
    pub j_estimate: f64,
    pub j_rounded: u64,
    pub grover_applications: u64,
    pub register_qubits: usize,
}

/// `(ω̂ folded, N sin²(πω̂), rounded and clamped j)` for a counting readout.
pub fn counting_readout(y: usize, precision_bits: usize, capacity: u64) -> (f64, f64, u64) {
    let raw = y as f64 / (1u64 << precision_bits) as f64;
    let omega = raw.min(1.0 - raw);
    let j = capacity as f64 * (PI * omega).sin().powi(2);
    let rounded = (j.round().max(0.0) as u64).min(capacity);
    (omega, j, rounded)
}

fn counting_network_parts(f: &OracleFunction, t: usize) -> Result<(Repeated<GroverDevice<HadamardPreparation>>, QuantumRegister)> {
    check_boolean(f)?;
    if t == 0 || t > MAX_COUNTING_PRECISION {
        return Err(Error::invalid(format!(
            "counting precision {t} is outside 1..={MAX_COUNTING_PRECISION}"
        )));
    }
    check_register_size(t + f.domain_bits())?;
    let device = Repeated(GroverDevice {
        oracle: f.clone(),
        prep: HadamardPreparation,
    });
    Ok((device, prepared_state(f.domain_bits(), &HadamardPreparation)?))
}

/// Estimates the number of solutions by phase-estimating `G` on `A|0⟩`.
pub fn quantum_count<R: Rng + ?Sized>(f: &OracleFunction, t: usize, rng: &mut R) -> Result<CountingResult> {
    let (device, start) = counting_network_parts(f, t)?;
    let run = estimate_phase(&device, &start, t, rng)?;
    let capacity = f.domain_size() as u64;
    let (omega_estimate, j_estimate, j_rounded) = counting_readout(run.estimate.y, t, capacity);
    Ok(CountingResult {
        y: run.estimate.y,
        precision_bits: t,
        omega_estimate,
        j_estimate,
        j_rounded,
        grover_applications: run.base_applications,
        register_qubits: run.register_qubits,
    })
}

/// Exact readout distribution of [`quantum_count`] from the simulated network.
pub fn counting_distribution(f: &OracleFunction, t: usize) -> Result<Vec<f64>> {
    let (device, start) = counting_network_parts(f, t)?;
    Ok(run_network(&device, &start, t)?.distribution())
}

/// The same distribution from the spectrum: an equal mixture of the
/// single-eigenvector distributions at `+ω` and `−ω`.
pub fn counting_distribution_analytic(capacity: u64, solutions: u64, t: usize) -> Result<Vec<f64>> {
    let s = grover_spectrum(capacity, solutions)?;
    let plus = crate::phase_estimation::output_distribution_for_fraction(s.omega, t);
    let minus = crate::phase_estimation::output_distribution_for_fraction(1.0 - s.omega, t);
    Ok(plus.iter().zip(&minus).map(|(a, b)| 0.5 * (a + b)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub index: usize,
    pub solutions_used: u64,
    pub iterations: u64,
    pub attempts: usize,
    /// Iterates applied across all attempts, counting included.
    pub oracle_calls: u64,
    /// Iterates spent estimating `j` when it was not given.
    pub counting_calls: u64,
    /// Classical evaluations of `f` used to verify measured candidates.
    pub classical_checks: usize,
    /// Exact probability of measuring a solution in the last attempt.
    pub success_probability: f64,
    pub register_qubits: usize,
}

/// Finds `x` with `f(x) = 1`.
///
/// With `j` unknown, a counting run at precision `⌈n/2⌉ + 2` (capped by the
/// register budget) estimates it first; an estimate of 0 is treated as 1.
pub fn grover_search<R: Rng + ?Sized>(f: &OracleFunction, j_known: Option<u64>, rng: &mut R) -> Result<SearchResult> {
    grover_search_with_attempts(f, j_known, rng, MAX_SEARCH_ATTEMPTS)
}

pub fn grover_search_with_attempts<R: Rng + ?Sized>(
    f: &OracleFunction,
    j_known: Option<u64>,
    rng: &mut R,
    max_attempts: usize,
) -> Result<SearchResult> {
    check_boolean(f)?;
    let n = f.domain_bits();
    check_register_size(n)?;
    let capacity = 1u64 << n;
    let mut register_qubits = n;
    let (solutions_used, counting_calls) = match j_known {
        Some(0) => return Err(Error::invalid("j = 0: there is nothing to find")),
        Some(j) if j > capacity => return Err(Error::invalid(format!("j = {j} exceeds N = {capacity}"))),
        Some(j) => (j, 0),
        None => {
            let t = (n.div_ceil(2) + 2).min(max_qubits().saturating_sub(n)).min(MAX_COUNTING_PRECISION);
            if t == 0 {
                return Err(Error::RegisterSize {
                    requested: n + 1,
                    max: max_qubits(),
                });
            }
            let c = quantum_count(f, t, rng)?;
            register_qubits = c.register_qubits;
            (c.j_rounded.max(1), c.grover_applications)
        }
    };
    let k = optimal_iterations(capacity, solutions_used)?.expect("j ≥ 1");
    let mut oracle_calls = counting_calls;
    let qubits: Vec<usize> = (0..n).collect();
    for attempt in 1..=max_attempts {
        let mut reg = prepared_state(n, &HadamardPreparation)?;
        for _ in 0..k {
            grover_iterate(&mut reg, f, &HadamardPreparation)?;
        }
        oracle_calls += k;
        let success_probability = reg.probability_of(|x| f.eval(x) == 1);
        let outcome = reg.measure_qubits(&qubits, rng)?;
        if f.eval(outcome.result) == 1 {
            return Ok(SearchResult {
                index: outcome.result,
                solutions_used,
                iterations: k,
                attempts: attempt,
                oracle_calls,
                counting_calls,
                classical_checks: attempt,
                success_probability,
                register_qubits,
            });
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: max_attempts,
        reason: "no measured candidate satisfied the oracle".into(),
    })
}
