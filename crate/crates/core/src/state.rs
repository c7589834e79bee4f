//! The statevector: a register of `n` qubits stored as `2^n` complex amplitudes.
//!
//! Basis index `x` has qubit `i` in bit `i`. Every kernel here mutates the
//! register in place; callers compose them to build networks.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{DEFAULT_MAX_QUBITS, HARD_MAX_QUBITS, STRICT_TOL, TOL};

/// Index of a computational basis state, `x = Σ x_i 2^i`.
pub type BasisIndex = usize;

/// Row-major 2×2 complex matrix in the basis `{|0⟩, |1⟩}`.
pub type Matrix2 = [[Complex64; 2]; 2];

const PARALLEL_THRESHOLD: usize = 1 << 14;

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

/// Current process-wide register size limit.
pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Changes the register size limit. Values above [`HARD_MAX_QUBITS`] are refused.
pub fn set_max_qubits(n: usize) -> Result<()> {
    if n == 0 || n > HARD_MAX_QUBITS {
        return Err(Error::RegisterSize {
            requested: n,
            max: HARD_MAX_QUBITS,
        });
    }
    MAX_QUBITS.store(n, Ordering::Relaxed);
    Ok(())
}

/// Fails with [`Error::RegisterSize`] when `n` qubits would exceed the limit.
pub fn check_register_size(n: usize) -> Result<()> {
    let max = max_qubits();
    if n == 0 || n > max {
        return Err(Error::RegisterSize { requested: n, max });
    }
    Ok(())
}

/// A contiguous run of qubits `offset..offset + width` read as one integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    pub offset: usize,
    pub width: usize,
}

impl Field {
    pub const fn new(offset: usize, width: usize) -> Self {
        Field { offset, width }
    }

    pub fn end(&self) -> usize {
        self.offset + self.width
    }

    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    pub fn contains(&self, qubit: usize) -> bool {
        qubit >= self.offset && qubit < self.end()
    }

    #[inline]
    pub fn get(&self, index: BasisIndex) -> usize {
        (index >> self.offset) & ((1usize << self.width) - 1)
    }

    #[inline]
    pub fn set(&self, index: BasisIndex, value: usize) -> BasisIndex {
        (index & !self.mask()) | ((value << self.offset) & self.mask())
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.offset..self.end()
    }
}

/// An operation that [`QuantumRegister::apply_controlled`] can condition on a qubit.
///
/// Permutation and diagonal maps receive the value of `field`, not the full index.
pub enum Action<'a> {
    Single {
        qubit: usize,
        matrix: Matrix2,
    },
    Permutation {
        field: Field,
        map: &'a (dyn Fn(usize) -> usize + Sync),
    },
    Diagonal {
        field: Field,
        phase: &'a (dyn Fn(usize) -> f64 + Sync),
    },
}

/// Result of [`QuantumRegister::measure_qubits`].
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    /// Bit `i` holds the outcome of the `i`-th measured qubit.
    pub result: BasisIndex,
    /// Pre-measurement probability of `result`.
    pub probability: f64,
    /// Collapsed, renormalised state.
    pub post_state: QuantumRegister,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRegister {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// Amplitudes as `[re, im]` pairs, the `--dump-state` wire format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmplitudePairs(pub Vec<[f64; 2]>);

pub fn is_unitary(u: &Matrix2, tol: f64) -> bool {
    unitarity_deviation(u) <= tol
}

fn unitarity_deviation(u: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let dot = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

pub fn dagger(u: &Matrix2) -> Matrix2 {
    [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ]
}

#[inline]
fn phase_factor(phase: f64) -> Complex64 {
    // exact ±1 keeps sign-flip oracles free of rounding
    if phase == PI || phase == -PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, phase)
    }
}

impl QuantumRegister {
    /// Basis state `|initial⟩` on `n_qubits` qubits.
    pub fn new(n_qubits: usize, initial: BasisIndex) -> Result<Self> {
        check_register_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if initial >= dim {
            return Err(Error::BasisIndexOutOfRange {
                index: initial,
                n_qubits,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[initial] = Complex64::new(1.0, 0.0);
        Ok(QuantumRegister {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps an amplitude vector. Its length must be a power of two and its
    /// squared norm must be 1 within [`TOL`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude vector length {len} is not a power of two ≥ 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_register_size(n_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::invalid(format!(
                "amplitudes have squared norm {norm}, expected 1"
            )));
        }
        Ok(QuantumRegister {
            n_qubits,
            amplitudes,
        })
    }

    /// `self ⊗ high`: `self` occupies the low qubits.
    pub fn tensor(&self, high: &QuantumRegister) -> Result<Self> {
        let n = self.n_qubits + high.n_qubits;
        check_register_size(n)?;
        let low_dim = self.dimension();
        let mut amplitudes = Vec::with_capacity(low_dim * high.dimension());
        for h in &high.amplitudes {
            amplitudes.extend(self.amplitudes.iter().map(|l| l * h));
        }
        Ok(QuantumRegister {
            n_qubits: n,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: BasisIndex) -> Complex64 {
        self.amplitudes[index]
    }

    /// Direct access for kernels that keep the norm by construction.
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumRegister) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &QuantumRegister) -> f64 {
        if self.n_qubits != other.n_qubits {
            return 0.0;
        }
        self.inner(other).norm()
    }

    pub fn to_pairs(&self) -> AmplitudePairs {
        AmplitudePairs(self.amplitudes.iter().map(|a| [a.re, a.im]).collect())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_field(&self, field: Field) -> Result<()> {
        if field.width == 0 {
            return Err(Error::invalid("empty qubit field"));
        }
        self.check_qubit(field.end() - 1)
    }

    /// Applies `u` to `qubit`. `u` must be unitary within [`STRICT_TOL`].
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &Matrix2) -> Result<()> {
        self.check_qubit(qubit)?;
        let dev = unitarity_deviation(u);
        if dev > STRICT_TOL {
            return Err(Error::NotUnitary(dev));
        }
        single_qubit_kernel(&mut self.amplitudes, qubit, u, 0);
        Ok(())
    }

    /// Applies `action` on the subspace where `control` is 1.
    pub fn apply_controlled(&mut self, control: usize, action: &Action<'_>) -> Result<()> {
        self.apply_multi_controlled(&[control], action)
    }

    /// Applies `action` on the subspace where every qubit in `controls` is 1.
    pub fn apply_multi_controlled(&mut self, controls: &[usize], action: &Action<'_>) -> Result<()> {
        let mut mask = 0usize;
        for &c in controls {
            self.check_qubit(c)?;
            if mask & (1 << c) != 0 {
                return Err(Error::DuplicateQubit(c));
            }
            mask |= 1 << c;
        }
        self.apply_masked(mask, action)
    }

    fn apply_masked(&mut self, mask: usize, action: &Action<'_>) -> Result<()> {
        match action {
            Action::Single { qubit, matrix } => {
                self.check_qubit(*qubit)?;
                if mask & (1 << qubit) != 0 {
                    return Err(Error::OverlappingQubits(*qubit));
                }
                let dev = unitarity_deviation(matrix);
                if dev > STRICT_TOL {
                    return Err(Error::NotUnitary(dev));
                }
                single_qubit_kernel(&mut self.amplitudes, *qubit, matrix, mask);
                Ok(())
            }
            Action::Permutation { field, map } => {
                self.check_field(*field)?;
                if let Some(q) = field.qubits().find(|q| mask & (1 << q) != 0) {
                    return Err(Error::OverlappingQubits(q));
                }
                let f = *field;
                permutation_kernel(&mut self.amplitudes, mask, |x| f.set(x, map(f.get(x))))
            }
            Action::Diagonal { field, phase } => {
                self.check_field(*field)?;
                if let Some(q) = field.qubits().find(|q| mask & (1 << q) != 0) {
                    return Err(Error::OverlappingQubits(q));
                }
                let f = *field;
                diagonal_kernel(&mut self.amplitudes, mask, |x| phase(f.get(x)));
                Ok(())
            }
        }
    }

    /// Moves the amplitude of `|x⟩` to `|perm(x)⟩`. `perm` must be a bijection
    /// on `0..2^n`.
    pub fn apply_permutation(&mut self, perm: impl Fn(BasisIndex) -> BasisIndex + Sync) -> Result<()> {
        permutation_kernel(&mut self.amplitudes, 0, perm)
    }

    /// Permutes the value held in `field`, leaving the other qubits alone.
    pub fn apply_field_permutation(
        &mut self,
        field: Field,
        map: impl Fn(usize) -> usize + Sync,
    ) -> Result<()> {
        self.check_field(field)?;
        permutation_kernel(&mut self.amplitudes, 0, |x| field.set(x, map(field.get(x))))
    }

    /// Multiplies each amplitude by `e^{i·phase(x)}`.
    pub fn apply_diagonal(&mut self, phase: impl Fn(BasisIndex) -> f64 + Sync) {
        diagonal_kernel(&mut self.amplitudes, 0, phase);
    }

    /// Flips the sign of every basis state selected by `predicate`.
    pub fn apply_sign_flip(&mut self, predicate: impl Fn(BasisIndex) -> bool + Sync) {
        diagonal_kernel(&mut self.amplitudes, 0, |x| if predicate(x) { PI } else { 0.0 });
    }

    /// Multiplies the whole state by `factor`.
    pub fn apply_global_phase(&mut self, phase: f64) {
        let f = phase_factor(phase);
        self.amplitudes.iter_mut().for_each(|a| *a *= f);
    }

    /// `Σ |a_x|²` over basis states selected by `predicate`.
    pub fn probability_of(&self, predicate: impl Fn(BasisIndex) -> bool) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(x, _)| predicate(*x))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Exact outcome distribution of measuring `qubits`; entry `k` has bit `i`
    /// equal to the outcome of `qubits[i]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_distinct(qubits)?;
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (x, a) in self.amplitudes.iter().enumerate() {
            dist[gather(x, qubits)] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Exact distribution of the integer held in `field`.
    pub fn field_distribution(&self, field: Field) -> Result<Vec<f64>> {
        self.check_field(field)?;
        let mut dist = vec![0.0; 1 << field.width];
        for (x, a) in self.amplitudes.iter().enumerate() {
            dist[field.get(x)] += a.norm_sqr();
        }
        Ok(dist)
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        let mut seen = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Samples `qubits` from their exact marginal with a single uniform draw,
    /// then collapses and renormalises.
    pub fn measure_qubits<R: Rng + ?Sized>(
        self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        if qubits.is_empty() {
            return Err(Error::EmptyMeasurement);
        }
        let dist = self.marginal(qubits)?;
        let result = sample_index(&dist, rng.random::<f64>());
        let probability = dist[result];
        let scale = 1.0 / probability.sqrt();
        let mut amplitudes = self.amplitudes;
        for (x, a) in amplitudes.iter_mut().enumerate() {
            if gather(x, qubits) == result {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementOutcome {
            result,
            probability,
            post_state: QuantumRegister {
                n_qubits: self.n_qubits,
                amplitudes,
            },
        })
    }
}

/// Picks the outcome whose cumulative interval contains `u · Σ dist`,
/// skipping zero-probability outcomes.
pub fn sample_index(dist: &[f64], u: f64) -> usize {
    let total: f64 = dist.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &p) in dist.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last_nonzero = k;
        if target < acc {
            return k;
        }
    }
    last_nonzero
}

#[inline]
fn gather(x: BasisIndex, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((x >> q) & 1) << i))
}

fn single_qubit_kernel(amps: &mut [Complex64], qubit: usize, u: &Matrix2, mask: usize) {
    let bit = 1usize << qubit;
    let [[u00, u01], [u10, u11]] = *u;
    let update = |base: usize, lo: &mut [Complex64], hi: &mut [Complex64]| {
        for (off, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if (base + off) & mask != mask {
                continue;
            }
            let (x, y) = (*a, *b);
            *a = u00 * x + u01 * y;
            *b = u10 * x + u11 * y;
        }
    };
    let stride = bit << 1;
    if amps.len() >= PARALLEL_THRESHOLD && amps.len() / stride >= 16 {
        amps.par_chunks_mut(stride).enumerate().for_each(|(c, chunk)| {
            let (lo, hi) = chunk.split_at_mut(bit);
            update(c * stride, lo, hi);
        });
    } else if amps.len() >= PARALLEL_THRESHOLD {
        for (c, chunk) in amps.chunks_mut(stride).enumerate() {
            let (lo, hi) = chunk.split_at_mut(bit);
            let base = c * stride;
            lo.par_chunks_mut(1024)
                .zip(hi.par_chunks_mut(1024))
                .enumerate()
                .for_each(|(k, (l, h))| update(base + k * 1024, l, h));
        }
    } else {
        for (c, chunk) in amps.chunks_mut(stride).enumerate() {
            let (lo, hi) = chunk.split_at_mut(bit);
            update(c * stride, lo, hi);
        }
    }
}

fn permutation_kernel(
    amps: &mut Vec<Complex64>,
    mask: usize,
    perm: impl Fn(BasisIndex) -> BasisIndex + Sync,
) -> Result<()> {
    let dim = amps.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    let mut seen = if cfg!(debug_assertions) {
        vec![false; dim]
    } else {
        Vec::new()
    };
    for (x, a) in amps.iter().enumerate() {
        let y = if x & mask == mask { perm(x) } else { x };
        if y >= dim {
            return Err(Error::NotBijective);
        }
        if !seen.is_empty() {
            if seen[y] {
                return Err(Error::NotBijective);
            }
            seen[y] = true;
        }
        out[y] = *a;
    }
    *amps = out;
    Ok(())
}

fn diagonal_kernel(amps: &mut [Complex64], mask: usize, phase: impl Fn(BasisIndex) -> f64 + Sync) {
    let touch = |(x, a): (usize, &mut Complex64)| {
        if x & mask != mask {
            return;
        }
        let p = phase(x);
        if p != 0.0 {
            *a *= phase_factor(p);
        }
    };
    if amps.len() >= PARALLEL_THRESHOLD {
        amps.par_iter_mut().enumerate().for_each(touch);
    } else {
        amps.iter_mut().enumerate().for_each(touch);
    }
}
