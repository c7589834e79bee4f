//! Hidden subgroups of Z₂ⁿ (Simon's problem), with Deutsch as the `n = 1` case.
//!
//! Each run of the network yields a uniformly random `y` with `y·k = 0` for
//! every `k ∈ K`; the null space of enough such `y`s over GF(2) is `K`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{f_controlled_not, hadamard, OracleFunction};
use crate::state::{check_register_size, Field, QuantumRegister};

/// Linear span over GF(2) in echelon form: rows have distinct leading bits and
/// no row has another row's leading bit set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Gf2Basis {
    rows: Vec<usize>,
}

fn leading_bit(v: usize) -> usize {
    (usize::BITS - 1 - v.leading_zeros()) as usize
}

impl Gf2Basis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors(vectors: &[usize]) -> Self {
        let mut b = Self::new();
        for &v in vectors {
            b.insert(v);
        }
        b
    }

    /// Sorted by leading bit, highest first.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The canonical representative of `v + span`: every leading bit cleared.
    /// Linear, with kernel exactly the span.
    pub fn reduce(&self, mut v: usize) -> usize {
        for &r in &self.rows {
            if v >> leading_bit(r) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: usize) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let lead = leading_bit(v);
        for r in &mut self.rows {
            if *r >> lead & 1 == 1 {
                *r ^= v;
            }
        }
        let pos = self.rows.partition_point(|&r| leading_bit(r) > lead);
        self.rows.insert(pos, v);
        true
    }

    pub fn contains(&self, v: usize) -> bool {
        self.reduce(v) == 0
    }

    /// Basis of `{k ∈ Z₂ⁿ : y·k = 0 for every row y}`.
    pub fn null_space(&self, n: usize) -> Vec<usize> {
        let pivots: Vec<usize> = self.rows.iter().map(|&r| leading_bit(r)).collect();
        (0..n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut k = 1usize << free;
                for (&r, &p) in self.rows.iter().zip(&pivots) {
                    if r >> free & 1 == 1 {
                        k |= 1 << p;
                    }
                }
                k
            })
            .collect()
    }

    /// Every element of the span, sorted.
    pub fn elements(&self) -> Vec<usize> {
        let mut out = vec![0usize];
        for &r in &self.rows {
            let more: Vec<usize> = out.iter().map(|&e| e ^ r).collect();
            out.extend(more);
        }
        out.sort_unstable();
        out
    }
}

/// `y·k mod 2`.
pub fn dot(y: usize, k: usize) -> u32 {
    (y & k).count_ones() % 2
}

/// Largest `n` for which the `2n`-qubit network is simulated.
pub const MAX_SIMON_BITS: usize = 12;

/// `f` on `Z₂ⁿ`, promised constant and distinct on the cosets of `K`.
#[derive(Clone, Debug)]
pub struct HiddenSubgroupInstance {
    n: usize,
    oracle: OracleFunction,
}

impl HiddenSubgroupInstance {
    /// The instance with `K = span(generators)` and `f(x)` the canonical
    /// representative of `x + K`.
    pub fn from_generators(n: usize, generators: &[usize]) -> Result<Self> {
        if n == 0 || n > MAX_SIMON_BITS {
            return Err(Error::invalid(format!("n = {n} is outside 1..={MAX_SIMON_BITS}")));
        }
        if let Some(g) = generators.iter().find(|&&g| g >> n != 0) {
            return Err(Error::invalid(format!("generator {g:#x} does not fit in {n} bits")));
        }
        let basis = Gf2Basis::from_vectors(generators);
        let table = (0..1usize << n).map(|x| basis.reduce(x)).collect();
        Ok(HiddenSubgroupInstance {
            n,
            oracle: OracleFunction::from_table(1 << n, table)?,
        })
    }

    /// `K = {0, mask}`.
    pub fn from_mask(n: usize, mask: usize) -> Result<Self> {
        Self::from_generators(n, &[mask])
    }

    /// Wraps an arbitrary oracle; the coset promise is the caller's.
    pub fn from_oracle(oracle: OracleFunction) -> Result<Self> {
        let n = oracle.domain_bits();
        if n > MAX_SIMON_BITS {
            return Err(Error::invalid(format!("n = {n} exceeds {MAX_SIMON_BITS}")));
        }
        Ok(HiddenSubgroupInstance { n, oracle })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn oracle(&self) -> &OracleFunction {
        &self.oracle
    }

    /// `{x : f(x) = f(0)}`, sorted. Equals `K` under the promise.
    pub fn hidden_subgroup_brute_force(&self) -> Vec<usize> {
        let f0 = self.oracle.eval(0);
        (0..1usize << self.n).filter(|&x| self.oracle.eval(x) == f0).collect()
    }

    /// Exhaustive check of `f(x) = f(y) ⟺ x ⊕ y ∈ K`.
    pub fn satisfies_promise(&self) -> bool {
        let k = self.hidden_subgroup_brute_force();
        let in_k = |v: usize| k.binary_search(&v).is_ok();
        let dim = 1usize << self.n;
        let closed = k.iter().all(|&a| k.iter().all(|&b| in_k(a ^ b)));
        closed
            && (0..dim).all(|x| {
                (0..dim).all(|y| (self.oracle.eval(x) == self.oracle.eval(y)) == in_k(x ^ y))
            })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimonResult {
    /// Basis of the recovered subgroup.
    pub generators: Vec<usize>,
    /// Measured `y`s, in order.
    pub samples: Vec<usize>,
    /// Quantum oracle evaluations (one per sample).
    pub queries: usize,
    /// Classical evaluations of `f` used to certify the answer.
    pub classical_checks: usize,
    pub register_qubits: usize,
}

impl SimonResult {
    pub fn subgroup(&self) -> Vec<usize> {
        Gf2Basis::from_vectors(&self.generators).elements()
    }
}

/// The pre-measurement state of `H^{⊗n} · U_f · H^{⊗n} |0⟩|0⟩`.
pub fn simon_network(instance: &HiddenSubgroupInstance) -> Result<QuantumRegister> {
    let n = instance.n;
    let eval = f_controlled_not(&instance.oracle)?;
    let m = eval.output_bits();
    check_register_size(n + m)?;
    let mut reg = QuantumRegister::new(n + m, 0)?;
    let h = hadamard();
    for q in 0..n {
        reg.apply_single_qubit(q, &h)?;
    }
    eval.apply(&mut reg, Field::new(0, n), Field::new(n, m))?;
    for q in 0..n {
        reg.apply_single_qubit(q, &h)?;
    }
    Ok(reg)
}

/// Samples orthogonal elements until their null space is certified to be `K`:
/// the null space always contains `K`, and it is `K` once `f(g) = f(0)` for
/// each of its basis vectors `g`.
///
/// The network is identical for every query up to measurement, so it is
/// evaluated once and each query measures a copy.
pub fn simon_solve<R: Rng + ?Sized>(
    instance: &HiddenSubgroupInstance,
    rng: &mut R,
    max_queries: usize,
) -> Result<SimonResult> {
    let n = instance.n;
    let f = &instance.oracle;
    let f0 = f.eval(0);
    let mut classical_checks = 1;
    let prepared = simon_network(instance)?;
    let register_qubits = prepared.n_qubits();
    let inputs: Vec<usize> = (0..n).collect();
    let mut span = Gf2Basis::new();
    let mut samples = Vec::new();
    let mut candidate = span.null_space(n);
    let certify = |cand: &[usize], checks: &mut usize| {
        cand.iter().all(|&g| {
            *checks += 1;
            f.eval(g) == f0
        })
    };
    if certify(&candidate, &mut classical_checks) {
        return Ok(SimonResult {
            generators: candidate,
            samples,
            queries: 0,
            classical_checks,
            register_qubits,
        });
    }
    for query in 1..=max_queries {
        let y = prepared.clone().measure_qubits(&inputs, rng)?.result;
        samples.push(y);
        if span.insert(y) {
            candidate = span.null_space(n);
            if certify(&candidate, &mut classical_checks) {
                return Ok(SimonResult {
                    generators: candidate,
                    samples,
                    queries: query,
                    classical_checks,
                    register_qubits,
                });
            }
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: max_queries,
        reason: format!("orthogonal samples reached rank {} of at most {n}", span.rank()),
    })
}
