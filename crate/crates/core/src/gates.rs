//! Gate constructors and oracle adapters.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::number_theory;
use crate::state::{Field, Matrix2, QuantumRegister};

pub type Matrix4 = [[Complex64; 4]; 4];

/// A phase in radians. Stored as given; reduction mod 2π only happens when
/// comparing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    pub fn new(radians: f64) -> Self {
        assert!(radians.is_finite(), "phase angle must be finite");
        PhaseAngle(radians)
    }

    /// `2π · fraction`.
    pub fn from_fraction(fraction: f64) -> Self {
        PhaseAngle::new(TAU * fraction)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// `radians / 2π`, not reduced.
    pub fn fraction(self) -> f64 {
        self.0 / TAU
    }

    /// Scales by an integer power, e.g. the angle of `U^k` for `U` with this eigenphase.
    pub fn times(self, k: u64) -> Self {
        PhaseAngle(self.0 * k as f64)
    }

    /// Distance on the circle, in `[0, π]`.
    pub fn circular_distance(self, other: PhaseAngle) -> f64 {
        let d = (self.0 - other.0).rem_euclid(TAU);
        d.min(TAU - d)
    }

    pub fn equivalent(self, other: PhaseAngle, tol: f64) -> bool {
        self.circular_distance(other) <= tol
    }
}

impl std::ops::Neg for PhaseAngle {
    type Output = PhaseAngle;

    fn neg(self) -> Self {
        PhaseAngle(-self.0)
    }
}

#[derive(Clone)]
enum Eval {
    Table(Arc<[usize]>),
    Closure(Arc<dyn Fn(usize) -> usize + Send + Sync>),
}

/// A black-box function on `domain_bits`-bit inputs with outputs in
/// `0..codomain_modulus`. Must be deterministic.
#[derive(Clone)]
pub struct OracleFunction {
    domain_bits: usize,
    codomain_modulus: usize,
    eval: Eval,
}

impl fmt::Debug for OracleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.eval {
            Eval::Table(_) => "table",
            Eval::Closure(_) => "closure",
        };
        f.debug_struct("OracleFunction")
            .field("domain_bits", &self.domain_bits)
            .field("codomain_modulus", &self.codomain_modulus)
            .field("kind", &kind)
            .finish()
    }
}

/// Closures over domains up to this size are checked exhaustively on construction.
const EXHAUSTIVE_CHECK_BITS: usize = 20;
const MAX_TABLE_BITS: usize = 16;

impl OracleFunction {
    pub fn from_table(codomain_modulus: usize, table: Vec<usize>) -> Result<Self> {
        let len = table.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "truth table length {len} is not a power of two"
            )));
        }
        let domain_bits = len.trailing_zeros() as usize;
        if domain_bits > MAX_TABLE_BITS {
            return Err(Error::invalid(format!(
                "truth tables are limited to 2^{MAX_TABLE_BITS} entries"
            )));
        }
        if codomain_modulus == 0 {
            return Err(Error::invalid("codomain modulus must be positive"));
        }
        if let Some((x, v)) = table.iter().enumerate().find(|(_, &v)| v >= codomain_modulus) {
            return Err(Error::invalid(format!(
                "f({x}) = {v} is outside 0..{codomain_modulus}"
            )));
        }
        Ok(OracleFunction {
            domain_bits,
            codomain_modulus,
            eval: Eval::Table(table.into()),
        })
    }

    /// Boolean function from a bitstring where character `i` is `f(i)`.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let table = bits
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::invalid(format!("truth table character {other:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        OracleFunction::from_table(2, table)
    }

    pub fn from_fn(
        domain_bits: usize,
        codomain_modulus: usize,
        f: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> Result<Self> {
        if domain_bits == 0 || domain_bits >= usize::BITS as usize {
            return Err(Error::invalid("domain must have between 1 and 63 bits"));
        }
        if codomain_modulus == 0 {
            return Err(Error::invalid("codomain modulus must be positive"));
        }
        if domain_bits <= EXHAUSTIVE_CHECK_BITS {
            if let Some(x) = (0..1usize << domain_bits).find(|&x| f(x) >= codomain_modulus) {
                return Err(Error::invalid(format!(
                    "f({x}) = {} is outside 0..{codomain_modulus}",
                    f(x)
                )));
            }
        }
        Ok(OracleFunction {
            domain_bits,
            codomain_modulus,
            eval: Eval::Closure(Arc::new(f)),
        })
    }

    /// Boolean oracle with a single marked input.
    pub fn single_target(domain_bits: usize, target: usize) -> Result<Self> {
        if domain_bits < usize::BITS as usize && target >> domain_bits != 0 {
            return Err(Error::invalid(format!(
                "target {target} does not fit in {domain_bits} bits"
            )));
        }
        OracleFunction::from_fn(domain_bits, 2, move |x| usize::from(x == target))
    }

    pub fn domain_bits(&self) -> usize {
        self.domain_bits
    }

    pub fn domain_size(&self) -> usize {
        1 << self.domain_bits
    }

    pub fn codomain_modulus(&self) -> usize {
        self.codomain_modulus
    }

    /// Bits needed for an output register; requires a power-of-two modulus.
    pub fn codomain_bits(&self) -> Result<usize> {
        if !self.codomain_modulus.is_power_of_two() {
            return Err(Error::invalid(format!(
                "codomain modulus {} is not a power of two",
                self.codomain_modulus
            )));
        }
        Ok((self.codomain_modulus.trailing_zeros() as usize).max(1))
    }

    pub fn is_boolean(&self) -> bool {
        self.codomain_modulus == 2
    }

    #[inline]
    pub fn eval(&self, x: usize) -> usize {
        match &self.eval {
            Eval::Table(t) => t[x],
            Eval::Closure(f) => f(x),
        }
    }

    pub fn truth_table(&self) -> Vec<usize> {
        (0..self.domain_size()).map(|x| self.eval(x)).collect()
    }

    /// Number of inputs with nonzero output.
    pub fn count_solutions(&self) -> usize {
        (0..self.domain_size()).filter(|&x| self.eval(x) != 0).count()
    }
}

/// `(1/√2)[[1, 1], [1, −1]]`.
pub fn hadamard() -> Matrix2 {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

/// `diag(1, e^{iφ})`.
pub fn phase_shift(phi: PhaseAngle) -> Matrix2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, unit_phase(phi.radians())]]
}

pub fn pauli_x() -> Matrix2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[zero, one], [one, zero]]
}

fn unit_phase(radians: f64) -> Complex64 {
    if radians == PI || radians == -PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, radians)
    }
}

/// The two-qubit gate `R(φ) = diag(1, 1, 1, e^{iφ})`, i.e. `|x⟩|y⟩ ↦ e^{ixyφ}|x⟩|y⟩`.
pub fn conditional_phase(phi: PhaseAngle) -> Matrix4 {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (k, row) in m.iter_mut().enumerate().take(3) {
        row[k] = Complex64::new(1.0, 0.0);
    }
    m[3][3] = unit_phase(phi.radians());
    m
}

/// Applies `R(φ)` to qubits `a` and `b` of `reg`.
pub fn apply_conditional_phase(reg: &mut QuantumRegister, a: usize, b: usize, phi: PhaseAngle) -> Result<()> {
    reg.apply_controlled(
        a,
        &crate::state::Action::Single {
            qubit: b,
            matrix: phase_shift(phi),
        },
    )
}

pub fn is_unitary4(m: &Matrix4, tol: f64) -> bool {
    for i in 0..4 {
        for j in 0..4 {
            let dot: Complex64 = (0..4).map(|k| m[k][i].conj() * m[k][j]).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot - Complex64::new(expected, 0.0)).norm() > tol {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    /// `y ⊕ f(x)`
    Xor,
    /// `y + f(x) mod 2^m`
    Add,
}

/// Reversible evaluation of an oracle from an input register into an output register.
#[derive(Clone, Debug)]
pub struct FunctionEvaluation {
    f: OracleFunction,
    combine: Combine,
    output_bits: usize,
}

/// `|x⟩|y⟩ ↦ |x⟩|y ⊕ f(x)⟩`. Self-inverse. For Boolean `f` the output is one qubit.
pub fn f_controlled_not(f: &OracleFunction) -> Result<FunctionEvaluation> {
    Ok(FunctionEvaluation {
        output_bits: f.codomain_bits()?,
        f: f.clone(),
        combine: Combine::Xor,
    })
}

/// `|x⟩|y⟩ ↦ |x⟩|y + f(x) mod 2^m⟩`.
pub fn f_controlled_add(f: &OracleFunction, m: usize) -> Result<FunctionEvaluation> {
    if m == 0 || m >= usize::BITS as usize {
        return Err(Error::invalid("output register must have 1..63 qubits"));
    }
    if f.codomain_modulus() > 1 << m {
        return Err(Error::invalid(format!(
            "oracle outputs up to {} do not fit in {m} bits",
            f.codomain_modulus() - 1
        )));
    }
    Ok(FunctionEvaluation {
        f: f.clone(),
        combine: Combine::Add,
        output_bits: m,
    })
}

impl FunctionEvaluation {
    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn combine(&self) -> Combine {
        self.combine
    }

    fn check_layout(&self, input: Field, output: Field) -> Result<()> {
        if input.width != self.f.domain_bits() {
            return Err(Error::invalid(format!(
                "input field has {} qubits, oracle expects {}",
                input.width,
                self.f.domain_bits()
            )));
        }
        if output.width != self.output_bits {
            return Err(Error::invalid(format!(
                "output field has {} qubits, gate expects {}",
                output.width, self.output_bits
            )));
        }
        if let Some(q) = input.qubits().find(|&q| output.contains(q)) {
            return Err(Error::OverlappingQubits(q));
        }
        Ok(())
    }

    /// Basis map on full register indices.
    pub fn index_map(&self, input: Field, output: Field) -> impl Fn(usize) -> usize + Sync + '_ {
        let out_mask = (1usize << self.output_bits) - 1;
        move |idx| {
            let x = input.get(idx);
            let y = output.get(idx);
            let fx = self.f.eval(x);
            let y2 = match self.combine {
                Combine::Xor => y ^ fx,
                Combine::Add => (y + fx) & out_mask,
            };
            output.set(idx, y2)
        }
    }

    pub fn apply(&self, reg: &mut QuantumRegister, input: Field, output: Field) -> Result<()> {
        self.check_layout(input, output)?;
        if output.end().max(input.end()) > reg.n_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: output.end().max(input.end()) - 1,
                n_qubits: reg.n_qubits(),
            });
        }
        reg.apply_permutation(self.index_map(input, output))
    }
}

/// `U_a: |x⟩ ↦ |a·x mod N⟩` on `width` qubits, identity on `x ≥ N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModularMultiplier {
    multiplier: u64,
    modulus: u64,
    width: usize,
}

pub fn modular_mult_gate(a: u64, modulus: u64, width: usize) -> Result<ModularMultiplier> {
    if modulus < 1 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if width == 0 || width >= 64 || modulus > 1u64 << width {
        return Err(Error::invalid(format!(
            "modulus {modulus} does not fit in {width} qubits"
        )));
    }
    let a = a % modulus;
    if number_theory::gcd(a, modulus) != 1 {
        return Err(Error::NotCoprime { a, modulus });
    }
    Ok(ModularMultiplier {
        multiplier: a,
        modulus,
        width,
    })
}

impl ModularMultiplier {
    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn map(&self, x: usize) -> usize {
        let x64 = x as u64;
        if x64 < self.modulus {
            ((x64 as u128 * self.multiplier as u128) % self.modulus as u128) as usize
        } else {
            x
        }
    }

    /// `U_a^e = U_{a^e mod N}`.
    pub fn power(&self, e: u64) -> ModularMultiplier {
        ModularMultiplier {
            multiplier: number_theory::mod_pow(self.multiplier, e, self.modulus),
            ..*self
        }
    }

    /// `U_a^{2^j}` by `j` classical squarings.
    pub fn power_of_two(&self, j: u32) -> ModularMultiplier {
        let mut m = self.multiplier;
        for _ in 0..j {
            m = ((m as u128 * m as u128) % self.modulus as u128) as u64;
        }
        ModularMultiplier {
            multiplier: m,
            ..*self
        }
    }

    pub fn inverse(&self) -> ModularMultiplier {
        let inv = number_theory::mod_inverse(self.multiplier, self.modulus)
            .expect("multiplier is coprime to modulus by construction");
        ModularMultiplier {
            multiplier: inv,
            ..*self
        }
    }
}

/// `(|0⟩ − |1⟩)/√2`, the eigenstate that turns XOR evaluation into a sign.
pub fn minus_state() -> QuantumRegister {
    let s = FRAC_1_SQRT_2;
    QuantumRegister::from_amplitudes(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)])
        .expect("normalised")
}

/// `2^{-m/2} Σ_y e^{−2πiy/2^m}|y⟩`, the eigenstate of `|y⟩ ↦ |y + 1 mod 2^m⟩`.
pub fn fourier_eigenstate(m: usize) -> Result<QuantumRegister> {
    crate::state::check_register_size(m)?;
    let dim = 1usize << m;
    let norm = 1.0 / (dim as f64).sqrt();
    let amps = (0..dim)
        .map(|y| Complex64::from_polar(norm, -TAU * y as f64 / dim as f64))
        .collect();
    QuantumRegister::from_amplitudes(amps)
}
