//! Order finding and factoring.
//!
//! The target register starts in `|1⟩`, which is the uniform superposition of
//! the eigenvectors `|ψ_k⟩` of `U_a`, with eigenphases `k/r`. Phase estimation
//! therefore returns `y ≈ 2^m k/r` for a uniformly random `k`, and continued
//! fractions recover `r` (or a divisor of it, when `k` shares a factor with `r`).

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{modular_mult_gate, ModularMultiplier};
use crate::number_theory::{
    continued_fraction_match, factor_by_trial_division, gcd, is_prime, is_prime_power, mod_pow,
    split_from_order, Factorization, Fraction,
};
use crate::phase_estimation::{estimate_phase, run_network, ControlledPowerDevice, CostModel};
use crate::state::{check_register_size, max_qubits, Action, Field, QuantumRegister};

/// Controlled `U_a^{2^j} = U_{a^{2^j} mod N}`, built by classical squaring.
#[derive(Clone, Copy, Debug)]
pub struct ModularMultiplierDevice {
    pub gate: ModularMultiplier,
}

impl ControlledPowerDevice for ModularMultiplierDevice {
    fn target_qubits(&self) -> usize {
        self.gate.width()
    }

    fn cost_model(&self) -> CostModel {
        CostModel::Squaring
    }

    fn apply_power(&self, reg: &mut QuantumRegister, control: usize, target: Field, j: u32) -> Result<()> {
        let g = self.gate.power_of_two(j);
        let map = move |x: usize| g.map(x);
        reg.apply_controlled(control, &Action::Permutation { field: target, map: &map })
    }
}

/// `⌈log₂ n⌉`, at least 1.
pub fn target_width(n: u64) -> usize {
    if n <= 2 {
        1
    } else {
        (u64::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `2⌈log₂N⌉ + 1` control qubits, enough to resolve `k/r` within `1/(2N²)`.
pub fn default_precision(n: u64) -> usize {
    2 * target_width(n) + 1
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderResult {
    /// Verified order, or `None` when this run's measurement was unlucky.
    pub order: Option<u64>,
    pub y: usize,
    pub precision_bits: usize,
    pub target_qubits: usize,
    pub register_qubits: usize,
    /// The matched fraction `k/r` after reduction, if any.
    pub fraction: Option<Fraction>,
    /// Controlled multiplier gates applied (one per control qubit).
    pub oracle_calls: u64,
}

fn check_order_input(a: u64, n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("modulus {n} must be at least 2")));
    }
    if a == 0 || a >= n {
        return Err(Error::invalid(format!("base {a} must lie in 1..{n}")));
    }
    if gcd(a, n) != 1 {
        return Err(Error::NotCoprime { a, modulus: n });
    }
    Ok(())
}

fn order_device(a: u64, n: u64) -> Result<(ModularMultiplierDevice, QuantumRegister)> {
    let width = target_width(n);
    let gate = modular_mult_gate(a, n, width)?;
    Ok((ModularMultiplierDevice { gate }, QuantumRegister::new(width, 1)?))
}

/// Classical post-processing of one readout: continued fractions, then the
/// smallest of `b, 2b, 3b` with `a^{r} ≡ 1`.
///
/// For a readout near `k/r` the denominator `b` divides `r`, so that candidate
/// is already the order. A rare tail readout can match an unrelated fraction
/// whose multiple is only a multiple of `r`; prime factors are stripped while
/// the power stays 1, so the returned value is always the exact order.
pub fn order_from_measurement(a: u64, n: u64, y: usize, precision_bits: usize) -> Option<(u64, Fraction)> {
    let frac = continued_fraction_match(y as u64, precision_bits as u32, n)?;
    let b = frac.denominator();
    (1..=3)
        .map(|c| c * b)
        .find(|&r| mod_pow(a, r, n) == 1)
        .map(|r| (minimal_exponent(a, r, n), frac))
}

/// The least divisor `d` of `r` with `a^d ≡ 1`, given `a^r ≡ 1`.
fn minimal_exponent(a: u64, mut r: u64, n: u64) -> u64 {
    for (&p, &e) in factor_by_trial_division(r).prime_powers() {
        for _ in 0..e {
            if mod_pow(a, r / p, n) != 1 {
                break;
            }
            r /= p;
        }
    }
    r
}

/// One run of quantum order finding for `a` modulo `n`.
pub fn shor_order<R: Rng + ?Sized>(
    a: u64,
    n: u64,
    precision_bits: Option<usize>,
    rng: &mut R,
) -> Result<OrderResult> {
    check_order_input(a, n)?;
    let m = precision_bits.unwrap_or_else(|| default_precision(n));
    if m == 0 || m > 62 {
        return Err(Error::invalid("precision must be between 1 and 62 bits"));
    }
    let (device, target) = order_device(a, n)?;
    check_register_size(m + target.n_qubits())?;
    let run = estimate_phase(&device, &target, m, rng)?;
    let y = run.estimate.y;
    let found = order_from_measurement(a, n, y, m);
    Ok(OrderResult {
        order: found.map(|(r, _)| r),
        y,
        precision_bits: m,
        target_qubits: target.n_qubits(),
        register_qubits: run.register_qubits,
        fraction: continued_fraction_match(y as u64, m as u32, n),
        oracle_calls: run.base_applications,
    })
}

/// Exact readout distribution of [`shor_order`] from the simulated network.
pub fn order_outcome_distribution(a: u64, n: u64, precision_bits: usize) -> Result<Vec<f64>> {
    check_order_input(a, n)?;
    let (device, target) = order_device(a, n)?;
    Ok(run_network(&device, &target, precision_bits)?.distribution())
}

/// Exact probability that a single run returns the true order `r`.
pub fn order_success_probability(a: u64, n: u64, precision_bits: usize, r: u64) -> Result<f64> {
    Ok(order_outcome_distribution(a, n, precision_bits)?
        .iter()
        .enumerate()
        .filter(|(y, _)| order_from_measurement(a, n, *y, precision_bits).map(|(o, _)| o) == Some(r))
        .map(|(_, p)| p)
        .sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorReport {
    pub factors: Factorization,
    /// Quantum order-finding runs performed.
    pub order_runs: usize,
    /// Controlled multiplier gates across all runs.
    pub oracle_calls: u64,
    /// Largest register simulated (0 if everything was classical).
    pub register_qubits: usize,
}

/// Full factorisation of `n`. Even parts and prime powers are handled
/// classically; other composites are split via a random base, either directly
/// by `gcd` or by quantum order finding. At most `max_attempts` bases are tried
/// per split.
pub fn shor_factor<R: Rng + ?Sized>(n: u64, rng: &mut R, max_attempts: usize) -> Result<FactorReport> {
    if n < 2 {
        return Err(Error::invalid(format!("{n} has no prime factorisation")));
    }
    let mut report = FactorReport {
        factors: Factorization::new(),
        order_runs: 0,
        oracle_calls: 0,
        register_qubits: 0,
    };
    factor_into(n, rng, max_attempts, &mut report)?;
    debug_assert_eq!(report.factors.product(), n as u128);
    Ok(report)
}

fn factor_into<R: Rng + ?Sized>(n: u64, rng: &mut R, max_attempts: usize, report: &mut FactorReport) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        report.factors.insert(n, 1);
        return Ok(());
    }
    if n.is_multiple_of(2) {
        let twos = n.trailing_zeros();
        report.factors.insert(2, twos);
        return factor_into(n >> twos, rng, max_attempts, report);
    }
    if let Some((p, e)) = is_prime_power(n)? {
        report.factors.insert(p, e);
        return Ok(());
    }
    let d = split(n, rng, max_attempts, report)?;
    factor_into(d, rng, max_attempts, report)?;
    factor_into(n / d, rng, max_attempts, report)
}

/// A proper divisor of the odd composite non-prime-power `n`.
fn split<R: Rng + ?Sized>(n: u64, rng: &mut R, max_attempts: usize, report: &mut FactorReport) -> Result<u64> {
    let needed = default_precision(n) + target_width(n);
    if needed > max_qubits() {
        return Err(Error::RegisterSize {
            requested: needed,
            max: max_qubits(),
        });
    }
    for _ in 0..max_attempts {
        let a = rng.random_range(2..n);
        let g = gcd(a, n);
        if g > 1 {
            return Ok(g);
        }
        let run = shor_order(a, n, None, rng)?;
        report.order_runs += 1;
        report.oracle_calls += run.oracle_calls;
        report.register_qubits = report.register_qubits.max(run.register_qubits);
        if let Some(r) = run.order {
            if let Some((d, _)) = split_from_order(a, r, n)? {
                return Ok(d);
            }
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: max_attempts,
        reason: format!("no split of {n} found"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::multiplicative_order;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn register_sizes() {
        assert_eq!(target_width(35), 6);
        assert_eq!(default_precision(35), 13);
        assert_eq!(target_width(15), 4);
        assert_eq!(default_precision(15), 9);
        assert_eq!(target_width(2), 1);
        assert_eq!(target_width(16), 4);
        assert_eq!(target_width(17), 5);
    }

    #[test]
    fn order_of_four_mod_35() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = None;
        for _ in 0..20 {
            let run = shor_order(4, 35, None, &mut rng).unwrap();
            assert_eq!(run.precision_bits, 13);
            assert_eq!(run.register_qubits, 19);
            assert_eq!(run.oracle_calls, 13);
            // every readout is the nearest grid point to some k/6
            let s = (1u64 << 13) as f64;
            let k = (run.y as f64 * 6.0 / s).round();
            assert_eq!(run.y as f64, (k * s / 6.0).round() % s);
            if let Some(r) = run.order {
                found = Some(r);
                break;
            }
        }
        assert_eq!(found, Some(6));
    }

    #[test]
    fn trivial_base_has_order_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = shor_order(1, 15, None, &mut rng).unwrap();
        assert_eq!(run.y, 0);
        assert_eq!(run.order, Some(1));
        let dist = order_outcome_distribution(1, 15, 9).unwrap();
        assert!((dist[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn seven_mod_fifteen_distribution() {
        // r = 4 divides 2^9, so the readout is exactly one of 4 multiples of 128
        let dist = order_outcome_distribution(7, 15, 9).unwrap();
        for y in [0, 128, 256, 384] {
            assert!((dist[y] - 0.25).abs() < 1e-9);
        }
        let p = order_success_probability(7, 15, 9, 4).unwrap();
        // y = 0 fails; 1/4 and 3/4 give r directly, 1/2 gives r via the 2b multiple
        assert!((p - 0.75).abs() < 1e-9, "{p}");
        assert!(1.0 - (1.0 - p).powi(2) >= 0.54);
    }

    #[test]
    fn returned_orders_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [15u64, 21, 33] {
            for a in 2..n {
                if gcd(a, n) != 1 {
                    continue;
                }
                let truth = multiplicative_order(a, n).unwrap();
                let run = shor_order(a, n, None, &mut rng).unwrap();
                if let Some(r) = run.order {
                    assert_eq!(r, truth, "a={a} n={n}");
                }
            }
        }
    }

    #[test]
    fn measurement_post_processing() {
        // every y of the exact distribution either fails or yields the true order
        for (a, n) in [(2u64, 15u64), (4, 35), (2, 21)] {
            let m = default_precision(n);
            let truth = multiplicative_order(a, n).unwrap();
            for y in 0..1usize << m {
                if let Some((r, _)) = order_from_measurement(a, n, y, m) {
                    assert_eq!(r, truth);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(shor_order(5, 35, None, &mut rng), Err(Error::NotCoprime { .. })));
        assert!(shor_order(0, 35, None, &mut rng).is_err());
        assert!(shor_order(35, 35, None, &mut rng).is_err());
        assert!(shor_factor(1, &mut rng, 5).is_err());
    }

    #[test]
    fn factoring_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = shor_factor(35, &mut rng, 20).unwrap();
        assert_eq!(r.factors, Factorization::from([(5, 1), (7, 1)]));
        let r = shor_factor(8, &mut rng, 20).unwrap();
        assert_eq!(r.factors, Factorization::from([(2, 3)]));
        assert_eq!(r.order_runs, 0);
        let r = shor_factor(15, &mut rng, 20).unwrap();
        assert_eq!(r.factors, Factorization::from([(3, 1), (5, 1)]));
        assert_eq!(shor_factor(13, &mut rng, 20).unwrap().order_runs, 0);
    }

    #[test]
    fn factoring_matches_trial_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2u64, 9, 12, 21, 27, 33, 39, 45, 51, 60] {
            let r = shor_factor(n, &mut rng, 30).unwrap();
            assert_eq!(r.factors, factor_by_trial_division(n), "n={n}");
        }
    }
}
