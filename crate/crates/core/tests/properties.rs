use phasekit::algorithms::hidden_subgroup::{dot, Gf2Basis};
use phasekit::gates::{hadamard, phase_shift, PhaseAngle};
use phasekit::number_theory::{continued_fraction_match, extended_gcd, gcd, mod_pow};
use phasekit::phase_estimation::output_distribution_for_fraction;
use phasekit::qft::{dft_reference, inverse_qft, qft};
use phasekit::{Complex64, QuantumRegister};
use proptest::prelude::*;

fn random_state(n: usize) -> impl Strategy<Value = QuantumRegister> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1usize << n).prop_filter_map("zero vector", |v| {
        let amps: Vec<Complex64> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| QuantumRegister::from_amplitudes(amps.iter().map(|a| a / norm).collect()).unwrap())
    })
}

proptest! {
    #[test]
    fn gates_preserve_norm(state in random_state(4), ops in prop::collection::vec((0usize..4, 0.0f64..1.0), 1..12)) {
        let mut reg = state;
        for (q, phi) in ops {
            reg.apply_single_qubit(q, &hadamard()).unwrap();
            reg.apply_single_qubit((q + 1) % 4, &phase_shift(PhaseAngle::from_fraction(phi))).unwrap();
        }
        prop_assert!((reg.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qft_round_trip(state in random_state(5)) {
        let qubits: Vec<usize> = (0..5).collect();
        let mut reg = state.clone();
        qft(&mut reg, &qubits).unwrap();
        inverse_qft(&mut reg, &qubits).unwrap();
        prop_assert!((reg.fidelity(&state) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn qft_matches_dft_on_superpositions(state in random_state(5)) {
        let qubits: Vec<usize> = (0..5).collect();
        let mut reg = state.clone();
        qft(&mut reg, &qubits).unwrap();
        let reference = dft_reference(state.amplitudes()).unwrap();
        for (a, b) in reg.amplitudes().iter().zip(&reference) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn estimation_distribution_is_normalised(omega in 0.0f64..1.0, n in 1usize..10) {
        let dist = output_distribution_for_fraction(omega, n);
        prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(dist.iter().all(|p| *p >= -1e-15));
    }

    #[test]
    fn estimation_distribution_symmetries(omega in 0.0f64..1.0, n in 1usize..8) {
        let s = 1usize << n;
        let d = output_distribution_for_fraction(omega, n);
        let shifted = output_distribution_for_fraction((omega + 1.0 / s as f64) % 1.0, n);
        let mirrored = output_distribution_for_fraction((1.0 - omega) % 1.0, n);
        for y in 0..s {
            prop_assert!((shifted[(y + 1) % s] - d[y]).abs() < 1e-9);
            prop_assert!((mirrored[(s - y) % s] - d[y]).abs() < 1e-9);
        }
    }

    #[test]
    fn extended_gcd_is_bezout(a in 0i128..1_000_000, b in 0i128..1_000_000) {
        let (g, x, y) = extended_gcd(a, b).unwrap();
        prop_assert_eq!(g, gcd(a as u64, b as u64) as i128);
        prop_assert_eq!(a * x + b * y, g);
    }

    #[test]
    fn mod_pow_matches_repeated_multiplication(a in 0u64..10_000, x in 0u64..200, n in 1u64..10_000) {
        let naive = (0..x).fold(1 % n, |acc, _| acc * (a % n) % n);
        prop_assert_eq!(mod_pow(a, x, n), naive);
    }

    #[test]
    fn cf_match_recovers_close_fractions(num in 0u64..40, den in 1u64..=40, m in 12u32..20) {
        prop_assume!(num < den);
        let scale = 1u64 << m;
        // rounding error 2^-(m+1) stays below 1/(2·40²) for m ≥ 12
        let y = (num as u128 * scale as u128 * 2 + den as u128) / (2 * den as u128);
        prop_assume!(y < scale as u128);
        let f = continued_fraction_match(y as u64, m, 40).unwrap();
        let g = gcd(num, den);
        prop_assert_eq!((f.numerator(), f.denominator()), (num / g, den / g));
    }

    #[test]
    fn null_space_is_orthogonal_complement(vectors in prop::collection::vec(0usize..256, 0..8)) {
        let n = 8;
        let basis = Gf2Basis::from_vectors(&vectors);
        let null = basis.null_space(n);
        prop_assert_eq!(basis.rank() + null.len(), n);
        for &k in &null {
            prop_assert!(vectors.iter().all(|&v| dot(v, k) == 0));
        }
        prop_assert_eq!(Gf2Basis::from_vectors(&null).rank(), null.len());
    }
}
