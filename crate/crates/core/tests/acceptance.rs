//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Tolerances and runtime budgets are pinned below. Runtimes are measured with
//! the workspace test profile (opt-level 2).

use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use phasekit::algorithms::grover::{
    counting_distribution, counting_distribution_analytic, counting_readout, grover_iterate,
    grover_matrix, grover_search, grover_spectrum, prepared_state, quantum_count, solution_states,
    HadamardPreparation,
};
use phasekit::algorithms::hidden_subgroup::{dot, simon_solve, HiddenSubgroupInstance};
use phasekit::algorithms::interference::{deutsch, mach_zehnder, Verdict};
use phasekit::algorithms::shor::order_success_probability;
use phasekit::gates::{OracleFunction, PhaseAngle};
use phasekit::phase_estimation::{
    best_estimate_probability, best_estimates, boosted_success_probability, estimate_phase,
    extra_qubits, round_to_bits, run_network, circular_distance, PhaseShiftDevice,
};
use phasekit::qft::qft;
use phasekit::{Complex64, QuantumRegister};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn one() -> QuantumRegister {
    QuantumRegister::new(1, 1).unwrap()
}

fn ac01_mach_zehnder() -> Check {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
        let (p0, p1) = mach_zehnder(PhaseAngle::new(a), PhaseAngle::new(b));
        worst = worst.max((p0 - ((a - b) / 2.0).cos().powi(2)).abs());
        ensure((p0 + p1 - 1.0).abs() <= TOL, || format!("P0 + P1 = {}", p0 + p1))?;
    }
    ensure(worst <= TOL, || format!("max |ΔP0| = {worst:.2e}"))?;
    Ok(format!("max |ΔP0| = {worst:.1e} over 100 phase pairs"))
}

fn ac02_deutsch() -> Check {
    const TOL: f64 = 1e-12;
    for (bits, expected) in [
        ("00", Verdict::Constant),
        ("11", Verdict::Constant),
        ("01", Verdict::Balanced),
        ("10", Verdict::Balanced),
    ] {
        let v = deutsch(&OracleFunction::from_bitstring(bits).unwrap()).map_err(|e| e.to_string())?;
        ensure(v.verdict == expected, || format!("f={bits}: got {:?}", v.verdict))?;
        ensure((v.bit_probability - 1.0).abs() <= TOL, || format!("f={bits}: P = {}", v.bit_probability))?;
        ensure(v.oracle_calls == 1, || format!("f={bits}: {} oracle calls", v.oracle_calls))?;
    }
    Ok("4/4 functions, certain outcome, 1 oracle call each".into())
}

/// Rank-1 test for a dense `rows × cols` matrix: every 2×2 minor through the
/// largest entry vanishes.
fn is_rank_one(m: &[Complex64], cols: usize, tol: f64) -> bool {
    let (pivot, _) = m
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap();
    let (pi, pj) = (pivot / cols, pivot % cols);
    let p = m[pivot];
    (0..m.len()).all(|k| {
        let (i, j) = (k / cols, k % cols);
        (m[k] * p - m[i * cols + pj] * m[pi * cols + j]).norm() <= tol
    })
}

fn ac03_qft_dft() -> Check {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    for n in 1..=8usize {
        let s = 1usize << n;
        let qubits: Vec<usize> = (0..n).collect();
        for x in 0..s {
            let mut reg = QuantumRegister::new(n, x).unwrap();
            qft(&mut reg, &qubits).unwrap();
            for (y, a) in reg.amplitudes().iter().enumerate() {
                let expected = Complex64::from_polar(1.0 / (s as f64).sqrt(), TAU * ((x * y) % s) as f64 / s as f64);
                worst = worst.max((a - expected).norm());
            }
        }
    }
    ensure(worst <= TOL, || format!("max amplitude error {worst:.2e}"))?;

    let n = 6;
    let qubits: Vec<usize> = (0..n).collect();
    let mut cuts = 0;
    for x in 0..64 {
        let mut reg = QuantumRegister::new(n, x).unwrap();
        qft(&mut reg, &qubits).unwrap();
        for part in 1..(1usize << n) - 1 {
            let a: Vec<usize> = (0..n).filter(|q| part >> q & 1 == 1).collect();
            let b: Vec<usize> = (0..n).filter(|q| part >> q & 1 == 0).collect();
            let cols = 1 << b.len();
            let mut m = vec![Complex64::new(0.0, 0.0); (1 << a.len()) * cols];
            for (idx, amp) in reg.amplitudes().iter().enumerate() {
                let gather = |qs: &[usize]| qs.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((idx >> q & 1) << i));
                m[gather(&a) * cols + gather(&b)] = *amp;
            }
            ensure(is_rank_one(&m, cols, TOL), || format!("x={x}: cut {part:06b} has Schmidt rank > 1"))?;
            cuts += 1;
        }
    }
    Ok(format!("max amplitude error {worst:.1e} for n ≤ 8; {cuts} product-form cuts at n = 6"))
}

fn ac04_exact_phase() -> Check {
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0f64;
    for x in 0..64 {
        let device = PhaseShiftDevice { phi: PhaseAngle::new(TAU * x as f64 / 64.0) };
        let dist = run_network(&device, &one(), 6).unwrap().distribution();
        worst = worst.max((1.0 - dist[x]).abs());
        let run = estimate_phase(&device, &one(), 6, &mut rng).unwrap();
        ensure(run.estimate.y == x, || format!("x={x}: sampled {}", run.estimate.y))?;
    }
    ensure(worst <= TOL, || format!("max 1 − P(x) = {worst:.2e}"))?;
    Ok(format!("64/64 phases recovered, max 1 − P = {worst:.1e}"))
}

fn ac05_four_over_pi_squared() -> Check {
    const TOL: f64 = 1e-9;
    let bound = 4.0 / (PI * PI);
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut min = f64::INFINITY;
    for i in 0..1000 {
        let omega: f64 = rng.random();
        let p = best_estimate_probability(omega, 6);
        if i < 25 {
            // the closed form agrees with the simulated network
            let device = PhaseShiftDevice { phi: PhaseAngle::from_fraction(omega) };
            let dist = run_network(&device, &one(), 6).unwrap().distribution();
            let sim = best_estimates(omega, 6).into_iter().map(|y| dist[y]).fold(0.0, f64::max);
            ensure((sim - p).abs() <= 1e-10, || format!("ω={omega}: simulated {sim} vs {p}"))?;
        }
        min = min.min(p);
    }
    ensure(min >= bound - TOL, || format!("min P = {min:.6} below 4/π² = {bound:.6}"))?;
    Ok(format!("min P(best) = {min:.5} ≥ 4/π² = {bound:.5} over 1000 ω"))
}

fn ac06_boosting() -> Check {
    const DELTA: f64 = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let extra = extra_qubits(DELTA).unwrap();
    let mut min = f64::INFINITY;
    for i in 0..200 {
        let omega: f64 = rng.random();
        let p = boosted_success_probability(omega, 4, DELTA).unwrap();
        if i < 10 {
            let device = PhaseShiftDevice { phi: PhaseAngle::from_fraction(omega) };
            let dist = run_network(&device, &one(), 4 + extra).unwrap().distribution();
            let sim: f64 = dist
                .iter()
                .enumerate()
                .filter(|(raw, _)| circular_distance(round_to_bits(*raw, extra, 4) as f64 / 16.0, omega) <= 1.0 / 16.0)
                .map(|(_, p)| p)
                .sum();
            ensure((sim - p).abs() <= 1e-10, || format!("ω={omega}: simulated {sim} vs {p}"))?;
        }
        min = min.min(p);
    }
    ensure(min >= 1.0 - DELTA, || format!("min success {min:.4} < 0.9"))?;
    Ok(format!("{extra} extra qubits; min P(|ω̂−ω| ≤ 2⁻⁴) = {min:.4} over 200 ω"))
}

fn cli(args: &[&str]) -> Result<(Value, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_phasekit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((v, text))
}

fn ac07_shor() -> Check {
    let (order, _) = cli(&["order", "--a", "4", "--n", "35", "--seed", "7"])?;
    ensure(order["outputs"]["order"] == 6, || format!("order output {}", order["outputs"]))?;
    let (factor, _) = cli(&["factor", "--n", "35", "--seed", "7"])?;
    let factors = &factor["outputs"]["factors"];
    ensure(*factors == serde_json::json!({"5": 1, "7": 1}), || format!("factors {factors}"))?;
    let m = 9;
    let p = order_success_probability(7, 15, m, 4).map_err(|e| e.to_string())?;
    let two = 1.0 - (1.0 - p).powi(2);
    ensure(two >= 0.54, || format!("two-run success {two}"))?;
    Ok(format!(
        "r(4 mod 35) = 6, 35 = 5·7; (7,15) at m = {m}: single run {p:.4}, two runs {two:.4} ≥ 0.54"
    ))
}

/// Real parts of the spectrum of a real orthogonal matrix; see the unit test
/// of the same name in the library.
fn orthogonal_spectrum(g: &[Complex64], dim: usize) -> Result<Vec<f64>, String> {
    ensure(g.iter().all(|z| z.im.abs() < 1e-12), || "G has complex entries".into())?;
    let m = DMatrix::from_fn(dim, dim, |r, c| g[r * dim + c].re);
    let dev = (m.transpose() * &m - DMatrix::identity(dim, dim)).abs().max();
    ensure(dev < 1e-12, || format!("GᵀG deviates from I by {dev:.1e}"))?;
    let sym = (&m + m.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().iter().copied().collect())
}

fn scattered_oracle(n: usize, j: usize) -> OracleFunction {
    let dim = 1usize << n;
    let mut table = vec![0; dim];
    for k in 0..j {
        table[(k * 37 + 5) % dim] = 1;
    }
    OracleFunction::from_table(2, table).unwrap()
}

fn ac08_grover_spectrum() -> Check {
    const TOL: f64 = 1e-9;
    let mut cases = 0;
    for n in 1..=6usize {
        let dim = 1usize << n;
        for j in 0..=dim {
            let f = scattered_oracle(n, j);
            let s = grover_spectrum(dim as u64, j as u64).unwrap();
            let g = grover_matrix(&f, &HadamardPreparation).unwrap();
            let cosines = orthogonal_spectrum(&g, dim)?;
            let near = |c: f64| cosines.iter().filter(|e| (**e - c).abs() < TOL).count();
            let (plus, minus) = if j == 0 {
                (1, dim - 1)
            } else if j == dim {
                (dim - 1, 1)
            } else {
                // the restriction to span{X₁, X₀}
                let (x1, x0) = solution_states(&f).unwrap();
                let apply = |v: &QuantumRegister| {
                    let mut w = v.clone();
                    grover_iterate(&mut w, &f, &HadamardPreparation).unwrap();
                    w
                };
                let (g1, g0) = (apply(&x1), apply(&x0));
                let m = [[x1.inner(&g1), x1.inner(&g0)], [x0.inner(&g1), x0.inner(&g0)]];
                let tr = m[0][0] + m[1][1];
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let disc = (tr * tr / 4.0 - det).sqrt();
                let mut eig = [tr / 2.0 + disc, tr / 2.0 - disc];
                eig.sort_by(|a, b| b.im.total_cmp(&a.im));
                let err = (eig[0] - s.eigenvalue()).norm().max((eig[1] - s.eigenvalue().conj()).norm());
                ensure(err < TOL, || format!("n={n} j={j}: plane eigenvalues off by {err:.1e}"))?;
                ensure(near(s.eigenvalue().re) == 2, || format!("n={n} j={j}: e^(±2πiω) missing from dense spectrum"))?;
                (j - 1, dim - j - 1)
            };
            ensure(near(1.0) == plus && near(-1.0) == minus, || {
                format!("n={n} j={j}: +1×{} −1×{}, expected +1×{plus} −1×{minus}", near(1.0), near(-1.0))
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (N, j) cases; +1 multiplicity j−1, −1 multiplicity N−j−1"))
}

fn ac09_grover_search() -> Check {
    const TOL: f64 = 1e-9;
    let f4 = OracleFunction::single_target(2, 3).unwrap();
    let mut reg = prepared_state(2, &HadamardPreparation).unwrap();
    grover_iterate(&mut reg, &f4, &HadamardPreparation).unwrap();
    let p4 = reg.probability_of(|x| f4.eval(x) == 1);
    ensure((p4 - 1.0).abs() <= TOL, || format!("N=4: P = {p4}"))?;

    let f256 = OracleFunction::single_target(8, 77).unwrap();
    let mut reg = prepared_state(8, &HadamardPreparation).unwrap();
    for _ in 0..12 {
        grover_iterate(&mut reg, &f256, &HadamardPreparation).unwrap();
    }
    let p256 = reg.probability_of(|x| f256.eval(x) == 1);
    ensure(p256 >= 0.99, || format!("N=256: P = {p256}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for (f, cap) in [(&f4, 4.0f64), (&f256, 256.0)] {
        let r = grover_search(f, Some(1), &mut rng).map_err(|e| e.to_string())?;
        let per_attempt = r.oracle_calls / r.attempts as u64;
        let bound = (PI / 4.0 * cap.sqrt()).ceil() as u64 + 1;
        ensure(per_attempt <= bound, || format!("N={cap}: {per_attempt} calls per attempt > {bound}"))?;
        ensure(f.eval(r.index) == 1, || format!("N={cap}: returned non-solution"))?;
    }
    Ok(format!("N=4: P = {p4:.12} after 1; N=256: P = {p256:.5} after 12"))
}

fn ac10_counting() -> Check {
    const T: usize = 8;
    let s = 1usize << T;
    let mut min_mass = f64::INFINITY;
    for j in 0..=16usize {
        let f = scattered_oracle(4, j);
        let dist = counting_distribution(&f, T).map_err(|e| e.to_string())?;
        let analytic = counting_distribution_analytic(16, j as u64, T).unwrap();
        let dev = dist.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(dev < 1e-9, || format!("j={j}: simulated vs spectral mixture differ by {dev:.1e}"))?;
        let mut folded = vec![0.0; s / 2 + 1];
        for (y, p) in dist.iter().enumerate() {
            folded[y.min(s - y)] += p;
        }
        let (best, _) = folded.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let (_, _, j_best) = counting_readout(best, T, 16);
        ensure(j_best.abs_diff(j as u64) <= 1, || format!("j={j}: mode inverts to {j_best}"))?;
        let mass: f64 = dist
            .iter()
            .enumerate()
            .filter(|(y, _)| counting_readout(*y, T, 16).2.abs_diff(j as u64) <= 1)
            .map(|(_, p)| p)
            .sum();
        ensure(mass >= 0.8, || format!("j={j}: band mass {mass:.4}"))?;
        min_mass = min_mass.min(mass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for j in [0usize, 16] {
        let c = quantum_count(&scattered_oracle(4, j), T, &mut rng).map_err(|e| e.to_string())?;
        ensure(c.j_rounded == j as u64 && c.j_estimate == j as f64, || format!("j={j}: counted {}", c.j_estimate))?;
    }
    Ok(format!("17/17 modes within ±1; min band mass {min_mass:.4}; j = 0 and 16 exact"))
}

fn ac11_simon() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut runs = 0;
    let mut samples = 0;
    for n in 1..=8usize {
        for _ in 0..100 {
            let mask = rng.random_range(0..1usize << n);
            let inst = HiddenSubgroupInstance::from_mask(n, mask).unwrap();
            let truth = inst.hidden_subgroup_brute_force();
            let r = simon_solve(&inst, &mut rng, 10 * n).map_err(|e| format!("n={n} mask={mask:#x}: {e}"))?;
            for &y in &r.samples {
                ensure(truth.iter().all(|&k| dot(y, k) == 0), || format!("n={n}: y={y:#x} not orthogonal"))?;
            }
            ensure(r.subgroup() == truth, || format!("n={n} mask={mask:#x}: recovered {:?}", r.subgroup()))?;
            samples += r.samples.len();
            runs += 1;
        }
    }
    Ok(format!("{runs}/{runs} subgroups recovered, {samples} orthogonal samples verified"))
}

fn ac12_determinism() -> Check {
    let commands: [&[&str]; 8] = [
        &["mz", "--phi0", "1.2", "--phi1", "0.4"],
        &["qft", "--n", "4", "--x", "3", "--dump-state"],
        &["phase-estimate", "--omega", "0.3", "--bits", "6", "--delta", "0.1", "--seed", "5"],
        &["order", "--a", "7", "--n", "15", "--seed", "5"],
        &["factor", "--n", "21", "--seed", "5"],
        &["search", "--truth-table", "0010000000000100", "--seed", "5"],
        &["count", "--truth-table", "0110", "--precision", "6", "--seed", "5"],
        &["simon", "--n", "5", "--mask", "13", "--seed", "5"],
    ];
    for args in commands {
        let (a, _) = cli(args)?;
        let (b, _) = cli(args)?;
        let (sa, sb) = (a["outputs"].to_string(), b["outputs"].to_string());
        ensure(sa == sb, || format!("{args:?}: {sa} vs {sb}"))?;
    }
    Ok(format!("{} commands, identical outputs on rerun", commands.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("AC-01", "Mach-Zehnder law", 100, ac01_mach_zehnder),
        ("AC-02", "Deutsch determinism", 100, ac02_deutsch),
        ("AC-03", "QFT equals DFT, product form", 5_000, ac03_qft_dft),
        ("AC-04", "exact phase estimation", 2_000, ac04_exact_phase),
        ("AC-05", "4/π² bound", 5_000, ac05_four_over_pi_squared),
        ("AC-06", "δ-boosting", 10_000, ac06_boosting),
        ("AC-07", "order finding and factoring", 60_000, ac07_shor),
        ("AC-08", "Grover spectrum", 30_000, ac08_grover_spectrum),
        ("AC-09", "Grover search", 5_000, ac09_grover_search),
        ("AC-10", "quantum counting", 60_000, ac10_counting),
        ("AC-11", "hidden subgroups of Z₂ⁿ", 30_000, ac11_simon),
        ("AC-12", "CLI determinism", 30_000, ac12_determinism),
    ];
    let mut failed = 0;
    for (id, name, budget_ms, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > Duration::from_millis(budget_ms) {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget_ms} ms"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("{id} PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL  {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
