//! Acceptance criteria. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use qcircuit::circuit::Circuit;
use qcircuit::gates::{self, Axis, Pauli};
use qcircuit::linalg::{c, cis, cr, random_state, random_unitary, sqrt_unitary2, tensor_mat, CMatrix, CVector, Projector};
use qcircuit::qstate::{self, is_decomposable, ProjectiveMeasurement, QuantumRegister};
use qcircuit::revclassic::{self, RevCircuit, RevGate, TruthTable};
use qcircuit::rng::QRng;
use qcircuit::synth::{self, Primitivity, TwoLevelFactor};
use qcircuit::turing::{self, corpus, Decision, OutputMode, RunStatus, TuringMachine};

type Outcome = Result<String, String>;

/// Name, check and time budget in milliseconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b)
}

fn criterion_1() -> Outcome {
    let mut circ = Circuit::new(2).unwrap();
    circ.cnot(1, 2).unwrap();
    // (|0> + |1>)|1> = |01> + |11>
    let input = CVector::from_real(&[0.0, 1.0, 0.0, 1.0]).unwrap();
    let start = Instant::now();
    let out = circ.run_vector(&input).unwrap();
    let elapsed = start.elapsed();
    let want = [cr(0.0), cr(1.0), cr(1.0), cr(0.0)];
    ensure(out.entries() == want, || format!("got {:?}", out.entries()))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("|01>+|11> -> |01>+|10> exactly in {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let tol = 1e-12;
    let m = |g: gates::GateSpec| g.matrix().clone();
    let (x, y, z, h) = (m(gates::pauli(Pauli::X)), m(gates::pauli(Pauli::Y)), m(gates::pauli(Pauli::Z)), m(gates::hadamard()));
    let prod = |ms: &[&CMatrix]| ms.iter().skip(1).fold(ms[0].clone(), |acc, b| acc.matmul(b).unwrap());
    let mut worst: f64 = 0.0;
    worst = worst.max(max_diff(&prod(&[&h, &x, &h]), &z));
    worst = worst.max(max_diff(&prod(&[&h, &z, &h]), &x));
    worst = worst.max(max_diff(&prod(&[&h, &y, &h]), &y.scale(cr(-1.0))));
    let cn = m(gates::cnot());
    worst = worst.max(max_diff(&prod(&[&cn, &cn]), &CMatrix::identity(4)));
    let tof = m(gates::toffoli());
    worst = worst.max(max_diff(&prod(&[&tof, &tof]), &CMatrix::identity(8)));
    let mut rng = QRng::seeded(2);
    for _ in 0..20 {
        let a = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let lhs = m(gates::controlled(&gates::phase_p(a), 1));
        let rhs = tensor_mat(gates::phase_e(a).matrix(), &CMatrix::identity(2));
        worst = worst.max(max_diff(&lhs, &rhs));
    }
    for _ in 0..100 {
        let t = rng.random_range(-10.0..10.0);
        for (axis, sign) in [(Axis::X, 1.0), (Axis::Y, -1.0), (Axis::Z, -1.0)] {
            let lhs = prod(&[&x, &m(gates::rotation(axis, t)), &x]);
            worst = worst.max(max_diff(&lhs, &m(gates::rotation(axis, sign * t))));
        }
    }
    ensure(worst <= tol, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = QRng::seeded(3);
    let x = gates::pauli(Pauli::X).matrix().clone();
    let (mut abc_err, mut circ_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let u = random_unitary(2, &mut rng);
        let f = synth::abc_decompose(&u).unwrap();
        let abc = f.a.matmul(&f.b).unwrap().matmul(&f.c).unwrap();
        abc_err = abc_err.max(max_diff(&abc, &CMatrix::identity(2)));
        let axbxc = f.a.matmul(&x).unwrap().matmul(&f.b).unwrap().matmul(&x).unwrap().matmul(&f.c).unwrap();
        abc_err = abc_err.max(max_diff(&axbxc.scale(cis(f.alpha)), &u));
        let circ = synth::controlled_u_circuit(&u).unwrap();
        ensure(circ.len() == 6, || format!("controlled-U circuit has {} steps", circ.len()))?;
        ensure(circ.steps().iter().all(|s| s.is_elementary()), || "non-elementary step".into())?;
        let want = gates::controlled(&gates::GateSpec::unitary(u.clone()).unwrap(), 1);
        circ_err = circ_err.max(max_diff(&circ.to_unitary(), want.matrix()));
    }
    ensure(abc_err <= 1e-10, || format!("ABC error {abc_err:e}"))?;
    ensure(circ_err <= 1e-9, || format!("controlled-U error {circ_err:e}"))?;
    Ok(format!("ABC {abc_err:.1e}, Lambda1(U) {circ_err:.1e}, 6 steps"))
}

fn block(m: &CMatrix, ctrl: usize) -> CMatrix {
    let o = 2 * ctrl;
    CMatrix::from_rows(&[vec![m[(o, o)], m[(o, o + 1)]], vec![m[(o + 1, o)], m[(o + 1, o + 1)]]])
}

fn criterion_4() -> Outcome {
    let mut rng = QRng::seeded(4);
    let mut worst: f64 = 0.0;
    let id = CMatrix::identity(2);
    for i in 0..101 {
        let u = if i == 100 { gates::pauli(Pauli::X).matrix().clone() } else { random_unitary(2, &mut rng) };
        let circ = synth::lambda2_circuit(&u).unwrap();
        let got = circ.to_unitary();
        let want = gates::controlled(&gates::GateSpec::unitary(u.clone()).unwrap(), 2);
        worst = worst.max(max_diff(&got, want.matrix()));
        // control cases 00, 01, 10 act as I; 11 acts as U
        for ctrl in 0..3 {
            worst = worst.max(max_diff(&block(&got, ctrl), &id));
        }
        worst = worst.max(max_diff(&block(&got, 3), &u));
        let v = sqrt_unitary2(&u).unwrap();
        let vd = v.adjoint();
        worst = worst.max(max_diff(&v.matmul(&vd).unwrap(), &id));
        worst = worst.max(max_diff(&vd.matmul(&v).unwrap(), &id));
        worst = worst.max(max_diff(&v.matmul(&v).unwrap(), &u));
        if i == 100 {
            let d = max_diff(&got, gates::toffoli().matrix());
            ensure(d <= 1e-10, || format!("U = X differs from Toffoli by {d:e}"))?;
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}; U = X gives Toffoli"))
}

fn criterion_5() -> Outcome {
    let mut rng = QRng::seeded(5);
    let (mut worst, mut max_ratio): (f64, f64) = (0.0, 0.0);
    for i in 0..200 {
        let n = [2, 4, 8][i % 3];
        let u = random_unitary(n, &mut rng);
        let f = synth::two_level_factorize(&u).unwrap();
        let bound = n * (n - 1) / 2;
        ensure(f.len() <= bound, || format!("N={n}: {} factors > {bound}", f.len()))?;
        max_ratio = max_ratio.max(f.len() as f64 / bound as f64);
        worst = worst.max(max_diff(&synth::multiply_factors(&f, n), &u));
    }
    ensure(worst <= 1e-10, || format!("reconstruction error {worst:e}"))?;
    for n in [2, 4, 8] {
        for _ in 0..10 {
            let phases: Vec<_> = (0..n).map(|_| cis(rng.random_range(0.0..std::f64::consts::TAU))).collect();
            let f = synth::two_level_factorize(&CMatrix::diagonal(&phases)).unwrap();
            let nontrivial = f.iter().filter(|t| !t.is_trivial(1e-12)).count();
            ensure(nontrivial < n, || format!("diagonal N={n}: {nontrivial} nontrivial factors"))?;
        }
    }
    Ok(format!("error {worst:.1e}; count/bound <= {max_ratio:.2}; diagonal inputs < N factors"))
}

fn criterion_6() -> Outcome {
    let mut rng = QRng::seeded(6);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 1 + i % 3;
        let u = random_unitary(1 << n, &mut rng);
        let r = synth::compile(&u).unwrap();
        ensure(r.circuit.is_elementary(), || "compiled circuit has non-elementary steps".into())?;
        worst = worst.max(synth::error_metric(&u, &r.circuit.to_unitary()).unwrap());
    }
    ensure(worst <= 1e-8, || format!("round-trip error {worst:e}"))?;

    let block = CMatrix::from_rows(&[vec![c(0.6, 0.0), c(0.0, 0.8)], vec![c(0.0, 0.8), c(0.6, 0.0)]]);
    let f = TwoLevelFactor::new(0b001, 0b110, block).unwrap();
    let target = f.expand(8);
    let alternate = synth::gray_route_with_path(&f, 3, &[0b001, 0b000, 0b010]).unwrap().to_unitary();
    let canonical = synth::gray_route(&f, 3).unwrap().to_unitary();
    let gray = max_diff(&alternate, &target).max(max_diff(&canonical, &target));
    ensure(gray <= 1e-12, || format!("Gray-code example off by {gray:e}"))?;

    let mut fits = Vec::new();
    for n in 1..=4usize {
        let samples = if n == 4 { 2 } else { 5 };
        let mut most = 0;
        for _ in 0..samples {
            let r = synth::compile(&random_unitary(1 << n, &mut rng)).unwrap();
            most = most.max(r.gate_count);
        }
        let bound = synth::compile_gate_bound(n);
        ensure(most <= bound, || format!("n={n}: {most} gates > bound {bound}"))?;
        fits.push(format!("{most}/{bound}"));
    }
    Ok(format!("error {worst:.1e}; Gray example exact; gates/bound n=1..4: {}", fits.join(" ")))
}

fn criterion_7() -> Outcome {
    let mut rng = QRng::seeded(7);
    let e = |a: &CMatrix, b: &CMatrix| synth::error_metric(a, b).unwrap();
    let slack = 1e-12;
    for _ in 0..100 {
        let (u1, v1, u2, v2) =
            (random_unitary(2, &mut rng), random_unitary(2, &mut rng), random_unitary(2, &mut rng), random_unitary(2, &mut rng));
        ensure(e(&u1, &v1) >= 0.0 && e(&u1, &u1) <= slack, || "nonnegativity / identity".into())?;
        ensure((e(&u1, &v1) - e(&v1, &u1)).abs() <= slack, || "symmetry".into())?;
        ensure(e(&u1, &u2) <= e(&u1, &v1) + e(&v1, &u2) + slack, || "triangle inequality".into())?;
        let lhs = e(&u2.matmul(&u1).unwrap(), &v2.matmul(&v1).unwrap());
        ensure(lhs <= e(&u1, &v1) + e(&u2, &v2) + slack, || "subadditivity".into())?;
    }
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let phi = -6.0 + 12.0 * k as f64 / 49.0;
        let got = e(&CMatrix::identity(2), &CMatrix::identity(2).scale(cis(phi)));
        worst = worst.max((got - 2.0 * (phi / 2.0).sin().abs()).abs());
    }
    ensure(worst <= 1e-12, || format!("E(I, e^(i phi) I) off by {worst:e}"))?;
    Ok(format!("axioms and subadditivity hold; phase case off by {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut rng = QRng::seeded(8);
    let eps = 1e-9;
    for (name, g) in [("CNOT", gates::cnot()), ("A(0.3,0.7,1.1)", gates::barenco_gate(0.3, 0.7, 1.1))] {
        let v = g.matrix();
        ensure(!synth::is_primitive(v, eps).unwrap(), || format!("{name} classified primitive"))?;
        let w = synth::entangling_witness(v, 50, &mut rng).ok_or_else(|| format!("{name}: no witness"))?;
        let input = QuantumRegister::new(qcircuit::linalg::tensor_vec(&w.first, &w.second)).unwrap();
        ensure(is_decomposable(&input, eps).is_product(), || format!("{name}: witness input entangled"))?;
        let image = QuantumRegister::new(v.apply(input.amplitudes()).unwrap()).unwrap();
        ensure(!is_decomposable(&image, eps).is_product(), || format!("{name}: witness image is a product"))?;
    }
    let ht = tensor_mat(gates::hadamard().matrix(), gates::t_gate().matrix());
    ensure(matches!(synth::classify_primitive(&ht, eps).unwrap(), Primitivity::Product { .. }), || "H (x) T".into())?;
    ensure(matches!(synth::classify_primitive(gates::swap().matrix(), eps).unwrap(), Primitivity::SwapProduct { .. }), || "SWAP".into())?;
    for _ in 0..100 {
        let v = tensor_mat(&random_unitary(2, &mut rng), &random_unitary(2, &mut rng));
        ensure(synth::is_primitive(&v, eps).unwrap(), || "random product classified imprimitive".into())?;
    }
    Ok("CNOT, A imprimitive with witnesses; H(x)T, SWAP, 100 products primitive".into())
}

fn criterion_9() -> Outcome {
    let t2 = synth::approx_search(gates::phase_s().matrix(), &[gates::hadamard(), gates::t_gate()], 4).unwrap();
    ensure(t2.word == ["T", "T"] && t2.error <= 1e-12, || format!("S approximated by {:?} ({:e})", t2.word, t2.error))?;
    let table = synth::ApproxTable::build(&synth::with_adjoints(&synth::standard_set()), 12).unwrap();
    let mut rng = QRng::seeded(9);
    for _ in 0..20 {
        let u = random_unitary(2, &mut rng);
        let errs: Vec<f64> = [4, 8, 12].iter().map(|&l| table.best(&u, l).unwrap().error).collect();
        ensure(errs[0] >= errs[1] && errs[1] >= errs[2], || format!("non-monotone errors {errs:?}"))?;
    }
    let hits = (0..100).filter(|_| table.best(&random_unitary(2, &mut rng), 12).unwrap().error <= 0.2).count();
    ensure(hits >= 90, || format!("calibration: only {hits}/100 targets within 0.2"))?;
    Ok(format!("T T = S exact; monotone on 20 targets; calibration only: {hits}/100 within 0.2 at length 12"))
}

fn criterion_10() -> Outcome {
    let mut rng = QRng::seeded(10);
    let mut cases = 0;
    for _ in 0..20 {
        let k = rng.random_range(1..=6usize);
        let l = rng.random_range(1..=3usize);
        let table = TruthTable::from_fn(k, l, |_| rng.random_range(0..1usize << l)).unwrap();
        let source = revclassic::synthesize_bool(&table).unwrap();
        ensure(TruthTable::of_circuit(&source).unwrap() == table, || "Boolean synthesis mismatch".into())?;
        let rev = revclassic::to_reversible(&source);
        let y = rng.random_range(1..1usize << l);
        let check = revclassic::verify_reversible(&source, &rev, &[0, y]).unwrap();
        ensure(check.passed(), || format!("k={k} l={l}: {check:?}"))?;
        cases += check.cases;
    }
    let mut tof = RevCircuit::new(3);
    tof.push(RevGate::Toffoli { c1: 1, c2: 2, target: 3 }).unwrap();
    let row = |bits: [u8; 3]| -> [u8; 3] {
        let out = tof.eval(&bits.map(|b| b == 1)).unwrap();
        [out[0] as u8, out[1] as u8, out[2] as u8]
    };
    let nand = [([0, 0, 1], [0, 0, 1]), ([0, 1, 1], [0, 1, 1]), ([1, 0, 1], [1, 0, 1]), ([1, 1, 1], [1, 1, 0])];
    let fanout = [([1, 0, 0], [1, 0, 0]), ([1, 1, 0], [1, 1, 1])];
    for (input, want) in nand.iter().chain(&fanout) {
        ensure(row(*input) == *want, || format!("Toffoli row {input:?}"))?;
    }
    Ok(format!("{cases} exhaustive cases clean; NAND and FANOUT rows match"))
}

fn criterion_11() -> Outcome {
    let load = |t: &str| TuringMachine::parse(t).unwrap();
    let succ = load(corpus::SUCCESSOR);
    let (r, trace) = turing::trace(&succ, "111", 100).unwrap();
    ensure(r.status == RunStatus::Halted && r.config.tape() == "1111", || "successor output".into())?;
    ensure(
        (r.config.steps(), r.config.max_cells(), trace.len()) == (3, 3, 4),
        || format!("successor counters {} {}", r.config.steps(), r.config.max_cells()),
    )?;
    let add = load(corpus::ADDITION);
    for a in 0..=8 {
        for b in 0..=8 {
            let r = turing::run(&add, &turing::encode_unary(&[a, b]), 10_000).unwrap();
            let v = turing::output_value(&r, OutputMode::Standard).map_err(|e| e.to_string())?;
            ensure(v == a + b, || format!("{a} + {b} gave {v}"))?;
        }
    }
    let parity = load(corpus::PARITY);
    for len in 0..=10 {
        let w = "1".repeat(len);
        let want = if len % 2 == 0 { Decision::Yes } else { Decision::No };
        ensure(turing::decide(&parity, &w, 1000).unwrap() == want, || format!("parity of {w:?}"))?;
    }
    let (nd, det) = (load(corpus::CONTAINS11_ND), load(corpus::CONTAINS11_DET));
    let mut words = 0;
    for len in 0..=6 {
        for x in 0..1usize << len {
            let w: String = (0..len).map(|i| if x >> (len - 1 - i) & 1 == 1 { '1' } else { '0' }).collect();
            let d = turing::decide(&det, &w, 1000).unwrap() == Decision::Yes;
            let n = turing::run_nondet(&nd, &w, 1000, false).unwrap().accepted;
            ensure(d == n && d == w.contains("11"), || format!("disagreement on {w:?}"))?;
            words += 1;
        }
    }
    let coin = load(corpus::FAIR_COIN);
    let heads = (0..10_000u64)
        .filter(|&s| turing::run_prob(&coin, "", 10, &mut QRng::seeded(s)).unwrap().choices[0] == 0)
        .count();
    let freq = heads as f64 / 10_000.0;
    ensure((freq - 0.5).abs() < 0.02, || format!("fair coin frequency {freq}"))?;
    Ok(format!("corpus passes; successor steps=3 cells=3; {words} words agree; coin {freq:.4}"))
}

fn criterion_12() -> Outcome {
    let mut rng = QRng::seeded(12);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let dim = 2 << (i % 3);
        let q = QuantumRegister::new(random_state(dim, &mut rng)).unwrap();
        let u = random_unitary(dim, &mut rng);
        let basis: Vec<CVector> = (0..dim).map(|j| u.column(j)).collect();
        let m = ProjectiveMeasurement::in_basis(&basis).unwrap();
        let total: f64 = qstate::measure_projective(&q, &m).unwrap().iter().map(|o| o.probability).sum();
        worst = worst.max((total - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("normalization off by {worst:e}"))?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pm = [CVector::new(vec![cr(s), cr(s)]).unwrap(), CVector::new(vec![cr(s), cr(-s)]).unwrap()];
    let zero = qstate::basis_state(1, 0).unwrap();
    let probs: Vec<f64> = qstate::measure_projective(&zero, &ProjectiveMeasurement::in_basis(&pm).unwrap())
        .unwrap()
        .iter()
        .map(|o| o.probability)
        .collect();
    ensure(probs.iter().all(|p| (p - 0.5).abs() <= 1e-12), || format!("|0> in |+-> basis: {probs:?}"))?;
    let mut povm: f64 = 0.0;
    for i in 0..100 {
        let dim = 2 << (i % 2);
        let q = QuantumRegister::new(random_state(dim, &mut rng)).unwrap();
        let u = random_unitary(dim, &mut rng);
        let projectors: Vec<Projector> =
            (0..dim).map(|j| Projector::onto_span(&[u.column(j)]).unwrap()).collect();
        let effects: Vec<CMatrix> = projectors.iter().map(|p| p.matrix().clone()).collect();
        let eigen: Vec<f64> = (0..dim).map(|j| j as f64).collect();
        let m = ProjectiveMeasurement::new(eigen, projectors).unwrap();
        let a = qstate::measure_povm(&q, &effects).unwrap();
        let b = qstate::measure_projective(&q, &m).unwrap();
        for (x, o) in a.iter().zip(&b) {
            povm = povm.max((x - o.probability).abs());
        }
    }
    ensure(povm <= 1e-12, || format!("POVM vs projective off by {povm:e}"))?;
    Ok(format!("normalization {worst:.1e}; |0> in |+-> = (1/2, 1/2); POVM = projective within {povm:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("CNOT entanglement example", criterion_1, 1_000),
        ("gate identities", criterion_2, 1_000),
        ("ABC and controlled-U", criterion_3, 2_000),
        ("Lambda2(U)", criterion_4, 5_000),
        ("two-level factorization", criterion_5, 10_000),
        ("full compile round-trip", criterion_6, 60_000),
        ("error metric", criterion_7, 5_000),
        ("primitivity", criterion_8, 2_000),
        ("discrete-set approximation", criterion_9, 60_000),
        ("reversible compilation", criterion_10, 30_000),
        ("Turing engine", criterion_11, 60_000),
        ("measurement postulates", criterion_12, 10_000),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f, budget_ms)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_millis(*budget_ms) => {
                Err(format!("{d}; took {elapsed:.2?}, budget {budget_ms} ms"))
            }
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({elapsed:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
