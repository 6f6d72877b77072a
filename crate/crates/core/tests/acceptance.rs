//! Acceptance criteria for the toolkit, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report always prints. Set
//! `ROM_SKIP_HEAVY=1` to skip the five-qubit linear programs (about five
//! minutes on one core); skipped work is reported as SKIP, never as PASS.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use magic_rom::bounds::{product_lower_bound, single_qubit_robustness, st_norm};
use magic_rom::cache::BasisStore;
use magic_rom::robustness::{rom, rom_bracket, CertificateStatus};
use magic_rom::sampler::{
    estimate_expectation, gadgetize, parse_circuit, prepare_mixtures, simulation_cost_report, CostStrategy,
    EstimatorConfig,
};
use magic_rom::stabilizer::{stabilizer_state_count, StabilizerEnumeration};
use magic_rom::state::{apply_stabilizer_channel, bloch_state, rho_h, StateSpec};
use magic_rom::synthesis::{
    classification_table, clifford_equivalent, savings_catalog, t_count_lower_bound, two_to_one_conversion,
    verify_catalog_entry, SearchOutcome, EQUAL_ROM_TOLERANCE,
};
use magic_rom::DensityOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pinned tolerances; each criterion cites one of these.
mod tol {
    /// Closed-form robustness values.
    pub const EXACT_ROM: f64 = 1e-6;
    /// Five copies of `|H⟩`, known to five decimals.
    pub const H5: f64 = 1e-4;
    /// Per-copy rates quoted to three decimals.
    pub const RATE: f64 = 1e-3;
    /// Classification values quoted to five or six significant figures.
    pub const CLASS: f64 = 1e-4;
    /// Bounds tables quoted to about four decimals.
    pub const BOUND: f64 = 1e-3;
    /// St-norm of a closed-form state.
    pub const ST_NORM: f64 = 1e-12;
    /// Inequalities between LP values.
    pub const LP_SLACK: f64 = 1e-6;
    /// Single-qubit LP against its closed form.
    pub const SINGLE_QUBIT: f64 = 1e-7;
    /// Exact multiplicativity of the st-norm.
    pub const MULTIPLICATIVE: f64 = 1e-10;
    /// Two-to-one conversion identity.
    pub const CONVERSION: f64 = 1e-8;
    /// Sampler cost factors.
    pub const COST: f64 = 1e-3;
    /// Allowed Hoeffding failures in 200 runs at ε = 0.01 (mean 2).
    pub const MAX_FAILURES: usize = 4;
}

const SKIP_HEAVY_ENV: &str = "ROM_SKIP_HEAVY";

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        Outcome { status: if ok { Status::Pass } else { Status::Fail }, detail }
    }
}

fn close(a: f64, b: f64, t: f64) -> bool {
    (a - b).abs() <= t
}

fn value(spec: &str, store: &BasisStore) -> (f64, Duration) {
    let start = Instant::now();
    let rho = StateSpec::parse(spec).unwrap().to_density().unwrap();
    let basis = store.get(rho.num_qubits()).unwrap();
    let r = rom(&rho, &basis).unwrap();
    assert_eq!(r.status, CertificateStatus::Certified, "{spec}");
    (r.value, start.elapsed())
}

/// Compares named values against references; returns (all ok, summary).
fn compare(rows: &[(&str, f64, f64)], tol: f64) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(name, got, want) in rows {
        let good = close(got, want, tol);
        ok &= good;
        parts.push(format!("{name}={got:.7}{}", if good { "" } else { "(!)" }));
    }
    (ok, parts.join(" "))
}

fn exact_h_values(store: &BasisStore) -> Outcome {
    let refs = [SQRT_2, (1.0 + 3.0 * SQRT_2) / 3.0, (1.0 + 4.0 * SQRT_2) / 3.0, (3.0 + 8.0 * SQRT_2) / 5.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, want) in (1..=4).zip(refs) {
        let (v, dt) = value(&format!("H^{t}"), store);
        let limit = if t <= 3 { 10.0 } else { 600.0 };
        let good = close(v, want, tol::EXACT_ROM) && dt.as_secs_f64() < limit;
        ok &= good;
        parts.push(format!("H^{t}={v:.7} ({:.2}s){}", dt.as_secs_f64(), if good { "" } else { "(!)" }));
    }
    Outcome::check(ok, parts.join(" "))
}

fn five_h_copies(store: &BasisStore, heavy: bool) -> Outcome {
    if !heavy {
        return Outcome { status: Status::Skip, detail: format!("{SKIP_HEAVY_ENV} is set") };
    }
    let (v5, dt) = value("H^5", store);
    let quoted = [1.414, 1.322, 1.304, 1.301, 1.298];
    let mut rates = Vec::new();
    let mut ok = close(v5, 3.68705, tol::H5);
    for m in 1..=5 {
        let r = if m == 5 { v5 } else { value(&format!("H^{m}"), store).0 };
        let rate = r.powf(1.0 / m as f64);
        ok &= close(rate, quoted[m - 1], tol::RATE);
        rates.push(format!("{rate:.4}"));
    }
    Outcome::check(ok, format!("R(H^5)={v5:.7} in {:.1}s; rates {}", dt.as_secs_f64(), rates.join(" ")))
}

fn three_qubit_classes(store: &BasisStore) -> Outcome {
    let rows = classification_table(3, store).unwrap();
    let values: Vec<f64> = rows.iter().filter(|r| r.t_cost != Some(0)).map(|r| r.value).collect();
    let quoted = [1.41421, 1.74755, 2.2, 2.21895, 2.55556, 2.80061, 3.12132];
    let mut ok = values.len() == quoted.len();
    ok &= values.iter().zip(quoted).all(|(v, q)| close(*v, q, tol::CLASS));
    let t1cs23 = rows.iter().find(|r| r.gates.iter().any(|g| g.to_string() == "T_1CS_23"));
    ok &= t1cs23.is_some_and(|r| close(r.value, 2.80061, tol::CLASS));
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.5}")).collect();
    Outcome::check(ok, format!("{} classes: {}", values.len(), shown.join(" ")))
}

fn f_state_values(store: &BasisStore) -> Outcome {
    let s3 = 3f64.sqrt();
    let rows = [
        ("F", value("F", store).0, s3),
        ("F^2", value("F^2", store).0, (1.0 + 2.0 * s3) / 2.0),
        ("F^3", value("F^3", store).0, (1.0 + 3.0 * s3) / 2.0),
        ("F^4", value("F^4", store).0, (13.0 + 20.0 * s3) / 11.0),
    ];
    let (ok, detail) = compare(&rows, tol::EXACT_ROM);
    Outcome::check(ok, detail)
}

fn maximal_states(store: &BasisStore) -> Outcome {
    let flat = DensityOperator::from_pure(&[
        num_complex::Complex64::new(0.5, 0.0),
        num_complex::Complex64::new(0.5, 0.0),
        num_complex::Complex64::new(0.5, 0.0),
        num_complex::Complex64::new(0.0, 0.5),
    ])
    .unwrap();
    let rows = [
        ("hoggar", value("hoggar", store).0, 3.8),
        ("flat2", rom_value(&flat, store), 2.2),
        ("jam1", value("jam(optimal1)", store).0, (1.0 + 3.0 * SQRT_2) / 3.0),
        ("jam2", value("jam(optimal2)", store).0, 23.0 / 5.0),
    ];
    let (ok, detail) = compare(&rows, tol::EXACT_ROM);
    Outcome::check(ok, detail)
}

fn bound_tables() -> Outcome {
    let d = st_norm(&rho_h(1.0).unwrap()).unwrap().value;
    let mut ok = close(d, (1.0 + SQRT_2) / 2.0, tol::ST_NORM);
    let lower = [3.1269, 3.75592, 4.52157, 5.4501, 6.5738, 7.9321];
    let mut lows = Vec::new();
    for (t, want) in (6..=11).zip(lower) {
        let b = rom_bracket(t, None).unwrap();
        ok &= close(b.lower, want, tol::BOUND);
        ok &= close(product_lower_bound(&rho_h(1.0).unwrap(), t).unwrap().tighter, want, tol::BOUND);
        lows.push(format!("{:.5}", b.lower));
    }
    let mut highs = Vec::new();
    for (t, want) in [(6, 4.9238), (7, 6.3523), (10, 13.594)] {
        let b = rom_bracket(t, None).unwrap();
        ok &= close(b.upper, want, tol::BOUND);
        highs.push(format!("t={t}:{:.4}", b.upper));
    }
    Outcome::check(ok, format!("D={d:.12}; lower t=6..11 {}; upper {}", lows.join(" "), highs.join(" ")))
}

fn synthesis_checks(store: &BasisStore, heavy: bool) -> Outcome {
    let parse = |s: &str| magic_rom::state::spec::parse_gate_spec(s).unwrap();
    let ccz = t_count_lower_bound(&parse("CCZ_123"), Some(4), store).unwrap();
    let cs = t_count_lower_bound(&parse("CS_12"), None, store).unwrap();
    let mut ok = ccz.lower_t == 4 && cs.lower_t == 3;
    let mut parts = vec![format!("lower_t CCZ={} CS={} (CCZ@4 {})", ccz.lower_t, cs.lower_t, ccz.verdict)];

    let src = parse("CCZ_123").resource_state().unwrap();
    let dst = parse("CS_12CCZ_123").resource_state().unwrap();
    match clifford_equivalent(&src, &dst, 200_000).unwrap() {
        SearchOutcome::Found { word } => {
            let good = word.maps(&src.principal_vector(), &dst.principal_vector());
            ok &= good;
            parts.push(format!("CCZ->CS_12CCZ_123 via \"{word}\"{}", if good { "" } else { "(!)" }));
        }
        other => {
            ok = false;
            parts.push(format!("CCZ->CS_12CCZ_123 {other:?}"));
        }
    }

    let (mut equal, mut checked, mut skipped, mut words) = (0, 0, 0, 0);
    for entry in savings_catalog() {
        let n = entry.gates().unwrap().0.num_qubits();
        if n == 5 && !heavy {
            skipped += 1;
            continue;
        }
        // Five-qubit searches take minutes without always succeeding; RoM equality is the criterion.
        let budget = if n <= 4 { 200_000 } else { 0 };
        let c = verify_catalog_entry(&entry, store, budget).unwrap();
        checked += 1;
        if c.equal_rom {
            equal += 1;
        } else {
            parts.push(format!("{}: {:.7} vs {}: {:.7}(!)", entry.source, c.source_rom, entry.target, c.target_rom));
        }
        if let Some(SearchOutcome::Found { .. }) = c.search {
            words += 1;
        }
    }
    ok &= equal == checked;
    parts.push(format!("catalog equal-RoM {equal}/{checked} (±{EQUAL_ROM_TOLERANCE:e}), Clifford words for {words} entries"));
    if skipped > 0 {
        parts.push(format!("{skipped} five-qubit entries skipped"));
        if ok {
            return Outcome { status: Status::Skip, detail: parts.join("; ") };
        }
    }
    Outcome::check(ok, parts.join("; "))
}

fn simulator(store: &BasisStore) -> Outcome {
    let mut parts = Vec::new();
    let c = parse_circuit("qubits 1\nH 1\nT 1\nOBSERVE X\n").unwrap();
    let g = gadgetize(&c, 1).unwrap();
    let mixtures = prepare_mixtures(&g, store).unwrap();
    let mut failures = 0;
    let mut samples = 0;
    for seed in 0..200 {
        let cfg = EstimatorConfig { delta: 0.05, epsilon: 0.01, seed, ..Default::default() };
        let e = estimate_expectation(&g, &mixtures, &cfg).unwrap();
        samples = e.samples;
        if (e.estimate - FRAC_1_SQRT_2).abs() > cfg.delta {
            failures += 1;
        }
    }
    let mut ok = failures <= tol::MAX_FAILURES;
    parts.push(format!("T gadget {failures}/200 failures at N={samples}"));

    let ccz = parse_circuit("qubits 3\nH 1\nH 2\nH 3\nGATE CCZ_123\nOBSERVE XXX\n").unwrap();
    let exact = dense_expectation(&ccz);
    let cfg = EstimatorConfig { delta: 0.05, epsilon: 0.01, seed: 0, ..Default::default() };
    let g = gadgetize(&ccz, 1).unwrap();
    let est = estimate_expectation(&g, &prepare_mixtures(&g, store).unwrap(), &cfg).unwrap();
    ok &= close(est.estimate, exact, cfg.delta);
    parts.push(format!("CCZ gadget {:.4} vs dense {exact:.4}", est.estimate));

    let ten_t = parse_circuit(&format!("qubits 1\nH 1\n{}OBSERVE X\n", "T 1\n".repeat(10))).unwrap();
    let blocks = simulation_cost_report(&ten_t, CostStrategy::TBlocks { m: 5 }, 0.05, 0.01, store).unwrap();
    let two_ccz = parse_circuit("qubits 3\nGATE CCZ_123\nH 2\nGATE CCZ_123\nOBSERVE XXX\n").unwrap();
    let native = simulation_cost_report(&two_ccz, CostStrategy::Native { m: 1 }, 0.05, 0.01, store).unwrap();
    let per_ccz = native.slots.iter().find(|s| s.label == "CCZ_123").map_or(f64::NAN, |s| s.value);
    ok &= close(blocks.per_t_factor, 1.298, tol::COST)
        && close(blocks.l1, 13.594, tol::COST)
        && close(per_ccz, 2.55556, tol::COST)
        && close(native.l1, 6.531, tol::COST);
    parts.push(format!(
        "per-T factor {:.4}, 10 T l1 {:.4}, |CCZ> {per_ccz:.5}, two CCZ l1 {:.4}",
        blocks.per_t_factor, blocks.l1, native.l1
    ));
    Outcome::check(ok, parts.join("; "))
}

fn property_suites(store: &BasisStore) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let mut violations: Vec<String> = Vec::new();
    let mut flag = |ok: bool, what: &str| {
        if !ok {
            violations.push(what.to_string());
        }
    };

    for n in 1..=2 {
        for t in StabilizerEnumeration::new(n).unwrap().iter() {
            let rho = DensityOperator::from_pure(&t.state_vector().unwrap()).unwrap();
            flag(close(rom_value(&rho, store), 1.0, 1e-8), "faithfulness");
        }
    }
    for _ in 0..100 {
        let (a, b) = (random_qubit(&mut rng), random_qubit(&mut rng));
        let joint = rom_value(&a.tensor(&b).unwrap(), store);
        flag(joint <= rom_value(&a, store) * rom_value(&b, store) + tol::LP_SLACK, "submultiplicativity");

        let (x, y) = (random_pure(2, &mut rng), random_pure(2, &mut rng));
        let p: f64 = rng.random_range(0.0..1.0);
        let mix = DensityOperator::mixture(&[(p, x.clone()), (1.0 - p, y.clone())]).unwrap();
        let rhs = p * rom_value(&x, store) + (1.0 - p) * rom_value(&y, store);
        flag(rom_value(&mix, store) <= rhs + tol::LP_SLACK, "convexity");
        // D1.
        let d_rhs = p * st_norm(&x).unwrap().value + (1.0 - p) * st_norm(&y).unwrap().value;
        flag(st_norm(&mix).unwrap().value <= d_rhs + 1e-10, "D1");
        // D2, D3.
        flag(st_norm(&mix).unwrap().value >= 0.25 - 1e-12, "D2");
        flag(st_norm(&mix).unwrap().value <= rom_value(&mix, store) + tol::LP_SLACK, "D3");
        // D4.
        let prod = st_norm(&x.tensor(&a).unwrap()).unwrap().value;
        flag(close(prod, st_norm(&x).unwrap().value * st_norm(&a).unwrap().value, tol::MULTIPLICATIVE), "D4");

        let n = rng.random_range(1..=2);
        let rho = random_pure(n, &mut rng);
        let (out, _) = apply_stabilizer_channel(&rho, &random_channel(n, &mut rng)).unwrap();
        flag(rom_value(&out, store) <= rom_value(&rho, store) + tol::LP_SLACK, "monotonicity");
    }
    for _ in 0..500 {
        let dir = [rng.random_range(-1.0..1.0f64), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
        let len = if rng.random_bool(0.3) { 1.0 } else { rng.random_range(0.0..1.0) };
        let r = dir.map(|v| v / norm * len);
        let lp = rom_value(&bloch_state(r).unwrap(), store);
        flag(close(lp, single_qubit_robustness(r), tol::SINGLE_QUBIT), "single-qubit oracle");
    }
    let counts: Vec<u64> = (1..=4).map(|n| StabilizerEnumeration::new(n).unwrap().len() as u64).collect();
    flag(counts == [6, 60, 1080, 36720] && (1..=4).all(|n| stabilizer_state_count(n) == counts[n - 1]), "enumeration counts");
    let w = magic_rom::synthesis::conversion_window();
    for k in 0..50 {
        let r = two_to_one_conversion(w * k as f64 / 49.0, store).unwrap();
        flag(r.max_deviation() <= tol::CONVERSION, "conversion identity");
    }

    violations.dedup();
    let ok = violations.is_empty();
    let detail = if ok {
        "R1, R3 (100 channels), R4, submultiplicativity, D1-D4, 500 Bloch vectors, counts 6/60/1080/36720, 50 conversion angles".into()
    } else {
        format!("violations: {}", violations.join(", "))
    };
    Outcome::check(ok, detail)
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let heavy = std::env::var_os(SKIP_HEAVY_ENV).is_none();
    let store = BasisStore::in_memory().allow_heavy(heavy);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("exact |H>^t robustness, t = 1..4", Box::new(|| exact_h_values(&store))),
        ("five |H> copies and per-copy rates", Box::new(|| five_h_copies(&store, heavy))),
        ("three-qubit diagonal gate classes", Box::new(|| three_qubit_classes(&store))),
        ("|F>^t robustness, t = 1..4", Box::new(|| f_state_values(&store))),
        ("maximally robust states", Box::new(|| maximal_states(&store))),
        ("st-norm and bracket tables", Box::new(bound_tables)),
        ("T-count bounds and Clifford-equivalent rewrites", Box::new(|| synthesis_checks(&store, heavy))),
        ("quasiprobability simulator", Box::new(|| simulator(&store))),
        ("property suites", Box::new(|| property_suites(&store))),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let tag = match out.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Skip => "SKIP",
        };
        println!("{tag} [{}] {title} ({:.1}s): {}", i + 1, start.elapsed().as_secs_f64(), out.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
