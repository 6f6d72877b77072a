#![allow(dead_code)]

use magic_rom::cache::BasisStore;
use magic_rom::pauli::{PauliLetter, PauliString};
use magic_rom::robustness::rom;
use magic_rom::stabilizer::{CliffordGate, StabilizerEnumeration};
use magic_rom::state::{bloch_state, ChannelOp, MeasureMode};
use magic_rom::DensityOperator;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub fn rom_value(rho: &DensityOperator, store: &BasisStore) -> f64 {
    let basis = store.get(rho.num_qubits()).unwrap();
    rom(rho, &basis).unwrap().value
}

pub fn random_clifford<R: Rng>(n: usize, len: usize, rng: &mut R) -> Vec<CliffordGate> {
    (0..len)
        .map(|_| {
            let q = rng.random_range(0..n);
            match rng.random_range(0..if n > 1 { 7 } else { 5 }) {
                0 => CliffordGate::H(q),
                1 => CliffordGate::S(q),
                2 => CliffordGate::SqrtX(q),
                3 => CliffordGate::Sdg(q),
                4 => CliffordGate::Z(q),
                5 => CliffordGate::Cnot(q, (q + rng.random_range(1..n)) % n),
                _ => CliffordGate::Cz(q, (q + rng.random_range(1..n)) % n),
            }
        })
        .collect()
}

pub fn random_hermitian_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    loop {
        let letters: Vec<PauliLetter> = (0..n).map(|_| PauliLetter::from_code(rng.random_range(0..4))).collect();
        let p = PauliString::from_letters(&letters);
        if !p.is_identity() {
            return if rng.random_bool(0.5) { p } else { p.negated() };
        }
    }
}

/// Uniform over the pure stabilizer states on `n` qubits.
pub fn random_stabilizer_vector<R: Rng>(e: &StabilizerEnumeration, rng: &mut R) -> Vec<Complex64> {
    e.tableau(rng.random_range(0..e.len())).unwrap().state_vector().unwrap()
}

/// Mixed single-qubit state with Bloch vector uniform in the ball.
pub fn random_qubit<R: Rng>(rng: &mut R) -> DensityOperator {
    loop {
        let r = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if r.iter().map(|x: &f64| x * x).sum::<f64>() <= 1.0 {
            return bloch_state(r).unwrap();
        }
    }
}

/// Random full-rank state `GG†/Tr` with Gaussian-like entries.
pub fn random_density<R: Rng>(n: usize, rng: &mut R) -> DensityOperator {
    let d = 1 << n;
    let g = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityOperator::new(m / tr).unwrap()
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_pure<R: Rng>(n: usize, rng: &mut R) -> DensityOperator {
    let v: Vec<Complex64> =
        (0..1 << n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    DensityOperator::from_pure(&v).unwrap()
}

/// `Tr(O ρ_out)` by dense simulation; measurement outcomes are averaged.
pub fn dense_expectation(c: &magic_rom::sampler::Circuit) -> f64 {
    use magic_rom::sampler::CircuitOp;
    use magic_rom::state::apply_stabilizer_channel;
    use magic_rom::PhasePolynomialGate;

    let n = c.num_qubits();
    let mut zero = vec![Complex64::new(0.0, 0.0); 1 << n];
    zero[0] = Complex64::new(1.0, 0.0);
    let mut rho = DensityOperator::from_pure(&zero).unwrap();
    for op in c.ops() {
        rho = match op {
            CircuitOp::Clifford(g) => rho.apply_clifford(g).unwrap(),
            CircuitOp::Measure(p) => {
                apply_stabilizer_channel(&rho, &[ChannelOp::Measure { pauli: *p, mode: MeasureMode::KeepBoth }]).unwrap().0
            }
            CircuitOp::T(q) => {
                let mut g = PhasePolynomialGate::identity(n);
                g.add_t(*q, 1).unwrap();
                rho.conjugated(&g.to_matrix()).unwrap()
            }
            CircuitOp::Diagonal(g) => rho.conjugated(&g.to_matrix()).unwrap(),
        };
    }
    rho.expectation(c.observable()).unwrap()
}

/// A trace-preserving stabilizer channel keeping the register at 1 or 2 qubits.
pub fn random_channel<R: Rng>(mut n: usize, rng: &mut R) -> Vec<ChannelOp> {
    let single = StabilizerEnumeration::new(1).unwrap();
    let mut ops = Vec::new();
    for _ in 0..rng.random_range(1..6) {
        match rng.random_range(0..5) {
            0 => ops.extend(random_clifford(n, 3, rng).into_iter().map(ChannelOp::Clifford)),
            1 => ops.push(ChannelOp::Measure { pauli: random_hermitian_pauli(n, rng), mode: MeasureMode::KeepBoth }),
            2 => ops.push(ChannelOp::Controlled {
                pauli: random_hermitian_pauli(n, rng),
                on_minus: random_clifford(n, 2, rng),
            }),
            3 if n < 2 => {
                ops.push(ChannelOp::AppendAncilla(single.tableau(rng.random_range(0..6)).unwrap()));
                n += 1;
            }
            _ if n > 1 => {
                ops.push(ChannelOp::Discard(rng.random_range(0..n)));
                n -= 1;
            }
            _ => ops.extend(random_clifford(n, 1, rng).into_iter().map(ChannelOp::Clifford)),
        }
    }
    ops
}
