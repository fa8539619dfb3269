#![allow(dead_code)]

use std::f64::consts::PI;

use hhl_poisson::circuit::{Gate, QuantumCircuit};
use hhl_poisson::linalg::ComplexMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::RngExt;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn gram_schmidt(cols: &mut [Vec<Complex64>]) {
    for j in 0..cols.len() {
        for k in 0..j {
            let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
            let prev = cols[k].clone();
            for (x, p) in cols[j].iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|x| *x /= norm);
    }
}

fn columns_to_matrix(cols: &[Vec<Complex64>]) -> ComplexMatrix {
    let n = cols.len();
    let mut entries = vec![Complex64::default(); n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            entries[i * n + j] = *v;
        }
    }
    ComplexMatrix::from_row_major(entries).unwrap()
}

pub fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        })
        .collect();
    gram_schmidt(&mut cols);
    columns_to_matrix(&cols)
}

/// Real orthogonal matrix as row vectors.
pub fn random_orthogonal(rng: &mut StdRng, dim: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| c(rng.random::<f64>() - 0.5)).collect())
        .collect();
    gram_schmidt(&mut cols);
    (0..dim).map(|i| (0..dim).map(|j| cols[j][i].re).collect()).collect()
}

#[allow(clippy::needless_range_loop)]
pub fn random_symmetric(rng: &mut StdRng, dim: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let v = 2.0 * rng.random::<f64>() - 1.0;
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

pub fn random_hermitian(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let mut e = vec![Complex64::default(); dim * dim];
    for i in 0..dim {
        e[i * dim + i] = c(2.0 * rng.random::<f64>() - 1.0);
        for j in i + 1..dim {
            let v = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            e[i * dim + j] = v;
            e[j * dim + i] = v.conj();
        }
    }
    ComplexMatrix::from_row_major(e).unwrap()
}

pub fn random_unit_vector(rng: &mut StdRng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// SPD matrix `Q diag(λ) Qᵀ` whose eigenvalues land on distinct clock
/// integers `k` for the given `(n_clock, t)`.
pub fn exact_spectrum_system(rng: &mut StdRng, dim: usize, n_clock: usize, t: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let slots = (1u64 << n_clock) - 1;
    assert!(dim as u64 <= slots, "not enough clock values");
    let mut ks: Vec<u64> = (1..=slots).collect();
    for i in (1..ks.len()).rev() {
        ks.swap(i, rng.random_range(0..=i));
    }
    let lambdas: Vec<f64> = ks[..dim]
        .iter()
        .map(|&k| 2.0 * PI * k as f64 / ((1u64 << n_clock) as f64 * t))
        .collect();
    let q = random_orthogonal(rng, dim);
    let a = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|m| q[i][m] * lambdas[m] * q[j][m]).sum())
                .collect()
        })
        .collect();
    (a, lambdas)
}

/// Random gate drawn from every kind the simulator supports.
pub fn random_gate(rng: &mut StdRng, width: usize) -> Gate {
    let mut qubits: Vec<usize> = (0..width).collect();
    for i in (1..qubits.len()).rev() {
        qubits.swap(i, rng.random_range(0..=i));
    }
    let angle = |rng: &mut StdRng| (rng.random::<f64>() * 2.0 - 1.0) * 2.0 * PI;
    let q = qubits[0];
    let base = match rng.random_range(0..7u32) {
        0 => Gate::x(q),
        1 => Gate::h(q),
        2 => Gate::u(q, angle(rng), angle(rng), angle(rng)),
        3 => Gate::ry(q, angle(rng)),
        4 => Gate::phase(q, angle(rng)),
        5 if width >= 2 => Gate::swap(q, qubits[1]),
        6 if width >= 2 => Gate::unitary(random_unitary(rng, 4), vec![q, qubits[1]]),
        _ => Gate::h(q),
    };
    let used = base.targets.len();
    let free = width - used;
    let n_controls = if free == 0 {
        0
    } else {
        rng.random_range(0..=free.min(2))
    };
    base.controlled_by(&qubits[used..used + n_controls])
}

pub fn random_circuit(rng: &mut StdRng, width: usize, depth: usize) -> QuantumCircuit {
    let mut c = QuantumCircuit::new(width);
    for _ in 0..depth {
        c.push(random_gate(rng, width));
    }
    c
}

/// Full `2^w × 2^w` operator of one gate, built from its definition:
/// identity on idle qubits, identity when any control is 0, the gate block
/// otherwise. Uncontrolled single-qubit gates go through an explicit
/// Kronecker chain instead.
pub fn dense_gate(g: &Gate, width: usize) -> ComplexMatrix {
    let block = g.matrix().expect("unitary gate");
    if g.controls.is_empty() && g.targets.len() == 1 {
        let q = g.targets[0];
        let high = ComplexMatrix::identity(1 << (width - q - 1));
        let low = ComplexMatrix::identity(1 << q);
        return high.kron(&block).kron(&low);
    }
    let dim = 1usize << width;
    let target_mask: usize = g.targets.iter().map(|&q| 1 << q).sum();
    let local = |idx: usize| -> usize {
        g.targets
            .iter()
            .enumerate()
            .map(|(bit, &q)| ((idx >> q) & 1) << bit)
            .sum()
    };
    let mut e = vec![Complex64::default(); dim * dim];
    for col in 0..dim {
        let active = g.controls.iter().all(|&q| (col >> q) & 1 == 1);
        for row in 0..dim {
            if row & !target_mask != col & !target_mask {
                continue;
            }
            e[row * dim + col] = if active {
                block.entries()[local(row) * block.dim() + local(col)]
            } else if row == col {
                c(1.0)
            } else {
                Complex64::default()
            };
        }
    }
    ComplexMatrix::from_row_major(e).unwrap()
}

pub fn dense_circuit(circuit: &QuantumCircuit) -> ComplexMatrix {
    let w = circuit.width();
    circuit
        .gates()
        .iter()
        .filter(|g| !g.is_measure())
        .fold(ComplexMatrix::identity(1 << w), |acc, g| dense_gate(g, w).matmul(&acc))
}

/// `e^{iAt}` by Taylor series with scaling and squaring.
pub fn taylor_exponential(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.frobenius_norm() * t.abs();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let step = a.scale(Complex64::new(0.0, t / 2f64.powi(squarings as i32)));
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..30 {
        term = term.matmul(&step).scale(c(1.0 / k as f64));
        sum = add(&sum, &term);
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

pub fn add(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let e = a.entries().iter().zip(b.entries()).map(|(x, y)| x + y).collect();
    ComplexMatrix::from_row_major(e).unwrap()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
