//! Dense statevector execution.
//!
//! Gates act in place on amplitude blocks selected by bit masks; no
//! `2ⁿ × 2ⁿ` operator is ever formed. Measure gates are ignored by [`run`]:
//! outcome statistics come from [`marginal`], [`postselect`] and [`sample`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use thiserror::Error;

use crate::circuit::{Gate, QuantumCircuit, Violation};
use crate::linalg::ComplexMatrix;

pub const MAX_WIDTH: usize = 16;
pub const NORM_TOL: f64 = 1e-10;
/// Smallest branch probability [`postselect`] will renormalise.
pub const MIN_POSTSELECT_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("circuit width {circuit} does not match state width {state}")]
    WidthMismatch { circuit: usize, state: usize },
    #[error("width {0} outside supported range 1..={MAX_WIDTH}")]
    UnsupportedWidth(usize),
    #[error("invalid circuit: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidCircuit(Vec<Violation>),
    #[error("qubit index {index} out of range for width {width}")]
    InvalidQubit { index: usize, width: usize },
    #[error("state is not normalised (norm² = {0})")]
    NotNormalized(f64),
    #[error("post-selection impossible: branch probability {probability:e} on qubit {qubit}")]
    PostSelectionImpossible { qubit: usize, probability: f64 },
    #[error("qubit subset is empty")]
    EmptySubset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(width: usize) -> Result<Self, SimError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(SimError::UnsupportedWidth(width));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << width];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { width, amplitudes })
    }

    pub fn basis(width: usize, index: usize) -> Result<Self, SimError> {
        let mut s = Self::zero(width)?;
        if index >= s.amplitudes.len() {
            return Err(SimError::InvalidQubit { index, width });
        }
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps amplitudes whose squared norm is already 1 within tolerance.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(SimError::UnsupportedWidth(0));
        }
        let width = len.trailing_zeros() as usize;
        if width > MAX_WIDTH {
            return Err(SimError::UnsupportedWidth(width));
        }
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized(n2));
        }
        Ok(Self { width, amplitudes })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies one non-measurement gate in place. Measure is a no-op.
    pub fn apply_gate(&mut self, gate: &Gate) {
        let Some(m) = gate.matrix() else { return };
        let control_mask = gate.controls.iter().fold(0usize, |acc, &c| acc | (1 << c));
        if gate.targets.len() == 1 {
            apply_single(&mut self.amplitudes, gate.targets[0], control_mask, &m);
        } else {
            apply_multi(&mut self.amplitudes, &gate.targets, control_mask, &m);
        }
    }
}

fn apply_single(amps: &mut [Complex64], target: usize, control_mask: usize, m: &ComplexMatrix) {
    let bit = 1usize << target;
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    for i in 0..amps.len() {
        if i & bit != 0 || i & control_mask != control_mask {
            continue;
        }
        let j = i | bit;
        let (a0, a1) = (amps[i], amps[j]);
        amps[i] = m00 * a0 + m01 * a1;
        amps[j] = m10 * a0 + m11 * a1;
    }
}

fn apply_multi(amps: &mut [Complex64], targets: &[usize], control_mask: usize, m: &ComplexMatrix) {
    let k = targets.len();
    let block = 1usize << k;
    let target_mask = targets.iter().fold(0usize, |acc, &t| acc | (1 << t));
    // Offset of local basis state `l` within the block.
    let offsets: Vec<usize> = (0..block)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(bit, _)| l >> bit & 1 == 1)
                .fold(0usize, |acc, (_, &t)| acc | (1 << t))
        })
        .collect();
    let mut gathered = vec![Complex64::new(0.0, 0.0); block];
    for base in 0..amps.len() {
        if base & target_mask != 0 || base & control_mask != control_mask {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, g) in gathered.iter().enumerate() {
                acc += m[(row, col)] * g;
            }
            amps[base | off] = acc;
        }
    }
}

/// Unitary evolution of `initial` (default `|0…0⟩`) under the circuit.
pub fn run(circuit: &QuantumCircuit, initial: Option<&StateVector>) -> Result<StateVector, SimError> {
    circuit.validate().map_err(SimError::InvalidCircuit)?;
    let mut state = match initial {
        Some(s) if s.width != circuit.width() => {
            return Err(SimError::WidthMismatch {
                circuit: circuit.width(),
                state: s.width,
            })
        }
        Some(s) => s.clone(),
        None => StateVector::zero(circuit.width())?,
    };
    for gate in circuit.gates() {
        state.apply_gate(gate);
    }
    Ok(state)
}

/// Outcome probabilities over a subset of qubits.
///
/// Local index bit `i` corresponds to the `i`-th smallest qubit of the
/// subset; rendered bitstrings put the highest qubit index leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    qubits: Vec<usize>,
    probabilities: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(mut qubits: Vec<usize>, probabilities: Vec<f64>) -> Self {
        qubits.sort_unstable();
        assert_eq!(probabilities.len(), 1 << qubits.len());
        Self { qubits, probabilities }
    }

    /// Qubits in ascending order.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Probability of the outcome assigning `value` to each listed qubit.
    /// Every qubit of the table must be listed.
    pub fn probability_of(&self, assignment: &[(usize, u8)]) -> Option<f64> {
        if assignment.len() != self.qubits.len() {
            return None;
        }
        let mut index = 0;
        for &(q, v) in assignment {
            let pos = self.qubits.iter().position(|&x| x == q)?;
            if v > 1 {
                return None;
            }
            index |= (v as usize) << pos;
        }
        Some(self.probabilities[index])
    }

    pub fn get(&self, bitstring: &str) -> Option<f64> {
        let index = parse_bitstring(bitstring, self.qubits.len())?;
        Some(self.probabilities[index])
    }

    pub fn render(&self, index: usize) -> String {
        render_bits(index, self.qubits.len())
    }

    /// `(bitstring, probability)` pairs in ascending local index order.
    pub fn entries(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        self.probabilities.iter().enumerate().map(|(i, &p)| (self.render(i), p))
    }
}

fn render_bits(index: usize, len: usize) -> String {
    (0..len)
        .rev()
        .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn parse_bitstring(s: &str, len: usize) -> Option<usize> {
    if s.len() != len {
        return None;
    }
    s.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

pub fn marginal(state: &StateVector, subset: &[usize]) -> Result<ProbabilityTable, SimError> {
    if subset.is_empty() {
        return Err(SimError::EmptySubset);
    }
    let mut qubits = subset.to_vec();
    qubits.sort_unstable();
    qubits.dedup();
    if let Some(&bad) = qubits.iter().find(|&&q| q >= state.width) {
        return Err(SimError::InvalidQubit {
            index: bad,
            width: state.width,
        });
    }
    let mut probabilities = vec![0.0; 1 << qubits.len()];
    for (i, a) in state.amplitudes.iter().enumerate() {
        let local = qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (pos, &q)| acc | ((i >> q & 1) << pos));
        probabilities[local] += a.norm_sqr();
    }
    Ok(ProbabilityTable { qubits, probabilities })
}

/// Projects `qubit` onto `value`, removes it, and renormalises. Returns the
/// reduced state and the branch probability.
pub fn postselect(state: &StateVector, qubit: usize, value: u8) -> Result<(StateVector, f64), SimError> {
    if qubit >= state.width || value > 1 {
        return Err(SimError::InvalidQubit {
            index: qubit,
            width: state.width,
        });
    }
    if state.width == 1 {
        return Err(SimError::UnsupportedWidth(0));
    }
    let low_mask = (1usize << qubit) - 1;
    let mut kept = Vec::with_capacity(state.amplitudes.len() / 2);
    for rest in 0..(state.amplitudes.len() >> 1) {
        let full = (rest & low_mask) | ((rest & !low_mask) << 1) | ((value as usize) << qubit);
        kept.push(state.amplitudes[full]);
    }
    let probability: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
    if probability < MIN_POSTSELECT_PROBABILITY {
        return Err(SimError::PostSelectionImpossible { qubit, probability });
    }
    let scale = 1.0 / probability.sqrt();
    for a in &mut kept {
        *a *= scale;
    }
    Ok((
        StateVector {
            width: state.width - 1,
            amplitudes: kept,
        },
        probability,
    ))
}

/// Seeded shot histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    pub seed: u64,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl ShotCounts {
    pub fn count(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one 64-bit output.
fn uniform(rng: &mut Pcg64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `shots` outcomes from the table by inverse-CDF sampling.
///
/// The generator is PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`, multiplier
/// `0x2360ed051fc65da44385df649fccf645`, increment
/// `0x5851f42d4c957f2d14057b7ef767814f`) seeded through
/// `SeedableRng::seed_from_u64`; each shot consumes one 64-bit output.
pub fn sample(table: &ProbabilityTable, shots: u64, seed: u64) -> ShotCounts {
    let mut rng = Pcg64::seed_from_u64(seed);
    let total: f64 = table.probabilities.iter().sum();
    let mut cdf = Vec::with_capacity(table.probabilities.len());
    let mut acc = 0.0;
    for &p in &table.probabilities {
        acc += p / total;
        cdf.push(acc);
    }
    let last_nonzero = table.probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut tally = vec![0u64; cdf.len()];
    for _ in 0..shots {
        let u = uniform(&mut rng);
        let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
        tally[idx] += 1;
    }
    let counts = tally
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(i, &n)| (table.render(i), n))
        .collect();
    ShotCounts { seed, shots, counts }
}
