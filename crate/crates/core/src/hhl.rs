//! HHL circuits for normalised Poisson systems and solution recovery.
//!
//! Register layout (qubit 0 least significant): input register on
//! `0..n_in`, clock register on `n_in..n_in + n_clock`, ancilla on the top
//! qubit. The circuit runs state preparation, phase estimation of
//! `e^{iAt}`, clock-controlled ancilla rotations, uncomputation of the phase
//! estimation, and a terminal measurement layer.
//!
//! Rotation angles are computed from the integer clock value `k` directly,
//! `θ(k) = 2·arcsin(C/k)`, so the post-selected amplitudes are `C/λ̃_j` with
//! `λ̃_j = λ_j·2^{n_clock}·t/(2π)`. Recovery undoes that scale.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{CircuitError, Gate, QuantumCircuit, RegisterRoles};
use crate::linalg::{hamiltonian_exponential, vector_fidelity, ComplexMatrix, ComplexVector, LinalgError};
use crate::poisson::NormalizedSystem;
use crate::sim::{self, SimError, StateVector};

/// Nodes with `|x_i|` below this many volts are left out of the error mean.
pub const ERROR_NODE_FLOOR_V: f64 = 1e-12;

/// Tolerance for treating a clock-scale eigenvalue as an exact integer.
pub const ENCODING_TOL: f64 = 1e-9;

/// Poly-approx coefficient on `c₀·c₁`.
pub const POLY_CROSS_TERM: f64 = 3.51;

/// Evolution time at which the structure-(a) spectrum lands on clock
/// values 1 and 2.
pub const STRUCTURE_A_TIME: f64 = 3.0 * PI / 4.0;

#[derive(Debug, Error)]
pub enum HhlError {
    #[error("invalid HHL configuration: {0}")]
    InvalidConfig(String),
    #[error("right-hand side is zero; HHL is inapplicable")]
    Inapplicable,
    #[error("rotation angle undefined: C = {c} exceeds clock value {k}")]
    RotationDomain { k: u64, c: f64 },
    #[error("error metric undefined: every reference node is below {ERROR_NODE_FLOOR_V:e} V")]
    UndefinedError,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationMode {
    #[default]
    ExactArcsin,
    /// `θ = π·c₀ + (π/3)·c₁ − 3.51·c₀·c₁`, two clock qubits only.
    PolyApprox,
}

impl FromStr for RotationMode {
    type Err = HhlError;
    fn from_str(s: &str) -> Result<Self, HhlError> {
        match s {
            "exact" | "exact-arcsin" => Ok(Self::ExactArcsin),
            "poly" | "poly-approx" => Ok(Self::PolyApprox),
            _ => Err(HhlError::InvalidConfig(format!("unknown rotation mode '{s}'"))),
        }
    }
}

impl fmt::Display for RotationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExactArcsin => "exact-arcsin",
            Self::PolyApprox => "poly-approx",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Generic,
    /// Hand-set U-gate circuit for structure (a).
    Figure2,
    /// Raw-unitary circuit for structure (a).
    Figure4,
}

impl FromStr for Variant {
    type Err = HhlError;
    fn from_str(s: &str) -> Result<Self, HhlError> {
        match s {
            "generic" => Ok(Self::Generic),
            "figure2" => Ok(Self::Figure2),
            "figure4" => Ok(Self::Figure4),
            _ => Err(HhlError::InvalidConfig(format!("unknown variant '{s}'"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Generic => "generic",
            Self::Figure2 => "figure2",
            Self::Figure4 => "figure4",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HhlConfig {
    pub n_clock: usize,
    pub t: f64,
    /// Rotation constant in clock-integer units.
    pub c: f64,
    pub rotation: RotationMode,
    pub variant: Variant,
}

impl HhlConfig {
    pub fn new(n_clock: usize, t: f64) -> Self {
        Self {
            n_clock,
            t,
            c: 1.0,
            rotation: RotationMode::ExactArcsin,
            variant: Variant::Generic,
        }
    }

    pub fn with_rotation(mut self, rotation: RotationMode) -> Self {
        self.rotation = rotation;
        self
    }

    /// Fixed two-clock-qubit configuration of the explicit circuits.
    pub fn for_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::new(2, STRUCTURE_A_TIME)
        }
    }

    pub fn validate(&self) -> Result<(), HhlError> {
        let bad = |m: &str| Err(HhlError::InvalidConfig(m.to_string()));
        if self.n_clock == 0 {
            return bad("n_clock must be at least 1");
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad("evolution time must be positive");
        }
        if !(self.c >= 1.0 && self.c.is_finite()) {
            return bad("C must be at least 1");
        }
        if self.rotation == RotationMode::PolyApprox && (self.n_clock != 2 || self.c != 1.0) {
            return bad("poly-approx rotation needs n_clock = 2 and C = 1");
        }
        if self.variant != Variant::Generic && (self.n_clock != 2 || (self.t - STRUCTURE_A_TIME).abs() > 1e-12) {
            return bad("figure variants run with n_clock = 2 and t = 3π/4");
        }
        Ok(())
    }
}

/// `λ̃ = λ·2^{n_clock}·t/(2π)`.
pub fn encode_eigenvalue(lambda: f64, n_clock: usize, t: f64) -> Result<f64, HhlError> {
    if t.is_nan() || t <= 0.0 {
        return Err(HhlError::InvalidConfig("evolution time must be positive".into()));
    }
    Ok(lambda * (1u64 << n_clock) as f64 * t / (2.0 * PI))
}

/// Whether `value` is a nonzero integer below `2^{n_clock}`.
pub fn is_exact_encoding(value: f64, n_clock: usize) -> bool {
    let k = value.round();
    (value - k).abs() <= ENCODING_TOL && k >= 1.0 && k < (1u64 << n_clock) as f64
}

/// Ancilla rotation angle for clock value `k`.
pub fn rotation_angle(k: u64, c: f64, mode: RotationMode) -> Result<f64, HhlError> {
    if k == 0 {
        return Err(HhlError::InvalidConfig("clock value 0 carries no rotation".into()));
    }
    match mode {
        RotationMode::ExactArcsin => {
            let ratio = c / k as f64;
            if ratio > 1.0 {
                return Err(HhlError::RotationDomain { k, c });
            }
            Ok(2.0 * ratio.asin())
        }
        RotationMode::PolyApprox => {
            if k > 3 {
                return Err(HhlError::InvalidConfig(format!(
                    "poly-approx angle covers two clock bits, got k = {k}"
                )));
            }
            let c0 = (k & 1) as f64;
            let c1 = (k >> 1 & 1) as f64;
            Ok(PI * c0 + PI / 3.0 * c1 - POLY_CROSS_TERM * c0 * c1)
        }
    }
}

/// Qubit layout for an HHL register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HhlLayout {
    pub n_input: usize,
    pub n_clock: usize,
}

impl HhlLayout {
    pub fn for_dimension(dim: usize, n_clock: usize) -> Result<Self, HhlError> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(HhlError::InvalidConfig(format!(
                "system dimension {dim} is not a power of two ≥ 2"
            )));
        }
        Ok(Self {
            n_input: dim.trailing_zeros() as usize,
            n_clock,
        })
    }

    pub fn width(&self) -> usize {
        self.n_input + self.n_clock + 1
    }

    pub fn input(&self) -> Vec<usize> {
        (0..self.n_input).collect()
    }

    pub fn clock(&self) -> Vec<usize> {
        (self.n_input..self.n_input + self.n_clock).collect()
    }

    pub fn ancilla(&self) -> usize {
        self.n_input + self.n_clock
    }

    pub fn roles(&self) -> RegisterRoles {
        RegisterRoles {
            input: 0..self.n_input,
            clock: self.n_input..self.n_input + self.n_clock,
            ancilla: self.ancilla(),
        }
    }
}

/// `qubits[0]` is the least significant bit. Maps `|x⟩` to
/// `2^{-n/2} Σ_k e^{2πi·xk/2^n} |k⟩`.
pub fn qft(width: usize, qubits: &[usize]) -> QuantumCircuit {
    let n = qubits.len();
    let mut c = QuantumCircuit::new(width);
    for j in (0..n).rev() {
        c.push(Gate::h(qubits[j]));
        for m in (0..j).rev() {
            let angle = PI / (1u64 << (j - m)) as f64;
            c.push(Gate::phase(qubits[j], angle).controlled_by(&[qubits[m]]));
        }
    }
    for i in 0..n / 2 {
        c.push(Gate::swap(qubits[i], qubits[n - 1 - i]));
    }
    c
}

pub fn inverse_qft(width: usize, qubits: &[usize]) -> QuantumCircuit {
    qft(width, qubits).adjoint().expect("QFT is measurement-free")
}

/// Gate preparing `|b⟩` from `|0…0⟩` on `qubits`.
///
/// A standard basis vector becomes X gates; anything else becomes a raw
/// unitary whose first column is `b`, completed by Gram–Schmidt.
pub fn state_preparation(b: &[f64], qubits: &[usize]) -> Result<Vec<Gate>, HhlError> {
    let dim = b.len();
    if dim != 1 << qubits.len() {
        return Err(HhlError::InvalidConfig("state size does not match register".into()));
    }
    let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(HhlError::Inapplicable);
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(HhlError::InvalidConfig(format!("right-hand side norm {norm} is not 1")));
    }
    if let Some(j) = b.iter().position(|&x| x == 1.0) {
        return Ok(qubits
            .iter()
            .enumerate()
            .filter(|(bit, _)| j >> bit & 1 == 1)
            .map(|(_, &q)| Gate::x(q))
            .collect());
    }

    let mut columns: Vec<Vec<f64>> = vec![b.to_vec()];
    for e in 0..dim {
        if columns.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[e] = 1.0;
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for col in &columns {
                let proj: f64 = col.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(col) {
                    *vi -= proj * ci;
                }
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            columns.push(v.iter().map(|x| x / n).collect());
        }
    }
    let mut m = ComplexMatrix::zeros(dim);
    for (j, col) in columns.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            m[(i, j)] = Complex64::new(x, 0.0);
        }
    }
    Ok(vec![Gate::unitary(m, qubits.to_vec())])
}

/// Block operator applying `RY(θ(k))` to the ancilla for every clock value
/// `k ≥ 1`. Targets are the clock qubits followed by the ancilla.
pub fn rotation_multiplexer(layout: &HhlLayout, c: f64, mode: RotationMode) -> Result<Gate, HhlError> {
    let clock_states = 1usize << layout.n_clock;
    let mut m = ComplexMatrix::identity(2 * clock_states);
    for k in 1..clock_states {
        let theta = rotation_angle(k as u64, c, mode)?;
        let (s, co) = (theta / 2.0).sin_cos();
        let (lo, hi) = (k, k + clock_states);
        m[(lo, lo)] = Complex64::new(co, 0.0);
        m[(lo, hi)] = Complex64::new(-s, 0.0);
        m[(hi, lo)] = Complex64::new(s, 0.0);
        m[(hi, hi)] = Complex64::new(co, 0.0);
    }
    let mut targets = layout.clock();
    targets.push(layout.ancilla());
    Ok(Gate::unitary(m, targets))
}

/// An HHL circuit split into its stages.
#[derive(Debug, Clone, PartialEq)]
pub struct HhlCircuit {
    pub layout: HhlLayout,
    pub preparation: QuantumCircuit,
    /// Clock Hadamards, controlled powers and inverse QFT.
    pub phase_estimation: QuantumCircuit,
    pub rotation: QuantumCircuit,
}

impl HhlCircuit {
    /// Everything up to and including the ancilla rotation.
    pub fn before_uncompute(&self) -> QuantumCircuit {
        let mut c = self.empty();
        c.extend(&self.preparation)
            .extend(&self.phase_estimation)
            .extend(&self.rotation);
        c
    }

    pub fn full(&self) -> QuantumCircuit {
        let mut c = self.before_uncompute();
        c.extend(
            &self
                .phase_estimation
                .adjoint()
                .expect("phase estimation is measurement-free"),
        );
        c.measure_all();
        c
    }

    fn empty(&self) -> QuantumCircuit {
        QuantumCircuit::new(self.layout.width()).with_roles(self.layout.roles())
    }
}

fn phase_estimation_with<F>(layout: &HhlLayout, mut controlled_power: F) -> Result<QuantumCircuit, HhlError>
where
    F: FnMut(usize, usize) -> Result<Vec<Gate>, HhlError>,
{
    let width = layout.width();
    let clock = layout.clock();
    let mut c = QuantumCircuit::new(width);
    for &q in &clock {
        c.push(Gate::h(q));
    }
    for (r, &q) in clock.iter().enumerate() {
        for g in controlled_power(r, q)? {
            c.push(g);
        }
    }
    c.extend(&inverse_qft(width, &clock));
    Ok(c)
}

/// Generic HHL stages for any power-of-two system.
pub fn hhl_stages(sys: &NormalizedSystem, cfg: &HhlConfig) -> Result<HhlCircuit, HhlError> {
    cfg.validate()?;
    if !sys.is_hhl_applicable() {
        return Err(HhlError::Inapplicable);
    }
    let layout = HhlLayout::for_dimension(sys.dim(), cfg.n_clock)?;
    let a = sys.matrix();
    let input = layout.input();

    let mut preparation = QuantumCircuit::new(layout.width());
    for g in state_preparation(&sys.b, &input)? {
        preparation.push(g);
    }
    let phase_estimation = phase_estimation_with(&layout, |r, q| {
        let power = hamiltonian_exponential(&a, cfg.t * (1u64 << r) as f64)?;
        Ok(vec![Gate::unitary(power, input.clone()).controlled_by(&[q])])
    })?;
    let mut rotation = QuantumCircuit::new(layout.width());
    rotation.push(rotation_multiplexer(&layout, cfg.c, cfg.rotation)?);

    Ok(HhlCircuit {
        layout,
        preparation,
        phase_estimation,
        rotation,
    })
}

pub fn build_generic_hhl(sys: &NormalizedSystem, cfg: &HhlConfig) -> Result<QuantumCircuit, HhlError> {
    Ok(hhl_stages(sys, cfg)?.full())
}

/// The normalised structure-(a) system: `A = [[1, −1/3], [−1/3, 1]]`,
/// `b = (0, 1)`, with the raw scale factors of the preset.
pub fn structure_a_system() -> NormalizedSystem {
    NormalizedSystem {
        a: vec![vec![1.0, -1.0 / 3.0], vec![-1.0 / 3.0, 1.0]],
        b: vec![0.0, 1.0],
        scale: 3.0,
        bnorm: 4.0,
    }
}

/// U-gate angles standing in for `(e^{iAt})^{2^r}`, r = 0, 1.
pub const FIGURE2_U_ANGLES: [(f64, f64, f64); 2] = [(FRAC_PI_2, -FRAC_PI_2, FRAC_PI_2), (PI, PI, 0.0)];

/// Phase `α` with `e^{iα}·U(θ, φ, λ) = target`.
///
/// `det(target) = e^{2iα}·det(U)` fixes `α` modulo π; the branch is picked
/// by matching the largest entry of `U`.
pub fn phase_difference(target: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    let half = ((target.determinant() / u.determinant()).arg() / 2.0).rem_euclid(2.0 * PI);
    let (i, j) = (0..4)
        .map(|idx| (idx / 2, idx % 2))
        .max_by(|&a, &b| u[a].norm().total_cmp(&u[b].norm()))
        .unwrap();
    let candidate = Complex64::from_polar(1.0, half) * u[(i, j)];
    let alpha = if (candidate - target[(i, j)]).norm() <= (candidate + target[(i, j)]).norm() {
        half
    } else {
        half + PI
    };
    let alpha = alpha.rem_euclid(2.0 * PI);
    let alpha = if alpha > PI { alpha - 2.0 * PI } else { alpha };
    // Rounding residue of an exact zero would otherwise leak into exports.
    if alpha.abs() < 1e-12 {
        0.0
    } else {
        alpha
    }
}

/// The controlled pair `P(α)` on the clock qubit then controlled-`U` on the
/// input, equal to controlled-`(e^{iAt})^{2^r}` at `t = 3π/4`.
pub fn figure2_controlled_power(r: usize, control: usize, target: usize) -> Result<Vec<Gate>, HhlError> {
    let (theta, phi, lambda) = FIGURE2_U_ANGLES[r];
    let a = structure_a_system().matrix();
    let exact = hamiltonian_exponential(&a, STRUCTURE_A_TIME * (1u64 << r) as f64)?;
    let u = crate::circuit::u_matrix(theta, phi, lambda);
    let alpha = phase_difference(&exact, &u);
    Ok(vec![
        Gate::phase(control, alpha),
        Gate::u(target, theta, phi, lambda).controlled_by(&[control]),
    ])
}

/// Explicit structure-(a) stages with hand-set U gates and two
/// singly-controlled ancilla rotations.
pub fn figure2_stages() -> Result<HhlCircuit, HhlError> {
    let layout = HhlLayout { n_input: 1, n_clock: 2 };
    let input = 0;
    let mut preparation = QuantumCircuit::new(layout.width());
    preparation.push(Gate::x(input));
    let phase_estimation = phase_estimation_with(&layout, |r, q| figure2_controlled_power(r, q, input))?;
    let mut rotation = QuantumCircuit::new(layout.width());
    let clock = layout.clock();
    for (bit, &q) in clock.iter().enumerate() {
        let theta = rotation_angle(1 << bit, 1.0, RotationMode::ExactArcsin)?;
        rotation.push(Gate::ry(layout.ancilla(), theta).controlled_by(&[q]));
    }
    Ok(HhlCircuit {
        layout,
        preparation,
        phase_estimation,
        rotation,
    })
}

pub fn build_figure2_circuit() -> QuantumCircuit {
    figure2_stages().expect("figure2 construction is fixed").full()
}

/// Explicit structure-(a) stages with raw controlled powers of `e^{iAt}`
/// and an exact-arcsin rotation multiplexer.
pub fn figure4_stages() -> Result<HhlCircuit, HhlError> {
    let layout = HhlLayout { n_input: 1, n_clock: 2 };
    let input = 0;
    let a = structure_a_system().matrix();
    let mut preparation = QuantumCircuit::new(layout.width());
    preparation.push(Gate::x(input));
    let phase_estimation = phase_estimation_with(&layout, |r, q| {
        let power = hamiltonian_exponential(&a, STRUCTURE_A_TIME * (1u64 << r) as f64)?;
        Ok(vec![Gate::unitary(power, vec![input]).controlled_by(&[q])])
    })?;
    let mut rotation = QuantumCircuit::new(layout.width());
    rotation.push(rotation_multiplexer(&layout, 1.0, RotationMode::ExactArcsin)?);
    Ok(HhlCircuit {
        layout,
        preparation,
        phase_estimation,
        rotation,
    })
}

pub fn build_figure4_circuit() -> QuantumCircuit {
    figure4_stages().expect("figure4 construction is fixed").full()
}

pub fn stages_for(sys: &NormalizedSystem, cfg: &HhlConfig) -> Result<HhlCircuit, HhlError> {
    cfg.validate()?;
    match cfg.variant {
        Variant::Generic => hhl_stages(sys, cfg),
        Variant::Figure2 | Variant::Figure4 => {
            let reference = structure_a_system();
            let same = sys.dim() == 2
                && sys.b.iter().zip(&reference.b).all(|(x, y)| (x - y).abs() < 1e-12)
                && (0..2).all(|i| (0..2).all(|j| (sys.a[i][j] - reference.a[i][j]).abs() < 1e-12));
            if !same {
                return Err(HhlError::InvalidConfig(
                    "figure variants are fixed to the structure-(a) system".into(),
                ));
            }
            if cfg.variant == Variant::Figure2 {
                figure2_stages()
            } else {
                figure4_stages()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HhlResult {
    /// State after the full circuit, before post-selection.
    pub final_state: StateVector,
    /// Probability of reading the ancilla as 1.
    pub p_success: f64,
    /// Probability that the clock register is not `|0…0⟩` given ancilla 1.
    pub clock_leakage: f64,
    /// Unit-norm input-register estimate, sign-aligned with the reference.
    pub unit_solution: Vec<f64>,
    /// Recovered interior potentials in volts.
    pub recovered_v: Vec<f64>,
    pub fidelity: f64,
    /// `None` when every reference node is (numerically) zero.
    pub avg_rel_abs_error: Option<f64>,
    pub qubit_budget: usize,
}

/// Runs HHL and recovers the solution in volts.
///
/// After post-selecting ancilla = 1, magnitudes come from the input-register
/// marginal over every clock value, so imperfect uncomputation shows up in
/// the result. Relative signs come from the clock-`|0…0⟩` slice; the overall
/// sign is chosen so the estimate has a non-negative overlap with `truth`.
pub fn run_hhl(sys: &NormalizedSystem, cfg: &HhlConfig, truth: &[f64]) -> Result<HhlResult, HhlError> {
    let stages = stages_for(sys, cfg)?;
    let layout = stages.layout;
    if truth.len() != sys.dim() {
        return Err(HhlError::InvalidConfig(format!(
            "reference has {} nodes, system has {}",
            truth.len(),
            sys.dim()
        )));
    }
    let circuit = stages.full();
    let final_state = sim::run(&circuit.unitary_part(), None)?;
    let (selected, p_success) = sim::postselect(&final_state, layout.ancilla(), 1)?;

    let clock: Vec<usize> = layout.clock();
    let clock_table = sim::marginal(&selected, &clock)?;
    let clock_leakage = (1.0 - clock_table.probabilities()[0]).max(0.0);

    let input = layout.input();
    let input_table = sim::marginal(&selected, &input)?;
    let n = sys.dim();
    // Clock bits are zero for indices below n.
    let slice = &selected.amplitudes()[..n];
    let reference = slice
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    let mut unit: Vec<f64> = (0..n)
        .map(|i| {
            let magnitude = input_table.probabilities()[i].sqrt();
            let sign = if reference.norm() > 1e-12 && (slice[i] * reference.conj()).re < 0.0 {
                -1.0
            } else {
                1.0
            };
            sign * magnitude
        })
        .collect();
    if unit.iter().zip(truth).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
        unit.iter_mut().for_each(|x| *x = -*x);
    }

    let clock_scale = (1u64 << layout.n_clock) as f64 * cfg.t / (2.0 * PI * cfg.c);
    let factor = p_success.sqrt() * clock_scale * sys.solution_scale();
    let recovered_v: Vec<f64> = unit.iter().map(|x| x * factor).collect();

    let fidelity = vector_fidelity(
        &ComplexVector::from_real(&recovered_v),
        &ComplexVector::from_real(truth),
    )?;
    let avg_rel_abs_error = match avg_rel_abs_error(&recovered_v, truth) {
        Ok(e) => Some(e),
        Err(HhlError::UndefinedError) => None,
        Err(e) => return Err(e),
    };
    Ok(HhlResult {
        final_state,
        p_success,
        clock_leakage,
        unit_solution: unit,
        recovered_v,
        fidelity,
        avg_rel_abs_error,
        qubit_budget: layout.width(),
    })
}

/// Mean of `|x̂_i − x_i| / |x_i|` over nodes with `|x_i| ≥ 1e-12`.
pub fn avg_rel_abs_error(estimate: &[f64], reference: &[f64]) -> Result<f64, HhlError> {
    if estimate.len() != reference.len() {
        return Err(HhlError::InvalidConfig("estimate and reference lengths differ".into()));
    }
    let terms: Vec<f64> = estimate
        .iter()
        .zip(reference)
        .filter(|(_, x)| x.abs() >= ERROR_NODE_FLOOR_V)
        .map(|(e, x)| (e - x).abs() / x.abs())
        .collect();
    if terms.is_empty() {
        return Err(HhlError::UndefinedError);
    }
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}
