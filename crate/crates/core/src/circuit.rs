//! Gate-level circuit IR with register roles, adjoints and OpenQASM 2.0
//! export.
//!
//! Register convention: qubit 0 is the least-significant bit of a basis
//! label `|q_{n-1} … q_1 q_0⟩`. HHL circuits place the input register on the
//! lowest indices, the clock register above it and the ancilla on the
//! highest index.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Range;

use num_complex::Complex64;
use thiserror::Error;

use crate::fmt_sig;
use crate::linalg::{ComplexMatrix, UNITARY_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    PauliX,
    Hadamard,
    /// `U(θ, φ, λ)` in the usual three-angle parameterisation.
    U {
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    RY(f64),
    Phase(f64),
    Swap,
    /// Arbitrary unitary on `targets`; local basis index bit `i` is
    /// `targets[i]`.
    RawUnitary(ComplexMatrix),
    Measure {
        cbit: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Gate {
    fn single(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            controls: Vec::new(),
            targets: vec![target],
        }
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::PauliX, target)
    }

    pub fn h(target: usize) -> Self {
        Self::single(GateKind::Hadamard, target)
    }

    pub fn u(target: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self::single(GateKind::U { theta, phi, lambda }, target)
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::single(GateKind::RY(theta), target)
    }

    pub fn phase(target: usize, phi: f64) -> Self {
        Self::single(GateKind::Phase(phi), target)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::Swap,
            controls: Vec::new(),
            targets: vec![a, b],
        }
    }

    pub fn unitary(matrix: ComplexMatrix, targets: Vec<usize>) -> Self {
        Self {
            kind: GateKind::RawUnitary(matrix),
            controls: Vec::new(),
            targets,
        }
    }

    pub fn measure(target: usize, cbit: usize) -> Self {
        Self::single(GateKind::Measure { cbit }, target)
    }

    pub fn controlled_by(mut self, controls: &[usize]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    pub fn is_measure(&self) -> bool {
        matches!(self.kind, GateKind::Measure { .. })
    }

    /// Local matrix on `targets` (controls excluded). `None` for Measure.
    pub fn matrix(&self) -> Option<ComplexMatrix> {
        let c = Complex64::new;
        let m = match &self.kind {
            GateKind::PauliX => mat2([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            GateKind::Hadamard => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                mat2([h, h, h, -h])
            }
            GateKind::U { theta, phi, lambda } => u_matrix(*theta, *phi, *lambda),
            GateKind::RY(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                mat2([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
            }
            GateKind::Phase(phi) => mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, *phi)]),
            GateKind::Swap => {
                let mut m = ComplexMatrix::zeros(4);
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 2)] = c(1.0, 0.0);
                m[(2, 1)] = c(1.0, 0.0);
                m[(3, 3)] = c(1.0, 0.0);
                m
            }
            GateKind::RawUnitary(m) => m.clone(),
            GateKind::Measure { .. } => return None,
        };
        Some(m)
    }

    /// The inverse gate. Measure has none.
    pub fn inverse(&self) -> Option<Gate> {
        let kind = match &self.kind {
            GateKind::PauliX | GateKind::Hadamard | GateKind::Swap => self.kind.clone(),
            GateKind::U { theta, phi, lambda } => GateKind::U {
                theta: -theta,
                phi: -lambda,
                lambda: -phi,
            },
            GateKind::RY(theta) => GateKind::RY(-theta),
            GateKind::Phase(phi) => GateKind::Phase(-phi),
            GateKind::RawUnitary(m) => GateKind::RawUnitary(m.adjoint()),
            GateKind::Measure { .. } => return None,
        };
        Some(Gate {
            kind,
            controls: self.controls.clone(),
            targets: self.targets.clone(),
        })
    }

    fn name(&self) -> &'static str {
        match self.kind {
            GateKind::PauliX => "x",
            GateKind::Hadamard => "h",
            GateKind::U { .. } => "u",
            GateKind::RY(_) => "ry",
            GateKind::Phase(_) => "p",
            GateKind::Swap => "swap",
            GateKind::RawUnitary(_) => "unitary",
            GateKind::Measure { .. } => "measure",
        }
    }
}

fn mat2(e: [Complex64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_row_major(e.to_vec()).expect("2x2")
}

pub fn u_matrix(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    mat2([
        Complex64::new(c, 0.0),
        -Complex64::from_polar(s, lambda),
        Complex64::from_polar(s, phi),
        Complex64::from_polar(c, lambda + phi),
    ])
}

/// Which qubits play which part in an HHL register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterRoles {
    pub input: Range<usize>,
    pub clock: Range<usize>,
    pub ancilla: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub gate: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at gate {}", self.message, self.gate)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("adjoint requires a measurement-free circuit (measure at gate {0})")]
    ContainsMeasure(usize),
    #[error("QASM export does not support gate {index} ({name}): {reason}")]
    ExportUnsupported {
        index: usize,
        name: &'static str,
        reason: &'static str,
    },
    #[error("invalid circuit: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    width: usize,
    gates: Vec<Gate>,
    roles: Option<RegisterRoles>,
}

impl QuantumCircuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
            roles: None,
        }
    }

    pub fn with_roles(mut self, roles: RegisterRoles) -> Self {
        self.roles = Some(roles);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn roles(&self) -> Option<&RegisterRoles> {
        self.roles.as_ref()
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn extend(&mut self, other: &QuantumCircuit) -> &mut Self {
        self.gates.extend(other.gates.iter().cloned());
        self
    }

    /// Measures every qubit into the classical bit of the same index.
    pub fn measure_all(&mut self) -> &mut Self {
        for q in 0..self.width {
            self.gates.push(Gate::measure(q, q));
        }
        self
    }

    /// The circuit with Measure gates dropped.
    pub fn unitary_part(&self) -> QuantumCircuit {
        QuantumCircuit {
            width: self.width,
            gates: self.gates.iter().filter(|g| !g.is_measure()).cloned().collect(),
            roles: self.roles.clone(),
        }
    }

    /// Every index, unitarity and ordering problem, tagged by gate position.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut seen_measure = false;
        for (i, g) in self.gates.iter().enumerate() {
            let mut flag = |message: String| out.push(Violation { gate: i, message });

            let expected_targets = match &g.kind {
                GateKind::Swap => Some(2),
                GateKind::RawUnitary(_) => None,
                _ => Some(1),
            };
            if let Some(k) = expected_targets {
                if g.targets.len() != k {
                    flag(format!("{} expects {k} target(s), found {}", g.name(), g.targets.len()));
                }
            }
            if g.targets.is_empty() {
                flag("gate has no target".into());
            }
            if g.targets.iter().any(|&q| q >= self.width) {
                flag("target out of range".into());
            }
            if g.controls.iter().any(|&q| q >= self.width) {
                flag("control out of range".into());
            }
            let mut all: Vec<usize> = g.targets.iter().chain(&g.controls).copied().collect();
            all.sort_unstable();
            if all.windows(2).any(|w| w[0] == w[1]) {
                flag("repeated or overlapping qubit indices".into());
            }
            match &g.kind {
                GateKind::RawUnitary(m) => {
                    if m.dim() != 1usize << g.targets.len().min(16) {
                        flag(format!(
                            "unitary dimension {} does not match {} target(s)",
                            m.dim(),
                            g.targets.len()
                        ));
                    } else if !m.is_unitary(UNITARY_TOL) {
                        flag("unitary gate matrix is not unitary".into());
                    }
                }
                GateKind::Measure { cbit } => {
                    seen_measure = true;
                    if !g.controls.is_empty() {
                        flag("measurement cannot be controlled".into());
                    }
                    if *cbit >= self.width {
                        flag("classical bit out of range".into());
                    }
                }
                _ => {
                    if seen_measure {
                        flag("unitary gate after measurement".into());
                    }
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// Reversed gate list with each gate inverted.
    pub fn adjoint(&self) -> Result<QuantumCircuit, CircuitError> {
        let gates = self
            .gates
            .iter()
            .enumerate()
            .rev()
            .map(|(i, g)| g.inverse().ok_or(CircuitError::ContainsMeasure(i)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QuantumCircuit {
            width: self.width,
            gates,
            roles: self.roles.clone(),
        })
    }

    /// OpenQASM 2.0 text. Angles carry 12 significant digits.
    pub fn export_qasm(&self) -> Result<String, CircuitError> {
        let mut out = String::new();
        out.push_str("OPENQASM 2.0;\n");
        out.push_str("include \"qelib1.inc\";\n");
        out.push_str(
            "// cu(theta,phi,lambda,gamma) applies U(theta,phi,lambda) scaled by e^{i*gamma}; gamma is always 0 here\n",
        );
        if let Some(r) = &self.roles {
            let list = |range: &Range<usize>| range.clone().map(|q| format!("q[{q}]")).collect::<Vec<_>>().join(" ");
            out.push_str(&format!(
                "// roles: input {}; clock {}; ancilla q[{}]\n",
                list(&r.input),
                list(&r.clock),
                r.ancilla
            ));
        }
        out.push_str(&format!("qreg q[{}];\n", self.width));
        out.push_str(&format!("creg c[{}];\n", self.width));

        for (index, g) in self.gates.iter().enumerate() {
            let unsupported = |reason| CircuitError::ExportUnsupported {
                index,
                name: g.name(),
                reason,
            };
            if g.controls.len() > 1 {
                return Err(unsupported("more than one control"));
            }
            let ctrl = g.controls.first().copied();
            let q = |i: usize| format!("q[{i}]");
            let line = match (&g.kind, ctrl) {
                (GateKind::PauliX, None) => format!("x {};", q(g.targets[0])),
                (GateKind::PauliX, Some(c)) => format!("cx {},{};", q(c), q(g.targets[0])),
                (GateKind::Hadamard, None) => format!("h {};", q(g.targets[0])),
                (GateKind::Hadamard, Some(c)) => format!("ch {},{};", q(c), q(g.targets[0])),
                (GateKind::U { theta, phi, lambda }, None) => format!(
                    "u({},{},{}) {};",
                    fmt_sig(*theta),
                    fmt_sig(*phi),
                    fmt_sig(*lambda),
                    q(g.targets[0])
                ),
                (GateKind::U { theta, phi, lambda }, Some(c)) => format!(
                    "cu({},{},{},0) {},{};",
                    fmt_sig(*theta),
                    fmt_sig(*phi),
                    fmt_sig(*lambda),
                    q(c),
                    q(g.targets[0])
                ),
                (GateKind::RY(theta), None) => format!("ry({}) {};", fmt_sig(*theta), q(g.targets[0])),
                (GateKind::RY(theta), Some(c)) => {
                    format!("cry({}) {},{};", fmt_sig(*theta), q(c), q(g.targets[0]))
                }
                (GateKind::Phase(phi), None) => format!("p({}) {};", fmt_sig(*phi), q(g.targets[0])),
                (GateKind::Phase(phi), Some(c)) => {
                    format!("cp({}) {},{};", fmt_sig(*phi), q(c), q(g.targets[0]))
                }
                (GateKind::Swap, None) => format!("swap {},{};", q(g.targets[0]), q(g.targets[1])),
                (GateKind::Swap, Some(c)) => {
                    format!("cswap {},{},{};", q(c), q(g.targets[0]), q(g.targets[1]))
                }
                (GateKind::RawUnitary(_), _) => return Err(unsupported("raw unitaries have no OpenQASM 2.0 form")),
                (GateKind::Measure { cbit }, _) => format!("measure {} -> c[{cbit}];", q(g.targets[0])),
            };
            out.push_str(&line);
            out.push('\n');
        }
        Ok(out)
    }
}
