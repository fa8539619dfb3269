//! Simulated HHL solves of the 1-D Poisson equation across layered
//! gate-insulator stacks.
//!
//! * [`poisson`] turns a stack description into a small symmetric system.
//! * [`hhl`] builds phase-estimation circuits for it and recovers potentials.
//! * [`sim`] executes circuits exactly on a dense statevector.
//! * [`circuit`] is the gate IR with OpenQASM 2.0 export.
//! * [`linalg`] holds the dense eigen/exp/solve routines everything rests on.
//! * [`sweep`] scans evolution time and clock width and writes CSV/SVG.

pub mod circuit;
pub mod hhl;
pub mod linalg;
pub mod poisson;
pub mod sim;
pub mod sweep;

pub use circuit::{CircuitError, Gate, GateKind, QuantumCircuit, RegisterRoles};
pub use hhl::{run_hhl, HhlConfig, HhlError, HhlResult, RotationMode, Variant};
pub use linalg::{ComplexMatrix, ComplexVector, EigenDecomposition, LinalgError};
pub use poisson::{NormalizedSystem, StackError, StackSpec, Structure};
pub use sim::{ProbabilityTable, ShotCounts, SimError, StateVector};
pub use sweep::{SweepError, SweepRecord, SweepRequest};

/// Formats `x` with 12 significant digits, trailing zeros trimmed, in the
/// style of C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
