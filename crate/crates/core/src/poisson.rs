//! 1-D Poisson problems across layered gate-insulator stacks.
//!
//! A stack is meshed uniformly with `N` interior nodes between two Dirichlet
//! terminals (0 V on the left, the bias on the right). Each of the `N + 1`
//! segments takes the permittivity of the layer containing its midpoint,
//! which gives the symmetric tridiagonal stencil
//!
//! ```text
//! (ε_{i-½} + ε_{i+½}) φ_i − ε_{i-½} φ_{i-1} − ε_{i+½} φ_{i+1} = q_i
//! ```
//!
//! with boundary potentials lifted into the right-hand side. Fixed charges
//! `q_i` are dimensionless values on the same scale as the stencil.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{solve_direct, ComplexMatrix, ComplexVector, LinalgError};

/// Layer boundaries closer than this (relative to total thickness) to a
/// segment midpoint count as coincident; the left layer wins.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StackError {
    #[error("unknown structure preset '{0}' (expected one of a, b, c1, c2, c3)")]
    UnknownPreset(String),
    #[error("invalid stack: {0}")]
    Invalid(String),
    #[error("failed to read stack file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse stack JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: String,
    pub thickness_nm: f64,
    pub eps_r: f64,
}

impl Layer {
    pub fn new(material: &str, thickness_nm: f64, eps_r: f64) -> Self {
        Self {
            material: material.to_string(),
            thickness_nm,
            eps_r,
        }
    }
}

/// Physical description of a stack; serialises to the JSON file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackSpec {
    pub layers: Vec<Layer>,
    pub interior_nodes: usize,
    pub bias_v: f64,
    /// Interior node index (0-based) → fixed charge on the stencil scale.
    #[serde(default)]
    pub charges: BTreeMap<usize, f64>,
}

impl StackSpec {
    pub fn from_json(text: &str) -> Result<Self, StackError> {
        let spec: StackSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, StackError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stack spec serialises")
    }

    pub fn thickness_nm(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness_nm).sum()
    }

    pub fn validate(&self) -> Result<(), StackError> {
        let bad = |msg: String| Err(StackError::Invalid(msg));
        if self.layers.is_empty() {
            return bad("no layers".into());
        }
        for l in &self.layers {
            if !(l.thickness_nm > 0.0 && l.thickness_nm.is_finite()) {
                return bad(format!("layer '{}' has non-positive thickness", l.material));
            }
            if !(l.eps_r > 0.0 && l.eps_r.is_finite()) {
                return bad(format!("layer '{}' has non-positive permittivity", l.material));
            }
        }
        if self.interior_nodes == 0 {
            return bad("at least one interior node is required".into());
        }
        if !self.bias_v.is_finite() {
            return bad("bias is not finite".into());
        }
        if let Some((&k, _)) = self.charges.iter().find(|(&k, _)| k >= self.interior_nodes) {
            return bad(format!("charge at node {k} outside 0..{}", self.interior_nodes));
        }
        if self.charges.values().any(|q| !q.is_finite()) {
            return bad("charge is not finite".into());
        }
        Ok(())
    }

    /// Mesh spacing in nm.
    pub fn spacing_nm(&self) -> f64 {
        self.thickness_nm() / (self.interior_nodes + 1) as f64
    }

    /// Permittivity of each of the `N + 1` segments.
    pub fn segment_permittivities(&self) -> Vec<f64> {
        let total = self.thickness_nm();
        let h = self.spacing_nm();
        let tol = BOUNDARY_TOL * total;
        (0..=self.interior_nodes)
            .map(|seg| {
                let mid = (seg as f64 + 0.5) * h;
                let mut end = 0.0;
                for layer in &self.layers {
                    end += layer.thickness_nm;
                    if mid <= end + tol {
                        return layer.eps_r;
                    }
                }
                self.layers.last().unwrap().eps_r
            })
            .collect()
    }
}

/// The five stacks studied: a, b, c1, c2, c3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    A,
    B,
    C1,
    C2,
    C3,
}

impl Structure {
    pub const ALL: [Structure; 5] = [Structure::A, Structure::B, Structure::C1, Structure::C2, Structure::C3];

    pub fn name(self) -> &'static str {
        match self {
            Structure::A => "a",
            Structure::B => "b",
            Structure::C1 => "c1",
            Structure::C2 => "c2",
            Structure::C3 => "c3",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Structure::A => "Si3N4/SiO2/Si3N4, equal thirds, eps 2:1:2, N=2",
            Structure::B => "SiO2, N=2",
            Structure::C1 => "SiO2/HfO2 half/half, N=2",
            Structure::C2 => "SiO2/HfO2 half/half, N=4, q=+0.5 at node 2",
            Structure::C3 => "SiO2/HfO2 half/half, N=8, q=+0.5 at node 4",
        }
    }

    pub fn spec(self) -> StackSpec {
        preset(self)
    }
}

impl FromStr for Structure {
    type Err = StackError;
    fn from_str(s: &str) -> Result<Self, StackError> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Structure::A),
            "b" => Ok(Structure::B),
            "c1" => Ok(Structure::C1),
            "c2" => Ok(Structure::C2),
            "c3" => Ok(Structure::C3),
            _ => Err(StackError::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const STACK_THICKNESS_NM: f64 = 2.0;
pub const STACK_BIAS_V: f64 = 2.0;
pub const EPS_SIO2: f64 = 3.9;
pub const EPS_HFO2: f64 = 22.0;
pub const PRESET_CHARGE: f64 = 0.5;

pub fn preset(structure: Structure) -> StackSpec {
    let third = STACK_THICKNESS_NM / 3.0;
    let half = STACK_THICKNESS_NM / 2.0;
    let sio2_hfo2 = || vec![Layer::new("SiO2", half, EPS_SIO2), Layer::new("HfO2", half, EPS_HFO2)];
    let (layers, interior_nodes, charges) = match structure {
        // Relative units: only the 2:1 ratio matters for the stencil.
        Structure::A => (
            vec![
                Layer::new("Si3N4", third, 2.0),
                Layer::new("SiO2", third, 1.0),
                Layer::new("Si3N4", third, 2.0),
            ],
            2,
            BTreeMap::new(),
        ),
        Structure::B => (
            vec![Layer::new("SiO2", STACK_THICKNESS_NM, EPS_SIO2)],
            2,
            BTreeMap::new(),
        ),
        Structure::C1 => (sio2_hfo2(), 2, BTreeMap::new()),
        Structure::C2 => (sio2_hfo2(), 4, BTreeMap::from([(2, PRESET_CHARGE)])),
        Structure::C3 => (sio2_hfo2(), 8, BTreeMap::from([(4, PRESET_CHARGE)])),
    };
    StackSpec {
        layers,
        interior_nodes,
        bias_v: STACK_BIAS_V,
        charges,
    }
}

/// Raw stencil system for the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedSystem {
    /// Row-major `N × N` symmetric tridiagonal matrix.
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// Interior node positions in nm.
    pub positions_nm: Vec<f64>,
    /// `(left, right)` terminal potentials in volts.
    pub boundary_v: (f64, f64),
    pub segment_eps: Vec<f64>,
}

impl DiscretizedSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn complex_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&self.matrix).expect("square stencil")
    }
}

pub fn discretize(spec: &StackSpec) -> Result<DiscretizedSystem, StackError> {
    spec.validate()?;
    let n = spec.interior_nodes;
    let eps = spec.segment_permittivities();
    let h = spec.spacing_nm();
    let (left, right) = (0.0, spec.bias_v);

    let mut matrix = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        // Node i sits between segments i (left) and i + 1 (right).
        let (el, er) = (eps[i], eps[i + 1]);
        matrix[i][i] = el + er;
        if i > 0 {
            matrix[i][i - 1] = -el;
        } else {
            rhs[i] += el * left;
        }
        if i + 1 < n {
            matrix[i][i + 1] = -er;
        } else {
            rhs[i] += er * right;
        }
        rhs[i] += spec.charges.get(&i).copied().unwrap_or(0.0);
    }
    Ok(DiscretizedSystem {
        matrix,
        rhs,
        positions_nm: (1..=n).map(|i| i as f64 * h).collect(),
        boundary_v: (left, right),
        segment_eps: eps,
    })
}

/// Hermitian system with unit right-hand side, ready for amplitude encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSystem {
    /// `raw / scale`; maximum diagonal entry is 1.
    pub a: Vec<Vec<f64>>,
    /// Unit-norm right-hand side (all zeros when `bnorm == 0`).
    pub b: Vec<f64>,
    /// Divisor applied to the raw matrix.
    pub scale: f64,
    /// 2-norm of the raw right-hand side. The raw solution is
    /// `(bnorm / scale) · A⁻¹ b`.
    pub bnorm: f64,
}

impl NormalizedSystem {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&self.a).expect("square normalized matrix")
    }

    pub fn rhs(&self) -> ComplexVector {
        ComplexVector::from_real(&self.b)
    }

    /// HHL needs a nonzero right-hand side.
    pub fn is_hhl_applicable(&self) -> bool {
        self.bnorm > 0.0
    }

    /// Factor taking `A⁻¹ b` back to raw units.
    pub fn solution_scale(&self) -> f64 {
        self.bnorm / self.scale
    }

    /// Builds a system directly from an already-normalised `A` and unit `b`.
    pub fn from_parts(a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        Self {
            a,
            b,
            scale: 1.0,
            bnorm: 1.0,
        }
    }
}

pub fn normalize(d: &DiscretizedSystem) -> NormalizedSystem {
    let scale = (0..d.dim()).map(|i| d.matrix[i][i]).fold(f64::MIN, f64::max);
    let a = d
        .matrix
        .iter()
        .map(|row| row.iter().map(|&x| x / scale).collect())
        .collect();
    let bnorm = d.rhs.iter().map(|x| x * x).sum::<f64>().sqrt();
    let b = if bnorm > 0.0 {
        d.rhs.iter().map(|x| x / bnorm).collect()
    } else {
        vec![0.0; d.dim()]
    };
    NormalizedSystem { a, b, scale, bnorm }
}

/// Classical node potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    /// Interior potentials in volts.
    pub interior_v: Vec<f64>,
    /// All `N + 2` node positions in nm, terminals included.
    pub positions_nm: Vec<f64>,
    /// All `N + 2` potentials in volts, terminals included.
    pub potentials_v: Vec<f64>,
}

impl PotentialProfile {
    pub fn from_interior(spec: &StackSpec, interior_v: Vec<f64>) -> Self {
        let h = spec.spacing_nm();
        let n = spec.interior_nodes;
        let positions_nm = (0..n + 2).map(|i| i as f64 * h).collect();
        let mut potentials_v = Vec::with_capacity(n + 2);
        potentials_v.push(0.0);
        potentials_v.extend_from_slice(&interior_v);
        potentials_v.push(spec.bias_v);
        Self {
            interior_v,
            positions_nm,
            potentials_v,
        }
    }
}

pub fn solve_classical(spec: &StackSpec) -> Result<PotentialProfile, StackError> {
    let d = discretize(spec)?;
    let x = solve_direct(&d.complex_matrix(), &ComplexVector::from_real(&d.rhs))?;
    Ok(PotentialProfile::from_interior(spec, x.real_parts()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigendecompose_symmetric;

    #[test]
    fn structure_a_stencil() {
        let d = discretize(&preset(Structure::A)).unwrap();
        assert_eq!(d.matrix, vec![vec![3.0, -1.0], vec![-1.0, 3.0]]);
        assert_eq!(d.rhs, vec![0.0, 4.0]);
    }

    #[test]
    fn structure_b_stencil() {
        let d = discretize(&preset(Structure::B)).unwrap();
        let e = EPS_SIO2;
        assert_eq!(d.matrix, vec![vec![2.0 * e, -e], vec![-e, 2.0 * e]]);
        assert_eq!(d.rhs, vec![0.0, 2.0 * e]);
    }

    #[test]
    fn zero_bias_gives_zero_rhs() {
        let mut spec = preset(Structure::C1);
        spec.bias_v = 0.0;
        let d = discretize(&spec).unwrap();
        assert!(d.rhs.iter().all(|&x| x == 0.0));
        let n = normalize(&d);
        assert_eq!(n.bnorm, 0.0);
        assert!(!n.is_hhl_applicable());
        let sol = solve_classical(&spec).unwrap();
        assert!(sol.interior_v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn structure_a_normalization() {
        let n = normalize(&discretize(&preset(Structure::A)).unwrap());
        assert_eq!(n.scale, 3.0);
        assert_eq!(n.bnorm, 4.0);
        assert!((n.solution_scale() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(n.b, vec![0.0, 1.0]);
        assert_eq!(n.a[0][0], 1.0);
        assert!((n.a[0][1] + 1.0 / 3.0).abs() < 1e-16);
        let eig = eigendecompose_symmetric(&n.matrix()).unwrap();
        assert!((eig.eigenvalues[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unit_diagonal_is_unchanged() {
        let d = DiscretizedSystem {
            matrix: vec![vec![1.0, -0.25], vec![-0.25, 0.5]],
            rhs: vec![3.0, 4.0],
            positions_nm: vec![1.0, 2.0],
            boundary_v: (0.0, 0.0),
            segment_eps: vec![],
        };
        let n = normalize(&d);
        assert_eq!(n.scale, 1.0);
        assert_eq!(n.a, d.matrix);
        assert_eq!(n.b, vec![0.6, 0.8]);
    }

    #[test]
    fn heterogeneous_normalization_keeps_symmetry() {
        let n = normalize(&discretize(&preset(Structure::C2)).unwrap());
        for i in 0..4 {
            assert!(n.a[i][i] <= 1.0);
            for j in 0..4 {
                assert_eq!(n.a[i][j], n.a[j][i]);
            }
        }
        assert!(n.a.iter().enumerate().any(|(i, r)| r[i] == 1.0));
    }

    #[test]
    fn structure_a_classical() {
        let sol = solve_classical(&preset(Structure::A)).unwrap();
        assert!((sol.interior_v[0] - 0.5).abs() < 1e-12);
        assert!((sol.interior_v[1] - 1.5).abs() < 1e-12);
        assert_eq!(sol.potentials_v.len(), 4);
        assert_eq!(sol.potentials_v[3], 2.0);
    }

    #[test]
    fn structure_b_classical_is_linear() {
        let sol = solve_classical(&preset(Structure::B)).unwrap();
        assert!((sol.interior_v[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((sol.interior_v[1] - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn preset_sizes() {
        assert_eq!(preset(Structure::C3).interior_nodes, 8);
        assert_eq!(preset(Structure::C2).interior_nodes, 4);
        for s in Structure::ALL {
            let spec = preset(s);
            assert!((spec.thickness_nm() - 2.0).abs() < 1e-12);
            assert_eq!(spec.bias_v, 2.0);
        }
    }

    #[test]
    fn preset_b_eigenvalues() {
        let n = normalize(&discretize(&preset(Structure::B)).unwrap());
        let eig = eigendecompose_symmetric(&n.matrix()).unwrap();
        assert!((eig.eigenvalues[0] - 0.5).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn midpoint_on_boundary_takes_left_layer() {
        // c1: h = 2/3 nm, the middle segment's midpoint is exactly 1 nm.
        let eps = preset(Structure::C1).segment_permittivities();
        assert_eq!(eps, vec![EPS_SIO2, EPS_SIO2, EPS_HFO2]);
        // c2: h = 0.4 nm, midpoints 0.2, 0.6, 1.0, 1.4, 1.8.
        let eps = preset(Structure::C2).segment_permittivities();
        assert_eq!(eps, vec![EPS_SIO2, EPS_SIO2, EPS_SIO2, EPS_HFO2, EPS_HFO2]);
    }

    #[test]
    fn unknown_preset_rejected() {
        assert!(matches!("d".parse::<Structure>(), Err(StackError::UnknownPreset(_))));
        assert_eq!("C2".parse::<Structure>().unwrap(), Structure::C2);
    }

    #[test]
    fn json_round_trip_and_schema() {
        let text = r#"{"layers": [{"material": "SiO2", "thickness_nm": 1.0, "eps_r": 3.9},
                                   {"material": "HfO2", "thickness_nm": 1.0, "eps_r": 22}],
                       "interior_nodes": 4, "bias_v": 2, "charges": {"2": 0.5}}"#;
        let spec = StackSpec::from_json(text).unwrap();
        assert_eq!(spec, preset(Structure::C2));
        assert_eq!(StackSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn invalid_json_specs_rejected() {
        let neg = r#"{"layers": [{"material": "X", "thickness_nm": 1.0, "eps_r": -1}],
                      "interior_nodes": 2, "bias_v": 1}"#;
        assert!(matches!(StackSpec::from_json(neg), Err(StackError::Invalid(_))));
        let far = r#"{"layers": [{"material": "X", "thickness_nm": 1.0, "eps_r": 1}],
                      "interior_nodes": 2, "bias_v": 1, "charges": {"5": 1.0}}"#;
        assert!(matches!(StackSpec::from_json(far), Err(StackError::Invalid(_))));
        assert!(matches!(StackSpec::from_json("{"), Err(StackError::Json(_))));
    }
}
