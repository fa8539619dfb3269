//! wasm-bindgen front end for the browser demo.
//!
//! Every export returns a JSON string. Failures come back as
//! `{"error": "..."}` so the page can show them inline.

use hhl_poisson::hhl::{build_figure2_circuit, build_figure4_circuit, HhlLayout};
use hhl_poisson::poisson::{discretize, normalize, solve_classical, Structure};
use hhl_poisson::sim::{marginal, run, sample};
use hhl_poisson::sweep::{run_sweep_on, Problem, StructureSource, SweepRequest};
use hhl_poisson::{run_hhl, HhlConfig, Variant};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

/// Grid points per sweep are capped so the page stays responsive.
pub const MAX_SWEEP_POINTS: usize = 2048;

#[derive(Debug, Serialize, PartialEq)]
pub struct Profile {
    pub structure: String,
    pub positions_nm: Vec<f64>,
    pub classical_v: Vec<f64>,
    /// Terminal values included, so it lines up with `positions_nm`.
    pub hhl_v: Vec<f64>,
    pub fidelity: f64,
    pub avg_rel_abs_error: Option<f64>,
    pub p_success: f64,
    pub qubit_budget: usize,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Curve {
    pub n_clock: usize,
    pub t: Vec<f64>,
    /// `None` where the point failed.
    pub fidelity: Vec<Option<f64>>,
    pub error: Vec<Option<f64>>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Histogram {
    pub variant: String,
    /// Labels put the ancilla bit first, then the input bit.
    pub labels: Vec<String>,
    pub probabilities: Vec<f64>,
    /// Empty when `shots == 0`.
    pub counts: Vec<u64>,
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn preset(name: &str) -> Result<Structure, String> {
    name.parse().map_err(|e: hhl_poisson::StackError| e.to_string())
}

pub fn profile(structure: &str, n_clock: usize, t: f64) -> Result<Profile, String> {
    let s = preset(structure)?;
    let spec = s.spec();
    let classical = solve_classical(&spec).map_err(|e| e.to_string())?;
    let sys = normalize(&discretize(&spec).map_err(|e| e.to_string())?);
    let r = run_hhl(&sys, &HhlConfig::new(n_clock, t), &classical.interior_v).map_err(|e| e.to_string())?;
    let mut hhl_v = Vec::with_capacity(classical.potentials_v.len());
    hhl_v.push(classical.potentials_v[0]);
    hhl_v.extend_from_slice(&r.recovered_v);
    hhl_v.push(spec.bias_v);
    Ok(Profile {
        structure: s.name().into(),
        positions_nm: classical.positions_nm,
        classical_v: classical.potentials_v,
        hhl_v,
        fidelity: r.fidelity,
        avg_rel_abs_error: r.avg_rel_abs_error,
        p_success: r.p_success,
        qubit_budget: r.qubit_budget,
    })
}

pub fn curves(structure: &str, n_clock: &[usize], t_min: f64, t_max: f64, steps: usize) -> Result<Vec<Curve>, String> {
    let s = preset(structure)?;
    let mut widths = n_clock.to_vec();
    widths.sort_unstable();
    widths.dedup();
    if steps.saturating_mul(widths.len()) > MAX_SWEEP_POINTS {
        return Err(format!("at most {MAX_SWEEP_POINTS} grid points"));
    }
    let req = SweepRequest {
        t_min,
        t_max,
        t_steps: steps,
        ..SweepRequest::new(StructureSource::Preset(s), widths.clone())
    };
    let problem = Problem::load(&req.structure).map_err(|e| e.to_string())?;
    let records = run_sweep_on(&problem, &req).map_err(|e| e.to_string())?;
    Ok(widths
        .into_iter()
        .map(|n| {
            let rows: Vec<_> = records.iter().filter(|r| r.n_clock == n).collect();
            let keep = |v: f64, ok: bool| (ok && v.is_finite()).then_some(v);
            Curve {
                n_clock: n,
                t: rows.iter().map(|r| r.t).collect(),
                fidelity: rows.iter().map(|r| keep(r.fidelity, r.is_ok())).collect(),
                error: rows.iter().map(|r| keep(r.avg_rel_abs_error, r.is_ok())).collect(),
            }
        })
        .collect())
}

pub fn histogram(variant: &str, shots: u32, seed: u32) -> Result<Histogram, String> {
    let v: Variant = variant.parse().map_err(|e: hhl_poisson::HhlError| e.to_string())?;
    let circuit = match v {
        Variant::Figure2 => build_figure2_circuit(),
        Variant::Figure4 => build_figure4_circuit(),
        Variant::Generic => return Err("choose figure2 or figure4".into()),
    };
    let layout = HhlLayout { n_input: 1, n_clock: 2 };
    let state = run(&circuit.unitary_part(), None).map_err(|e| e.to_string())?;
    let table = marginal(&state, &[layout.input()[0], layout.ancilla()]).map_err(|e| e.to_string())?;
    let (labels, probabilities): (Vec<String>, Vec<f64>) = table.entries().unzip();
    let counts = if shots == 0 {
        Vec::new()
    } else {
        let c = sample(&table, shots as u64, seed as u64);
        labels.iter().map(|l| c.count(l)).collect()
    };
    Ok(Histogram {
        variant: v.to_string(),
        labels,
        probabilities,
        counts,
    })
}

/// Classical and HHL node potentials for a preset.
#[wasm_bindgen(js_name = potentialProfile)]
pub fn potential_profile_json(structure: &str, n_clock: usize, t: f64) -> String {
    to_json(profile(structure, n_clock, t))
}

/// Fidelity and error against `t`, one curve per clock width.
#[wasm_bindgen(js_name = sweepCurves)]
pub fn sweep_curves_json(structure: &str, n_clock: Vec<usize>, t_min: f64, t_max: f64, steps: usize) -> String {
    to_json(curves(structure, &n_clock, t_min, t_max, steps))
}

/// (ancilla, input) distribution of an explicit structure-(a) circuit,
/// with optional sampled counts.
#[wasm_bindgen(js_name = variantHistogram)]
pub fn variant_histogram_json(variant: &str, shots: u32, seed: u32) -> String {
    to_json(histogram(variant, shots, seed))
}
