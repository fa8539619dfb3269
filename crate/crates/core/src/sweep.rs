//! Evolution-time × clock-width scans with CSV and SVG output.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::fmt_sig;
use crate::hhl::{run_hhl, HhlConfig, HhlError, RotationMode};
use crate::poisson::{discretize, normalize, solve_classical, NormalizedSystem, StackError, StackSpec, Structure};

pub const CSV_HEADER: &str = "structure,n_clock,t,fidelity,avg_rel_abs_error,p_success,qubit_budget";

pub const DEFAULT_T_MIN: f64 = 0.1;
pub const DEFAULT_T_MAX: f64 = 2.0 * std::f64::consts::PI;
pub const DEFAULT_T_STEPS: usize = 64;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep request: {0}")]
    InvalidRequest(String),
    #[error("no usable records for structure '{0}'")]
    NoSolution(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Stack(#[from] StackError),
    #[error(transparent)]
    Hhl(#[from] HhlError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// A named preset or a StackSpec JSON file.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureSource {
    Preset(Structure),
    File(PathBuf),
}

impl StructureSource {
    pub fn label(&self) -> String {
        match self {
            Self::Preset(s) => s.name().to_string(),
            Self::File(p) => p.display().to_string(),
        }
    }

    pub fn load(&self) -> Result<StackSpec, StackError> {
        match self {
            Self::Preset(s) => Ok(s.spec()),
            Self::File(p) => StackSpec::from_path(p),
        }
    }
}

impl FromStr for StructureSource {
    type Err = std::convert::Infallible;
    /// Preset names win over file paths.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<Structure>() {
            Ok(p) => Self::Preset(p),
            Err(_) => Self::File(PathBuf::from(s)),
        })
    }
}

/// The stack, its normalised system and the classical reference solution.
#[derive(Debug, Clone)]
pub struct Problem {
    pub label: String,
    pub spec: StackSpec,
    pub system: NormalizedSystem,
    pub truth_v: Vec<f64>,
}

impl Problem {
    pub fn load(source: &StructureSource) -> Result<Self, StackError> {
        let spec = source.load()?;
        Self::from_spec(source.label(), spec)
    }

    pub fn from_spec(label: String, spec: StackSpec) -> Result<Self, StackError> {
        let system = normalize(&discretize(&spec)?);
        let truth_v = solve_classical(&spec)?.interior_v;
        Ok(Self {
            label,
            spec,
            system,
            truth_v,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub structure: StructureSource,
    pub n_clock: Vec<usize>,
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub rotation: RotationMode,
}

impl SweepRequest {
    /// Default grid: 64 points uniform on `[0.1, 2π]`, exact rotations.
    pub fn new(structure: StructureSource, n_clock: Vec<usize>) -> Self {
        Self {
            structure,
            n_clock,
            t_min: DEFAULT_T_MIN,
            t_max: DEFAULT_T_MAX,
            t_steps: DEFAULT_T_STEPS,
            rotation: RotationMode::ExactArcsin,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: &str| Err(SweepError::InvalidRequest(m.to_string()));
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return bad("t-min must be positive");
        }
        if !(self.t_max >= self.t_min && self.t_max.is_finite()) {
            return bad("t-max must not be below t-min");
        }
        if self.t_steps < 2 {
            return bad("t-steps must be at least 2");
        }
        if self.n_clock.is_empty() || self.n_clock.contains(&0) {
            return bad("n-clock values must be at least 1");
        }
        let mut widths = self.n_clock.clone();
        widths.sort_unstable();
        widths.dedup();
        if widths.len() != self.n_clock.len() {
            return bad("n-clock values must be distinct");
        }
        Ok(())
    }

    /// Evenly spaced grid including both ends.
    pub fn t_grid(&self) -> Vec<f64> {
        let span = self.t_max - self.t_min;
        let last = (self.t_steps - 1) as f64;
        (0..self.t_steps).map(|i| self.t_min + span * i as f64 / last).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub structure: String,
    pub n_clock: usize,
    pub t: f64,
    pub fidelity: f64,
    pub avg_rel_abs_error: f64,
    pub p_success: f64,
    pub qubit_budget: usize,
    /// Why the point has no metrics; the metric fields are NaN when set.
    pub failure: Option<String>,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none() && self.avg_rel_abs_error.is_finite()
    }
}

/// Evaluates one grid point; failures become an error row.
pub fn evaluate_point(problem: &Problem, n_clock: usize, t: f64, rotation: RotationMode) -> SweepRecord {
    let cfg = HhlConfig::new(n_clock, t).with_rotation(rotation);
    let budget = problem.system.dim().trailing_zeros() as usize + n_clock + 1;
    let base = SweepRecord {
        structure: problem.label.clone(),
        n_clock,
        t,
        fidelity: f64::NAN,
        avg_rel_abs_error: f64::NAN,
        p_success: f64::NAN,
        qubit_budget: budget,
        failure: None,
    };
    match run_hhl(&problem.system, &cfg, &problem.truth_v) {
        Ok(r) => SweepRecord {
            fidelity: r.fidelity,
            avg_rel_abs_error: r.avg_rel_abs_error.unwrap_or(f64::NAN),
            p_success: r.p_success,
            qubit_budget: r.qubit_budget,
            failure: r
                .avg_rel_abs_error
                .is_none()
                .then(|| HhlError::UndefinedError.to_string()),
            ..base
        },
        Err(e) => SweepRecord {
            failure: Some(e.to_string()),
            ..base
        },
    }
}

/// One record per `(n_clock, t)` pair, sorted by `(n_clock, t)`.
pub fn run_sweep(req: &SweepRequest) -> Result<Vec<SweepRecord>, SweepError> {
    req.validate()?;
    let problem = Problem::load(&req.structure)?;
    if !problem.system.is_hhl_applicable() {
        return Err(HhlError::Inapplicable.into());
    }
    run_sweep_on(&problem, req)
}

pub fn run_sweep_on(problem: &Problem, req: &SweepRequest) -> Result<Vec<SweepRecord>, SweepError> {
    req.validate()?;
    let grid = req.t_grid();
    let points: Vec<(usize, f64)> = req
        .n_clock
        .iter()
        .flat_map(|&n| grid.iter().map(move |&t| (n, t)))
        .collect();

    #[cfg(feature = "parallel")]
    let mut records: Vec<SweepRecord> = {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|&(n, t)| evaluate_point(problem, n, t, req.rotation))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut records: Vec<SweepRecord> = points
        .iter()
        .map(|&(n, t)| evaluate_point(problem, n, t, req.rotation))
        .collect();

    records.sort_by(|a, b| a.n_clock.cmp(&b.n_clock).then(a.t.total_cmp(&b.t)));
    Ok(records)
}

/// Lowest error; ties go to the smaller clock width, then the smaller `t`.
pub fn best_record<'a>(records: &'a [SweepRecord], structure: &str) -> Result<&'a SweepRecord, SweepError> {
    records
        .iter()
        .filter(|r| r.structure == structure && r.is_ok())
        .min_by(|a, b| {
            a.avg_rel_abs_error
                .total_cmp(&b.avg_rel_abs_error)
                .then(a.n_clock.cmp(&b.n_clock))
                .then(a.t.total_cmp(&b.t))
        })
        .ok_or_else(|| SweepError::NoSolution(structure.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestSolution {
    pub t: f64,
    pub n_clock: usize,
    pub avg_rel_abs_error: f64,
    pub fidelity: f64,
    pub positions_nm: Vec<f64>,
    pub recovered_v: Vec<f64>,
    pub classical_v: Vec<f64>,
}

impl BestSolution {
    /// Side-by-side node table.
    pub fn table(&self) -> String {
        let mut out = String::from("node,x_nm,hhl_v,classical_v\n");
        for (i, ((x, q), c)) in self
            .positions_nm
            .iter()
            .zip(&self.recovered_v)
            .zip(&self.classical_v)
            .enumerate()
        {
            let _ = writeln!(out, "{i},{},{},{}", fmt_sig(*x), fmt_sig(*q), fmt_sig(*c));
        }
        out
    }
}

/// Picks the best record and re-runs it to recover node potentials.
pub fn best_solution(
    records: &[SweepRecord],
    problem: &Problem,
    rotation: RotationMode,
) -> Result<BestSolution, SweepError> {
    let best = best_record(records, &problem.label)?;
    let cfg = HhlConfig::new(best.n_clock, best.t).with_rotation(rotation);
    let r = run_hhl(&problem.system, &cfg, &problem.truth_v)?;
    let h = problem.spec.spacing_nm();
    Ok(BestSolution {
        t: best.t,
        n_clock: best.n_clock,
        avg_rel_abs_error: best.avg_rel_abs_error,
        fidelity: best.fidelity,
        positions_nm: (1..=problem.system.dim()).map(|i| i as f64 * h).collect(),
        recovered_v: r.recovered_v,
        classical_v: problem.truth_v.clone(),
    })
}

pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&r.structure),
            r.n_clock,
            fmt_sig(r.t),
            fmt_sig(r.fidelity),
            fmt_sig(r.avg_rel_abs_error),
            fmt_sig(r.p_success),
            r.qubit_budget
        );
    }
    out
}

/// Quotes a text field when it would otherwise split the row.
fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}

pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<(), SweepError> {
    if records.is_empty() {
        return Err(SweepError::InvalidRequest("no records to write".into()));
    }
    std::fs::write(path, records_to_csv(records))?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>, SweepError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| SweepError::Csv(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(SweepError::Csv(format!(
            "unexpected header '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| SweepError::Csv(e.to_string()))?;
        let field = |i: usize| {
            row.get(i)
                .ok_or_else(|| SweepError::Csv(format!("row {} is short", line + 1)))
        };
        let num = |i: usize| -> Result<f64, SweepError> {
            field(i)?
                .parse::<f64>()
                .map_err(|e| SweepError::Csv(format!("row {}: {e}", line + 1)))
        };
        let int = |i: usize| -> Result<usize, SweepError> {
            field(i)?
                .parse::<usize>()
                .map_err(|e| SweepError::Csv(format!("row {}: {e}", line + 1)))
        };
        let avg_rel_abs_error = num(4)?;
        records.push(SweepRecord {
            structure: field(0)?.to_string(),
            n_clock: int(1)?,
            t: num(2)?,
            fidelity: num(3)?,
            avg_rel_abs_error,
            p_success: num(5)?,
            qubit_budget: int(6)?,
            failure: avg_rel_abs_error.is_nan().then(|| "error row".to_string()),
        });
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>, SweepError> {
    parse_csv(&std::fs::read_to_string(path)?)
}

const SVG_W: f64 = 720.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 30.0;
const GAP: f64 = 60.0;
/// Error axis is log10, clamped to this decade range.
const ERR_DECADES: (f64, f64) = (-4.0, 1.0);
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Two stacked panels (fidelity, log error) against `t`, one polyline per
/// (metric, n_clock).
pub fn records_to_svg(records: &[SweepRecord]) -> String {
    let mut widths: Vec<usize> = records.iter().map(|r| r.n_clock).collect();
    widths.sort_unstable();
    widths.dedup();
    let (t_lo, t_hi) = records.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.t), hi.max(r.t))
    });
    let t_span = if t_hi > t_lo { t_hi - t_lo } else { 1.0 };
    let plot_w = SVG_W - MARGIN_L - MARGIN_R;
    let height = MARGIN_T + 2.0 * PANEL_H + GAP + 50.0;
    let x_of = |t: f64| MARGIN_L + (t - t_lo) / t_span * plot_w;
    let title = records.first().map(|r| r.structure.as_str()).unwrap_or("");

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{height}" viewBox="0 0 {SVG_W} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">structure {}</text>"#,
        MARGIN_L + plot_w / 2.0,
        xml_escape(title)
    );

    // Each panel maps a metric onto [0, 1] of its height, or drops the point.
    type Scale = Box<dyn Fn(f64) -> Option<f64>>;
    let panels: [(&str, f64, Scale); 2] = [
        (
            "fidelity",
            MARGIN_T,
            Box::new(|v: f64| v.is_finite().then_some(v.clamp(0.0, 1.0))),
        ),
        (
            "avg rel abs error (log10)",
            MARGIN_T + PANEL_H + GAP,
            Box::new(|v: f64| {
                v.is_finite().then(|| {
                    let l = v.max(1e-300).log10().clamp(ERR_DECADES.0, ERR_DECADES.1);
                    (l - ERR_DECADES.0) / (ERR_DECADES.1 - ERR_DECADES.0)
                })
            }),
        ),
    ];

    for (panel, (label, top, norm)) in panels.iter().enumerate() {
        let bottom = top + PANEL_H;
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_L}" y="{top}" width="{plot_w}" height="{PANEL_H}" fill="none" stroke="black"/>"#
        );
        // y ticks
        let ticks: Vec<(f64, String)> = if panel == 0 {
            (0..=4).map(|i| (i as f64 / 4.0, fmt_sig(i as f64 / 4.0))).collect()
        } else {
            let (lo, hi) = ERR_DECADES;
            (lo as i32..=hi as i32)
                .map(|d| ((d as f64 - lo) / (hi - lo), format!("1e{d}")))
                .collect()
        };
        for (frac, text) in ticks {
            let y = bottom - frac * PANEL_H;
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{text}</text>"##,
                MARGIN_L - 5.0,
                MARGIN_L - 8.0,
                y + 4.0
            );
        }
        for i in 0..=4 {
            let t = t_lo + t_span * i as f64 / 4.0;
            let x = x_of(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                bottom + 5.0,
                bottom + 18.0,
                fmt_sig((t * 1000.0).round() / 1000.0)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#,
            MARGIN_L + plot_w / 2.0,
            bottom + 34.0
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{label}</text>"#,
            top + PANEL_H / 2.0
        );

        for (wi, &w) in widths.iter().enumerate() {
            let colour = PALETTE[wi % PALETTE.len()];
            let points: Vec<String> = records
                .iter()
                .filter(|r| r.n_clock == w)
                .filter_map(|r| {
                    let v = if panel == 0 { r.fidelity } else { r.avg_rel_abs_error };
                    norm(v).map(|f| format!("{:.2},{:.2}", x_of(r.t), bottom - f * PANEL_H))
                })
                .collect();
            let metric = if panel == 0 { "fidelity" } else { "error" };
            let _ = writeln!(
                s,
                r#"<polyline data-metric="{metric}" data-n-clock="{w}" fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            if panel == 0 {
                let ly = MARGIN_T + 10.0 + 18.0 * wi as f64;
                let lx = SVG_W - MARGIN_R + 15.0;
                let _ = writeln!(
                    s,
                    r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">n_clock = {w}</text>"#,
                    lx + 20.0,
                    lx + 25.0,
                    ly + 4.0
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn write_svg(records: &[SweepRecord], path: &Path) -> Result<(), SweepError> {
    if records.is_empty() {
        return Err(SweepError::InvalidRequest("no records to plot".into()));
    }
    std::fs::write(path, records_to_svg(records))?;
    Ok(())
}

/// Length of the longest run of consecutive grid points with error below
/// `threshold`, in units of `t`.
pub fn low_error_window(records: &[SweepRecord], n_clock: usize, threshold: f64) -> f64 {
    let mut rows: Vec<&SweepRecord> = records.iter().filter(|r| r.n_clock == n_clock).collect();
    rows.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap_or(Ordering::Equal));
    let mut best = 0.0f64;
    let mut start: Option<f64> = None;
    let mut prev_t = 0.0;
    for r in &rows {
        let good = r.is_ok() && r.avg_rel_abs_error < threshold;
        match (good, start) {
            (true, None) => start = Some(r.t),
            (false, Some(s)) => {
                best = best.max(prev_t - s);
                start = None;
            }
            _ => {}
        }
        prev_t = r.t;
    }
    if let Some(s) = start {
        best = best.max(prev_t - s);
    }
    best
}

/// Number of grid points with error below `threshold`.
pub fn low_error_count(records: &[SweepRecord], n_clock: usize, threshold: f64) -> usize {
    records
        .iter()
        .filter(|r| r.n_clock == n_clock && r.is_ok() && r.avg_rel_abs_error < threshold)
        .count()
}

pub fn min_error(records: &[SweepRecord], n_clock: usize) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.n_clock == n_clock && r.is_ok())
        .map(|r| r.avg_rel_abs_error)
        .min_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hhl::STRUCTURE_A_TIME;

    fn record(n_clock: usize, t: f64, err: f64) -> SweepRecord {
        SweepRecord {
            structure: "a".into(),
            n_clock,
            t,
            fidelity: 0.9,
            avg_rel_abs_error: err,
            p_success: 0.5,
            qubit_budget: n_clock + 2,
            failure: None,
        }
    }

    #[test]
    fn grid_cardinality() {
        let mut req = SweepRequest::new(StructureSource::Preset(Structure::A), vec![2, 3]);
        req.t_steps = 8;
        let recs = run_sweep(&req).unwrap();
        assert_eq!(recs.len(), 16);
        assert!(recs.windows(2).all(|w| (w[0].n_clock, w[0].t) < (w[1].n_clock, w[1].t)));
        let grid = req.t_grid();
        assert_eq!(grid[0], DEFAULT_T_MIN);
        assert!((grid[7] - DEFAULT_T_MAX).abs() < 1e-12);
    }

    #[test]
    fn invalid_requests() {
        let base = SweepRequest::new(StructureSource::Preset(Structure::B), vec![2]);
        let mut r = base.clone();
        r.t_min = 0.0;
        assert!(r.validate().is_err());
        let mut r = base.clone();
        r.t_steps = 1;
        assert!(r.validate().is_err());
        let mut r = base.clone();
        r.n_clock = vec![0];
        assert!(r.validate().is_err());
        let mut r = base;
        r.n_clock = vec![2, 3, 2];
        assert!(r.validate().is_err());
    }

    #[test]
    fn exact_point_wins_for_structure_a() {
        let problem = Problem::load(&StructureSource::Preset(Structure::A)).unwrap();
        let mut records: Vec<SweepRecord> = [0.5, 1.0, 2.0, 3.0]
            .iter()
            .map(|&t| evaluate_point(&problem, 2, t, RotationMode::ExactArcsin))
            .collect();
        records.push(evaluate_point(&problem, 2, STRUCTURE_A_TIME, RotationMode::ExactArcsin));
        let best = best_solution(&records, &problem, RotationMode::ExactArcsin).unwrap();
        assert_eq!(best.t, STRUCTURE_A_TIME);
        assert!(best.avg_rel_abs_error < 1e-6);
        assert!((best.recovered_v[0] - 0.5).abs() < 1e-6);
        assert!(best.table().starts_with("node,x_nm,hhl_v,classical_v\n0,"));
    }

    #[test]
    fn best_of_single_record() {
        let recs = vec![record(3, 1.0, 0.2)];
        assert_eq!(best_record(&recs, "a").unwrap(), &recs[0]);
    }

    #[test]
    fn best_breaks_ties_by_width_then_time() {
        let recs = vec![
            record(3, 0.5, 0.1),
            record(2, 0.9, 0.1),
            record(2, 0.4, 0.1),
            record(2, 0.1, 0.3),
        ];
        let b = best_record(&recs, "a").unwrap();
        assert_eq!((b.n_clock, b.t), (2, 0.4));
    }

    #[test]
    fn best_without_usable_rows_fails() {
        let mut r = record(2, 1.0, f64::NAN);
        r.failure = Some("boom".into());
        assert!(matches!(best_record(&[r], "a"), Err(SweepError::NoSolution(_))));
        assert!(matches!(best_record(&[], "a"), Err(SweepError::NoSolution(_))));
    }

    #[test]
    fn failed_points_become_error_rows() {
        let problem = Problem::load(&StructureSource::Preset(Structure::A)).unwrap();
        let r = evaluate_point(&problem, 2, 1e-9, RotationMode::ExactArcsin);
        assert!(r.failure.is_some());
        assert!(r.fidelity.is_nan());
        let csv = records_to_csv(&[r]);
        assert!(csv.ends_with("a,2,1e-09,NaN,NaN,NaN,4\n"));
        let back = parse_csv(&csv).unwrap();
        assert!(!back[0].is_ok());
    }

    #[test]
    fn csv_shape() {
        let recs = vec![record(2, 0.1, 0.5), record(2, 0.2, 0.25), record(3, 0.1, 0.125)];
        let csv = records_to_csv(&recs);
        assert_eq!(csv.lines().count(), 4);
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().nth(1).unwrap(), "a,2,0.1,0.9,0.5,0.5,4");
        assert_eq!(parse_csv(&csv).unwrap(), recs);
    }

    #[test]
    fn csv_quotes_awkward_labels() {
        let mut r = record(2, 0.1, 0.5);
        r.structure = "stacks/a,\"b\".json".into();
        let back = parse_csv(&records_to_csv(&[r.clone()])).unwrap();
        assert_eq!(back, vec![r]);
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(matches!(parse_csv("a,b\n1,2\n"), Err(SweepError::Csv(_))));
    }

    #[test]
    fn svg_has_one_polyline_per_metric_and_width() {
        let recs = vec![
            record(2, 0.1, 0.5),
            record(2, 0.2, 0.25),
            record(3, 0.1, 0.125),
            record(3, 0.2, 0.01),
        ];
        let svg = records_to_svg(&recs);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains(r#"data-metric="error" data-n-clock="3""#));
        assert!(svg.contains(">t</text>"));
        assert!(svg.contains(">fidelity</text>"));
    }

    #[test]
    fn window_measurement() {
        let recs = vec![
            record(2, 0.0, 0.5),
            record(2, 1.0, 0.01),
            record(2, 2.0, 0.02),
            record(2, 3.0, 0.5),
            record(2, 4.0, 0.01),
        ];
        assert_eq!(low_error_window(&recs, 2, 0.05), 1.0);
        assert_eq!(low_error_count(&recs, 2, 0.05), 3);
        assert_eq!(min_error(&recs, 2), Some(0.01));
    }
}
