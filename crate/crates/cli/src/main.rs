//! `hhl-poisson`: classical and simulated-HHL solves of layered gate stacks.

mod error;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hhl_poisson::hhl::{build_figure2_circuit, build_figure4_circuit, build_generic_hhl, HhlLayout, STRUCTURE_A_TIME};
use hhl_poisson::poisson::{discretize, normalize, solve_classical, PotentialProfile, StackSpec, Structure};
use hhl_poisson::sim::{marginal, sample};
use hhl_poisson::sweep::{
    best_solution, min_error, read_csv, run_sweep_on, write_csv, write_svg, Problem, StructureSource, SweepRequest,
    DEFAULT_T_MAX, DEFAULT_T_MIN, DEFAULT_T_STEPS,
};
use hhl_poisson::{fmt_sig, run_hhl, HhlConfig, HhlError, RotationMode, Variant};

use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "hhl-poisson",
    version,
    about = "Solve 1-D gate-stack Poisson problems classically or with a simulated HHL circuit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in structure presets.
    Structures {
        #[command(subcommand)]
        action: StructuresAction,
    },
    /// Solve one structure.
    Solve(SolveArgs),
    /// Scan evolution time and clock width, writing CSV (and optionally SVG).
    Sweep(SweepArgs),
    /// Write an explicit structure-(a) circuit as OpenQASM 2.0.
    ExportQasm(ExportArgs),
    /// Pick the lowest-error point of a sweep CSV and compare node potentials.
    Best(BestArgs),
}

#[derive(Subcommand)]
enum StructuresAction {
    /// List presets with their layers.
    List,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Classical,
    Hhl,
}

#[derive(Args)]
struct SolveArgs {
    /// Preset name (a, b, c1, c2, c3) or path to a stack JSON file.
    #[arg(long)]
    structure: String,
    #[arg(long, value_enum, default_value = "classical")]
    method: Method,
    /// generic, figure2 or figure4.
    #[arg(long, default_value = "generic")]
    variant: Variant,
    #[arg(long, default_value_t = 2)]
    n_clock: usize,
    /// Evolution time; defaults to 3π/4.
    #[arg(long)]
    t: Option<f64>,
    /// exact or poly.
    #[arg(long, default_value = "exact")]
    rotation: RotationMode,
    /// Sample this many shots instead of printing exact probabilities.
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    structure: String,
    /// Comma-separated clock widths.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    n_clock: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_T_MIN)]
    t_min: f64,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    t_max: f64,
    #[arg(long, default_value_t = DEFAULT_T_STEPS)]
    t_steps: usize,
    #[arg(long, default_value = "exact")]
    rotation: RotationMode,
    /// CSV destination.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG plot destination.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, default_value = "a")]
    structure: String,
    #[arg(long, default_value = "figure2")]
    variant: Variant,
    /// Destination file; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BestArgs {
    /// Sweep CSV written by `sweep`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Rotation mode the sweep used.
    #[arg(long, default_value = "exact")]
    rotation: RotationMode,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Structures {
            action: StructuresAction::List,
        } => {
            print!("{}", list_structures());
            Ok(())
        }
        Command::Solve(args) => solve(&args),
        Command::Sweep(args) => sweep(&args),
        Command::ExportQasm(args) => export_qasm(&args),
        Command::Best(args) => best(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e.source));
            ExitCode::from(e.code)
        }
    }
}

/// Error chain on one line, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut text = String::new();
    for cause in e.chain() {
        let part = cause.to_string();
        if !text.contains(&part) {
            if !text.is_empty() {
                text.push_str(": ");
            }
            text.push_str(&part);
        }
    }
    text
}

/// Presets by name, anything else as a JSON path.
fn resolve(structure: &str) -> CliResult<StructureSource> {
    let source: StructureSource = structure.parse().unwrap_or_else(|never| match never {});
    if let StructureSource::File(path) = &source {
        if !path.exists() {
            return Err(CliError::usage(anyhow::anyhow!(
                "unknown structure '{structure}': not a preset (a, b, c1, c2, c3) and no such file"
            )));
        }
    }
    Ok(source)
}

fn list_structures() -> String {
    let mut out = String::new();
    for s in Structure::ALL {
        let spec = s.spec();
        let _ = writeln!(out, "{:<3} {}", s.name(), s.description());
        for l in &spec.layers {
            let _ = writeln!(
                out,
                "      {:<6} {} nm  eps_r {}",
                l.material,
                fmt_sig(l.thickness_nm),
                fmt_sig(l.eps_r)
            );
        }
        let _ = write!(
            out,
            "      interior nodes {}, bias {} V",
            spec.interior_nodes,
            fmt_sig(spec.bias_v)
        );
        for (node, q) in &spec.charges {
            let _ = write!(out, ", charge {} at node {node}", fmt_sig(*q));
        }
        out.push('\n');
    }
    out
}

fn profile_table(profile: &PotentialProfile, hhl: Option<&[f64]>) -> String {
    let mut out = String::from(if hhl.is_some() {
        "node,x_nm,hhl_v,classical_v\n"
    } else {
        "node,x_nm,potential_v\n"
    });
    let n = profile.potentials_v.len();
    for (i, (x, v)) in profile.positions_nm.iter().zip(&profile.potentials_v).enumerate() {
        let _ = match hhl {
            // Terminals are fixed, so both columns agree there.
            Some(q) => {
                let est = if i == 0 || i + 1 == n { *v } else { q[i - 1] };
                writeln!(out, "{i},{},{},{}", fmt_sig(*x), fmt_sig(est), fmt_sig(*v))
            }
            None => writeln!(out, "{i},{},{}", fmt_sig(*x), fmt_sig(*v)),
        };
    }
    out
}

fn solve(args: &SolveArgs) -> CliResult<()> {
    let source = resolve(&args.structure)?;
    let spec: StackSpec = source.load()?;
    let profile = solve_classical(&spec)?;
    if args.method == Method::Classical {
        println!("structure {}: classical solve", source.label());
        print!("{}", profile_table(&profile, None));
        return Ok(());
    }

    let sys = normalize(&discretize(&spec)?);
    let cfg = HhlConfig {
        variant: args.variant,
        ..HhlConfig::new(args.n_clock, args.t.unwrap_or(STRUCTURE_A_TIME)).with_rotation(args.rotation)
    };
    let r = run_hhl(&sys, &cfg, &profile.interior_v)?;
    println!(
        "structure {}: HHL ({}, n_clock {}, t {}, {} rotation)",
        source.label(),
        cfg.variant,
        cfg.n_clock,
        fmt_sig(cfg.t),
        cfg.rotation
    );
    let layout = HhlLayout::for_dimension(sys.dim(), cfg.n_clock)?;
    println!(
        "qubits {} (input {}, clock {}, ancilla 1)",
        r.qubit_budget, layout.n_input, layout.n_clock
    );
    print!("{}", profile_table(&profile, Some(&r.recovered_v)));
    println!(
        "fidelity {}, avg rel abs error {}, p_success {}, clock leakage {}",
        fmt_sig(r.fidelity),
        r.avg_rel_abs_error.map_or("undefined".into(), fmt_sig),
        fmt_sig(r.p_success),
        fmt_sig(r.clock_leakage)
    );

    let mut register = layout.input();
    register.push(layout.ancilla());
    let table = marginal(&r.final_state, &register).map_err(HhlError::from)?;
    if args.shots == 0 {
        println!("ancilla+input probabilities (ancilla bit leftmost):");
        for (bits, p) in table.entries() {
            println!("  {bits} {}", fmt_sig(p));
        }
    } else {
        let counts = sample(&table, args.shots, args.seed);
        println!(
            "ancilla+input counts, {} shots, seed {} (ancilla bit leftmost):",
            counts.shots, counts.seed
        );
        for (bits, _) in table.entries() {
            println!("  {bits} {}", counts.count(&bits));
        }
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> CliResult<()> {
    let source = resolve(&args.structure)?;
    let req = SweepRequest {
        structure: source.clone(),
        n_clock: args.n_clock.clone(),
        t_min: args.t_min,
        t_max: args.t_max,
        t_steps: args.t_steps,
        rotation: args.rotation,
    };
    req.validate()?;
    let problem = Problem::load(&source)?;
    if !problem.system.is_hhl_applicable() {
        return Err(HhlError::Inapplicable.into());
    }
    let records = run_sweep_on(&problem, &req)?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed == records.len() {
        return Err(CliError::numerical(anyhow::anyhow!(
            "every grid point failed; first failure: {}",
            records[0].failure.as_deref().unwrap_or("unknown")
        )));
    }
    write_csv(&records, &args.out).with_path(&args.out)?;
    if let Some(svg) = &args.svg {
        write_svg(&records, svg).with_path(svg)?;
    }
    println!("{} records written to {}", records.len(), args.out.display());
    if failed > 0 {
        eprintln!("warning: {failed} grid points failed and were written as NaN rows");
    }
    for &n in &args.n_clock {
        if let Some(best) = records
            .iter()
            .filter(|r| r.n_clock == n && r.is_ok())
            .min_by(|a, b| a.avg_rel_abs_error.total_cmp(&b.avg_rel_abs_error))
        {
            println!(
                "n_clock {n}: min error {} at t {} (fidelity {})",
                fmt_sig(min_error(&records, n).unwrap_or(f64::NAN)),
                fmt_sig(best.t),
                fmt_sig(best.fidelity)
            );
        }
    }
    Ok(())
}

fn export_qasm(args: &ExportArgs) -> CliResult<()> {
    let source = resolve(&args.structure)?;
    let circuit = match (args.variant, &source) {
        (Variant::Figure2, StructureSource::Preset(Structure::A)) => build_figure2_circuit(),
        (Variant::Figure4, StructureSource::Preset(Structure::A)) => build_figure4_circuit(),
        (Variant::Generic, _) => {
            let spec = source.load()?;
            let sys = normalize(&discretize(&spec)?);
            let mut c = build_generic_hhl(&sys, &HhlConfig::new(2, STRUCTURE_A_TIME))?;
            c.measure_all();
            c
        }
        (v, _) => {
            return Err(CliError::usage(anyhow::anyhow!(
                "the {v} circuit is defined for structure a only"
            )))
        }
    };
    let text = circuit.export_qasm().map_err(HhlError::from)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, text).with_path(path)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn best(args: &BestArgs) -> CliResult<()> {
    let records = read_csv(&args.input).with_path(&args.input)?;
    let mut labels: Vec<&str> = Vec::new();
    for r in &records {
        if !labels.contains(&r.structure.as_str()) {
            labels.push(&r.structure);
        }
    }
    if labels.is_empty() {
        return Err(CliError::usage(anyhow::anyhow!(
            "{} has no records",
            args.input.display()
        )));
    }
    for label in labels {
        let problem = Problem::load(&resolve(label)?)?;
        let best = best_solution(&records, &problem, args.rotation)?;
        println!(
            "structure {label}: best t {}, n_clock {}, avg rel abs error {}, fidelity {}",
            fmt_sig(best.t),
            best.n_clock,
            fmt_sig(best.avg_rel_abs_error),
            fmt_sig(best.fidelity)
        );
        print!("{}", best.table());
    }
    Ok(())
}

/// Attaches the offending path to file errors.
trait WithPath<T> {
    fn with_path(self, path: &Path) -> CliResult<T>;
}

impl<T, E: Into<CliError>> WithPath<T> for Result<T, E> {
    fn with_path(self, path: &Path) -> CliResult<T> {
        self.map_err(|e| {
            let e: CliError = e.into();
            CliError {
                code: e.code,
                source: e.source.context(path.display().to_string()),
            }
        })
    }
}
