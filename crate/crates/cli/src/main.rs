use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bidepo::classify::{
    classify, classify_global_depolarizing, classify_local_product, global_threshold,
    local_symmetric_interval, prior_sufficient_bound,
};
use bidepo::grid::{Axis, FigurePreset, GridCell, GridSpec, Param, RegionGrid};
use bidepo::linalg::{min_eigenvalue, partial_transpose};
use bidepo::oracle::witness_detect;
use bidepo::states::{indecomposable_witness, ppt_entangled_state};
use bidepo::verify::{self, Suite};
use bidepo::{Dims, Execution, PhiParams, Side};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

const USAGE: u8 = 1;
const VERIFICATION: u8 = 2;

#[derive(Parser)]
#[command(name = "bidepo", version, about = "Bipartite depolarizing maps")]
struct Cli {
    /// Run loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a single map.
    Classify(ClassifyArgs),
    /// Classify every cell of a grid and write CSV.
    Sweep(SweepArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Emit a named construction with its verification values as JSON.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Args)]
struct DimArgs {
    #[arg(long, default_value_t = 2)]
    da: usize,
    #[arg(long, default_value_t = 2)]
    db: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    dims: DimArgs,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    da: Option<usize>,
    #[arg(long)]
    db: Option<usize>,
    /// Fix a parameter, e.g. `gamma=0.5`. May be repeated.
    #[arg(long, value_name = "PARAM=VALUE", allow_hyphen_values = true)]
    plane: Vec<String>,
    /// Range of a swept parameter, e.g. `alpha=-1:2`. Unlisted swept
    /// parameters use -1:2.
    #[arg(long, value_name = "PARAM=MIN:MAX", allow_hyphen_values = true)]
    range: Vec<String>,
    /// Values per swept axis.
    #[arg(long, default_value_t = 61)]
    steps: usize,
    /// Standard grid (positivity, eb, ea); overrides plane, range and steps.
    #[arg(long, conflicts_with_all = ["plane", "range"])]
    figure: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, env = "BIDEPO_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Demo {
    /// PPT entangled state and its detection by the indecomposable witness.
    PptEntangled(DimArgs),
    /// Annihilation interval of local depolarizing noise.
    LocalNoise {
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Annihilation threshold of global depolarizing noise.
    GlobalNoise {
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: USAGE,
        message: message.to_string(),
    }
}

type CliResult = Result<(), Failure>;

/// A closed pipe on stdout (e.g. `| head`) is not an error.
fn output(e: io::Error) -> Failure {
    if e.kind() == io::ErrorKind::BrokenPipe {
        Failure {
            code: 0,
            message: String::new(),
        }
    } else {
        usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Sweep(args) => cmd_sweep(args, exec),
        Command::Verify(args) => cmd_verify(args, exec),
        Command::Demo(demo) => cmd_demo(demo),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.code == 0 => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn dims(da: usize, db: usize) -> Result<Dims, Failure> {
    Dims::new(da, db).map_err(usage)
}

fn cmd_classify(args: ClassifyArgs) -> CliResult {
    let p = PhiParams::new(
        args.alpha,
        args.beta,
        args.gamma,
        dims(args.dims.da, args.dims.db)?,
    );
    if !p.is_finite() {
        return Err(usage("parameters must be finite"));
    }
    let report = classify(&p);
    let mut out = io::stdout().lock();
    if args.json {
        serde_json::to_writer_pretty(&mut out, &report).map_err(|e| output(e.into()))?;
        writeln!(out).map_err(output)?;
        return Ok(());
    }
    let names = ["positive", "cp", "cocp", "eb", "ppt_inducing", "ea"];
    let body = (|| -> io::Result<()> {
        writeln!(
            out,
            "Phi[{}, {}, {}] on {}x{}",
            p.alpha, p.beta, p.gamma, p.dims.da, p.dims.db
        )?;
        for (name, value) in names.iter().zip(report.flags()) {
            writeln!(out, "  {name:<13} {value}")?;
        }
        writeln!(out, "slacks")?;
        for (name, value) in &report.slacks {
            writeln!(out, "  {name:<55} {value:+.6e}")?;
        }
        Ok(())
    })();
    body.map_err(output)
}

fn parse_param(s: &str) -> Result<Param, Failure> {
    s.trim().parse().map_err(usage)
}

fn parse_number(s: &str) -> Result<f64, Failure> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| usage(format!("'{s}' is not a finite number")))
}

fn grid_spec(args: &SweepArgs) -> Result<GridSpec, Failure> {
    if let Some(name) = &args.figure {
        let preset: FigurePreset = name.parse().map_err(usage)?;
        let default = preset.default_dims();
        let d = dims(args.da.unwrap_or(default.da), args.db.unwrap_or(default.db))?;
        if preset != FigurePreset::Eb && d.n() != 4 {
            return Err(usage(format!(
                "figure '{name}' is drawn at n = 4, got dims ({}, {})",
                d.da, d.db
            )));
        }
        return preset.spec(d).map_err(usage);
    }
    let d = dims(args.da.unwrap_or(2), args.db.unwrap_or(2))?;
    let mut fixed = [0.0; 3];
    let mut is_fixed = [false; 3];
    for item in &args.plane {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("--plane expects PARAM=VALUE, got '{item}'")))?;
        let param = parse_param(name)?;
        fixed[param.index()] = parse_number(value)?;
        is_fixed[param.index()] = true;
    }
    let mut ranges: [(f64, f64); 3] = [(-1.0, 2.0); 3];
    for item in &args.range {
        let (name, span) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("--range expects PARAM=MIN:MAX, got '{item}'")))?;
        let param = parse_param(name)?;
        if is_fixed[param.index()] {
            return Err(usage(format!("{param} is both fixed and swept")));
        }
        let (lo, hi) = span
            .split_once(':')
            .ok_or_else(|| usage(format!("--range expects PARAM=MIN:MAX, got '{item}'")))?;
        ranges[param.index()] = (parse_number(lo)?, parse_number(hi)?);
    }
    let axes = Param::ALL
        .iter()
        .filter(|p| !is_fixed[p.index()])
        .map(|&p| {
            let (lo, hi) = ranges[p.index()];
            let steps = if lo == hi { 1 } else { args.steps };
            Axis::new(p, lo, hi, steps)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    GridSpec::new(d, fixed, axes).map_err(usage)
}

fn write_csv<W: Write>(grid: &RegionGrid, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "alpha",
        "beta",
        "gamma",
        "positive",
        "cp",
        "cocp",
        "eb",
        "ppt_inducing",
        "ea",
    ])?;
    let bit = |b: bool| if b { "1" } else { "0" };
    for c in &grid.cells {
        let GridCell {
            alpha,
            beta,
            gamma,
            positive,
            cp,
            cocp,
            eb,
            ppt_inducing,
            ea,
        } = *c;
        w.write_record([
            format!("{alpha:.16e}").as_str(),
            format!("{beta:.16e}").as_str(),
            format!("{gamma:.16e}").as_str(),
            bit(positive),
            bit(cp),
            bit(cocp),
            bit(eb),
            bit(ppt_inducing),
            bit(ea),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs, exec: Execution) -> CliResult {
    if args.steps == 0 {
        return Err(usage("--steps must be positive"));
    }
    let spec = grid_spec(&args)?;
    let grid = RegionGrid::sweep(spec, exec);
    let written = match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            write_csv(&grid, io::BufWriter::new(file))
        }
        None => write_csv(&grid, io::stdout().lock()),
    };
    written.map_err(usage)?;
    if let Some(path) = &args.out {
        eprintln!("wrote {} cells to {}", grid.cells.len(), path.display());
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs, exec: Execution) -> CliResult {
    let suite: Suite = args.suite.parse().map_err(usage)?;
    let report = verify::run(suite, args.seed, exec).map_err(|e| Failure {
        code: VERIFICATION,
        message: e.to_string(),
    })?;
    for c in &report.checks {
        println!(
            "{:<4} {:<13} {:<28} {:.1}s  {}",
            if c.passed { "ok" } else { "FAIL" },
            c.suite.to_string(),
            c.name,
            c.seconds,
            c.detail
        );
    }
    if report.passed() {
        println!(
            "{} checks passed (seed {})",
            report.checks.len(),
            report.seed
        );
        Ok(())
    } else {
        let json = serde_json::to_string_pretty(&report.failure_json()).map_err(usage)?;
        println!("{json}");
        Err(Failure {
            code: VERIFICATION,
            message: format!("{} checks failed", report.failures().len()),
        })
    }
}

#[derive(Serialize)]
struct PptEntangledDemo {
    dims: Dims,
    vertex: PhiParams,
    min_eigenvalue: f64,
    min_pt_eigenvalue: f64,
    witness_value: f64,
    detected: bool,
    warning: Option<&'static str>,
}

#[derive(Serialize)]
struct LocalNoiseDemo {
    d: usize,
    lower: f64,
    threshold: f64,
    prior_sufficient_bound: f64,
    gap: f64,
    ea_at_threshold: bool,
    ea_above_threshold: bool,
}

#[derive(Serialize)]
struct GlobalNoiseDemo {
    d: usize,
    threshold: f64,
    positive_from: f64,
    ea_at_threshold: bool,
    ea_above_threshold: bool,
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    let s = serde_json::to_string_pretty(value).map_err(usage)?;
    println!("{s}");
    Ok(())
}

fn cmd_demo(demo: Demo) -> CliResult {
    match demo {
        Demo::PptEntangled(args) => {
            let d = dims(args.da, args.db)?;
            let state = ppt_entangled_state(d).map_err(usage)?;
            let rho = state.normalized();
            let total = d.total();
            let w = indecomposable_witness(d);
            let fail = |e: bidepo::Error| usage(e);
            let witness_value = witness_detect(&rho, |x| w.apply(x), total, total).map_err(fail)?;
            print_json(&PptEntangledDemo {
                dims: d,
                vertex: state.vertex(),
                min_eigenvalue: min_eigenvalue(&rho).map_err(fail)?,
                min_pt_eigenvalue: min_eigenvalue(
                    &partial_transpose(&rho, (total, total), Side::Second).map_err(fail)?,
                )
                .map_err(fail)?,
                witness_value,
                detected: witness_value < -1e-12,
                warning: (d.da == d.db).then_some(
                    "equal local dimensions: the state is separable, no detection expected",
                ),
            })
        }
        Demo::LocalNoise { d } => {
            if d < 2 {
                return Err(usage("d must be at least 2"));
            }
            let (lower, threshold) = local_symmetric_interval(d);
            let prior = prior_sufficient_bound(d);
            print_json(&LocalNoiseDemo {
                d,
                lower,
                threshold,
                prior_sufficient_bound: prior,
                gap: threshold - prior,
                ea_at_threshold: classify_local_product(threshold, threshold, d).ea,
                ea_above_threshold: classify_local_product(threshold + 1e-9, threshold + 1e-9, d)
                    .ea,
            })
        }
        Demo::GlobalNoise { d } => {
            if d < 2 {
                return Err(usage("d must be at least 2"));
            }
            let q = global_threshold(d);
            print_json(&GlobalNoiseDemo {
                d,
                threshold: q,
                positive_from: -1.0 / ((d * d) as f64 - 1.0),
                ea_at_threshold: classify_global_depolarizing(q, d).ea,
                ea_above_threshold: classify_global_depolarizing(q + 1e-9, d).ea,
            })
        }
    }
}
