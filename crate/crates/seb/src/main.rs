use std::fs;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use seb::bench::{self, Method};
use seb::error::Error;
use seb::geometry::Barycentric;
use seb::heuristic::{self, DropPolicy};
use seb::io::{self, TraceWriter};
use seb::recurrence::{IterSettings, System, TraceSink};
use seb::report;
use seb::{equidistant, welzl};

/// Exit codes: 0 done, 1 bad input or usage, 2 iteration budget exhausted
/// before convergence, 3 structural failure (rank condition, degenerate
/// reduction, numerical breakdown).
#[derive(Parser)]
#[command(name = "seb", version, about = "Smallest enclosing ball solvers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the smallest enclosing ball of a point cloud
    Solve(SolveArgs),
    /// Spectral diagnostics of the iteration map for a point cloud
    Analyze(AnalyzeArgs),
    /// Generate a uniform random point cloud in the unit hypercube
    Gen(GenArgs),
    /// Time and score solvers on random instances against the exact ball
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// CSV of points, one row per point
    #[arg(short, long)]
    input: PathBuf,
    /// Skip the first input line
    #[arg(long)]
    has_header: bool,
    /// welzl | recurrence | heuristic | equidistant
    #[arg(short, long, default_value = "recurrence")]
    method: String,
    /// JSON report destination (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Stop when no weight moves more than this in one step
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    /// Shuffle seed for the exact solver
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-iteration CSV trace (iterative methods only)
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Trace row stride; 0 picks 1 for n <= 64 and 10 otherwise
    #[arg(long, default_value_t = 0)]
    trace_every: usize,
    /// Negativity threshold for the drop heuristic
    #[arg(long, default_value_t = 1e-9)]
    simplex_tol: f64,
    /// Restart budget for the drop heuristic (default: n - 1)
    #[arg(long)]
    max_restarts: Option<usize>,
    #[arg(long, value_enum, default_value_t = DropArg::All)]
    drop_policy: DropArg,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    init: InitArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum DropArg {
    /// Drop every weight below -simplex_tol
    All,
    /// Drop only the most negative weight
    Most,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Uniform,
    /// 0.9 on the first point, the rest spread evenly
    Concentrated,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    has_header: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Case file: lines of d,n,instances,seed
    #[arg(long)]
    cases: PathBuf,
    #[arg(long, default_value = "welzl,recurrence,heuristic,equidistant")]
    methods: String,
    /// Directory receiving instances.csv and aggregate.csv
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(match e {
                Error::Input(_) | Error::Invalid(_) | Error::Io(_) => 1,
                Error::RankCondition { .. }
                | Error::Numerical(_)
                | Error::DegenerateReduction(_) => 3,
            })
        }
    }
}

fn run(cli: Cli) -> seb::Result<ExitCode> {
    match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Analyze(a) => cmd_analyze(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Bench(a) => cmd_bench(a),
    }
}

fn cmd_solve(a: SolveArgs) -> seb::Result<ExitCode> {
    let method = Method::parse(&a.method)?;
    let points = io::load_points_path(&a.input, a.has_header)?;
    if a.trace.is_some() && !matches!(method, Method::Recurrence | Method::Heuristic) {
        return Err(Error::Invalid(
            "--trace applies to the iterative methods only".into(),
        ));
    }
    let mut trace = match &a.trace {
        Some(p) => Some(TraceWriter::create(p)?),
        None => None,
    };
    let t0 = Instant::now();
    let rep = match method {
        Method::Welzl => {
            let sol = welzl::solve(&points, a.seed)?;
            report::from_welzl(&sol, t0.elapsed().as_secs_f64())
        }
        Method::Equidistant => {
            let sol = equidistant::solve(&points)?;
            report::from_equidistant(&sol, t0.elapsed().as_secs_f64())
        }
        Method::Recurrence => {
            let sys = System::build(&points)?;
            let init = match a.init {
                InitArg::Uniform => Barycentric::uniform(points.n()),
                InitArg::Concentrated => Barycentric::concentrated(points.n()),
            };
            let settings = IterSettings {
                tol_step: a.tol,
                max_iter: a.max_iter,
                trace_every: a.trace_every,
                ..IterSettings::default()
            };
            let sink = trace.as_mut().map(|t| t as &mut dyn TraceSink);
            let out = sys.iterate(&init, &settings, sink)?;
            report::from_recurrence(&points, &sys, &out, t0.elapsed().as_secs_f64())
        }
        Method::Heuristic => {
            let opts = heuristic::Options {
                tol_step: a.tol,
                max_iter: a.max_iter,
                max_restarts: a.max_restarts,
                simplex_tol: a.simplex_tol,
                drop_policy: match a.drop_policy {
                    DropArg::All => DropPolicy::AllNegative,
                    DropArg::Most => DropPolicy::MostNegative,
                },
                concentrated_init: matches!(a.init, InitArg::Concentrated),
                trace_every: a.trace_every,
            };
            let sink = trace.as_mut().map(|t| t as &mut dyn TraceSink);
            let out = heuristic::solve(&points, &opts, sink)?;
            report::from_heuristic(&out, t0.elapsed().as_secs_f64())
        }
    };
    if let Some(t) = trace {
        t.finish()?;
    }
    let json = io::to_json(&rep)?;
    write_text(a.output.as_deref(), &format!("{}\n", json))?;
    if rep.stop_reason == "max_iter" {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(a: AnalyzeArgs) -> seb::Result<ExitCode> {
    let points = io::load_points_path(&a.input, a.has_header)?;
    let rep = report::analyze(&points)?;
    let json = io::to_json(&rep)?;
    write_text(a.output.as_deref(), &format!("{}\n", json))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(a: GenArgs) -> seb::Result<ExitCode> {
    let points = bench::gen_uniform_hypercube(a.dim, a.count, a.seed)?;
    write_text(a.output.as_deref(), &io::points_to_csv(&points))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs) -> seb::Result<ExitCode> {
    let text = fs::read_to_string(&a.cases)?;
    let cases = bench::parse_cases(&text)?;
    let methods = bench::parse_methods(&a.methods)?;
    let (instances, aggregates) = bench::run(&cases, &methods, bench::threads_from_env())?;
    fs::create_dir_all(&a.out_dir)?;
    bench::write_instances_csv(
        BufWriter::new(File::create(a.out_dir.join("instances.csv"))?),
        &instances,
    )?;
    bench::write_aggregate_csv(
        BufWriter::new(File::create(a.out_dir.join("aggregate.csv"))?),
        &aggregates,
    )?;
    for r in &aggregates {
        println!(
            "case {} d={} n={} {}: instances={} skipped={} mean_time_s={:.3e} mean_rel_radius_err={:.3e} mean_center_err={:.3e}",
            r.case_id,
            r.d,
            r.n,
            r.method.name(),
            r.instances,
            r.skipped,
            r.mean_time_s,
            r.mean_rel_radius_err,
            r.mean_center_err
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn write_text(path: Option<&Path>, text: &str) -> seb::Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{}", text),
    }
    Ok(())
}
