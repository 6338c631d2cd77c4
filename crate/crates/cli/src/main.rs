//! `dgmdiv`: batch front end for the `dgmdiv` library.
//!
//! Exit codes: 0 on success, 1 when a requested check fails or output cannot
//! be written, 2 when an input file does not parse, 3 for invalid flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dgmdiv::diagram::{parse_diagram, serialize_diagram};
use dgmdiv::divergence::{distance_report, divergence, DivergenceReport};
use dgmdiv::functions::{self, check_p_increasing, check_sub_additive, check_sub_diagonal, CheckOutcome, Sampling};
use dgmdiv::persistence::{build_rips, compute_persistence, parse_filtration, parse_point_cloud, serialize_filtration};
use dgmdiv::vectorize::{extend, project_finite, Measure, Measures};
use dgmdiv::{Order, PersistenceDiagram, TameFunction};

#[derive(Parser, Debug)]
#[command(name = "dgmdiv", version, about = "Distances and divergences between persistence diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wasserstein or bottleneck distance between two diagrams.
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Order p >= 1, or `inf`.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, value_enum, default_value_t = Metric::Wasserstein)]
        metric: Metric,
        /// Also print the optimal matching.
        #[arg(long)]
        verbose: bool,
    },
    /// Divergence D_p^f(A||B).
    Div {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        function: FunctionArgs,
        /// Order p >= 1, or `inf` for the bottleneck divergence.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long)]
        verbose: bool,
    },
    /// Removes the points with infinite death.
    Project {
        a: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bar statistics of the finite part of a diagram, comma separated.
    Stats {
        a: PathBuf,
        /// Any of mean, std, count, entropy.
        #[arg(long, value_delimiter = ',', default_value = "mean,std,entropy")]
        measures: Vec<String>,
    },
    /// Vietoris-Rips filtration of a CSV point cloud.
    Rips {
        points: PathBuf,
        #[arg(long)]
        max_eps: f64,
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Persistence diagrams of a filtration, one `.dgm` file per dimension.
    Persistence {
        filtration: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// File name prefix; defaults to the input file stem.
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Sampled checks of sub-diagonality, sub-additivity and p-increase.
    Checkfn {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1e3)]
        range_max: f64,
        /// Order for the p-increasing check.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value_t = 4)]
        dimension_max: usize,
    },
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Catalog name or a path to a tabulated `.fn` file.
    #[arg(long = "f")]
    f: String,
    /// Parameter for `scale` and `truncate`.
    #[arg(long)]
    param: Option<f64>,
    /// Finite value used for f(inf) by functions that diverge there.
    #[arg(long)]
    clamp_infinity: Option<f64>,
    /// Seed for the validators run on tabulated functions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Metric {
    Wasserstein,
    Bottleneck,
}

enum Failure {
    Check(String),
    Io(String),
    Parse(String),
    Flags(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) | Failure::Io(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Flags(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Io(m) | Failure::Parse(m) | Failure::Flags(m) => m,
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("dgmdiv: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> CliResult<String> {
    match command {
        Command::Dist { a, b, p, metric, verbose } => {
            let (a, b) = (read_diagram(&a)?, read_diagram(&b)?);
            let order = match metric {
                Metric::Bottleneck => Order::Infinity,
                Metric::Wasserstein => parse_order(&p)?,
            };
            let report = distance_report(&a, &b, order);
            Ok(render(&report, verbose))
        }
        Command::Div { a, b, function, p, verbose } => {
            let (a, b) = (read_diagram(&a)?, read_diagram(&b)?);
            let f = load_function(&function)?;
            let report = divergence(&a, &b, &f, parse_order(&p)?).map_err(flags)?;
            Ok(render(&report, verbose))
        }
        Command::Project { a, output } => {
            let projected = project_finite(&read_diagram(&a)?);
            emit(serialize_diagram(&projected), output.as_deref())
        }
        Command::Stats { a, measures } => {
            let a = read_diagram(&a)?;
            let measures = measures
                .iter()
                .map(|m| m.parse::<Measure>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(flags)?;
            let values = extend(Measures(measures)).apply(&a);
            let row: Vec<String> = values.iter().map(|&v| dgmdiv::extended::format_real(v)).collect();
            Ok(format!("{}\n", row.join(",")))
        }
        Command::Rips {
            points,
            max_eps,
            max_dim,
            output,
        } => {
            let cloud = parse_point_cloud(&read_text(&points)?).map_err(parse)?;
            let filtration = build_rips(&cloud, max_eps, max_dim).map_err(flags)?;
            emit(serialize_filtration(&filtration), output.as_deref())
        }
        Command::Persistence {
            filtration,
            max_dim,
            out_dir,
            prefix,
        } => {
            let prefix = prefix.unwrap_or_else(|| {
                filtration
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "out".into())
            });
            let parsed = parse_filtration(&read_text(&filtration)?).map_err(parse)?;
            fs::create_dir_all(&out_dir).map_err(|e| Failure::Io(format!("{}: {e}", out_dir.display())))?;
            let mut listing = String::new();
            for (k, diagram) in compute_persistence(&parsed, max_dim).iter().enumerate() {
                let path = out_dir.join(format!("{prefix}_H{k}.dgm"));
                write_file(&path, &serialize_diagram(diagram))?;
                listing.push_str(&format!("{}\n", path.display()));
            }
            Ok(listing)
        }
        Command::Checkfn {
            function,
            samples,
            range_max,
            p,
            dimension_max,
        } => {
            let f = load_function_unchecked(&function)?;
            let order = parse_order(&p)?;
            let sampling = Sampling {
                samples,
                range_max,
                seed: function.seed,
            };
            let checks = [
                ("sub_diagonal", check_sub_diagonal(&f, &sampling)),
                ("sub_additive", check_sub_additive(&f, &sampling)),
                (
                    "p_increasing",
                    check_p_increasing(&f, order, dimension_max, samples, function.seed),
                ),
            ];
            let mut out = String::new();
            for (name, outcome) in &checks {
                out.push_str(&format!("{name}: {}\n", describe(outcome)));
            }
            if checks.iter().all(|(_, o)| o.holds) {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Check(format!("`{}` failed a property check", f.name())))
            }
        }
    }
}

fn describe(outcome: &CheckOutcome) -> String {
    match &outcome.counterexample {
        None => format!("ok ({} cases)", outcome.evaluated),
        Some(c) => format!("FAIL at {c} (after {} cases)", outcome.evaluated),
    }
}

fn render(report: &DivergenceReport, verbose: bool) -> String {
    let mut out = format!("{}\n", report.value);
    if verbose {
        for entry in &report.matching {
            out.push_str(&format!("{entry}\n"));
        }
    }
    out
}

fn parse_order(p: &str) -> CliResult<Order> {
    p.parse::<Order>().map_err(flags)
}

fn load_function_unchecked(args: &FunctionArgs) -> CliResult<TameFunction> {
    let f = if args.f.ends_with(".fn") {
        let name = Path::new(&args.f)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| args.f.clone());
        functions::parse_tabulated(&name, &read_text(Path::new(&args.f))?).map_err(parse)?
    } else {
        functions::builtin(&args.f, args.param).map_err(flags)?
    };
    match args.clamp_infinity {
        Some(v) => f.with_infinity_clamp(v).map_err(flags),
        None => Ok(f),
    }
}

/// Catalog functions are trusted; tabulated ones are validated first.
fn load_function(args: &FunctionArgs) -> CliResult<TameFunction> {
    let f = load_function_unchecked(args)?;
    if !args.f.ends_with(".fn") {
        return Ok(f);
    }
    let sampling = Sampling {
        seed: args.seed,
        ..Sampling::default()
    };
    f.validated(&sampling).map_err(flags)
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_diagram(path: &Path) -> CliResult<PersistenceDiagram> {
    let parsed = parse_diagram(&read_text(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    if parsed.dropped > 0 {
        eprintln!("dgmdiv: {}: dropped {} diagonal point(s)", path.display(), parsed.dropped);
    }
    Ok(parsed.diagram)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes to `output` when given, otherwise returns the text for stdout.
fn emit(text: String, output: Option<&Path>) -> CliResult<String> {
    match output {
        Some(path) => write_file(path, &text).map(|_| String::new()),
        None => Ok(text),
    }
}

fn parse(e: dgmdiv::Error) -> Failure {
    Failure::Parse(e.to_string())
}

fn flags(e: dgmdiv::Error) -> Failure {
    Failure::Flags(e.to_string())
}
