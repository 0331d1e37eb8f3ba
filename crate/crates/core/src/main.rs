use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use giso::graph::{parse_si_instance, solve_gi, Graph};
use giso::{Error, IsoCoset, Solver, SolverConfig};

const EXIT_ISO: u8 = 0;
const EXIT_NONISO: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INPUT: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

/// Exact graph and string isomorphism.
#[derive(Parser, Debug)]
#[command(name = "giso", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Groups of at most this order are searched element by element.
    #[arg(long, global = true, default_value_t = 10_000)]
    brute_threshold: u64,
    /// Abort after this many solver nodes.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,
    /// Use test sets of this size for local certificates.
    #[arg(long, global = true)]
    relax_k: Option<usize>,
    /// Print recursion nodes and case counts to stderr.
    #[arg(long, global = true)]
    trace_cases: bool,
    /// Print every local certificate to stderr.
    #[arg(long, global = true)]
    dump_certificates: bool,
    /// Seed for randomized test drivers; the solver itself is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graph isomorphism between two edge-list files.
    Gi { first: PathBuf, second: PathBuf },
    /// String isomorphism from an instance file.
    Si { instance: PathBuf },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_coset(c: &IsoCoset) {
    if let IsoCoset::Coset { group, rep } = c {
        println!("{rep}");
        for g in group.generators() {
            println!("AUT {g}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let solver = Solver::new(SolverConfig {
        brute_threshold: cli.brute_threshold,
        budget: cli.budget,
        relax_k: cli.relax_k,
        trace_cases: cli.trace_cases,
        dump_certificates: cli.dump_certificates,
    });
    let _ = cli.seed;

    let result = match &cli.command {
        Command::Gi { first, second } => {
            let graphs = read(first).and_then(|a| read(second).map(|b| (a, b))).and_then(|(a, b)| {
                let g1 = Graph::parse(&a).map_err(|e| format!("{}: {e}", first.display()))?;
                let g2 = Graph::parse(&b).map_err(|e| format!("{}: {e}", second.display()))?;
                Ok((g1, g2))
            });
            match graphs {
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(EXIT_INPUT);
                }
                Ok((g1, g2)) => solve_gi(&solver, &g1, &g2),
            }
        }
        Command::Si { instance } => match read(instance).and_then(|t| parse_si_instance(&t).map_err(|e| e.to_string())) {
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_INPUT);
            }
            Ok((g, x, y)) => solver.solve(&g, &x, &y),
        },
    };

    if cli.trace_cases {
        for line in solver.trace_lines() {
            eprintln!("{line}");
        }
        for (key, count) in solver.hit_counts() {
            eprintln!("count {key} {count}");
        }
    }
    if cli.dump_certificates {
        for line in solver.certificate_lines() {
            eprintln!("{line}");
        }
    }

    match result {
        Ok(c) => {
            let iso = !c.is_empty();
            match cli.command {
                Command::Gi { .. } => {
                    println!("{}", if iso { "ISO" } else { "NONISO" });
                    print_coset(&c);
                }
                Command::Si { .. } if !iso => println!("EMPTY"),
                Command::Si { .. } => print_coset(&c),
            }
            ExitCode::from(if iso { EXIT_ISO } else { EXIT_NONISO })
        }
        Err(Error::Budget { limit }) => {
            eprintln!("error: node budget of {limit} exhausted");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(e @ (Error::Parse(_) | Error::PointOutOfRange { .. } | Error::DegreeMismatch { .. } | Error::NotBijection)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
