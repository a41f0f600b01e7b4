//! Thin command-line front end over the library engines. Every subcommand
//! prints a line-oriented `key: value` report to stdout; diagnostics go to
//! stderr. Exit codes: 0 success, 2 input error, 3 enumeration budget
//! exceeded, 4 internal assertion failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use orbcount::counting::{
    brute_force_circuits_budgeted, count_circuits_undirected_opt,
    count_eulerian_orientations_bundled, count_eulerian_orientations_opt, count_orbs_bundled,
    count_orbs_opt, Budget, CountError, SearchOpts,
};
use orbcount::graph::Multigraph;
use orbcount::numtheory::{lemma1_holds, NtError};
use orbcount::reduction::{
    build_gp, build_nae_gadget, count_nae_assignments, count_special_nae_orientations,
    recover_orientation_count_checked, type_census, verify_nae_congruence, CnfInstance,
    PrimePolicy, ReduceError,
};
use orbcount::report::RunReport;

#[derive(Parser)]
#[command(name = "orbcount", version, about = "Exact Eulerian counting engines")]
struct Cli {
    /// Worker threads for the enumeration engines; results are identical
    /// for every value.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Cap on enumeration search nodes; exceeding it exits with code 3.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitEngine {
    Orb,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbEngine {
    Naive,
    Bundled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    SmallPrimes,
    PaperRange,
}

#[derive(Subcommand)]
enum Command {
    /// Count Eulerian circuits of an undirected multigraph.
    CountCircuits {
        graph: PathBuf,
        /// Root vertex (1-based); defaults to the least support vertex.
        #[arg(long)]
        root: Option<usize>,
        #[arg(long, value_enum, default_value_t = CircuitEngine::Orb)]
        engine: CircuitEngine,
    },
    /// Count Eulerian orientations.
    CountOrientations {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = OrbEngine::Naive)]
        engine: OrbEngine,
    },
    /// Count orbs (Eulerian orientation + arborescence pairs) for a root.
    CountOrbs {
        graph: PathBuf,
        /// Root vertex (1-based).
        #[arg(long)]
        root: usize,
        #[arg(long, value_enum, default_value_t = OrbEngine::Naive)]
        engine: OrbEngine,
    },
    /// Gadget constructions.
    Gadget {
        #[command(subcommand)]
        cmd: GadgetCmd,
    },
    /// Oracle reductions.
    Reduce {
        #[command(subcommand)]
        cmd: ReduceCmd,
    },
    /// Not-all-equal 3-SAT reduction.
    Nae {
        #[command(subcommand)]
        cmd: NaeCmd,
    },
    /// Check the prime-product lower bound for one n or a sweep.
    Lemma1 {
        #[arg(long)]
        n: Option<u64>,
        /// Inclusive range, e.g. 4..150
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Exhaustive orb partition of the p-fold gadget by type.
    Census {
        graph: PathBuf,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Subcommand)]
enum GadgetCmd {
    /// Build the p-fold replication gadget and write it with provenance
    /// comments.
    Gp {
        graph: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Recover the Eulerian orientation count from the bundled orb oracle
    /// through the prime sweep and CRT.
    RecoverN {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Policy::SmallPrimes)]
        policy: Policy,
        /// Re-check the recovered count against one held-out prime.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand)]
enum NaeCmd {
    /// Build the satisfiability gadget and write it with role comments.
    Gadget {
        cnf: PathBuf,
        /// Odd prime, or `auto` for the least admissible one.
        #[arg(long, default_value = "auto")]
        p: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Verify the gadget congruence against brute-force assignment counting.
    Verify {
        cnf: PathBuf,
        #[arg(long, default_value = "auto")]
        p: String,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn from_count_error(e: CountError) -> CliError {
    let code = match e {
        CountError::BudgetExceeded => 3,
        CountError::RootOutOfRange(..) => 2,
        _ => 4,
    };
    CliError {
        code,
        message: e.to_string(),
    }
}

fn from_reduce_error(e: ReduceError) -> CliError {
    let code = match &e {
        ReduceError::InfeasibleSize => 3,
        ReduceError::EvenOrNonPrime(_)
        | ReduceError::EmptyGraph
        | ReduceError::PrimeTooSmall { .. }
        | ReduceError::MalformedClause(_) => 2,
        ReduceError::Nt(NtError::DomainError(_)) => 2,
        ReduceError::Count(c) => return from_count_error(c.clone()),
        _ => 4,
    };
    CliError {
        code,
        message: e.to_string(),
    }
}

fn read_file(path: &PathBuf) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &PathBuf) -> Result<(Multigraph, Vec<u8>), CliError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let g = Multigraph::parse(&text).map_err(CliError::input)?;
    Ok((g, bytes))
}

fn load_cnf(path: &PathBuf) -> Result<(CnfInstance, Vec<u8>), CliError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let cnf = CnfInstance::parse(&text).map_err(CliError::input)?;
    Ok((cnf, bytes))
}

fn parse_root(root: usize, g: &Multigraph) -> Result<usize, CliError> {
    if root < 1 || root > g.vertex_count() {
        return Err(CliError::input(format!(
            "root {root} out of range 1..={}",
            g.vertex_count()
        )));
    }
    Ok(root - 1)
}

fn parse_prime_arg(p: &str) -> Result<Option<u64>, CliError> {
    if p == "auto" {
        return Ok(None);
    }
    p.parse::<u64>()
        .map(Some)
        .map_err(|_| CliError::input(format!("--p must be `auto` or an integer, got {p:?}")))
}

fn residues_field(residues: &[(u64, u64)]) -> String {
    residues
        .iter()
        .map(|(p, r)| format!("({p}:{r})"))
        .collect::<Vec<_>>()
        .join(",")
}

fn run(cli: &Cli, report: &mut RunReport) -> Result<(), CliError> {
    let opts = SearchOpts {
        threads: cli.threads,
        node_budget: cli.budget,
    };
    match &cli.command {
        Command::CountCircuits {
            graph,
            root,
            engine,
        } => {
            let (g, bytes) = load_graph(graph)?;
            report.push_digest("input-digest", &bytes);
            match engine {
                CircuitEngine::Orb => {
                    report.push("engine", "orb");
                    let root = match root {
                        Some(r) => parse_root(*r, &g)?,
                        None => g.support().first().copied().unwrap_or(0),
                    };
                    let c =
                        count_circuits_undirected_opt(&g, root, &opts).map_err(from_count_error)?;
                    report.push_count("circuits", &c);
                }
                CircuitEngine::Brute => {
                    report.push("engine", "brute");
                    let budget = match cli.budget {
                        Some(b) => Budget::limited(b),
                        None => Budget::unlimited(),
                    };
                    let c = brute_force_circuits_budgeted(&g, &budget).map_err(from_count_error)?;
                    report.push_count("circuits", &c);
                }
            }
        }
        Command::CountOrientations { graph, engine } => {
            let (g, bytes) = load_graph(graph)?;
            report.push_digest("input-digest", &bytes);
            let c = match engine {
                OrbEngine::Naive => {
                    report.push("engine", "naive");
                    count_eulerian_orientations_opt(&g, &opts).map_err(from_count_error)?
                }
                OrbEngine::Bundled => {
                    report.push("engine", "bundled");
                    count_eulerian_orientations_bundled(&g, &opts).map_err(from_count_error)?
                }
            };
            report.push_count("orientations", &c);
        }
        Command::CountOrbs {
            graph,
            root,
            engine,
        } => {
            let (g, bytes) = load_graph(graph)?;
            report.push_digest("input-digest", &bytes);
            let root = parse_root(*root, &g)?;
            let c = match engine {
                OrbEngine::Naive => {
                    report.push("engine", "naive");
                    count_orbs_opt(&g, root, &opts).map_err(from_count_error)?
                }
                OrbEngine::Bundled => {
                    report.push("engine", "bundled");
                    count_orbs_bundled(&g, root, &opts).map_err(from_count_error)?
                }
            };
            report.push_count("orbs", &c);
        }
        Command::Gadget {
            cmd: GadgetCmd::Gp { graph, p, output },
        } => {
            let (g, bytes) = load_graph(graph)?;
            report.push_digest("input-digest", &bytes);
            let gadget = build_gp(&g, *p).map_err(from_reduce_error)?;
            let text = gadget.serialize();
            std::fs::write(output, &text)
                .map_err(|e| CliError::input(format!("{}: {e}", output.display())))?;
            report.push("p", p);
            report.push("output", output.display());
            report.push("vertices", gadget.graph().vertex_count());
            report.push("edges", gadget.graph().edge_count());
            report.push_digest("output-digest", text.as_bytes());
        }
        Command::Reduce {
            cmd: ReduceCmd::RecoverN {
                graph,
                policy,
                check,
            },
        } => {
            let (g, bytes) = load_graph(graph)?;
            report.push_digest("input-digest", &bytes);
            let policy = match policy {
                Policy::SmallPrimes => {
                    report.push("policy", "small-primes");
                    PrimePolicy::SmallPrimes
                }
                Policy::PaperRange => {
                    report.push("policy", "paper-range");
                    PrimePolicy::PaperRange
                }
            };
            report.push("engine", "bundled");
            let oracle =
                |gadget: &Multigraph, root: usize| count_orbs_bundled(gadget, root, &opts);
            let r = recover_orientation_count_checked(&g, &oracle, policy, *check)
                .map_err(from_reduce_error)?;
            report.push("residues", residues_field(&r.residues));
            report.push_count("orientations", &r.count);
        }
        Command::Nae { cmd } => match cmd {
            NaeCmd::Gadget { cnf, p, output } => {
                let (inst, bytes) = load_cnf(cnf)?;
                report.push_digest("input-digest", &bytes);
                let gadget =
                    build_nae_gadget(&inst, parse_prime_arg(p)?).map_err(from_reduce_error)?;
                let text = gadget.serialize();
                std::fs::write(output, &text)
                    .map_err(|e| CliError::input(format!("{}: {e}", output.display())))?;
                report.push("p", gadget.p());
                report.push("output", output.display());
                report.push("vertices", gadget.graph().vertex_count());
                report.push("edges", gadget.graph().edge_count());
                report.push_digest("output-digest", text.as_bytes());
            }
            NaeCmd::Verify { cnf, p } => {
                let (inst, bytes) = load_cnf(cnf)?;
                report.push_digest("input-digest", &bytes);
                report.push("engine", "bundled");
                let r = verify_nae_congruence(&inst, parse_prime_arg(p)?, &opts)
                    .map_err(from_reduce_error)?;
                report.push("p", r.p);
                report.push_count("nae-count", &r.nae_count);
                report.push_count("eo-count", &r.eo_count);
                report.push("nae-mod-p", r.nae_mod_p);
                report.push("eo-mod-p", r.eo_mod_p);
                report.push("congruence-holds", r.holds);
                let gadget =
                    build_nae_gadget(&inst, Some(r.p)).map_err(from_reduce_error)?;
                let special =
                    count_special_nae_orientations(&gadget, &opts).map_err(from_reduce_error)?;
                report.push_count("special-orientations", &special);
                report.push(
                    "special-matches-nae",
                    special == count_nae_assignments(&inst),
                );
            }
        },
        Command::Lemma1 { n, sweep } => match (n, sweep) {
            (Some(n), None) => {
                let r = lemma1_holds(*n)
                    .map_err(|e| CliError::input(e))?;
                report.push("n", n);
                report.push_count("product", &r.product);
                report.push_count("bound", &r.bound);
                report.push("holds", r.holds);
            }
            (None, Some(range)) => {
                let (lo, hi) = range
                    .split_once("..")
                    .and_then(|(a, b)| Some((a.parse::<u64>().ok()?, b.parse::<u64>().ok()?)))
                    .ok_or_else(|| {
                        CliError::input(format!("--sweep expects `lo..hi`, got {range:?}"))
                    })?;
                let mut all = true;
                let mut first_failure = None;
                for n in lo..=hi {
                    let r = lemma1_holds(n).map_err(CliError::input)?;
                    if !r.holds {
                        all = false;
                        first_failure.get_or_insert(n);
                    }
                }
                report.push("sweep", format!("{lo}..{hi}"));
                report.push("all-hold", all);
                if let Some(n) = first_failure {
                    report.push("first-failure", n);
                }
            }
            _ => {
                return Err(CliError::input(
                    "lemma1 requires exactly one of --n or --sweep",
                ))
            }
        },
        Command::Census { graph, p } => {
            let (g, bytes) = load_graph(graph)?;
            report.push_digest("input-digest", &bytes);
            let census = type_census(&g, *p, &opts).map_err(from_reduce_error)?;
            report.push("p", p);
            report.push_count("orbs-total", &census.total());
            report.push_count("special-total", &census.special_total());
            report.push("class-count", census.classes.len());
            report.push("nonspecial-divisible-by-p", census.non_special_divisible());
            for (ty, size) in &census.classes {
                report.push_count(&format!("class {ty}"), size);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let mut report = RunReport::new(&echo.join(" "));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build()
        .expect("thread pool");
    let result = pool.install(|| run(&cli, &mut report));
    match result {
        Ok(()) => {
            report.push_wall_clock(started.elapsed().as_secs_f64());
            print!("{}", report.render());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
