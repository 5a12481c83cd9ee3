use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use noisycd::adversary::AdversaryStrategy;
use noisycd::detect::{self, SearchMode};
use noisycd::game::{Game, GameConfig, Labeling};
use noisycd::graph::{
    check_delta_excellent, check_delta_good, gen_named, gen_random_regular, ExcellentMode, GoodMode, Graph, NamedGraph,
};
use noisycd::harness::{self, ExperimentConfig};
use noisycd::sizes;

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "noisycd", version, about = "Fault detection with noisy answers on expander graphs")]
struct Cli {
    /// Root seed (overrides the config file seed for `experiment`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when omitted unless noted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    RandomRegular,
    Complete,
    Cycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Good,
    Excellent,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckMethod {
    Exhaustive,
    Sampled,
    Spectral,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryKind {
    SymmetricNoise,
    AlwaysLie,
}

#[derive(Clone, Copy, ValueEnum)]
enum Detector {
    NeighborMajority,
    MaxConsistency,
    RobustPartition,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph as an edge list.
    GenGraph {
        #[arg(long, value_enum, default_value = "random-regular")]
        kind: GraphKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Check δ-good or δ-excellent expansion of an edge-list graph.
    CheckExpansion {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value = "good")]
        property: Property,
        #[arg(long, value_enum, default_value = "exhaustive")]
        method: CheckMethod,
        /// Random candidates per clause for `sampled`.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Play one game: amplify every edge, run a detector, report metrics.
    /// `--out` receives the transcript.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "symmetric-noise")]
        adversary: AdversaryKind,
        #[arg(long, value_enum, default_value = "neighbor-majority")]
        detector: Detector,
        /// Needed by `robust-partition`.
        #[arg(long)]
        delta: Option<f64>,
        /// Odd repetition count; computed from the detector when omitted.
        #[arg(long)]
        repeats: Option<usize>,
        /// Withhold `t` from the transcript header.
        #[arg(long)]
        hide_t: bool,
        /// Also write the accusation graph here.
        #[arg(long)]
        accusations: Option<PathBuf>,
    },
    /// Run a TOML-configured experiment. Results go to `--out`, else the
    /// config's `output`, else `results.jsonl`; a CSV copy is written beside.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Aggregate a results file into per-group success rates.
    Summarize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Query-budget vs success-rate columns from a results file.
    PlotData {
        #[arg(long)]
        input: PathBuf,
    },
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let config = e.chain().any(|c| c.downcast_ref::<noisycd::Error>().is_some_and(noisycd::Error::is_config));
        if config {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

impl From<noisycd::Error> for Failure {
    fn from(e: noisycd::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn config_failure(msg: impl std::fmt::Display) -> Failure {
    Failure::Config(anyhow!("{msg}"))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| config_failure(format!("cannot read {}: {e}", path.display())))?;
    Ok(Graph::parse_edge_list(&text)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(config_failure("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| Failure::Runtime(e.into()))?;
    }
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.command {
        Command::GenGraph { kind, n, d } => {
            let g = match kind {
                GraphKind::RandomRegular => {
                    let d = d.ok_or_else(|| config_failure("random-regular needs --d"))?;
                    gen_random_regular(n, d, seed)?
                }
                GraphKind::Complete => gen_named(NamedGraph::Complete, n)?,
                GraphKind::Cycle => gen_named(NamedGraph::Cycle, n)?,
            };
            emit(out, &g.to_edge_list())?;
        }
        Command::CheckExpansion { graph, delta, property, method, samples, tol } => {
            let g = load_graph(&graph)?;
            let verdict = match (property, method) {
                (Property::Good, CheckMethod::Exhaustive) => check_delta_good(&g, delta, GoodMode::Exhaustive)?,
                (Property::Good, CheckMethod::Sampled) => {
                    check_delta_good(&g, delta, GoodMode::Sampled { k: samples, seed })?
                }
                (Property::Excellent, CheckMethod::Exhaustive) => {
                    check_delta_excellent(&g, delta, ExcellentMode::Exhaustive)?
                }
                (Property::Excellent, CheckMethod::Spectral) => {
                    check_delta_excellent(&g, delta, ExcellentMode::SpectralSufficient { tol })?
                }
                (Property::Good, CheckMethod::Spectral) => {
                    return Err(config_failure("the spectral method applies to --property excellent"))
                }
                (Property::Excellent, CheckMethod::Sampled) => {
                    return Err(config_failure("the sampled method applies to --property good"))
                }
            };
            emit(out, &(serde_json::to_string_pretty(&verdict).map_err(anyhow::Error::from)? + "\n"))?;
        }
        Command::Simulate { graph, t, epsilon, adversary, detector, delta, repeats, hide_t, accusations } => {
            let g = Arc::new(load_graph(&graph)?);
            let n = g.n();
            let adversary = match adversary {
                AdversaryKind::SymmetricNoise => AdversaryStrategy::SymmetricNoise,
                AdversaryKind::AlwaysLie => AdversaryStrategy::AlwaysLie,
            };
            let mut config = GameConfig::new(g.clone(), t, epsilon, adversary, seed);
            config.disclose_t = !hide_t;
            let mut game = Game::new(config)?;
            let r = match (repeats, detector) {
                (Some(r), _) => r,
                (None, Detector::RobustPartition) => {
                    let delta = delta.ok_or_else(|| config_failure("robust-partition needs --delta"))?;
                    detect::choose_repeats(epsilon, detect::robust_target_error(delta, g.d_max()))?
                }
                (None, _) => detect::choose_repeats(epsilon, 1.0 / (n * n) as f64)?,
            };
            let acc = detect::amplify(&mut game, r)?;
            let estimate = match detector {
                Detector::NeighborMajority => detect::neighbor_majority(&acc),
                Detector::MaxConsistency => detect::max_consistency_labeling(&acc, t)?.swap_remove(0),
                Detector::RobustPartition => {
                    let delta = delta.ok_or_else(|| config_failure("robust-partition needs --delta"))?;
                    let mode = if n <= detect::EXHAUSTIVE_PARTITION_MAX_N {
                        SearchMode::Exhaustive
                    } else {
                        SearchMode::LocalSearch { budget: None, seed }
                    };
                    match detect::robust_majority_partition(&acc, delta, mode)? {
                        Some(c) => c.labeling(n),
                        None => Labeling::from_truthful_set(n, &[]),
                    }
                }
            };
            if let Some(p) = out {
                emit(Some(p), &game.transcript().to_text())?;
            }
            if let Some(p) = accusations {
                emit(Some(&p), &acc.to_text())?;
            }
            let metrics = harness::evaluate_estimate(game.truth(), &estimate, delta, game.budget_used())?;
            let report = serde_json::json!({
                "repeats": r,
                "metrics": metrics,
                "threshold_tenth": sizes::tenth(n),
            });
            println!("{report}");
        }
        Command::Experiment { config } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let path = out.map(Path::to_path_buf).or_else(|| cfg.output.clone()).unwrap_or_else(|| "results.jsonl".into());
            let rows = harness::run_experiment(&cfg)?;
            let csv = harness::write_results(&rows, &path)?;
            eprintln!("wrote {} rows to {} and {}", rows.len(), path.display(), csv.display());
        }
        Command::Summarize { input } => {
            let rows = harness::read_rows(&input)?;
            let summary = harness::summarize(&rows)?;
            emit(out, &(serde_json::to_string_pretty(&summary).map_err(anyhow::Error::from)? + "\n"))?;
        }
        Command::PlotData { input } => {
            let rows = harness::read_rows(&input)?;
            let points = harness::plot_points(&harness::summarize(&rows)?);
            emit(out, &harness::plot_csv(&points)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
