use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use simplicial::error::{Error, Result};
use simplicial::experiments::{self, Source};
use simplicial::io;
use simplicial::potential::rw_probabilities;
use simplicial::train::{train, Init, TrainConfig};
use simplicial::{classify, clique_census, enumerate_cliques, par, sbtm};

/// Node classification with clique-complex interactions.
#[derive(Parser)]
#[command(name = "simplicial", version, about)]
struct Cli {
    /// Worker threads; 0 picks automatically (falls back to SIMPLEX_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest clique order enumerated.
    #[arg(long, global = true, default_value_t = 5)]
    max_order: usize,

    /// Only print warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an SBTM graph: edges.txt, labels.txt and provenance.csv.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Clique counts per order as `k,total,intra,inter`.
    Census {
        #[arg(long)]
        edges: PathBuf,
        /// Optional label file for the intra/inter split.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-walk prior for a labelled graph.
    Rw(RunArgs),
    /// Train the simplicial objective from the RW prior or a given init.
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Initial distribution CSV (defaults to the RW prior).
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Truncation order of the objective (defaults to --max-order).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 0.4)]
        learning_rate: f64,
    },
    /// Run the configured experiment and write report CSVs.
    Experiment(ExperimentArgs),
    /// Run the configured parameter sweep.
    Sweep(ExperimentArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Fraction of each cluster whose labels are revealed.
    #[arg(long, default_value_t = 0.03)]
    prior_ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `[output] dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shift every configured seed by this amount.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("SIMPLEX_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("SIMPLEX_THREADS={v:?} is not a thread count"))),
        _ => Ok(0),
    }
}

fn generate(config: &Path, seed: u64, out: &Path, max_order: usize) -> Result<()> {
    let spec = io::read_spec(config)?;
    if spec.max_order() > max_order {
        warn!(
            "spec has B{} but --max-order is {max_order}; generating all orders",
            spec.max_order()
        );
    }
    let g = sbtm::generate(&spec, seed)?;
    io::write_edge_list(&out.join("edges.txt"), &g.graph)?;
    io::write_labels(&out.join("labels.txt"), &g.truth)?;
    io::write_text(&out.join("provenance.csv"), &io::format_provenance(&g.provenance))?;
    info!(
        "{} nodes, {} edges written to {}",
        g.graph.node_count(),
        g.graph.edge_count(),
        out.display()
    );
    Ok(())
}

fn census(edges: &Path, labels: Option<&Path>, out: Option<&Path>, max_order: usize) -> Result<()> {
    let (graph, truth) = match labels {
        Some(l) => {
            let d = io::load_dataset(edges, l)?;
            (d.graph, Some(d.labels))
        }
        None => (io::read_edge_list(edges)?.0, None),
    };
    let complex = enumerate_cliques(&graph, max_order);
    let c = clique_census(&complex, truth.as_deref());
    if c.truncated {
        warn!("cliques of order {max_order} exist; larger cliques are not counted");
    }
    let text = io::format_census(&c);
    match out {
        Some(p) => io::write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Prepared {
    bundle: experiments::DatasetBundle,
    prior: Vec<usize>,
    known: Vec<Option<usize>>,
    eval: Vec<usize>,
}

fn prepare(run: &RunArgs) -> Result<Prepared> {
    let bundle = io::load_dataset(&run.edges, &run.labels)?;
    let prior = experiments::sample_prior(&bundle.labels, bundle.label_count, run.prior_ratio, run.seed)?;
    let known = experiments::known_labels(&bundle.labels, &prior);
    let eval = (0..known.len()).filter(|&v| known[v].is_none()).collect();
    Ok(Prepared {
        bundle,
        prior,
        known,
        eval,
    })
}

fn write_prior(out: &Path, p: &Prepared) -> Result<()> {
    let text: String = p
        .prior
        .iter()
        .map(|v| format!("{v} {}\n", p.bundle.labels[*v]))
        .collect();
    io::write_text(&out.join("prior.txt"), &text)
}

fn rw(run: &RunArgs) -> Result<()> {
    let p = prepare(run)?;
    let out = rw_probabilities(&p.bundle.graph, &p.known, p.bundle.label_count)?;
    for w in &out.warnings {
        warn!("{w}");
    }
    io::write_distribution(&run.out.join("distribution.csv"), &out.distribution)?;
    write_prior(&run.out, &p)?;
    let acc = experiments::accuracy(&classify(&out.distribution), &p.bundle.labels, &p.eval)?;
    println!("RW accuracy {acc}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn train_cmd(
    run: &RunArgs,
    init: Option<&Path>,
    alpha: f64,
    order: usize,
    epochs: usize,
    learning_rate: f64,
    max_order: usize,
) -> Result<()> {
    let p = prepare(run)?;
    let l = p.bundle.label_count;
    let init_dist = match init {
        Some(path) => {
            let (d, warnings) = io::read_distribution(path)?;
            for w in warnings {
                warn!("{}: {w}", path.display());
            }
            d
        }
        None => {
            let out = rw_probabilities(&p.bundle.graph, &p.known, l)?;
            for w in &out.warnings {
                warn!("{w}");
            }
            out.distribution
        }
    };
    if init_dist.node_count() != p.bundle.graph.node_count() || init_dist.label_count() != l {
        return Err(Error::Input(format!(
            "initial distribution is {}×{}, graph needs {}×{l}",
            init_dist.node_count(),
            init_dist.label_count(),
            p.bundle.graph.node_count()
        )));
    }
    let complex = enumerate_cliques(&p.bundle.graph, max_order);
    let cfg = TrainConfig {
        alpha,
        order,
        epochs,
        learning_rate,
        seed: run.seed,
        ..TrainConfig::default()
    };
    let out = train(&complex, Init::Distribution(&init_dist), &p.known, l, &cfg)?;
    io::write_distribution(&run.out.join("distribution.csv"), &out.distribution)?;
    let traj: String = std::iter::once("epoch,objective\n".to_string())
        .chain(out.trajectory.iter().enumerate().map(|(e, v)| format!("{e},{v}\n")))
        .collect();
    io::write_text(&run.out.join("trajectory.csv"), &traj)?;
    write_prior(&run.out, &p)?;
    let before = experiments::accuracy(&classify(&init_dist), &p.bundle.labels, &p.eval)?;
    let after = experiments::accuracy(&classify(&out.distribution), &p.bundle.labels, &p.eval)?;
    println!("init accuracy {before}\nSI-{order} accuracy {after}");
    Ok(())
}

fn load_experiment(args: &ExperimentArgs, max_order: usize) -> Result<(io::ExperimentFile, PathBuf, String)> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::io(&args.config, e))?;
    let mut file = io::read_experiment(&args.config)?;
    // A non-default --max-order overrides the config.
    if max_order != simplicial::cliques::DEFAULT_MAX_ORDER {
        file.config.max_order = max_order;
    }
    for s in &mut file.config.seeds {
        *s += args.seed;
    }
    file.config.validate()?;
    let out = args
        .out
        .clone()
        .or_else(|| file.output_dir.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out or set [output] dir".into()))?;
    Ok((file, out, text))
}

fn experiment(args: &ExperimentArgs, max_order: usize) -> Result<()> {
    let (file, out, text) = load_experiment(args, max_order)?;
    if file.sweep.is_some() {
        warn!("config defines a sweep; `experiment` ignores it (use `sweep`)");
    }
    let report = experiments::run_experiment(&file.config)?;
    for w in &report.warnings {
        warn!("{w}");
    }
    io::write_report(&out, &report)?;
    io::write_text(&out.join("config.toml"), &text)?;
    if let Source::Sbtm { spec, .. } = &file.config.source {
        io::write_text(&out.join("spec.toml"), &io::format_spec(spec))?;
    }
    let top = file.config.top_order();
    for &a in &file.config.alpha_values {
        if let Some(g) = report.mean_gain(top, a) {
            info!("alpha {a}: mean SI-{top} gain over PI {:.4}%", 100.0 * g);
        }
    }
    Ok(())
}

fn sweep(args: &ExperimentArgs, max_order: usize) -> Result<()> {
    let (file, out, text) = load_experiment(args, max_order)?;
    let param = file
        .sweep
        .ok_or_else(|| Error::Config("config has no sweep (set [sweep] parameter)".into()))?;
    let points = experiments::run_sweep(&file.config, &param)?;
    io::write_sweep(&out, param.name(), &points)?;
    io::write_text(&out.join("config.toml"), &text)?;
    let top = file.config.top_order();
    for p in &points {
        for &a in &file.config.alpha_values {
            if let Some(g) = p.report.mean_gain(top, a) {
                info!("{}: SI-{top} gain {:.4}%", p.description, 100.0 * g);
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    par::init_threads(thread_count(cli.threads)?);
    if cli.max_order < 2 {
        return Err(Error::Config("--max-order must be at least 2".into()));
    }
    let m = cli.max_order;
    match &cli.command {
        Command::Generate { config, seed, out } => generate(config, *seed, out, m),
        Command::Census { edges, labels, out } => census(edges, labels.as_deref(), out.as_deref(), m),
        Command::Rw(r) => rw(r),
        Command::Train {
            run,
            init,
            alpha,
            order,
            epochs,
            learning_rate,
        } => train_cmd(
            run,
            init.as_deref(),
            *alpha,
            order.unwrap_or(m),
            *epochs,
            *learning_rate,
            m,
        ),
        Command::Experiment(a) => experiment(a, m),
        Command::Sweep(a) => sweep(a, m),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
