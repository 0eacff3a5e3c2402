//! Command-line front end wiring the toolkit end to end: benchmark
//! generation, base partitioning, feature extraction, cover optimization,
//! scoring, and co-occurrence analysis. Every command is seeded and writes a
//! key=value manifest sufficient to reproduce its outputs bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use encod::{
    build_ensemble, cooccurrence_curve, curve_table, evaluate, extract_features, generate_planted,
    ingest_partition, ingest_vertex_features, parse_cover, partition, random_ordering, run_traced,
    BaseAlgorithm, BaseEnsemble, EncodConfig, EncodError, FeatureMatrix, Graph, InvolvementKind,
    PlantedConfig, SimilarityKind,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "encod",
    version,
    about = "Overlapping community detection from ensembles of disjoint partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: ensemble, features, optimizer, cover
    Pipeline(PipelineArgs),
    /// Generate a planted benchmark graph with overlapping ground truth
    Gen(GenArgs),
    /// Run one base partitioner on one seeded vertex ordering
    Base(BaseArgs),
    /// Build the base ensemble and write per-vertex features
    Features(FeaturesArgs),
    /// Optimize an overlapping cover from a feature file
    Run(RunArgs),
    /// Score a detected cover against a reference cover
    Eval(EvalArgs),
    /// Tabulate edge and co-membership probability against shared base
    /// community fraction
    Analyze(AnalyzeArgs),
    /// Optimize from explicit vertex features instead of ensemble features
    Mencod(RunArgs),
}

fn parse_unit_open(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside the open interval (0, 1)"))
    }
}

fn parse_unit_closed(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

#[derive(Args)]
struct EnsembleOpts {
    /// Comma-separated base algorithms (louvain, lp, greedy), or `none` to
    /// build the ensemble purely from ingested partition files
    #[arg(long, value_delimiter = ',', default_value = "louvain,lp,greedy")]
    algos: Vec<String>,
    /// Vertex orderings per base algorithm
    #[arg(short = 'K', long = "k", default_value_t = 8)]
    k: usize,
    /// Involvement function (closeness, permanence, binary)
    #[arg(long, default_value = "permanence")]
    inv: String,
    /// Extra partition files from external tools (`<label> <community-id>`
    /// lines), appended to the ensemble
    #[arg(long, value_delimiter = ',')]
    partitions: Vec<PathBuf>,
}

#[derive(Args)]
struct OptimizerOpts {
    /// Global community threshold in (0, 1)
    #[arg(long = "tau-l", default_value_t = 0.20, value_parser = parse_unit_open)]
    tau_l: f64,
    /// Vertex similarity (cosine, pearson)
    #[arg(long, default_value = "cosine")]
    sim: String,
    /// Iterations without improvement before stopping (default: vertex count)
    #[arg(long)]
    patience: Option<usize>,
    /// Hard cap on optimizer iterations
    #[arg(long = "max-iters", default_value_t = 2000)]
    max_iterations: usize,
}

#[derive(Args)]
struct PipelineArgs {
    /// Edge-list file
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    ensemble: EnsembleOpts,
    #[command(flatten)]
    optimizer: OptimizerOpts,
    /// Seed for orderings and the optimizer
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Cover output path
    #[arg(short, long)]
    output: PathBuf,
    /// Optional sidecar file with per-community thresholds
    #[arg(long = "thresholds-out")]
    thresholds_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Vertex count
    #[arg(long)]
    n: usize,
    /// Planted community count
    #[arg(short = 'c', long)]
    communities: usize,
    /// Community capacity
    #[arg(short = 's', long)]
    size: usize,
    /// Fraction of vertices joining a second community
    #[arg(long, default_value_t = 0.0, value_parser = parse_unit_closed)]
    overlap: f64,
    /// Intra-community edge probability
    #[arg(long = "p-in", value_parser = parse_unit_closed)]
    p_in: f64,
    /// Inter-community edge probability
    #[arg(long = "p-out", value_parser = parse_unit_closed)]
    p_out: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Edge-list output path
    #[arg(short, long)]
    output: PathBuf,
    /// Ground-truth cover output path
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct BaseArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Base algorithm (louvain, lp, greedy)
    #[arg(long)]
    algo: String,
    /// Ordering seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Partition output path (`<label> <community-id>` lines)
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    ensemble: EnsembleOpts,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Feature output path (`<label> <v1> ... <vd>` lines)
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Feature file (`<label> <v1> ... <vd>` lines)
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    optimizer: OptimizerOpts,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long = "thresholds-out")]
    thresholds_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Detected cover file
    #[arg(long)]
    detected: PathBuf,
    /// Reference cover file
    #[arg(long)]
    reference: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Reference cover file
    #[arg(long)]
    reference: PathBuf,
    #[command(flatten)]
    ensemble: EnsembleOpts,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Table output path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Base(args) => cmd_base(args),
        Command::Features(args) => cmd_features(args),
        Command::Run(args) => cmd_run(args, "run"),
        Command::Eval(args) => cmd_eval(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Mencod(args) => cmd_run(args, "mencod"),
    };
    match result {
        Ok(()) => {
            eprintln!("completed in {:.3}s", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn load_graph(path: &Path) -> encod::Result<Graph> {
    Graph::from_edge_list_str(&fs::read_to_string(path)?)
}

fn parse_algorithms(names: &[String]) -> encod::Result<Vec<BaseAlgorithm>> {
    if names.is_empty() {
        return Err(EncodError::Config("at least one base algorithm is required".into()));
    }
    names.iter().map(|s| BaseAlgorithm::from_str(s)).collect()
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    output.with_file_name(name)
}

fn write_manifest(output: &Path, entries: &[(&str, String)]) -> encod::Result<()> {
    let mut text = String::new();
    for (key, value) in entries {
        text.push_str(&format!("{key}={value}\n"));
    }
    fs::write(manifest_path(output), text)?;
    Ok(())
}

fn optimizer_config(opts: &OptimizerOpts, seed: u64) -> encod::Result<EncodConfig> {
    let config = EncodConfig {
        tau_l: opts.tau_l,
        similarity: SimilarityKind::from_str(&opts.sim)?,
        patience: opts.patience,
        max_iterations: opts.max_iterations,
        seed,
    };
    config.validate()?;
    Ok(config)
}

fn build_base_ensemble(
    graph: &Graph,
    opts: &EnsembleOpts,
    seed: u64,
) -> encod::Result<(BaseEnsemble, Vec<BaseAlgorithm>)> {
    if opts.k == 0 {
        return Err(EncodError::Config("K must be at least 1".into()));
    }
    let algorithms = if opts.algos == ["none"] {
        Vec::new()
    } else {
        parse_algorithms(&opts.algos)?
    };
    let mut partitions = if algorithms.is_empty() {
        Vec::new()
    } else {
        build_ensemble(graph, &algorithms, opts.k, seed)
            .partitions()
            .to_vec()
    };
    for path in &opts.partitions {
        partitions.push(ingest_partition(&fs::read_to_string(path)?, graph)?);
    }
    if partitions.is_empty() {
        return Err(EncodError::Config(
            "the ensemble is empty: pass base algorithms or partition files".into(),
        ));
    }
    Ok((BaseEnsemble::new(partitions), algorithms))
}

fn build_features(
    graph: &Graph,
    opts: &EnsembleOpts,
    seed: u64,
) -> encod::Result<(FeatureMatrix, Vec<BaseAlgorithm>)> {
    let (ensemble, algorithms) = build_base_ensemble(graph, opts, seed)?;
    let kind = InvolvementKind::from_str(&opts.inv)?;
    let features = extract_features(&ensemble, graph, kind)?;
    Ok((features, algorithms))
}

fn cmd_pipeline(args: PipelineArgs) -> encod::Result<()> {
    let graph = load_graph(&args.graph)?;
    let config = optimizer_config(&args.optimizer, args.seed)?;
    let (features, algorithms) = build_features(&graph, &args.ensemble, args.seed)?;
    let (cover, trace) = run_traced(&graph, &features, &config)?;

    fs::write(&args.output, cover.to_cover_string(&graph))?;
    if let Some(path) = &args.thresholds_out {
        fs::write(path, cover.to_thresholds_string())?;
    }
    let algo_names: Vec<&str> = algorithms.iter().map(|a| a.name()).collect();
    write_manifest(
        &args.output,
        &[
            ("command", "pipeline".into()),
            ("version", VERSION.into()),
            ("graph", args.graph.display().to_string()),
            ("output", args.output.display().to_string()),
            ("algorithms", algo_names.join(",")),
            ("k", args.ensemble.k.to_string()),
            ("involvement", args.ensemble.inv.clone()),
            ("similarity", config.similarity.name().into()),
            ("tau_l", config.tau_l.to_string()),
            ("patience", config.patience.unwrap_or(graph.vertex_count()).to_string()),
            ("max_iterations", config.max_iterations.to_string()),
            ("seed", args.seed.to_string()),
            ("communities", cover.community_count().to_string()),
            ("iterations", trace.iterations.to_string()),
            ("final_log_likelihood", trace.final_log_likelihood.to_string()),
        ],
    )
}

fn cmd_gen(args: GenArgs) -> encod::Result<()> {
    let config = PlantedConfig {
        n: args.n,
        communities: args.communities,
        community_size: args.size,
        overlap_frac: args.overlap,
        p_in: args.p_in,
        p_out: args.p_out,
        seed: args.seed,
    };
    let (graph, truth) = generate_planted(&config)?;
    fs::write(&args.output, graph.to_edge_list_string())?;
    fs::write(&args.truth, truth.to_cover_string(&graph))?;
    write_manifest(
        &args.output,
        &[
            ("command", "gen".into()),
            ("version", VERSION.into()),
            ("output", args.output.display().to_string()),
            ("truth", args.truth.display().to_string()),
            ("n", args.n.to_string()),
            ("communities", args.communities.to_string()),
            ("community_size", args.size.to_string()),
            ("overlap_frac", args.overlap.to_string()),
            ("p_in", args.p_in.to_string()),
            ("p_out", args.p_out.to_string()),
            ("seed", args.seed.to_string()),
            ("edges", graph.edge_count().to_string()),
        ],
    )
}

fn cmd_base(args: BaseArgs) -> encod::Result<()> {
    let graph = load_graph(&args.graph)?;
    let algorithm = BaseAlgorithm::from_str(&args.algo)?;
    let ordering = random_ordering(&graph, args.seed);
    let part = partition(&graph, algorithm, &ordering);
    fs::write(&args.output, part.to_partition_string(&graph))?;
    write_manifest(
        &args.output,
        &[
            ("command", "base".into()),
            ("version", VERSION.into()),
            ("graph", args.graph.display().to_string()),
            ("output", args.output.display().to_string()),
            ("algorithm", algorithm.name().into()),
            ("seed", args.seed.to_string()),
            ("communities", part.community_count().to_string()),
        ],
    )
}

fn cmd_features(args: FeaturesArgs) -> encod::Result<()> {
    let graph = load_graph(&args.graph)?;
    let (features, algorithms) = build_features(&graph, &args.ensemble, args.seed)?;
    fs::write(&args.output, features.to_feature_string(&graph))?;
    let algo_names: Vec<&str> = algorithms.iter().map(|a| a.name()).collect();
    write_manifest(
        &args.output,
        &[
            ("command", "features".into()),
            ("version", VERSION.into()),
            ("graph", args.graph.display().to_string()),
            ("output", args.output.display().to_string()),
            ("algorithms", algo_names.join(",")),
            ("k", args.ensemble.k.to_string()),
            ("involvement", args.ensemble.inv.clone()),
            ("seed", args.seed.to_string()),
            ("dimension", features.dim().to_string()),
        ],
    )
}

fn cmd_run(args: RunArgs, command: &str) -> encod::Result<()> {
    let graph = load_graph(&args.graph)?;
    let features = ingest_vertex_features(&fs::read_to_string(&args.features)?, &graph)?;
    let config = optimizer_config(&args.optimizer, args.seed)?;
    let (cover, trace) = run_traced(&graph, &features, &config)?;
    fs::write(&args.output, cover.to_cover_string(&graph))?;
    if let Some(path) = &args.thresholds_out {
        fs::write(path, cover.to_thresholds_string())?;
    }
    write_manifest(
        &args.output,
        &[
            ("command", command.into()),
            ("version", VERSION.into()),
            ("graph", args.graph.display().to_string()),
            ("features", args.features.display().to_string()),
            ("output", args.output.display().to_string()),
            ("similarity", config.similarity.name().into()),
            ("tau_l", config.tau_l.to_string()),
            ("patience", config.patience.unwrap_or(graph.vertex_count()).to_string()),
            ("max_iterations", config.max_iterations.to_string()),
            ("seed", args.seed.to_string()),
            ("communities", cover.community_count().to_string()),
            ("iterations", trace.iterations.to_string()),
            ("final_log_likelihood", trace.final_log_likelihood.to_string()),
        ],
    )
}

fn read_cover_warned(path: &Path, graph: &Graph) -> encod::Result<encod::OverlapCover> {
    let (cover, repaired) = parse_cover(&fs::read_to_string(path)?, graph)?;
    for label in &repaired {
        eprintln!(
            "warning: vertex {label} missing from {}, added as a singleton",
            path.display()
        );
    }
    Ok(cover)
}

fn cmd_eval(args: EvalArgs) -> encod::Result<()> {
    let graph = load_graph(&args.graph)?;
    let detected = read_cover_warned(&args.detected, &graph)?;
    let reference = read_cover_warned(&args.reference, &graph)?;
    let report = evaluate(&detected, &reference, graph.vertex_count())?;
    println!(
        "onmi={:.6} omega={:.6} fscore={:.6}",
        report.onmi, report.omega, report.fscore
    );
    println!("onmi={}", report.onmi);
    println!("omega={}", report.omega);
    println!("fscore={}", report.fscore);
    println!("detected_communities={}", report.detected_communities);
    println!("reference_communities={}", report.reference_communities);
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> encod::Result<()> {
    let graph = load_graph(&args.graph)?;
    let reference = read_cover_warned(&args.reference, &graph)?;
    let (ensemble, _) = build_base_ensemble(&graph, &args.ensemble, args.seed)?;
    let bins = cooccurrence_curve(&graph, &ensemble, &reference);
    let table = curve_table(&bins);
    match &args.output {
        Some(path) => fs::write(path, table)?,
        None => print!("{table}"),
    }
    Ok(())
}
