use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use motif2vec::pipeline::{
    eval_link_stage, eval_node_stage, split_link_stage, train_stage, transform_stage, walk_stage, WalkSource,
};
use motif2vec::{load_graph, run_pipeline, PipelineConfig, Result};

#[derive(Parser, Debug)]
#[command(name = "motif2vec", version, about = "Motif-graph random walks and skip-gram embeddings")]
struct Cli {
    /// Log filter, e.g. `warn`, `info`, `debug`.
    #[arg(long, global = true, default_value = "info")]
    log: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graph inspection.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Full pipeline: transform, walk, train, and the configured evaluation.
    Run(ConfigArgs),
    /// Enumerate motif instances and write motif adjacency exports.
    Transform(ConfigArgs),
    /// Generate and shuffle walks over the original and motif graphs.
    Walk {
        /// Views to walk: original, motifs, or all.
        #[arg(long, default_value = "all")]
        source: WalkSource,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Train embeddings on the walk corpus.
    Train(ConfigArgs),
    /// Node classification on an embedding file.
    EvalNode(ConfigArgs),
    /// Hide test links and write the split plus the pruned graph.
    SplitLink(ConfigArgs),
    /// Link prediction on an embedding file and a persisted split.
    EvalLink(ConfigArgs),
}

#[derive(Subcommand, Debug)]
enum GraphCommand {
    /// Node, edge, and per-type counts as tab-separated rows.
    Stats {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        nodes: PathBuf,
    },
}

macro_rules! config_flags {
    ($($field:ident => $help:literal),* $(,)?) => {
        /// A config file plus one override flag per config key.
        #[derive(Args, Debug, Default)]
        struct ConfigArgs {
            /// Config file of `key = value` lines; flags override it.
            #[arg(long)]
            config: Option<PathBuf>,
            $(
                #[arg(long, value_name = "VALUE", help = $help)]
                $field: Option<String>,
            )*
        }

        impl ConfigArgs {
            fn overrides(&self) -> Vec<(&'static str, &str)> {
                let mut v = Vec::new();
                $(
                    if let Some(x) = &self.$field {
                        v.push((stringify!($field), x.as_str()));
                    }
                )*
                v
            }

            #[cfg(test)]
            fn keys() -> Vec<&'static str> {
                vec![$(stringify!($field)),*]
            }
        }
    };
}

config_flags! {
    edges => "Edge file: src, dst, edge type per line",
    nodes => "Node file: id, node type per line",
    motifs => "Comma-separated motif files",
    adjacency_mode => "weighted or binary",
    walks_per_node => "Walks started from every node (r)",
    walk_length => "Maximum walk length (l)",
    p => "Return parameter",
    q => "In-out parameter",
    alias_budget => "Entry budget for second-order alias tables",
    dim => "Embedding dimension (d)",
    window => "Context window (c)",
    negatives => "Negative samples per pair",
    lr => "Initial learning rate",
    epochs => "Training epochs",
    min_count => "Minimum token count kept in the vocabulary",
    shrink_window => "Sample a smaller window per center (true/false)",
    subsample => "Frequent-token subsampling threshold, or none",
    task => "Evaluation after training: none, node, or link",
    labels => "Label file: node, class per line",
    edge_type => "Edge type held out for link prediction",
    ratio => "Training fraction of labels or links",
    threshold => "Cosine threshold for predicting a link",
    tune_threshold => "Pick the threshold on a validation slice (true/false)",
    runs => "Evaluation runs averaged",
    embeddings => "Embedding file for evaluation (default: <out_dir>/embeddings.txt)",
    link_split => "Link split file (default: <out_dir>/link_split.tsv)",
    seed => "Global seed",
    workers => "Worker threads",
    out_dir => "Output directory",
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let resolve = || -> Result<PipelineConfig> {
            let mut cfg = match &self.config {
                Some(path) => PipelineConfig::from_file(path)?,
                None => PipelineConfig::default(),
            };
            for (key, value) in self.overrides() {
                cfg.set(key, value)?;
            }
            Ok(cfg)
        };
        resolve().map_err(|e| e.in_stage("config"))
    }
}

fn graph_stats(edges: &Path, nodes: &Path) -> Result<()> {
    let (g, report) = load_graph(edges, nodes)?;
    if report.duplicate_edges > 0 {
        log::warn!("{} duplicate edge line(s) ignored", report.duplicate_edges);
    }
    print!("{}", g.stats());
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Graph {
            command: GraphCommand::Stats { edges, nodes },
        } => graph_stats(&edges, &nodes),
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let out = run_pipeline(&cfg)?;
            if let Some(m) = &out.metrics {
                print!("{}", m.to_human());
            }
            println!(
                "{} embeddings of dimension {} in {}",
                out.embeddings.len(),
                out.embeddings.dim(),
                out.out_dir.display()
            );
            Ok(())
        }
        Command::Transform(args) => {
            let adjs = transform_stage(&args.resolve()?)?;
            for a in &adjs {
                println!("{}\t{} node pairs\t{} isolated nodes", a.name(), a.entries().len(), a.isolated_nodes());
            }
            Ok(())
        }
        Command::Walk { source, config } => {
            let corpus = walk_stage(&config.resolve()?, source)?;
            println!("{} walks, {} tokens", corpus.len(), corpus.num_tokens());
            Ok(())
        }
        Command::Train(args) => {
            let out = train_stage(&args.resolve()?)?;
            for e in &out.epochs {
                println!("{e}");
            }
            Ok(())
        }
        Command::EvalNode(args) => {
            print!("{}", eval_node_stage(&args.resolve()?)?.to_human());
            Ok(())
        }
        Command::SplitLink(args) => {
            let split = split_link_stage(&args.resolve()?)?;
            println!(
                "{} train, {} test, {} fake `{}` links",
                split.train_edges.len(),
                split.test_edges.len(),
                split.fake_edges.len(),
                split.edge_type
            );
            Ok(())
        }
        Command::EvalLink(args) => {
            print!("{}", eval_link_stage(&args.resolve()?)?.to_human());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log).format_timestamp(None).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
