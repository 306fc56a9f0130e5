use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use robie::commands::{self, Command, Invocation};
use robie::{CliError, PipelineConfig};

#[derive(Parser)]
#[command(name = "robie", version, about = "Syntactic distance, argument restoration and tuple scoring")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Prune each corpus parse: `id<TAB>pruned`.
    Prune,
    /// Pairwise syntactic distance matrix of the corpus.
    Distance,
    /// K-medoids over the corpus, with train-to-medoid distances.
    Cluster,
    /// Retrieve source parses and sample target parses per sentence.
    SelectParses,
    /// Restore source tuples inside paraphrase records.
    Restore,
    /// Sample denoising masks over restored argument tokens.
    Mask,
    /// Score predictions against gold tuples.
    Score,
    /// Word frequencies of the corpus against the training corpus.
    Report,
}

#[derive(Args)]
struct Opts {
    /// TOML file with pipeline settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Target parses sampled per sentence.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Source parses retrieved per sentence.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    height: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    mask_rate: Option<f64>,
    #[arg(long, global = true)]
    clusters: Option<usize>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    train_sample: Option<usize>,
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    train: Option<PathBuf>,
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    #[arg(long, global = true)]
    pairs: Option<PathBuf>,
    #[arg(long, global = true)]
    gold: Option<PathBuf>,
    #[arg(long, global = true)]
    predictions: Option<PathBuf>,
    #[arg(long, global = true)]
    lemmas: Option<PathBuf>,
    #[arg(long, global = true)]
    replies: Option<PathBuf>,
    /// Where restore writes predicate requests.
    #[arg(long, global = true)]
    requests: Option<PathBuf>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Cmd {
    fn command(self) -> Command {
        match self {
            Cmd::Prune => Command::Prune,
            Cmd::Distance => Command::Distance,
            Cmd::Cluster => Command::Cluster,
            Cmd::SelectParses => Command::SelectParses,
            Cmd::Restore => Command::Restore,
            Cmd::Mask => Command::Mask,
            Cmd::Score => Command::Score,
            Cmd::Report => Command::Report,
        }
    }
}

fn invocation(cli: Cli) -> Result<Invocation, CliError> {
    let o = cli.opts;
    let mut config = match &o.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    macro_rules! set {
        ($($field:ident).+ = $value:expr) => {
            if let Some(v) = $value {
                config.$($field).+ = v;
            }
        };
    }
    set!(seed = o.seed);
    set!(tau = o.tau);
    set!(k = o.k);
    set!(m = o.m);
    set!(height = o.height);
    set!(alpha = o.alpha);
    set!(mask_rate = o.mask_rate);
    set!(clusters = o.clusters);
    set!(max_iter = o.max_iter);
    set!(train_sample = o.train_sample);
    let p = &mut config.paths;
    for (slot, flag) in [
        (&mut p.corpus, o.corpus),
        (&mut p.train, o.train),
        (&mut p.embeddings, o.embeddings),
        (&mut p.pairs, o.pairs),
        (&mut p.gold, o.gold),
        (&mut p.predictions, o.predictions),
        (&mut p.lemmas, o.lemmas),
        (&mut p.replies, o.replies),
    ] {
        if flag.is_some() {
            *slot = flag;
        }
    }
    let command = cli.command.command();
    let out = o
        .out
        .ok_or_else(|| CliError::invalid(format!("{} needs --out", command.name())))?;
    Ok(Invocation {
        command,
        config,
        out,
        requests: o.requests,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match invocation(cli).and_then(|inv| commands::run(&inv)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("robie: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
