use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iffair::experiment::{
    cmd_ingest, cmd_report, cmd_run, cmd_sweep, DatasetSource, ExperimentConfig, RunVariant,
};
use iffair::metrics::{FairnessMetric, MetricReport, UtilityMetric};
use iffair::model::{ModelKind, TrainConfig};
use iffair::reweight::{EvalSplit, PotentialScope};
use iffair::synth::{write_synthetic, SyntheticSpec};
use iffair::Error;

/// Influence-based sample reweighting for fair binary classification.
#[derive(Parser, Debug)]
#[command(name = "iffair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode a raw CSV and write the numeric table.
    Ingest(IngestArgs),
    /// Run one experiment and write its run directory.
    Run(ExperimentArgs),
    /// Sweep lambda_f for the diverse variant at a fixed lambda_u.
    Sweep(SweepArgs),
    /// Merge run directories into a comparison CSV.
    Report(ReportArgs),
    /// Write a synthetic biased dataset (data.csv + schema.json).
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Builtin adapter (adult, compas, german); omit when --schema is given.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Logistic,
    Mlp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Vanilla,
    Uniform,
    Diverse,
    Suppression,
    IpwS,
    IpwSy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UtilityArg {
    Acc,
    F1,
    Auc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScopeArg {
    Diverse,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalArg {
    Train,
    Holdout,
}

/// Flags override the config file, which overrides built-in defaults.
#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// adult, compas, german, or synthetic.
    #[arg(long)]
    dataset: Option<String>,
    /// Raw data file for builtin or schema-described datasets.
    #[arg(long)]
    data: Option<PathBuf>,
    /// JSON dataset schema (selects a custom CSV dataset).
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    delimiter: Option<char>,
    /// Synthetic label-flip rate for the unprivileged group.
    #[arg(long)]
    beta: Option<f64>,
    /// Synthetic sample count.
    #[arg(long)]
    n: Option<usize>,
    /// Synthetic feature count.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long, value_enum)]
    utility_metric: Option<UtilityArg>,
    #[arg(long, value_enum)]
    eval_split: Option<EvalArg>,
    #[arg(long)]
    lambda_f: Option<f64>,
    #[arg(long)]
    lambda_u: Option<f64>,
    #[arg(long, value_enum)]
    potential_scope: Option<ScopeArg>,
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Hessian damping.
    #[arg(long)]
    damping: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (must not exist).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Comma-separated lambda_f values.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
    lambda_f_grid: Vec<f64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Run directories to compare.
    #[arg(required = true)]
    runs: Vec<PathBuf>,
    /// Extra rows: CSV with method, delta_dp, delta_fpr, delta_eodds,
    /// delta_err, acc, f1, auc.
    #[arg(long)]
    external: Option<PathBuf>,
    #[arg(long, default_value = "report.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    separation: f64,
    #[arg(long)]
    out: PathBuf,
}

fn resolve_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    apply_dataset_flags(&mut cfg, args)?;
    if let Some(m) = args.model {
        cfg.model = match m {
            ModelArg::Logistic => ModelKind::Logistic,
            ModelArg::Mlp => ModelKind::Mlp,
        };
    }
    if args.epochs.is_some() || args.learning_rate.is_some() || args.l2.is_some() {
        let mut t: TrainConfig = cfg.train_config();
        if let Some(v) = args.epochs {
            t.epochs = v;
        }
        if let Some(v) = args.learning_rate {
            t.learning_rate = v;
        }
        if let Some(v) = args.l2 {
            t.l2_strength = v;
        }
        cfg.train = Some(t);
    }
    if let Some(v) = args.variant {
        cfg.variant = match v {
            VariantArg::Vanilla => RunVariant::Vanilla,
            VariantArg::Uniform => RunVariant::Uniform,
            VariantArg::Diverse => RunVariant::Diverse,
            VariantArg::Suppression => RunVariant::Suppression,
            VariantArg::IpwS => RunVariant::IpwS,
            VariantArg::IpwSy => RunVariant::IpwSy,
        };
    }
    if let Some(v) = args.tau {
        cfg.uniform.tau = v;
    }
    if let Some(v) = args.grid_points {
        cfg.uniform.grid_points = v;
    }
    if let Some(v) = args.utility_metric {
        cfg.uniform.utility_metric = match v {
            UtilityArg::Acc => UtilityMetric::Acc,
            UtilityArg::F1 => UtilityMetric::F1,
            UtilityArg::Auc => UtilityMetric::Auc,
        };
    }
    if let Some(v) = args.eval_split {
        cfg.uniform.eval_split = match v {
            EvalArg::Train => EvalSplit::Train,
            EvalArg::Holdout => EvalSplit::Holdout,
        };
    }
    if let Some(v) = args.lambda_f {
        cfg.diverse.lambda_f = v;
    }
    if let Some(v) = args.lambda_u {
        cfg.diverse.lambda_u = v;
    }
    if let Some(v) = args.potential_scope {
        cfg.diverse.potential_scope = match v {
            ScopeArg::Diverse => PotentialScope::Diverse,
            ScopeArg::All => PotentialScope::All,
        };
    }
    if let Some(v) = args.test_fraction {
        cfg.test_fraction = v;
    }
    if let Some(v) = args.damping {
        cfg.damping = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.out {
        cfg.output_dir = v.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_dataset_flags(cfg: &mut ExperimentConfig, args: &ExperimentArgs) -> Result<(), Error> {
    let delimiter = args.delimiter.unwrap_or(',');
    if let Some(schema) = &args.schema {
        let data = args
            .data
            .clone()
            .ok_or_else(|| Error::InvalidConfig("--schema requires --data".into()))?;
        cfg.dataset = DatasetSource::Csv {
            data,
            schema: schema.clone(),
            delimiter,
        };
        return Ok(());
    }
    match args.dataset.as_deref() {
        Some("synthetic") => {}
        Some(name) => {
            let path = args
                .data
                .clone()
                .ok_or_else(|| Error::InvalidConfig(format!("--dataset {name} requires --data")))?;
            cfg.dataset = DatasetSource::Builtin {
                name: name.to_string(),
                path,
                delimiter,
            };
            return Ok(());
        }
        None if args.beta.is_none() && args.n.is_none() && args.d.is_none() => return Ok(()),
        None => {}
    }
    let (mut beta, mut n, mut d, mut separation) = match DatasetSource::default() {
        DatasetSource::Synthetic {
            beta,
            n,
            d,
            separation,
        } => (beta, n, d, separation),
        _ => unreachable!("default dataset is synthetic"),
    };
    if let DatasetSource::Synthetic {
        beta: b,
        n: nn,
        d: dd,
        separation: s,
    } = &cfg.dataset
    {
        (beta, n, d, separation) = (*b, *nn, *dd, *s);
    }
    cfg.dataset = DatasetSource::Synthetic {
        beta: args.beta.unwrap_or(beta),
        n: args.n.unwrap_or(n),
        d: args.d.unwrap_or(d),
        separation,
    };
    Ok(())
}

fn summary_line(label: &str, r: &MetricReport) -> String {
    let mut parts: Vec<String> = FairnessMetric::ALL
        .iter()
        .map(|m| format!("{}={:.4}", m.column(), m.of(r)))
        .collect();
    parts.extend(
        UtilityMetric::ALL
            .iter()
            .map(|m| format!("{}={:.4}", m.column(), m.of(r))),
    );
    format!("{label:<7} {}", parts.join(" "))
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Ingest(a) => {
            let source = match (&a.schema, &a.dataset) {
                (Some(schema), _) => DatasetSource::Csv {
                    data: a.data.clone(),
                    schema: schema.clone(),
                    delimiter: a.delimiter,
                },
                (None, Some(name)) => DatasetSource::Builtin {
                    name: name.clone(),
                    path: a.data.clone(),
                    delimiter: a.delimiter,
                },
                (None, None) => {
                    return Err(Error::InvalidConfig(
                        "ingest needs --dataset or --schema".into(),
                    ))
                }
            };
            let report = cmd_ingest(&source, &a.out)?;
            println!(
                "wrote {} (dropped {} rows with missing cells, {} constant columns)",
                a.out.display(),
                report.dropped_missing_rows,
                report.dropped_constant_columns.len()
            );
        }
        Command::Run(a) => {
            let cfg = resolve_config(&a)?;
            let record = cmd_run(&cfg)?;
            println!("{}", summary_line("before", &record.metrics_before));
            println!("{}", summary_line("after", &record.metrics_after));
            println!("run written to {}", cfg.output_dir.display());
        }
        Command::Sweep(a) => {
            let cfg = resolve_config(&a.experiment)?;
            let table = cmd_sweep(&cfg, &a.lambda_f_grid, cfg.diverse.lambda_u)?;
            for row in &table.rows {
                match &row.report {
                    Some(r) => println!("{}", summary_line(&format!("{}", row.lambda_f), r)),
                    None => println!("{:<7} infeasible", row.lambda_f),
                }
            }
            println!("sweep written to {}", cfg.output_dir.display());
        }
        Command::Report(a) => {
            let rows = cmd_report(&a.runs, a.external.as_deref(), &a.out)?;
            for row in &rows {
                let flag = if row.flagged {
                    " [exceeds vanilla]"
                } else {
                    ""
                };
                println!("{}{flag}", summary_line(&row.method, &row.report));
            }
            println!("report written to {}", a.out.display());
        }
        Command::Synth(a) => {
            let spec = SyntheticSpec {
                beta: a.beta,
                n: a.n,
                d: a.d,
                seed: a.seed,
                separation: a.separation,
            };
            write_synthetic(&spec, &a.out)?;
            println!("wrote {}", a.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
