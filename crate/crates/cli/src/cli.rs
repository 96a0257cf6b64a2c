//! Command-line interface: `synth`, `train`, `predict`, `evaluate`,
//! `compare`, `importance`, `cluster`, `scenario`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/model error. All randomness
//! is controlled by explicit seed flags, every output file is written
//! atomically, and no subcommand mutates its inputs, so identical
//! invocations produce byte-identical outputs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use mvgb::{
    compare_models, covariance_explained, evaluate, fit, generate_synthetic, global_importance,
    hierarchical_cluster, manhattan_distances, relative_influence, Intervention, Linkage,
    SyntheticSpec,
};

use crate::config::{resolve_hyperparams, HyperOverrides};
use crate::csv_data::{load_csv, load_features_for_model, write_dataset_csv};
use crate::model_file::{load_model, save_model};
use crate::reports;
use crate::schema::Schema;
use crate::trace_file::{read_trace_csv, write_trace_csv};
use crate::util::{provenance, write_atomic};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mvgb",
    version,
    about = "Multi-output gradient tree boosting: train, analyse and interrogate models of correlated responses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct HyperFlags {
    /// Number of boosting iterations.
    #[arg(long)]
    n_trees: Option<usize>,
    /// Learning rate in (0, 1].
    #[arg(long)]
    shrinkage: Option<f64>,
    /// Maximum tree depth.
    #[arg(long)]
    max_depth: Option<usize>,
    /// Minimum rows per leaf.
    #[arg(long)]
    min_node_size: Option<usize>,
    /// Row fraction fed to each tree, in (0, 1].
    #[arg(long)]
    subsample: Option<f64>,
    /// Fraction held out for best-iteration selection, in [0, 0.5].
    #[arg(long)]
    holdout_fraction: Option<f64>,
    /// Seed for the holdout split and subsampling.
    #[arg(long)]
    seed: Option<u64>,
}

impl HyperFlags {
    fn overrides(&self) -> HyperOverrides {
        HyperOverrides {
            n_trees: self.n_trees,
            shrinkage: self.shrinkage,
            max_depth: self.max_depth,
            min_node_size: self.min_node_size,
            subsample: self.subsample,
            holdout_fraction: self.holdout_fraction,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClusterTarget {
    /// Cluster predictors by their covariance-explained profiles.
    Predictors,
    /// Cluster response pairs by the predictors that explain them.
    ResponsePairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum LinkageArg {
    Complete,
    Single,
    Average,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Linkage {
        match l {
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Average => Linkage::Average,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the seeded synthetic benchmark dataset.
    Synth {
        /// Number of rows (at least 50).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Correlation of the response noise, in (-1, 1).
        #[arg(long)]
        noise_corr: f64,
        /// Output dataset CSV.
        #[arg(long)]
        out: PathBuf,
        /// Optional schema JSON to write alongside the data.
        #[arg(long)]
        out_schema: Option<PathBuf>,
    },
    /// Fit a boosted model on a CSV dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Key-value config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_model: PathBuf,
        /// Per-iteration error/covariance trace CSV.
        #[arg(long)]
        out_trace: Option<PathBuf>,
        /// Impute missing cells (column mean / mode) instead of failing.
        #[arg(long)]
        impute: bool,
        #[command(flatten)]
        hyper: HyperFlags,
    },
    /// Predict with a saved model (original response scale).
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Out-of-sample evaluation on a seeded 80/20 split.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
        /// Directory for the report CSV and observed-vs-predicted pairs.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        impute: bool,
        #[command(flatten)]
        hyper: HyperFlags,
    },
    /// Joint model vs per-response univariate models, same seeds and split.
    Compare {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        impute: bool,
        #[command(flatten)]
        hyper: HyperFlags,
    },
    /// Per-response relative influence and the global importance ranking.
    Importance {
        #[arg(long)]
        model: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Manhattan distances and a dendrogram over predictors or response pairs.
    Cluster {
        #[arg(long)]
        model: PathBuf,
        /// Trace CSV written by `train --out-trace`.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum)]
        target: ClusterTarget,
        #[arg(long, value_enum, default_value_t = LinkageArg::Complete)]
        linkage: LinkageArg,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Predicted-mean deltas under feature interventions.
    Scenario {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Intervention `feature=value`; repeat for several scenarios.
        #[arg(long = "set")]
        set: Vec<String>,
        /// Directory for the scenario CSV and per-row prediction exports.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Parses and executes a command line, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let rendered = e.render().to_string();
            let first_line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("usage error");
            eprintln!("{first_line}");
            return 1;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            n,
            seed,
            noise_corr,
            out,
            out_schema,
        } => {
            let d = generate_synthetic(&SyntheticSpec { n, seed, noise_corr })?;
            let comment = provenance(&format!("synth n={n} noise_corr={noise_corr}"), Some(seed));
            write_dataset_csv(&out, &d, &comment)?;
            if let Some(schema_path) = out_schema {
                let schema =
                    Schema::numeric(&["x1", "x2", "x3", "x4", "x5"], &["y1", "y2"])?;
                schema.save(&schema_path)?;
            }
            println!("wrote {} rows to {}", n, out.display());
            Ok(())
        }

        Command::Train {
            data,
            schema,
            config,
            out_model,
            out_trace,
            impute,
            hyper,
        } => {
            let schema = Schema::load(&schema)?;
            let dataset = load_csv(&data, &schema, impute)?;
            let hp = resolve_hyperparams(config.as_deref(), &hyper.overrides())?;
            let (model, trace) = fit(&dataset, &hp)?;
            save_model(&out_model, &model, &schema)?;
            if let Some(trace_path) = out_trace {
                let comment = provenance("train", Some(hp.seed));
                write_trace_csv(&trace_path, &trace, dataset.response_names(), &comment)?;
            }
            println!(
                "trained {} trees on {} rows; best iteration {}",
                model.trees.len(),
                dataset.n_rows(),
                model.best_iteration
            );
            Ok(())
        }

        Command::Predict { model, data, out } => {
            let (model, schema) = load_model(&model)?;
            let features = load_features_for_model(&data, &schema, &model)?;
            let predictions = model.predict(&features)?;
            let comment = provenance("predict", None);
            let bytes = reports::predictions_csv(&predictions, &model.response_names, &comment)?;
            write_atomic(&out, &bytes)?;
            println!("wrote {} predictions to {}", predictions.rows(), out.display());
            Ok(())
        }

        Command::Evaluate {
            data,
            schema,
            config,
            split_seed,
            out_dir,
            impute,
            hyper,
        } => {
            let schema = Schema::load(&schema)?;
            let dataset = load_csv(&data, &schema, impute)?;
            let hp = resolve_hyperparams(config.as_deref(), &hyper.overrides())?;
            let report = evaluate(&dataset, &hp, split_seed)?;
            print!("{}", reports::eval_report_table(&report));
            if let Some(dir) = out_dir {
                ensure_dir(&dir)?;
                let comment = provenance("evaluate", Some(split_seed));
                write_atomic(
                    &dir.join("evaluation.csv"),
                    &reports::eval_report_csv(&report, &comment)?,
                )?;
                write_atomic(
                    &dir.join("observed_predicted.csv"),
                    &reports::observed_predicted_csv(
                        &report,
                        dataset.response_names(),
                        &comment,
                    )?,
                )?;
            }
            Ok(())
        }

        Command::Compare {
            data,
            schema,
            config,
            split_seed,
            out_dir,
            impute,
            hyper,
        } => {
            let schema = Schema::load(&schema)?;
            let dataset = load_csv(&data, &schema, impute)?;
            let hp = resolve_hyperparams(config.as_deref(), &hyper.overrides())?;
            let report = compare_models(&dataset, &hp, split_seed)?;
            print!("{}", reports::comparison_table(&report));
            if let Some(dir) = out_dir {
                ensure_dir(&dir)?;
                let comment = provenance("compare", Some(split_seed));
                write_atomic(
                    &dir.join("comparison.csv"),
                    &reports::comparison_csv(&report, &comment)?,
                )?;
            }
            Ok(())
        }

        Command::Importance { model, out } => {
            let (model, _) = load_model(&model)?;
            let influence = relative_influence(&model);
            let ranking = global_importance(&influence);
            ensure_dir(&out)?;
            let comment = provenance("importance", None);
            write_atomic(
                &out.join("influence.csv"),
                &reports::influence_csv(&influence, &comment)?,
            )?;
            write_atomic(
                &out.join("global_importance.csv"),
                &reports::ranking_csv(&ranking, &comment)?,
            )?;
            println!("wrote influence tables to {}", out.display());
            Ok(())
        }

        Command::Cluster {
            model,
            trace,
            target,
            linkage,
            out,
        } => {
            let (model, _) = load_model(&model)?;
            let trace = read_trace_csv(&trace)?;
            let tensor = covariance_explained(&model, &trace)?;
            let (vectors, labels, prefix) = match target {
                ClusterTarget::Predictors => (
                    tensor.values.clone(),
                    tensor.feature_names.clone(),
                    "predictors",
                ),
                ClusterTarget::ResponsePairs => (
                    tensor.values.transpose(),
                    tensor.pair_labels(),
                    "response_pairs",
                ),
            };
            let distances = manhattan_distances(&vectors, &labels)?;
            let dendrogram = hierarchical_cluster(&distances, linkage.into())?;
            ensure_dir(&out)?;
            let comment = provenance(&format!("cluster target={prefix}"), None);
            write_atomic(
                &out.join("covariance_explained.csv"),
                &reports::tensor_csv(&tensor, &comment)?,
            )?;
            write_atomic(
                &out.join(format!("{prefix}_distance.csv")),
                &reports::distance_csv(&distances, &comment)?,
            )?;
            write_atomic(
                &out.join(format!("{prefix}_dendrogram.json")),
                &reports::dendrogram_json(&dendrogram)?,
            )?;
            write_atomic(
                &out.join(format!("{prefix}_dendrogram.newick")),
                reports::dendrogram_newick(&dendrogram).as_bytes(),
            )?;
            println!("wrote {prefix} clustering to {}", out.display());
            Ok(())
        }

        Command::Scenario {
            model,
            data,
            set,
            out_dir,
        } => {
            let (model, schema) = load_model(&model)?;
            let features = load_features_for_model(&data, &schema, &model)?;
            let mut labels = Vec::with_capacity(set.len());
            let mut interventions = Vec::with_capacity(set.len());
            for expr in &set {
                // Split on the last '=' so indicator column names like
                // `topography=ria` stay intact on the left.
                let (name, value) = expr.rsplit_once('=').ok_or_else(|| {
                    Error::Usage(format!("--set expects feature=value, got '{expr}'"))
                })?;
                let value: f64 = value.parse().map_err(|_| {
                    Error::Usage(format!("--set {expr}: '{value}' is not a number"))
                })?;
                labels.push(expr.clone());
                interventions.push(Intervention::set(name, value));
            }
            let results = mvgb::scenario_compare(&model, &features, &interventions)?;
            print!("{}", reports::scenario_table(&labels, &results));
            if let Some(dir) = out_dir {
                ensure_dir(&dir)?;
                let comment = provenance("scenario", None);
                write_atomic(
                    &dir.join("scenario.csv"),
                    &reports::scenario_csv(&labels, &results, &comment)?,
                )?;
                let baseline = model.predict(&features)?;
                for (i, intervention) in interventions.iter().enumerate() {
                    let mut modified = features.clone();
                    for (name, value) in &intervention.assignments {
                        let col = model
                            .feature_names
                            .iter()
                            .position(|n| n == name)
                            .expect("validated by scenario_compare");
                        for r in 0..modified.rows() {
                            modified.set(r, col, *value);
                        }
                    }
                    let scenario = model.predict(&modified)?;
                    write_atomic(
                        &dir.join(format!("scenario_rows_{}.csv", i + 1)),
                        &reports::scenario_rows_csv(&model, &baseline, &scenario, &comment)?,
                    )?;
                }
            }
            Ok(())
        }
    }
}
