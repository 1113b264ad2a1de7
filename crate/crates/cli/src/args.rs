use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::CliError;

const WEIGHT_LAYOUT: &str = "\
Weight files (little-endian):
  bytes 0..4   magic \"NNPR\"
  u32          format version (1)
  u32          layer count
  per layer:
    u32        input width
    u32        output width
    u8         activation (0 = relu, 1 = sigmoid, 2 = identity)
    f32        dropout rate
    f32 x in*out  weights, row-major by input unit
    f32 x out     biases";

const TOP_HELP: &str = "\
Every subcommand reads its flags from the command line and, when --config
is given, from a TOML file with one table per subcommand whose keys are the
flag names ([train] epochs = 30, ...); top-level `seed` and `threads` keys
set the global flags. Flags override the file.

Exit codes: 0 success, 1 input error, 2 empty or degenerate result,
3 internal invariant violation.";

#[derive(Debug, Parser)]
#[command(name = "retrokit", version, about = "Template-based retrobiosynthesis with learned pathway ranking")]
#[command(long_about = None, after_long_help = format!("{TOP_HELP}\n\n{WEIGHT_LAYOUT}"))]
pub struct Cli {
    /// TOML configuration file mirroring the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel stages (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic corpus, template set and planted chain.
    #[command(after_long_help = SYNTH_HELP)]
    Synth(SynthArgs),
    /// Clean a reaction corpus and split it into mono-product reactions.
    #[command(after_long_help = INGEST_HELP)]
    Ingest(IngestArgs),
    /// Generate template negatives and write train/test datasets.
    #[command(after_long_help = AUGMENT_HELP)]
    Augment(AugmentArgs),
    /// Train a one-step (nn1pr) or two-step (nn2pr) ranking network.
    #[command(after_long_help = TRAIN_HELP)]
    Train(TrainArgs),
    /// Rank held-out groups with a trained network and the Tanimoto baseline.
    #[command(after_long_help = EVAL_HELP)]
    Eval(EvalArgs),
    /// Search multistep pathways backwards from a target.
    #[command(after_long_help = RETRO_HELP)]
    Retro(RetroArgs),
}

const SYNTH_HELP: &str = "\
Writes into --out-dir:
  reactions.tsv   reaction_id, ec_numbers (;), reactants (.), products (.)
  compounds.tsv   compound_id, raw_smiles (header only: tokens are SMILES)
  pathways.tsv    pathway_id, reaction ids in forward order (;)
  templates.tsv   template_id, direction, diameter, ec_numbers (;), smarts
  planted_gold.tsv   step, product, precursors (.) of a planted chain
  planted_target.smi / planted_stop.smi   its target and starting compound";

const INGEST_HELP: &str = "\
Inputs:
  reactions.tsv   reaction_id, ec_numbers (;), reactants (.), products (.);
                  compound tokens are compound ids or SMILES
  compounds.tsv   compound_id, raw_smiles (UNRESOLVED or blank when unknown)
Outputs in --out-dir:
  mono.tsv        parent_id, ec_numbers (;), reactants (.), product, flagged (0/1)
  stats.json      corpus counters
Unresolved compounds are fetched from --fetch-endpoint/{id} when given.
Exit 2 when no reaction is usable.";

const AUGMENT_HELP: &str = "\
Inputs: mono.tsv from ingest, a template table, optionally pathways.tsv.
Outputs in --out-dir:
  train.tsv / test.tsv     label (0/1), group_key, target, precursors, weight;
                           precursors are `.`-joined sets, steps joined by `>`
  train2.tsv / test2.tsv   two-step rows (with --pathways)
  histogram.tsv            negatives, positives
  augment.json             counts
--neg-fraction keeps that fraction of training negatives. Exit 2 with no
templates or no positives; exit 3 if a negative equals a positive.";

const TRAIN_HELP: &str = "\
Input: a dataset TSV (label, group_key, target, precursors, weight).
Outputs: the weight file and a history CSV (epoch, loss, accuracy).
--class-weighting is none, balanced or a positive-class weight.
Exit 2 when the rows do not match the model's feature width.";

const EVAL_HELP: &str = "\
Input: weights and a dataset TSV. The network kind follows the weight file's
input width (1024 = nn1pr, 1536 = nn2pr).
Outputs: report.json with coverage at k = 1, 5, 10, 50, 100, 1000 and rank
histograms for the network and the Tanimoto baseline; --ranks writes
group_key, rank, total, rank_percent, score per positive.";

const RETRO_HELP: &str = "\
Inputs: target SMILES, a template table, nn1pr weights, optional nn2pr
weights, an optional stop-set file (one SMILES per line) and an optional gold
pathway TSV (step, product, precursors).
Outputs: report.json (levels, pathways, gold step ranks) and optionally a
pathway TSV (pathway_rank, aggregate_score, step, product, precursors,
ec_numbers, template_ids, step_score).
Exit 1 on an unparsable target, 2 when no pathway is found.";

macro_rules! mergeable {
    ($name:ident { $($field:ident),* $(,)? }) => {
        impl $name {
            /// Command-line values win; the file fills the gaps.
            pub fn merge(self, file: Option<$name>) -> $name {
                let file = file.unwrap_or_default();
                $name { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Number of pathways to generate.
    #[arg(long)]
    pub pathways: Option<usize>,
    /// Maximum reactions per pathway.
    #[arg(long)]
    pub steps: Option<usize>,
}
mergeable!(SynthArgs { out_dir, pathways, steps });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct IngestArgs {
    #[arg(long)]
    pub reactions: Option<PathBuf>,
    #[arg(long)]
    pub compounds: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Base URL for fetching unresolved compounds.
    #[arg(long)]
    pub fetch_endpoint: Option<String>,
    /// Minimum milliseconds between fetches.
    #[arg(long)]
    pub fetch_interval_ms: Option<u64>,
}
mergeable!(IngestArgs { reactions, compounds, out_dir, fetch_endpoint, fetch_interval_ms });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AugmentArgs {
    /// Mono-product reactions written by `ingest`.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub pathways: Option<PathBuf>,
    /// Fraction of training negatives kept (default 1).
    #[arg(long)]
    pub neg_fraction: Option<f64>,
    /// Fraction of product groups held out (default 0.2).
    #[arg(long)]
    pub test_fraction: Option<f64>,
}
mergeable!(AugmentArgs { corpus, templates, out_dir, pathways, neg_fraction, test_fraction });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct TrainArgs {
    /// nn1pr or nn2pr.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub class_weighting: Option<String>,
    /// Weight file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub history: Option<PathBuf>,
}
mergeable!(TrainArgs { model, data, epochs, batch, lr, class_weighting, out, history });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EvalArgs {
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub ranks: Option<PathBuf>,
}
mergeable!(EvalArgs { weights, data, report, ranks });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RetroArgs {
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long)]
    pub nn1: Option<PathBuf>,
    #[arg(long)]
    pub nn2: Option<PathBuf>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub beam: Option<usize>,
    #[arg(long)]
    pub prune: Option<f64>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub stop_set: Option<PathBuf>,
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub pathways: Option<PathBuf>,
}
mergeable!(RetroArgs {
    target,
    templates,
    nn1,
    nn2,
    max_steps,
    beam,
    prune,
    max_nodes,
    stop_set,
    gold,
    report,
    pathways
});

/// The TOML configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub synth: Option<SynthArgs>,
    pub ingest: Option<IngestArgs>,
    pub augment: Option<AugmentArgs>,
    pub train: Option<TrainArgs>,
    pub eval: Option<EvalArgs>,
    pub retro: Option<RetroArgs>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = crate::io::read(path)?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

pub fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("missing --{flag}")))
}
