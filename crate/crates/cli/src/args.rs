use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const SCORER_ENV: &str = "ONTOSUB_SCORER_ENDPOINT";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "ontosub",
    version,
    about = "Sentence-pair corpora and ranking evaluation for OWL subsumption prediction"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Print class, restriction and subsumption counts.
    Stats(StatsArgs),
    /// Build a labelled sentence-pair corpus.
    BuildCorpus(BuildCorpusArgs),
    /// Build ranking cases for held-out subsumptions of one ontology.
    BuildEval(BuildEvalArgs),
    /// Build ranking cases for subsumptions across two ontologies.
    BuildEvalInter(BuildEvalInterArgs),
    /// Rank eval cases with a scorer and report MRR / Hits@K.
    Evaluate(EvaluateArgs),
    /// Print the labels of a class or the sentences of its restrictions.
    Verbalize(VerbalizeArgs),
    /// Serve the lexical baseline over the scorer protocol on stdin/stdout.
    ServeLexical(ServeLexicalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    IntraNamed,
    IntraExistential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    Ic,
    Pc,
    Bc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Labels {
    Single,
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tie {
    Pessimistic,
    Optimistic,
    Midpoint,
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    /// Keep label literals in this language (plus untagged ones).
    #[arg(long, default_value = "en")]
    pub lang: String,
    /// Keep label literals in every language.
    #[arg(long)]
    pub all_languages: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct LabelArgs {
    #[arg(long, value_enum, default_value_t = Labels::Single)]
    pub labels: Labels,
    /// Annotation property used for labels, in priority order (repeatable).
    #[arg(long = "label-property")]
    pub label_properties: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct TemplateArgs {
    #[arg(long, value_enum, default_value_t = Template::Ic)]
    pub template: Template,
    /// Traversal depth for PC and BC.
    #[arg(long = "d", default_value_t = 1)]
    pub depth: usize,
    /// Branching width for PC and BC.
    #[arg(long = "w", default_value_t = 4)]
    pub width: usize,
    /// BC traversals per side.
    #[arg(long, default_value_t = 2)]
    pub traversals: usize,
    /// Sentence pairs kept per subsumption.
    #[arg(long, default_value_t = 16)]
    pub max_pairs: usize,
    #[arg(long, default_value = "[SEP]")]
    pub sep_token: String,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    pub ontology: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildCorpusArgs {
    pub ontology: PathBuf,
    #[arg(long, value_enum, default_value_t = Task::IntraNamed)]
    pub task: Task,
    #[command(flatten)]
    pub template: TemplateArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Training negatives per positive.
    #[arg(long, default_value_t = 1)]
    pub neg_ratio: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output JSONL (gzip-compressed when the name ends in .gz).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write per-axiom failures as JSONL.
    #[arg(long)]
    pub failures: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildEvalArgs {
    pub ontology: PathBuf,
    #[arg(long, value_enum, default_value_t = Task::IntraNamed)]
    pub task: Task,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Seeds expanded per hop.
    #[arg(long = "m", default_value_t = 8)]
    pub max_seeds: usize,
    /// Hops from the gold parent.
    #[arg(long = "h", default_value_t = 3)]
    pub hops: usize,
    /// Named pool size cap.
    #[arg(long, default_value_t = 50)]
    pub cap: usize,
    /// Restriction draws sharing the gold's property or filler.
    #[arg(long, default_value_t = 40)]
    pub n1: usize,
    /// Restriction draws among the rest.
    #[arg(long, default_value_t = 10)]
    pub n2: usize,
    /// Split seed; must match the one used for build-corpus.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Test cases output (JSONL).
    #[arg(long)]
    pub out: PathBuf,
    /// Validation cases output (JSONL).
    #[arg(long)]
    pub valid_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildEvalInterArgs {
    /// Ontology providing the children.
    pub ontology_a: PathBuf,
    /// Ontology providing the parents.
    pub ontology_b: PathBuf,
    /// Tab-separated equivalence mappings, A class then B class.
    #[arg(long)]
    pub mappings: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
    #[arg(long = "m", default_value_t = 8)]
    pub max_seeds: usize,
    #[arg(long = "h", default_value_t = 3)]
    pub hops: usize,
    #[arg(long, default_value_t = 50)]
    pub cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Test cases output (JSONL).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub valid_out: Option<PathBuf>,
    /// Ontology B with the mapped classes removed (JSON), for `evaluate --ontology-b`.
    #[arg(long)]
    pub pruned_b_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub eval: PathBuf,
    /// Ontology of the children (and of the parents unless --ontology-b).
    #[arg(long)]
    pub ontology: PathBuf,
    /// Ontology of the parents for inter-ontology cases.
    #[arg(long)]
    pub ontology_b: Option<PathBuf>,
    #[command(flatten)]
    pub template: TemplateArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// `lexical`, `external:<endpoint>` or `external` with the endpoint in
    /// the environment. Endpoints are `stdio:<command>` or `host:port`.
    #[arg(long, default_value = "lexical")]
    pub scorer: String,
    /// Overrides the external scorer endpoint.
    #[arg(long, env = SCORER_ENV, hide_env_values = true)]
    pub scorer_endpoint: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    /// Seconds to wait for each scorer response.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    #[arg(long, value_enum, default_value_t = Tie::Pessimistic)]
    pub tie: Tie,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report output (JSON).
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["class", "restriction"])))]
pub struct VerbalizeArgs {
    pub ontology: PathBuf,
    /// Print the labels of this class.
    #[arg(long)]
    pub class: Option<String>,
    /// Print the restrictions this class is declared under.
    #[arg(long)]
    pub restriction: Option<String>,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ServeLexicalArgs {
    #[arg(long, default_value = "[SEP]")]
    pub sep_token: String,
}
