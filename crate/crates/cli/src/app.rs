//! Command definitions and their implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use readgauge::demo::{self, SynthConfig};
use readgauge::evaluation::{ablation_csv, cross_validate, kfold, size_ablation, DEFAULT_FOLDS, REPORT_HEADER};
use readgauge::labeling::load_class_order;
use readgauge::models::{fuse, TrainConfig};
use readgauge::pipeline::{design_matrix, FittedPipeline, PipelineConfig, DEFAULT_VOCAB_SIZE};
use readgauge::text::Vocabulary;
use readgauge::{extract, Document, EvalReport, FeatureMatrix, FeatureSet, FeatureVector, ModelKind, Resources};

use crate::corpus::{ingest_corpus, CorpusError, Dataset, ScoreFile};
use crate::resources::{
    write_atomic, ResourcePaths, DATA_ENV, GRAMMAR_FILE, LEMMAS_FILE, NORMS_FILE, SENSES_FILE, TAGS_FILE,
};

pub const FEATURES_FILE: &str = "features.csv";
pub const MODEL_FILE: &str = "model.txt";
pub const REPORT_FILE: &str = "report.csv";
pub const FOLDS_FILE: &str = "folds.csv";
pub const ABLATION_FILE: &str = "ablation.csv";
pub const RANKED_FILE: &str = "ranked.csv";
pub const ORACLE_SCORES_FILE: &str = "oracle_scores.csv";

#[derive(Debug, Parser)]
#[command(name = "readgauge", version, about = "Readability features, classifiers and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic graded corpus and matching resources.
    Synth(SynthArgs),
    /// Write the feature CSV for a corpus.
    Extract(CorpusArgs),
    /// Fit a model on the whole corpus.
    Train(ModelArgs),
    /// Cross-validate a feature set and model.
    Eval(EvalArgs),
    /// Compare training-set-size curves with and without a feature set.
    Ablate(AblateArgs),
    /// Rank evaluation reports by weighted F1.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 600)]
    pub docs: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Also write a score file holding each document's true class index.
    #[arg(long)]
    pub oracle_scores: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Feature sets joined by `+`; repeat the flag to add more.
    #[arg(long = "features", required = true)]
    pub features: Vec<String>,
    /// Directory searched for resources not given explicitly.
    #[arg(long, env = DATA_ENV)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    #[arg(long)]
    pub tag_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub norms: Option<PathBuf>,
    #[arg(long)]
    pub senses: Option<PathBuf>,
    #[arg(long)]
    pub lemmas: Option<PathBuf>,
    /// One class name per line, easiest first.
    #[arg(long)]
    pub class_order: Option<PathBuf>,
    /// External scores (`doc_id,score_name,value`) appended as features.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value = "svm")]
    pub model: ModelKind,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub folds: usize,
    /// Plain instead of class-stratified folds.
    #[arg(long)]
    pub unstratified: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Features both pipelines share.
    #[arg(long, default_value = "word_types")]
    pub baseline: String,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report CSVs written by `eval`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth(&a),
        Command::Extract(a) => extract_cmd(&a),
        Command::Train(a) => train_cmd(&a),
        Command::Eval(a) => eval_cmd(&a).map(|_| ()),
        Command::Ablate(a) => ablate_cmd(&a),
        Command::Report(a) => report_cmd(&a),
    }
}

pub fn synth(a: &SynthArgs) -> Result<()> {
    if a.classes == 0 {
        bail!("--classes must be positive");
    }
    let cfg = SynthConfig { n_docs: a.docs, n_classes: a.classes, seed: a.seed, ..Default::default() };
    let docs = demo::synth_corpus(&cfg);
    let mut manifest = String::from("doc_id,path,class_name,age_low,age_high\n");
    let mut oracle = String::from("doc_id,score_name,value\n");
    for d in &docs {
        let rel = format!("docs/{}.txt", d.doc_id);
        write_atomic(&a.out.join(&rel), &d.text)?;
        let _ = writeln!(manifest, "{},{rel},{},{},{}", d.doc_id, d.class_name, d.age_low, d.age_high);
        let class_index = (0..a.classes).position(|c| demo::class_name(c) == d.class_name).unwrap_or(0);
        let _ = writeln!(oracle, "{},oracle,{class_index}", d.doc_id);
    }
    write_atomic(&a.out.join("manifest.csv"), &manifest)?;
    let order: Vec<String> = (0..a.classes).map(demo::class_name).collect();
    write_atomic(&a.out.join("class_order.txt"), &(order.join("\n") + "\n"))?;
    write_atomic(&a.out.join(GRAMMAR_FILE), &demo::grammar_text())?;
    write_atomic(&a.out.join(TAGS_FILE), &demo::tag_lexicon_csv())?;
    write_atomic(&a.out.join(NORMS_FILE), &demo::norms_csv())?;
    write_atomic(&a.out.join(SENSES_FILE), &demo::senses_csv())?;
    write_atomic(&a.out.join(LEMMAS_FILE), &demo::lemmas_csv())?;
    if a.oracle_scores {
        write_atomic(&a.out.join(ORACLE_SCORES_FILE), &oracle)?;
    }
    log::info!("wrote {} documents to {}", docs.len(), a.out.display());
    Ok(())
}

/// A loaded corpus with its per-document (vocabulary-independent) features.
pub struct Prepared {
    pub dataset: Dataset,
    pub set: FeatureSet,
    /// Fixed features plus fused scores, one row per document.
    pub fixed: FeatureMatrix<f64>,
    pub score_names: Vec<String>,
}

impl Prepared {
    pub fn load(args: &CorpusArgs) -> Result<Self> {
        let set = FeatureSet::parse(&args.features.join("+"))?;
        Self::load_with(args, &set)
    }

    pub fn load_with(args: &CorpusArgs, set: &FeatureSet) -> Result<Self> {
        let order = args
            .class_order
            .as_ref()
            .map(load_class_order)
            .transpose()
            .context("reading class order")?;
        let dataset = ingest_corpus(&args.manifest, order.as_deref())?;
        let paths = ResourcePaths {
            data_dir: args.data_dir.clone(),
            grammar: args.grammar.clone(),
            tag_lexicon: args.tag_lexicon.clone(),
            norms: args.norms.clone(),
            senses: args.senses.clone(),
            lemmas: args.lemmas.clone(),
        };
        let fixed_set = set.without_word_types();
        let res = paths.load(&fixed_set)?;
        res.check(&fixed_set)?;
        let scores = args.scores.as_deref().map(ScoreFile::read).transpose()?;
        let fixed = extract_fixed(&dataset.docs, &fixed_set, &res, scores.as_ref())?;
        Ok(Prepared {
            dataset,
            set: set.clone(),
            fixed,
            score_names: scores.map(|s| s.names).unwrap_or_default(),
        })
    }

    /// Row label such as `svm with flesch+linguistic`.
    pub fn label(&self, model: ModelKind) -> String {
        let mut parts = vec![self.set.name.clone()];
        parts.extend(self.score_names.iter().cloned());
        format!("{model} with {}", parts.join("+"))
    }

    pub fn pipeline(&self, args: &CorpusArgs, model: ModelKind) -> PipelineConfig<f64> {
        PipelineConfig {
            word_types: self.set.has_word_types(),
            vocab_size: args.vocab_size,
            train: TrainConfig::new(model, args.seed),
        }
    }

    pub fn docs(&self, idx: &[usize]) -> Vec<&Document> {
        idx.iter().map(|&i| &self.dataset.docs[i]).collect()
    }

    pub fn fit(&self, cfg: &PipelineConfig<f64>, idx: &[usize]) -> Result<FittedPipeline<f64>> {
        let y: Vec<usize> = idx.iter().map(|&i| self.dataset.labels[i]).collect();
        let mut fitted =
            FittedPipeline::fit(cfg, &self.docs(idx), &self.fixed.select_rows(idx), &y, self.dataset.n_classes())?;
        fitted.model.class_names = self.dataset.class_names.clone();
        Ok(fitted)
    }

    pub fn fit_predict(&self, cfg: &PipelineConfig<f64>, train: &[usize], test: &[usize]) -> Result<Vec<usize>> {
        let fitted = self.fit(cfg, train)?;
        Ok(fitted.predict(&self.docs(test), &self.fixed.select_rows(test))?)
    }

    /// Row indices of the given doc ids.
    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| {
                self.dataset
                    .docs
                    .iter()
                    .position(|d| d.doc_id() == id.as_ref())
                    .with_context(|| format!("unknown doc_id {}", id.as_ref()))
            })
            .collect()
    }
}

/// Extracts every document in parallel and appends its external scores.
pub fn extract_fixed(
    docs: &[Document],
    set: &FeatureSet,
    res: &Resources<f64>,
    scores: Option<&ScoreFile>,
) -> Result<FeatureMatrix<f64>> {
    let vectors: Vec<FeatureVector<f64>> = docs
        .par_iter()
        .map(|d| -> Result<FeatureVector<f64>> {
            let fv = extract(d, set, res).with_context(|| format!("extracting {}", d.doc_id()))?;
            match scores {
                Some(s) => {
                    let own = s.scores_for(d.doc_id())?;
                    Ok(fuse(&fv, &own)?)
                }
                None => Ok(fv),
            }
        })
        .collect::<Result<_>>()?;
    if vectors.is_empty() {
        return Ok(FeatureMatrix::new(set.members(None), Vec::new())?);
    }
    Ok(FeatureMatrix::from_vectors(&vectors)?)
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing csv")?)?)
}

pub fn extract_cmd(a: &CorpusArgs) -> Result<()> {
    let p = Prepared::load(a)?;
    let vocab = p.set.has_word_types().then(|| Vocabulary::fit(&p.dataset.docs, a.vocab_size));
    let all: Vec<&Document> = p.dataset.docs.iter().collect();
    let x = design_matrix(&all, &p.fixed, vocab.as_ref())?;
    let header: Vec<String> = ["doc_id", "label"].iter().map(|s| s.to_string()).chain(x.names().iter().cloned()).collect();
    let rows = (0..x.n_rows()).map(|i| {
        let d = &p.dataset.docs[i];
        [d.doc_id().to_string(), p.dataset.class_names[p.dataset.labels[i]].clone()]
            .into_iter()
            .chain(x.row(i).iter().map(|v| v.to_string()))
            .collect()
    });
    write_atomic(&a.out.join(FEATURES_FILE), &csv_bytes(&header, rows)?)?;
    log::info!("wrote {} x {} features", x.n_rows(), x.n_cols());
    Ok(())
}

pub fn train_cmd(a: &ModelArgs) -> Result<()> {
    let p = Prepared::load(&a.corpus)?;
    let all: Vec<usize> = (0..p.dataset.len()).collect();
    let fitted = p.fit(&p.pipeline(&a.corpus, a.model), &all)?;
    if let Some(c) = fitted.chosen_c {
        log::info!("chose C = {c}");
    }
    write_atomic(&a.corpus.out.join(MODEL_FILE), &fitted.model.to_text())?;
    Ok(())
}

pub fn eval_cmd(a: &EvalArgs) -> Result<EvalReport<f64>> {
    let corpus = &a.model.corpus;
    let p = Prepared::load(corpus)?;
    let ids = p.dataset.doc_ids();
    let plan = kfold(&ids, &p.dataset.labels, a.folds, corpus.seed, !a.unstratified)?;
    let cfg = p.pipeline(corpus, a.model.model);
    let report = cross_validate::<f64, anyhow::Error, _>(
        &p.label(a.model.model),
        &p.dataset.labels,
        p.dataset.n_classes(),
        &plan.assignments,
        plan.k,
        |train, test| p.fit_predict(&cfg, train, test),
    )?;
    write_atomic(&corpus.out.join(REPORT_FILE), &report.to_csv())?;
    write_atomic(&corpus.out.join(FOLDS_FILE), &report.folds_csv())?;
    println!("{}", report.csv_row());
    Ok(report)
}

pub fn ablate_cmd(a: &AblateArgs) -> Result<()> {
    let corpus = &a.model.corpus;
    let base = FeatureSet::parse(&a.baseline)?;
    let added = FeatureSet::parse(&corpus.features.join("+"))?;
    let with_set = base.union(&added);
    let with = Prepared::load_with(corpus, &with_set)?;
    let base_cols = base.without_word_types().members(None);
    let without = Prepared {
        dataset: with.dataset.clone(),
        set: base.clone(),
        fixed: with.fixed.select_columns(&base_cols)?,
        score_names: Vec::new(),
    };
    let cfg_with = with.pipeline(corpus, a.model.model);
    let cfg_without = without.pipeline(corpus, a.model.model);
    let rows = size_ablation::<f64, anyhow::Error, _, _>(
        &with.dataset.labels,
        with.dataset.n_classes(),
        &a.sizes,
        corpus.seed,
        |train, test| with.fit_predict(&cfg_with, train, test),
        |train, test| without.fit_predict(&cfg_without, train, test),
    )?;
    write_atomic(&corpus.out.join(ABLATION_FILE), &ablation_csv(&rows))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
struct ReportRow {
    features: String,
    values: [f64; 4],
}

fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != REPORT_HEADER {
        bail!("{}: expected header {REPORT_HEADER}", path.display());
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut values = [0.0; 4];
        for (j, v) in values.iter_mut().enumerate() {
            *v = rec[j + 1]
                .parse()
                .with_context(|| format!("{}: row {}: bad number", path.display(), i + 2))?;
        }
        rows.push(ReportRow { features: rec[0].to_string(), values });
    }
    Ok(rows)
}

pub fn report_cmd(a: &ReportArgs) -> Result<()> {
    let mut rows = Vec::new();
    for p in &a.inputs {
        rows.extend(read_report(p)?);
    }
    rows.sort_by(|x, y| y.values[0].total_cmp(&x.values[0]).then_with(|| x.features.cmp(&y.features)));
    let header: Vec<String> = REPORT_HEADER.split(',').map(str::to_string).collect();
    let csv = csv_bytes(
        &header,
        rows.iter().map(|r| std::iter::once(r.features.clone()).chain(r.values.iter().map(|v| v.to_string())).collect()),
    )?;
    write_atomic(&a.out.join(RANKED_FILE), &csv)?;
    let width = rows.iter().map(|r| r.features.len()).max().unwrap_or(8).max(8);
    println!("{:width$}  weighted_f1  macro_f1", "features");
    for r in &rows {
        println!("{:width$}  {:>11.4}  {:>8.4}", r.features, r.values[0], r.values[1]);
    }
    Ok(())
}

/// One-line description of an error for stderr.
pub fn error_line(e: &anyhow::Error) -> String {
    let kind = if e.chain().any(|c| c.downcast_ref::<CorpusError>().is_some()) { "corpus" } else { "error" };
    format!("{kind}: {e:#}").replace('\n', " ")
}
