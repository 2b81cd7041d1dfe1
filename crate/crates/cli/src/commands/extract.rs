use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Args, ValueEnum};
use metasoc_core::constructions::{
    cluster, summarize, write_constructions_csv, ClusterOptions, CoverageMode, MetaphorProfile,
    DEFAULT_MIN_CLUSTER_SIZE, DEFAULT_MIN_COVERAGE,
};
use metasoc_core::corpus::{extract_instances, parse_conllu, write_instances_jsonl, Strictness};
use serde::Serialize;

use super::PROFILE_SUFFIX;
use crate::run::{file_stem, input_error, Classify, Failure, Outcome, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    FixedPoint,
    SinglePass,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractArgs {
    /// CoNLL-U file; every sentence needs a `# year = YYYY` comment.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Target lemma. Repeat for several.
    #[arg(long = "lemma", required = true)]
    pub lemmas: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_CLUSTER_SIZE)]
    pub min_cluster_size: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_COVERAGE)]
    pub min_coverage: f64,
    #[arg(long, value_enum, default_value_t = Mode::FixedPoint)]
    pub coverage_mode: Mode,
    /// Fail on the first malformed sentence instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Also write every matched instance as JSON lines.
    #[arg(long)]
    pub dump_instances: bool,
}

pub fn run(args: &ExtractArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    if args.min_cluster_size == 0 {
        return Err(input_error("--min-cluster-size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&args.min_coverage) {
        return Err(input_error("--min-coverage must lie in [0, 1]"));
    }
    out.input(&args.corpus);
    let file = File::open(&args.corpus).with_context(|| format!("cannot open {}", args.corpus.display())).input()?;
    let strictness = if args.strict { Strictness::Strict } else { Strictness::Lenient };
    let parsed = parse_conllu(BufReader::new(file), strictness)
        .map_err(|e| Failure::Input(anyhow!("{}: {e}", args.corpus.display())))?;
    if !parsed.skipped.is_empty() {
        for e in &parsed.skipped {
            eprintln!("warning: skipped {e}");
        }
        eprintln!("warning: {} malformed sentence(s) skipped", parsed.skipped.len());
    }
    let corpus = parsed.corpus;

    let opts = ClusterOptions {
        min_cluster_size: args.min_cluster_size,
        min_coverage: args.min_coverage,
        coverage_mode: match args.coverage_mode {
            Mode::FixedPoint => CoverageMode::FixedPoint,
            Mode::SinglePass => CoverageMode::SinglePass,
        },
    };

    let mut lemmas = args.lemmas.clone();
    lemmas.dedup();
    let mut summaries = Vec::new();
    let mut empty = Vec::new();
    for lemma in &lemmas {
        let instances = extract_instances(&corpus, lemma);
        let profile = if instances.is_empty() {
            MetaphorProfile {
                lemma: lemma.clone(),
                constructions: vec![],
                outliers: vec![],
                outlier_count: 0,
                total_instances: 0,
                retained_instances: 0,
            }
        } else {
            cluster(&instances, &opts).model()?
        };
        if profile.constructions.is_empty() {
            empty.push(lemma.as_str());
        }
        let stem = file_stem(lemma);
        let mut csv = Vec::new();
        write_constructions_csv(&mut csv, &profile).context("writing constructions").model()?;
        out.write(&format!("{stem}.constructions.csv"), csv)?;
        out.write_json(&format!("{stem}{PROFILE_SUFFIX}"), &profile)?;
        if args.dump_instances {
            let mut jsonl = Vec::new();
            write_instances_jsonl(&mut jsonl, &instances).context("writing instances").model()?;
            out.write(&format!("{stem}.instances.jsonl"), jsonl)?;
        }
        let summary = summarize(&profile);
        eprintln!("{lemma}: {} construction(s), {} instances", summary.construction_count, summary.instance_ratio());
        summaries.push(summary);
    }
    out.write_json("summary.json", &summaries)?;

    Ok(Outcome {
        params: serde_json::to_value(args).unwrap_or_default(),
        seed: None,
        empty: (!empty.is_empty()).then(|| format!("no constructions for: {}", empty.join(", "))),
    })
}
