use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use metasoc_core::rules::{
    class_timeline, mine_rules, rules_text_report, ClassTimeline, Denominator, RuleOptions, DEFAULT_MIN_FREQUENCY,
    DEFAULT_MIN_PROBABILITY,
};
use serde::Serialize;

use super::{load_profiles, read_json};
use crate::run::{input_error, Classify, Failure, Outcome, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorArg {
    /// Metaphors containing the antecedent class.
    Antecedent,
    /// Metaphors containing both classes.
    BothClasses,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["profiles", "timelines"])))]
pub struct RulesArgs {
    /// Directory of profile JSON files from `extract`.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// JSON array of `{lemma, class_foys}` timelines.
    #[arg(long)]
    pub timelines: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_FREQUENCY)]
    pub min_frequency: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_PROBABILITY)]
    pub min_probability: f64,
    #[arg(long, value_enum, default_value_t = DenominatorArg::Antecedent)]
    pub denominator: DenominatorArg,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &RulesArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    if !(0.0..=1.0).contains(&args.min_probability) {
        return Err(input_error("--min-probability must lie in [0, 1]"));
    }
    let timelines: Vec<ClassTimeline> = match (&args.profiles, &args.timelines) {
        (Some(dir), _) => {
            load_profiles(dir, out)?.iter().filter(|p| !p.constructions.is_empty()).map(class_timeline).collect()
        }
        (None, Some(path)) => read_json(path, out)?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    if timelines.is_empty() {
        return Err(input_error("no metaphor has any construction"));
    }
    if timelines.len() == 1 {
        eprintln!("note: only one metaphor; no class pair can reach a support above 1");
    }
    let opts = RuleOptions {
        min_frequency: args.min_frequency,
        min_probability: args.min_probability,
        denominator: match args.denominator {
            DenominatorArg::Antecedent => Denominator::Antecedent,
            DenominatorArg::BothClasses => Denominator::BothClasses,
        },
    };
    let rules = mine_rules(&timelines, &opts).input()?;
    out.write_json("timelines.json", &timelines)?;
    out.write_json("rules.json", &rules)?;
    let text = rules_text_report(&rules);
    out.write("rules.txt", &text)?;
    print!("{text}");
    eprintln!("{} rule(s) from {} metaphor(s)", rules.len(), timelines.len());
    Ok(Outcome { params: serde_json::to_value(args).unwrap_or_default(), ..Default::default() })
}
