use std::path::PathBuf;

use clap::Args;
use metasoc_core::constructions::{summarize, MetaphorProfile, ProfileSummary};
use metasoc_core::fit::{AnyFit, FitReport};
use metasoc_core::rules::{apply_rules_report, class_timeline, ClassTimeline, OrderingPrediction, TransformationRule};
use metasoc_core::stats::rank_frequency;
use serde::Serialize;

use super::fit::{equation, fit_model, fit_plot, Method, Model};
use super::read_json;
use crate::run::{Failure, Outcome, Outputs};

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Profile JSON from `extract`.
    #[arg(long)]
    pub profile: PathBuf,
    /// rules.json from `rules`.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Report {
    summary: ProfileSummary,
    fit: Option<FitReport>,
    fit_error: Option<String>,
    timeline: ClassTimeline,
    predictions: Vec<OrderingPrediction>,
}

pub fn run(args: &ReportArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let profile: MetaphorProfile = read_json(&args.profile, out)?;
    let rules: Vec<TransformationRule> = match &args.rules {
        Some(path) => read_json(path, out)?,
        None => Vec::new(),
    };
    let summary = summarize(&profile);
    let timeline = class_timeline(&profile);
    let predictions = apply_rules_report(&rules, &timeline);

    let data = rank_frequency(&profile).map_err(|e| e.to_string());
    let fit: Result<AnyFit, String> =
        data.clone().and_then(|d| fit_model(&d, Model::Power, Method::Nls).map_err(|e| e.to_string()));

    let mut lines = vec![format!(
        "{}: {} construction(s), {} instances",
        summary.lemma,
        summary.construction_count,
        summary.instance_ratio()
    )];
    for c in &summary.constructions {
        lines.push(format!(
            "  {:<40} {:<10} n={:<5} FOY {}",
            c.pattern, c.incoming_label, c.frequency, c.first_occurrence_year
        ));
    }
    match &fit {
        Ok(f) => lines.push(format!("{}  R² = {:.4}", equation(f), f.quality().r_squared)),
        Err(e) => lines.push(format!("no power-law fit: {e}")),
    }
    if args.rules.is_some() {
        let held = predictions.iter().filter(|p| p.satisfied).count();
        lines.push(format!("{held} of {} applicable rule(s) hold", predictions.len()));
        for p in &predictions {
            lines.push(format!(
                "  {} ({}) before {} ({}): {}",
                p.antecedent,
                p.antecedent_foy,
                p.consequent,
                p.consequent_foy,
                if p.satisfied { "yes" } else { "no" }
            ));
        }
    }

    let plot = match (&data, &fit) {
        (Ok(d), Ok(f)) => fit_plot(&format!("{}: rank-frequency", profile.lemma), "rank", "frequency", d, f),
        _ => crate::svg::Plot { title: profile.lemma.clone(), ..Default::default() },
    };
    out.write("report.svg", plot.render_with_text(&lines))?;
    let report =
        Report { summary, fit: fit.as_ref().ok().map(AnyFit::report), fit_error: fit.err(), timeline, predictions };
    out.write_json("report.json", &report)?;
    for l in &lines {
        println!("{l}");
    }
    Ok(Outcome { params: serde_json::to_value(args).unwrap_or_default(), ..Default::default() })
}
