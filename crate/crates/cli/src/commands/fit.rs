use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{ArgGroup, Args, ValueEnum};
use metasoc_core::constructions::MetaphorProfile;
use metasoc_core::fit::{
    fit_logistic, fit_ma_law, fit_power_law, sample_curve, AnyFit, FitError, FitQuality, FitReport, PointSet,
    PowerLawFit, PowerLawMethod,
};
use metasoc_core::stats::{batch_fit_summary, rank_frequency};
use serde::{Deserialize, Serialize};

use super::{load_profiles, parse_range, read_json};
use crate::run::{input_error, Classify, Failure, Outcome, Outputs};
use crate::svg::{Plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
pub enum Model {
    #[default]
    #[value(name = "power")]
    #[serde(rename = "power")]
    Power,
    /// Truncated Menzerath-Altmann, `A·x^b`.
    #[value(name = "ma")]
    #[serde(rename = "ma")]
    Ma,
    /// Full Menzerath-Altmann, `A·x^b·e^(−cx)`.
    #[value(name = "ma_full")]
    #[serde(rename = "ma_full")]
    MaFull,
    #[value(name = "logistic")]
    #[serde(rename = "logistic")]
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Nls,
    Loglog,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["profile", "points", "batch", "family"])))]
pub struct FitArgs {
    /// Profile JSON from `extract`; its rank-frequency curve is fitted.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// CSV with columns x,y.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Directory of profile JSON files; power-law fit of each.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Plot a power-law family instead of fitting, e.g. "a=2 b=0.5:2.5:0.5".
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub model: Model,
    /// Power-law estimator.
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
    /// Abscissae for --family, as lo:hi:step.
    #[arg(long, default_value = "0.2:5:0.05")]
    pub xs: String,
    /// Treat a fit that did not converge as an error.
    #[arg(long)]
    pub require_converged: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// JSON written by `fit`: the flat fit report plus the data it was fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lemma: Option<String>,
    #[serde(flatten)]
    pub report: FitReport,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_model(data: &PointSet, model: Model, method: Method) -> Result<AnyFit, FitError> {
    let method = match method {
        Method::Nls => PowerLawMethod::Nls,
        Method::Loglog => PowerLawMethod::Loglog,
    };
    Ok(match model {
        Model::Power => AnyFit::Power(fit_power_law(data, method)?),
        Model::Ma => AnyFit::Ma(fit_ma_law(data, true)?),
        Model::MaFull => AnyFit::Ma(fit_ma_law(data, false)?),
        Model::Logistic => AnyFit::Logistic(fit_logistic(data)?),
    })
}

pub fn equation(fit: &AnyFit) -> String {
    match fit {
        AnyFit::Power(f) => format!("y = {:.4}·x^(−{:.4})", f.scale, f.exponent),
        AnyFit::Ma(f) if f.truncated => format!("y = {:.4}·x^({:.4})", f.scale, f.exponent),
        AnyFit::Ma(f) => format!("y = {:.4}·x^({:.4})·e^(−{:.4}x)", f.scale, f.exponent, f.decay),
        AnyFit::Logistic(f) => format!("y = {:.4} / (1 + e^(−{:.4}(x − {:.4})))", f.capacity, f.rate, f.midpoint),
    }
}

/// Scatter of the data with the fitted curve over the data range.
pub fn fit_plot(title: &str, x_label: &str, y_label: &str, data: &PointSet, fit: &AnyFit) -> Plot {
    let xs = data.xs();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grid: Vec<f64> = (0..=200).map(|i| lo + (hi - lo) * i as f64 / 200.0).collect();
    let curve = sample_curve(fit, &grid).unwrap_or_default();
    Plot {
        title: title.to_string(),
        x_label: x_label.to_string(),
        y_label: y_label.to_string(),
        series: vec![Series::markers("data", data.points().to_vec()), Series::line(fit.model_name(), curve)],
        notes: vec![equation(fit), format!("R² = {:.4}", fit.quality().r_squared)],
        ..Default::default()
    }
}

fn read_points(path: &Path, out: &mut Outputs) -> Result<PointSet, Failure> {
    out.input(path);
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display())).input()?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut points = Vec::new();
    for row in rdr.deserialize::<(f64, f64)>() {
        points.push(row.with_context(|| format!("bad row in {}", path.display())).input()?);
    }
    PointSet::new(points).input()
}

pub fn run(args: &FitArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let params = serde_json::to_value(args).unwrap_or_default();
    if let Some(text) = &args.family {
        family(text, &args.xs, out)?;
        return Ok(Outcome { params, ..Default::default() });
    }
    if let Some(dir) = &args.batch {
        if args.model != Model::Power {
            return Err(input_error("--batch fits the power law only"));
        }
        return batch(dir, out).map(|()| Outcome { params, ..Default::default() });
    }

    let (lemma, data, x_label, y_label) = if let Some(path) = &args.profile {
        let profile: MetaphorProfile = read_json(path, out)?;
        let data = rank_frequency(&profile).model()?;
        (Some(profile.lemma), data, "rank", "frequency")
    } else {
        let path = args.points.as_ref().expect("clap enforces one source");
        (None, read_points(path, out)?, "x", "y")
    };

    let fit = fit_model(&data, args.model, args.method).model()?;
    if !fit.quality().converged {
        if args.require_converged {
            return Err(Failure::Model(fit.ensure_converged().unwrap_err().into()));
        }
        eprintln!("warning: fit did not converge after {} iterations", fit.quality().iterations);
    }
    let output = FitOutput { lemma: lemma.clone(), report: fit.report(), points: data.points().to_vec() };
    out.write_json("fit.json", &output)?;
    let title = match &lemma {
        Some(l) => format!("{l}: {} fit", fit.model_name()),
        None => format!("{} fit", fit.model_name()),
    };
    out.write("fit.svg", fit_plot(&title, x_label, y_label, &data, &fit).render())?;
    println!("{}  R² = {:.6}", equation(&fit), fit.quality().r_squared);
    Ok(Outcome { params, ..Default::default() })
}

fn batch(dir: &Path, out: &mut Outputs) -> Result<(), Failure> {
    let profiles = load_profiles(dir, out)?;
    let summary = batch_fit_summary(&profiles);
    out.write_json("batch.json", &summary)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    let rows: Result<(), csv::Error> = (|| {
        csv.write_record(["lemma", "a", "b", "r_squared", "converged", "error"])?;
        for f in &summary.fits {
            match (&f.fit, &f.error) {
                (Some(p), _) => {
                    csv.serialize((&f.lemma, p.scale, p.exponent, p.quality.r_squared, p.quality.converged, ""))?
                }
                (None, err) => csv.write_record([f.lemma.as_str(), "", "", "", "", err.as_deref().unwrap_or("")])?,
            }
        }
        Ok(())
    })();
    rows.context("writing batch table").model()?;
    out.write("batch.csv", csv.into_inner().map_err(|e| anyhow!("{e}")).model()?)?;
    for f in summary.fits.iter().filter(|f| f.error.is_some()) {
        eprintln!("warning: {}: {}", f.lemma, f.error.as_deref().unwrap_or_default());
    }
    match summary.aggregate {
        Some(agg) => {
            println!(
                "{} of {} fitted; R² mean {:.4}, min {:.4}, max {:.4}",
                agg.count,
                summary.fits.len(),
                agg.mean,
                agg.min,
                agg.max
            );
            Ok(())
        }
        None => Err(Failure::Model(anyhow!("no profile could be fitted"))),
    }
}

/// `a=2 b=0.5:2.5:0.5`: one curve per (a, b) combination.
pub fn parse_family(text: &str) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let (mut a, mut b) = (None, None);
    for part in text.split_whitespace() {
        let (key, value) = part.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {part:?}"))?;
        match key {
            "a" => a = Some(parse_range(value)?),
            "b" => b = Some(parse_range(value)?),
            _ => bail!("unknown family parameter {key:?}"),
        }
    }
    match (a, b) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => bail!("family needs both a and b"),
    }
}

fn family(text: &str, xs: &str, out: &mut Outputs) -> Result<(), Failure> {
    let (a_values, b_values) = parse_family(text).input()?;
    let xs = parse_range(xs).input()?;
    let mut table = String::from("a,b,x,y\n");
    let mut series = Vec::new();
    for &a in &a_values {
        for &b in &b_values {
            let curve = PowerLawFit {
                scale: a,
                exponent: b,
                quality: FitQuality { r_squared: 0.0, sse: 0.0, n: 0, iterations: 0, converged: true },
            };
            let pts = sample_curve(&curve, &xs).model()?;
            for &(x, y) in &pts {
                let _ = writeln!(table, "{a},{b},{x},{y}");
            }
            let label = if a_values.len() > 1 { format!("a = {a}, b = {b}") } else { format!("b = {b}") };
            series.push(Series::line(label, pts));
        }
    }
    out.write("family.csv", table)?;
    let plot = Plot {
        title: "y = a·x^(−b)".into(),
        x_label: "x".into(),
        y_label: "y".into(),
        series,
        notes: a_values.iter().map(|a| format!("a = {a}")).collect(),
        ..Default::default()
    };
    out.write("family.svg", plot.render())?;
    Ok(())
}
