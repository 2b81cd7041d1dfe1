use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand, ValueEnum};
use metasoc_core::fit::{fit_logistic, loglog_line, AnyFit, LogLogLine, PointSet};
use metasoc_core::sim::{
    log2_bins, power_law_body, run_adoption, run_sandpile_with_state, write_avalanches_csv, write_trace_csv,
    AdoptionConfig, AdoptionTrace, AvalancheRecord, SandpileConfig, SimError, Topology, DEFAULT_BODY_MIN_COUNT,
};
use serde::Serialize;

use super::read_json;
use crate::commands::fit::{equation, fit_plot};
use crate::run::{input_error, Classify, Failure, Outcome, Outputs};
use crate::svg::{Plot, Series};

#[derive(Debug, Subcommand, Serialize)]
pub enum SimulateCommand {
    /// Abelian sandpile on a grid with open boundaries.
    Sandpile(SandpileArgs),
    /// Threshold adoption cascades on a network.
    Adoption(AdoptionArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SandpileArgs {
    /// JSON SandpileConfig; overrides the individual flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub width: usize,
    #[arg(long, default_value_t = 50)]
    pub height: usize,
    #[arg(long, default_value_t = 10_000)]
    pub drops: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub threshold: u32,
    /// Log2 bins with fewer avalanches are left out of the slope fit.
    #[arg(long, default_value_t = DEFAULT_BODY_MIN_COUNT)]
    pub body_min_count: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyArg {
    Grid,
    SmallWorld,
    ScaleFree,
}

#[derive(Debug, Args, Serialize)]
pub struct AdoptionArgs {
    /// JSON AdoptionConfig; overrides the individual flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TopologyArg::SmallWorld)]
    pub topology: TopologyArg,
    #[arg(long, default_value_t = 200)]
    pub nodes: usize,
    /// Lattice degree for small-world graphs (even).
    #[arg(long, default_value_t = 6)]
    pub neighbors: usize,
    /// Rewiring probability for small-world graphs.
    #[arg(long, default_value_t = 0.1)]
    pub rewire: f64,
    /// Edges per new node for scale-free graphs.
    #[arg(long, default_value_t = 2)]
    pub attachment: usize,
    #[arg(long, default_value_t = 0.25)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0.01)]
    pub innovation: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent runs with seeds seed, seed+1, ...; the curve is their mean.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long)]
    pub out: PathBuf,
}

impl SimulateCommand {
    pub fn out(&self) -> &PathBuf {
        match self {
            SimulateCommand::Sandpile(a) => &a.out,
            SimulateCommand::Adoption(a) => &a.out,
        }
    }
}

fn sim_failure(e: SimError) -> Failure {
    match e {
        SimError::InvalidConfig(_) => Failure::Input(e.into()),
        _ => Failure::Model(e.into()),
    }
}

pub fn run(cmd: &SimulateCommand, out: &mut Outputs) -> Result<Outcome, Failure> {
    match cmd {
        SimulateCommand::Sandpile(a) => sandpile(a, out),
        SimulateCommand::Adoption(a) => adoption(a, out),
    }
}

#[derive(Serialize)]
struct SandpileSummary<'a> {
    config: &'a SandpileConfig,
    avalanches: usize,
    nonzero_avalanches: usize,
    grains_added: u64,
    grains_lost: u64,
    grains_on_grid: u64,
    body_min_count: u64,
    body_fit: Option<LogLogLine>,
}

fn sandpile(args: &SandpileArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let config: SandpileConfig = match &args.config {
        Some(path) => read_json(path, out)?,
        None => SandpileConfig {
            threshold: args.threshold,
            ..SandpileConfig::new(args.width, args.height, args.drops, args.seed)
        },
    };
    let (records, pile) = run_sandpile_with_state(&config).map_err(sim_failure)?;

    let mut buf = Vec::new();
    write_avalanches_csv(&records, &mut buf).context("writing avalanches").model()?;
    out.write("avalanches.csv", buf)?;
    out.write_json("avalanches.json", &records)?;

    let bins = log2_bins(&records).ok().unwrap_or_default();
    let mut hist = String::from("lo,hi,count,x,density\n");
    for b in &bins {
        hist.push_str(&format!("{},{},{},{},{}\n", b.lo, b.hi, b.count, b.x, b.density));
    }
    out.write("histogram.csv", hist)?;

    let body_fit = power_law_body(&records, args.body_min_count).ok().and_then(|body| loglog_line(&body).ok());
    let summary = SandpileSummary {
        config: &config,
        avalanches: records.len(),
        nonzero_avalanches: records.iter().filter(|r| r.size > 0).count(),
        grains_added: pile.grains_added(),
        grains_lost: pile.grains_lost(),
        grains_on_grid: pile.grains_on_grid(),
        body_min_count: args.body_min_count,
        body_fit,
    };
    out.write_json("summary.json", &summary)?;

    let mut series = vec![Series::markers("log2 bins", bins.iter().map(|b| (b.x, b.density)).collect())];
    let mut notes = Vec::new();
    if let Some(line) = body_fit {
        let body: Vec<(f64, f64)> = bins
            .iter()
            .filter(|b| b.count >= args.body_min_count)
            .map(|b| (b.x, (line.intercept + line.slope * b.x.ln()).exp()))
            .collect();
        series.push(Series::line("log-log fit", body));
        notes.push(format!("slope = {:.3}", line.slope));
        notes.push(format!("R² (log) = {:.4}", line.r_squared));
    }
    let plot = Plot {
        title: format!("Avalanche sizes, {}×{}, {} drops", config.width, config.height, config.drops),
        x_label: "avalanche size".into(),
        y_label: "density".into(),
        log_x: true,
        log_y: true,
        series,
        notes,
    };
    out.write("distribution.svg", plot.render())?;

    match body_fit {
        Some(l) => println!("{} avalanches; body slope {:.4}, log-space R² {:.4}", records.len(), l.slope, l.r_squared),
        None => println!("{} avalanches; too few to fit a slope", records.len()),
    }
    Ok(Outcome { params: serde_json::to_value(&config).unwrap_or_default(), seed: Some(config.seed), empty: None })
}

#[derive(Serialize)]
struct RunAvalanches {
    seed: u64,
    avalanches: Vec<AvalancheRecord>,
}

#[derive(Serialize)]
struct AdoptionParams<'a> {
    config: &'a AdoptionConfig,
    runs: u64,
}

fn adoption_config(args: &AdoptionArgs, out: &mut Outputs) -> Result<AdoptionConfig, Failure> {
    if let Some(path) = &args.config {
        return read_json(path, out);
    }
    let topology = match args.topology {
        TopologyArg::Grid => Topology::Grid,
        TopologyArg::SmallWorld => Topology::SmallWorld { neighbors: args.neighbors, rewire: args.rewire },
        TopologyArg::ScaleFree => Topology::ScaleFree { attachment: args.attachment },
    };
    Ok(AdoptionConfig {
        topology,
        n_nodes: args.nodes,
        threshold_fraction: args.threshold,
        innovation_rate: args.innovation,
        steps: args.steps,
        seed: args.seed,
    })
}

pub struct MeanAdoption {
    /// `(step, mean adopted fraction)`, steps from 1.
    pub curve: Vec<(f64, f64)>,
    pub traces: Vec<AdoptionTrace>,
}

/// Pointwise mean of the adopted fraction over `runs` consecutive seeds.
pub fn mean_adoption_curve(config: &AdoptionConfig, runs: u64) -> Result<MeanAdoption, SimError> {
    let mut traces = Vec::with_capacity(runs as usize);
    let mut sum = vec![0.0; config.steps];
    for i in 0..runs {
        let cfg = AdoptionConfig { seed: config.seed.wrapping_add(i), ..config.clone() };
        let trace = run_adoption(&cfg)?;
        for (s, (_, y)) in sum.iter_mut().zip(trace.adoption_curve()) {
            *s += y;
        }
        traces.push(trace);
    }
    let curve = sum.iter().enumerate().map(|(i, s)| ((i + 1) as f64, s / runs as f64)).collect();
    Ok(MeanAdoption { curve, traces })
}

fn adoption(args: &AdoptionArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    if args.runs == 0 {
        return Err(input_error("--runs must be at least 1"));
    }
    let config = adoption_config(args, out)?;
    let MeanAdoption { curve, traces } = mean_adoption_curve(&config, args.runs).map_err(sim_failure)?;

    let mut buf = Vec::new();
    write_trace_csv(&traces[0], &mut buf).context("writing trace").model()?;
    out.write("trace.csv", buf)?;
    let mut table = String::from("step,mean_adopted_fraction\n");
    for (x, y) in &curve {
        table.push_str(&format!("{x},{y}\n"));
    }
    out.write("curve.csv", table)?;
    let avalanches: Vec<RunAvalanches> = traces
        .iter()
        .enumerate()
        .map(|(i, t)| RunAvalanches { seed: config.seed.wrapping_add(i as u64), avalanches: t.avalanches.clone() })
        .collect();
    out.write_json("avalanches.json", &avalanches)?;

    let data = PointSet::new(curve.clone()).model()?;
    let fit = fit_logistic(&data).map(AnyFit::Logistic);
    let fit_json = match &fit {
        Ok(f) => serde_json::to_value(f.report()).unwrap_or_default(),
        Err(e) => serde_json::json!({ "model": "logistic", "error": e.to_string() }),
    };
    out.write_json("fit.json", &fit_json)?;

    let title = format!("Adoption, {} nodes, {} run(s)", config.n_nodes, args.runs);
    let plot = match &fit {
        Ok(f) => fit_plot(&title, "step", "adopted fraction", &data, f),
        Err(_) => Plot {
            title,
            x_label: "step".into(),
            y_label: "adopted fraction".into(),
            series: vec![Series::line("mean", curve)],
            ..Default::default()
        },
    };
    out.write("adoption.svg", plot.render())?;

    match &fit {
        Ok(f) => println!("{}  R² = {:.6}", equation(f), f.quality().r_squared),
        Err(e) => eprintln!("warning: logistic fit failed: {e}"),
    }
    let params = serde_json::to_value(AdoptionParams { config: &config, runs: args.runs }).unwrap_or_default();
    Ok(Outcome { params, seed: Some(config.seed), empty: None })
}
