use std::fs::File;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use metasoc_core::stats::{correlation_matrix, read_metaphor_rows, StatsError};
use serde::Serialize;

use crate::run::{Classify, Failure, Outcome, Outputs};

#[derive(Debug, Args, Serialize)]
pub struct CorrelateArgs {
    /// CSV with columns lemma,b,foy,frequency.
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &CorrelateArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    out.input(&args.table);
    let file = File::open(&args.table).with_context(|| format!("cannot open {}", args.table.display())).input()?;
    let rows = read_metaphor_rows(file).with_context(|| format!("cannot parse {}", args.table.display())).input()?;
    let matrix = match correlation_matrix(&rows) {
        Ok(m) => m,
        Err(e @ (StatsError::TooFewObservations(_) | StatsError::LengthMismatch(..))) => {
            return Err(Failure::Input(e.into()))
        }
        Err(e) => return Err(Failure::Model(e.into())),
    };
    let mut buf = Vec::new();
    matrix.write_csv(&mut buf).context("writing matrix").model()?;
    print!("{}", String::from_utf8_lossy(&buf));
    out.write("matrix.csv", buf)?;
    Ok(Outcome { params: serde_json::to_value(args).unwrap_or_default(), ..Default::default() })
}
