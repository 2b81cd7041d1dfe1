//! Grouping of vehicle instances into constructions by dependency-slot
//! signature, with the minimum-cluster-size and coverage filters.

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Instance;

/// Marker for the vehicle's own position in a slot sequence.
pub const CORE_WORD: &str = "CORE-WORD";

pub const DEFAULT_MIN_CLUSTER_SIZE: usize = 7;
pub const DEFAULT_MIN_COVERAGE: f64 = 0.04;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub incoming_label: String,
    pub slot_sequence: Vec<String>,
}

impl Signature {
    /// Number of slots other than the core word.
    pub fn constituent_number(&self) -> usize {
        self.slot_sequence.len().saturating_sub(1)
    }

    pub fn is_well_formed(&self) -> bool {
        self.slot_sequence.iter().filter(|s| *s == CORE_WORD).count() == 1
    }

    /// Space-joined slot sequence, e.g. `NSUBJ ADVMOD NMOD:PREP CORE-WORD`.
    pub fn pattern(&self) -> String {
        self.slot_sequence.join(" ")
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.incoming_label, self.pattern())
    }
}

pub fn signature_of(instance: &Instance) -> Signature {
    let slot = instance.core_slot();
    let mut slot_sequence = Vec::with_capacity(instance.dependent_labels.len() + 1);
    slot_sequence.extend_from_slice(&instance.dependent_labels[..slot]);
    slot_sequence.push(CORE_WORD.to_string());
    slot_sequence.extend_from_slice(&instance.dependent_labels[slot..]);
    Signature { incoming_label: instance.incoming_label.clone(), slot_sequence }
}

/// Enough to locate an instance in its corpus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InstanceRef {
    pub sentence_ref: String,
    pub core_index: usize,
    pub year: i32,
}

impl From<&Instance> for InstanceRef {
    fn from(i: &Instance) -> Self {
        Self { sentence_ref: i.sentence_ref.clone(), core_index: i.core_index, year: i.year }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub signature: Signature,
    pub instances: Vec<InstanceRef>,
    pub frequency: usize,
    pub constituent_number: usize,
    pub first_occurrence_year: i32,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaphorProfile {
    pub lemma: String,
    pub constructions: Vec<Construction>,
    pub outliers: Vec<InstanceRef>,
    pub outlier_count: usize,
    pub total_instances: usize,
    pub retained_instances: usize,
}

impl MetaphorProfile {
    /// Earliest construction FOY, if any construction survived.
    pub fn first_occurrence_year(&self) -> Option<i32> {
        self.constructions.iter().map(|c| c.first_occurrence_year).min()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    /// Coverage relative to the instances still retained. The smallest
    /// under-covered groups drop out and coverage is recomputed until every
    /// survivor passes.
    #[default]
    FixedPoint,
    /// Coverage relative to every collected instance, applied once.
    SinglePass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterOptions {
    pub min_cluster_size: usize,
    pub min_coverage: f64,
    pub coverage_mode: CoverageMode,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            min_cluster_size: DEFAULT_MIN_CLUSTER_SIZE,
            min_coverage: DEFAULT_MIN_COVERAGE,
            coverage_mode: CoverageMode::FixedPoint,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("no instances to cluster")]
    EmptyInput,
    #[error("instances mix lemmas {0:?} and {1:?}")]
    MixedLemmas(String, String),
}

pub fn cluster(instances: &[Instance], opts: &ClusterOptions) -> Result<MetaphorProfile, ClusterError> {
    let first = instances.first().ok_or(ClusterError::EmptyInput)?;
    if let Some(other) = instances.iter().find(|i| i.lemma != first.lemma) {
        return Err(ClusterError::MixedLemmas(first.lemma.clone(), other.lemma.clone()));
    }

    let mut groups: BTreeMap<Signature, Vec<&Instance>> = BTreeMap::new();
    for inst in instances {
        groups.entry(signature_of(inst)).or_default().push(inst);
    }

    let (mut kept, mut dropped): (Vec<_>, Vec<_>) =
        groups.into_iter().partition(|(_, members)| members.len() >= opts.min_cluster_size);

    loop {
        let denominator = match opts.coverage_mode {
            CoverageMode::FixedPoint => kept.iter().map(|(_, m)| m.len()).sum(),
            CoverageMode::SinglePass => instances.len(),
        };
        let bar = opts.min_coverage * denominator as f64;
        let cut = match opts.coverage_mode {
            CoverageMode::SinglePass => bar,
            // Only the smallest size class goes per round, so the survivors
            // are always the largest groups.
            CoverageMode::FixedPoint => match kept.iter().map(|(_, m)| m.len()).min() {
                Some(smallest) if (smallest as f64) < bar => smallest as f64 + 0.5,
                _ => break,
            },
        };
        let (ok, low): (Vec<_>, Vec<_>) = kept.into_iter().partition(|(_, m)| m.len() as f64 >= cut);
        kept = ok;
        dropped.extend(low);
        if opts.coverage_mode == CoverageMode::SinglePass {
            break;
        }
    }

    let retained_instances: usize = kept.iter().map(|(_, m)| m.len()).sum();
    let mut constructions: Vec<Construction> = kept
        .into_iter()
        .map(|(signature, members)| {
            let first_occurrence_year = members.iter().map(|i| i.year).min().expect("non-empty group");
            Construction {
                constituent_number: signature.constituent_number(),
                frequency: members.len(),
                first_occurrence_year,
                coverage: members.len() as f64 / retained_instances as f64,
                instances: members.into_iter().map(InstanceRef::from).collect(),
                signature,
            }
        })
        .collect();
    constructions.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then(a.first_occurrence_year.cmp(&b.first_occurrence_year))
            .then_with(|| a.signature.cmp(&b.signature))
    });

    let mut outliers: Vec<InstanceRef> =
        dropped.into_iter().flat_map(|(_, m)| m.into_iter().map(InstanceRef::from)).collect();
    outliers.sort();

    Ok(MetaphorProfile {
        lemma: first.lemma.clone(),
        constructions,
        outlier_count: outliers.len(),
        outliers,
        total_instances: instances.len(),
        retained_instances,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub pattern: String,
    pub incoming_label: String,
    pub constituent_number: usize,
    pub first_occurrence_year: i32,
    pub frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub lemma: String,
    pub construction_count: usize,
    pub retained_instances: usize,
    pub total_instances: usize,
    pub constructions: Vec<SummaryEntry>,
    /// Set when every instance ended up an outlier.
    pub no_constructions: bool,
}

impl ProfileSummary {
    /// `615/726` style instance count.
    pub fn instance_ratio(&self) -> String {
        format!("{}/{}", self.retained_instances, self.total_instances)
    }
}

pub fn summarize(profile: &MetaphorProfile) -> ProfileSummary {
    ProfileSummary {
        lemma: profile.lemma.clone(),
        construction_count: profile.constructions.len(),
        retained_instances: profile.retained_instances,
        total_instances: profile.total_instances,
        constructions: profile
            .constructions
            .iter()
            .map(|c| SummaryEntry {
                pattern: c.signature.pattern(),
                incoming_label: c.signature.incoming_label.clone(),
                constituent_number: c.constituent_number,
                first_occurrence_year: c.first_occurrence_year,
                frequency: c.frequency,
            })
            .collect(),
        no_constructions: profile.constructions.is_empty(),
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    lemma: &'a str,
    signature: String,
    incoming_label: &'a str,
    frequency: usize,
    constituent_number: usize,
    first_occurrence_year: i32,
    coverage: f64,
}

pub const CONSTRUCTIONS_CSV_HEADER: [&str; 7] =
    ["lemma", "signature", "incoming_label", "frequency", "constituent_number", "first_occurrence_year", "coverage"];

/// Writes the constructions table. The header is always written, even
/// for a profile without constructions.
pub fn write_constructions_csv<W: io::Write>(w: W, profile: &MetaphorProfile) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(CONSTRUCTIONS_CSV_HEADER)?;
    for c in &profile.constructions {
        wtr.serialize(CsvRow {
            lemma: &profile.lemma,
            signature: c.signature.pattern(),
            incoming_label: &c.signature.incoming_label,
            frequency: c.frequency,
            constituent_number: c.constituent_number,
            first_occurrence_year: c.first_occurrence_year,
            coverage: c.coverage,
        })?;
    }
    wtr.flush()?;
    Ok(())
}
