//! Diachronic construction mining and self-organized criticality toolkit.
//!
//! The pipeline reads dependency-parsed sentences ([`corpus`]), groups the
//! dependency frames around a target lemma into constructions
//! ([`constructions`]), fits frequency laws ([`fit`]), mines class-ordering
//! rules across metaphors ([`rules`]) and computes summary statistics
//! ([`stats`]). [`sim`] holds the sandpile and network-adoption simulators.

pub mod constructions;
pub mod corpus;
pub mod fit;
pub mod rules;
pub mod sim;
pub mod stats;

pub use constructions::{
    cluster, signature_of, ClusterError, ClusterOptions, Construction, CoverageMode, MetaphorProfile, Signature,
};
pub use corpus::{
    extract_instances, parse_conllu, parse_conllu_str, Corpus, DepSentence, Instance, ParseError, Strictness, Token,
};
pub use fit::{
    fit_logistic, fit_ma_law, fit_power_law, sample_curve, AnyFit, CurveModel, FitError, FitQuality, LogisticFit,
    MaLawFit, PointSet, PowerLawFit, PowerLawMethod,
};
pub use rules::{class_timeline, mine_rules, ClassTimeline, Denominator, RuleError, RuleOptions, TransformationRule};
pub use sim::{
    avalanche_distribution, run_adoption, run_sandpile, AdoptionConfig, AdoptionTrace, AvalancheRecord, Binning,
    SandpileConfig, SimError, Topology,
};
pub use stats::{correlation_matrix, pearson, rank_frequency, CorrelationMatrix, MetaphorRow, StatsError};
