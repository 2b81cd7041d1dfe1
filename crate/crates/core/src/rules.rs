//! Transformation rules between construction classes, mined from the order
//! in which classes first appear across metaphors.
//!
//! A construction's class is the label of the vehicle's incoming arc. For
//! every ordered pair of classes `(Ci, Cj)` the support is the number of
//! metaphors in which `Ci` is attested strictly earlier than `Cj`; ties
//! support neither direction. The conditional probability divides that
//! support by the number of metaphors that contain `Ci` at all.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::MetaphorProfile;

pub const DEFAULT_MIN_FREQUENCY: usize = 6;
pub const DEFAULT_MIN_PROBABILITY: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTimeline {
    pub lemma: String,
    /// First-occurrence year of each incoming-arc class.
    pub class_foys: BTreeMap<String, i32>,
}

impl ClassTimeline {
    pub fn new<I, S>(lemma: impl Into<String>, foys: I) -> Self
    where
        I: IntoIterator<Item = (S, i32)>,
        S: Into<String>,
    {
        let mut class_foys = BTreeMap::new();
        for (class, year) in foys {
            let e = class_foys.entry(class.into()).or_insert(year);
            *e = (*e).min(year);
        }
        Self { lemma: lemma.into(), class_foys }
    }
}

/// Groups a profile's constructions by incoming label and keeps the
/// earliest FOY per class.
pub fn class_timeline(profile: &MetaphorProfile) -> ClassTimeline {
    ClassTimeline::new(
        profile.lemma.clone(),
        profile.constructions.iter().map(|c| (c.signature.incoming_label.clone(), c.first_occurrence_year)),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformationRule {
    pub antecedent: String,
    pub consequent: String,
    pub frequency: usize,
    pub conditional_probability: f64,
}

impl TransformationRule {
    /// `CONJ(X, VEHICLE) → DEP(X, VEHICLE)  p=1.00  n=7`
    pub fn display_line(&self) -> String {
        format!(
            "{} → {}  p={:.2}  n={}",
            class_term(&self.antecedent),
            class_term(&self.consequent),
            self.conditional_probability,
            self.frequency
        )
    }
}

fn class_term(class: &str) -> String {
    if crate::corpus::is_root_label(class) {
        format!("{class}(ROOT, VEHICLE)")
    } else {
        format!("{class}(X, VEHICLE)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// Metaphors in which the antecedent class occurs.
    #[default]
    Antecedent,
    /// Metaphors in which both classes occur.
    BothClasses,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleOptions {
    pub min_frequency: usize,
    pub min_probability: f64,
    pub denominator: Denominator,
}

impl Default for RuleOptions {
    fn default() -> Self {
        Self {
            min_frequency: DEFAULT_MIN_FREQUENCY,
            min_probability: DEFAULT_MIN_PROBABILITY,
            denominator: Denominator::Antecedent,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("no timelines to mine")]
    EmptyInput,
}

/// Support and denominator counts for every ordered class pair with
/// nonzero support.
#[derive(Debug, Clone, Default)]
pub struct PairCounts {
    pub precedes: BTreeMap<(String, String), usize>,
    pub contains: BTreeMap<String, usize>,
    pub co_occurs: BTreeMap<(String, String), usize>,
}

impl PairCounts {
    pub fn tally(timelines: &[ClassTimeline]) -> Self {
        let mut counts = PairCounts::default();
        for t in timelines {
            for (ci, &yi) in &t.class_foys {
                *counts.contains.entry(ci.clone()).or_default() += 1;
                for (cj, &yj) in &t.class_foys {
                    if ci == cj {
                        continue;
                    }
                    *counts.co_occurs.entry((ci.clone(), cj.clone())).or_default() += 1;
                    if yi < yj {
                        *counts.precedes.entry((ci.clone(), cj.clone())).or_default() += 1;
                    }
                }
            }
        }
        counts
    }

    /// Sums two tallies over disjoint timeline sets.
    pub fn merge(mut self, other: PairCounts) -> Self {
        for (k, v) in other.precedes {
            *self.precedes.entry(k).or_default() += v;
        }
        for (k, v) in other.contains {
            *self.contains.entry(k).or_default() += v;
        }
        for (k, v) in other.co_occurs {
            *self.co_occurs.entry(k).or_default() += v;
        }
        self
    }
}

pub fn mine_rules(timelines: &[ClassTimeline], opts: &RuleOptions) -> Result<Vec<TransformationRule>, RuleError> {
    if timelines.is_empty() {
        return Err(RuleError::EmptyInput);
    }
    let counts = PairCounts::tally(timelines);
    let mut rules: Vec<TransformationRule> = counts
        .precedes
        .iter()
        .filter_map(|((ci, cj), &frequency)| {
            let denom = match opts.denominator {
                Denominator::Antecedent => counts.contains[ci],
                Denominator::BothClasses => counts.co_occurs[&(ci.clone(), cj.clone())],
            };
            let conditional_probability = frequency as f64 / denom as f64;
            (frequency > 0 && frequency >= opts.min_frequency && conditional_probability >= opts.min_probability).then(
                || TransformationRule {
                    antecedent: ci.clone(),
                    consequent: cj.clone(),
                    frequency,
                    conditional_probability,
                },
            )
        })
        .collect();
    rules.sort_by(|a, b| {
        b.conditional_probability
            .total_cmp(&a.conditional_probability)
            .then(b.frequency.cmp(&a.frequency))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
    Ok(rules)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingPrediction {
    pub antecedent: String,
    pub consequent: String,
    pub antecedent_foy: i32,
    pub consequent_foy: i32,
    /// True when the antecedent is attested strictly earlier.
    pub satisfied: bool,
}

/// Checks each rule whose two classes both occur in `timeline`.
pub fn apply_rules_report(rules: &[TransformationRule], timeline: &ClassTimeline) -> Vec<OrderingPrediction> {
    rules
        .iter()
        .filter_map(|r| {
            let a = *timeline.class_foys.get(&r.antecedent)?;
            let c = *timeline.class_foys.get(&r.consequent)?;
            Some(OrderingPrediction {
                antecedent: r.antecedent.clone(),
                consequent: r.consequent.clone(),
                antecedent_foy: a,
                consequent_foy: c,
                satisfied: a < c,
            })
        })
        .collect()
}

/// Plain-text listing, one rule per line.
pub fn rules_text_report(rules: &[TransformationRule]) -> String {
    let mut out = String::new();
    for r in rules {
        let _ = writeln!(out, "{}", r.display_line());
    }
    out
}

/// Every class seen across the timelines.
pub fn class_inventory(timelines: &[ClassTimeline]) -> BTreeSet<&str> {
    timelines.iter().flat_map(|t| t.class_foys.keys().map(String::as_str)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{Construction, Signature, CORE_WORD};
    use proptest::prelude::*;

    fn tl(name: &str, foys: &[(&str, i32)]) -> ClassTimeline {
        ClassTimeline::new(name, foys.iter().map(|(c, y)| (*c, *y)))
    }

    fn construction(label: &str, foy: i32) -> Construction {
        Construction {
            signature: Signature { incoming_label: label.into(), slot_sequence: vec![CORE_WORD.into()] },
            instances: vec![],
            frequency: 7,
            constituent_number: 0,
            first_occurrence_year: foy,
            coverage: 0.0,
        }
    }

    fn profile(cs: Vec<Construction>) -> MetaphorProfile {
        MetaphorProfile {
            lemma: "lianyin".into(),
            constructions: cs,
            outliers: vec![],
            outlier_count: 0,
            total_instances: 0,
            retained_instances: 0,
        }
    }

    #[test]
    fn timeline_takes_class_minimum() {
        let p = profile(vec![construction("CONJ", 1981), construction("CONJ", 1988), construction("NSUBJ", 1984)]);
        let t = class_timeline(&p);
        assert_eq!(t.class_foys.len(), 2);
        assert_eq!(t.class_foys["CONJ"], 1981);
        assert_eq!(t.class_foys["NSUBJ"], 1984);
        let single = class_timeline(&profile(vec![construction("ROOT", 1990)]));
        assert_eq!(single.class_foys.len(), 1);
        let tie = class_timeline(&profile(vec![construction("ROOT", 1990), construction("DEP", 1990)]));
        assert_eq!(tie.class_foys.len(), 2);
    }

    #[test]
    fn two_timelines_unfiltered() {
        let ts = [tl("a", &[("CONJ", 1981), ("NSUBJ", 1984)]), tl("b", &[("CONJ", 1982), ("NSUBJ", 1990)])];
        let open = RuleOptions { min_frequency: 0, min_probability: 0.0, ..Default::default() };
        let rules = mine_rules(&ts, &open).unwrap();
        assert_eq!(
            rules,
            vec![TransformationRule {
                antecedent: "CONJ".into(),
                consequent: "NSUBJ".into(),
                frequency: 2,
                conditional_probability: 1.0
            }]
        );
        assert!(mine_rules(&ts, &RuleOptions::default()).unwrap().is_empty());
        assert_eq!(mine_rules(&[], &open), Err(RuleError::EmptyInput));
    }

    #[test]
    fn both_classes_denominator() {
        let ts = [tl("a", &[("CONJ", 1981), ("NSUBJ", 1984)]), tl("b", &[("CONJ", 1982)])];
        let open = RuleOptions { min_frequency: 0, min_probability: 0.0, ..Default::default() };
        assert_eq!(mine_rules(&ts, &open).unwrap()[0].conditional_probability, 0.5);
        let both = RuleOptions { denominator: Denominator::BothClasses, ..open };
        assert_eq!(mine_rules(&ts, &both).unwrap()[0].conditional_probability, 1.0);
    }

    #[test]
    fn predictions() {
        let rule = TransformationRule {
            antecedent: "CONJ".into(),
            consequent: "NSUBJ".into(),
            frequency: 7,
            conditional_probability: 1.0,
        };
        let ok = apply_rules_report(std::slice::from_ref(&rule), &tl("a", &[("CONJ", 1981), ("NSUBJ", 1984)]));
        assert_eq!(ok.len(), 1);
        assert!(ok[0].satisfied);
        let bad = apply_rules_report(std::slice::from_ref(&rule), &tl("a", &[("CONJ", 1990), ("NSUBJ", 1984)]));
        assert!(!bad[0].satisfied);
        assert!(apply_rules_report(&[rule], &tl("a", &[("DEP", 1990)])).is_empty());
    }

    #[test]
    fn display_line_format() {
        let r = TransformationRule {
            antecedent: "CONJ".into(),
            consequent: "DEP".into(),
            frequency: 7,
            conditional_probability: 1.0,
        };
        assert_eq!(r.display_line(), "CONJ(X, VEHICLE) → DEP(X, VEHICLE)  p=1.00  n=7");
        let r = TransformationRule { antecedent: "ROOT".into(), ..r };
        assert!(r.display_line().starts_with("ROOT(ROOT, VEHICLE)"));
    }

    fn arb_timelines() -> impl Strategy<Value = Vec<ClassTimeline>> {
        let classes = ["CONJ", "DEP", "ROOT", "NSUBJ", "CCOMP"];
        prop::collection::vec(prop::collection::vec(prop::option::of(1950i32..1960), classes.len()), 1..15).prop_map(
            move |rows| {
                rows.into_iter()
                    .enumerate()
                    .map(|(i, years)| {
                        ClassTimeline::new(
                            format!("m{i}"),
                            classes.iter().zip(years).filter_map(|(c, y)| y.map(|y| (*c, y))),
                        )
                    })
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn filters_are_monotone(ts in arb_timelines(), f in 0usize..8, p in 0.0f64..1.0) {
            let loose = mine_rules(&ts, &RuleOptions { min_frequency: f, min_probability: p, ..Default::default() }).unwrap();
            let tight = mine_rules(&ts, &RuleOptions { min_frequency: f + 1, min_probability: (p + 0.1).min(1.0), ..Default::default() }).unwrap();
            for r in &tight {
                prop_assert!(loose.contains(r));
            }
        }

        #[test]
        fn probability_bounded_and_deterministic(ts in arb_timelines()) {
            let open = RuleOptions { min_frequency: 0, min_probability: 0.0, ..Default::default() };
            let a = mine_rules(&ts, &open).unwrap();
            let b = mine_rules(&ts, &open).unwrap();
            prop_assert_eq!(&a, &b);
            for r in &a {
                prop_assert!(r.frequency > 0);
                prop_assert!(r.conditional_probability > 0.0 && r.conditional_probability <= 1.0);
                prop_assert!(r.antecedent != r.consequent);
            }
        }

        #[test]
        fn tally_merges_associatively(ts in arb_timelines(), split in 0usize..15) {
            let k = split.min(ts.len());
            let whole = PairCounts::tally(&ts);
            let parts = PairCounts::tally(&ts[..k]).merge(PairCounts::tally(&ts[k..]));
            prop_assert_eq!(whole.precedes, parts.precedes);
            prop_assert_eq!(whole.contains, parts.contains);
        }
    }
}
