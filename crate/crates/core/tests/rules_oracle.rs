use std::collections::BTreeSet;

use metasoc_core::rules::{mine_rules, ClassTimeline, Denominator, RuleOptions};
use proptest::prelude::*;

fn tl(name: &str, foys: &[(&str, i32)]) -> ClassTimeline {
    ClassTimeline::new(name.to_string(), foys.iter().map(|&(c, y)| (c.to_string(), y)))
}

fn fixture() -> Vec<ClassTimeline> {
    vec![
        tl("m1", &[("CONJ", 1950), ("DEP", 1960), ("ROOT", 1955), ("NSUBJ", 1965), ("CCOMP", 1952)]),
        tl("m2", &[("CONJ", 1951), ("DEP", 1958), ("ROOT", 1953), ("NSUBJ", 1962), ("CCOMP", 1956)]),
        tl("m3", &[("CONJ", 1960), ("DEP", 1970), ("ROOT", 1962), ("NSUBJ", 1968), ("CCOMP", 1961)]),
        tl("m4", &[("CONJ", 1955), ("DEP", 1956), ("ROOT", 1957), ("NSUBJ", 1959)]),
        tl("m5", &[("CONJ", 1970), ("DEP", 1980), ("ROOT", 1975), ("NSUBJ", 1978), ("CCOMP", 1972)]),
        tl("m6", &[("CONJ", 1948), ("DEP", 1990), ("ROOT", 1949), ("NSUBJ", 1960), ("CCOMP", 1950)]),
        tl("m7", &[("CONJ", 1965), ("DEP", 1966), ("ROOT", 1960), ("NSUBJ", 1965)]),
        tl("m8", &[("ROOT", 1950), ("NSUBJ", 1960), ("CCOMP", 1955)]),
        tl("m9", &[("ROOT", 1952), ("NSUBJ", 1970)]),
        tl("m10", &[("ROOT", 1970), ("NSUBJ", 1960), ("CCOMP", 1980)]),
        tl("m11", &[("NSUBJ", 1950), ("DOBJ", 1960)]),
        tl("m12", &[("DOBJ", 1955), ("CCOMP", 1950), ("NSUBJ", 1958)]),
    ]
}

/// `(antecedent, consequent, precedes, antecedent_count, both_count, ties)`
/// for every ordered pair, by direct enumeration.
fn enumerate(ts: &[ClassTimeline]) -> Vec<(String, String, usize, usize, usize, usize)> {
    let classes: BTreeSet<&String> = ts.iter().flat_map(|t| t.class_foys.keys()).collect();
    let mut out = Vec::new();
    for &a in &classes {
        for &b in &classes {
            if a == b {
                continue;
            }
            let (mut prec, mut has_a, mut both, mut ties) = (0, 0, 0, 0);
            for t in ts {
                let ya = t.class_foys.get(a);
                let yb = t.class_foys.get(b);
                if ya.is_some() {
                    has_a += 1;
                }
                if let (Some(ya), Some(yb)) = (ya, yb) {
                    both += 1;
                    if ya < yb {
                        prec += 1;
                    }
                    if ya == yb {
                        ties += 1;
                    }
                }
            }
            out.push((a.clone(), b.clone(), prec, has_a, both, ties));
        }
    }
    out
}

#[test]
fn fixture_rules_at_default_filters() {
    let rules = mine_rules(&fixture(), &RuleOptions::default()).unwrap();
    let got: Vec<(&str, &str, usize, f64)> = rules
        .iter()
        .map(|r| (r.antecedent.as_str(), r.consequent.as_str(), r.frequency, r.conditional_probability))
        .collect();
    let expected = [
        ("CONJ", "DEP", 7, 1.0),
        ("ROOT", "NSUBJ", 9, 0.9),
        ("CCOMP", "NSUBJ", 7, 0.875),
        ("CONJ", "NSUBJ", 6, 6.0 / 7.0),
        ("CONJ", "ROOT", 6, 6.0 / 7.0),
    ];
    assert_eq!(got, expected);
    assert_eq!(rules[0].display_line(), "CONJ(X, VEHICLE) → DEP(X, VEHICLE)  p=1.00  n=7");
}

#[test]
fn fixture_counts_match_enumeration() {
    let ts = fixture();
    let unfiltered = RuleOptions { min_frequency: 0, min_probability: 0.0, ..Default::default() };
    let rules = mine_rules(&ts, &unfiltered).unwrap();
    let oracle: Vec<_> = enumerate(&ts).into_iter().filter(|e| e.2 > 0).collect();
    assert_eq!(rules.len(), oracle.len());
    for (a, b, prec, has_a, _, _) in oracle {
        let r = rules.iter().find(|r| r.antecedent == a && r.consequent == b).unwrap();
        assert_eq!(r.frequency, prec);
        assert_eq!(r.conditional_probability, prec as f64 / has_a as f64);
    }
}

#[test]
fn near_misses_are_filtered() {
    let rules = mine_rules(&fixture(), &RuleOptions::default()).unwrap();
    let pairs: BTreeSet<(&str, &str)> = rules.iter().map(|r| (r.antecedent.as_str(), r.consequent.as_str())).collect();
    // 5/7 and 6/10 respectively.
    assert!(!pairs.contains(&("CONJ", "CCOMP")));
    assert!(!pairs.contains(&("ROOT", "DEP")));
}

fn arb_timelines() -> impl Strategy<Value = Vec<ClassTimeline>> {
    const CLASSES: [&str; 6] = ["ROOT", "CONJ", "DEP", "NSUBJ", "DOBJ", "CCOMP"];
    prop::collection::vec(prop::collection::btree_map(prop::sample::select(&CLASSES[..]), 1950i32..1960, 1..6), 1..25)
        .prop_map(|maps| {
            maps.into_iter()
                .enumerate()
                .map(|(i, m)| ClassTimeline::new(format!("m{i}"), m.into_iter().map(|(c, y)| (c.to_string(), y))))
                .collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn support_is_antisymmetric(ts in arb_timelines()) {
        let unfiltered = RuleOptions { min_frequency: 0, min_probability: 0.0, ..Default::default() };
        let rules = mine_rules(&ts, &unfiltered).unwrap();
        let freq = |a: &str, b: &str| rules.iter().find(|r| r.antecedent == a && r.consequent == b).map_or(0, |r| r.frequency);
        for (a, b, _, _, both, ties) in enumerate(&ts) {
            prop_assert_eq!(freq(&a, &b) + freq(&b, &a) + ties, both);
        }
    }

    #[test]
    fn both_classes_denominator_matches_enumeration(ts in arb_timelines()) {
        let opts = RuleOptions { min_frequency: 0, min_probability: 0.0, denominator: Denominator::BothClasses };
        let rules = mine_rules(&ts, &opts).unwrap();
        for (a, b, prec, _, both, _) in enumerate(&ts) {
            let r = rules.iter().find(|r| r.antecedent == a && r.consequent == b);
            match r {
                Some(r) => prop_assert_eq!(r.conditional_probability, prec as f64 / both as f64),
                None => prop_assert_eq!(prec, 0),
            }
        }
    }
}
