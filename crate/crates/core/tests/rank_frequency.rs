use metasoc_core::constructions::{cluster, ClusterOptions};
use metasoc_core::corpus::Instance;
use metasoc_core::stats::rank_frequency;

fn group(label: &str, n: usize, year: i32, start: usize) -> Vec<Instance> {
    (0..n)
        .map(|i| Instance {
            lemma: "chao".into(),
            sentence_ref: format!("s{:04}", start + i),
            year: year + i as i32,
            core_index: 1,
            incoming_label: label.into(),
            dependent_labels: vec![],
            dependent_indices: vec![],
        })
        .collect()
}

#[test]
fn ties_follow_profile_order() {
    // Two groups of 10 with different first years, one of 5.
    let mut instances = group("DEP", 10, 1960, 0);
    instances.extend(group("CONJ", 10, 1955, 100));
    instances.extend(group("NSUBJ", 5, 1950, 200));
    let opts = ClusterOptions { min_cluster_size: 1, min_coverage: 0.0, ..Default::default() };
    let p = cluster(&instances, &opts).unwrap();
    let labels: Vec<&str> = p.constructions.iter().map(|c| c.signature.incoming_label.as_str()).collect();
    assert_eq!(labels, ["CONJ", "DEP", "NSUBJ"]);
    let rf = rank_frequency(&p).unwrap();
    assert_eq!(rf.points(), &[(1.0, 10.0), (2.0, 10.0), (3.0, 5.0)]);
}

#[test]
fn equal_foy_ties_break_on_signature() {
    let mut instances = group("DEP", 10, 1960, 0);
    instances.extend(group("CONJ", 10, 1960, 100));
    let opts = ClusterOptions { min_cluster_size: 1, min_coverage: 0.0, ..Default::default() };
    let p = cluster(&instances, &opts).unwrap();
    assert_eq!(p.constructions[0].signature.incoming_label, "CONJ");
    assert_eq!(rank_frequency(&p).unwrap().points(), &[(1.0, 10.0), (2.0, 10.0)]);
}
