use metasoc_core::corpus::{extract_instances, parse_conllu_str, Corpus, DepSentence, Strictness, Token};
use proptest::prelude::*;

const LEMMAS: [&str; 4] = ["chao", "fa", "da", "shang"];
const LABELS: [&str; 6] = ["NSUBJ", "DOBJ", "CONJ", "DEP", "ADVMOD", "CCOMP"];

/// A random tree: token `order[0]` is the root, every later token in `order`
/// attaches to some earlier one.
fn arb_sentence(id: usize) -> impl Strategy<Value = DepSentence> {
    (1usize..9)
        .prop_flat_map(|n| {
            (
                Just(n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec(any::<prop::sample::Index>(), n),
                prop::collection::vec(0..LEMMAS.len(), n),
                prop::collection::vec(0..LABELS.len(), n),
                1940i32..2020,
                any::<bool>(),
            )
        })
        .prop_map(move |(n, order, parents, lemmas, labels, year, extra)| {
            let mut head = vec![0; n];
            for k in 1..n {
                head[order[k]] = order[parents[k].index(k)] + 1;
            }
            let tokens = (0..n)
                .map(|i| Token {
                    index: i + 1,
                    surface: format!("w{i}"),
                    lemma: LEMMAS[lemmas[i]].to_string(),
                    upos: "VERB".into(),
                    head: head[i],
                    deprel: if head[i] == 0 { "ROOT".into() } else { LABELS[labels[i]].into() },
                    passthrough: extra.then(|| ["VV".into(), "_".into(), "_".into(), format!("SpaceAfter=No|i={i}")]),
                })
                .collect();
            DepSentence { sent_id: format!("s{id}"), year, tokens }
        })
}

fn arb_corpus() -> impl Strategy<Value = Corpus> {
    (0usize..12).prop_flat_map(|n| (0..n).map(arb_sentence).collect::<Vec<_>>()).prop_map(Corpus::new)
}

proptest! {
    #[test]
    fn generated_trees_are_valid(c in arb_corpus()) {
        for s in &c.sentences {
            prop_assert!(s.validate().is_ok());
        }
    }

    #[test]
    fn round_trip(c in arb_corpus()) {
        let text = c.to_conllu();
        let parsed = parse_conllu_str(&text, Strictness::Strict).unwrap();
        prop_assert!(parsed.skipped.is_empty());
        prop_assert_eq!(parsed.corpus, c);
    }

    #[test]
    fn dependents_reconstruct_from_sentence(c in arb_corpus(), li in 0..LEMMAS.len()) {
        let lemma = LEMMAS[li];
        let instances = extract_instances(&c, lemma);
        let expected_count: usize = c
            .sentences
            .iter()
            .map(|s| s.tokens.iter().filter(|t| t.lemma == lemma).count())
            .sum();
        prop_assert_eq!(instances.len(), expected_count);
        for inst in &instances {
            let s = c.sentences.iter().find(|s| s.sent_id == inst.sentence_ref).unwrap();
            let mut labels = Vec::new();
            for i in 1..=s.tokens.len() {
                let t = s.token(i).unwrap();
                if t.head == inst.core_index {
                    labels.push(t.deprel.clone());
                }
            }
            prop_assert_eq!(&inst.dependent_labels, &labels);
            let core = s.token(inst.core_index).unwrap();
            prop_assert_eq!(&core.lemma, lemma);
            prop_assert_eq!(inst.year, s.year);
            let incoming = if core.head == 0 { "ROOT" } else { core.deprel.as_str() };
            prop_assert_eq!(inst.incoming_label.as_str(), incoming);
        }
    }

    #[test]
    fn extraction_is_deterministic_and_sorted(c in arb_corpus()) {
        let a = extract_instances(&c, "chao");
        prop_assert_eq!(&a, &extract_instances(&c, "chao"));
        for w in a.windows(2) {
            prop_assert!((w[0].year, &w[0].sentence_ref, w[0].core_index) <= (w[1].year, &w[1].sentence_ref, w[1].core_index));
        }
    }
}
