//! Property tests for the matching, merging and data-model invariants.

use std::sync::Arc;

use proptest::prelude::*;

use capture::datamodel::{self, CandidateEntry, EvaluationRecord};
use capture::matcher::{score_type, ElementType, MatchConfig};
use capture::{BenchmarkSample, CaptionParser, ElementSets, LexiconStore, WordVectorProvider};

fn lexicon() -> Arc<LexiconStore> {
    Arc::new(LexiconStore::bundled())
}

/// Small pool of lemmas so random sets overlap often.
const POOL: &[&str] = &[
    "dog", "cat", "car", "automobile", "tree", "bench", "photo", "picture", "lake", "sheep",
    "kitten", "road", "route", "child",
];

fn arb_elements() -> impl Strategy<Value = ElementSets> {
    let obj = prop::collection::btree_set(prop::sample::select(POOL), 0..5);
    (obj.clone(), obj.clone(), obj).prop_map(|(objects, att_objs, rel_objs)| {
        let mut sets = ElementSets {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        };
        for (i, o) in att_objs.iter().enumerate() {
            sets.objects.insert(o.to_string());
            let attr = ["red", "big", "small", "wooden"][i % 4];
            sets.attributes.insert((o.to_string(), attr.to_string()));
        }
        let rel_objs: Vec<&&str> = rel_objs.iter().collect();
        for pair in rel_objs.windows(2) {
            sets.objects.insert(pair[0].to_string());
            sets.objects.insert(pair[1].to_string());
            sets.relations
                .insert((pair[0].to_string(), "near".to_string(), pair[1].to_string()));
        }
        sets
    })
}

proptest! {
    #[test]
    fn merge_laws(a in arb_elements(), b in arb_elements(), c in arb_elements()) {
        prop_assert_eq!(a.merge(&a), a.clone());
        prop_assert_eq!(a.merge(&b), b.merge(&a));
        prop_assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
        prop_assert_eq!(a.merge(&ElementSets::default()), a.clone());
    }

    #[test]
    fn scores_stay_in_unit_interval(
        cand in prop::collection::vec(prop::sample::select(POOL), 0..6),
        reference in prop::collection::vec(prop::sample::select(POOL), 0..6),
    ) {
        let lex = lexicon();
        let emb = WordVectorProvider::bundled();
        let cand: Vec<String> = cand.into_iter().map(str::to_string).collect();
        let reference: Vec<String> = reference.into_iter().map(str::to_string).collect();
        let r = score_type(
            &cand, &reference, &lex, Some(&emb), ElementType::Object, &MatchConfig::default(),
        ).unwrap();
        for v in [r.precision, r.recall, r.f1] {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{v}");
        }
        for s in r.cand_soft.iter().chain(&r.gt_soft) {
            prop_assert!((0.0..=1.0 + 1e-12).contains(s));
        }
    }

    #[test]
    fn score_is_order_invariant(
        mut cand in prop::collection::vec(prop::sample::select(POOL), 1..6),
        reference in prop::collection::vec(prop::sample::select(POOL), 1..6),
    ) {
        let lex = lexicon();
        let cand_s: Vec<String> = cand.iter().map(|s| s.to_string()).collect();
        let reference: Vec<String> = reference.into_iter().map(str::to_string).collect();
        let cfg = MatchConfig::default();
        let fwd = score_type(&cand_s, &reference, &lex, None, ElementType::Object, &cfg).unwrap();
        cand.reverse();
        let rev_s: Vec<String> = cand.iter().map(|s| s.to_string()).collect();
        let rev = score_type(&rev_s, &reference, &lex, None, ElementType::Object, &cfg).unwrap();
        prop_assert_eq!(fwd.precision, rev.precision);
        prop_assert_eq!(fwd.recall, rev.recall);
        prop_assert_eq!(fwd.f1, rev.f1);
    }

    #[test]
    fn adding_an_exact_match_never_hurts(
        cand in prop::collection::vec(prop::sample::select(POOL), 0..5),
        reference in prop::collection::vec(prop::sample::select(POOL), 1..6),
    ) {
        let lex = lexicon();
        let emb = WordVectorProvider::bundled();
        let cand: Vec<String> = cand.into_iter().map(str::to_string).collect();
        let reference: Vec<String> = reference.into_iter().map(str::to_string).collect();
        // pick a reference element the matcher currently leaves
        // unmatched: absent from the candidate and synonymous with none
        // of its elements
        let unmatched = |r: &&String| {
            !cand.contains(r)
                && !cand
                    .iter()
                    .any(|c| lex.synonyms_overlap(c, r, capture::lexicon::WordNetPos::Noun))
        };
        let Some(extra) = reference.iter().find(unmatched).cloned() else {
            return Ok(());
        };
        let mut grown = cand.clone();
        grown.push(extra);
        let cfg = MatchConfig::default();
        let before =
            score_type(&cand, &reference, &lex, Some(&emb), ElementType::Object, &cfg).unwrap();
        let after =
            score_type(&grown, &reference, &lex, Some(&emb), ElementType::Object, &cfg).unwrap();
        prop_assert!(
            after.recall + 1e-12 >= before.recall,
            "recall fell from {} to {}",
            before.recall,
            after.recall
        );
        // without the soft stage, the new element raises both matched
        // counts by one, which can only help F1
        let plain = MatchConfig { soft_matching: false, ..MatchConfig::default() };
        let before = score_type(&cand, &reference, &lex, None, ElementType::Object, &plain).unwrap();
        let after = score_type(&grown, &reference, &lex, None, ElementType::Object, &plain).unwrap();
        prop_assert!(after.f1 + 1e-12 >= before.f1);
    }

    #[test]
    fn records_roundtrip(scores in prop::collection::vec(0.0f64..=1.0, 1..8)) {
        let records: Vec<EvaluationRecord> = scores
            .iter()
            .enumerate()
            .map(|(i, s)| EvaluationRecord {
                sample_id: format!("s{i}"),
                model_name: "m".into(),
                metric_name: "bleu".into(),
                score: *s,
                sub_scores: [("brevity".to_string(), *s)].into_iter().collect(),
            })
            .collect();
        let text = datamodel::records_to_string(&records).unwrap();
        let reloaded = datamodel::load_records_str(&text).unwrap();
        prop_assert_eq!(records, reloaded);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn baseline_output_ranges(
        cand_words in prop::collection::vec(prop::sample::select(POOL), 1..8),
        ref_words in prop::collection::vec(prop::sample::select(POOL), 1..8),
    ) {
        use capture::baselines::{bleu, cider_d, meteor, rouge_l};
        let lex = lexicon();
        let cand = cand_words.join(" ");
        let reference = vec![ref_words.join(" ")];
        for v in [
            bleu(&cand, &reference, 2),
            rouge_l(&cand, &reference),
            meteor(&cand, &reference, &lex),
        ] {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{v}");
        }
        let mut cands = std::collections::BTreeMap::new();
        let mut refs = std::collections::BTreeMap::new();
        cands.insert("a".to_string(), cand);
        refs.insert("a".to_string(), reference);
        cands.insert("b".to_string(), "a quiet street".to_string());
        refs.insert("b".to_string(), vec!["a busy street".to_string()]);
        for v in cider_d(&cands, &refs).values() {
            prop_assert!((0.0..=10.0 + 1e-9).contains(v), "{v}");
        }
    }

    #[test]
    fn benchmark_roundtrip(n_samples in 1usize..5, n_cands in 1usize..4) {
        let samples: Vec<BenchmarkSample> = (0..n_samples)
            .map(|i| BenchmarkSample {
                sample_id: format!("s{i}"),
                image_ref: (i % 2 == 0).then(|| format!("img/{i}.jpg")),
                references: vec![format!("a dog near a tree {i}")],
                candidates: (0..n_cands)
                    .map(|j| CandidateEntry {
                        model_name: format!("m{j}"),
                        caption: format!("a dog {j}"),
                        expert_score: Some((j as f64) / (n_cands as f64)),
                    })
                    .collect(),
            })
            .collect();
        let text: String = samples
            .iter()
            .map(|s| serde_json::to_string(s).unwrap() + "\n")
            .collect();
        prop_assert_eq!(datamodel::load_benchmark_str(&text).unwrap(), samples);
    }

    #[test]
    fn parse_caption_invariant_under_sentence_shuffle(seed in 0u64..64) {
        let parser = CaptionParser::bundled(lexicon(), true);
        let caption = "A red car is parked near a tall tree. \
                       Two white sheep graze in a meadow. \
                       The photo shows a calm lake.";
        let mut sentences: Vec<&str> = caption.split_inclusive(". ").collect();
        // deterministic pseudo-shuffle
        let by = (seed as usize) % sentences.len();
        sentences.rotate_left(by);
        let shuffled: String = sentences
            .iter()
            .map(|s| s.trim())
            .collect::<Vec<_>>()
            .join(" ");
        prop_assert_eq!(
            parser.parse_caption(caption).elements,
            parser.parse_caption(&shuffled).elements
        );
    }
}
