use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use readgauge::demo;
use readgauge::evaluation::kfold_indices;
use readgauge::labeling::{as_age_regression, as_ordered_regression};
use readgauge::lexical::{flesch_features, traditional_scores, ttr_measures, SurfaceStats};
use readgauge::lexicon::{mean_rating, parse_lemmas, parse_norms, parse_senses, NormTable};
use readgauge::models::{fuse, train, FeatureMatrix, ModelKind, TrainConfig};
use readgauge::parse_features::{deviation_from_max_of, deviation_of};
use readgauge::pcfg::{binarize, cky_kbest, Grammar, Rule, Symbol};
use readgauge::pos::{kl_divergence, pos_divergence, pos_ratios, tag, PosDistribution, TagLexicon, POS_FEATURES};
use readgauge::registry::{FeatureSet, Resources, SET_NAMES};
use readgauge::text::{count_syllables, tokenize, word_type_proportions, Vocabulary};
use readgauge::{extract, Document, FeatureVector, KBestParser, RawLabel};

fn word_pool() -> Vec<String> {
    let mut pool: Vec<String> = demo::WORDS
        .iter()
        .flat_map(|(_, common, rare)| common.iter().chain(rare.iter()))
        .map(|w| w.to_string())
        .collect();
    pool.extend(["Zorblat", "glorply", "quibbling", "snarfed", "wugs", ",", ";"].map(String::from));
    pool
}

fn sentences() -> impl Strategy<Value = Vec<Vec<String>>> {
    let pool = word_pool();
    let word = (0..pool.len()).prop_map(move |i| pool[i].clone());
    prop::collection::vec(prop::collection::vec(word, 0..14), 0..7)
}

fn doc(sentences: &[Vec<String>]) -> Document {
    Document::from_tokens("d", sentences, RawLabel::class("x"))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(b.abs())
}

fn demo_resources(vocab: Vocabulary) -> Resources<f64> {
    let g: Grammar<f64> = Grammar::parse(&demo::grammar_text()).unwrap();
    Resources {
        parser: Some(KBestParser::new(&g).unwrap()),
        tag_lexicon: Some(TagLexicon::parse(&demo::tag_lexicon_csv()).unwrap()),
        norms: Some(parse_norms(&demo::norms_csv(), "norms").unwrap()),
        lemmas: Some(parse_lemmas(&demo::lemmas_csv(), "lemmas").unwrap()),
        senses: Some(parse_senses(&demo::senses_csv(), "senses").unwrap()),
        vocabulary: Some(vocab),
        ..Resources::default()
    }
}

/// A small random PCFG over {a, b} without unary cycles.
fn random_grammar(seed: u64) -> Grammar<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let nt = |i: usize| format!("N{i}");
    let mut rules = Vec::new();
    for i in 0..n {
        let mut rhss = vec![vec![Symbol::t(["a", "b"][rng.gen_range(0..2)])]];
        for _ in 0..rng.gen_range(0..3) {
            let rhs = match rng.gen_range(0..4) {
                0 | 1 => vec![Symbol::nt(nt(rng.gen_range(0..n))), Symbol::nt(nt(rng.gen_range(0..n)))],
                2 if i + 1 < n => vec![Symbol::nt(nt(rng.gen_range(i + 1..n)))],
                _ => vec![Symbol::t("b"), Symbol::nt(nt(rng.gen_range(0..n)))],
            };
            if !rhss.contains(&rhs) {
                rhss.push(rhs);
            }
        }
        let w: Vec<f64> = rhss.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        rules.extend(rhss.into_iter().zip(w).map(|(rhs, p)| Rule::new(nt(i), rhs, p / total)));
    }
    Grammar::new(nt(0), rules).unwrap()
}

proptest! {
    #[test]
    fn retokenizing_joined_tokens_is_idempotent(s in "[A-Za-z,.;:!?'()\" -]{0,60}") {
        let once: Vec<String> = tokenize(&s).into_iter().map(|t| t.surface).collect();
        let twice: Vec<String> = tokenize(&once.join(" ")).into_iter().map(|t| t.surface).collect();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn syllables_are_positive_and_pure(w in "[a-zA-Z]{1,20}") {
        let n = count_syllables(&w);
        prop_assert!(n >= 1);
        prop_assert_eq!(n, count_syllables(&w));
    }

    #[test]
    fn word_type_proportions_are_bounded(s in sentences(), size in 0usize..30) {
        let d = doc(&s);
        let vocab = Vocabulary::fit([&d], size);
        let props = word_type_proportions::<f64>(&d, &vocab);
        let sum: f64 = props.values().sum();
        prop_assert!(props.values().all(|v| (0.0..=1.0).contains(&v)));
        prop_assert!(sum <= 1.0 + 1e-12);
        let oov = d.words().any(|w| !vocab.words().contains(&w.lowercased));
        if oov {
            prop_assert!(sum < 1.0);
        }
    }

    #[test]
    fn coverage_is_a_fraction_and_full_coverage_gives_the_mean(
        s in sentences(),
        ratings in prop::collection::vec(1.0f64..20.0, 1..200),
    ) {
        let d = doc(&s);
        let mut partial = NormTable::new("r");
        let mut full = NormTable::new("r");
        for (i, w) in word_pool().iter().enumerate() {
            let r = ratings[i % ratings.len()];
            full.insert(&w.to_lowercase(), r);
            if i % 3 == 0 {
                partial.insert(&w.to_lowercase(), r);
            }
        }
        let (_, cov) = mean_rating(&d, &partial);
        prop_assert!((0.0..=1.0).contains(&cov));
        let (m, cov) = mean_rating(&d, &full);
        let looked_up: Vec<f64> = d.words().map(|w| full.get(&w.lowercased).unwrap()).collect();
        if !looked_up.is_empty() {
            prop_assert_eq!(cov, 1.0);
            let want = looked_up.iter().sum::<f64>() / looked_up.len() as f64;
            prop_assert!((m - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn mean_rating_ignores_segmentation(s in sentences(), cut in 0usize..100) {
        let mut table = NormTable::new("r");
        for (i, w) in word_pool().iter().enumerate().step_by(2) {
            table.insert(&w.to_lowercase(), i as f64 * 0.37);
        }
        let flat: Vec<String> = s.concat();
        let cut = cut.min(flat.len());
        let resplit = vec![flat[..cut].to_vec(), flat[cut..].to_vec()];
        prop_assert_eq!(mean_rating(&doc(&s), &table), mean_rating(&doc(&resplit), &table));
    }

    #[test]
    fn kbest_is_ordered_proper_and_matches_original_scores(seed in any::<u64>(), bits in 0u32..256, len in 1usize..=8) {
        let g = random_grammar(seed);
        let tokens: Vec<&str> = (0..len).map(|i| if bits >> i & 1 == 1 { "b" } else { "a" }).collect();
        let Ok(kb) = cky_kbest(&g, &tokens, 1000) else { return Ok(()) };
        let lps = kb.log_probs();
        prop_assert!(lps.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        prop_assert!(lps.iter().map(|lp| lp.exp()).sum::<f64>() <= 1.0 + 1e-9);
        for p in &kb.parses {
            let direct = g.tree_log_prob(&p.tree).unwrap();
            prop_assert!(close(direct, p.log_prob, 1e-9));
        }
    }

    #[test]
    fn binarized_grammar_is_in_normal_form(seed in any::<u64>()) {
        let cnf = binarize(&random_grammar(seed)).unwrap();
        for r in cnf.rules() {
            let ok = matches!(r.rhs.as_slice(), [Symbol::Terminal(_)] | [Symbol::NonTerminal(_), Symbol::NonTerminal(_)]);
            prop_assert!(ok, "{r} is not in normal form");
        }
    }

    #[test]
    fn parse_deviations_are_nonnegative_shift_invariant_and_monotone(
        mut lps in prop::collection::vec(-200.0f64..0.0, 1..15),
        x in 1usize..12,
        shift in -100.0f64..100.0,
        drop in 0.0f64..50.0,
    ) {
        lps.sort_by(|a, b| b.total_cmp(a));
        let pd = deviation_of(&lps, x).unwrap();
        let pdm = deviation_from_max_of(&lps, x).unwrap();
        prop_assert!(pd >= 0.0 && pdm >= 0.0);
        prop_assert_eq!(deviation_of(&lps, 1).unwrap(), 0.0);
        prop_assert_eq!(deviation_from_max_of(&lps, 1).unwrap(), 0.0);
        let shifted: Vec<f64> = lps.iter().map(|v| v + shift).collect();
        prop_assert!(close(deviation_of(&shifted, x).unwrap(), pd, 1e-9));
        prop_assert!(close(deviation_from_max_of(&shifted, x).unwrap(), pdm, 1e-9));
        if x <= lps.len() {
            let mut lowered = lps.clone();
            lowered[x - 1] -= drop;
            prop_assert!(deviation_from_max_of(&lowered, x).unwrap() >= pdm - 1e-12);
        }
    }

    #[test]
    fn kl_is_nonnegative_and_zero_only_on_equality(
        a in prop::collection::vec(0.01f64..1.0, 1..8),
        b in prop::collection::vec(0.01f64..1.0, 1..8),
    ) {
        let n = a.len().min(b.len());
        let norm = |v: &[f64]| {
            let s: f64 = v[..n].iter().sum();
            PosDistribution::from_probs(v[..n].iter().enumerate().map(|(i, p)| (format!("T{i}"), p / s)))
        };
        let (p, q) = (norm(&a), norm(&b));
        let d = kl_divergence(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(kl_divergence(&p, &p).unwrap().abs() <= 1e-12);
        let differ = p.iter().any(|(t, v)| (v - q.prob(t)).abs() > 1e-6);
        if differ {
            prop_assert!(d > 0.0);
        }
    }

    #[test]
    fn pos_features_stay_in_range_and_tagging_is_deterministic(s in sentences()) {
        let lexicon = TagLexicon::parse(&demo::tag_lexicon_csv()).unwrap();
        let d = doc(&s);
        let tagged = tag(&d, Some(&lexicon)).unwrap();
        prop_assert_eq!(&tagged, &tag(&d, Some(&lexicon)).unwrap());
        let ratios = pos_ratios::<f64>(&tagged);
        prop_assert_eq!(ratios.len(), POS_FEATURES.len());
        for (name, v) in ratios.iter() {
            prop_assert!(v >= 0.0, "{name} = {v}");
            let share = ["adverb_variation", "adjective_variation", "noun_variation", "verb_variation_2"];
            if name.ends_with("_per_word") || share.contains(&name) {
                prop_assert!(v <= 1.0 + 1e-12, "{name} = {v}");
            }
        }
        prop_assert!(pos_divergence::<f64>(&tagged) >= 0.0);
    }

    #[test]
    fn traditional_scores_match_the_closed_forms(
        wps in 0.0f64..60.0, spw in 0.0f64..4.0, cpw in 0.0f64..12.0, spword in 0.0f64..1.0,
        poly in 0.0f64..1.0, mono in 0.0f64..1.0, long in 0.0f64..1.0, pps in 0.0f64..20.0,
    ) {
        let s = SurfaceStats {
            n_sentences: 1, n_words: 1, n_characters: 1, n_syllables: 1,
            words_per_sentence: wps, syllables_per_word: spw, characters_per_word: cpw,
            sentences_per_word: spword, prop_polysyllabic: poly, prop_monosyllabic: mono,
            prop_long_words: long, polysyllabic_per_sentence: pps,
        };
        let t = traditional_scores(&s);
        prop_assert!(close(t.flesch_kincaid, 0.39 * wps + 11.8 * spw - 15.59, 1e-9));
        prop_assert!(close(t.flesch, 206.835 - 1.015 * wps - 84.6 * spw, 1e-9));
        prop_assert!(close(t.ari, 0.5 * wps + 4.71 * cpw - 21.43, 1e-9));
        prop_assert!(close(t.coleman_liau, 5.8799 * cpw - 29.5873 * spword - 15.8007, 1e-9));
        prop_assert!(close(t.smog, 3.1291 + 1.0430 * (30.0 * pps).sqrt(), 1e-9));
        prop_assert!(close(t.fog, 0.4 * (wps + poly), 1e-9));
        prop_assert!(close(t.forcast, 20.0 - 15.0 * mono, 1e-9));
        prop_assert!(close(t.lix, wps + 100.0 * long, 1e-9));
    }

    #[test]
    fn duplicating_sentences_keeps_rates_and_lowers_ttr(s in sentences()) {
        let d = doc(&s);
        prop_assume!(d.word_count() > 0);
        let doubled = doc(&[s.clone(), s.clone()].concat());
        let (a, b) = (flesch_features::<f64>(&d), flesch_features::<f64>(&doubled));
        for name in ["flesch", "flesch_kincaid", "automated_readability_index", "lix", "forcast", "fog", "smog"] {
            prop_assert!(close(a.get(name).unwrap(), b.get(name).unwrap(), 1e-9), "{name}");
        }
        let ttr = |d: &Document| ttr_measures::<f64>(d).get("ttr").unwrap();
        prop_assert!(ttr(&doubled) < ttr(&d));
    }

    #[test]
    fn ttr_measures_ignore_token_order(s in sentences(), seed in any::<u64>()) {
        let mut flat = s.concat();
        let before = ttr_measures::<f64>(&doc(&[flat.clone()]));
        rand::seq::SliceRandom::shuffle(flat.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(before, ttr_measures::<f64>(&doc(&[flat])));
    }

    #[test]
    fn ordered_regression_follows_difficulty_order(picks in prop::collection::vec(0usize..5, 1..30)) {
        let order: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();
        let labels: Vec<RawLabel> =
            picks.iter().map(|&i| RawLabel::with_ages(order[i].clone(), i as f64 * 2.0, i as f64 * 2.0 + 1.0)).collect();
        let values = as_ordered_regression(&labels, &order).unwrap();
        for (l, &v) in labels.iter().zip(&values) {
            prop_assert_eq!(&order[v], &l.class_name);
            let age: f64 = as_age_regression(l).unwrap();
            prop_assert_eq!(age, (l.age_low.unwrap() + l.age_high.unwrap()) / 2.0);
        }
        let mut present: Vec<usize> = values.clone();
        present.sort_unstable();
        present.dedup();
        let names: Vec<&String> = present.iter().map(|&v| &order[v]).collect();
        let expected: Vec<&String> = order.iter().filter(|c| labels.iter().any(|l| &l.class_name == *c)).collect();
        prop_assert_eq!(names, expected);
    }

    #[test]
    fn fuse_keeps_values_exactly(vals in prop::collection::vec(-1e6f64..1e6, 0..10), scores in prop::collection::vec(-1e6f64..1e6, 0..5)) {
        let base: FeatureVector<f64> = vals.iter().enumerate().map(|(i, &v)| (format!("f{i}"), v)).collect();
        let ext: Vec<(String, f64)> = scores.iter().enumerate().map(|(i, &v)| (format!("s{i}"), v)).collect();
        let fused = fuse(&base, &ext).unwrap();
        let expected: Vec<f64> = vals.iter().chain(&scores).copied().collect();
        prop_assert_eq!(fused.to_vec(), expected);
    }

    #[test]
    fn folds_partition_and_balance(
        labels in prop::collection::vec(prop_oneof![6 => Just(0usize), 3 => Just(1), 1 => Just(2)], 2..120),
        k in 2usize..8,
        seed in any::<u64>(),
        stratified in any::<bool>(),
    ) {
        prop_assume!(k <= labels.len());
        let a = kfold_indices(&labels, k, seed, stratified).unwrap();
        prop_assert_eq!(a.len(), labels.len());
        prop_assert!(a.iter().all(|&f| f < k));
        let sizes: Vec<usize> = (0..k).map(|f| a.iter().filter(|&&g| g == f).count()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        if stratified {
            for c in 0..3 {
                let per: Vec<usize> =
                    (0..k).map(|f| (0..a.len()).filter(|&i| a[i] == f && labels[i] == c).count()).collect();
                prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
            }
        }
        prop_assert_eq!(a, kfold_indices(&labels, k, seed, stratified).unwrap());
    }

    #[test]
    fn extraction_matches_set_dimension_and_is_deterministic(s in sentences()) {
        let d = doc(&s);
        let vocab = Vocabulary::new(vec!["the".into(), "cat".into(), "zebra".into()]);
        let res = demo_resources(vocab.clone());
        for name in SET_NAMES {
            let set = FeatureSet::named(name).unwrap();
            let fv = extract(&d, &set, &res).unwrap();
            let members = set.members(Some(&vocab));
            prop_assert_eq!(fv.names().collect::<Vec<_>>(), members.iter().map(String::as_str).collect::<Vec<_>>());
            prop_assert!(fv.values().all(f64::is_finite));
            prop_assert_eq!(&fv, &extract(&d, &set, &res).unwrap());
        }
    }
}

fn fixture() -> (FeatureMatrix<f64>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..90 {
        let c = i % 3;
        rows.push(vec![c as f64 + rng.gen_range(-0.6..0.6), rng.gen_range(-1.0..1.0), 2.0 * c as f64 + rng.gen_range(-1.5..1.5)]);
        y.push(c);
    }
    (FeatureMatrix::new(vec!["a".into(), "b".into(), "c".into()], rows).unwrap(), y)
}

#[test]
fn training_is_bitwise_deterministic() {
    let (x, y) = fixture();
    for kind in [ModelKind::Svm, ModelKind::Logistic, ModelKind::Linear] {
        let cfg = TrainConfig::new(kind, 3);
        let (a, _) = train(&x, &y, 3, &cfg).unwrap();
        let (b, _) = train(&x, &y, 3, &cfg).unwrap();
        assert_eq!(a.to_text(), b.to_text(), "{kind}");
    }
}

#[test]
fn predictions_survive_per_feature_affine_maps() {
    let (x, y) = fixture();
    let maps = [(4.0, 1.5), (0.25, -3.0), (8.0, 100.0)];
    let rows: Vec<Vec<f64>> = x
        .rows()
        .map(|r| r.iter().zip(&maps).map(|(v, (a, b))| a * v + b).collect())
        .collect();
    let mapped = FeatureMatrix::new(x.names().to_vec(), rows).unwrap();
    for kind in [ModelKind::Logistic, ModelKind::Linear] {
        let cfg = TrainConfig::new(kind, 5);
        let (m1, _) = train(&x, &y, 3, &cfg).unwrap();
        let (m2, _) = train(&mapped, &y, 3, &cfg).unwrap();
        assert_eq!(m1.predict(&x).unwrap(), m2.predict(&mapped).unwrap(), "{kind}");
    }
}
