//! Small English-like resources and a synthetic graded corpus.
//!
//! The grammar, tag lexicon, norms, lemmas and sense counts cover exactly the
//! vocabulary the corpus generator emits, so every generated sentence parses.
//! Difficulty grows with sentence length and with the share of rare words,
//! which are long, polysyllabic, late-acquired and low in familiarity.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// (tag, common words, rare words)
pub const WORDS: &[(&str, &[&str], &[&str])] = &[
    ("DT", &["the", "a", "this", "every"], &[]),
    (
        "NN",
        &["cat", "dog", "man", "book", "ball", "tree", "car", "bird", "cup", "hat", "bed", "sun"],
        &[
            "philosopher",
            "catastrophe",
            "hypothesis",
            "bureaucracy",
            "phenomenon",
            "infrastructure",
            "ideology",
            "apparatus",
            "curriculum",
            "metabolism",
        ],
    ),
    (
        "NNS",
        &["cats", "dogs", "books", "birds", "trees", "cars"],
        &["philosophers", "hypotheses", "institutions", "categories", "generations", "authorities"],
    ),
    (
        "JJ",
        &["big", "red", "old", "new", "good", "small", "hot"],
        &["ambiguous", "contemporary", "elaborate", "hypothetical", "intricate", "unprecedented", "considerable"],
    ),
    ("PRP", &["he", "she", "it", "they"], &[]),
    (
        "VBZ",
        &["sees", "has", "likes", "gets", "eats", "reads"],
        &["investigates", "accommodates", "characterizes", "demonstrates", "facilitates", "illuminates"],
    ),
    (
        "VBD",
        &["saw", "had", "liked", "got", "ate", "found"],
        &["investigated", "accommodated", "characterized", "demonstrated", "facilitated", "illuminated"],
    ),
    (
        "VB",
        &["see", "have", "like", "get", "eat", "find"],
        &["investigate", "accommodate", "characterize", "demonstrate", "facilitate", "illuminate"],
    ),
    ("MD", &["can", "will", "must", "may"], &[]),
    ("IN", &["in", "on", "with", "under", "near", "because", "after"], &[]),
    ("CC", &["and", "but"], &[]),
    ("WP", &["who"], &[]),
];

const PHRASE_RULES: &str = "\
%start ROOT
ROOT -> S # 1.0
S -> NP VP # 0.7
S -> S CC S # 0.1
S -> NP VP SBAR # 0.15
S -> VP # 0.05
SBAR -> IN S # 0.7
SBAR -> WHNP S # 0.3
WHNP -> WP # 1.0
NP -> DT NN # 0.3
NP -> DT JJ NN # 0.2
NP -> NP PP # 0.2
NP -> PRP # 0.1
NP -> NNS # 0.1
NP -> NP SBAR # 0.05
NP -> DT NNS # 0.05
VP -> VBZ NP # 0.3
VP -> VBD NP # 0.3
VP -> VP PP # 0.2
VP -> VBZ # 0.05
VP -> VBD # 0.05
VP -> MD VB NP # 0.1
PP -> IN NP # 1.0
";

fn words_for(tag: &str) -> Vec<&'static str> {
    WORDS
        .iter()
        .filter(|(t, _, _)| *t == tag)
        .flat_map(|(_, common, rare)| common.iter().chain(rare.iter()).copied())
        .collect()
}

/// Phrase-structure rules plus uniform lexical rules per tag.
pub fn grammar_text() -> String {
    let mut out = PHRASE_RULES.to_string();
    for (tag, _, _) in WORDS {
        let words = words_for(tag);
        let p = 1.0 / words.len() as f64;
        for w in words {
            let _ = writeln!(out, "{tag} -> '{w}' # {p}");
        }
    }
    out
}

pub fn tag_lexicon_csv() -> String {
    let mut out = String::from("word,tag\n");
    for (tag, common, rare) in WORDS {
        for w in common.iter().chain(rare.iter()) {
            let _ = writeln!(out, "{w},{tag}");
        }
    }
    out
}

fn all_words() -> impl Iterator<Item = (&'static str, &'static str, bool)> {
    WORDS.iter().flat_map(|(tag, common, rare)| {
        common.iter().map(move |w| (*w, *tag, false)).chain(rare.iter().map(move |w| (*w, *tag, true)))
    })
}

/// Deterministic per-word jitter in [0, 1).
fn jitter(word: &str, salt: u32) -> f64 {
    let h = word.bytes().fold(2166136261u32 ^ salt, |h, b| (h ^ u32::from(b)).wrapping_mul(16777619));
    f64::from(h % 1000) / 1000.0
}

pub const NORM_COLUMNS: [&str; 10] = [
    "aoa_kuperman",
    "aoa_bird",
    "aoa_bristol",
    "aoa_cortese_khanna",
    "mrc_familiarity",
    "mrc_concreteness",
    "mrc_imageability",
    "mrc_colorado_meaningfulness",
    "mrc_pavio_meaningfulness",
    "mrc_aoa",
];

/// Ratings rise (age of acquisition) or fall (familiarity etc.) with word
/// length and rarity. Every seventh word has no Bird rating.
pub fn norms_csv() -> String {
    let mut out = format!("word,{}\n", NORM_COLUMNS.join(","));
    for (i, (w, _, rare)) in all_words().enumerate() {
        let len = w.chars().count() as f64;
        let hard = if rare { 1.0 } else { 0.0 };
        let aoa = 3.0 + 0.4 * len + 4.0 * hard;
        let cells: Vec<String> = NORM_COLUMNS
            .iter()
            .enumerate()
            .map(|(c, col)| {
                let j = jitter(w, c as u32);
                let v = if col.contains("aoa") {
                    aoa + j
                } else {
                    600.0 - 15.0 * len - 120.0 * hard + 20.0 * j
                };
                if *col == "aoa_bird" && i % 7 == 3 {
                    String::new()
                } else {
                    format!("{:.2}", v)
                }
            })
            .collect();
        let _ = writeln!(out, "{w},{}", cells.join(","));
    }
    out
}

const PLURALS: [(&str, &str); 12] = [
    ("cats", "cat"),
    ("dogs", "dog"),
    ("books", "book"),
    ("birds", "bird"),
    ("trees", "tree"),
    ("cars", "car"),
    ("philosophers", "philosopher"),
    ("hypotheses", "hypothesis"),
    ("institutions", "institution"),
    ("categories", "category"),
    ("generations", "generation"),
    ("authorities", "authority"),
];

/// Base forms for plural nouns and inflected verbs.
pub fn lemmas_csv() -> String {
    let mut out = String::from("word,lemma\n");
    for (plural, singular) in PLURALS {
        let _ = writeln!(out, "{plural},{singular}");
    }
    let vb = words_for("VB");
    for tag in ["VBZ", "VBD"] {
        for (inflected, lemma) in words_for(tag).iter().zip(&vb) {
            let _ = writeln!(out, "{inflected},{lemma}");
        }
    }
    out
}

/// Short common words have many senses; long rare words few.
pub fn senses_csv() -> String {
    let mut out = String::from("word,senses,hypernyms,hyponyms\n");
    for (w, _, rare) in all_words() {
        let len = w.chars().count();
        let senses = if rare { 1 + len % 2 } else { 12usize.saturating_sub(len) };
        let _ = writeln!(out, "{w},{senses},{},{}", 1 + len % 4, if rare { 0 } else { 3 + len % 5 });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDoc {
    pub doc_id: String,
    pub class_name: String,
    pub age_low: f64,
    pub age_high: f64,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub n_classes: usize,
    pub sentences_per_doc: (usize, usize),
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { n_docs: 600, n_classes: 3, sentences_per_doc: (8, 12), seed: 7 }
    }
}

pub fn class_name(c: usize) -> String {
    format!("level{}", c + 1)
}

/// Mean words per sentence for class `c`.
pub fn target_length(c: usize) -> f64 {
    6.0 + 6.0 * c as f64
}

/// Share of rare words for class `c` out of `n` classes.
pub fn rare_rate(c: usize, n: usize) -> f64 {
    let x = if n > 1 { c as f64 / (n - 1) as f64 } else { 0.0 };
    0.05 + 0.5 * x * x
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    rare: f64,
}

impl Gen<'_> {
    fn word(&mut self, tag: &str) -> &'static str {
        let (_, common, rare) = WORDS.iter().find(|(t, _, _)| *t == tag).expect("known tag");
        let pool = if !rare.is_empty() && self.rng.gen_bool(self.rare) { rare } else { common };
        pool[self.rng.gen_range(0..pool.len())]
    }

    fn np(&mut self, out: &mut Vec<&'static str>) {
        match self.rng.gen_range(0..10) {
            0..=4 => out.extend([self.word("DT"), self.word("NN")]),
            5..=7 => out.extend([self.word("DT"), self.word("JJ"), self.word("NN")]),
            8 => out.push(self.word("NNS")),
            _ => out.push(self.word("PRP")),
        }
    }

    fn vp(&mut self, out: &mut Vec<&'static str>) {
        match self.rng.gen_range(0..10) {
            0..=3 => out.push(self.word("VBZ")),
            4..=7 => out.push(self.word("VBD")),
            _ => {
                out.push(self.word("MD"));
                out.push(self.word("VB"));
            }
        }
        self.np(out);
    }

    fn clause(&mut self, budget: usize, out: &mut Vec<&'static str>) {
        let start = out.len();
        self.np(out);
        self.vp(out);
        while out.len() - start + 2 < budget {
            if self.rng.gen_bool(0.25) {
                out.push("who");
                self.vp(out);
            } else {
                out.push(self.word("IN"));
                self.np(out);
            }
        }
    }

    fn sentence(&mut self, target: usize) -> Vec<&'static str> {
        let mut out = Vec::with_capacity(target + 4);
        if target >= 12 && self.rng.gen_bool(0.4) {
            let half = target / 2;
            self.clause(half, &mut out);
            out.push(self.word("CC"));
            self.clause(target - half, &mut out);
        } else {
            self.clause(target, &mut out);
        }
        out
    }
}

fn render(words: &[&str]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get(..1) {
        let upper = first.to_uppercase();
        s.replace_range(..1, &upper);
    }
    s.push('.');
    s
}

/// Generates a balanced labeled corpus; class `c` has age range 7+2c to 8+2c.
pub fn synth_corpus(cfg: &SynthConfig) -> Vec<SynthDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = cfg.sentences_per_doc;
    (0..cfg.n_docs)
        .map(|i| {
            let c = i % cfg.n_classes.max(1);
            let n_sent = rng.gen_range(lo..=hi.max(lo));
            // each document drifts from its class norm, so neighbouring classes overlap
            let mean_len = target_length(c) + rng.gen_range(-3.0..=3.0);
            let rare = (rare_rate(c, cfg.n_classes) * rng.gen_range(0.7..=1.3)).min(1.0);
            let mut g = Gen { rng: &mut rng, rare };
            let sentences: Vec<String> = (0..n_sent)
                .map(|_| {
                    let spread = g.rng.gen_range(-2.0..=2.0);
                    let target = (mean_len + spread).round().max(4.0) as usize;
                    render(&g.sentence(target))
                })
                .collect();
            SynthDoc {
                doc_id: format!("doc{i:04}"),
                class_name: class_name(c),
                age_low: 7.0 + 2.0 * c as f64,
                age_high: 8.0 + 2.0 * c as f64,
                text: sentences.join(" ") + "\n",
            }
        })
        .collect()
}
