//! Locating and loading the lexical resources a feature set needs.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use readgauge::lexicon::{load_lemmas, load_norms, load_senses};
use readgauge::pcfg::load_grammar;
use readgauge::pos::TagLexicon;
use readgauge::registry::Extractor;
use readgauge::{FeatureSet, KBestParser, Resources};

/// Default resource directory.
pub const DATA_ENV: &str = "READGAUGE_DATA";
pub const GRAMMAR_FILE: &str = "grammar.pcfg";
pub const TAGS_FILE: &str = "tags.csv";
pub const NORMS_FILE: &str = "norms.csv";
pub const SENSES_FILE: &str = "senses.csv";
pub const LEMMAS_FILE: &str = "lemmas.csv";

/// Explicit paths win; otherwise the file of the conventional name in the
/// data directory is used when it exists.
#[derive(Debug, Clone, Default)]
pub struct ResourcePaths {
    pub data_dir: Option<PathBuf>,
    pub grammar: Option<PathBuf>,
    pub tag_lexicon: Option<PathBuf>,
    pub norms: Option<PathBuf>,
    pub senses: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
}

impl ResourcePaths {
    fn resolve(&self, explicit: &Option<PathBuf>, file: &str) -> Option<PathBuf> {
        explicit.clone().or_else(|| {
            let p = self.data_dir.as_ref()?.join(file);
            p.is_file().then_some(p)
        })
    }

    /// Loads what `set` uses. Anything still missing is reported by
    /// [`Resources::check`].
    pub fn load(&self, set: &FeatureSet) -> Result<Resources<f64>> {
        let mut res = Resources::default();
        let uses = |e: Extractor| set.extractors.contains(&e);
        if uses(Extractor::Syntactic) || uses(Extractor::ParseDeviation) {
            if let Some(p) = self.resolve(&self.grammar, GRAMMAR_FILE) {
                let g = load_grammar::<f64>(&p).with_context(|| format!("loading grammar {}", p.display()))?;
                res.parser = Some(KBestParser::new(&g).with_context(|| format!("binarizing {}", p.display()))?);
            }
        }
        if uses(Extractor::Pos) || uses(Extractor::PosDistribution) {
            if let Some(p) = self.resolve(&self.tag_lexicon, TAGS_FILE) {
                res.tag_lexicon = Some(TagLexicon::load(&p).with_context(|| format!("loading {}", p.display()))?);
            }
        }
        if uses(Extractor::Psycholinguistic) {
            if let Some(p) = self.resolve(&self.norms, NORMS_FILE) {
                res.norms = Some(load_norms(&p).with_context(|| format!("loading {}", p.display()))?);
            }
            if let Some(p) = self.resolve(&self.lemmas, LEMMAS_FILE) {
                res.lemmas = Some(load_lemmas(&p).with_context(|| format!("loading {}", p.display()))?);
            }
        }
        if uses(Extractor::Senses) {
            if let Some(p) = self.resolve(&self.senses, SENSES_FILE) {
                res.senses = Some(load_senses(&p).with_context(|| format!("loading {}", p.display()))?);
            }
        }
        Ok(res)
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    builder.permissions(std::os::unix::fs::PermissionsExt::from_mode(0o644));
    let mut tmp = builder.tempfile_in(dir).with_context(|| format!("writing {}", path.display()))?;
    std::io::Write::write_all(&mut tmp, contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
