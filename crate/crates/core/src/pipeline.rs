//! Per-fold fitting: vocabulary, scaler and classifier see training rows only.

use sha2::{Digest, Sha256};

use crate::models::{hex, train, FeatureMatrix, LinearModel, ModelError, TrainConfig};
use crate::scalar::Real;
use crate::text::{word_type_proportions, Document, Vocabulary};

pub const DEFAULT_VOCAB_SIZE: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig<T = f64> {
    /// Append word-type proportions from a vocabulary fit on the training rows.
    pub word_types: bool,
    pub vocab_size: usize,
    pub train: TrainConfig<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline<T = f64> {
    pub vocabulary: Option<Vocabulary>,
    pub model: LinearModel<T>,
    pub chosen_c: Option<T>,
}

/// Hex SHA-256 digests of the fitted parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub vocabulary: String,
    pub scaler: String,
    pub weights: String,
}

fn digest(text: &str) -> String {
    hex(&Sha256::digest(text.as_bytes()))
}

/// `fixed` columns followed by word-type proportions when a vocabulary is given.
pub fn design_matrix<T: Real>(
    docs: &[&Document],
    fixed: &FeatureMatrix<T>,
    vocabulary: Option<&Vocabulary>,
) -> Result<FeatureMatrix<T>, ModelError> {
    let Some(vocab) = vocabulary else { return Ok(fixed.clone()) };
    let rows: Vec<_> = docs.iter().map(|d| word_type_proportions::<T>(d, vocab).to_vec()).collect();
    let names = vocab.words().iter().map(|w| Vocabulary::feature_name(w)).collect();
    fixed.hstack(&FeatureMatrix::new(names, rows)?)
}

impl<T: Real> FittedPipeline<T> {
    /// `docs` and `fixed` rows describe the training documents, aligned.
    pub fn fit(
        cfg: &PipelineConfig<T>,
        docs: &[&Document],
        fixed: &FeatureMatrix<T>,
        labels: &[usize],
        n_classes: usize,
    ) -> Result<Self, ModelError> {
        let vocabulary = cfg.word_types.then(|| Vocabulary::fit(docs.iter().copied(), cfg.vocab_size));
        let x = design_matrix(docs, fixed, vocabulary.as_ref())?;
        let (model, chosen_c) = train(&x, labels, n_classes, &cfg.train)?;
        Ok(FittedPipeline { vocabulary, model, chosen_c })
    }

    pub fn predict(&self, docs: &[&Document], fixed: &FeatureMatrix<T>) -> Result<Vec<usize>, ModelError> {
        self.model.predict(&design_matrix(docs, fixed, self.vocabulary.as_ref())?)
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let vocab = self.vocabulary.as_ref().map(|v| v.words().join("\n")).unwrap_or_default();
        let s = &self.model.scaler;
        let scaler: Vec<String> = s.means.iter().zip(&s.stds).map(|(m, d)| format!("{m} {d}")).collect();
        let weights: Vec<String> = self
            .model
            .weights
            .iter()
            .zip(&self.model.bias)
            .map(|(w, b)| w.iter().chain(std::iter::once(b)).map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        Fingerprint {
            vocabulary: digest(&vocab),
            scaler: digest(&format!("{}\n{}", self.model.feature_names.join(" "), scaler.join("\n"))),
            weights: digest(&weights.join("\n")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::RawLabel;
    use crate::models::ModelKind;

    #[test]
    fn vocabulary_comes_from_training_docs() {
        let docs: Vec<Document> = ["the cat sat", "a dog ran", "the cat ran", "a bird flew"]
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("d{i}"), t, RawLabel::default()))
            .collect();
        let refs: Vec<&Document> = docs.iter().collect();
        let fixed = FeatureMatrix::<f64>::new(vec![], vec![vec![]; 4]).unwrap();
        let cfg = PipelineConfig { word_types: true, vocab_size: 3, train: TrainConfig::new(ModelKind::Logistic, 7) };
        let fitted = FittedPipeline::fit(&cfg, &refs[..2], &fixed.select_rows(&[0, 1]), &[0, 1], 2).unwrap();
        let words = fitted.vocabulary.as_ref().unwrap().words();
        assert!(!words.contains(&"bird".to_string()));
        assert_eq!(fitted.predict(&refs, &fixed).unwrap().len(), 4);
        let again = FittedPipeline::fit(&cfg, &refs[..2], &fixed.select_rows(&[0, 1]), &[0, 1], 2).unwrap();
        assert_eq!(fitted.fingerprint(), again.fingerprint());
    }
}
