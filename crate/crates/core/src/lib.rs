//! Readability assessment toolkit: linguistic feature extraction (traditional
//! formulas, lexical diversity, POS ratios, parse-based syntax measures,
//! psycholinguistic norms, parse-ambiguity and POS-divergence measures),
//! k-best PCFG parsing, simple linear classifiers and cross-validated
//! evaluation.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar for the common cases.

pub mod demo;
pub mod evaluation;
pub mod features;
pub mod labeling;
pub mod lexical;
pub mod lexicon;
pub mod models;
pub mod parse_features;
pub mod pcfg;
pub mod pipeline;
pub mod pos;
pub mod registry;
pub mod scalar;
pub mod text;

pub use evaluation::EvalReport;
pub use features::FeatureVector;
pub use labeling::RawLabel;
pub use models::{FeatureMatrix, LinearModel, ModelKind};
pub use pcfg::{Grammar, KBestList, KBestParser};
pub use registry::{extract, FeatureSet, Resources};
pub use scalar::Real;
pub use text::{Document, Sentence, Token};

pub type FeatureVector32 = FeatureVector<f32>;
pub type FeatureVector64 = FeatureVector<f64>;
pub type FeatureMatrix32 = FeatureMatrix<f32>;
pub type FeatureMatrix64 = FeatureMatrix<f64>;
pub type Grammar32 = Grammar<f32>;
pub type Grammar64 = Grammar<f64>;
pub type KBestParser32 = KBestParser<f32>;
pub type KBestParser64 = KBestParser<f64>;
pub type LinearModel32 = LinearModel<f32>;
pub type LinearModel64 = LinearModel<f64>;
pub type EvalReport32 = EvalReport<f32>;
pub type EvalReport64 = EvalReport<f64>;
pub type Resources32 = Resources<f32>;
pub type Resources64 = Resources<f64>;
