//! Research-area classification of scientific papers.
//!
//! Each research area is represented by its seed papers (papers published in
//! venues mapped to the area). A paper is compared with every seed through a
//! BM25 index over titles and abstracts, and its citations into and out of
//! each area's seeds are counted. The three per-area signals are normalized,
//! combined with trained linear weights, and the highest-scoring area wins.
//!
//! ```no_run
//! use seedclass::prelude::*;
//!
//! # fn main() -> seedclass::Result<()> {
//! let papers = read_papers_file("papers.jsonl", RecordSchema::Native)?.papers;
//! let map = VenueMap::default_map();
//! let pipeline = Pipeline::build(papers, &map, Bm25Params::default(), TokenizerConfig::default())?;
//! let model = FusionModel::load("model.json")?;
//! let classifier = Classifier::new(pipeline.index(), pipeline.graph(), &model)?;
//! for paper in pipeline.non_seed_papers() {
//!     println!("{} {:?}", paper.id, classifier.classify(paper).predicted());
//! }
//! # Ok(())
//! # }
//! ```

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod index;
pub mod pipeline;
pub mod text;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::corpus::{
        build_seed_set, read_labels_file, read_papers_file, Area, AreaSet, CitationGraph, Paper, RecordSchema, SeedSet,
        VenueMap,
    };
    pub use crate::eval::{ablation_grid, cross_validate, score_predictions, EvalReport, LabeledInstance};
    pub use crate::features::{AreaFeatureVector, Feature, FeatureExtractor, FeatureMask};
    pub use crate::fusion::{train_weights, ClassificationResult, Classifier, FusionModel, Outcome};
    pub use crate::index::{Bm25Params, SeedIndex};
    pub use crate::pipeline::Pipeline;
    pub use crate::text::TokenizerConfig;
}
