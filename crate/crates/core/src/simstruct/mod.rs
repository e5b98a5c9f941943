//! Similarity structures: membership queries, derived structures, and the
//! structural searches (dual contraction, separating census, local
//! equivalence).

mod analysis;
mod local;
mod similarity;
mod structure;

pub use analysis::{
    decompose_equalizing, dual_contraction, locally_sim_equivalent, separating_census, Census, DualContractionWitness,
    LocalEquivalence, Piece, DEFAULT_DEPTH_BOUND,
};
pub use local::LocalMap;
pub use similarity::{parse_similarity, Similarity, SimilarityClass};
pub use structure::{flip_first, BaseKind, Rule, SimStructure, DEFAULT_FINITE_CAP, MAX_SUBGROUP_ORDER};
