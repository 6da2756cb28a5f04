//! Exact combinatorial dimension calculators with verifiable witness
//! certificates, psi-covering numbers, and cross-dimension relation
//! checks. Everything here is brute force with pruning: desk scale only.

mod certificate;
mod cover;
mod dissimilarity;
mod eluder;
mod relations;
mod strong_sq;

pub use certificate::{
    verify_dissimilarity_certificate, verify_eluder_certificate, verify_strong_sq_certificate,
    DimensionCertificate,
};
pub use cover::{covering_number, psi_distance, CoverMode, PsiCoverReport, EXACT_COVER_CAP};
pub use dissimilarity::{
    default_epsilon_grid, dissimilarity_dim, dissimilarity_dim_within, feasible_center,
    monotone_dissimilarity_dim, monotone_dissimilarity_dim_within,
};
pub use eluder::{default_eluder_grid, eluder_dim, monotone_eluder_dim};
pub use relations::{
    check_relations, shipped_fixtures, RelationCheck, RelationFixture, RelationReport,
    RELATION_SIZE_CAP,
};
pub use strong_sq::{gram_matrix, strong_sq_dim};
