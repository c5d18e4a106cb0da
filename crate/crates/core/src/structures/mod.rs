//! Finite multi-sorted structures, canonical forms and embeddings.

pub mod builders;
mod canon;
mod embed;
pub mod json;
mod signature;
mod structure;

pub use canon::{canonical_labeling, pointed_label, CanonicalLabel};
pub use embed::{
    compose, embedding_maps, embeddings_up_to_target_aut, embeds, enumerate_embeddings, find_embedding,
    for_each_embedding, generated_substructure, tuple_type, Embedding,
};
pub use signature::{ConstantSymbol, FunctionSymbol, RelationProp, RelationSymbol, Signature};
pub use structure::FiniteStructure;

/// Canonical form of a structure.
pub fn canonical_form(s: &FiniteStructure) -> CanonicalLabel {
    s.canonical_label().clone()
}
