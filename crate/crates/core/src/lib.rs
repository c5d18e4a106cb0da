//! Finite approximations of Fraïssé limits, their automorphism groups and
//! the Galois correspondence between arrows into the limit and open
//! subgroups.

pub mod autgroup;
pub mod category;
pub mod error;
pub mod fraisse;
pub mod galois;
pub mod imaginaries;
pub mod report;
pub mod structures;

pub use error::{Error, Result};
pub use structures::{Embedding, FiniteStructure, Signature};
