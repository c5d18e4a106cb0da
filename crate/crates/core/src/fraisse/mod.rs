//! Fraïssé classes, amalgamation and staged limits.

mod amalgam;
mod axioms;
mod class;
mod classfile;
mod stages;

pub(crate) use amalgam::search;
pub use amalgam::{amalgamate, amalgamate_one, amalgamate_span, find_amalgam, Amalgam, AmalgamSet, Coverage, Span};
pub use axioms::{check_ap, check_hp, check_jep, AxiomCheck, HpWitness, JepWitness};
pub use class::{group_catalogue, AmalgamStrategy, Extension, FraisseClass, BUILTIN_CLASSES, GROUP_CATALOGUE_MAX};
pub use classfile::{class_from_json, class_from_str};
pub use stages::{
    extend_stage, is_ultrahomogeneous_upto, is_universal_upto, Chain, ExtensionRecord, HomogeneityWitness, LimitStage,
    DEFAULT_ROUNDS,
};
