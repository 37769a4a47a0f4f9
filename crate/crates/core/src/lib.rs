//! Croissant dataset descriptions: loading, validation, resource resolution,
//! and record extraction.

pub mod graph;
pub mod health;
pub mod infer;
pub mod jsonpath;
pub mod model;
pub mod records;
pub mod resources;
pub mod validate;
pub mod vocab;
