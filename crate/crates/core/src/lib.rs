//! Filter/sort decision procedures over attribute-tagged catalogs.
//!
//! A [`Procedure`](model::Procedure) is a pipeline of stable filter and sort
//! stages, optionally ending in `first`. This crate evaluates procedures,
//! rewrites them to a canonical normal form, translates between procedures
//! and the lexicographic preference relations they implement, and models the
//! satisficing and local-maximization fallbacks used when an attribute is not
//! available for filtering or sorting.

pub mod bench;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod general;
pub mod heuristics;
pub mod model;
pub mod normalizer;
pub mod preference;
pub mod testkit;

pub use error::{Error, Result};
