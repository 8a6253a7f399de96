//! Certification of almost-sure rank loss for ensembles of row-scaled matrices,
//! and a topological interference management analyzer built on top of it.

pub mod conditions;
pub mod exactla;
pub mod formats;
pub mod matching;
pub mod matroid;
pub mod randrank;
pub mod sampling;
pub mod tim;
