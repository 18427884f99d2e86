//! Ray-tracing narrow-beam channel simulation for high-speed railway scenes.
//!
//! The crate covers the full pipeline: procedural scene construction
//! ([`scene`]), antenna patterns ([`antenna`]), deterministic multipath
//! tracing ([`tracer`]), beam-tracking geometry ([`beam`]), moving-train
//! sweeps ([`sweep`]), channel statistics ([`stats`]) and simplified
//! cell-level KPIs ([`kpi`]). [`pipeline`] ties the stages to on-disk run
//! directories for the command-line tool.

pub mod antenna;
pub mod beam;
pub mod error;
pub mod geometry;
pub mod kpi;
pub mod pipeline;
pub mod scene;
pub mod stats;
pub mod sweep;
pub mod tracer;
pub mod units;

pub use error::{Error, Result};
