//! Generation adequacy assessment with wind: capacity outage tables, joint
//! demand/wind models, risk indices, capacity value and bootstrap intervals.

pub mod bootstrap;
pub mod capvalue;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod ingest;
pub mod jointmodel;
pub mod numeric;
pub mod risk;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
