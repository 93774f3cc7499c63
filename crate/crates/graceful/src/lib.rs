//! File formats, experiment runners and plotting around `graceful-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod schema;
pub mod table;
pub mod trace;

pub use error::{Error, Result};
