//! Variable-bandpass periodic block bootstrap for periodically correlated
//! time series.
//!
//! The crate isolates periodic components of a daily series with a
//! demodulated iterated-moving-average bandpass filter ([`kz`]), wraps each
//! component in a phase-stratified periodic block bootstrap ([`bootstrap`]),
//! tests whether any horizontal line fits inside the resulting confidence
//! band, and recombines the significant components into a joint band
//! ([`pipeline`]). [`synth`] generates ground-truth data and runs Monte
//! Carlo coverage checks; [`io`] and the `vbpbb` binary wire the pipeline
//! to CSV files on disk.

pub mod bootstrap;
pub mod error;
pub mod freq;
pub mod io;
pub mod kz;
pub mod pipeline;
pub mod rng;
pub mod series;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
