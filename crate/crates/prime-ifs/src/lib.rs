//! Driven iterated function systems over prime-derived integer streams.
//!
//! The pipeline: generate primes, twin pairs or tuple centers
//! ([`prime_stream`]), symbolize them by residue class ([`residue`]),
//! drive a four-map IFS on the unit square ([`ifs`]), and census or
//! rasterize the result ([`census`], [`raster`]). The censuses expose the
//! non-uniform distribution of consecutive residue classes among primes.
//!
//! With the default `parallel` feature, sieving, counting and raster
//! accumulation run on rayon; disabling it gives a purely sequential
//! build with identical outputs.

pub mod census;
pub mod error;
pub mod ifs;
pub mod prime_stream;
pub mod raster;
pub mod residue;

pub use error::{Error, Result};
