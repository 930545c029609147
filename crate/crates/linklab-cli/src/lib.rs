//! Support library for the `linklab` binary: settings resolution, CSV and
//! SVG emission, and the numerical self-test suite. Kept as a library so
//! integration tests can drive the same code paths the binary uses.

pub mod config;
pub mod csvio;
pub mod selftest;
pub mod svg;
