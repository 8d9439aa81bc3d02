//! Command-line frontend and figure emitter for the external-ray
//! combinatorics library: escape-time renderings of the Mandelbrot and Julia
//! sets with traced-ray overlays, plus text output for every combinatorial
//! query. See the repository README for the machine-readable record formats.

pub mod app;
pub mod render;

pub use app::run_cli;
