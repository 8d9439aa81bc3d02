//! Exact combinatorics of external angles of the Mandelbrot set, plus the
//! floating-point machinery needed to check the combinatorics against the
//! actual parameter plane.
//!
//! The exact side works on rational angles of the circle `R/Z` under the
//! doubling map: kneading sequences, internal addresses, the pairing of
//! periodic angles whose parameter rays land together, orbit portraits and
//! Misiurewicz ray classes. Everything there is arbitrary-precision rational
//! arithmetic; floating point never enters.
//!
//! The numeric side ([`numerics`]) traces dynamic and parameter rays through
//! Böttcher coordinates and runs Newton solvers for centers, component
//! boundary points and Misiurewicz parameters, so that each combinatorial
//! prediction (which rays land together, and where) can be verified in
//! double precision.
//!
//! The crate is `no_std`-compatible (it requires `alloc`); the `std` feature
//! is on by default.
//!
//! All public types are immutable after construction and all operations are
//! pure, so everything here can be shared freely across threads.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod angle;
pub mod combinat;
mod error;
mod fast;
pub mod kneading;
pub mod numerics;

pub use angle::{enumerate_exact_period, Angle, OrbitType};
pub use error::Error;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
