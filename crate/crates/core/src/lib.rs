//! Numerical tests for holomorphic and meromorphic extendibility.
//!
//! * [`geometry`]: disc automorphisms, circle families, complex lines in C².
//! * [`spectral`]: Fourier analysis of boundary values and extension verdicts.
//! * [`polyanalytic`]: polyanalytic functions, coefficient recovery and the
//!   two-family harnesses.
//! * [`ball`]: functions on the unit sphere of C² and their complex-line tests.
//! * [`semiquadrics`]: fibers of the semiquadric families over the disc.
//! * [`gallery`]: the catalogue of worked examples with expected verdicts.

pub mod ball;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod json;
pub mod polyanalytic;
pub mod semiquadrics;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{c64, Circle, ComplexLine, FamilyAnchor, HyperbolicCircle, Point2, C64};
pub use spectral::{ExtendVerdict, Spectrum};
