//! Discrete uniformization of metric 2-spheres.
//!
//! The crate is `no_std` (with `alloc`). It contains the numerical core:
//! cross-ratios and metric regularity estimators ([`metric`]),
//! K-approximations of finite metric spaces ([`approx`]), the combinatorial
//! Q-modulus solver and its companions ([`modulus`]), circle packing of sphere
//! triangulations ([`packing`]), the uniformization pipeline and distortion
//! measurement ([`uniformize`]), and the test-space generators ([`spaces`]).
//!
//! File formats, configuration and the command line live in the companion
//! `qsunif-tools` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod approx;
pub mod error;
pub mod graph;
pub mod grid;
pub mod math;
pub mod mesh;
pub mod metric;
pub mod modulus;
pub mod packing;
pub mod spaces;
pub mod uniformize;

pub use error::{Error, Result};
