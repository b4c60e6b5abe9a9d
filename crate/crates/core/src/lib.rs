//! Discretised compactly supported measures on the unit cube, their radial
//! and orthogonal projections, and the multiscale tube combinatorics built
//! on top of them.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature and enable `no-std-math` to build without the standard
//! library. All queries on constructed values are pure and deterministic:
//! sparse cells are kept in sorted order and every floating-point reduction
//! has a fixed shape, so repeated runs reproduce results bit for bit on a
//! given platform.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "no-std-math")))]
compile_error!("radial-core requires either the `std` or the `no-std-math` feature");

pub mod angular;
pub mod blinds;
pub mod error;
pub mod geom;
pub mod measure;
pub mod project;
pub mod scale;
pub mod smooth;
pub mod tubes;

mod math;
mod sum;

pub use angular::{AngularDensity, DensityMode, LineDensity};
pub use error::Error;
pub use geom::{Line, Point, Tube, Vec2};
pub use measure::{Cell, GridMeasure, Similarity};
pub use scale::{DimEstimate, ScaleSchedule};
pub use tubes::{FlowerFamily, TubeParams};

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
