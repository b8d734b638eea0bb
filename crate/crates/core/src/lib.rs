//! Dynamical and Selberg zeta functions of Schottky reflection groups.
//!
//! The pipeline runs [`geometry`] (circles to boundary maps), [`symbolic`]
//! (admissible periodic words), [`orbits`] (multipliers), [`zeta`] (the
//! truncated cycle expansion), then [`analysis`] (dimension, zero counting,
//! grids). [`transfer`] is an independent dimension solver built on a
//! collocation discretization of the transfer operator.

// NaN must fail these checks, so `!(x > 0.0)` is intended
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cache;
mod dd;
pub mod error;
pub mod geometry;
pub mod orbits;
pub mod quadrature;
pub mod symbolic;
pub mod transfer;
pub mod zeta;

pub use analysis::{ContourOptions, Rectangle};
pub use error::{Error, Result};
pub use geometry::{Circle, GroupConfig};
pub use orbits::{build_orbit_table, build_orbit_table_with, OrbitTable, PowerOptions};
pub use transfer::CollocationOperator;
pub use zeta::{Mode, ZetaSeries, ZetaValue};
