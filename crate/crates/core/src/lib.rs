//! Toric Calabi-Yau geometry, mirror periods and open Gromov-Witten data.

#![allow(clippy::needless_range_loop)]

pub mod disk_topology;
pub mod flat_coords;
pub mod lattice;
pub mod periods;
pub mod polyhedron;
pub mod refdata;
pub mod toric_cy;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Fan(#[from] toric_cy::FanError),
    #[error(transparent)]
    Period(#[from] periods::PeriodError),
    #[error(transparent)]
    Flat(#[from] flat_coords::FlatError),
    #[error(transparent)]
    Disk(#[from] disk_topology::DiskError),
    #[error(transparent)]
    Reference(#[from] refdata::RefError),
    #[error(transparent)]
    Series(#[from] syz_series::SeriesError),
}
