//! Algorithmic core: ordered graphs, 01*-matrix mixedness analysis, delayed
//! decomposition trees, substitution trees, right module partitions, and the
//! coloring procedures built on top of them.
//!
//! Everything here is deterministic and allocation-only (`no_std` + `alloc`);
//! file formats, CLI, and parallel verification drivers live in the companion
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bits;
pub mod graph;
pub mod gen;
pub mod matrix;
pub mod delayed;
pub mod subst;
pub mod rmp;
pub mod amf;
pub mod mixedext;
pub mod oracles;

pub use graph::{Coloring, Interval, IntervalPartition, OrderedGraph};
pub use matrix::{Corner, Division, Entry, TriMatrix};



