//! Exact constructions behind sharp weak-type lower bounds for maximal
//! operators over rare bases of axis-parallel intervals.
//!
//! Everything here is exact: measures are dyadic rationals with
//! arbitrary-precision mantissas, one-dimensional sets are unions of whole
//! grid cells, and the extremal level-set measure is computed by a lattice
//! sum instead of a grid.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the CLI and
//! the parallel oracle driver live in the `rarebasis` companion crate.
//!
//! Module map:
//!
//! - [`dyadic`]: [`Dyadic`], exact numbers `m * 2^e`.
//! - [`cells`]: [`AxisFrame`] and [`CellSet1D`], one-dimensional set algebra
//!   and the saturation predicate.
//! - [`ladder`]: the halving operator and nested ladders `I*_0 ⊂ … ⊂ I*_k`.
//! - [`spectra`]: spectrum families, nets, density, sequence extraction.
//! - [`omega`]: compositions, completeness, the (is)-property.
//! - [`extremal`]: extremal configurations and lower-bound verification.
//! - [`oracle`]: brute-force grid evaluation of a restricted maximal operator.

#![no_std]

extern crate alloc;

pub mod cells;
pub mod dyadic;
pub mod error;
pub mod extremal;
pub mod ladder;
pub mod oracle;
pub mod omega;
pub mod spectra;

pub use cells::{AxisFrame, CellSet1D};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use extremal::{ExtremalConfig, VerificationReport};
pub use ladder::{Ladder, ScaleSequence};
pub use omega::OmegaSet;
pub use oracle::GridMask;
pub use spectra::{IntSet, SpectrumFamily, TupleSet, Window};
