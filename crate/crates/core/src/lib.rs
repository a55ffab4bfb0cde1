//! Kernel range spaces, low-discrepancy colorings from min-cost perfect
//! matchings, and halving constructions of epsilon-samples.
//!
//! A kernel range space `(P, K)` pairs a point set with all translates
//! `K(x, .)` of a fixed shift-invariant kernel. A coloring `chi: P -> {-1,+1}`
//! has kernel discrepancy `max_x |sum_p chi(p) K(x, p)|`. Coloring the two
//! endpoints of every edge of a min-cost perfect matching with opposite random
//! signs gives discrepancy `O(n^{1/2-1/d} sqrt(log(n/delta)))` for Gaussian and
//! bounded-slope kernels, and repeatedly discarding the `-1` half turns that
//! coloring into an epsilon-sample of size `O((1/eps) sqrt(log(1/eps)))` in the
//! plane.
//!
//! The crate is `no_std` (with `alloc`). The `std` feature only adds
//! `std::error::Error` plumbing; `parallel` evaluates nets with rayon.
//!
//! Module map:
//! - [`geometry`] and [`kernel`]: points, balls, kernel families, bandwidths.
//! - [`matching`]: exact (blossom), greedy and brute-force perfect matchings,
//!   and the clipped length functionals over balls and annuli.
//! - [`net`]: grid nets of candidate centers and fast weighted kernel sums.
//! - [`discrepancy`]: colorings, discrepancy over a net, tail diagnostics.
//! - [`coreset`]: halving to epsilon-samples and random-sample baselines.
//! - [`kde`]: kernel density estimates and certified L-infinity distances.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod coreset;
pub mod discrepancy;
mod error;
pub mod geometry;
pub mod kde;
pub mod kernel;
pub mod matching;
pub mod net;
pub mod rng;
mod spatial;

pub use error::{Error, Result};
pub use geometry::{ball_volume, Ball, Point, PointSet};
pub use kernel::{KernelFamily, KernelSpec, Scaling};
