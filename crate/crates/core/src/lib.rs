//! Exact computation of invariants of linear non-autonomous single-input
//! control systems, realizability of meromorphic tuples as such invariants,
//! certified power-series solutions of the associated linear ODE, and local
//! analytic linearizability of affine systems.
//!
//! All arithmetic is exact over the rationals; see [`exactalg`].

// error values carry the offending root interval and entry name
#![allow(clippy::result_large_err)]

pub mod exactalg;
pub mod frobenius;
pub mod laurent;
pub mod linsys;
pub mod nlin;
pub mod realize;
pub mod shell;

pub use exactalg::{Matrix, Rat, RationalFunction, UniPoly, XPoly};
