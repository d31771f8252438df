//! Local arithmetic of elliptic curves over the rationals.
//!
//! The crate computes, for an integral Weierstrass model and a prime `p`:
//!
//! * exact invariants, minimal models, and point counts ([`curve`]);
//! * the Kodaira type, conductor exponent, Tamagawa number, and an explicit
//!   component-group-with-Frobenius model via Tate's algorithm ([`tate`]);
//! * Frobenius invariants/coinvariants, finite-level cyclic cohomology, and
//!   the torsor group whose order equals the Tamagawa number ([`cohomology`]);
//! * mod-p congruence evidence between curves and the torsor-order
//!   prediction it supports ([`visibility`]);
//! * a plain-text curve-database format and a batch verification suite that
//!   re-checks every identity across a corpus ([`db`]).
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals); no
//! floating point is used anywhere.

mod arith;

pub mod cohomology;
pub mod curve;
pub mod db;
mod error;
pub mod group;
pub mod tate;
pub mod visibility;

pub use error::{Error, Result};
