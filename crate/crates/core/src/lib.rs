//! Linear stability of elliptic relative equilibria of the planar four-body
//! problem with two small masses.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: complex embeddings, symplectic forms, 4×4 eigenvalues.
//! * [`ode`] and [`quadrature`]: adaptive integration in time.
//! * [`reduction`]: from a central configuration to the essential parameters.
//! * [`smallmass`]: the two-small-mass family near L4.
//! * [`systems`]: the essential 4×4 linear systems and their monodromy.
//! * [`index`]: nullities, Krein signs, normal forms, Hill operators and ω-indices.
//! * [`curves`]: degenerate curves, convex boundaries and region maps.
//! * [`report`]: CSV, JSON-friendly rounding and SVG output.

pub mod curves;
pub mod error;
pub mod index;
pub mod numerics;
pub mod ode;
pub mod quadrature;
pub mod reduction;
pub mod report;
pub mod smallmass;
pub mod systems;

pub use error::{Error, Result};
