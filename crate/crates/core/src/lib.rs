//! Numerical geometry of spherical cones over Ricci-bounded manifolds and the
//! Yamabe constants of `M × ℝ` and `M × S¹`.
//!
//! The spherical cone over `(Mⁿ, g)` with `Ricci(g) ≥ (n−1)g` carries the metric
//! `sin²(t)·g + dt²`. Its vertex balls realize the isoperimetric profile of the
//! round `Sⁿ⁺¹`, and away from the vertices it is conformal to `M × ℝ`. From
//! this one gets the lower bound `(V/Vₙ)^{2/(n+1)}·Y_{n+1}` for the Yamabe
//! constant of `(M × ℝ, g + dt²)`, with equality for Einstein `g`.
//!
//! Modules:
//! - [`geometry`]: sphere constants, cone curvature, ball volumes, the conformal map.
//! - [`isoperimetry`]: profiles, slice sets, dilation, Minkowski content, stability.
//! - [`symmetrization`]: decreasing rearrangement on the cone and transfer to `Sⁿ⁺¹`.
//! - [`variational`]: the one-dimensional Yamabe quotient and its minimizer.
//! - [`bounds`]: bound calculators and the Einstein catalog.
//! - [`verify`]: seeded property suites shared by the CLI and the tests.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod isoperimetry;
pub mod quadrature;
pub mod symmetrization;
pub mod variational;
pub mod verify;

pub use bounds::{BoundReport, Catalog, CatalogEntry, Formula};
pub use error::{Error, Result};
pub use geometry::{EinsteinData, SphereConstants, SphericalCone};
pub use grid::RoundConeGrid;
pub use isoperimetry::{GridSet, IsoProfile, SliceSet, StabilityInput};
pub use symmetrization::{ConeFunction, RadialProfile, RoundFunction};
pub use variational::{LineProblem, LineProfile, MinimizeOptions, MinimizeResult};
