//! Numerical toolkit for convex bodies weighted by radial measures.
//!
//! The crate evaluates measures of convex bodies (`mu(K)`), first and second
//! variations along Minkowski sums (`mu(K; L)`, `mu(K; L, M)`), weighted
//! surface measures, and a family of inequalities relating them —
//! concavity of `t -> mu((1-t)K + tL)`, first/second variation bounds,
//! modularity of sums, and boundary-integral comparisons for convex
//! functions. Every computed value carries an error budget and a tag for
//! the route that produced it, and each claim is decided by independent
//! routes (closed forms, boundary flux, interior quadrature, finite
//! differences, quasi-Monte Carlo) rather than by a single code path.

pub mod bodies;
pub mod convexfn;
pub mod error;
pub mod exec;
pub mod generate;
pub mod geom;
pub mod inequalities;
pub mod measures;
pub mod mixed;
pub mod planar;
pub mod qmc;
pub mod quad;
pub mod reports;
pub mod repro;
pub mod stats;
pub mod surface;

pub use bodies::{Body, MembershipOracle, SumTerm};
pub use error::{Error, Result};
pub use measures::{
    measure, measure_with, EvalBudget, EvalResult, Measure, Method, RadialExpFamily,
    DEFAULT_SEED,
};
pub use planar::PlanarShape;
