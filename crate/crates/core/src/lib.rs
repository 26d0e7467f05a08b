//! Numerical laboratory for conformal densities `λ(z)|dz|` with negative
//! curvature near an isolated planar singularity.
//!
//! The crate is organized around one geometric situation: a density λ on a
//! punctured disk, blowing up at the puncture like a power `|z|^{-α}` (a
//! corner, α < 1) or like `1/(|z| log 1/|z|)` (a cusp, α = 1). It provides
//!
//! * [`metrics`] — the closed-form catalog (hyperbolic disk, punctured disk,
//!   the one-parameter family `λ_{α,R}`), pullbacks, and pointwise numerical
//!   curvature and derivative evaluation of arbitrary densities;
//! * [`potential`] — logarithmic potentials of compactly supported sources
//!   and the boundary-corrected formulas for their higher derivatives;
//! * [`solver`] — a Newton solver for the curvature equation
//!   `Δu = -κ(z) e^{2u}` on log-polar annular grids, plus extraction of the
//!   bounded remainder left after the singular part of `u` is removed;
//! * [`asymptotics`] — singularity-order estimation, decay-rate fitting
//!   `g ≈ C r^p (log 1/r)^q`, and sequence-limit extrapolation for the
//!   boundary behavior of densities and remainders;
//! * [`bounds`] — verdict-producing checks of the comparison principles,
//!   derivative-limit tables, and the Γ-product bound for the thrice
//!   punctured sphere.
//!
//! Heavy point-wise sweeps run through [`exec`], which is backed by a work
//! stealing pool when the `parallel` feature (default) is enabled and by a
//! plain sequential loop otherwise. Results are identical either way.

pub mod asymptotics;
pub mod bounds;
pub mod exec;
pub mod grid;
pub mod metrics;
pub mod potential;
pub mod solver;

pub use metrics::{ComplexPoint, MetricField};
