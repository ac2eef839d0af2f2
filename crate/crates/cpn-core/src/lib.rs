//! Numerics for the bi-hamiltonian structure of complex projective space.
//!
//! Everything lives on the dense open cell of `CP^n` in momentum-angle
//! coordinates `(x_1, phi_1, ..., x_n, phi_n)`. The crate provides
//!
//! * a dense pointwise exterior algebra ([`exterior`]),
//! * the coordinate tower on the big cell — homogeneous, affine, Lu,
//!   q- and momentum-angle charts ([`charts`]),
//! * the invariant symplectic bivector and the Bruhat bivector, their
//!   pencil, Poisson brackets and the numerical Schouten calculus
//!   ([`poisson`]),
//! * the commuting family built from wedge-power ratios and its
//!   identification with elementary symmetric polynomials
//!   ([`invariants`]),
//! * Gelfand-Tsetlin patterns of the rank-one coadjoint orbit
//!   ([`gelfand_tsetlin`]),
//! * the Lenard recursion for torus-invariant Hamiltonians ([`lenard`]),
//! * Hamiltonian flow integration with conservation audits ([`flows`]).
//!
//! The crate is `no_std` (with `alloc`); all transcendentals go through
//! `libm`, which keeps results bit-identical across platforms.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub(crate) mod math;

pub mod charts;
pub mod exterior;
pub mod flows;
pub mod gelfand_tsetlin;
pub mod invariants;
pub mod lenard;
pub mod linalg;
pub mod poisson;
pub mod scalar;

pub use charts::MomentumAnglePoint;
pub use exterior::{MultiForm, MultiVector};
pub use poisson::{BivectorField, PoissonPencil, PoissonStructure};
pub use scalar::ScalarField;

/// Default denominator guard for top-degree division.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Default step for central finite differences.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Default distance kept between sampled points and the simplex boundary.
pub const DEFAULT_MARGIN: f64 = 0.05;
