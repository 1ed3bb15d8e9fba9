//! Numerical toolkit for the sixth Painlevé equation across its four
//! coordinate systems: the classical rational form in (X, t), the elliptic
//! form on the universal torus in (z, tau), the Hamiltonian phase space in
//! (y, z, tau), and the algebraic phase-space model in (U, X, Y, t).
//!
//! The crate evaluates the underlying special functions (theta, Weierstrass,
//! Eisenstein), uniformizes the Legendre pencil Y^2 = X(X-1)(X-t) through the
//! torus, integrates the equation along complex paths in any chart, evaluates
//! the Painlevé differential forms, and applies the symmetry groups acting on
//! solutions and parameters. Every structural identity connecting these
//! pieces is exposed as a residual that can be driven to zero numerically.

pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod forms;
pub mod numeric;
pub mod picard_fuchs;
pub mod symmetry;
pub mod uniformization;

pub use error::{Error, Result};
