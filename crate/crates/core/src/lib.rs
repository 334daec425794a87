//! Numerical geometry of surfaces in three-dimensional contact sub-Riemannian
//! manifolds.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is built on an exact
//! derivative oracle ([`jet`]): frames of the contact distribution are given
//! as expression fields on one global chart, and every connection, curvature
//! and surface quantity is computed from their Taylor jets.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod contact;
pub mod error;
pub mod expr;
pub mod field;
pub mod identities;
pub mod jet;
pub mod levi_civita;
pub mod linalg;
pub mod math;
pub mod quadrature;
pub mod surface;

pub use contact::{build_contact, ContactFrame, ContactStructure, Epsilon, LocalContact};
pub use error::{Error, Result};
pub use expr::{Expr, Func};
pub use field::{ChartPoint, ConstField, ExprField, FnField, ScalarField, VectorField};
pub use jet::{Jet, Jet1, Jet2, Jet3, Scalar, MAX_ORDER};
