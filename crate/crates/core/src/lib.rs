//! Exact invariant exterior calculus on 6-dimensional nilmanifolds, with the
//! geometric machinery needed to verify Strominger-system data: Bismut
//! curvature, anomaly-cancellation slope parameters, balanced-metric
//! feasibility, and invariant cohomology.

pub mod anomaly;
pub mod cohomology;
pub mod dsl;
pub mod error;
pub mod family;
pub mod feasibility;
pub mod form;
pub mod frame;
pub mod hermitian;
pub mod connection;
pub mod linalg;
pub mod scalar;
pub mod structure;

pub use error::Error;
pub use form::{Basis, Form, FormMap};
pub use scalar::{ExactComplex, Scalar, DEFAULT_TOL};
pub use structure::{deform, DeformationParams, Diagnostics, StructureSpec};
