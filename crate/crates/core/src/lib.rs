//! Orthogonal polynomials from three-term recurrences, their kernel
//! (Christoffel) transforms, quasi-type kernels, Geronimus and Uvarov
//! transforms, recovery of the original sequence, and continued fractions
//! for ratios of kernel polynomials.

pub mod error;
pub mod families;
pub mod kernels;
pub mod moments;
pub mod quasi;
pub mod ratios;
pub mod scalar;
pub mod transforms;
pub mod verify;

pub use error::{OpxError, Result};
pub use families::{eval_sequence, recurrence_coefficients, FamilyKind, FamilySpec, PolySequence, Recurrence, Support};
pub use kernels::{IteratedKernelContext, KernelContext};
pub use moments::{gauss_rule, FunctionalKind, GaussRule};
pub use scalar::Scalar;
