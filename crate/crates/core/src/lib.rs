//! Interpolation and approximate recovery in quasi shift-invariant spaces.
//!
//! A quasi shift-invariant space is spanned by translates `ψ(· − x_j)` of a
//! single generator along a nonuniform node sequence. This crate models such
//! spaces on finite symmetric windows and provides
//!
//! * a catalog of generators with exact Fourier pairs ([`kernel`]),
//! * grid Fourier utilities ([`fourier`]),
//! * node windows, exponential Gram matrices and prolongation ([`nodes`]),
//! * members of the space and their norms ([`qsis`]),
//! * collocation interpolation ([`interp`]),
//! * cardinal functions on the integer lattice ([`cardinal`]),
//! * convergence and counterexample experiments ([`recovery`]).
//!
//! The Fourier transform is `f̂(ξ) = (2π)^{-1/2} ∫ f(x) e^{-iξx} dx` everywhere.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cardinal;
pub mod error;
pub mod fourier;
pub mod interp;
pub mod kernel;
pub mod nodes;
pub mod qsis;
pub mod random;
pub mod recovery;
pub mod table;
pub mod tolerances;

pub use error::{Error, Result};
pub use fourier::{LineGrid, Side, Spectrum, TorusGrid};
pub use kernel::{Kernel, KernelSpec, RegularityReport};
pub use nodes::{NodeSet, RieszEstimate};
pub use qsis::QsisFunction;
