//! Spectral Galerkin solver and bifurcation-continuation engine for the
//! periodic nonlocal equation 𝓛u = λu + |u|^p on the one-dimensional torus,
//! where 𝓛 is the Fourier multiplier |n|^{2s}𝔪(n).
//!
//! The crate is organised around the objects of the analysis:
//!
//! - [`multiplier`]: the symbol 𝔪(n), its hypotheses and the operator symbol
//! - [`field`]: even periodic fields as cosine series, transforms, norms
//! - [`operator`]: F(λ,u) = 𝓛u - λu - |u|^p, derivatives, Newton
//! - [`spectrum`]: exact eigenvalues, transversality, bifurcation direction
//! - [`continuation`]: pseudo-arclength branch tracing, events, symmetries
//! - [`bounds`]: a-priori bound functions and per-point assertions
//! - [`oracle_bo`]: closed-form Benjamin-Ono profiles as ground truth
//! - [`evolve`]: pseudospectral time integration of the dispersive model
//! - [`acceptance`]: the end-to-end verification suite behind `verify`

pub mod acceptance;
pub mod bounds;
pub mod continuation;
pub mod error;
pub mod evolve;
pub mod field;
pub mod multiplier;
pub mod operator;
pub mod oracle_bo;
pub mod spectrum;

pub use error::{Error, Result};
