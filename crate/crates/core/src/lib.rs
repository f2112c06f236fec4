//! Numerical and symbolic machinery for Mittag-Leffler functions, random
//! variables with moments of gamma type, and infinite-divisibility
//! certificates for α-Cauchy and related laws.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; IO, file formats and the command line live in the
//! `mlgamma` companion crate.
//!
//! | module       | contents                                                        |
//! |--------------|-----------------------------------------------------------------|
//! | [`gamma`]    | Γ, ln Γ and 1/Γ with reflection                                 |
//! | [`quad`]     | adaptive Gauss–Kronrod panels, half-line substitutions          |
//! | [`specfun`]  | E^γ_{ρ,μ}, the Wright function, tail signs, sign scans          |
//! | [`mellin`]   | exact algebra on C·D^s·∏Γ(A s+a)/∏Γ(B s+b)                      |
//! | [`dists`]    | densities, fractional moments, samplers, KS and Mellin oracles  |
//! | [`classify`] | existence / non-negativity verdicts with rule provenance        |
//! | [`idcert`]   | infinite-divisibility certificates and identity verification    |

#![no_std]

extern crate alloc;

pub mod classify;
pub mod dists;
mod error;
pub mod gamma;
pub mod idcert;
pub mod mellin;
pub mod quad;
pub mod rational;
pub mod specfun;

pub(crate) use error::param_err;
pub use error::{Error, Result};
