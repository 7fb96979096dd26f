//! Orthogonal step wavelets on local fields of positive characteristic.
//!
//! The local field F^(s) is modelled as two-sided digit sequences over
//! GF(p^s). Given a scaling mask `m^(0)` this crate synthesizes the refinable
//! function, completes the mask to a family of wavelet masks through per-prefix
//! unitary matrices, synthesizes the wavelets and checks orthonormality of all
//! their shifts by direct inner products.

pub mod characters;
pub mod error;
pub mod formats;
pub mod galois_field;
pub mod local_field;
pub mod mra_masks;
pub mod step_functions;
pub mod wavelet_builder;
pub mod window;

pub use error::{Error, Result};
pub use galois_field::{GaloisField, GfElement};
pub use mra_masks::{Mask, DEFAULT_TOLERANCE};
pub use wavelet_builder::WaveletSystem;
