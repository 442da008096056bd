//! Detection and certification of multistationarity regions for mass-action
//! reaction networks through positively decorated simplices.
//!
//! The crate is `no_std` (it needs `alloc`). Everything sign-related is exact
//! rational arithmetic. Floating point is used for root finding in [`witness`]
//! and for numeric checks of parametrizations and rescaled rates.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod linalg;
pub mod lp;
pub mod geometry;
pub mod expr;
pub mod decoration;
pub mod cayley;
pub mod crn;
pub mod witness;
