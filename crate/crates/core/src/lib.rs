//! Walsh–Paley and Walsh–Kaczmarz analysis on the dyadic group with exact
//! rational arithmetic: kernels, Fejér means, martingale Hardy norms and the
//! experiment drivers built on them.

pub mod dyadic;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod hardy;
pub mod kernels;
pub mod means;
pub mod walsh;

pub use dyadic::{DyadicFunction, DyadicInterval, GroupPoint};
pub use error::{Error, Result};
pub use exact::Exponent;
pub use walsh::{Spectrum, System};
