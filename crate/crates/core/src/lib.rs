pub mod arith;
pub mod atverify;
pub mod ellsurf;
pub mod error;
pub mod heckecm;
pub mod mwheights;
pub mod poly;
pub mod qforms;
pub mod registry;

pub use error::{Error, Result};
pub use num_rational::BigRational;
