//! Exact-arithmetic engine for (a,b)-modules, primitive themes, and
//! change-of-variable functors.

pub mod abalg;
pub mod changevar;
pub mod error;
pub mod linsolve;
pub mod scalar;
pub mod series;
pub mod theme;
pub mod ximodel;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use series::{TruncSeries, VarTag};
