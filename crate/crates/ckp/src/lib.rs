//! Divergence functionals on finite probability spaces, the linearization
//! machinery for Tsallis-distance domination, best-constant estimation,
//! exact Kantorovich transport, and a randomized verification harness
//! that checks every inequality the crate implements and reports margins.

pub mod constants;
pub mod divergence;
pub mod error;
pub mod harness;
pub mod linearize;
pub mod measure;
pub mod parallel;
pub mod report;
pub mod simplex;
pub mod transport;

pub use error::{Error, Result};
pub use measure::{center, lp_norm, Density, Order, RealFunction, Space};
pub use report::{CheckReport, Status};
