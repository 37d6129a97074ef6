//! Randomized verification harness: instance generation, the check
//! registry, the sweep runner, and adversarial margin search.

pub mod checks;
pub mod instance;
pub mod search;
pub mod suite;
