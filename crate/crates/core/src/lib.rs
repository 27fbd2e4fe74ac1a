pub mod cli;
pub mod coupling;
pub mod cyclic;
pub mod dsl;
pub mod hidden;
pub mod rational;
pub mod report;
mod scalar;
pub mod simplex;
pub mod system;
pub mod trials;
