//! Exact computations with finite commutative rings: module and algebra
//! arithmetic, Azumaya and Morita checks, Picard and unit data, symmetric
//! monoidal groupoids, and their iterated deloopings.

pub mod abelian;
pub mod algebra;
pub mod azumaya;
pub mod cli;
pub mod config;
pub mod brauer;
pub mod error;
pub mod gamma;
pub mod module;
pub mod picard;
pub mod ring;
pub mod simplicial;
pub mod smc;
pub mod tensor;
