//! An observational type theory kernel whose universes carry injective codes,
//! together with a verifier that builds the same inductive-recursive universe
//! hierarchy inside finite presheaf topoi and checks its equations.

pub mod syntax;
pub mod kernel;
pub mod canon;
pub mod ir_universe;
pub mod presheaf;
