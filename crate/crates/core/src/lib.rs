//! Bipartite depolarizing maps
//! `Φ[α,β,γ](X) = 1 Tr X + α 1_A ⊗ Tr_A X + β Tr_B X ⊗ 1_B + γ X`.
//!
//! The crate classifies these maps (positive, completely positive,
//! completely copositive, entanglement breaking, entanglement annihilating)
//! in closed form, builds separability certificates and named states, and
//! checks every closed form against brute-force numerical oracles.

pub mod classify;
pub mod error;
pub mod exec;
pub mod grid;
pub mod hadamard;
pub mod linalg;
pub mod maps;
pub mod oracle;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{CMatrix, CVector, Dims, ProbVector, Side};
pub use maps::{ChiParams, PhiParams};
