//! Exact arithmetic for p-polar algebras over finite fields: their Witt and
//! co-Witt vectors, the universal Witt polynomials, idempotent splitting of
//! reduced algebras, and p-typical formal group laws acting on nilpotents.

pub mod cowitt;
pub mod error;
pub mod etale;
pub mod exact;
pub mod fgl;
pub mod gfq;
pub mod ppolar;
pub mod verify;
pub mod wittmod;
pub mod wittuniv;

pub use error::{Error, Result};
