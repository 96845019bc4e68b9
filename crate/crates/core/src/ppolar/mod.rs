//! Finite-dimensional p-polar algebras over 𝔽_q: construction from
//! commutative algebras, evaluation of polar products, ideals and
//! nilpotence.

mod algebra;
mod comm;
mod ideal;
pub mod random;

pub use algebra::{
    free_polar_basis, multisets, AssocWitness, PPolarAlgebra, PPolarJson, PolarMonomial,
};
pub use comm::{AlgebraJson, CommAlgebra, EntryJson};
pub use ideal::{
    ideal_generated, ideal_power, ideal_power_nilpotent, is_reduced, iterated_power_matrix,
    nilpotency_index, nilradical, quotient, restrict, PolarIdeal, Quotient, Subspace,
};
