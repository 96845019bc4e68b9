//! Finite fields 𝔽_{p^m} with deterministic moduli, embeddings between
//! them, and linear and Frobenius-semilinear algebra.

mod field;
mod matrix;

pub use field::{
    is_irreducible, is_prime, lex_least_irreducible, FieldEmbedding, FieldJson, FqElement, FqField,
    MAX_FIELD_ORDER,
};
pub use matrix::{
    additive_roots, linearized_kernel, semilinear_kernel, span_basis, Echelon, FqMatrix,
};

/// Coordinates of a field element for JSON output.
pub fn element_to_json(f: &FqField, a: FqElement) -> Vec<u32> {
    f.coords(a)
}
