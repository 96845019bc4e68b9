//! Seeded generators of random algebras and elements.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::algebra::PPolarAlgebra;
use super::comm::CommAlgebra;
use crate::gfq::{FqElement, FqField, FqMatrix};

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, f: &FqField) -> FqElement {
    FqElement(rng.gen_range(0..f.order()))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, f: &FqField, n: usize) -> Vec<FqElement> {
    (0..n).map(|_| random_element(rng, f)).collect()
}

pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, f: &FqField, n: usize) -> FqMatrix {
    loop {
        let rows: Vec<Vec<FqElement>> = (0..n).map(|_| random_vector(rng, f, n)).collect();
        let m = FqMatrix::from_rows(&rows).expect("square");
        if m.rank(f) == n {
            return m;
        }
    }
}

/// A random commutative algebra of dimension in `1..=max_dim`: a product of
/// truncated polynomial rings, monogenic quotients and copies of the field.
pub fn random_comm_algebra<R: Rng + ?Sized>(
    rng: &mut R,
    field: &Arc<FqField>,
    max_dim: usize,
) -> CommAlgebra {
    let mut remaining = rng.gen_range(1..=max_dim);
    let mut acc: Option<CommAlgebra> = None;
    while remaining > 0 {
        let d = rng.gen_range(1..=remaining);
        let factor = match rng.gen_range(0..3) {
            0 => {
                let low = rng.gen_range(0..=1u32);
                CommAlgebra::truncated(field.clone(), low, low + d as u32).expect("valid range")
            }
            1 => {
                let mut f = random_vector(rng, field, d);
                f.push(FqElement::ONE);
                CommAlgebra::monogenic(field.clone(), &f).expect("monic")
            }
            _ => CommAlgebra::product_of_fields(field.clone(), d),
        };
        acc = Some(match acc {
            None => factor,
            Some(a) => a.direct_product(&factor).expect("same field"),
        });
        remaining -= d;
    }
    acc.expect("positive dimension")
}

/// `pol(R)` of a random `R`, in a randomly scrambled basis.
pub fn random_polarized<R: Rng + ?Sized>(
    rng: &mut R,
    field: &Arc<FqField>,
    max_dim: usize,
) -> PPolarAlgebra {
    let r = random_comm_algebra(rng, field, max_dim);
    let a = PPolarAlgebra::polarize(&r).expect("polarizations are p-polar");
    let b = random_invertible(rng, field, a.dim());
    a.change_basis(&b).expect("invertible")
}

/// A random reduced algebra: `pol` of a product of finite field extensions,
/// scrambled.
pub fn random_reduced<R: Rng + ?Sized>(
    rng: &mut R,
    field: &Arc<FqField>,
    max_dim: usize,
) -> PPolarAlgebra {
    let mut remaining = rng.gen_range(1..=max_dim);
    let mut acc: Option<CommAlgebra> = None;
    while remaining > 0 {
        let d = rng.gen_range(1..=remaining.min(3));
        let factor = CommAlgebra::field_extension(field.clone(), d as u32).expect("small field");
        acc = Some(match acc {
            None => factor,
            Some(a) => a.direct_product(&factor).expect("same field"),
        });
        remaining -= d;
    }
    let a = PPolarAlgebra::polarize(&acc.expect("positive dimension")).expect("p-polar");
    let b = random_invertible(rng, field, a.dim());
    a.change_basis(&b).expect("invertible")
}

/// Evaluates the product of `xs` along a random p-ary multiplication tree.
pub fn random_tree_product<R: Rng + ?Sized>(
    rng: &mut R,
    a: &PPolarAlgebra,
    xs: &[Vec<FqElement>],
) -> Vec<FqElement> {
    let p = a.p() as usize;
    let mut pool: Vec<Vec<FqElement>> = xs.to_vec();
    pool.shuffle(rng);
    while pool.len() > 1 {
        let mut picked = Vec::with_capacity(p);
        for _ in 0..p {
            let i = rng.gen_range(0..pool.len());
            picked.push(pool.swap_remove(i));
        }
        let refs: Vec<&[FqElement]> = picked.iter().map(Vec::as_slice).collect();
        let v = a.mu(&refs).expect("p arguments");
        let at = rng.gen_range(0..=pool.len());
        pool.insert(at, v);
    }
    pool.pop().expect("one element left")
}
