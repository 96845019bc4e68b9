//! Symbolic identities satisfied by the universal polynomials.

use num_bigint::BigInt;
use num_traits::One;

use super::{apply_universal, scalar_vars, universal_polys, witt_vars, WittKind};
use crate::error::Result;
use crate::exact::{IntPoly, Monomial, Var};

fn sum(p: u32, a: &[IntPoly], b: &[IntPoly]) -> Result<Vec<IntPoly>> {
    let s = universal_polys(p, a.len(), WittKind::Sum)?;
    apply_universal(&s, &[a, b], &[])
}

fn neg(p: u32, a: &[IntPoly]) -> Result<Vec<IntPoly>> {
    let s = universal_polys(p, a.len(), WittKind::Neg)?;
    apply_universal(&s, &[a], &[])
}

fn frob(p: u32, a: &[IntPoly]) -> Result<Vec<IntPoly>> {
    let s = universal_polys(p, a.len() - 1, WittKind::Frob)?;
    apply_universal(&s, &[a], &[])
}

fn scalar(p: u32, a: &[IntPoly], x: &[IntPoly]) -> Result<Vec<IntPoly>> {
    let s = universal_polys(p, x.len(), WittKind::Scalar)?;
    apply_universal(&s, &[x], a)
}

fn verschiebung(x: &[IntPoly]) -> Vec<IntPoly> {
    let mut v = vec![IntPoly::zero()];
    v.extend_from_slice(x);
    v
}

/// `k · x` by repeated Witt addition.
pub fn multiple(p: u32, x: &[IntPoly], k: u32) -> Result<Vec<IntPoly>> {
    let mut acc = vec![IntPoly::zero(); x.len()];
    for _ in 0..k {
        acc = sum(p, &acc, x)?;
    }
    Ok(acc)
}

/// `Σ_{I ⊆ {1..k}} (−1)^{|I|} t(Σ_{i∈I} t_i)` in `W_2(ℤ[t_0, …, t_{k−1}])`,
/// computed with the universal sum and negation polynomials.
pub fn teichmuller_alternating_sum(p: u32, k: usize) -> Result<[IntPoly; 2]> {
    let mut acc = vec![IntPoly::zero(), IntPoly::zero()];
    for mask in 0u32..(1 << k) {
        let s = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .fold(IntPoly::zero(), |a, i| {
                a.add(&IntPoly::var(Var::free(i as u32)))
            });
        let mut t = vec![s, IntPoly::zero()];
        if mask.count_ones() % 2 == 1 {
            t = neg(p, &t)?;
        }
        acc = sum(p, &acc, &t)?;
    }
    Ok([acc[0].clone(), acc[1].clone()])
}

/// `(−1)^k Σ (1/p) (p choose i_1, …, i_k) t_0^{i_1} ⋯ t_{k−1}^{i_k}` over
/// compositions of `p` into `k` positive parts.
pub fn teichmuller_expected(p: u32, k: usize) -> IntPoly {
    fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
        if parts == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 1..=total {
            for mut rest in compositions(total - first, parts - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let fact = |n: u32| (1..=n).fold(BigInt::one(), |a, i| a * i);
    let sign = if k % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    IntPoly::from_terms(compositions(p, k).into_iter().map(|c| {
        let denom = c.iter().fold(BigInt::one(), |a, &i| a * fact(i));
        let coeff = fact(p) / denom / p;
        let m = Monomial::from_pairs(c.iter().enumerate().map(|(i, &e)| (Var::free(i as u32), e)));
        (m, &sign * coeff)
    }))
}

/// Checks the multinomial Teichmüller identity exactly over ℤ.
pub fn teichmuller_identity(p: u32, k: usize) -> Result<bool> {
    let [first, second] = teichmuller_alternating_sum(p, k)?;
    Ok(first.is_zero() && second == teichmuller_expected(p, k))
}

/// For `k = p`, the alternating sum is `(0, t_0 ⋯ t_{p−1})` modulo `p`.
pub fn teichmuller_product_mod_p(p: u32) -> Result<bool> {
    let [first, second] = teichmuller_alternating_sum(p, p as usize)?;
    let product = Monomial::from_pairs((0..p).map(|i| (Var::free(i), 1)));
    Ok(first.is_zero() && second.reduce_mod(p).to_int() == IntPoly::term(BigInt::one(), product))
}

/// `S(S(x, y), z) = S(x, S(y, z))` and `S(x, N(x)) = 0`.
pub fn group_laws(p: u32, n: usize) -> Result<bool> {
    let (x, y, z) = (witt_vars(0, n), witt_vars(1, n), witt_vars(2, n));
    let left = sum(p, &sum(p, &x, &y)?, &z)?;
    let right = sum(p, &x, &sum(p, &y, &z)?)?;
    let commutes = sum(p, &x, &y)? == sum(p, &y, &x)?;
    let inverse = sum(p, &x, &neg(p, &x)?)?.iter().all(IntPoly::is_zero);
    Ok(left == right && commutes && inverse)
}

/// `F(V(x)) = p·x` exactly, and `V(F(x)) ≡ p·x (mod p)`.
pub fn frobenius_verschiebung(p: u32, n: usize) -> Result<bool> {
    let x = witt_vars(0, n);
    let fv = frob(p, &verschiebung(&x))?;
    let px = multiple(p, &x, p)?;
    let x1 = witt_vars(0, n + 1);
    let vf = verschiebung(&frob(p, &x1)?);
    let px1 = multiple(p, &x1, p)?;
    let vf_mod_p = vf
        .iter()
        .zip(&px1)
        .all(|(a, b)| a.sub(b).reduce_mod(p).is_zero());
    Ok(fv == px && vf_mod_p)
}

/// Scalar commutation: `F(a·x) = F(a)·F(x)` and `V(F(a)·x) = a·V(x)`
/// exactly, and `F(a)` reduces to the coordinatewise p-th power of `a`.
pub fn scalar_commutation(p: u32, n: usize) -> Result<bool> {
    let a1 = scalar_vars(n + 1);
    let x1 = witt_vars(0, n + 1);
    let f_ax = frob(p, &scalar(p, &a1, &x1)?)?;
    let fa: Vec<IntPoly> = frob(p, &a1)?;
    let fa_fx = scalar(p, &fa, &frob(p, &x1)?)?;
    let a_pow: Vec<IntPoly> = a1[..n].iter().map(|a| a.pow(p)).collect();
    let frob_is_power = fa
        .iter()
        .zip(&a_pow)
        .all(|(u, v)| u.sub(v).reduce_mod(p).is_zero());

    let x = witt_vars(0, n);
    let v_fa_x = verschiebung(&scalar(p, &fa, &x)?);
    let a_vx = scalar(p, &a1, &verschiebung(&x))?;
    Ok(f_ax == fa_fx && frob_is_power && v_fa_x == a_vx)
}
