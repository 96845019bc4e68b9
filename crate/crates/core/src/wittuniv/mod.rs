//! Universal p-typical Witt polynomials, derived from the ghost map and
//! Dwork's lifting recursion, and certified to live in the free p-polar ring.

mod cache;
pub mod identities;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Block, IntPoly, ModPoly, Monomial, Var};

pub use cache::{cache_dir, cost_warning, universal_polys, within_envelope, CacheFile};

/// The Witt operations that have universal polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WittKind {
    Sum,
    Neg,
    Prod,
    Frob,
    Scalar,
}

impl WittKind {
    pub const ALL: [WittKind; 5] = [
        WittKind::Sum,
        WittKind::Neg,
        WittKind::Prod,
        WittKind::Frob,
        WittKind::Scalar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WittKind::Sum => "sum",
            WittKind::Neg => "neg",
            WittKind::Prod => "prod",
            WittKind::Frob => "frob",
            WittKind::Scalar => "scalar",
        }
    }

    /// Whether `v` is counted by the polar degree condition.
    pub fn is_polar_var(self, v: Var) -> bool {
        match self {
            WittKind::Scalar => v.block == Block::Witt(0),
            _ => matches!(v.block, Block::Witt(_)),
        }
    }
}

impl fmt::Display for WittKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WittKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WittKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown Witt operation {s:?}")))
    }
}

/// Component `level` of a universal Witt operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivWittPoly {
    pub p: u32,
    pub kind: WittKind,
    pub level: usize,
    pub poly: IntPoly,
}

pub(crate) fn p_pow(p: u32, k: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), k)
}

/// `Σ_{i≤m} p^i c_i^{p^{m−i}}` for every `m < comps.len()`.
pub fn ghost_of(p: u32, comps: &[IntPoly]) -> Vec<IntPoly> {
    let mut powers: Vec<IntPoly> = Vec::with_capacity(comps.len());
    let mut out = Vec::with_capacity(comps.len());
    for (m, c) in comps.iter().enumerate() {
        for q in powers.iter_mut() {
            *q = q.pow(p);
        }
        powers.push(c.clone());
        let mut w = IntPoly::zero();
        for (i, q) in powers.iter().enumerate() {
            w = w.add(&q.scale(&p_pow(p, i)));
        }
        out.push(w);
        debug_assert_eq!(out.len(), m + 1);
    }
    out
}

/// Ghost components of a Witt vector of variables `var(0), var(1), …`.
pub fn ghost_in(p: u32, n: usize, var: impl Fn(u32) -> Var) -> Vec<IntPoly> {
    let comps: Vec<IntPoly> = (0..n as u32).map(|i| IntPoly::var(var(i))).collect();
    ghost_of(p, &comps)
}

/// `w_m = Σ_{i≤m} p^i a_i^{p^{m−i}}` for `m < n`, in the variables `a_i`.
pub fn ghost_polys(p: u32, n: usize) -> Vec<IntPoly> {
    ghost_in(p, n, Var::scalar)
}

/// Dwork's recursion with the Frobenius lift `v ↦ v^p` on every variable.
pub fn dwork_lift(p: u32, target: &[IntPoly]) -> Result<Vec<IntPoly>> {
    dwork_lift_with(p, target, |f| f.raise_vars(p))
}

/// Solves `w(c) = target` by `p^m c_m = D_m`, after checking the congruence
/// `target_m ≡ ϕ(target_{m−1}) (mod p^m)`.
pub fn dwork_lift_with(
    p: u32,
    target: &[IntPoly],
    phi: impl Fn(&IntPoly) -> IntPoly,
) -> Result<Vec<IntPoly>> {
    let mut comps: Vec<IntPoly> = Vec::with_capacity(target.len());
    // powers[i] = c_i^{p^{m-1-i}} at the start of level m
    let mut powers: Vec<IntPoly> = Vec::with_capacity(target.len());
    for (m, x) in target.iter().enumerate() {
        let pm = p_pow(p, m);
        if m >= 1 && !x.sub(&phi(&target[m - 1])).divisible_by(&pm) {
            return Err(Error::DworkCongruenceFailed { level: m });
        }
        for q in powers.iter_mut() {
            *q = q.pow(p);
        }
        let mut d = x.clone();
        for (i, q) in powers.iter().enumerate() {
            d = d.sub(&q.scale(&p_pow(p, i)));
        }
        let c = d.exact_div_int(&pm)?;
        powers.push(c.clone());
        comps.push(c);
    }
    Ok(comps)
}

/// Ghost target whose Dwork lift is the universal operation.
pub fn ghost_target(p: u32, n: usize, kind: WittKind) -> Vec<IntPoly> {
    match kind {
        WittKind::Sum => {
            let x = ghost_in(p, n, Var::x);
            let y = ghost_in(p, n, Var::y);
            x.iter().zip(&y).map(|(a, b)| a.add(b)).collect()
        }
        WittKind::Neg => ghost_in(p, n, Var::x).iter().map(IntPoly::neg).collect(),
        WittKind::Prod => {
            let blocks: Vec<Vec<IntPoly>> = (0..p as u8)
                .map(|j| ghost_in(p, n, |i| Var::witt(j, i)))
                .collect();
            (0..n)
                .map(|m| blocks.iter().fold(IntPoly::one(), |acc, b| acc.mul(&b[m])))
                .collect()
        }
        WittKind::Frob => ghost_in(p, n + 1, Var::x)[1..].to_vec(),
        WittKind::Scalar => {
            let a = ghost_in(p, n, Var::scalar);
            let x = ghost_in(p, n, Var::x);
            a.iter().zip(&x).map(|(s, t)| s.mul(t)).collect()
        }
    }
}

/// Derives the universal polynomials of length `n` without any caching.
pub fn compute_universal_polys(p: u32, n: usize, kind: WittKind) -> Result<Vec<UnivWittPoly>> {
    check_args(p, n)?;
    let comps = dwork_lift(p, &ghost_target(p, n, kind))?;
    let polys: Vec<UnivWittPoly> = comps
        .into_iter()
        .enumerate()
        .map(|(level, poly)| UnivWittPoly {
            p,
            kind,
            level,
            poly,
        })
        .collect();
    if let Some(bad) = polys.iter().find(|u| !polar_degree_check(u)) {
        let m = offending_monomials(bad);
        return Err(Error::Internal(format!(
            "{kind} component {} has monomial {:?} of inadmissible polar degree",
            bad.level, m[0]
        )));
    }
    Ok(polys)
}

pub(crate) fn check_args(p: u32, n: usize) -> Result<()> {
    if !crate::gfq::is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::Invalid("length must be at least 1".into()));
    }
    if p > u8::MAX as u32 {
        // the product needs one variable block per factor
        return Err(Error::Invalid(format!("p = {p} is too large")));
    }
    Ok(())
}

/// Every monomial has polar-block degree `≡ 1 (mod p − 1)`.
pub fn polar_degree_check(u: &UnivWittPoly) -> bool {
    offending_monomials(u).is_empty()
}

pub fn offending_monomials(u: &UnivWittPoly) -> Vec<Monomial> {
    polar_offenders(&u.poly, u.p, |v| u.kind.is_polar_var(v))
}

/// Monomials of `f` whose degree in the selected variables is not
/// `≡ 1 (mod p − 1)`.
pub fn polar_offenders(f: &IntPoly, p: u32, select: impl Fn(Var) -> bool) -> Vec<Monomial> {
    f.terms()
        .filter(|(m, _)| (m.degree_where(&select) + p - 2) % (p - 1) != 0)
        .map(|(m, _)| m.clone())
        .collect()
}

pub fn reduce_mod_p(polys: &[UnivWittPoly]) -> Vec<ModPoly> {
    polys.iter().map(|u| u.poly.reduce_mod(u.p)).collect()
}

/// Substitutes Witt vectors of polynomials into the universal polynomials:
/// `blocks[j]` binds block `j` (x, y, …) and `scalars` binds the a-block.
pub fn apply_universal(
    polys: &[UnivWittPoly],
    blocks: &[&[IntPoly]],
    scalars: &[IntPoly],
) -> Result<Vec<IntPoly>> {
    let lookup = |v: Var| -> Option<IntPoly> {
        match v.block {
            Block::Witt(j) => blocks.get(j as usize)?.get(v.index as usize).cloned(),
            Block::Scalar => scalars.get(v.index as usize).cloned(),
            Block::Free => None,
        }
    };
    polys
        .iter()
        .map(|u| u.poly.substitute_with(lookup, None))
        .collect()
}

/// Witt vector of the variables of one block.
pub fn witt_vars(block: u8, n: usize) -> Vec<IntPoly> {
    (0..n as u32)
        .map(|i| IntPoly::var(Var::witt(block, i)))
        .collect()
}

pub fn scalar_vars(n: usize) -> Vec<IntPoly> {
    (0..n as u32)
        .map(|i| IntPoly::var(Var::scalar(i)))
        .collect()
}

/// Exact ghost round trip: `w(op(vars)) = target`.
pub fn ghost_round_trip(p: u32, n: usize, kind: WittKind, polys: &[UnivWittPoly]) -> bool {
    let comps: Vec<IntPoly> = polys.iter().map(|u| u.poly.clone()).collect();
    ghost_of(p, &comps) == ghost_target(p, n, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_int_poly;
    use num_traits::Zero;

    fn poly(s: &str) -> IntPoly {
        parse_int_poly(s).unwrap()
    }

    #[test]
    fn ghost_components() {
        assert_eq!(ghost_polys(5, 1), vec![poly("a0")]);
        assert_eq!(ghost_polys(2, 2), vec![poly("a0"), poly("a0^2 + 2*a1")]);
        assert_eq!(
            ghost_polys(3, 3),
            vec![
                poly("a0"),
                poly("a0^3 + 3*a1"),
                poly("a0^9 + 3*a1^3 + 9*a2")
            ]
        );
    }

    #[test]
    fn dwork_round_trip_on_ghost_of_variables() {
        let w = ghost_polys(3, 4);
        assert_eq!(dwork_lift(3, &w).unwrap(), scalar_vars(4));
    }

    #[test]
    fn dwork_solves_the_sum() {
        let t: Vec<IntPoly> = vec![poly("x0 + y0"), poly("x0^2 + 2*x1 + y0^2 + 2*y1")];
        assert_eq!(
            dwork_lift(2, &t).unwrap(),
            vec![poly("x0 + y0"), poly("x1 + y1 - x0*y0")]
        );
    }

    #[test]
    fn dwork_rejects_constant_sequence() {
        let t = vec![poly("x0"), poly("x0")];
        assert!(matches!(
            dwork_lift(2, &t),
            Err(Error::DworkCongruenceFailed { level: 1 })
        ));
    }

    #[test]
    fn teichmuller_powers_are_ghost_images() {
        for p in [2, 3] {
            let x = IntPoly::var(Var::free(0));
            let t: Vec<IntPoly> = (0..4)
                .map(|m| x.pow(p_pow(p, m).try_into().unwrap()))
                .collect();
            let mut expect = vec![x.clone()];
            expect.extend(std::iter::repeat(IntPoly::zero()).take(3));
            assert_eq!(dwork_lift(p, &t).unwrap(), expect);
        }
    }

    #[test]
    fn known_universal_polynomials() {
        let s = compute_universal_polys(2, 2, WittKind::Sum).unwrap();
        assert_eq!(s[1].poly, poly("x1 + y1 - x0*y0"));
        let m = compute_universal_polys(2, 2, WittKind::Prod).unwrap();
        assert_eq!(m[1].poly, poly("x0^2*y1 + x1*y0^2 + 2*x1*y1"));
        let n2 = compute_universal_polys(2, 2, WittKind::Neg).unwrap();
        assert_eq!(n2[1].poly, poly("-x1 - x0^2"));
        let n3 = compute_universal_polys(3, 3, WittKind::Neg).unwrap();
        for (i, u) in n3.iter().enumerate() {
            assert_eq!(u.poly, IntPoly::var(Var::x(i as u32)).neg());
        }
        let f = compute_universal_polys(2, 1, WittKind::Frob).unwrap();
        assert_eq!(f[0].poly, poly("x0^2 + 2*x1"));
    }

    #[test]
    fn reductions_mod_p() {
        let s = compute_universal_polys(2, 2, WittKind::Sum).unwrap();
        assert_eq!(reduce_mod_p(&s)[1].to_int(), poly("x1 + y1 + x0*y0"));
        let m = compute_universal_polys(2, 2, WittKind::Prod).unwrap();
        assert_eq!(reduce_mod_p(&m)[1].to_int(), poly("x0^2*y1 + x1*y0^2"));
        for p in [2, 3] {
            let f = compute_universal_polys(p, 3, WittKind::Frob).unwrap();
            for (i, r) in reduce_mod_p(&f).iter().enumerate() {
                assert_eq!(r.to_int(), IntPoly::var(Var::x(i as u32)).pow(p));
            }
        }
    }

    #[test]
    fn polar_degree_examples() {
        let s = compute_universal_polys(3, 2, WittKind::Sum).unwrap();
        assert!(s.iter().all(polar_degree_check));
        let bad = UnivWittPoly {
            p: 3,
            kind: WittKind::Sum,
            level: 0,
            poly: poly("x0*y0"),
        };
        assert!(!polar_degree_check(&bad));
        let any = UnivWittPoly { p: 2, ..bad };
        assert!(polar_degree_check(&any));
    }

    #[test]
    fn scalar_kind_checks_only_the_x_block() {
        let u = compute_universal_polys(3, 2, WittKind::Scalar).unwrap();
        assert!(u.iter().all(polar_degree_check));
        // a-degrees are unconstrained: a0^3 x1 appears in level 1
        assert!(!u[1]
            .poly
            .coeff(&Monomial::from_pairs([(Var::scalar(0), 3), (Var::x(1), 1)]))
            .is_zero());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in WittKind::ALL {
            assert_eq!(k.name().parse::<WittKind>().unwrap(), k);
        }
        assert!("mul".parse::<WittKind>().is_err());
    }
}
