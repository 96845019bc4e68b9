//! Sparse multivariate polynomials with exact coefficients.
//!
//! Monomials are sorted `(Var, exponent)` lists. Variables order by block
//! first (Witt blocks, then the scalar block, then free generators), so
//! per-block degree filtering only scans a prefix or suffix of a monomial.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};

/// Variable family. Derived ordering is the canonical block order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    /// The j-th Witt-coordinate block (x, y, z, u, v, ...).
    Witt(u8),
    /// Coordinates of a W(k) scalar.
    Scalar,
    /// Auxiliary generators.
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub block: Block,
    pub index: u32,
}

const WITT_LETTERS: [char; 5] = ['x', 'y', 'z', 'u', 'v'];

impl Var {
    pub fn witt(block: u8, index: u32) -> Self {
        Var {
            block: Block::Witt(block),
            index,
        }
    }

    pub fn x(index: u32) -> Self {
        Var::witt(0, index)
    }

    pub fn y(index: u32) -> Self {
        Var::witt(1, index)
    }

    pub fn scalar(index: u32) -> Self {
        Var {
            block: Block::Scalar,
            index,
        }
    }

    pub fn free(index: u32) -> Self {
        Var {
            block: Block::Free,
            index,
        }
    }

    pub fn name(&self) -> String {
        match self.block {
            Block::Witt(j) if (j as usize) < WITT_LETTERS.len() => {
                format!("{}{}", WITT_LETTERS[j as usize], self.index)
            }
            Block::Witt(j) => format!("b{}_{}", j, self.index),
            Block::Scalar => format!("a{}", self.index),
            Block::Free => format!("t{}", self.index),
        }
    }

    pub fn parse(name: &str) -> Result<Var> {
        let bad = || Error::Invalid(format!("unrecognised variable name {name:?}"));
        let mut chars = name.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        if head == 'b' {
            let (j, i) = rest.split_once('_').ok_or_else(bad)?;
            let j: u8 = j.parse().map_err(|_| bad())?;
            let i: u32 = i.parse().map_err(|_| bad())?;
            return Ok(Var::witt(j, i));
        }
        let index: u32 = rest.parse().map_err(|_| bad())?;
        match head {
            'a' => Ok(Var::scalar(index)),
            't' => Ok(Var::free(index)),
            c => WITT_LETTERS
                .iter()
                .position(|&l| l == c)
                .map(|j| Var::witt(j as u8, index))
                .ok_or_else(bad),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A monomial: sorted, zero-free list of `(variable, exponent)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut acc: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial(acc.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_where(&self, pred: impl Fn(Var) -> bool) -> u32 {
        self.0
            .iter()
            .filter(|&&(v, _)| pred(v))
            .map(|&(_, e)| e)
            .sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (n, (v, e)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Coefficient rings usable in [`MultiPoly`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Num + Signed {}
impl Coeff for BigInt {}
impl Coeff for BigRational {}

/// Multivariate polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

pub type IntPoly = MultiPoly<BigInt>;
pub type RatPoly = MultiPoly<BigRational>;

impl<C: Coeff> Default for MultiPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero() -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(C::one(), Monomial::var(v))
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Sorted set of variables that occur with nonzero exponent.
    pub fn vars(&self) -> Vec<Var> {
        let set: BTreeSet<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|&(v, _)| v))
            .collect();
        set.into_iter().collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * k.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: HashMap<Monomial, C> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca.clone() * cb.clone();
                match acc.get_mut(&m) {
                    Some(x) => *x = x.clone() + c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        MultiPoly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Drops every term whose total degree exceeds `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product truncated at total degree `max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: u32) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > max_degree {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() <= max_degree {
                    out.add_term(ma.mul(mb), ca.clone() * cb.clone());
                }
            }
        }
        out
    }

    /// Replaces every variable by its binding. Fails on the first variable of
    /// `self` that has no binding.
    pub fn substitute(&self, bindings: &HashMap<Var, MultiPoly<C>>) -> Result<Self> {
        self.substitute_with(|v| bindings.get(&v).cloned(), None)
    }

    /// Substitution with a truncation degree applied after every product.
    pub fn substitute_truncated(
        &self,
        bindings: &HashMap<Var, MultiPoly<C>>,
        max_degree: u32,
    ) -> Result<Self> {
        self.substitute_with(|v| bindings.get(&v).cloned(), Some(max_degree))
    }

    pub fn substitute_with(
        &self,
        lookup: impl Fn(Var) -> Option<MultiPoly<C>>,
        max_degree: Option<u32>,
    ) -> Result<Self> {
        let mul = |a: &Self, b: &Self| match max_degree {
            Some(d) => a.mul_truncated(b, d),
            None => a.mul(b),
        };
        // cache of bound powers, filled lazily
        let mut powers: HashMap<Var, Vec<Self>> = HashMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = Self::constant(c.clone());
            for &(v, e) in m.pairs() {
                if !powers.contains_key(&v) {
                    let b = lookup(v).ok_or_else(|| Error::UnboundVariable(v.name()))?;
                    powers.insert(v, vec![Self::one(), b]);
                }
                let list = powers.get_mut(&v).expect("inserted above");
                while list.len() <= e as usize {
                    let next = mul(list.last().expect("nonempty"), &list[1]);
                    list.push(next);
                }
                acc = mul(&acc, &list[e as usize]);
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Renames variables through `f` (which must be injective on the support).
    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::from_pairs(m.pairs().iter().map(|&(v, e)| (f(v), e))),
                c.clone(),
            )
        }))
    }

    /// Applies `v -> v^k` to every variable (a Frobenius lift when `k = p`).
    pub fn raise_vars(&self, k: u32) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        Monomial(m.pairs().iter().map(|&(v, e)| (v, e * k)).collect()),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }
}

impl MultiPoly<BigInt> {
    /// Exact division of every coefficient by `n`.
    pub fn exact_div_int(&self, n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Precondition("division by zero".into()));
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(n);
            if !r.is_zero() {
                return Err(Error::IntegralityViolation {
                    monomial: m.to_string(),
                    coefficient: c.to_string(),
                    divisor: n.to_string(),
                });
            }
            terms.insert(m.clone(), q);
        }
        Ok(MultiPoly { terms })
    }

    /// True iff every coefficient is divisible by `n`.
    pub fn divisible_by(&self, n: &BigInt) -> bool {
        self.terms.values().all(|c| (c % n).is_zero())
    }

    pub fn to_rational(&self) -> RatPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), BigRational::from_integer(c.clone())))
                .collect(),
        }
    }

    /// Coefficientwise reduction to 𝔽_p (residues in `0..p`).
    pub fn reduce_mod(&self, p: u32) -> ModPoly {
        let modulus = BigInt::from(p);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let r = c.mod_floor(&modulus);
                let r: u32 = r.try_into().expect("residue below p fits in u32");
                (r != 0).then(|| (m.clone(), r))
            })
            .collect();
        ModPoly { p, terms }
    }
}

impl MultiPoly<BigRational> {
    /// Returns the integer polynomial when every coefficient is integral.
    pub fn to_integer(&self) -> Option<IntPoly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if !c.is_integer() {
                return None;
            }
            terms.insert(m.clone(), c.to_integer());
        }
        Some(MultiPoly { terms })
    }
}

impl<C: Coeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial with coefficients in the prime field 𝔽_p, stored as residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    pub p: u32,
    terms: Vec<(Monomial, u32)>,
}

impl ModPoly {
    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_int(&self) -> IntPoly {
        IntPoly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), BigInt::from(*c))),
        )
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_int())
    }
}

/// Parses a compact polynomial string such as `"x0^2 + 3*x1 - y0*y1"`.
///
/// Intended for tests and CLI literals; accepts integer coefficients only.
pub fn parse_int_poly(src: &str) -> Result<IntPoly> {
    let bad = |s: &str| Error::Invalid(format!("cannot parse polynomial term {s:?}"));
    let cleaned = src.replace(' ', "");
    if cleaned == "0" {
        return Ok(IntPoly::zero());
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !current.is_empty() {
            pieces.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if ch == '-' && current.is_empty() {
            negative = !negative;
        } else if ch != '+' {
            current.push(ch);
        }
    }
    if !current.is_empty() {
        pieces.push((negative, current));
    }
    let mut out = IntPoly::zero();
    for (neg, piece) in pieces {
        let mut coeff = BigInt::one();
        let mut pairs = Vec::new();
        for factor in piece.split('*') {
            if factor.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                coeff *= BigInt::parse_bytes(factor.as_bytes(), 10).ok_or_else(|| bad(&piece))?;
            } else {
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|_| bad(&piece))?),
                    None => (factor, 1),
                };
                pairs.push((Var::parse(name)?, e));
            }
        }
        if neg {
            coeff = -coeff;
        }
        out.add_term(Monomial::from_pairs(pairs), coeff);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        parse_int_poly(s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = p("x0 + y0");
        let b = p("x0 - y0");
        assert_eq!(a.mul(&b), p("x0^2 - y0^2"));
    }

    #[test]
    fn adding_zero_is_identity() {
        let a = p("3*x0*y1 - 7*x1^4");
        assert_eq!(a.add(&IntPoly::zero()), a);
    }

    #[test]
    fn cube_matches_binomial_expansion() {
        // oracle: coefficient of x^k y^(3-k) is C(3,k)
        let cube = p("x0 + y0").pow(3);
        let binom = [1, 3, 3, 1];
        let mut expect = IntPoly::zero();
        for (k, b) in binom.iter().enumerate() {
            expect.add_term(
                Monomial::from_pairs([(Var::x(0), k as u32), (Var::y(0), 3 - k as u32)]),
                BigInt::from(*b),
            );
        }
        assert_eq!(cube, expect);
        assert_eq!(cube, p("x0^3 + 3*x0^2*y0 + 3*x0*y0^2 + y0^3"));
    }

    #[test]
    fn substitution_square_of_sum() {
        let f = p("x0^2");
        let mut b = HashMap::new();
        b.insert(Var::x(0), p("t0 + t1"));
        assert_eq!(f.substitute(&b).unwrap(), p("t0^2 + 2*t0*t1 + t1^2"));
    }

    #[test]
    fn identity_substitution() {
        let f = p("x0*y0 + 2*x1 - 5");
        let b: HashMap<_, _> = f.vars().into_iter().map(|v| (v, IntPoly::var(v))).collect();
        assert_eq!(f.substitute(&b).unwrap(), f);
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let f = p("x0 + y0");
        let mut b = HashMap::new();
        b.insert(Var::x(0), p("t0"));
        assert_eq!(
            f.substitute(&b),
            Err(Error::UnboundVariable("y0".to_string()))
        );
    }

    #[test]
    fn exact_division() {
        assert_eq!(
            p("2*x0^2 + 4*x1").exact_div_int(&BigInt::from(2)).unwrap(),
            p("x0^2 + 2*x1")
        );
        let carry = p("x0^2 + y0^2").sub(&p("x0 + y0").pow(2));
        assert_eq!(carry.exact_div_int(&BigInt::from(2)).unwrap(), p("-x0*y0"));
        assert!(matches!(
            p("x0 + 1").exact_div_int(&BigInt::from(2)),
            Err(Error::IntegralityViolation { .. })
        ));
    }

    #[test]
    fn display_and_parse_agree() {
        let f = p("-x0*y0 + x1 + y1 - 12*a0^3*x2");
        assert_eq!(p(&f.to_string()), f);
    }

    #[test]
    fn var_names_round_trip() {
        for v in [
            Var::x(3),
            Var::y(0),
            Var::witt(4, 2),
            Var::witt(7, 1),
            Var::scalar(5),
            Var::free(0),
        ] {
            assert_eq!(Var::parse(&v.name()).unwrap(), v);
        }
    }

    #[test]
    fn reduction_mod_p_uses_nonnegative_residues() {
        let r = p("-x0*y0 + x1 + y1").reduce_mod(2);
        assert_eq!(r.to_int(), p("x0*y0 + x1 + y1"));
        assert!(p("2*x1*y1").reduce_mod(2).is_zero());
    }
}
