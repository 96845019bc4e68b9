//! One-dimensional p-typical formal group laws over ℚ at fixed truncation,
//! and the group they induce on the nilpotent elements of a p-polar algebra.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Monomial, RatPoly, Rational, TruncSeries, Var};
use crate::gfq::{is_prime, FqElement, FqField};
use crate::ppolar::{multisets, nilradical, PPolarAlgebra, PolarIdeal, Subspace};

/// `log(x) = Σ l_i x^{p^i}` with `l_0 = 1`, for `p^i ≤ precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PTypicalLog {
    p: u32,
    precision: usize,
    coeffs: Vec<Rational>,
}

fn p_powers(p: u32, precision: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 1usize;
    while k <= precision {
        out.push(k);
        k = match k.checked_mul(p as usize) {
            Some(n) => n,
            None => break,
        };
    }
    out
}

fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    Ok(())
}

impl PTypicalLog {
    /// Missing trailing coefficients are zero.
    pub fn new(p: u32, precision: usize, coeffs: Vec<Rational>) -> Result<Self> {
        check_prime(p)?;
        if precision == 0 {
            return Err(Error::Precondition("precision must be positive".into()));
        }
        let n = p_powers(p, precision).len();
        if coeffs.len() > n {
            return Err(Error::Precondition(format!(
                "{} coefficients given, only {n} p-power exponents up to {precision}",
                coeffs.len()
            )));
        }
        if coeffs.first().is_some_and(|c| !c.is_one()) {
            return Err(Error::Precondition("l_0 must be 1".into()));
        }
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(Rational::one());
        }
        coeffs.resize(n, Rational::zero());
        Ok(PTypicalLog {
            p,
            precision,
            coeffs,
        })
    }

    pub fn additive(p: u32, precision: usize) -> Result<Self> {
        Self::new(p, precision, Vec::new())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// `l_0, l_1, …`
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn to_series(&self) -> TruncSeries {
        let terms: Vec<(usize, Rational)> = p_powers(self.p, self.precision)
            .into_iter()
            .zip(self.coeffs.iter().cloned())
            .collect();
        TruncSeries::from_sparse(self.precision, &terms)
    }
}

/// Keeps the `x^{p^i}` coefficients of `f`.
pub fn typicalize_log(f: &TruncSeries, p: u32) -> Result<PTypicalLog> {
    check_prime(p)?;
    if !f.coeff(0).is_zero() || !f.coeff(1).is_one() {
        return Err(Error::Precondition(
            "log needs f(0) = 0 and f'(0) = 1".into(),
        ));
    }
    let coeffs = p_powers(p, f.precision())
        .into_iter()
        .map(|k| f.coeff(k))
        .collect();
    PTypicalLog::new(p, f.precision(), coeffs)
}

pub fn exp_from_log(log: &PTypicalLog) -> TruncSeries {
    log.to_series()
        .reverse()
        .expect("a log has f(0) = 0, f'(0) = 1")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub ok: bool,
    pub offenders: Vec<usize>,
}

/// Every nonzero exponent is `≡ 1 (mod p − 1)`.
pub fn support_check(s: &TruncSeries, p: u32) -> SupportCheck {
    let offenders: Vec<usize> = s
        .support()
        .into_iter()
        .filter(|&k| k == 0 || (k - 1) % (p as usize - 1) != 0)
        .collect();
    SupportCheck {
        ok: offenders.is_empty(),
        offenders,
    }
}

/// `F(x, y) = Σ F_ab x^a y^b` for `a + b ≤ precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateLaw {
    p: u32,
    precision: usize,
    terms: BTreeMap<(usize, usize), Rational>,
}

fn xy(a: usize, b: usize) -> Monomial {
    Monomial::from_pairs([(Var::x(0), a as u32), (Var::y(0), b as u32)])
}

/// `Σ c_k s^k` truncated at total degree `d`.
pub fn compose_series(outer: &TruncSeries, s: &RatPoly, d: u32) -> RatPoly {
    let mut acc = RatPoly::zero();
    for k in (1..=outer.precision()).rev() {
        acc = acc
            .mul_truncated(s, d)
            .add(&RatPoly::constant(outer.coeff(k)));
    }
    acc.mul_truncated(s, d)
        .add(&RatPoly::constant(outer.coeff(0)))
}

/// `exp(log x + log y)` truncated at `precision`.
pub fn group_law(log: &PTypicalLog, precision: usize) -> Result<BivariateLaw> {
    if precision > log.precision {
        return Err(Error::Precondition(format!(
            "law precision {precision} exceeds the log precision {}",
            log.precision
        )));
    }
    let log = PTypicalLog::new(log.p, precision, {
        let n = p_powers(log.p, precision).len();
        log.coeffs.iter().take(n).cloned().collect()
    })?;
    let exp = exp_from_log(&log);
    let l = log.to_series();
    let d = precision as u32;
    let mut sum = RatPoly::zero();
    for k in l.support() {
        let c = l.coeff(k);
        sum.add_term(xy(k, 0), c.clone());
        sum.add_term(xy(0, k), c);
    }
    let f = compose_series(&exp, &sum, d);
    let terms = f
        .terms()
        .map(|(m, c)| {
            (
                (
                    m.exponent(Var::x(0)) as usize,
                    m.exponent(Var::y(0)) as usize,
                ),
                c.clone(),
            )
        })
        .collect();
    let law = BivariateLaw {
        p: log.p,
        precision,
        terms,
    };
    if !law.unit_law_holds() || !law.is_symmetric() {
        return Err(Error::Internal(
            "group law fails the unit or symmetry law".into(),
        ));
    }
    if let Some((a, b)) = law.inadmissible_term() {
        return Err(Error::Internal(format!(
            "p-typical law has monomial x^{a} y^{b}"
        )));
    }
    Ok(law)
}

impl BivariateLaw {
    /// A law given by its coefficients; zero coefficients are dropped and
    /// nothing beyond the shape is checked.
    pub fn from_terms(
        p: u32,
        precision: usize,
        terms: impl IntoIterator<Item = ((usize, usize), Rational)>,
    ) -> Result<Self> {
        check_prime(p)?;
        let mut map = BTreeMap::new();
        for ((a, b), c) in terms {
            if a + b > precision {
                return Err(Error::Precondition(format!(
                    "x^{a} y^{b} exceeds precision {precision}"
                )));
            }
            if !c.is_zero() {
                map.insert((a, b), c);
            }
        }
        Ok(BivariateLaw {
            p,
            precision,
            terms: map,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Nonzero terms keyed by `(a, b)`.
    pub fn terms(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.terms
    }

    pub fn coeff(&self, a: usize, b: usize) -> Rational {
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_poly(&self) -> RatPoly {
        RatPoly::from_terms(self.terms.iter().map(|(&(a, b), c)| (xy(a, b), c.clone())))
    }

    /// `F(x, 0) = x` and `F(0, y) = y`.
    pub fn unit_law_holds(&self) -> bool {
        self.terms.iter().all(|(&(a, b), c)| match (a, b) {
            (1, 0) | (0, 1) => c.is_one(),
            (0, _) | (_, 0) => false,
            _ => true,
        }) && self.coeff(1, 0).is_one()
            && self.coeff(0, 1).is_one()
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(&(a, b), c)| self.coeff(b, a) == *c)
    }

    /// First monomial with `a + b ≢ 1 (mod p − 1)`.
    pub fn inadmissible_term(&self) -> Option<(usize, usize)> {
        let m = self.p as usize - 1;
        self.terms
            .keys()
            .copied()
            .find(|&(a, b)| a + b == 0 || (a + b - 1) % m != 0)
    }

    /// First coefficient whose denominator is divisible by `p`.
    pub fn non_integral_term(&self) -> Option<(usize, usize, BigInt)> {
        let p = BigInt::from(self.p);
        self.terms
            .iter()
            .find(|(_, c)| c.denom().is_multiple_of(&p))
            .map(|(&(a, b), c)| (a, b, c.denom().clone()))
    }

    pub fn to_json(&self) -> LawJson {
        LawJson {
            p: self.p,
            precision: self.precision,
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| (a, b, c.to_string()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawJson {
    pub p: u32,
    pub precision: usize,
    /// `(a, b, coefficient)` with the coefficient written as `n` or `n/d`
    pub terms: Vec<(usize, usize, String)>,
}

/// `c mod p` as an element of the prime field; `c` must be p-integral.
fn reduce(f: &FqField, c: &Rational) -> Result<FqElement> {
    let p = BigInt::from(f.p());
    let residue = |n: &BigInt| n.mod_floor(&p).to_i64().expect("below p");
    let den = f.from_int(residue(c.denom()));
    if den.is_zero() {
        return Err(Error::NotIntegral(c.denom().to_string(), 0, 0));
    }
    f.div(f.from_int(residue(c.numer())), den)
}

/// Smallest admissible `N` with every `N`-fold product of elements of the
/// ideal equal to zero.
pub fn nilpotency_length(a: &PPolarAlgebra, ideal: &PolarIdeal) -> Result<usize> {
    let p = a.p() as usize;
    let f = a.field();
    let gens = ideal.basis();
    let mut layer: Vec<Vec<FqElement>> = gens.to_vec();
    let mut len = 1;
    for _ in 0..=2 * a.dim() + 1 {
        if layer.is_empty() {
            return Ok(len);
        }
        let mut next = Vec::new();
        for u in &layer {
            for m in multisets(gens.len(), p - 1) {
                let mut args: Vec<&[FqElement]> = vec![u];
                args.extend(m.iter().map(|&i| gens[i].as_slice()));
                next.push(a.mu(&args)?);
            }
        }
        layer = Subspace::span(f, a.dim(), &next).basis().to_vec();
        len += p - 1;
    }
    Err(Error::Internal("ideal is not nilpotent".into()))
}

/// `x ⋆ y = F(x, y)` on `nil(A)`, every monomial evaluated as a polar product.
#[derive(Clone, Debug)]
pub struct StarGroup {
    algebra: PPolarAlgebra,
    nil: PolarIdeal,
    length: usize,
    terms: Vec<((usize, usize), FqElement)>,
}

fn reduce_series(f: &FqField, s: &TruncSeries, below: usize) -> Result<Vec<(usize, FqElement)>> {
    s.support()
        .into_iter()
        .filter(|&k| k < below)
        .map(|k| Ok((k, reduce(f, &s.coeff(k))?)))
        .filter(|r| !matches!(r, Ok((_, c)) if c.is_zero()))
        .collect()
}

/// The star group of `A` for the law of `log`, truncated at the nilpotency
/// length of `nil(A)`.
pub fn mu_pinfty_group(a: &PPolarAlgebra, log: &PTypicalLog) -> Result<StarGroup> {
    let nil = nilradical(a);
    let length = nilpotency_length(a, &nil)?;
    let law = group_law(log, length.saturating_sub(1).max(1))?;
    StarGroup::new(a, &law)
}

impl StarGroup {
    /// `law` must reach the nilpotency length of `nil(A)`.
    pub fn new(a: &PPolarAlgebra, law: &BivariateLaw) -> Result<Self> {
        if law.p != a.p() {
            return Err(Error::Precondition(format!(
                "law is for p = {}, algebra has p = {}",
                law.p,
                a.p()
            )));
        }
        if let Some((x, y)) = law.inadmissible_term() {
            return Err(Error::LawNotPolar(x, y));
        }
        if let Some((x, y, d)) = law.non_integral_term() {
            return Err(Error::NotIntegral(d.to_string(), x, y));
        }
        let nil = nilradical(a);
        let length = nilpotency_length(a, &nil)?;
        if law.precision + 1 < length {
            return Err(Error::Precondition(format!(
                "law precision {} is below the nilpotency length {length} minus one",
                law.precision
            )));
        }
        let f = a.field();
        let mut terms = Vec::new();
        for (&(x, y), c) in &law.terms {
            if x + y < length {
                let c = reduce(f, c)?;
                if !c.is_zero() {
                    terms.push(((x, y), c));
                }
            }
        }
        Ok(StarGroup {
            algebra: a.clone(),
            nil,
            length,
            terms,
        })
    }

    pub fn algebra(&self) -> &PPolarAlgebra {
        &self.algebra
    }

    pub fn nilradical(&self) -> &PolarIdeal {
        &self.nil
    }

    /// Products of this many nilpotents vanish.
    pub fn nilpotency_length(&self) -> usize {
        self.length
    }

    fn check(&self, x: &[FqElement]) -> Result<()> {
        if x.len() != self.algebra.dim() {
            return Err(Error::LengthMismatch(x.len(), self.algebra.dim()));
        }
        if !self.nil.contains(&self.algebra, x) {
            return Err(Error::NonNilpotentElement);
        }
        Ok(())
    }

    fn monomial(&self, x: &[FqElement], a: usize, y: &[FqElement], b: usize) -> Vec<FqElement> {
        let mut args: Vec<&[FqElement]> = vec![x; a];
        args.extend(std::iter::repeat(y).take(b));
        self.algebra.mu_eval(&args).expect("admissible length")
    }

    pub fn star(&self, x: &[FqElement], y: &[FqElement]) -> Result<Vec<FqElement>> {
        self.check(x)?;
        self.check(y)?;
        let f = self.algebra.field();
        let mut out = self.algebra.zero();
        for &((a, b), c) in &self.terms {
            f.vaxpy(&mut out, c, &self.monomial(x, a, y, b));
        }
        Ok(out)
    }

    /// Evaluates `Σ c_k x^k` (support `≡ 1 mod p − 1`) on a nilpotent `x`.
    pub fn eval(&self, s: &TruncSeries, x: &[FqElement]) -> Result<Vec<FqElement>> {
        self.check(x)?;
        let check = support_check(s, self.algebra.p());
        if !check.ok {
            return Err(Error::LawNotPolar(check.offenders[0], 0));
        }
        let f = self.algebra.field();
        let mut out = self.algebra.zero();
        for (k, c) in reduce_series(f, s, self.length)? {
            f.vaxpy(&mut out, c, &self.monomial(x, k, x, 0));
        }
        Ok(out)
    }

    /// Number of steps `x, x⋆x, …` until zero.
    pub fn order(&self, x: &[FqElement]) -> Result<u64> {
        self.check(x)?;
        let mut acc = x.to_vec();
        let mut n = 1u64;
        while acc.iter().any(|c| !c.is_zero()) {
            acc = self.star(&acc, x)?;
            n += 1;
            if n > MAX_ORDER {
                return Err(Error::Internal(
                    "element order exceeds the search bound".into(),
                ));
            }
        }
        Ok(n)
    }

    /// `x^{⋆(n−1)}` for `n` the order of `x`.
    pub fn inverse(&self, x: &[FqElement]) -> Result<Vec<FqElement>> {
        let n = self.order(x)?;
        let mut acc = self.algebra.zero();
        for _ in 1..n {
            acc = self.star(&acc, x)?;
        }
        Ok(acc)
    }

    /// Every element of `nil(A)`, in lexicographic order of coordinates on
    /// its echelon basis.
    pub fn elements(&self) -> Result<Vec<Vec<FqElement>>> {
        let f = self.algebra.field();
        let k = self.nil.dim() as u32;
        let total = (f.order() as u64)
            .checked_pow(k)
            .filter(|&n| n <= MAX_ELEMENTS);
        let total = total
            .ok_or_else(|| Error::Precondition("nilradical is too large to enumerate".into()))?;
        let q = f.order() as u64;
        Ok((0..total)
            .map(|code| {
                let mut v = self.algebra.zero();
                for (i, b) in self.nil.basis().iter().enumerate() {
                    let digit = (code / q.pow(k - 1 - i as u32)) % q;
                    f.vaxpy(&mut v, FqElement(digit as u32), b);
                }
                v
            })
            .collect())
    }

    /// Cayley table on [`StarGroup::elements`].
    pub fn table(&self) -> Result<Vec<Vec<usize>>> {
        let elems = self.elements()?;
        let index: HashMap<&[FqElement], usize> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_slice(), i))
            .collect();
        elems
            .iter()
            .map(|x| {
                elems
                    .iter()
                    .map(|y| {
                        let z = self.star(x, y)?;
                        index.get(z.as_slice()).copied().ok_or_else(|| {
                            Error::Internal("star product left the nilradical".into())
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

const MAX_ORDER: u64 = 1 << 24;
const MAX_ELEMENTS: u64 = 1 << 12;

/// Report for a log given by its p-power coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglReport {
    pub p: u32,
    pub precision: usize,
    pub log: Vec<String>,
    /// `(k, coefficient)` for the nonzero terms of exp
    pub exp: Vec<(usize, String)>,
    pub exp_support: SupportCheck,
    pub law: LawJson,
    pub law_admissible: bool,
    pub p_integral: bool,
    /// `(a, b, denominator)` of the first non-integral coefficient
    pub denominator_obstruction: Option<(usize, usize, String)>,
}

pub fn report(p: u32, precision: usize, coeffs: Vec<Rational>) -> Result<FglReport> {
    let log = PTypicalLog::new(p, precision, coeffs)?;
    let exp = exp_from_log(&log);
    let law = group_law(&log, precision)?;
    let obstruction = law.non_integral_term();
    Ok(FglReport {
        p,
        precision,
        log: log.coeffs.iter().map(|c| c.to_string()).collect(),
        exp: exp
            .support()
            .into_iter()
            .map(|k| (k, exp.coeff(k).to_string()))
            .collect(),
        exp_support: support_check(&exp, p),
        law: law.to_json(),
        law_admissible: law.inadmissible_term().is_none(),
        p_integral: obstruction.is_none(),
        denominator_obstruction: obstruction.map(|(a, b, d)| (a, b, d.to_string())),
    })
}

#[cfg(test)]
mod tests;
