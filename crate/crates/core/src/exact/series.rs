//! Univariate power series over ℚ truncated at an explicit degree.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Power series `Σ_{k ≤ D} c_k x^k`; terms of degree above `D` are dropped
/// after every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigRational>,
}

impl TruncSeries {
    pub fn zero(precision: usize) -> Self {
        TruncSeries {
            coeffs: vec![BigRational::zero(); precision + 1],
        }
    }

    /// The series `x`.
    pub fn x(precision: usize) -> Self {
        let mut s = Self::zero(precision);
        if precision >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    /// Builds a series from the given coefficients, truncating or padding to
    /// `precision`.
    pub fn from_coeffs(precision: usize, coeffs: impl IntoIterator<Item = BigRational>) -> Self {
        let mut s = Self::zero(precision);
        for (k, c) in coeffs.into_iter().enumerate().take(precision + 1) {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_sparse(precision: usize, terms: &[(usize, BigRational)]) -> Self {
        let mut s = Self::zero(precision);
        for (k, c) in terms {
            if *k <= precision {
                s.coeffs[*k] += c.clone();
            }
        }
        s
    }

    /// `log(1 + x) = Σ (-1)^{k+1} x^k / k`.
    pub fn log1p(precision: usize) -> Self {
        let mut s = Self::zero(precision);
        for k in 1..=precision {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            s.coeffs[k] = BigRational::new(BigInt::from(sign), BigInt::from(k));
        }
        s
    }

    /// `exp(x) - 1`.
    pub fn expm1(precision: usize) -> Self {
        let mut s = Self::zero(precision);
        let mut fact = BigInt::one();
        for k in 1..=precision {
            fact *= k;
            s.coeffs[k] = BigRational::new(BigInt::one(), fact.clone());
        }
        s
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Exponents carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&k| !self.coeffs[k].is_zero())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.precision().min(other.precision());
        TruncSeries {
            coeffs: (0..=d)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.precision().min(other.precision());
        TruncSeries {
            coeffs: (0..=d)
                .map(|k| &self.coeffs[k] - &other.coeffs[k])
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.precision().min(other.precision());
        let mut out = Self::zero(d);
        for i in 0..=d {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(d - i) {
                if !other.coeffs[j].is_zero() {
                    out.coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        out
    }

    /// `self(inner(x))`; requires `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Precondition(
                "inner series of a composition must vanish at 0".into(),
            ));
        }
        let d = self.precision().min(inner.precision());
        // Horner: c_D, then acc * inner + c_k
        let mut acc = Self::zero(d);
        for k in (0..=d).rev() {
            acc = acc.mul(inner);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `self(g(x)) ≡ x`, solved degree by
    /// degree.
    pub fn reverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() || self.coeff(1) != BigRational::one() {
            return Err(Error::Precondition(
                "series reversion needs f(0) = 0 and f'(0) = 1".into(),
            ));
        }
        let d = self.precision();
        let mut g = Self::x(d);
        for n in 2..=d {
            // with g's degree-n coefficient still 0, [x^n] f(g) is the error
            let err = self.compose(&g)?.coeff(n);
            g.coeffs[n] = -err;
        }
        Ok(g)
    }

    /// Every nonzero denominator is prime to `p`.
    pub fn is_p_integral(&self, p: u32) -> bool {
        let p = BigInt::from(p);
        self.coeffs.iter().all(|c| !(c.denom() % &p).is_zero())
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            match k {
                0 => write!(f, "{abs}")?,
                _ if abs.is_one() => write!(f, "x^{k}")?,
                _ => write!(f, "{abs}*x^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(x^{})", self.precision() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Independent oracle: Lagrange inversion, [x^n] g = (1/n) [t^{n-1}] (t/f(t))^n.
    fn lagrange_reverse(f: &TruncSeries) -> TruncSeries {
        let d = f.precision();
        // h = f(t)/t, truncated to degree d-1
        let h = TruncSeries::from_coeffs(d, (1..=d).map(|k| f.coeff(k)));
        // 1/h by long division
        let mut inv = TruncSeries::zero(d);
        inv.coeffs[0] = BigRational::one() / h.coeff(0);
        for n in 1..=d {
            let mut s = BigRational::zero();
            for k in 1..=n {
                s += h.coeff(k) * inv.coeff(n - k);
            }
            inv.coeffs[n] = -s / h.coeff(0);
        }
        let mut g = TruncSeries::zero(d);
        let mut power = TruncSeries::from_coeffs(d, [BigRational::one()]);
        for n in 1..=d {
            power = power.mul(&inv);
            g.coeffs[n] = power.coeff(n - 1) / BigRational::from_integer(n.into());
        }
        g
    }

    #[test]
    fn reverse_of_identity() {
        let x = TruncSeries::x(12);
        assert_eq!(x.reverse().unwrap(), x);
    }

    #[test]
    fn reverse_of_x_plus_x_squared_has_catalan_signs() {
        let f = TruncSeries::from_coeffs(6, [r(0, 1), r(1, 1), r(1, 1)]);
        let g = f.reverse().unwrap();
        // (-1)^{n-1} C_{n-1}
        let expect = [0, 1, -1, 2, -5, 14, -42];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(g.coeff(k), r(*e, 1), "degree {k}");
        }
        assert_eq!(g, lagrange_reverse(&f));
    }

    #[test]
    fn log_and_exp_are_inverse() {
        let d = 14;
        let g = TruncSeries::log1p(d).reverse().unwrap();
        assert_eq!(g, TruncSeries::expm1(d));
        assert_eq!(
            TruncSeries::log1p(d).compose(&g).unwrap(),
            TruncSeries::x(d)
        );
    }

    #[test]
    fn reverse_rejects_bad_linear_term() {
        let f = TruncSeries::from_coeffs(4, [r(0, 1), r(2, 1)]);
        assert!(matches!(f.reverse(), Err(Error::Precondition(_))));
    }

    #[test]
    fn p_integrality_scan() {
        let f = TruncSeries::from_coeffs(4, [r(0, 1), r(1, 1), r(1, 3)]);
        assert!(f.is_p_integral(2));
        assert!(!f.is_p_integral(3));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]
            #[test]
            fn double_reverse_is_identity(tail in proptest::collection::vec((-9i64..9, 1i64..5), 0..7)) {
                let d = 8;
                let mut c = vec![r(0, 1), r(1, 1)];
                c.extend(tail.iter().map(|&(n, m)| r(n, m)));
                let f = TruncSeries::from_coeffs(d, c);
                let g = f.reverse().unwrap();
                prop_assert_eq!(&g, &lagrange_reverse(&f));
                prop_assert_eq!(g.reverse().unwrap(), f);
            }
        }
    }
}
