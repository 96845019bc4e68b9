//! Exact arithmetic substrate: integer and rational multivariate
//! polynomials, 𝔽_p-reduced polynomials and truncated power series.

mod json;
mod poly;
mod series;

pub use json::{poly_from_json, poly_to_json, PolyJson, TermJson};
pub use poly::{parse_int_poly, Block, Coeff, IntPoly, ModPoly, Monomial, MultiPoly, RatPoly, Var};
pub use series::TruncSeries;

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;

#[cfg(test)]
mod props {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = IntPoly> {
        let term = (
            -6i64..7,
            proptest::collection::vec((0u8..2, 0u32..3, 1u32..3), 0..3),
        );
        proptest::collection::vec(term, 0..5).prop_map(|terms| {
            IntPoly::from_terms(terms.into_iter().map(|(c, vars)| {
                (
                    Monomial::from_pairs(vars.into_iter().map(|(b, i, e)| (Var::witt(b, i), e))),
                    BigInt::from(c),
                )
            }))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn scaling_then_exact_division(a in arb_poly(), n in prop_oneof![-12i64..-1, 1i64..12]) {
            let n = BigInt::from(n);
            prop_assert_eq!(a.scale(&n).exact_div_int(&n).unwrap(), a);
        }

        #[test]
        fn json_round_trip(a in arb_poly()) {
            let back: IntPoly = poly_from_json(&poly_to_json(&a)).unwrap().to_integer().unwrap();
            prop_assert_eq!(back, a);
        }
    }

    #[test]
    fn zero_poly_is_zero() {
        assert!(IntPoly::zero().is_zero());
        assert!(BigInt::zero().is_zero());
    }
}
