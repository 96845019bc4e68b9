use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gfq::FqField;
use crate::ppolar::random::random_polarized;
use crate::ppolar::CommAlgebra;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `log(1 + x)` from `1/(1+x) = Σ (−x)^k`, integrated term by term.
fn log1p_oracle(d: usize) -> TruncSeries {
    let coeffs = (0..=d).map(|k| {
        if k == 0 {
            Rational::zero()
        } else {
            let geometric = if (k - 1) % 2 == 0 { 1 } else { -1 };
            q(geometric, k as i64)
        }
    });
    TruncSeries::from_coeffs(d, coeffs)
}

fn multiplicative_log(p: u32, d: usize) -> PTypicalLog {
    typicalize_log(&log1p_oracle(d), p).unwrap()
}

#[test]
fn additive_law() {
    let log = typicalize_log(&TruncSeries::x(12), 3).unwrap();
    assert!(log.coeffs()[1..].iter().all(Zero::is_zero));
    assert_eq!(exp_from_log(&log), TruncSeries::x(12));
    let law = group_law(&log, 12).unwrap();
    let expected: BTreeMap<_, _> = [((0, 1), q(1, 1)), ((1, 0), q(1, 1))].into_iter().collect();
    assert_eq!(law.terms(), &expected);
}

#[test]
fn typicalized_multiplicative_log() {
    let log = multiplicative_log(2, 8);
    assert_eq!(log.coeffs(), &[q(1, 1), q(-1, 2), q(-1, 4), q(-1, 8)]);
    assert_eq!(typicalize_log(&TruncSeries::log1p(8), 2).unwrap(), log);
}

#[test]
fn p_typical_logs_are_unchanged() {
    for p in [2u32, 3, 5] {
        let d = 30;
        let mut terms = Vec::new();
        let mut k = 1usize;
        while k <= d {
            terms.push((k, q(1, k as i64)));
            k *= p as usize;
        }
        let f = TruncSeries::from_sparse(d, &terms);
        assert_eq!(typicalize_log(&f, p).unwrap().to_series(), f);
    }
}

#[test]
fn typicalization_preconditions() {
    let bad = TruncSeries::from_coeffs(4, [q(0, 1), q(2, 1)]);
    assert!(matches!(
        typicalize_log(&bad, 2),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        typicalize_log(&TruncSeries::x(4), 4),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn exp_support_for_p3() {
    let log = PTypicalLog::new(3, 25, vec![q(1, 1), q(1, 3), q(1, 9)]).unwrap();
    let exp = exp_from_log(&log);
    assert!(exp.support().iter().all(|k| k % 2 == 1));
    assert!(support_check(&exp, 3).ok);
    let id = exp.compose(&log.to_series()).unwrap();
    assert_eq!(id, TruncSeries::x(25));
}

#[test]
fn support_check_examples() {
    let s = TruncSeries::from_sparse(6, &[(1, q(1, 1)), (5, q(1, 1))]);
    assert!(support_check(&s, 3).ok);
    let s = TruncSeries::from_sparse(6, &[(1, q(1, 1)), (2, q(1, 1))]);
    assert_eq!(
        support_check(&s, 3),
        SupportCheck {
            ok: false,
            offenders: vec![2]
        }
    );
}

fn arb_log() -> impl Strategy<Value = PTypicalLog> {
    (0usize..3, prop::collection::vec((-9i64..10, 1i64..10), 4)).prop_map(|(i, cs)| {
        let p = [2u32, 3, 5][i];
        let mut coeffs = vec![q(1, 1)];
        coeffs.extend(cs.into_iter().map(|(n, d)| q(n, d)));
        let n = p_powers(p, 25).len();
        coeffs.truncate(n);
        PTypicalLog::new(p, 25, coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn exp_has_polar_support(log in arb_log()) {
        let exp = exp_from_log(&log);
        prop_assert!(support_check(&exp, log.p()).ok);
        prop_assert_eq!(exp.compose(&log.to_series()).unwrap(), TruncSeries::x(25));
    }
}

#[test]
fn multiplicative_law_is_2_integral() {
    let law = group_law(&multiplicative_log(2, 15), 15).unwrap();
    assert_eq!(law.non_integral_term(), None);
    assert!(law.unit_law_holds() && law.is_symmetric());
}

fn exp_log_sum(log: &PTypicalLog, vars: &[Var], d: u32) -> RatPoly {
    let l = log.to_series();
    let mut sum = RatPoly::zero();
    for &v in vars {
        for k in l.support() {
            sum.add_term(Monomial::from_pairs([(v, k as u32)]), l.coeff(k));
        }
    }
    compose_series(&exp_from_log(log), &sum, d)
}

#[test]
fn associativity_against_trivariate_expansion() {
    let (x, y, z) = (Var::x(0), Var::y(0), Var::free(0));
    for (p, log) in [
        (2, multiplicative_log(2, 10)),
        (3, multiplicative_log(3, 10)),
        (
            3,
            PTypicalLog::new(3, 10, vec![q(1, 1), q(2, 7), q(-5, 3)]).unwrap(),
        ),
    ] {
        let law = group_law(&log, 10).unwrap();
        assert_eq!(law.p(), p);
        let f = law.to_poly();
        let oracle = exp_log_sum(&log, &[x, y, z], 10);
        let left = f
            .substitute_with(
                |v| {
                    if v == x {
                        Some(f.clone())
                    } else if v == y {
                        Some(RatPoly::var(z))
                    } else {
                        None
                    }
                },
                Some(10),
            )
            .unwrap();
        let inner = f.map_vars(|v| if v == x { y } else { z });
        let right = f
            .substitute_with(
                |v| {
                    if v == x {
                        Some(RatPoly::var(x))
                    } else if v == y {
                        Some(inner.clone())
                    } else {
                        None
                    }
                },
                Some(10),
            )
            .unwrap();
        assert_eq!(left, oracle);
        assert_eq!(right, oracle);
    }
}

fn truncated(p: u32, m: u32, low: u32, high: u32) -> (CommAlgebra, PPolarAlgebra) {
    let r = CommAlgebra::truncated(FqField::new(p, m).unwrap(), low, high).unwrap();
    let a = PPolarAlgebra::polarize(&r).unwrap();
    (r, a)
}

#[test]
fn zero_is_the_unit() {
    let (_, a) = truncated(3, 1, 1, 5);
    let g = mu_pinfty_group(&a, &multiplicative_log(3, 20)).unwrap();
    for x in g.elements().unwrap() {
        assert_eq!(g.star(&x, &a.zero()).unwrap(), x);
        assert_eq!(g.star(&a.zero(), &x).unwrap(), x);
    }
}

/// `(1 + φ(x)) = exp(log_T(x))` over ℚ, reduced mod 2.
fn reduce_mod_2(s: &TruncSeries) -> Vec<(usize, bool)> {
    s.support()
        .into_iter()
        .map(|k| {
            let c = s.coeff(k);
            assert!(c.denom() % 2 != BigInt::zero(), "coefficient {c} of x^{k}");
            (k, c.numer().abs() % 2 == BigInt::one())
        })
        .collect()
}

#[test]
fn star_group_matches_units_of_the_honest_algebra() {
    let (r, a) = truncated(2, 1, 1, 4);
    let log = multiplicative_log(2, 12);
    let g = mu_pinfty_group(&a, &log).unwrap();
    let elems = g.elements().unwrap();
    assert_eq!(elems.len(), 8);
    let phi = TruncSeries::expm1(12).compose(&log.to_series()).unwrap();
    let phi = reduce_mod_2(&phi);
    let f = r.field().clone();
    let eval = |x: &[FqElement]| {
        let mut out = vec![FqElement::ZERO; 3];
        for &(k, odd) in &phi {
            if odd {
                out = f.vadd(&out, &r.pow(x, k as u64));
            }
        }
        out
    };
    let images: Vec<Vec<FqElement>> = elems.iter().map(|x| eval(x)).collect();
    let mut sorted = images.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 8);
    for (x, fx) in elems.iter().zip(&images) {
        for (y, fy) in elems.iter().zip(&images) {
            // (1 + u)(1 + v) − 1 = u + v + uv
            let unit_product = f.vadd(&f.vadd(fx, fy), &r.mul(fx, fy));
            assert_eq!(eval(&g.star(x, y).unwrap()), unit_product);
        }
    }
    let mut orders: Vec<u64> = elems.iter().map(|x| g.order(x).unwrap()).collect();
    orders.sort();
    // ℤ/4 × ℤ/2
    assert_eq!(orders, vec![1, 2, 2, 2, 4, 4, 4, 4]);
}

fn is_abelian_group(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    let e = (0..n).find(|&i| (0..n).all(|j| t[i][j] == j));
    let Some(e) = e else { return false };
    (0..n).all(|i| (0..n).any(|j| t[i][j] == e))
        && (0..n).all(|i| (0..n).all(|j| t[i][j] == t[j][i]))
        && (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| t[t[i][j]][k] == t[i][t[j][k]])))
}

#[test]
fn star_groups_are_abelian_p_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (p, m) in [(2, 1), (3, 1), (2, 2)] {
        let f = FqField::new(p, m).unwrap();
        let log = multiplicative_log(p, 40);
        for _ in 0..4 {
            let a = random_polarized(&mut rng, &f, 3);
            let g = mu_pinfty_group(&a, &log).unwrap();
            let t = g.table().unwrap();
            assert_eq!(
                t.len() as u64,
                (f.order() as u64).pow(g.nilradical().dim() as u32)
            );
            assert!(is_abelian_group(&t));
            for x in g.elements().unwrap() {
                let n = g.order(&x).unwrap();
                assert_eq!(n, (p as u64).pow(n.ilog(p as u64)), "order {n}");
                let inv = g.inverse(&x).unwrap();
                assert!(g.star(&x, &inv).unwrap().iter().all(|c| c.is_zero()));
            }
        }
    }
}

#[test]
fn polarization_invariance_of_the_star_group() {
    for (p, m) in [(2, 2), (3, 1), (3, 2)] {
        let f = FqField::new(p, m).unwrap();
        let log = multiplicative_log(p, 20);
        let (_, honest) = truncated(p, m, 1, p);
        let trivial = PPolarAlgebra::trivial(f.clone(), p as usize - 1);
        let g1 = mu_pinfty_group(&honest, &log).unwrap();
        let g2 = mu_pinfty_group(&trivial, &log).unwrap();
        let (t1, t2) = (g1.table().unwrap(), g2.table().unwrap());
        assert_eq!(t1, t2);
        // elementary abelian: x ⋆ y = x + y
        for x in g1.elements().unwrap() {
            for y in g1.elements().unwrap() {
                assert_eq!(g1.star(&x, &y).unwrap(), f.vadd(&x, &y));
            }
        }
    }
}

fn mixed() -> PPolarAlgebra {
    let f = FqField::new(2, 1).unwrap();
    let r = CommAlgebra::product_of_fields(f.clone(), 1)
        .direct_product(&CommAlgebra::truncated(f, 1, 3).unwrap())
        .unwrap();
    PPolarAlgebra::polarize(&r).unwrap()
}

#[test]
fn star_errors() {
    let a = mixed();
    let g = mu_pinfty_group(&a, &multiplicative_log(2, 8)).unwrap();
    assert!(matches!(
        g.star(&a.basis(0), &a.zero()),
        Err(Error::NonNilpotentElement)
    ));
    let (_, b) = truncated(3, 1, 1, 4);
    let not_polar = BivariateLaw::from_terms(
        3,
        4,
        [((1, 0), q(1, 1)), ((0, 1), q(1, 1)), ((1, 1), q(1, 1))],
    )
    .unwrap();
    assert!(matches!(
        StarGroup::new(&b, &not_polar),
        Err(Error::LawNotPolar(1, 1))
    ));
    let (_, c) = truncated(2, 1, 1, 4);
    let not_integral = BivariateLaw::from_terms(
        2,
        4,
        [((1, 0), q(1, 1)), ((0, 1), q(1, 1)), ((1, 1), q(1, 2))],
    )
    .unwrap();
    assert!(matches!(
        StarGroup::new(&c, &not_integral),
        Err(Error::NotIntegral(..))
    ));
    let short = multiplicative_log(2, 2);
    assert!(matches!(
        mu_pinfty_group(&c, &short),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn report_serializes() {
    let r = report(3, 12, vec![q(1, 1), q(1, 3), q(1, 9)]).unwrap();
    assert!(r.exp_support.ok && r.law_admissible && r.p_integral);
    let text = serde_json::to_string(&r).unwrap();
    assert_eq!(serde_json::from_str::<FglReport>(&text).unwrap(), r);
}
