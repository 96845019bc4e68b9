//! Truncated Witt vectors `W_n(A)` of a finite-dimensional p-polar algebra,
//! computed by evaluating the reduced universal polynomials, and the
//! colimit `CW^u(A)` along Verschiebung.

mod carry;
mod cwu;
mod eval;
mod vector;

pub use carry::{carry_coefficients, witt_sum, MAX_CARRY_DEGREE};
pub use cwu::CwuClass;
pub use eval::{evaluators, PolarEvaluator};
pub use vector::{base_algebra, WittVector, WittVectorJson};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::gfq::{FqElement, FqField};
    use crate::ppolar::random::{random_polarized, random_vector};
    use crate::ppolar::{ideal_generated, quotient, CommAlgebra, PPolarAlgebra};

    fn field(p: u32, m: u32) -> Arc<FqField> {
        FqField::new(p, m).unwrap()
    }

    fn truncated(f: &Arc<FqField>, low: u32, high: u32) -> Arc<PPolarAlgebra> {
        Arc::new(
            PPolarAlgebra::polarize(&CommAlgebra::truncated(f.clone(), low, high).unwrap())
                .unwrap(),
        )
    }

    fn random_witt(rng: &mut ChaCha8Rng, a: &Arc<PPolarAlgebra>, n: usize) -> WittVector {
        let coords = (0..n)
            .map(|_| random_vector(rng, a.field(), a.dim()))
            .collect();
        WittVector::new(a.clone(), coords).unwrap()
    }

    fn test_algebras(rng: &mut ChaCha8Rng) -> Vec<Arc<PPolarAlgebra>> {
        let mut out = Vec::new();
        for (p, m) in [(2, 1), (2, 2), (3, 1)] {
            let f = field(p, m);
            out.push(truncated(&f, 1, 4));
            for _ in 0..2 {
                out.push(Arc::new(random_polarized(rng, &f, 3)));
            }
        }
        out
    }

    #[test]
    fn doubling_x_in_truncated_algebra() {
        let f = field(2, 1);
        let a = truncated(&f, 1, 4);
        let x = WittVector::new(a.clone(), vec![a.basis(0), a.zero()]).unwrap();
        let s = x.add(&x).unwrap();
        assert_eq!(s.coords(), &[a.zero(), a.basis(1)]);
    }

    #[test]
    fn group_laws_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for a in test_algebras(&mut rng) {
            for n in 1..=3 {
                let (x, y, z) = (
                    random_witt(&mut rng, &a, n),
                    random_witt(&mut rng, &a, n),
                    random_witt(&mut rng, &a, n),
                );
                let zero = WittVector::zero(a.clone(), n);
                assert_eq!(x.add(&zero).unwrap(), x);
                assert!(x.add(&x.neg()).unwrap().is_zero());
                assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
                assert_eq!(
                    x.add(&y).unwrap().add(&z).unwrap(),
                    x.add(&y.add(&z).unwrap()).unwrap()
                );
            }
        }
    }

    #[test]
    fn carry_sums_match_universal_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for a in test_algebras(&mut rng) {
            let max_n = if a.p() == 2 { 4 } else { 3 };
            for n in 1..=max_n {
                for _ in 0..3 {
                    let (x, y) = (random_witt(&mut rng, &a, n), random_witt(&mut rng, &a, n));
                    let by_carries = x.add_by_carries(&y).unwrap();
                    assert_eq!(by_carries, x.add(&y).unwrap());
                }
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let f = field(2, 1);
        let a = truncated(&f, 1, 3);
        let x = WittVector::zero(a.clone(), 2);
        let y = WittVector::zero(a, 3);
        assert!(x.add(&y).is_err());
        assert!(WittVector::product(&[&x]).is_err());
    }

    #[test]
    fn products_are_polar() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for a in test_algebras(&mut rng) {
            let p = a.p() as usize;
            for n in 1..=3 {
                let xs: Vec<WittVector> = (0..2 * p - 1)
                    .map(|_| random_witt(&mut rng, &a, n))
                    .collect();
                let nested = |order: &[usize]| {
                    let inner: Vec<&WittVector> = order[..p].iter().map(|&i| &xs[i]).collect();
                    let m = WittVector::product(&inner).unwrap();
                    let mut outer = vec![&m];
                    outer.extend(order[p..].iter().map(|&i| &xs[i]));
                    WittVector::product(&outer).unwrap()
                };
                let mut order: Vec<usize> = (0..2 * p - 1).collect();
                let base = nested(&order);
                for _ in 0..4 {
                    order.shuffle(&mut rng);
                    assert_eq!(nested(&order), base);
                }
                // multilinear in the first slot
                let mut args: Vec<&WittVector> = xs[..p].iter().collect();
                let zero = WittVector::zero(a.clone(), n);
                args[0] = &zero;
                assert!(WittVector::product(&args).unwrap().is_zero());
                let sum = xs[0].add(&xs[p]).unwrap();
                args[0] = &sum;
                let lhs = WittVector::product(&args).unwrap();
                args[0] = &xs[0];
                let r1 = WittVector::product(&args).unwrap();
                args[0] = &xs[p];
                let r2 = WittVector::product(&args).unwrap();
                assert_eq!(lhs, r1.add(&r2).unwrap());
            }
        }
    }

    #[test]
    fn teichmuller_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for a in test_algebras(&mut rng) {
            let p = a.p() as usize;
            for n in 1..=3 {
                let els: Vec<Vec<FqElement>> = (0..p)
                    .map(|_| random_vector(&mut rng, a.field(), a.dim()))
                    .collect();
                let ts: Vec<WittVector> = els
                    .iter()
                    .map(|e| WittVector::teichmuller(a.clone(), e, n).unwrap())
                    .collect();
                let refs: Vec<&WittVector> = ts.iter().collect();
                let refs_el: Vec<&[FqElement]> = els.iter().map(Vec::as_slice).collect();
                let expected =
                    WittVector::teichmuller(a.clone(), &a.mu(&refs_el).unwrap(), n).unwrap();
                assert_eq!(WittVector::product(&refs).unwrap(), expected);
            }
        }
    }

    #[test]
    fn alternating_teichmuller_sum_in_algebras() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for a in test_algebras(&mut rng) {
            let f = a.field().clone();
            let p = a.p() as usize;
            let xs: Vec<Vec<FqElement>> = (0..p)
                .map(|_| random_vector(&mut rng, &f, a.dim()))
                .collect();
            let mut acc = WittVector::zero(a.clone(), 2);
            for mask in 0u32..(1 << p) {
                let s = (0..p)
                    .filter(|i| mask >> i & 1 == 1)
                    .fold(a.zero(), |s, i| f.vadd(&s, &xs[i]));
                let mut t = WittVector::teichmuller(a.clone(), &s, 2).unwrap();
                if mask.count_ones() % 2 == 1 {
                    t = t.neg();
                }
                acc = acc.add(&t).unwrap();
            }
            let refs: Vec<&[FqElement]> = xs.iter().map(Vec::as_slice).collect();
            assert_eq!(acc.coords(), &[a.zero(), a.mu(&refs).unwrap()]);
        }
    }

    #[test]
    fn frobenius_and_verschiebung() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for a in test_algebras(&mut rng) {
            let p = a.p() as i64;
            let el = random_vector(&mut rng, a.field(), a.dim());
            let t = WittVector::teichmuller(a.clone(), &el, 3).unwrap();
            let tp = WittVector::teichmuller(a.clone(), &a.pth_power(&el), 2).unwrap();
            assert_eq!(t.frobenius().unwrap(), tp);
            let vt = WittVector::teichmuller(a.clone(), &el, 2)
                .unwrap()
                .verschiebung();
            assert_eq!(vt.coords(), &[a.zero(), el.clone(), a.zero()]);
            for n in 1..=3 {
                let x = random_witt(&mut rng, &a, n);
                assert_eq!(
                    x.verschiebung().frobenius().unwrap(),
                    x.multiple(p).unwrap()
                );
                assert_eq!(
                    x.frobenius_endo().verschiebung_endo(),
                    x.multiple(p).unwrap()
                );
                assert_eq!(
                    x.verschiebung_endo().frobenius_endo(),
                    x.multiple(p).unwrap()
                );
                let y = random_witt(&mut rng, &a, n + 1);
                assert_eq!(y.frobenius().unwrap(), y.frobenius_universal().unwrap());
            }
            assert!(WittVector::zero(a.clone(), 2).verschiebung().is_zero());
        }
    }

    #[test]
    fn scalar_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (p, m) in [(2, 2), (3, 1), (2, 1)] {
            let f = field(p, m);
            for a in [
                truncated(&f, 1, 4),
                Arc::new(random_polarized(&mut rng, &f, 3)),
            ] {
                for n in 1..=3 {
                    let x = random_witt(&mut rng, &a, n);
                    let one = WittVector::integer(&f, 1, n).unwrap();
                    assert_eq!(x.scalar_mul(&one).unwrap(), x);
                    let pp = WittVector::integer(&f, p as i64, n).unwrap();
                    assert_eq!(
                        x.scalar_mul(&pp).unwrap(),
                        x.verschiebung().frobenius().unwrap()
                    );

                    let s = WittVector::scalar(&f, &random_vector(&mut rng, &f, n + 1)).unwrap();
                    let r = WittVector::scalar(&f, &random_vector(&mut rng, &f, n)).unwrap();
                    let y = random_witt(&mut rng, &a, n);
                    let s_n = s.truncate(n).unwrap();
                    // module axioms
                    assert_eq!(
                        x.add(&y).unwrap().scalar_mul(&s_n).unwrap(),
                        x.scalar_mul(&s_n)
                            .unwrap()
                            .add(&y.scalar_mul(&s_n).unwrap())
                            .unwrap()
                    );
                    assert_eq!(
                        x.scalar_mul(&s_n.add(&r).unwrap()).unwrap(),
                        x.scalar_mul(&s_n)
                            .unwrap()
                            .add(&x.scalar_mul(&r).unwrap())
                            .unwrap()
                    );
                    // F(a·x) = ϕ(a)·F(x) and V(a·x) = ϕ^{-1}(a)·V(x)
                    let x1 = random_witt(&mut rng, &a, n + 1);
                    assert_eq!(
                        x1.scalar_mul(&s).unwrap().frobenius().unwrap(),
                        x1.frobenius()
                            .unwrap()
                            .scalar_mul(&s.scalar_frobenius(1))
                            .unwrap()
                    );
                    assert_eq!(
                        x.scalar_mul(&s).unwrap().verschiebung(),
                        x.verschiebung()
                            .scalar_mul(&s.scalar_frobenius(-1))
                            .unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn scalars_multiply_like_witt_vectors_of_the_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = field(2, 2);
        let base = base_algebra(&f);
        for n in 1..=3 {
            let a = WittVector::scalar(&f, &random_vector(&mut rng, &f, n)).unwrap();
            let b = WittVector::scalar(&f, &random_vector(&mut rng, &f, n)).unwrap();
            assert_eq!(b.algebra(), &base);
            assert_eq!(
                b.scalar_mul(&a).unwrap(),
                WittVector::product(&[&a, &b]).unwrap()
            );
        }
    }

    #[test]
    fn naturality_along_quotients() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (p, m) in [(2, 1), (2, 2), (3, 1)] {
            let f = field(p, m);
            let a = truncated(&f, 1, 5);
            let ideal = ideal_generated(&a, &[a.basis(1)]);
            let q = quotient(&a, &ideal).unwrap();
            let b = Arc::new(q.algebra.clone());
            let g = &q.projection;
            for n in 1..=3 {
                let xs: Vec<WittVector> = (0..p as usize)
                    .map(|_| random_witt(&mut rng, &a, n))
                    .collect();
                let gx: Vec<WittVector> = xs.iter().map(|x| x.map(&b, g).unwrap()).collect();
                assert_eq!(
                    xs[0].add(&xs[1]).unwrap().map(&b, g).unwrap(),
                    gx[0].add(&gx[1]).unwrap()
                );
                let r: Vec<&WittVector> = xs.iter().collect();
                let gr: Vec<&WittVector> = gx.iter().collect();
                assert_eq!(
                    WittVector::product(&r).unwrap().map(&b, g).unwrap(),
                    WittVector::product(&gr).unwrap()
                );
                assert_eq!(
                    xs[0].verschiebung().map(&b, g).unwrap(),
                    gx[0].verschiebung()
                );
                assert_eq!(
                    xs[0].frobenius_endo().map(&b, g).unwrap(),
                    gx[0].frobenius_endo()
                );
            }
        }
    }

    #[test]
    fn truncation_at_p_and_zero_product_agree_on_witt_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, m) in [(2, 1), (3, 1), (2, 2)] {
            let f = field(p, m);
            let a = truncated(&f, 1, p);
            let b = Arc::new(PPolarAlgebra::trivial(f.clone(), p as usize - 1));
            let to_b = |x: &WittVector| WittVector::new(b.clone(), x.coords().to_vec()).unwrap();
            for n in 1..=2 {
                for _ in 0..20 {
                    let xs: Vec<WittVector> = (0..p as usize)
                        .map(|_| random_witt(&mut rng, &a, n))
                        .collect();
                    let ys: Vec<WittVector> = xs.iter().map(to_b).collect();
                    assert_eq!(
                        to_b(&xs[0].add(&xs[1]).unwrap()),
                        ys[0].add(&ys[1]).unwrap()
                    );
                    let r: Vec<&WittVector> = xs.iter().collect();
                    let s: Vec<&WittVector> = ys.iter().collect();
                    assert_eq!(
                        to_b(&WittVector::product(&r).unwrap()),
                        WittVector::product(&s).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = Arc::new(random_polarized(&mut rng, &field(3, 2), 3));
        let x = random_witt(&mut rng, &a, 3);
        let text = serde_json::to_string(&x.to_json()).unwrap();
        let back = WittVector::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn cwu_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for a in test_algebras(&mut rng) {
            let x = random_witt(&mut rng, &a, 2);
            let c = CwuClass::new(&x);
            assert_eq!(CwuClass::new(&x.verschiebung().verschiebung()), c);
            assert!(CwuClass::new(&WittVector::zero(a.clone(), 3)).is_zero());

            // disjoint supports: x lives at depth ≥ 2, y at depth < 2
            let mut xc = random_witt(&mut rng, &a, 2).coords().to_vec();
            xc.extend([a.zero(), a.zero()]);
            let yc = random_witt(&mut rng, &a, 2).coords().to_vec();
            let wx = WittVector::new(a.clone(), xc).unwrap();
            let wy = WittVector::new(a.clone(), yc).unwrap();
            let sum = CwuClass::new(&wx).add(&CwuClass::new(&wy)).unwrap();
            let lifted = wx.add(&wy.verschiebung().verschiebung()).unwrap();
            assert_eq!(sum, CwuClass::new(&lifted));

            // V kills exactly the classes of length at most 1
            let c1 = CwuClass::new(&random_witt(&mut rng, &a, 3));
            let mut c2 = c1
                .add(&CwuClass::new(&random_witt(&mut rng, &a, 1)))
                .unwrap();
            assert_eq!(c1.verschiebung(), c2.verschiebung());
            assert!(c1.sub(&c2).unwrap().len() <= 1);
            if rng.gen_bool(0.5) {
                c2 = c2
                    .add(&CwuClass::new(
                        &random_witt(&mut rng, &a, 2).verschiebung_endo(),
                    ))
                    .unwrap();
            }
            assert_eq!(
                c1.verschiebung() == c2.verschiebung(),
                c1.sub(&c2).unwrap().len() <= 1
            );

            let p = a.p() as i64;
            assert_eq!(c.verschiebung().frobenius(), c.multiple(p).unwrap());
            assert_eq!(c.frobenius().verschiebung(), c.multiple(p).unwrap());
        }
    }
}
