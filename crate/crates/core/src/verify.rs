//! Seeded invariant suites with deterministic JSON reports.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cowitt::{cw_add, cw_add_with, cw_validate, random_valid, StabilizeOptions};
use crate::error::{Error, Result};
use crate::etale::{decompose, find_idempotent_from, geometric_points, split_algebra};
use crate::exact::{parse_int_poly, IntPoly, Monomial, RatPoly, Rational, TruncSeries, Var};
use crate::fgl::{
    compose_series, exp_from_log, group_law, mu_pinfty_group, support_check, typicalize_log,
    PTypicalLog,
};
use crate::gfq::{FieldEmbedding, FqElement, FqField};
use crate::ppolar::random::{
    random_element, random_invertible, random_polarized, random_reduced, random_vector,
};
use crate::ppolar::{CommAlgebra, PPolarAlgebra};
use crate::wittmod::{CwuClass, WittVector};
use crate::wittuniv::{
    dwork_lift, ghost_round_trip, identities, polar_degree_check, universal_polys, WittKind,
};

pub const FORMAT: &str = "wittpolar/1";
pub const DEFAULT_SEED: u64 = 20240101;

pub const SUITES: [&str; 11] = [
    "universal",
    "polar-degree",
    "dieudonne",
    "teichmuller",
    "polarization",
    "dwork",
    "etale",
    "idempotent",
    "fgl",
    "cowitt",
    "mu-group",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub format: String,
    pub seed: u64,
    pub p: Option<u32>,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Restricts suites to this prime where they range over several.
    pub p: Option<u32>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            p: None,
        }
    }
}

struct Suite {
    checks: Vec<Check>,
    opts: VerifyOptions,
}

impl Suite {
    fn new(opts: VerifyOptions) -> Self {
        Suite {
            checks: Vec::new(),
            opts,
        }
    }

    fn wants(&self, p: u32) -> bool {
        self.opts.p.is_none_or(|q| q == p)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// Records a failed check for a validation error; internal errors abort.
    fn attempt(&mut self, name: &str, r: Result<(bool, String)>) -> Result<()> {
        match r {
            Ok((pass, detail)) => self.check(name, pass, detail),
            Err(e) if e.is_internal() => return Err(e),
            Err(e) => self.check(name, false, e.to_string()),
        }
        Ok(())
    }

    fn finish(self, name: &str) -> SuiteReport {
        SuiteReport {
            suite: name.into(),
            pass: !self.checks.is_empty() && self.checks.iter().all(|c| c.pass),
            checks: self.checks,
        }
    }
}

pub fn run_suite(name: &str, opts: VerifyOptions) -> Result<SuiteReport> {
    let mut s = Suite::new(opts);
    match name {
        "universal" => universal(&mut s)?,
        "polar-degree" => polar_degree(&mut s)?,
        "dieudonne" => dieudonne(&mut s)?,
        "teichmuller" => teichmuller(&mut s)?,
        "polarization" => polarization(&mut s)?,
        "dwork" => dwork(&mut s)?,
        "etale" => etale(&mut s)?,
        "idempotent" => idempotent(&mut s)?,
        "fgl" => fgl(&mut s)?,
        "cowitt" => cowitt(&mut s)?,
        "mu-group" => mu_group(&mut s)?,
        _ => {
            return Err(Error::Invalid(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    }
    if s.checks.is_empty() {
        s.check("selection", false, "no checks apply to the requested prime");
    }
    Ok(s.finish(name))
}

/// Runs the named suites, or every suite when `names` is empty.
pub fn run(names: &[String], opts: VerifyOptions) -> Result<VerifyReport> {
    let selected: Vec<String> = if names.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    let suites = selected
        .iter()
        .map(|n| run_suite(n, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        format: FORMAT.into(),
        seed: opts.seed,
        p: opts.p,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

impl VerifyReport {
    /// One line per check: `PASS suite/check  detail`.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            for c in &s.checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                out.push_str(&format!("{mark} {}/{}  {}\n", s.suite, c.name, c.detail));
            }
        }
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} overall\n"));
        out
    }
}

const UNIVERSAL_RANGE: [(u32, usize); 3] = [(2, 3), (3, 3), (5, 2)];

fn universal(s: &mut Suite) -> Result<()> {
    for (p, max_n) in UNIVERSAL_RANGE {
        if !s.wants(p) {
            continue;
        }
        for n in 1..=max_n {
            for kind in WittKind::ALL {
                let polys = universal_polys(p, n, kind)?;
                s.check(
                    format!("ghost-round-trip p={p} n={n} {kind}"),
                    ghost_round_trip(p, n, kind, &polys),
                    "w(op(x)) equals the ghost target exactly",
                );
            }
        }
    }
    if s.wants(2) {
        let sum = universal_polys(2, 2, WittKind::Sum)?;
        let prod = universal_polys(2, 2, WittKind::Prod)?;
        let s1 = parse_int_poly("x1 + y1 - x0*y0")?;
        let m1 = parse_int_poly("x0^2*y1 + x1*y0^2 + 2*x1*y1")?;
        s.check("S1 p=2", sum[1].poly == s1, format!("S1 = {}", sum[1].poly));
        s.check(
            "M1 p=2",
            prod[1].poly == m1,
            format!("M1 = {}", prod[1].poly),
        );
    }
    Ok(())
}

fn polar_degree(s: &mut Suite) -> Result<()> {
    for (p, max_n) in UNIVERSAL_RANGE {
        if !s.wants(p) {
            continue;
        }
        for kind in WittKind::ALL {
            let polys = universal_polys(p, max_n, kind)?;
            let bad = polys.iter().filter(|u| !polar_degree_check(u)).count();
            s.check(
                format!("p={p} n={max_n} {kind}"),
                bad == 0,
                format!(
                    "{} components, {bad} with inadmissible monomials",
                    polys.len()
                ),
            );
        }
    }
    Ok(())
}

fn random_witt<R: Rng>(rng: &mut R, a: &Arc<PPolarAlgebra>, n: usize) -> WittVector {
    let coords = (0..n)
        .map(|_| random_vector(rng, a.field(), a.dim()))
        .collect();
    WittVector::new(a.clone(), coords).expect("shape")
}

pub const DIEUDONNE_INSTANCES: usize = 240;

fn dieudonne(s: &mut Suite) -> Result<()> {
    let fields: Vec<(u32, u32)> = [(2, 1), (2, 2), (3, 2)]
        .into_iter()
        .filter(|&(p, _)| s.wants(p))
        .collect();
    if fields.is_empty() {
        return Ok(());
    }
    let mut rng = s.rng(3);
    let mut counts = [0usize; 4];
    let mut failures = Vec::new();
    for i in 0..DIEUDONNE_INSTANCES {
        let (p, m) = fields[i % fields.len()];
        let f = FqField::new(p, m)?;
        let a = Arc::new(random_polarized(&mut rng, &f, 4));
        let n = 1 + i % 3;
        let x = random_witt(&mut rng, &a, n);
        let px = x.multiple(p as i64)?;
        let fv = x.verschiebung().frobenius()? == px
            && x.frobenius_endo().verschiebung_endo() == px
            && x.verschiebung_endo().frobenius_endo() == px;
        let sc = WittVector::scalar(&f, &random_vector(&mut rng, &f, n + 1))?;
        let v = x.scalar_mul(&sc)?.verschiebung()
            == x.verschiebung().scalar_mul(&sc.scalar_frobenius(-1))?;
        let x1 = random_witt(&mut rng, &a, n + 1);
        let fr = x1.scalar_mul(&sc)?.frobenius()?
            == x1.frobenius()?.scalar_mul(&sc.scalar_frobenius(1))?;
        for (k, ok) in [fv, v, fr].into_iter().enumerate() {
            if ok {
                counts[k] += 1;
            } else {
                failures.push(format!("instance {i} relation {k}"));
            }
        }
        counts[3] += 1;
    }
    let total = counts[3];
    for (k, name) in [
        "FV = VF = p",
        "V(a x) = phi^-1(a) V(x)",
        "F(a x) = phi(a) F(x)",
    ]
    .iter()
    .enumerate()
    {
        s.check(
            *name,
            counts[k] == total,
            format!(
                "{}/{total} instances over F_2, F_4, F_9, dim <= 4, n <= 3",
                counts[k]
            ),
        );
    }
    if !failures.is_empty() {
        s.check("failures", false, failures.join("; "));
    }
    Ok(())
}

fn teichmuller(s: &mut Suite) -> Result<()> {
    for (p, ks) in [(2u32, vec![2usize]), (3, vec![2, 3]), (5, vec![5])] {
        if !s.wants(p) {
            continue;
        }
        for k in ks {
            s.check(
                format!("alternating sum p={p} k={k}"),
                identities::teichmuller_identity(p, k)?,
                "(0, (-1)^k sum of multinomials / p) over Z",
            );
        }
        s.check(
            format!("product form p={p}"),
            identities::teichmuller_product_mod_p(p)?,
            "(0, t_0 ... t_{p-1}) modulo p",
        );
    }
    Ok(())
}

fn enumerate_witt(a: &Arc<PPolarAlgebra>, n: usize) -> Vec<WittVector> {
    let f = a.field();
    let q = f.order() as usize;
    let slots = a.dim() * n;
    let total = q.pow(slots as u32);
    (0..total)
        .map(|mut code| {
            let mut flat = Vec::with_capacity(slots);
            for _ in 0..slots {
                flat.push(FqElement((code % q) as u32));
                code /= q;
            }
            let coords = flat.chunks(a.dim()).map(<[FqElement]>::to_vec).collect();
            WittVector::new(a.clone(), coords).expect("shape")
        })
        .collect()
}

/// Tables above this many entries are compared on samples.
pub const COMPLETE_TABLE_LIMIT: usize = 1 << 20;
const TABLE_SAMPLES: usize = 2000;

fn polarization(s: &mut Suite) -> Result<()> {
    let mut rng = s.rng(5);
    for (p, m) in [(2u32, 1u32), (3, 1)] {
        if !s.wants(p) {
            continue;
        }
        let f = FqField::new(p, m)?;
        let a = Arc::new(PPolarAlgebra::polarize(&CommAlgebra::truncated(
            f.clone(),
            1,
            p,
        )?)?);
        let b = Arc::new(PPolarAlgebra::trivial(f.clone(), p as usize - 1));
        s.check(
            format!("mu tensors q={}", f.order()),
            *a == *b,
            "structure constants coincide",
        );
        let to_b = |x: &WittVector| WittVector::new(b.clone(), x.coords().to_vec()).expect("shape");
        for n in 1..=3 {
            let xs = enumerate_witt(&a, n);
            let count = xs.len();
            let mut unary = true;
            for x in &xs {
                unary &= to_b(&x.neg()) == to_b(x).neg()
                    && to_b(&x.verschiebung_endo()) == to_b(x).verschiebung_endo()
                    && to_b(&x.frobenius_endo()) == to_b(x).frobenius_endo();
            }
            s.check(
                format!("neg, V, F q={} n={n}", f.order()),
                unary,
                format!("complete, {count} elements"),
            );
            let (sum_ok, sum_cov) = if count * count <= COMPLETE_TABLE_LIMIT {
                let mut ok = true;
                for x in &xs {
                    for y in &xs {
                        ok &= to_b(&x.add(y)?) == to_b(x).add(&to_b(y))?;
                    }
                }
                (ok, format!("complete, {} entries", count * count))
            } else {
                let mut ok = true;
                for _ in 0..TABLE_SAMPLES {
                    let (x, y) = (&xs[rng.gen_range(0..count)], &xs[rng.gen_range(0..count)]);
                    ok &= to_b(&x.add(y)?) == to_b(x).add(&to_b(y))?;
                }
                (
                    ok,
                    format!("{TABLE_SAMPLES} samples of {} entries", count * count),
                )
            };
            s.check(format!("sum q={} n={n}", f.order()), sum_ok, sum_cov);
            let entries = count.checked_pow(p);
            let (prod_ok, prod_cov) = match entries {
                Some(e) if e <= COMPLETE_TABLE_LIMIT => {
                    let mut ok = true;
                    let mut idx = vec![0usize; p as usize];
                    loop {
                        let args: Vec<&WittVector> = idx.iter().map(|&i| &xs[i]).collect();
                        let images: Vec<WittVector> = args.iter().map(|x| to_b(x)).collect();
                        let irefs: Vec<&WittVector> = images.iter().collect();
                        ok &= to_b(&WittVector::product(&args)?) == WittVector::product(&irefs)?;
                        let mut k = 0;
                        while k < idx.len() {
                            idx[k] += 1;
                            if idx[k] < count {
                                break;
                            }
                            idx[k] = 0;
                            k += 1;
                        }
                        if k == idx.len() {
                            break;
                        }
                    }
                    (ok, format!("complete, {e} entries"))
                }
                _ => {
                    let mut ok = true;
                    for _ in 0..TABLE_SAMPLES {
                        let args: Vec<&WittVector> =
                            (0..p).map(|_| &xs[rng.gen_range(0..count)]).collect();
                        let images: Vec<WittVector> = args.iter().map(|x| to_b(x)).collect();
                        let irefs: Vec<&WittVector> = images.iter().collect();
                        ok &= to_b(&WittVector::product(&args)?) == WittVector::product(&irefs)?;
                    }
                    let size = entries.map_or("more than 2^64".into(), |e| e.to_string());
                    (ok, format!("{TABLE_SAMPLES} samples of {size} entries"))
                }
            };
            s.check(format!("product q={} n={n}", f.order()), prod_ok, prod_cov);
        }
    }
    Ok(())
}

fn dwork(s: &mut Suite) -> Result<()> {
    for p in [2u32, 3, 5] {
        if !s.wants(p) {
            continue;
        }
        let x = IntPoly::var(Var::free(0));
        let target: Vec<IntPoly> = (0..4).map(|i| x.pow(p.pow(i))).collect();
        let lifted = dwork_lift(p, &target);
        let expected = vec![x.clone(), IntPoly::zero(), IntPoly::zero(), IntPoly::zero()];
        s.attempt(
            &format!("frobenius powers p={p}"),
            lifted.map(|c| (c == expected, "lift (x, 0, 0, 0)".to_string())),
        )?;
        let rejected = dwork_lift(p, &[x.clone(), x.clone(), x.clone()]);
        s.check(
            format!("constant sequence p={p}"),
            matches!(rejected, Err(Error::DworkCongruenceFailed { level: 1 })),
            "(x, x, x) rejected at level 1",
        );
    }
    Ok(())
}

fn eval_poly(g: &FqField, coeffs: &[FqElement], x: FqElement) -> FqElement {
    coeffs
        .iter()
        .rev()
        .fold(FqElement::ZERO, |acc, &c| g.add(g.mul(acc, x), c))
}

/// Roots of `f` in `𝔽_{q^6}`, which contains every extension of degree ≤ 3.
fn brute_force_points(f: &Arc<FqField>, coeffs: &[FqElement]) -> Result<usize> {
    let big = FqField::new(f.p(), f.degree() * 6)?;
    let emb = FieldEmbedding::new(f.clone(), big.clone())?;
    let c = emb.apply_vec(coeffs);
    Ok(big
        .elements()
        .filter(|&x| eval_poly(&big, &c, x).is_zero())
        .count())
}

/// Nonzero linear maps `φ: V ⊗ 𝔽_{q^k} → 𝔽_{q^k}` with
/// `φ(product(i_1, …, i_r)) = φ(e_{i_1})⋯φ(e_{i_r})` on basis tuples, by exhaustion.
fn brute_force_homs(
    f: &Arc<FqField>,
    dim: usize,
    arity: usize,
    k: u32,
    product: impl Fn(&[usize]) -> Result<Vec<FqElement>>,
) -> Result<usize> {
    let big = FqField::new(f.p(), f.degree() * k)?;
    let emb = FieldEmbedding::new(f.clone(), big.clone())?;
    let mut constraints = Vec::new();
    let mut idx = vec![0usize; arity];
    loop {
        constraints.push((idx.clone(), emb.apply_vec(&product(&idx)?)));
        let Some(j) = (0..arity).rev().find(|&j| idx[j] + 1 < dim) else {
            break;
        };
        idx[j] += 1;
        for t in j + 1..arity {
            idx[t] = idx[j];
        }
    }
    let q = big.order() as usize;
    let mut count = 0;
    for code in 1..q.pow(dim as u32) {
        let phi: Vec<FqElement> = (0..dim)
            .map(|i| FqElement((code / q.pow(i as u32) % q) as u32))
            .collect();
        let ok = constraints.iter().all(|(idx, m)| {
            let lhs = m
                .iter()
                .zip(&phi)
                .fold(FqElement::ZERO, |acc, (&c, &x)| big.add(acc, big.mul(c, x)));
            let rhs = idx
                .iter()
                .fold(FqElement::ONE, |acc, &i| big.mul(acc, phi[i]));
            lhs == rhs
        });
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

/// A random étale or monogenic algebra of dimension ≤ 3.
fn random_small_algebra<R: Rng>(rng: &mut R, f: &Arc<FqField>) -> Result<CommAlgebra> {
    if rng.gen_bool(0.5) {
        let deg = rng.gen_range(1..=3);
        let mut coeffs: Vec<FqElement> = (0..deg).map(|_| random_element(rng, f)).collect();
        coeffs.push(FqElement::ONE);
        return CommAlgebra::monogenic(f.clone(), &coeffs);
    }
    let mut r = CommAlgebra::field_extension(f.clone(), rng.gen_range(1..=3))?;
    while r.dim() < 3 && rng.gen_bool(0.5) {
        let d = rng.gen_range(1..=3 - r.dim());
        r = r.direct_product(&CommAlgebra::field_extension(f.clone(), d as u32)?)?;
    }
    Ok(r)
}

fn etale(s: &mut Suite) -> Result<()> {
    let mut rng = s.rng(7);
    for (p, m, n) in [(2u32, 1u32, 3usize), (2, 2, 2), (3, 1, 3)] {
        if !s.wants(p) {
            continue;
        }
        let f = FqField::new(p, m)?;
        let split = split_algebra(&f, n);
        let mut recovered = 0;
        for _ in 0..20 {
            let b = split.change_basis(&random_invertible(&mut rng, &f, n))?;
            let d = decompose(&b)?;
            if d.count() == n && d.extension_degree == 1 {
                recovered += 1;
            }
        }
        s.check(
            format!("split q={} n={n}", f.order()),
            recovered == 20,
            format!("{recovered}/20 scrambles give {n} factors"),
        );
    }
    for p in [2u32, 3] {
        if !s.wants(p) {
            continue;
        }
        let f = FqField::new(p, 1)?;
        let a = PPolarAlgebra::polarize(&CommAlgebra::field_extension(f, 2)?)?;
        let d = decompose(&a)?;
        s.check(
            format!("quadratic field q={p}"),
            d.count() == 2 && d.orbits().len() == 1,
            format!("{} factors, cycles {}", d.count(), d.cycle_notation()),
        );
    }
    for (p, m) in [(2u32, 1u32), (3, 1), (2, 2)] {
        if !s.wants(p) {
            continue;
        }
        let f = FqField::new(p, m)?;
        let mut agree = 0;
        let trials = 10;
        for _ in 0..trials {
            let deg = rng.gen_range(1..=3);
            let mut coeffs: Vec<FqElement> =
                (0..deg).map(|_| random_element(&mut rng, &f)).collect();
            coeffs.push(FqElement::ONE);
            let a = PPolarAlgebra::polarize(&CommAlgebra::monogenic(f.clone(), &coeffs)?)?;
            let b = a.change_basis(&random_invertible(&mut rng, &f, a.dim()))?;
            if geometric_points(&b)?.count == brute_force_points(&f, &coeffs)? {
                agree += 1;
            }
        }
        s.check(
            format!("points vs roots q={}", f.order()),
            agree == trials,
            format!("{agree}/{trials} algebras F_q[t]/(f), deg f <= 3"),
        );
    }
    for (p, m) in [(2u32, 1u32), (3, 1), (2, 2)] {
        if !s.wants(p) {
            continue;
        }
        let f = FqField::new(p, m)?;
        let mut ring = 0;
        let mut polar = 0;
        let trials = 8;
        for _ in 0..trials {
            let r = random_small_algebra(&mut rng, &f)?;
            let a = PPolarAlgebra::polarize(&r)?;
            let a = a.change_basis(&random_invertible(&mut rng, &f, a.dim()))?;
            let sizes: Vec<usize> = decompose(&a)?.orbits().iter().map(Vec::len).collect();
            let (mut ring_ok, mut polar_ok) = (true, true);
            for k in 1..=3u32 {
                let expected: usize = sizes.iter().filter(|&&l| k as usize % l == 0).sum();
                let homs =
                    brute_force_homs(&f, r.dim(), 2, k, |i| Ok(r.structure(i[0], i[1]).to_vec()))?;
                ring_ok &= homs == expected;
                let polar_homs = brute_force_homs(&f, a.dim(), p as usize, k, |i| {
                    let basis: Vec<Vec<FqElement>> = i.iter().map(|&j| a.basis(j)).collect();
                    a.mu(&basis.iter().map(Vec::as_slice).collect::<Vec<_>>())
                })?;
                polar_ok &= polar_homs == (p as usize - 1) * expected;
            }
            ring += ring_ok as usize;
            polar += polar_ok as usize;
        }
        s.check(
            format!("points vs ring homs q={}", f.order()),
            ring == trials,
            format!("{ring}/{trials} algebras R of dim <= 3, Hom(R, F_q^k) for k <= 3"),
        );
        s.check(
            format!("points vs p-polar homs q={}", f.order()),
            polar == trials,
            format!("{polar}/{trials} algebras, (p - 1) nonzero homs per point"),
        );
    }
    Ok(())
}

pub const IDEMPOTENT_INSTANCES: usize = 50;

fn idempotent(s: &mut Suite) -> Result<()> {
    if s.wants(2) {
        let f = FqField::new(2, 1)?;
        let a = PPolarAlgebra::polarize(&CommAlgebra::field_extension(f, 2)?)?;
        let y = a.basis(1);
        let id = find_idempotent_from(&a, &y)?;
        let b = &id.algebra;
        let y_sq = b.pth_power(&id.relation.powers[0]);
        let sum = b.field().vadd(&id.relation.powers[0], &y_sq);
        let unity = a.basis(0);
        s.check(
            "F_4 example",
            id.element == sum && id.element == unity && b.pth_power(&id.element) == id.element,
            "e = y + y^2 = 1",
        );
    }
    let fields: Vec<(u32, u32)> = [(2, 1), (2, 2), (3, 1), (5, 1)]
        .into_iter()
        .filter(|&(p, _)| s.wants(p))
        .collect();
    if fields.is_empty() {
        return Ok(());
    }
    let mut rng = s.rng(11);
    let mut good = 0;
    for i in 0..IDEMPOTENT_INSTANCES {
        let (p, m) = fields[i % fields.len()];
        let f = FqField::new(p, m)?;
        let a = random_reduced(&mut rng, &f, 4);
        let y = loop {
            let y = random_vector(&mut rng, &f, a.dim());
            if y.iter().any(|c| !c.is_zero()) {
                break y;
            }
        };
        let id = find_idempotent_from(&a, &y)?;
        let e = &id.element;
        if e.iter().any(|c| !c.is_zero()) && id.algebra.pth_power(e) == *e {
            good += 1;
        }
    }
    s.check(
        "random reduced algebras",
        good == IDEMPOTENT_INSTANCES,
        format!("{good}/{IDEMPOTENT_INSTANCES} give e^p = e, e != 0"),
    );
    Ok(())
}

fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn trivariate_associativity(log: &PTypicalLog, d: usize) -> Result<bool> {
    let law = group_law(log, d)?;
    let f = law.to_poly();
    let (x, y, z) = (Var::x(0), Var::y(0), Var::free(0));
    let l = log.to_series();
    let mut sum = RatPoly::zero();
    for v in [x, y, z] {
        for k in l.support().into_iter().filter(|&k| k <= d) {
            sum.add_term(Monomial::from_pairs([(v, k as u32)]), l.coeff(k));
        }
    }
    let exp = exp_from_log(&PTypicalLog::new(
        log.p(),
        d,
        log.coeffs()
            .iter()
            .take(law_len(log.p(), d))
            .cloned()
            .collect(),
    )?);
    let oracle = compose_series(&exp, &sum, d as u32);
    let left = f.substitute_with(
        |v| {
            (v == x)
                .then(|| f.clone())
                .or_else(|| (v == y).then(|| RatPoly::var(z)))
        },
        Some(d as u32),
    )?;
    let inner = f.map_vars(|v| if v == x { y } else { z });
    let right = f.substitute_with(
        |v| {
            (v == x)
                .then(|| RatPoly::var(x))
                .or_else(|| (v == y).then(|| inner.clone()))
        },
        Some(d as u32),
    )?;
    Ok(left == oracle && right == oracle)
}

fn law_len(p: u32, d: usize) -> usize {
    let mut n = 0;
    let mut k = 1usize;
    while k <= d {
        n += 1;
        k *= p as usize;
    }
    n
}

fn fgl(s: &mut Suite) -> Result<()> {
    let mut rng = s.rng(13);
    for p in [2u32, 3, 5] {
        if !s.wants(p) {
            continue;
        }
        let mut logs = vec![
            typicalize_log(&TruncSeries::log1p(25), p)?,
            PTypicalLog::additive(p, 25)?,
        ];
        for _ in 0..3 {
            let mut coeffs = vec![Rational::one()];
            for _ in 1..law_len(p, 25) {
                coeffs.push(rational(rng.gen_range(-9..10), rng.gen_range(1..10)));
            }
            logs.push(PTypicalLog::new(p, 25, coeffs)?);
        }
        let mut offenders = BTreeSet::new();
        for log in &logs {
            offenders.extend(support_check(&exp_from_log(log), p).offenders);
        }
        s.check(
            format!("exp support p={p}"),
            offenders.is_empty(),
            format!(
                "{} logs to degree 25, offending exponents {offenders:?}",
                logs.len()
            ),
        );
    }
    for p in [2u32, 3] {
        if !s.wants(p) {
            continue;
        }
        let log = typicalize_log(&TruncSeries::log1p(15), p)?;
        let law = group_law(&log, 15)?;
        let bad = law.non_integral_term();
        s.check(
            format!("multiplicative law integral p={p}"),
            bad.is_none(),
            match bad {
                None => "all denominators prime to p to degree 15".into(),
                Some((a, b, d)) => format!("denominator {d} at x^{a} y^{b}"),
            },
        );
        s.check(
            format!("multiplicative law associative p={p}"),
            trivariate_associativity(&log, 10)?,
            "F(F(x,y),z) = F(x,F(y,z)) = exp(log x + log y + log z) to degree 10",
        );
    }
    Ok(())
}

pub const COWITT_PAIRS: usize = 100;

fn cowitt(s: &mut Suite) -> Result<()> {
    let algebras: Vec<(u32, Arc<PPolarAlgebra>)> = [(2u32, 4u32), (3, 3)]
        .into_iter()
        .filter(|&(p, _)| s.wants(p))
        .map(|(p, high)| {
            let f = FqField::new(p, 1)?;
            Ok((
                p,
                Arc::new(PPolarAlgebra::polarize(&CommAlgebra::truncated(
                    f, 1, high,
                )?)?),
            ))
        })
        .collect::<Result<_>>()?;
    if algebras.is_empty() {
        return Ok(());
    }
    let mut rng = s.rng(17);
    let mut counts = BTreeMap::new();
    for i in 0..COWITT_PAIRS {
        let (_, a) = &algebras[i % algebras.len()];
        let x = random_valid(&mut rng, a, 3);
        let y = random_valid(&mut rng, a, 3);
        let z = random_valid(&mut rng, a, 2);
        let mut tally =
            |name: &'static str, ok: bool| *counts.entry(name).or_insert(0) += usize::from(ok);
        let xy = cw_add(&x, &y);
        tally("stabilizes", xy.is_ok());
        let Ok(xy) = xy else { continue };
        tally("valid", cw_validate(&xy));
        let late = StabilizeOptions {
            start: 5,
            ..StabilizeOptions::default()
        };
        tally(
            "offset independent",
            cw_add_with(&x, &y, late).ok().as_ref() == Some(&xy),
        );
        tally("commutative", cw_add(&y, &x).ok().as_ref() == Some(&xy));
        let left = cw_add(&xy, &z).ok();
        let right = cw_add(&y, &z).and_then(|yz| cw_add(&x, &yz)).ok();
        tally("associative", left.is_some() && left == right);
        let len = 1 + i % 4;
        let mk = |rng: &mut ChaCha8Rng| {
            let coords = (0..len)
                .map(|_| random_vector(rng, a.field(), a.dim()))
                .collect();
            WittVector::new(a.clone(), coords).map(|w| CwuClass::new(&w))
        };
        let (cx, cy) = (mk(&mut rng)?, mk(&mut rng)?);
        let fin = crate::cowitt::CoWittElement::from_cwu(&cx);
        let fin_y = crate::cowitt::CoWittElement::from_cwu(&cy);
        let agree = cw_add(&fin, &fin_y)
            .ok()
            .and_then(|sum| sum.to_cwu())
            .zip(cx.add(&cy).ok())
            .is_some_and(|(u, v)| u == v);
        tally("finite support matches CW^u", agree);
    }
    for name in [
        "stabilizes",
        "valid",
        "offset independent",
        "commutative",
        "associative",
        "finite support matches CW^u",
    ] {
        let c = counts.get(name).copied().unwrap_or(0);
        s.check(name, c == COWITT_PAIRS, format!("{c}/{COWITT_PAIRS} pairs"));
    }
    Ok(())
}

/// `φ = (e^t − 1) ∘ log`, reduced mod p; `None` if a denominator is divisible by p.
fn coordinate_change_mod_p(log: &PTypicalLog, f: &FqField) -> Option<Vec<(usize, FqElement)>> {
    let phi = TruncSeries::expm1(log.precision())
        .compose(&log.to_series())
        .ok()?;
    let p = BigInt::from(f.p());
    phi.support()
        .into_iter()
        .map(|k| {
            let c = phi.coeff(k);
            if (c.denom() % &p).is_zero() {
                return None;
            }
            let num = f.from_int((c.numer() % &p).to_string().parse::<i64>().ok()?);
            let den = f.from_int((c.denom().abs() % &p).to_string().parse::<i64>().ok()?);
            let sign = if c.denom().is_negative() {
                f.neg(FqElement::ONE)
            } else {
                FqElement::ONE
            };
            Some((k, f.mul(sign, f.div(num, den).ok()?)))
        })
        .collect()
}

fn mu_group(s: &mut Suite) -> Result<()> {
    if s.wants(2) {
        let f = FqField::new(2, 1)?;
        let r = CommAlgebra::truncated(f.clone(), 1, 4)?;
        let a = PPolarAlgebra::polarize(&r)?;
        let log = typicalize_log(&TruncSeries::log1p(12), 2)?;
        let g = mu_pinfty_group(&a, &log)?;
        let elems = g.elements()?;
        let orders: Vec<u64> = elems.iter().map(|x| g.order(x)).collect::<Result<_>>()?;
        s.check(
            "order 8 p-group",
            elems.len() == 8 && orders.iter().all(|n| n.is_power_of_two()),
            format!("element orders {orders:?}"),
        );
        let iso = match coordinate_change_mod_p(&log, &f) {
            None => (false, "coordinate change is not 2-integral".to_string()),
            Some(phi) => {
                let eval = |x: &[FqElement]| {
                    let mut out = vec![FqElement::ZERO; r.dim()];
                    for &(k, c) in &phi {
                        f.vaxpy(&mut out, c, &r.pow(x, k as u64));
                    }
                    out
                };
                let images: Vec<Vec<FqElement>> = elems.iter().map(|x| eval(x)).collect();
                let distinct: BTreeSet<&Vec<FqElement>> = images.iter().collect();
                let index: HashMap<&[FqElement], usize> = elems
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e.as_slice(), i))
                    .collect();
                let mut ok = distinct.len() == elems.len();
                for (i, x) in elems.iter().enumerate() {
                    for (j, y) in elems.iter().enumerate() {
                        let star = g.star(x, y)?;
                        let unit = f.vadd(
                            &f.vadd(&images[i], &images[j]),
                            &r.mul(&images[i], &images[j]),
                        );
                        ok &= index.contains_key(star.as_slice()) && eval(&star) == unit;
                    }
                }
                (
                    ok,
                    "phi(x * y) = (1 + phi x)(1 + phi y) - 1 on all 64 pairs".to_string(),
                )
            }
        };
        s.check("isomorphic to (1 + nil)^x", iso.0, iso.1);
    }
    for (p, m) in [(2u32, 2u32), (3, 1)] {
        if !s.wants(p) {
            continue;
        }
        let f = FqField::new(p, m)?;
        let log = typicalize_log(&TruncSeries::log1p(12), p)?;
        let honest = PPolarAlgebra::polarize(&CommAlgebra::truncated(f.clone(), 1, p)?)?;
        let trivial = PPolarAlgebra::trivial(f.clone(), p as usize - 1);
        let t1 = mu_pinfty_group(&honest, &log)?.table()?;
        let t2 = mu_pinfty_group(&trivial, &log)?.table()?;
        s.check(
            format!("truncated vs trivial q={}", f.order()),
            t1 == t2,
            format!("{} element tables coincide", t1.len()),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for name in SUITES {
            let r = run_suite(name, VerifyOptions::default()).unwrap();
            let failed: Vec<&Check> = r.checks.iter().filter(|c| !c.pass).collect();
            assert!(r.pass, "{name}: {failed:?}");
        }
    }

    #[test]
    fn prime_filter() {
        let opts = VerifyOptions {
            p: Some(3),
            ..VerifyOptions::default()
        };
        let r = run_suite("teichmuller", opts).unwrap();
        assert!(r.pass);
        assert!(r.checks.iter().all(|c| c.name.contains("p=3")));
        let r = run_suite("mu-group", VerifyOptions { p: Some(7), ..opts }).unwrap();
        assert!(!r.pass);
        assert!(matches!(run_suite("nope", opts), Err(Error::Invalid(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let opts = VerifyOptions::default();
        let names = vec!["dieudonne".to_string(), "cowitt".to_string()];
        let a = serde_json::to_string(&run(&names, opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&names, opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
