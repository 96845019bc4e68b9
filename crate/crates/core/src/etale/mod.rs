//! Splitting reduced p-polar algebras into polarizations of fields after
//! finite scalar extension, geometric point counts, and the 0/1 functor on
//! morphisms of split algebras.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfq::{
    additive_roots, linearized_kernel, FieldEmbedding, FieldJson, FqElement, FqField, FqMatrix,
};
use crate::ppolar::random::random_vector;
use crate::ppolar::{nilradical, quotient, restrict, PPolarAlgebra, Subspace};

const RANDOM_CANDIDATES: usize = 16;

fn is_zero(v: &[FqElement]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// `y, y^p, …, y^{p^{j−1}}` independent and `y^{p^j} = Σ α_i y^{p^i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerRelation {
    pub powers: Vec<Vec<FqElement>>,
    pub alphas: Vec<FqElement>,
}

impl PowerRelation {
    pub fn j(&self) -> usize {
        self.alphas.len()
    }
}

pub fn power_relation(a: &PPolarAlgebra, y: &[FqElement]) -> Result<PowerRelation> {
    if is_zero(y) {
        return Err(Error::Precondition("y must be nonzero".into()));
    }
    let f = a.field();
    let mut powers = vec![y.to_vec()];
    loop {
        let next = a.pth_power(powers.last().expect("nonempty"));
        let m = FqMatrix::from_columns(a.dim(), &powers);
        if let Some(alphas) = m.solve(f, &next) {
            return Ok(PowerRelation { powers, alphas });
        }
        powers.push(next);
    }
}

/// `Σ_{i<j} α_i^{p^{j−i−1}} x^{p^{j−i}} − x` as coefficients of `x^{p^k}`.
pub fn additive_polynomial(f: &FqField, alphas: &[FqElement]) -> Vec<FqElement> {
    let j = alphas.len();
    let mut coeffs = vec![FqElement::ZERO; j + 1];
    coeffs[0] = f.neg(FqElement::ONE);
    for (i, &a) in alphas.iter().enumerate() {
        coeffs[j - i] = f.frobenius(a, (j - i - 1) as i64);
    }
    coeffs
}

/// `e = Σ_l (Σ_{i≤l} (α_i β^p)^{p^{l−i}}) y^{p^l}`.
pub fn idempotent_from_root(f: &FqField, rel: &PowerRelation, beta: FqElement) -> Vec<FqElement> {
    let bp = f.frobenius(beta, 1);
    let mut e = vec![FqElement::ZERO; rel.powers[0].len()];
    for (l, yl) in rel.powers.iter().enumerate() {
        let c = (0..=l).fold(FqElement::ZERO, |acc, i| {
            f.add(acc, f.frobenius(f.mul(rel.alphas[i], bp), (l - i) as i64))
        });
        f.vaxpy(&mut e, c, yl);
    }
    e
}

fn nonzero_roots(field: &Arc<FqField>, coeffs: &[FqElement]) -> Result<Vec<FqElement>> {
    Ok(additive_roots(field, coeffs)?
        .into_iter()
        .filter(|r| !r.is_zero())
        .collect())
}

/// Least `d ≤ p^j` such that the additive polynomial has a nonzero root
/// over the degree-`d` extension.
fn root_extension_degree(field: &Arc<FqField>, coeffs: &[FqElement]) -> Result<u32> {
    let j = coeffs.len() as u32 - 1;
    let cap = field.p().saturating_pow(j);
    for d in 1..=cap {
        let (big, emb) = if d == 1 {
            (field.clone(), FieldEmbedding::identity(field.clone()))
        } else {
            let big = FqField::new(field.p(), field.degree() * d)?;
            (big.clone(), FieldEmbedding::new(field.clone(), big)?)
        };
        if !nonzero_roots(&big, &emb.apply_vec(coeffs))?.is_empty() {
            return Ok(d);
        }
    }
    Err(Error::ExtensionCapExceeded(cap))
}

/// Output of [`find_idempotent`].
#[derive(Clone, Debug)]
pub struct Idempotent {
    /// The input algebra over the field where `β` lives.
    pub algebra: PPolarAlgebra,
    pub embedding: FieldEmbedding,
    pub extension_degree: u32,
    pub relation: PowerRelation,
    pub beta: FqElement,
    pub element: Vec<FqElement>,
}

fn require_reduced(a: &PPolarAlgebra) -> Result<()> {
    if a.dim() == 0 {
        return Err(Error::Precondition(
            "the zero algebra has no idempotent".into(),
        ));
    }
    let nil = nilradical(a);
    if !nil.is_zero() {
        return Err(Error::NotReduced(nil.dim()));
    }
    Ok(())
}

/// A nonzero `e` with `e^p = e` built from `y` = first basis vector.
pub fn find_idempotent(a: &PPolarAlgebra) -> Result<Idempotent> {
    find_idempotent_from(a, &a.basis(0))
}

pub fn find_idempotent_from(a: &PPolarAlgebra, y: &[FqElement]) -> Result<Idempotent> {
    require_reduced(a)?;
    let rel = power_relation(a, y)?;
    let coeffs = additive_polynomial(a.field(), &rel.alphas);
    let d = root_extension_degree(a.field(), &coeffs)?;
    let (ext, emb) = a.extend_scalars(d)?;
    let f = ext.field().clone();
    let rel = PowerRelation {
        powers: rel.powers.iter().map(|v| emb.apply_vec(v)).collect(),
        alphas: emb.apply_vec(&rel.alphas),
    };
    let beta = nonzero_roots(&f, &emb.apply_vec(&coeffs))?[0];
    let e = idempotent_from_root(&f, &rel, beta);
    if is_zero(&e) || ext.pth_power(&e) != e {
        return Err(Error::Internal(
            "constructed element is not a nonzero idempotent".into(),
        ));
    }
    Ok(Idempotent {
        algebra: ext,
        embedding: emb,
        extension_degree: d,
        relation: rel,
        beta,
        element: e,
    })
}

/// `A ≅ ker f × im f` for `f(y) = μ(e, …, e, y)`.
#[derive(Clone, Debug)]
pub struct Split {
    pub map: FqMatrix,
    pub kernel: Subspace,
    pub image: Subspace,
    pub kernel_algebra: PPolarAlgebra,
    pub image_algebra: PPolarAlgebra,
}

/// Matrix of `y ↦ μ(e, …, e, y)`.
pub fn multiplication_by_power(a: &PPolarAlgebra, e: &[FqElement]) -> FqMatrix {
    let p = a.p() as usize;
    let cols: Vec<Vec<FqElement>> = (0..a.dim())
        .map(|j| {
            let b = a.basis(j);
            let mut args: Vec<&[FqElement]> = vec![e; p - 1];
            args.push(&b);
            a.mu(&args).expect("p arguments")
        })
        .collect();
    FqMatrix::from_columns(a.dim(), &cols)
}

pub fn split_once(a: &PPolarAlgebra, e: &[FqElement]) -> Result<Split> {
    if e.len() != a.dim() {
        return Err(Error::LengthMismatch(e.len(), a.dim()));
    }
    if is_zero(e) || a.pth_power(e) != e {
        return Err(Error::Precondition(
            "split needs a nonzero e with e^p = e".into(),
        ));
    }
    let f = a.field();
    let map = multiplication_by_power(a, e);
    if map.mul(f, &map)? != map {
        return Err(Error::Internal("y ↦ e^{p−1}y is not idempotent".into()));
    }
    let cols: Vec<Vec<FqElement>> = (0..a.dim()).map(|j| map.column(j)).collect();
    let image = Subspace::span(f, a.dim(), &cols);
    let kernel = Subspace::span(f, a.dim(), &map.kernel(f));
    let kernel_algebra = restrict(a, &kernel)?;
    let image_algebra = restrict(a, &image)?;
    if kernel_algebra.check_assoc().is_some() || image_algebra.check_assoc().is_some() {
        return Err(Error::Internal(
            "split factor violates associativity".into(),
        ));
    }
    Ok(Split {
        map,
        kernel,
        image,
        kernel_algebra,
        image_algebra,
    })
}

enum Step {
    Extend(u32),
    Unit(Vec<FqElement>),
    Split(Split),
}

/// Elements with `e^p = e`, as an 𝔽_p-basis.
pub fn fixed_points(a: &PPolarAlgebra) -> Result<Vec<Vec<FqElement>>> {
    let f = a.field();
    let cols: Vec<Vec<FqElement>> = (0..a.dim()).map(|i| a.pth_power(&a.basis(i))).collect();
    let power = FqMatrix::from_columns(a.dim(), &cols);
    let minus_one = FqMatrix::identity(a.dim()).map_entries(|c| f.neg(c));
    linearized_kernel(f, a.dim(), &[(1, &power), (0, &minus_one)])
}

fn proper_split(b: &PPolarAlgebra, e: &[FqElement]) -> Result<Option<Split>> {
    let split = split_once(b, e)?;
    Ok((split.image.dim() < b.dim()).then_some(split))
}

/// Tries `y` = basis vectors, then seeded random elements, and every root
/// in the 𝔽_p-basis of the root space, until `e` is not a unity. Falls back
/// to the full fixed-point space of Frobenius.
fn split_step(b: &PPolarAlgebra) -> Result<Step> {
    let f = b.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut candidates: Vec<Vec<FqElement>> = (0..b.dim()).map(|i| b.basis(i)).collect();
    for _ in 0..RANDOM_CANDIDATES {
        let y = random_vector(&mut rng, &f, b.dim());
        if !is_zero(&y) {
            candidates.push(y);
        }
    }
    for y in &candidates {
        let rel = power_relation(b, y)?;
        let coeffs = additive_polynomial(&f, &rel.alphas);
        let roots = nonzero_roots(&f, &coeffs)?;
        if roots.is_empty() {
            return Ok(Step::Extend(root_extension_degree(&f, &coeffs)?));
        }
        for &beta in &roots {
            let e = idempotent_from_root(&f, &rel, beta);
            if is_zero(&e) || b.pth_power(&e) != e {
                return Err(Error::Internal(
                    "constructed element is not a nonzero idempotent".into(),
                ));
            }
            if b.dim() == 1 {
                return Ok(Step::Unit(e));
            }
            if let Some(split) = proper_split(b, &e)? {
                return Ok(Step::Split(split));
            }
        }
    }
    for e in fixed_points(b)? {
        if let Some(split) = proper_split(b, &e)? {
            return Ok(Step::Split(split));
        }
    }
    // a single Frobenius orbit of geometric points
    Ok(Step::Extend(b.dim() as u32))
}

/// `A/Nil(A) ⊗ 𝔽_{q^m} ≅ Π 𝔽_{q^m} e_t` with `e_t^p = e_t`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub base_field: Arc<FqField>,
    pub field: Arc<FqField>,
    pub extension_degree: u32,
    pub nilradical_dim: usize,
    /// `A → A/Nil(A)` over the base field
    pub projection: FqMatrix,
    /// idempotents, in coordinates of `A/Nil(A) ⊗ 𝔽_{q^m}`
    pub factors: Vec<Vec<FqElement>>,
    /// factor `t` is sent to factor `perm[t]` by the q-power Frobenius
    pub frobenius_permutation: Vec<usize>,
    /// columns are the factors
    pub change_of_basis: FqMatrix,
}

struct State {
    ext: PPolarAlgebra,
    emb: FieldEmbedding,
    pending: Vec<Subspace>,
    factors: Vec<Vec<FqElement>>,
}

impl State {
    fn extend(&mut self, d: u32) -> Result<()> {
        let small = self.ext.field().clone();
        let big = FqField::new(small.p(), small.degree() * d)?;
        let step = FieldEmbedding::new(small, big.clone())?;
        let dim = self.ext.dim();
        self.ext = self.ext.base_change(&step)?;
        self.emb = self.emb.then(&step)?;
        for s in self.pending.iter_mut() {
            let vs: Vec<Vec<FqElement>> = s.basis().iter().map(|v| step.apply_vec(v)).collect();
            *s = Subspace::span(&big, dim, &vs);
        }
        for e in self.factors.iter_mut() {
            *e = step.apply_vec(e);
        }
        Ok(())
    }
}

fn lift(f: &FqField, sub: &Subspace, ambient: usize, v: &[FqElement]) -> Vec<FqElement> {
    let mut out = vec![FqElement::ZERO; ambient];
    for (c, b) in v.iter().zip(sub.basis()) {
        f.vaxpy(&mut out, *c, b);
    }
    out
}

/// Factors are only determined up to 𝔽_p^×. Each orbit is rebuilt from its
/// least member by the q-power Frobenius so that it permutes them exactly.
fn frobenius_orbits(
    field: &FqField,
    q_degree: u32,
    found: Vec<Vec<FqElement>>,
) -> Result<(Vec<Vec<FqElement>>, Vec<usize>)> {
    let p = field.p();
    let proportional =
        |a: &[FqElement], b: &[FqElement]| (1..p).any(|c| field.vscale(FqElement(c), a) == b);
    let mut factors: Vec<Option<Vec<FqElement>>> = vec![None; found.len()];
    let mut perm = vec![usize::MAX; found.len()];
    for start in 0..found.len() {
        if factors[start].is_some() {
            continue;
        }
        let mut cur = (start, found[start].clone());
        loop {
            factors[cur.0] = Some(cur.1.clone());
            let next = field.vfrob(&cur.1, q_degree as i64);
            let t = found
                .iter()
                .position(|e| proportional(e, &next))
                .ok_or_else(|| Error::Internal("Frobenius does not permute the factors".into()))?;
            perm[cur.0] = t;
            if t == start {
                if factors[start].as_deref() != Some(next.as_slice()) {
                    return Err(Error::Internal("Frobenius orbit does not close".into()));
                }
                break;
            }
            if factors[t].is_some() {
                return Err(Error::Internal(
                    "Frobenius does not permute the factors".into(),
                ));
            }
            cur = (t, next);
        }
    }
    Ok((
        factors
            .into_iter()
            .map(|e| e.expect("every orbit visited"))
            .collect(),
        perm,
    ))
}

pub fn decompose(a: &PPolarAlgebra) -> Result<Decomposition> {
    let nil = nilradical(a);
    let q = quotient(a, &nil)?;
    let r = q.algebra;
    let dim = r.dim();
    let base = a.field().clone();
    let mut st = State {
        emb: FieldEmbedding::identity(base.clone()),
        pending: if dim > 0 {
            vec![Subspace::full(dim)]
        } else {
            vec![]
        },
        ext: r,
        factors: Vec::new(),
    };
    while let Some(sub) = st.pending.pop() {
        let b = restrict(&st.ext, &sub)?;
        let f = st.ext.field().clone();
        match split_step(&b)? {
            Step::Extend(d) => {
                st.pending.push(sub);
                st.extend(d)?;
            }
            Step::Unit(e) => st.factors.push(lift(&f, &sub, dim, &e)),
            Step::Split(s) => {
                for part in [&s.kernel, &s.image] {
                    let vs: Vec<Vec<FqElement>> = part
                        .basis()
                        .iter()
                        .map(|v| lift(&f, &sub, dim, v))
                        .collect();
                    st.pending.push(Subspace::span(&f, dim, &vs));
                }
            }
        }
    }
    let field = st.ext.field().clone();
    let mut found = st.factors;
    found.sort();
    let (factors, frobenius_permutation) = frobenius_orbits(&field, base.degree(), found)?;
    let change_of_basis = FqMatrix::from_columns(dim, &factors);
    if change_of_basis.rank(&field) != dim {
        return Err(Error::Internal(
            "factors do not span the reduced algebra".into(),
        ));
    }
    Ok(Decomposition {
        extension_degree: field.degree() / base.degree(),
        base_field: base,
        field,
        nilradical_dim: nil.dim(),
        projection: q.projection,
        factors,
        frobenius_permutation,
        change_of_basis,
    })
}

impl Decomposition {
    pub fn count(&self) -> usize {
        self.factors.len()
    }

    /// Orbits of the Frobenius permutation, each listed from its least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.frobenius_permutation.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut t = self.frobenius_permutation[start];
            while t != start {
                seen[t] = true;
                cycle.push(t);
                t = self.frobenius_permutation[t];
            }
            out.push(cycle);
        }
        out
    }

    /// One-line cycle notation, e.g. `(0 1)(2)`; `()` when there are no factors.
    pub fn cycle_notation(&self) -> String {
        let orbits = self.orbits();
        if orbits.is_empty() {
            return "()".into();
        }
        orbits
            .iter()
            .map(|c| {
                let parts: Vec<String> = c.iter().map(|i| i.to_string()).collect();
                format!("({})", parts.join(" "))
            })
            .collect()
    }

    pub fn to_json(&self) -> DecompositionJson {
        let f = &self.field;
        let enc = |v: &[FqElement]| -> Vec<Vec<u32>> { v.iter().map(|&c| f.coords(c)).collect() };
        DecompositionJson {
            base_field: self.base_field.to_json(),
            field: f.to_json(),
            extension_degree: self.extension_degree,
            nilradical_dim: self.nilradical_dim,
            count: self.count(),
            factors: self.factors.iter().map(|e| enc(e)).collect(),
            frobenius_permutation: self.frobenius_permutation.clone(),
            cycles: self.cycle_notation(),
            change_of_basis: self
                .change_of_basis
                .to_rows()
                .iter()
                .map(|r| enc(r))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub base_field: FieldJson,
    pub field: FieldJson,
    pub extension_degree: u32,
    pub nilradical_dim: usize,
    pub count: usize,
    pub factors: Vec<Vec<Vec<u32>>>,
    pub frobenius_permutation: Vec<usize>,
    pub cycles: String,
    pub change_of_basis: Vec<Vec<Vec<u32>>>,
}

/// Number of geometric points and their Frobenius orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricPoints {
    pub count: usize,
    pub orbits: Vec<Vec<usize>>,
}

pub fn geometric_points(a: &PPolarAlgebra) -> Result<GeometricPoints> {
    let d = decompose(a)?;
    Ok(GeometricPoints {
        count: d.count(),
        orbits: d.orbits(),
    })
}

/// Whether a row vector is a p-polar morphism `k^n → k` of split algebras:
/// zero, or a single nonzero entry lying in 𝔽_p.
pub fn hom_check(f: &FqField, v: &[FqElement]) -> bool {
    let nonzero: Vec<&FqElement> = v.iter().filter(|c| !c.is_zero()).collect();
    match nonzero.as_slice() {
        [] => true,
        [&a] => f.is_in_prime_field(a),
        _ => false,
    }
}

/// The matrix with every nonzero entry replaced by 1.
pub fn phi_matrix(f: &FqField, m: &FqMatrix) -> Result<Vec<Vec<u8>>> {
    (0..m.rows())
        .map(|i| {
            if !hom_check(f, m.row(i)) {
                return Err(Error::NotAMorphism(i));
            }
            Ok(m.row(i).iter().map(|c| u8::from(!c.is_zero())).collect())
        })
        .collect()
}

/// `pol(k^n)` in its idempotent basis.
pub fn split_algebra(f: &Arc<FqField>, n: usize) -> PPolarAlgebra {
    PPolarAlgebra::polarize(&crate::ppolar::CommAlgebra::product_of_fields(f.clone(), n))
        .expect("products of fields are p-polar")
}
