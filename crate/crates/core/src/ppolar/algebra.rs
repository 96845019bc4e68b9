use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::comm::{element_from_json, CommAlgebra, EntryJson};
use crate::error::{Error, Result};
use crate::gfq::{FieldEmbedding, FieldJson, FqElement, FqField, FqMatrix};

/// All sorted multisets of size `k` drawn from `0..d`, in lexicographic order.
pub fn multisets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(d: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            go(d, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Finite-dimensional p-polar algebra over 𝔽_q: a symmetric p-linear
/// `μ: A^p → A` stored on sorted index multisets and expanded to a dense
/// tensor for evaluation.
#[derive(Clone, Debug)]
pub struct PPolarAlgebra {
    p: u32,
    field: Arc<FqField>,
    dim: usize,
    mu: BTreeMap<Vec<usize>, Vec<FqElement>>,
    /// dense[Σ_k i_k d^k] = μ(e_{i_0}, …, e_{i_{p−1}}), empty when zero
    dense: Vec<Vec<FqElement>>,
}

impl PartialEq for PPolarAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.field == other.field
            && self.dim == other.dim
            && self.mu == other.mu
    }
}

impl Eq for PPolarAlgebra {}

/// A pair of orderings of the same `2p − 1` basis indices on which the
/// nested product `μ(μ(first p), last p − 1)` differs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocWitness {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub left_value: Vec<FqElement>,
    pub right_value: Vec<FqElement>,
}

impl PPolarAlgebra {
    /// Builds from sparse structure constants keyed by multisets (unsorted
    /// keys are sorted; absent keys are zero). Does not check (ASSOC).
    pub fn from_structure(
        field: Arc<FqField>,
        dim: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Vec<FqElement>)>,
    ) -> Result<Self> {
        let p = field.p();
        let mut mu = BTreeMap::new();
        for (mut idx, val) in entries {
            if idx.len() != p as usize || idx.iter().any(|&i| i >= dim) || val.len() != dim {
                return Err(Error::Invalid(format!("bad structure constant at {idx:?}")));
            }
            idx.sort_unstable();
            if val.iter().any(|x| !x.is_zero()) {
                mu.insert(idx, val);
            }
        }
        let size = dim.pow(p);
        let mut dense = vec![Vec::new(); size];
        for (flat, slot) in dense.iter_mut().enumerate() {
            let mut idx = Vec::with_capacity(p as usize);
            let mut r = flat;
            for _ in 0..p {
                idx.push(r % dim);
                r /= dim;
            }
            idx.sort_unstable();
            if let Some(v) = mu.get(&idx) {
                *slot = v.clone();
            }
        }
        Ok(PPolarAlgebra {
            p,
            field,
            dim,
            mu,
            dense,
        })
    }

    /// The algebra with `μ = 0`.
    pub fn trivial(field: Arc<FqField>, dim: usize) -> Self {
        Self::from_structure(field, dim, []).expect("empty structure is valid")
    }

    /// `pol(R)`: restriction of the product of `R` to p-fold products.
    pub fn polarize(r: &CommAlgebra) -> Result<Self> {
        let field = r.field().clone();
        let p = field.p() as usize;
        let d = r.dim();
        let entries = multisets(d, p).into_iter().map(|idx| {
            let mut acc = r.basis(idx[0]);
            for &i in &idx[1..] {
                acc = r.mul(&acc, &r.basis(i));
            }
            (idx, acc)
        });
        let a = Self::from_structure(field, d, entries.collect::<Vec<_>>())?;
        if let Some(w) = a.check_assoc() {
            return Err(Error::Invalid(format!(
                "polarization fails (ASSOC) at {:?} / {:?}",
                w.left, w.right
            )));
        }
        Ok(a)
    }

    /// Truncated free polar algebra `k[x]_(j)`: basis `x^{j(1+(p−1)i)}` of
    /// degree at most `max_degree`, products beyond it set to zero.
    pub fn free_polar_truncated(field: Arc<FqField>, j: u32, max_degree: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::Invalid("j must be positive".into()));
        }
        let p = field.p();
        let degs: Vec<u32> = (0..)
            .map(|i| j * (1 + (p - 1) * i))
            .take_while(|&e| e <= max_degree)
            .collect();
        let d = degs.len();
        let entries: Vec<_> = multisets(d, p as usize)
            .into_iter()
            .filter_map(|idx| {
                let e: u32 = idx.iter().map(|&i| degs[i]).sum();
                degs.iter().position(|&x| x == e).map(|k| {
                    let mut v = vec![FqElement::ZERO; d];
                    v[k] = FqElement::ONE;
                    (idx, v)
                })
            })
            .collect();
        Self::from_structure(field, d, entries)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zero(&self) -> Vec<FqElement> {
        vec![FqElement::ZERO; self.dim]
    }

    pub fn basis(&self, i: usize) -> Vec<FqElement> {
        let mut v = self.zero();
        v[i] = FqElement::ONE;
        v
    }

    /// Nonzero structure constants in multiset order.
    pub fn structure(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<FqElement>)> {
        self.mu.iter()
    }

    /// `μ(e_{i_1}, …, e_{i_p})` for any ordering of the indices.
    pub fn mu_basis(&self, idx: &[usize]) -> Vec<FqElement> {
        let flat = idx.iter().rev().fold(0, |acc, &i| acc * self.dim + i);
        let v = &self.dense[flat];
        if v.is_empty() {
            self.zero()
        } else {
            v.clone()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.mu.is_empty()
    }

    /// `μ(x_1, …, x_p)`, expanded multilinearly over the supports.
    pub fn mu(&self, xs: &[&[FqElement]]) -> Result<Vec<FqElement>> {
        if xs.len() != self.p as usize {
            return Err(Error::LengthMismatch(xs.len(), self.p as usize));
        }
        if let Some(x) = xs.iter().find(|x| x.len() != self.dim) {
            return Err(Error::LengthMismatch(x.len(), self.dim));
        }
        Ok(self.mu_unchecked(xs))
    }

    fn mu_unchecked(&self, xs: &[&[FqElement]]) -> Vec<FqElement> {
        let f = &self.field;
        let d = self.dim;
        let mut out = self.zero();
        if self.mu.is_empty() || xs.iter().any(|x| x.iter().all(|c| c.is_zero())) {
            return out;
        }
        // enumerate index tuples over the supports, accumulating coefficients
        let supports: Vec<Vec<(usize, FqElement)>> = xs
            .iter()
            .map(|x| {
                x.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, &c)| (i, c))
                    .collect()
            })
            .collect();
        let mut stack: Vec<(usize, usize, FqElement)> = vec![(0, 0, FqElement::ONE)];
        // (depth, flat index prefix weighted, coefficient)
        let strides: Vec<usize> = (0..xs.len()).map(|k| d.pow(k as u32)).collect();
        while let Some((depth, flat, coeff)) = stack.pop() {
            if depth == xs.len() {
                let v = &self.dense[flat];
                if !v.is_empty() {
                    f.vaxpy(&mut out, coeff, v);
                }
                continue;
            }
            for &(i, c) in &supports[depth] {
                stack.push((depth + 1, flat + i * strides[depth], f.mul(coeff, c)));
            }
        }
        out
    }

    /// The unique product of `n ≡ 1 (mod p − 1)` elements, by the
    /// left-associative scheme `μ(…μ(μ(x_1..x_p), x_{p+1}..x_{2p−1})…)`.
    pub fn mu_eval(&self, xs: &[&[FqElement]]) -> Result<Vec<FqElement>> {
        let p = self.p as usize;
        if xs.is_empty() || (xs.len() - 1) % (p - 1) != 0 {
            return Err(Error::LengthNotAdmissible {
                len: xs.len(),
                p: self.p,
            });
        }
        if let Some(x) = xs.iter().find(|x| x.len() != self.dim) {
            return Err(Error::LengthMismatch(x.len(), self.dim));
        }
        let mut acc = xs[0].to_vec();
        for chunk in xs[1..].chunks(p - 1) {
            let mut args: Vec<&[FqElement]> = Vec::with_capacity(p);
            args.push(&acc);
            args.extend_from_slice(chunk);
            acc = self.mu_unchecked(&args);
        }
        Ok(acc)
    }

    /// `x^p = μ(x, …, x)`; additive and Frobenius-semilinear.
    pub fn pth_power(&self, x: &[FqElement]) -> Vec<FqElement> {
        let args = vec![x; self.p as usize];
        self.mu_unchecked(&args)
    }

    /// `x^{1 + i(p−1)}` for `i ≥ 0`.
    pub fn polar_power(&self, x: &[FqElement], i: usize) -> Vec<FqElement> {
        let args = vec![x; 1 + i * (self.p as usize - 1)];
        self.mu_eval(&args).expect("admissible length")
    }

    /// Checks (ASSOC) on basis tuples: for every multiset of `2p − 1` indices
    /// the nested product must not depend on which `p − 1` of them sit in the
    /// outer call. Returns the first failing pair.
    pub fn check_assoc(&self) -> Option<AssocWitness> {
        let p = self.p as usize;
        for m in multisets(self.dim, 2 * p - 1) {
            let mut reference: Option<(Vec<usize>, Vec<FqElement>)> = None;
            for outer in sub_multisets(&m, p - 1) {
                let inner = multiset_difference(&m, &outer);
                let first = self.mu_basis(&inner);
                let mut args: Vec<Vec<FqElement>> = vec![first];
                args.extend(outer.iter().map(|&i| self.basis(i)));
                let refs: Vec<&[FqElement]> = args.iter().map(Vec::as_slice).collect();
                let value = self.mu_unchecked(&refs);
                let order: Vec<usize> = inner.iter().chain(&outer).copied().collect();
                match &reference {
                    None => reference = Some((order, value)),
                    Some((ref_order, ref_value)) if *ref_value != value => {
                        return Some(AssocWitness {
                            left: ref_order.clone(),
                            right: order,
                            left_value: ref_value.clone(),
                            right_value: value,
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        None
    }

    /// The same structure constants over `𝔽_{q^m}`, together with the field
    /// embedding used. The `q`-power Frobenius of the extension acts on
    /// coordinates in this basis entrywise.
    pub fn extend_scalars(&self, m: u32) -> Result<(PPolarAlgebra, FieldEmbedding)> {
        if m == 1 {
            return Ok((self.clone(), FieldEmbedding::identity(self.field.clone())));
        }
        let big = FqField::new(self.p, self.field.degree() * m)?;
        let emb = FieldEmbedding::new(self.field.clone(), big.clone())?;
        let ext = self.base_change(&emb)?;
        Ok((ext, emb))
    }

    /// Structure constants pushed along a field embedding.
    pub fn base_change(&self, emb: &FieldEmbedding) -> Result<PPolarAlgebra> {
        if *emb.small != *self.field {
            return Err(Error::Invalid(
                "embedding does not start at the base field".into(),
            ));
        }
        Self::from_structure(
            emb.large.clone(),
            self.dim,
            self.mu
                .iter()
                .map(|(k, v)| (k.clone(), emb.apply_vec(v)))
                .collect::<Vec<_>>(),
        )
    }

    /// Transports the structure along an invertible change of basis: the new
    /// basis vectors are the columns of `basis` (old coordinates).
    pub fn change_basis(&self, basis: &FqMatrix) -> Result<PPolarAlgebra> {
        let f = &self.field;
        let inv = basis.inverse(f)?;
        let cols: Vec<Vec<FqElement>> = (0..self.dim).map(|j| basis.column(j)).collect();
        let entries: Vec<_> = multisets(self.dim, self.p as usize)
            .into_iter()
            .map(|idx| {
                let args: Vec<&[FqElement]> = idx.iter().map(|&i| cols[i].as_slice()).collect();
                let v = self.mu_unchecked(&args);
                (idx, inv.apply(f, &v))
            })
            .collect();
        Self::from_structure(f.clone(), self.dim, entries)
    }

    /// Whether the linear map with matrix `m` (columns = images of basis
    /// vectors of `self`) commutes with μ.
    pub fn is_morphism_to(&self, target: &PPolarAlgebra, m: &FqMatrix) -> bool {
        if m.cols() != self.dim || m.rows() != target.dim || self.field != target.field {
            return false;
        }
        let f = &self.field;
        let images: Vec<Vec<FqElement>> = (0..self.dim).map(|j| m.column(j)).collect();
        multisets(self.dim, self.p as usize).into_iter().all(|idx| {
            let args: Vec<&[FqElement]> = idx.iter().map(|&i| images[i].as_slice()).collect();
            target.mu_unchecked(&args) == m.apply(f, &self.mu_basis(&idx))
        })
    }

    pub fn to_json(&self) -> PPolarJson {
        PPolarJson {
            p: self.p,
            field: self.field.to_json(),
            dim: self.dim,
            mu: self
                .mu
                .iter()
                .map(|(k, v)| EntryJson {
                    idx: k.clone(),
                    val: v.iter().map(|&x| self.field.coords(x)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PPolarJson) -> Result<Self> {
        let field = FqField::from_json(&j.field)?;
        if field.p() != j.p {
            return Err(Error::Invalid(format!(
                "p = {} does not match the field characteristic {}",
                j.p,
                field.p()
            )));
        }
        let entries =
            j.mu.iter()
                .map(|e| {
                    let v = e
                        .val
                        .iter()
                        .map(|c| element_from_json(&field, c))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((e.idx.clone(), v))
                })
                .collect::<Result<Vec<_>>>()?;
        Self::from_structure(field, j.dim, entries)
    }
}

/// Wire form `{"p": 3, "field": {...}, "dim": 2, "mu": [{"idx": [0,0,0], "val": [...]}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PPolarJson {
    pub p: u32,
    pub field: FieldJson,
    pub dim: usize,
    pub mu: Vec<EntryJson>,
}

/// All sub-multisets of size `k` of the sorted multiset `m`, without repeats.
fn sub_multisets(m: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &i in m {
        match counts.last_mut() {
            Some((j, c)) if *j == i => *c += 1,
            _ => counts.push((i, 1)),
        }
    }
    fn go(counts: &[(usize, usize)], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        let Some(((i, c), rest)) = counts.split_first() else {
            return;
        };
        for take in (0..=(*c).min(k)).rev() {
            cur.extend(std::iter::repeat(*i).take(take));
            go(rest, k - take, cur, out);
            cur.truncate(cur.len() - take);
        }
    }
    let mut out = Vec::new();
    go(&counts, k, &mut Vec::new(), &mut out);
    out
}

fn multiset_difference(m: &[usize], s: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.len() - s.len());
    let mut j = 0;
    for &x in m {
        if j < s.len() && s[j] == x {
            j += 1;
        } else {
            out.push(x);
        }
    }
    out
}

/// Monomial of the free p-polar ring, as a sorted multiset of generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolarMonomial(pub Vec<usize>);

impl PolarMonomial {
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self, vars: usize) -> Vec<u32> {
        let mut e = vec![0; vars];
        for &i in &self.0 {
            e[i] += 1;
        }
        e
    }
}

/// Monomials in `vars` generators of degree `1 + i(p − 1)` for
/// `i = 0..=max_blocks`, graded, lexicographic within a degree.
pub fn free_polar_basis(p: u32, vars: usize, max_blocks: usize) -> Vec<PolarMonomial> {
    (0..=max_blocks)
        .flat_map(|i| multisets(vars, 1 + i * (p as usize - 1)))
        .map(PolarMonomial)
        .collect()
}
