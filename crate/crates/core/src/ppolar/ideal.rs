use crate::error::{Error, Result};
use crate::gfq::{span_basis, FqElement, FqField, FqMatrix};

use super::algebra::{multisets, PPolarAlgebra};

/// Subspace of 𝔽_q^n held as a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<FqElement>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: FqMatrix::identity(ambient).to_rows(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(f: &FqField, ambient: usize, vectors: &[Vec<FqElement>]) -> Self {
        let basis: Vec<Vec<FqElement>> = span_basis(f, ambient, vectors)
            .into_iter()
            .filter(|v| v.iter().any(|c| !c.is_zero()))
            .collect();
        let pivots = basis
            .iter()
            .map(|v| v.iter().position(|c| !c.is_zero()).expect("nonzero row"))
            .collect();
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<FqElement>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its echelon reduction against the basis.
    pub fn reduce(&self, f: &FqField, v: &[FqElement]) -> Vec<FqElement> {
        let mut r = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = r[pc];
            if !c.is_zero() {
                f.vaxpy(&mut r, f.neg(c), row);
            }
        }
        r
    }

    pub fn contains(&self, f: &FqField, v: &[FqElement]) -> bool {
        self.reduce(f, v).iter().all(|c| c.is_zero())
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, f: &FqField, v: &[FqElement]) -> Option<Vec<FqElement>> {
        self.contains(f, v)
            .then(|| self.pivots.iter().map(|&pc| v[pc]).collect())
    }

    pub fn is_subspace_of(&self, f: &FqField, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(f, v))
    }

    pub fn sum(&self, f: &FqField, other: &Subspace) -> Subspace {
        let all: Vec<Vec<FqElement>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(f, self.ambient, &all)
    }

    /// Matrix whose columns are the basis vectors.
    pub fn inclusion(&self) -> FqMatrix {
        FqMatrix::from_columns(self.ambient, &self.basis)
    }
}

/// Subspace closed under `μ(a_1, …, a_{p−1}, −)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarIdeal {
    space: Subspace,
}

impl PolarIdeal {
    /// Validates closure of `space` under multiplication by the algebra.
    pub fn new(a: &PPolarAlgebra, space: Subspace) -> Result<Self> {
        if space.ambient() != a.dim() {
            return Err(Error::LengthMismatch(space.ambient(), a.dim()));
        }
        if let Some(v) = products_with(a, &space)
            .into_iter()
            .find(|v| !space.contains(a.field(), v))
        {
            return Err(Error::Invalid(format!(
                "subspace is not an ideal: {} escapes",
                show(a, &v)
            )));
        }
        Ok(PolarIdeal { space })
    }

    pub fn zero(a: &PPolarAlgebra) -> Self {
        PolarIdeal {
            space: Subspace::zero(a.dim()),
        }
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.space.is_zero()
    }

    pub fn basis(&self) -> &[Vec<FqElement>] {
        self.space.basis()
    }

    pub fn contains(&self, a: &PPolarAlgebra, v: &[FqElement]) -> bool {
        self.space.contains(a.field(), v)
    }
}

fn show(a: &PPolarAlgebra, v: &[FqElement]) -> String {
    let parts: Vec<String> = v.iter().map(|&c| a.field().show(c)).collect();
    format!("({})", parts.join(", "))
}

/// `μ(e_{j_1}, …, e_{j_{p−1}}, b)` over basis multisets and basis vectors `b`.
fn products_with(a: &PPolarAlgebra, space: &Subspace) -> Vec<Vec<FqElement>> {
    let p = a.p() as usize;
    let outer = multisets(a.dim(), p - 1);
    let basis: Vec<Vec<FqElement>> = (0..a.dim()).map(|i| a.basis(i)).collect();
    let mut out = Vec::new();
    for b in space.basis() {
        for m in &outer {
            let mut args: Vec<&[FqElement]> = m.iter().map(|&i| basis[i].as_slice()).collect();
            args.push(b);
            out.push(a.mu(&args).expect("p arguments"));
        }
    }
    out
}

/// The smallest ideal containing `generators`, by saturation.
pub fn ideal_generated(a: &PPolarAlgebra, generators: &[Vec<FqElement>]) -> PolarIdeal {
    let f = a.field();
    let mut space = Subspace::span(f, a.dim(), generators);
    loop {
        let before = space.dim();
        let new = products_with(a, &space);
        space = space.sum(f, &Subspace::span(f, a.dim(), &new));
        if space.dim() == before {
            return PolarIdeal { space };
        }
    }
}

/// `I^p = ⟨μ(I, …, I)⟩`.
pub fn ideal_power(a: &PPolarAlgebra, ideal: &PolarIdeal) -> PolarIdeal {
    let basis = ideal.basis();
    let products: Vec<Vec<FqElement>> = multisets(basis.len(), a.p() as usize)
        .into_iter()
        .map(|m| {
            let args: Vec<&[FqElement]> = m.iter().map(|&i| basis[i].as_slice()).collect();
            a.mu(&args).expect("p arguments")
        })
        .collect();
    let space = Subspace::span(a.field(), a.dim(), &products);
    debug_assert!(PolarIdeal::new(a, space.clone()).is_ok());
    PolarIdeal { space }
}

/// Whether the `s`-fold iterate of `I ↦ I^p` vanishes.
pub fn ideal_power_nilpotent(a: &PPolarAlgebra, ideal: &PolarIdeal, s: u32) -> bool {
    let mut cur = ideal.clone();
    for _ in 0..s {
        if cur.is_zero() {
            return true;
        }
        cur = ideal_power(a, &cur);
    }
    cur.is_zero()
}

/// Smallest `s` with `I^{p^s} = 0`, if the chain of powers reaches zero.
pub fn nilpotency_index(a: &PPolarAlgebra, ideal: &PolarIdeal) -> Option<u32> {
    let mut cur = ideal.clone();
    for s in 0..=a.dim() as u32 {
        if cur.is_zero() {
            return Some(s);
        }
        let next = ideal_power(a, &cur);
        if next.dim() == cur.dim() {
            return None;
        }
        cur = next;
    }
    None
}

/// Matrix of `x ↦ x^{p^k}` restricted to basis vectors: column `j` is
/// `e_j^{p^k}`. The map itself is `v ↦ M · v^{(p^k)}`.
pub fn iterated_power_matrix(a: &PPolarAlgebra, k: u32) -> FqMatrix {
    let cols: Vec<Vec<FqElement>> = (0..a.dim())
        .map(|j| {
            let mut v = a.basis(j);
            for _ in 0..k {
                v = a.pth_power(&v);
            }
            v
        })
        .collect();
    FqMatrix::from_columns(a.dim(), &cols)
}

/// `{x : x^{p^N} = 0 for some N}`, as the kernel of the `dim`-fold iterate
/// of the p-th power map.
pub fn nilradical(a: &PPolarAlgebra) -> PolarIdeal {
    let f = a.field();
    let d = a.dim() as u32;
    let m = iterated_power_matrix(a, d);
    let ker: Vec<Vec<FqElement>> = m
        .kernel(f)
        .into_iter()
        .map(|v| f.vfrob(&v, -(d as i64)))
        .collect();
    PolarIdeal {
        space: Subspace::span(f, a.dim(), &ker),
    }
}

pub fn is_reduced(a: &PPolarAlgebra) -> bool {
    nilradical(a).is_zero()
}

/// `A/I` on the complement spanned by the non-pivot standard basis vectors,
/// with the projection `A → A/I` and the section `A/I → A` as matrices.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: PPolarAlgebra,
    pub projection: FqMatrix,
    pub section: FqMatrix,
}

pub fn quotient(a: &PPolarAlgebra, ideal: &PolarIdeal) -> Result<Quotient> {
    let f = a.field();
    let d = a.dim();
    let pivots = ideal.space().pivots();
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let dq = free.len();
    let project = |v: &[FqElement]| -> Vec<FqElement> {
        let r = ideal.space().reduce(f, v);
        free.iter().map(|&c| r[c]).collect()
    };
    let mut projection = FqMatrix::zeros(dq, d);
    for j in 0..d {
        for (i, x) in project(&a.basis(j)).into_iter().enumerate() {
            projection.set(i, j, x);
        }
    }
    let section = FqMatrix::from_columns(d, &free.iter().map(|&c| a.basis(c)).collect::<Vec<_>>());
    let entries: Vec<_> = multisets(dq, a.p() as usize)
        .into_iter()
        .map(|m| {
            let idx: Vec<usize> = m.iter().map(|&i| free[i]).collect();
            (m, project(&a.mu_basis(&idx)))
        })
        .collect();
    let algebra = PPolarAlgebra::from_structure(f.clone(), dq, entries)?;
    Ok(Quotient {
        algebra,
        projection,
        section,
    })
}

/// The induced structure on a μ-closed subspace, in its echelon basis.
pub fn restrict(a: &PPolarAlgebra, sub: &Subspace) -> Result<PPolarAlgebra> {
    let f = a.field();
    let basis = sub.basis();
    let entries = multisets(basis.len(), a.p() as usize)
        .into_iter()
        .map(|m| {
            let args: Vec<&[FqElement]> = m.iter().map(|&i| basis[i].as_slice()).collect();
            let v = a.mu(&args)?;
            let c = sub
                .coordinates(f, &v)
                .ok_or_else(|| Error::Invalid("subspace is not closed under the product".into()))?;
            Ok((m, c))
        })
        .collect::<Result<Vec<_>>>()?;
    PPolarAlgebra::from_structure(f.clone(), basis.len(), entries)
}
