use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::carry::witt_sum;
use super::eval::evaluators;
use crate::error::{Error, Result};
use crate::gfq::{FqElement, FqField, FqMatrix};
use crate::ppolar::{CommAlgebra, PPolarAlgebra, PPolarJson};
use crate::wittuniv::WittKind;

/// `pol(𝔽_q)`, the algebra over which W(𝔽_q)-scalars are Witt vectors.
pub fn base_algebra(field: &Arc<FqField>) -> Arc<PPolarAlgebra> {
    Arc::new(
        PPolarAlgebra::polarize(&CommAlgebra::product_of_fields(field.clone(), 1))
            .expect("a field is p-polar"),
    )
}

/// Element of `W_n(A) = A^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    algebra: Arc<PPolarAlgebra>,
    coords: Vec<Vec<FqElement>>,
}

impl WittVector {
    pub fn new(algebra: Arc<PPolarAlgebra>, coords: Vec<Vec<FqElement>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("Witt vectors have length at least 1".into()));
        }
        if let Some(c) = coords.iter().find(|c| c.len() != algebra.dim()) {
            return Err(Error::LengthMismatch(c.len(), algebra.dim()));
        }
        Ok(WittVector { algebra, coords })
    }

    pub fn zero(algebra: Arc<PPolarAlgebra>, n: usize) -> Self {
        let coords = vec![algebra.zero(); n.max(1)];
        WittVector { algebra, coords }
    }

    /// `(a, 0, …, 0)`.
    pub fn teichmuller(algebra: Arc<PPolarAlgebra>, a: &[FqElement], n: usize) -> Result<Self> {
        let mut coords = vec![algebra.zero(); n.max(1)];
        if a.len() != algebra.dim() {
            return Err(Error::LengthMismatch(a.len(), algebra.dim()));
        }
        coords[0] = a.to_vec();
        Ok(WittVector { algebra, coords })
    }

    /// A W(𝔽_q)-scalar given by its coordinates in 𝔽_q.
    pub fn scalar(field: &Arc<FqField>, coords: &[FqElement]) -> Result<Self> {
        WittVector::new(
            base_algebra(field),
            coords.iter().map(|&c| vec![c]).collect(),
        )
    }

    /// The integer `k` as a W(𝔽_q)-scalar of length `n`.
    pub fn integer(field: &Arc<FqField>, k: i64, n: usize) -> Result<Self> {
        let one = WittVector::teichmuller(base_algebra(field), &[FqElement::ONE], n)?;
        one.multiple(k)
    }

    pub fn algebra(&self) -> &Arc<PPolarAlgebra> {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coords(&self) -> &[Vec<FqElement>] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &[FqElement] {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().flatten().all(|c| c.is_zero())
    }

    fn field(&self) -> &Arc<FqField> {
        self.algebra.field()
    }

    fn check_compatible(&self, other: &WittVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        if !Arc::ptr_eq(&self.algebra, &other.algebra) && self.algebra != other.algebra {
            return Err(Error::Invalid(
                "Witt vectors over different algebras".into(),
            ));
        }
        Ok(())
    }

    fn with_coords(&self, coords: Vec<Vec<FqElement>>) -> WittVector {
        WittVector {
            algebra: self.algebra.clone(),
            coords,
        }
    }

    fn apply(
        &self,
        kind: WittKind,
        blocks: &[&[Vec<FqElement>]],
        scalars: &[FqElement],
        n: usize,
    ) -> Result<WittVector> {
        let p = self.algebra.p();
        let evs = evaluators(p, n, kind)?;
        let coords = evs
            .iter()
            .map(|e| e.eval(&self.algebra, blocks, scalars))
            .collect();
        Ok(self.with_coords(coords))
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.check_compatible(other)?;
        self.apply(
            WittKind::Sum,
            &[&self.coords, &other.coords],
            &[],
            self.len(),
        )
    }

    /// Addition by Teichmüller carries; valid for any length.
    pub fn add_by_carries(&self, other: &WittVector) -> Result<WittVector> {
        self.check_compatible(other)?;
        let coords = witt_sum(&self.algebra, &[&self.coords, &other.coords])?;
        Ok(self.with_coords(coords))
    }

    pub fn neg(&self) -> WittVector {
        self.apply(WittKind::Neg, &[&self.coords], &[], self.len())
            .expect("negation polynomials exist for every length")
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector> {
        self.add(&other.neg())
    }

    /// `k · x` for an integer `k`.
    pub fn multiple(&self, k: i64) -> Result<WittVector> {
        let base = if k < 0 { self.neg() } else { self.clone() };
        let mut acc = WittVector::zero(self.algebra.clone(), self.len());
        for _ in 0..k.unsigned_abs() {
            acc = acc.add(&base)?;
        }
        Ok(acc)
    }

    /// The p-polar product of exactly `p` Witt vectors.
    pub fn product(xs: &[&WittVector]) -> Result<WittVector> {
        let first = xs
            .first()
            .ok_or_else(|| Error::Invalid("empty product".into()))?;
        let p = first.algebra.p() as usize;
        if xs.len() != p {
            return Err(Error::LengthMismatch(xs.len(), p));
        }
        for x in &xs[1..] {
            first.check_compatible(x)?;
        }
        let blocks: Vec<&[Vec<FqElement>]> = xs.iter().map(|x| x.coords.as_slice()).collect();
        first.apply(WittKind::Prod, &blocks, &[], first.len())
    }

    /// `V: W_n → W_{n+1}`, `(a_0, …) ↦ (0, a_0, …)`.
    pub fn verschiebung(&self) -> WittVector {
        let mut coords = vec![self.algebra.zero()];
        coords.extend(self.coords.iter().cloned());
        self.with_coords(coords)
    }

    /// `F: W_{n+1} → W_n` in characteristic p: coordinatewise p-th powers,
    /// dropping the last coordinate.
    pub fn frobenius(&self) -> Result<WittVector> {
        if self.len() < 2 {
            return Err(Error::Precondition(
                "Frobenius needs length at least 2".into(),
            ));
        }
        Ok(self.with_coords(
            self.coords[..self.len() - 1]
                .iter()
                .map(|c| self.algebra.pth_power(c))
                .collect(),
        ))
    }

    /// `F: W_{n+1} → W_n` by the reduced universal Frobenius polynomials.
    pub fn frobenius_universal(&self) -> Result<WittVector> {
        if self.len() < 2 {
            return Err(Error::Precondition(
                "Frobenius needs length at least 2".into(),
            ));
        }
        self.apply(WittKind::Frob, &[&self.coords], &[], self.len() - 1)
    }

    /// `F` as an endomorphism of `W_n`: coordinatewise p-th powers.
    pub fn frobenius_endo(&self) -> WittVector {
        self.with_coords(
            self.coords
                .iter()
                .map(|c| self.algebra.pth_power(c))
                .collect(),
        )
    }

    /// `V` as an endomorphism of `W_n`: shift, dropping the last coordinate.
    pub fn verschiebung_endo(&self) -> WittVector {
        let mut v = self.verschiebung();
        v.coords.pop();
        v
    }

    pub fn truncate(&self, n: usize) -> Result<WittVector> {
        if n == 0 || n > self.len() {
            return Err(Error::Invalid(format!(
                "cannot truncate length {} to {n}",
                self.len()
            )));
        }
        Ok(self.with_coords(self.coords[..n].to_vec()))
    }

    /// `a · x` for a W(𝔽_q)-scalar `a` (a Witt vector over `pol(𝔽_q)` of
    /// length at least that of `x`; extra coordinates are ignored).
    pub fn scalar_mul(&self, a: &WittVector) -> Result<WittVector> {
        if a.algebra.dim() != 1 || a.field() != self.field() {
            return Err(Error::Invalid("scalars live in W of the base field".into()));
        }
        if a.len() < self.len() {
            return Err(Error::LengthMismatch(a.len(), self.len()));
        }
        let s: Vec<FqElement> = a.coords[..self.len()].iter().map(|c| c[0]).collect();
        self.apply(WittKind::Scalar, &[&self.coords], &s, self.len())
    }

    /// The Witt-vector Frobenius `ϕ` of a scalar: coordinatewise `c ↦ c^{p^k}`.
    pub fn scalar_frobenius(&self, k: i64) -> WittVector {
        let f = self.field().clone();
        self.with_coords(self.coords.iter().map(|c| f.vfrob(c, k)).collect())
    }

    /// `W_n(g)` for a morphism `g: A → B` given by its matrix.
    pub fn map(&self, target: &Arc<PPolarAlgebra>, g: &FqMatrix) -> Result<WittVector> {
        if g.cols() != self.algebra.dim() || g.rows() != target.dim() {
            return Err(Error::LengthMismatch(g.cols(), self.algebra.dim()));
        }
        let f = self.field();
        Ok(WittVector {
            algebra: target.clone(),
            coords: self.coords.iter().map(|c| g.apply(f, c)).collect(),
        })
    }

    pub fn to_json(&self) -> WittVectorJson {
        WittVectorJson {
            algebra: self.algebra.to_json(),
            coords: self
                .coords
                .iter()
                .map(|c| c.iter().map(|&x| self.field().coords(x)).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &WittVectorJson) -> Result<Self> {
        let algebra = Arc::new(PPolarAlgebra::from_json(&j.algebra)?);
        Self::from_coord_json(algebra, &j.coords)
    }

    pub fn from_coord_json(algebra: Arc<PPolarAlgebra>, coords: &[Vec<Vec<u32>>]) -> Result<Self> {
        let f = algebra.field().clone();
        let coords = coords
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| f.from_coords(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        WittVector::new(algebra, coords)
    }
}

/// Wire form `{"algebra": {...}, "coords": [[...], ...]}`; each coordinate is
/// a list of field elements, each a list of 𝔽_p digits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittVectorJson {
    pub algebra: PPolarJson,
    pub coords: Vec<Vec<Vec<u32>>>,
}
