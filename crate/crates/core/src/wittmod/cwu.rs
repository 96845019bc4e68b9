use std::sync::Arc;

use super::vector::WittVector;
use crate::error::{Error, Result};
use crate::gfq::FqElement;
use crate::ppolar::PPolarAlgebra;

/// Class in `CW^u(A) = colim(W_1 → W_2 → ⋯)` along `V`. The representative
/// has no leading zero coordinate; the zero class has no coordinates.
///
/// Read as a co-Witt vector, the last coordinate sits at index 0 and the
/// first at index `1 − len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwuClass {
    algebra: Arc<PPolarAlgebra>,
    coords: Vec<Vec<FqElement>>,
}

impl CwuClass {
    pub fn new(x: &WittVector) -> Self {
        Self::from_coords(x.algebra().clone(), x.coords().to_vec())
    }

    pub fn zero(algebra: Arc<PPolarAlgebra>) -> Self {
        CwuClass {
            algebra,
            coords: Vec::new(),
        }
    }

    pub(crate) fn from_coords(
        algebra: Arc<PPolarAlgebra>,
        mut coords: Vec<Vec<FqElement>>,
    ) -> Self {
        let lead = coords
            .iter()
            .position(|c| c.iter().any(|x| !x.is_zero()))
            .unwrap_or(coords.len());
        coords.drain(..lead);
        CwuClass { algebra, coords }
    }

    pub fn algebra(&self) -> &Arc<PPolarAlgebra> {
        &self.algebra
    }

    /// Canonical coordinates, deepest first.
    pub fn coords(&self) -> &[Vec<FqElement>] {
        &self.coords
    }

    /// Length of the canonical representative.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// The entry at co-Witt index `i ≤ 0`.
    pub fn entry(&self, i: i64) -> Vec<FqElement> {
        let depth = (-i) as usize;
        if i > 0 || depth >= self.len() {
            return self.algebra.zero();
        }
        self.coords[self.len() - 1 - depth].clone()
    }

    /// A representative in `W_n`, padded by `V`.
    pub fn representative(&self, n: usize) -> Result<WittVector> {
        let n = n.max(1);
        if n < self.len() {
            return Err(Error::Invalid(format!(
                "class needs length {}, asked for {n}",
                self.len()
            )));
        }
        let mut coords = vec![self.algebra.zero(); n - self.len()];
        coords.extend(self.coords.iter().cloned());
        WittVector::new(self.algebra.clone(), coords)
    }

    pub fn add(&self, other: &CwuClass) -> Result<CwuClass> {
        let n = self.len().max(other.len()).max(1);
        let s = self
            .representative(n)?
            .add_by_carries(&other.representative(n)?)?;
        Ok(CwuClass::new(&s))
    }

    pub fn neg(&self) -> CwuClass {
        let x = self.representative(self.len()).expect("canonical length");
        CwuClass::new(&x.neg())
    }

    pub fn sub(&self, other: &CwuClass) -> Result<CwuClass> {
        self.add(&other.neg())
    }

    /// Coordinatewise p-th powers.
    pub fn frobenius(&self) -> CwuClass {
        let coords = self
            .coords
            .iter()
            .map(|c| self.algebra.pth_power(c))
            .collect();
        CwuClass::from_coords(self.algebra.clone(), coords)
    }

    /// Drops the entry at index 0.
    pub fn verschiebung(&self) -> CwuClass {
        let mut coords = self.coords.clone();
        coords.pop();
        CwuClass::from_coords(self.algebra.clone(), coords)
    }

    pub fn multiple(&self, k: i64) -> Result<CwuClass> {
        let x = self.representative(self.len())?.multiple(k)?;
        Ok(CwuClass::new(&x))
    }
}
