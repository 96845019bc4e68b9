use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfq::{FieldEmbedding, FieldJson, FqElement, FqField};

/// Commutative, associative, not necessarily unital 𝔽_q-algebra given by
/// structure constants `e_i e_j = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommAlgebra {
    field: Arc<FqField>,
    dim: usize,
    mult: Vec<Vec<Vec<FqElement>>>,
}

impl CommAlgebra {
    /// Validates symmetry and associativity on basis triples.
    pub fn new(field: Arc<FqField>, mult: Vec<Vec<Vec<FqElement>>>) -> Result<Self> {
        let dim = mult.len();
        if mult
            .iter()
            .any(|row| row.len() != dim || row.iter().any(|v| v.len() != dim))
        {
            return Err(Error::Invalid(
                "structure tensor has the wrong shape".into(),
            ));
        }
        let a = CommAlgebra { field, dim, mult };
        for i in 0..dim {
            for j in 0..dim {
                if a.mult[i][j] != a.mult[j][i] {
                    return Err(Error::Invalid(format!(
                        "multiplication is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let left = a.mul(&a.mul(&a.basis(i), &a.basis(j)), &a.basis(k));
                    let right = a.mul(&a.basis(i), &a.mul(&a.basis(j), &a.basis(k)));
                    if left != right {
                        return Err(Error::Invalid(format!(
                            "multiplication is not associative at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(a)
    }

    /// `x^low 𝔽_q[x] / (x^high)` with basis `x^low, …, x^{high-1}`.
    pub fn truncated(field: Arc<FqField>, low: u32, high: u32) -> Result<Self> {
        if low > high {
            return Err(Error::Invalid("empty truncation range".into()));
        }
        let dim = (high - low) as usize;
        let mut mult = vec![vec![vec![FqElement::ZERO; dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let e = 2 * low as usize + i + j;
                if e < high as usize {
                    mult[i][j][e - low as usize] = FqElement::ONE;
                }
            }
        }
        Ok(CommAlgebra { field, dim, mult })
    }

    /// `𝔽_q^n` with componentwise multiplication.
    pub fn product_of_fields(field: Arc<FqField>, n: usize) -> Self {
        let mut mult = vec![vec![vec![FqElement::ZERO; n]; n]; n];
        for i in 0..n {
            mult[i][i][i] = FqElement::ONE;
        }
        CommAlgebra {
            field,
            dim: n,
            mult,
        }
    }

    /// `𝔽_q[t]/(f)` for monic `f` (little-endian coefficients) with basis
    /// `1, t, …, t^{deg f - 1}`.
    pub fn monogenic(field: Arc<FqField>, f: &[FqElement]) -> Result<Self> {
        let deg = f
            .len()
            .checked_sub(1)
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Invalid("modulus must have positive degree".into()))?;
        if f[deg] != FqElement::ONE {
            return Err(Error::Invalid("modulus must be monic".into()));
        }
        // t^k reduced, for k < 2 deg - 1
        let mut powers: Vec<Vec<FqElement>> = Vec::new();
        let mut cur = vec![FqElement::ZERO; deg];
        cur[0] = FqElement::ONE;
        for _ in 0..(2 * deg - 1) {
            powers.push(cur.clone());
            let top = cur[deg - 1];
            let mut next = vec![FqElement::ZERO; deg];
            next[1..deg].copy_from_slice(&cur[..deg - 1]);
            for (k, slot) in next.iter_mut().enumerate() {
                *slot = field.sub(*slot, field.mul(top, f[k]));
            }
            cur = next;
        }
        let mult = (0..deg)
            .map(|i| (0..deg).map(|j| powers[i + j].clone()).collect())
            .collect();
        Ok(CommAlgebra {
            field,
            dim: deg,
            mult,
        })
    }

    /// `𝔽_{q^m}` as an `m`-dimensional algebra over `𝔽_q`, presented as
    /// `𝔽_q[t]/(minimal polynomial of the generator of 𝔽_{q^m})`.
    pub fn field_extension(field: Arc<FqField>, m: u32) -> Result<Self> {
        let big = FqField::new(field.p(), field.degree() * m)?;
        let emb = FieldEmbedding::new(field.clone(), big.clone())?;
        let zeta = big.generator();
        let q_exp = field.degree() as i64;
        // Π_{i<m} (t − ζ^{q^i})
        let mut poly = vec![FqElement::ONE];
        for i in 0..m as i64 {
            let root = big.frobenius(zeta, q_exp * i);
            let mut next = vec![FqElement::ZERO; poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                next[k + 1] = big.add(next[k + 1], c);
                next[k] = big.sub(next[k], big.mul(root, c));
            }
            poly = next;
        }
        let f = poly
            .iter()
            .map(|&c| {
                emb.preimage(c)
                    .ok_or_else(|| Error::Invalid("minimal polynomial not over the base".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::monogenic(field, &f)
    }

    /// Direct product `A × B`, basis of `A` first.
    pub fn direct_product(&self, other: &CommAlgebra) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::Invalid("factors live over different fields".into()));
        }
        let d = self.dim + other.dim;
        let mut mult = vec![vec![vec![FqElement::ZERO; d]; d]; d];
        for i in 0..self.dim {
            for j in 0..self.dim {
                mult[i][j][..self.dim].copy_from_slice(&self.mult[i][j]);
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                mult[self.dim + i][self.dim + j][self.dim..].copy_from_slice(&other.mult[i][j]);
            }
        }
        Ok(CommAlgebra {
            field: self.field.clone(),
            dim: d,
            mult,
        })
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self, i: usize) -> Vec<FqElement> {
        let mut v = vec![FqElement::ZERO; self.dim];
        v[i] = FqElement::ONE;
        v
    }

    pub fn structure(&self, i: usize, j: usize) -> &[FqElement] {
        &self.mult[i][j]
    }

    pub fn mul(&self, a: &[FqElement], b: &[FqElement]) -> Vec<FqElement> {
        let f = &self.field;
        let mut out = vec![FqElement::ZERO; self.dim];
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                f.vaxpy(&mut out, f.mul(ai, bj), &self.mult[i][j]);
            }
        }
        out
    }

    /// `a^k` for `k ≥ 1`.
    pub fn pow(&self, a: &[FqElement], k: u64) -> Vec<FqElement> {
        assert!(k >= 1, "non-unital algebras have no zeroth power");
        let mut acc = a.to_vec();
        for _ in 1..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn to_json(&self) -> AlgebraJson {
        let mut mult = Vec::new();
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = &self.mult[i][j];
                if v.iter().any(|x| !x.is_zero()) {
                    mult.push(EntryJson {
                        idx: vec![i, j],
                        val: v.iter().map(|&x| self.field.coords(x)).collect(),
                    });
                }
            }
        }
        AlgebraJson::Structure {
            field: self.field.to_json(),
            dim: self.dim,
            mult,
        }
    }
}

/// One entry of a sparse symmetric tensor: sorted index tuple and a value
/// vector of field elements in coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub idx: Vec<usize>,
    pub val: Vec<Vec<u32>>,
}

/// Input description of a commutative algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AlgebraJson {
    Structure {
        field: FieldJson,
        dim: usize,
        mult: Vec<EntryJson>,
    },
    Truncated {
        field: FieldJson,
        low: u32,
        high: u32,
    },
    Product {
        field: FieldJson,
        n: usize,
    },
    Extension {
        field: FieldJson,
        m: u32,
    },
    Monogenic {
        field: FieldJson,
        modulus: Vec<Vec<u32>>,
    },
}

pub(crate) fn element_from_json(f: &FqField, coords: &[u32]) -> Result<FqElement> {
    f.from_coords(coords)
}

impl AlgebraJson {
    pub fn build(&self) -> Result<CommAlgebra> {
        match self {
            AlgebraJson::Structure { field, dim, mult } => {
                let f = FqField::from_json(field)?;
                let mut t = vec![vec![vec![FqElement::ZERO; *dim]; *dim]; *dim];
                for e in mult {
                    let [i, j] = e.idx[..] else {
                        return Err(Error::Invalid("multiplication index must be a pair".into()));
                    };
                    if i >= *dim || j >= *dim || e.val.len() != *dim {
                        return Err(Error::Invalid(format!("bad entry at {:?}", e.idx)));
                    }
                    let v = e
                        .val
                        .iter()
                        .map(|c| element_from_json(&f, c))
                        .collect::<Result<Vec<_>>>()?;
                    t[i][j] = v.clone();
                    t[j][i] = v;
                }
                CommAlgebra::new(f, t)
            }
            AlgebraJson::Truncated { field, low, high } => {
                CommAlgebra::truncated(FqField::from_json(field)?, *low, *high)
            }
            AlgebraJson::Product { field, n } => Ok(CommAlgebra::product_of_fields(
                FqField::from_json(field)?,
                *n,
            )),
            AlgebraJson::Extension { field, m } => {
                CommAlgebra::field_extension(FqField::from_json(field)?, *m)
            }
            AlgebraJson::Monogenic { field, modulus } => {
                let f = FqField::from_json(field)?;
                let coeffs = modulus
                    .iter()
                    .map(|c| element_from_json(&f, c))
                    .collect::<Result<Vec<_>>>()?;
                CommAlgebra::monogenic(f, &coeffs)
            }
        }
    }
}
