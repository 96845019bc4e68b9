use std::sync::Arc;

use super::field::{FqElement, FqField};
use crate::error::{Error, Result};

/// Dense row-major matrix over a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FqElement>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: FqMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FqMatrix {
            rows,
            cols,
            data: vec![FqElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FqElement::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FqElement>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged matrix rows".into()));
        }
        Ok(FqMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<FqElement>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FqElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FqElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FqElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FqElement> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FqElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, f: &FqField, other: &FqMatrix) -> Result<FqMatrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch(self.cols, other.rows));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, f: &FqField, v: &[FqElement]) -> Vec<FqElement> {
        (0..self.rows).map(|i| f.dot(self.row(i), v)).collect()
    }

    pub fn map_entries(&self, g: impl Fn(FqElement) -> FqElement) -> FqMatrix {
        FqMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| g(x)).collect(),
        }
    }

    pub fn echelon(&self, f: &FqField) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let (a, b) = (m.get(r, j), m.get(pr, j));
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let x = m.get(r, j);
                m.set(r, j, f.mul(inv, x));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let x = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self, f: &FqField) -> usize {
        self.echelon(f).rank()
    }

    /// Kernel basis read off the reduced echelon form: one vector per free
    /// column, with a 1 in that column.
    pub fn kernel(&self, f: &FqField) -> Vec<Vec<FqElement>> {
        let ech = self.echelon(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![FqElement::ZERO; self.cols];
                v[fc] = FqElement::ONE;
                for (r, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = f.neg(ech.matrix.get(r, fc));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, f: &FqField) -> Result<FqMatrix> {
        if self.rows != self.cols {
            return Err(Error::Precondition("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, FqElement::ONE);
        }
        let ech = aug.echelon(f);
        if ech.pivots.iter().take(n).copied().ne(0..n) {
            return Err(Error::Precondition("matrix is singular".into()));
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, ech.matrix.get(i, n + j));
            }
        }
        Ok(inv)
    }

    /// Some `x` with `self · x = b`, if one exists.
    pub fn solve(&self, f: &FqField, b: &[FqElement]) -> Option<Vec<FqElement>> {
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let ech = aug.echelon(f);
        if ech.pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![FqElement::ZERO; self.cols];
        for (r, &pc) in ech.pivots.iter().enumerate() {
            x[pc] = ech.matrix.get(r, self.cols);
        }
        Some(x)
    }
}

/// Echelon basis of the span of `vectors` (all of length `n`).
pub fn span_basis(f: &FqField, n: usize, vectors: &[Vec<FqElement>]) -> Vec<Vec<FqElement>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = FqMatrix::from_rows(vectors).expect("equal lengths");
    debug_assert_eq!(m.cols(), n);
    let ech = m.echelon(f);
    (0..ech.rank())
        .map(|r| ech.matrix.row(r).to_vec())
        .collect()
}

/// Kernel of the 𝔽_p-linear map `v ↦ Σ_t M_t · v^{(p^{k_t})}` on 𝔽_q^n, where
/// `v^{(p^k)}` raises each coordinate to the `p^k`-th power.
///
/// The kernel is in general only an 𝔽_p-subspace. The map is flattened to an
/// (m·n)-dimensional 𝔽_p-linear system over the power basis of 𝔽_q and the
/// returned vectors form an 𝔽_p-basis, in echelon order of that system.
pub fn linearized_kernel(
    field: &Arc<FqField>,
    n: usize,
    terms: &[(i64, &FqMatrix)],
) -> Result<Vec<Vec<FqElement>>> {
    for (_, m) in terms {
        if m.cols() != n {
            return Err(Error::LengthMismatch(m.cols(), n));
        }
    }
    let out_rows = terms.first().map_or(n, |(_, m)| m.rows());
    if terms.iter().any(|(_, m)| m.rows() != out_rows) {
        return Err(Error::Invalid("terms have different row counts".into()));
    }
    let p = field.p();
    let deg = field.degree() as usize;
    let prime = FqField::new(p, 1)?;
    let basis_elem = |t: usize| field.pow(field.generator(), t as u64);
    let prime_basis: Vec<FqElement> = if deg == 1 {
        vec![FqElement::ONE]
    } else {
        (0..deg).map(basis_elem).collect()
    };
    // column (j, t): image of ζ^t e_j, flattened
    let mut flat = FqMatrix::zeros(out_rows * deg, n * deg);
    for j in 0..n {
        for (t, &b) in prime_basis.iter().enumerate() {
            let mut image = vec![FqElement::ZERO; out_rows];
            for (k, m) in terms {
                let twisted = field.frobenius(b, *k);
                for (i, slot) in image.iter_mut().enumerate() {
                    *slot = field.add(*slot, field.mul(m.get(i, j), twisted));
                }
            }
            for (i, &y) in image.iter().enumerate() {
                for (s, c) in field.coords(y).into_iter().enumerate() {
                    flat.set(i * deg + s, j * deg + t, FqElement(c));
                }
            }
        }
    }
    Ok(flat
        .kernel(&prime)
        .into_iter()
        .map(|kv| {
            (0..n)
                .map(|j| {
                    let coords: Vec<u32> = (0..deg).map(|t| kv[j * deg + t].0).collect();
                    field.from_coords(&coords).expect("digits below p")
                })
                .collect()
        })
        .collect())
}

/// 𝔽_p-basis of the kernel of `v ↦ M · v^{(p^twist)}`.
pub fn semilinear_kernel(
    field: &Arc<FqField>,
    m: &FqMatrix,
    twist: i64,
) -> Result<Vec<Vec<FqElement>>> {
    if m.rows() != m.cols() {
        return Err(Error::Precondition(
            "semilinear kernel needs a square matrix".into(),
        ));
    }
    linearized_kernel(field, m.cols(), &[(twist, m)])
}

/// Root space of the additive polynomial `Σ c_k x^{p^k}` over the
/// given field, as an 𝔽_p-basis of its root space.
pub fn additive_roots(field: &Arc<FqField>, coeffs: &[FqElement]) -> Result<Vec<FqElement>> {
    let mats: Vec<FqMatrix> = coeffs
        .iter()
        .map(|&c| FqMatrix::from_rows(&[vec![c]]).expect("1x1"))
        .collect();
    let terms: Vec<(i64, &FqMatrix)> = mats
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_zero())
        .map(|(k, m)| (k as i64, m))
        .collect();
    if terms.is_empty() {
        let zero = FqMatrix::zeros(1, 1);
        return Ok(linearized_kernel(field, 1, &[(0, &zero)])?
            .into_iter()
            .map(|v| v[0])
            .collect());
    }
    Ok(linearized_kernel(field, 1, &terms)?
        .into_iter()
        .map(|v| v[0])
        .collect())
}
