//! Co-Witt vectors `CW(A)` with eventually constant tails.
//!
//! An element is a sequence `(…, a_{−2}, a_{−1}, a_0)` equal to a tail value
//! below finitely many exceptional indices. Addition takes the limit of
//! windowed Witt sums; the limit is detected by repetition, with a hard cap.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfq::FqElement;
use crate::ppolar::random::random_vector;
use crate::ppolar::{ideal_generated, ideal_power_nilpotent, nilradical, PPolarAlgebra};
use crate::wittmod::{witt_sum, CwuClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoWittElement {
    algebra: Arc<PPolarAlgebra>,
    tail: Vec<FqElement>,
    /// index (≤ 0) ↦ entry, only where the entry differs from the tail
    exceptions: BTreeMap<i64, Vec<FqElement>>,
    witness: (u32, u32),
}

fn is_zero(v: &[FqElement]) -> bool {
    v.iter().all(|c| c.is_zero())
}

impl CoWittElement {
    /// Builds an element without checking nilpotence; see [`cw_validate`].
    pub fn new(
        algebra: Arc<PPolarAlgebra>,
        tail: Vec<FqElement>,
        exceptions: BTreeMap<i64, Vec<FqElement>>,
        witness: (u32, u32),
    ) -> Result<Self> {
        let d = algebra.dim();
        if tail.len() != d {
            return Err(Error::LengthMismatch(tail.len(), d));
        }
        for (&i, v) in &exceptions {
            if i > 0 {
                return Err(Error::Invalid(format!("co-Witt index {i} is positive")));
            }
            if v.len() != d {
                return Err(Error::LengthMismatch(v.len(), d));
            }
        }
        let exceptions = exceptions.into_iter().filter(|(_, v)| *v != tail).collect();
        Ok(CoWittElement {
            algebra,
            tail,
            exceptions,
            witness,
        })
    }

    pub fn zero(algebra: Arc<PPolarAlgebra>) -> Self {
        let tail = algebra.zero();
        CoWittElement {
            algebra,
            tail,
            exceptions: BTreeMap::new(),
            witness: (0, 0),
        }
    }

    /// The finitely supported element of a `CW^u` class.
    pub fn from_cwu(c: &CwuClass) -> Self {
        let len = c.len() as i64;
        let exceptions = c
            .coords()
            .iter()
            .enumerate()
            .map(|(i, v)| (i as i64 + 1 - len, v.clone()))
            .collect();
        let x = CoWittElement::new(c.algebra().clone(), c.algebra().zero(), exceptions, (0, 0))
            .expect("class coordinates match the algebra");
        x.with_found_witness().expect("finite support is valid")
    }

    /// The `CW^u` class, when the tail is zero.
    pub fn to_cwu(&self) -> Option<CwuClass> {
        if !is_zero(&self.tail) {
            return None;
        }
        let depth = self.depth();
        let coords = (0..=depth).rev().map(|n| self.entry(-(n as i64))).collect();
        let x = crate::wittmod::WittVector::new(self.algebra.clone(), coords).ok()?;
        Some(CwuClass::new(&x))
    }

    pub fn algebra(&self) -> &Arc<PPolarAlgebra> {
        &self.algebra
    }

    pub fn tail(&self) -> &[FqElement] {
        &self.tail
    }

    pub fn exceptions(&self) -> &BTreeMap<i64, Vec<FqElement>> {
        &self.exceptions
    }

    pub fn witness(&self) -> (u32, u32) {
        self.witness
    }

    /// Largest `n` with an exception at `−n` (0 when there is none).
    pub fn depth(&self) -> usize {
        self.exceptions.keys().next().map_or(0, |&i| (-i) as usize)
    }

    pub fn entry(&self, i: i64) -> Vec<FqElement> {
        self.exceptions
            .get(&i)
            .cloned()
            .unwrap_or_else(|| self.tail.clone())
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.tail) && self.exceptions.is_empty()
    }

    /// Whether the ideal generated by the tail and the entries at indices
    /// `≤ −r` has vanishing `s`-fold p-th power.
    pub fn witness_holds(&self, (r, s): (u32, u32)) -> bool {
        let mut gens = vec![self.tail.clone()];
        gens.extend(
            self.exceptions
                .range(..=-(r as i64))
                .map(|(_, v)| v.clone()),
        );
        let ideal = ideal_generated(&self.algebra, &gens);
        ideal_power_nilpotent(&self.algebra, &ideal, s)
    }

    /// The witness with least `s`, then least `r`, if any.
    pub fn find_witness(&self) -> Option<(u32, u32)> {
        let rmax = self.depth() as u32 + 1;
        (0..=self.algebra.dim() as u32)
            .flat_map(|s| (0..=rmax).map(move |r| (r, s)))
            .find(|&w| self.witness_holds(w))
    }

    fn with_found_witness(mut self) -> Option<Self> {
        self.witness = self.find_witness()?;
        Some(self)
    }

    pub fn to_json(&self) -> CoWittJson {
        let f = self.algebra.field();
        let enc = |v: &[FqElement]| v.iter().map(|&c| f.coords(c)).collect();
        CoWittJson {
            tail: enc(&self.tail),
            exceptions: self
                .exceptions
                .iter()
                .map(|(i, v)| (i.to_string(), enc(v)))
                .collect(),
            witness: [self.witness.0, self.witness.1],
        }
    }

    pub fn from_json(algebra: Arc<PPolarAlgebra>, j: &CoWittJson) -> Result<Self> {
        let f = algebra.field().clone();
        let dec = |v: &[Vec<u32>]| {
            v.iter()
                .map(|c| f.from_coords(c))
                .collect::<Result<Vec<_>>>()
        };
        let exceptions = j
            .exceptions
            .iter()
            .map(|(k, v)| {
                let i: i64 = k
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad co-Witt index {k:?}")))?;
                Ok((i, dec(v)?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        CoWittElement::new(
            algebra,
            dec(&j.tail)?,
            exceptions,
            (j.witness[0], j.witness[1]),
        )
    }
}

/// Wire form `{"tail": [...], "exceptions": {"0": [...], "-3": [...]},
/// "witness": [r, s]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoWittJson {
    pub tail: Vec<Vec<u32>>,
    #[serde(default)]
    pub exceptions: BTreeMap<String, Vec<Vec<u32>>>,
    #[serde(default)]
    pub witness: [u32; 2],
}

/// True iff the stored witness holds, or some witness is found by search.
pub fn cw_validate(x: &CoWittElement) -> bool {
    x.witness_holds(x.witness) || x.find_witness().is_some()
}

/// Knobs for the stabilization search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StabilizeOptions {
    /// Consecutive equal values required; default `dim + 2`.
    pub repeats: Option<usize>,
    /// Iteration cap; default `max(16, 4·(r + s)·dim)`.
    pub cap: Option<usize>,
    /// Window size offset to start from.
    pub start: usize,
}

fn valid_witness(x: &CoWittElement) -> Result<(u32, u32)> {
    if x.witness_holds(x.witness) {
        return Ok(x.witness);
    }
    x.find_witness()
        .ok_or_else(|| Error::Precondition("co-Witt input fails the nilpotence condition".into()))
}

/// `S_{−n}(x, y)`: the last Witt coordinate of the sum of the windows
/// `(x_{−n−m}, …, x_{−n})` and `(y_{−n−m}, …, y_{−n})`, in the limit `m → ∞`.
pub fn stabilized_sum(
    x: &CoWittElement,
    y: &CoWittElement,
    n: usize,
    repeats: usize,
    cap: usize,
    start: usize,
) -> Result<Vec<FqElement>> {
    let a = &x.algebra;
    let n = n as i64;
    let deepest = x.depth().max(y.depth()) as i64;
    let finite = is_zero(&x.tail) && is_zero(&y.tail);
    let mut last: Option<Vec<FqElement>> = None;
    let mut count = 0;
    for m in start..start + cap {
        let window = |z: &CoWittElement| -> Vec<Vec<FqElement>> {
            (0..=m as i64).rev().map(|k| z.entry(-n - k)).collect()
        };
        let (wx, wy) = (window(x), window(y));
        let v = witt_sum(a, &[&wx, &wy])?.pop().expect("nonempty window");
        if finite && n + m as i64 >= deepest {
            // both windows already cover every nonzero entry
            return Ok(v);
        }
        if last.as_ref() == Some(&v) {
            count += 1;
        } else {
            count = 1;
            last = Some(v);
        }
        if count >= repeats {
            return Ok(last.expect("set above"));
        }
    }
    Err(Error::StabilizationNotDetected {
        index: n as usize,
        cap,
    })
}

pub fn cw_add(x: &CoWittElement, y: &CoWittElement) -> Result<CoWittElement> {
    cw_add_with(x, y, StabilizeOptions::default())
}

pub fn cw_add_with(
    x: &CoWittElement,
    y: &CoWittElement,
    opts: StabilizeOptions,
) -> Result<CoWittElement> {
    if x.algebra != y.algebra {
        return Err(Error::Invalid(
            "co-Witt vectors over different algebras".into(),
        ));
    }
    let (wx, wy) = (valid_witness(x)?, valid_witness(y)?);
    let dim = x.algebra.dim();
    let r = wx.0.max(wy.0) as usize;
    let s = wx.1.max(wy.1) as usize;
    let repeats = opts.repeats.unwrap_or(dim + 2).max(1);
    let cap = opts.cap.unwrap_or_else(|| 16.max(4 * (r + s) * dim));
    let deepest = x.depth().max(y.depth());
    let tail = stabilized_sum(x, y, deepest + 1, repeats, cap, opts.start)?;
    let exceptions = (0..=deepest)
        .map(|n| {
            Ok((
                -(n as i64),
                stabilized_sum(x, y, n, repeats, cap, opts.start)?,
            ))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let z = CoWittElement::new(x.algebra.clone(), tail, exceptions, (0, 0))?;
    z.with_found_witness()
        .ok_or_else(|| Error::Internal("sum of valid co-Witt vectors fails revalidation".into()))
}

/// `k · x` by repeated addition.
pub fn cw_multiple(x: &CoWittElement, k: u32) -> Result<CoWittElement> {
    let mut acc = CoWittElement::zero(x.algebra.clone());
    for _ in 0..k {
        acc = cw_add(&acc, x)?;
    }
    Ok(acc)
}

/// `(…, a_{−1}^p, a_0^p)`.
#[allow(non_snake_case)]
pub fn cw_F(x: &CoWittElement) -> CoWittElement {
    let a = &x.algebra;
    let exceptions = x
        .exceptions
        .iter()
        .map(|(&i, v)| (i, a.pth_power(v)))
        .collect();
    let z = CoWittElement::new(a.clone(), a.pth_power(&x.tail), exceptions, x.witness)
        .expect("same shape");
    let witness = z.find_witness().unwrap_or(z.witness);
    CoWittElement { witness, ..z }
}

/// `(…, a_{−2}, a_{−1})`: every entry moves one step toward index 0 and
/// `a_0` is dropped.
#[allow(non_snake_case)]
pub fn cw_V(x: &CoWittElement) -> CoWittElement {
    let exceptions = x
        .exceptions
        .iter()
        .filter(|(&i, _)| i < 0)
        .map(|(&i, v)| (i + 1, v.clone()))
        .collect();
    let (r, s) = x.witness;
    CoWittElement::new(
        x.algebra.clone(),
        x.tail.clone(),
        exceptions,
        (r.saturating_sub(1), s),
    )
    .expect("same shape")
}

/// A random valid element: tail in the nilradical, arbitrary exceptions
/// at depth below `max_depth`.
pub fn random_valid<R: Rng + ?Sized>(
    rng: &mut R,
    algebra: &Arc<PPolarAlgebra>,
    max_depth: usize,
) -> CoWittElement {
    let f = algebra.field();
    let nil = nilradical(algebra);
    let mut tail = algebra.zero();
    for b in nil.basis() {
        let c = crate::ppolar::random::random_element(rng, f);
        f.vaxpy(&mut tail, c, b);
    }
    let mut exceptions = BTreeMap::new();
    for n in 0..max_depth as i64 {
        if rng.gen_bool(0.7) {
            exceptions.insert(-n, random_vector(rng, f, algebra.dim()));
        }
    }
    CoWittElement::new(algebra.clone(), tail, exceptions, (0, 0))
        .expect("shapes match")
        .with_found_witness()
        .expect("nilpotent tail")
}

#[cfg(test)]
mod tests;
