//! Witt addition of arbitrary length by Teichmüller carries.
//!
//! A Witt vector is `Σ_j V^j t(x_j)`, and `t(u) + t(v) = Σ_k V^k t(c_k(u, v))`
//! with `c_k` the homogeneous carry polynomial of degree `p^k`. Sums are
//! formed level by level, pushing carries to deeper levels.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::gfq::FqElement;
use crate::ppolar::PPolarAlgebra;

/// Largest carry degree `p^k` evaluated on non-vanishing inputs.
pub const MAX_CARRY_DEGREE: u64 = 1 << 12;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn poly_mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let m128 = m as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = (out[i + j] + x as u128 * y as u128) % m128;
            }
        }
    }
    out.into_iter().map(|c| c as u64).collect()
}

fn poly_pow(a: &[u64], e: u32, m: u64) -> Vec<u64> {
    let mut acc = a.to_vec();
    for _ in 1..e {
        acc = poly_mul(&acc, a, m);
    }
    acc
}

/// Coefficients of `c_0, …, c_k` modulo p; entry `i` of `c_j` is the
/// coefficient of `u^i v^{p^j − i}`.
fn compute_carries(p: u32, k: usize) -> Result<Vec<Vec<u32>>> {
    let m_digits = k as u32 + 1;
    let modulus = (p as u64)
        .checked_pow(m_digits)
        .filter(|&m| m < 1 << 63)
        .ok_or_else(|| {
            Error::Precondition(format!("carry of level {k} for p = {p} is out of range"))
        })?;
    let pk = |j: usize| (p as u64).pow(j as u32);
    // lifts[j] = c_j modulo p^{M−j}; powers[j] = c_j^{p^{level−j}} mod p^M
    let mut lifts: Vec<Vec<u64>> = vec![vec![1, 1]];
    let mut powers: Vec<Vec<u64>> = vec![vec![1, 1]];
    for level in 1..=k {
        let deg = pk(level) as usize;
        for pw in powers.iter_mut() {
            *pw = poly_pow(pw, p, modulus);
        }
        let mut d = vec![0u64; deg + 1];
        d[0] = 1;
        d[deg] = (d[deg] + 1) % modulus;
        for (j, pw) in powers.iter().enumerate() {
            let scale = pk(j) % modulus;
            for (t, &c) in pw.iter().enumerate() {
                d[t] = (d[t] + modulus - mulmod(scale, c, modulus)) % modulus;
            }
        }
        let divisor = pk(level);
        if let Some(t) = d.iter().position(|c| c % divisor != 0) {
            return Err(Error::Internal(format!(
                "carry polynomial {level} has non-integral coefficient at u^{t}"
            )));
        }
        let c: Vec<u64> = d.iter().map(|x| x / divisor).collect();
        powers.push(c.clone());
        lifts.push(c);
    }
    Ok(lifts
        .iter()
        .map(|c| c.iter().map(|&x| (x % p as u64) as u32).collect())
        .collect())
}

/// Memoized carry coefficients up to level `k`.
pub fn carry_coefficients(p: u32, k: usize) -> Result<Arc<Vec<Vec<u32>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Vec<u32>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("cache lock").get(&p) {
        if hit.len() > k {
            return Ok(hit.clone());
        }
    }
    let c = Arc::new(compute_carries(p, k)?);
    cache.lock().expect("cache lock").insert(p, c.clone());
    Ok(c)
}

/// Values of the polar monomials `u^i v^j`, grouped by degree
/// `1, p, 2p − 1, …`; stops once a whole degree vanishes.
struct MonomialTable {
    /// levels[t][i] = u^i v^{d−i} with d = 1 + t(p − 1)
    levels: Vec<Vec<Vec<FqElement>>>,
    vanished: bool,
}

impl MonomialTable {
    fn new(u: &[FqElement], v: &[FqElement]) -> Self {
        MonomialTable {
            levels: vec![vec![v.to_vec(), u.to_vec()]],
            vanished: is_zero(u) && is_zero(v),
        }
    }

    fn push_level(&mut self, a: &PPolarAlgebra) {
        let p = a.p() as usize;
        let (v, u) = (&self.levels[0][0], &self.levels[0][1]);
        let prev = self.levels.last().expect("degree one");
        let deg = prev.len() - 1 + (p - 1);
        let mut next = Vec::with_capacity(deg + 1);
        for i in 0..=deg {
            let ua = i.min(p - 1);
            let base = &prev[i - ua];
            if is_zero(base) {
                next.push(a.zero());
                continue;
            }
            let mut args: Vec<&[FqElement]> = Vec::with_capacity(p);
            args.push(base);
            args.extend(std::iter::repeat_n(u.as_slice(), ua));
            args.extend(std::iter::repeat_n(v.as_slice(), p - 1 - ua));
            next.push(a.mu(&args).expect("p arguments"));
        }
        self.vanished = next.iter().all(|x| is_zero(x));
        self.levels.push(next);
    }

    /// The monomials of degree `d`, or `None` when they all vanish.
    fn degree(&mut self, a: &PPolarAlgebra, d: usize) -> Option<&[Vec<FqElement>]> {
        let t = (d - 1) / (a.p() as usize - 1);
        while self.levels.len() <= t && !self.vanished {
            self.push_level(a);
        }
        self.levels.get(t).map(Vec::as_slice)
    }
}

/// `c_k(u, v)` for `k = 1..=kmax`; entries are `None` when zero.
fn carries(
    a: &PPolarAlgebra,
    u: &[FqElement],
    v: &[FqElement],
    kmax: usize,
) -> Result<Vec<Option<Vec<FqElement>>>> {
    let p = a.p() as usize;
    let f = a.field();
    let mut table = MonomialTable::new(u, v);
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        if table.vanished {
            out.push(None);
            continue;
        }
        let d = (p as u64).pow(k as u32);
        if d > MAX_CARRY_DEGREE {
            return Err(Error::Precondition(format!(
                "carry of degree {d} on non-nilpotent inputs exceeds {MAX_CARRY_DEGREE}"
            )));
        }
        let Some(monomials) = table.degree(a, d as usize) else {
            out.push(None);
            continue;
        };
        let coeffs = carry_coefficients(p as u32, k)?;
        let mut acc = a.zero();
        for (i, &c) in coeffs[k].iter().enumerate() {
            if c != 0 {
                f.vaxpy(&mut acc, f.from_int(c as i64), &monomials[i]);
            }
        }
        out.push((!is_zero(&acc)).then_some(acc));
    }
    Ok(out)
}

fn is_zero(v: &[FqElement]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// Sum of Witt vectors of a common length in `W_L(A)`.
pub fn witt_sum(a: &PPolarAlgebra, xs: &[&[Vec<FqElement>]]) -> Result<Vec<Vec<FqElement>>> {
    let len = xs.first().map_or(0, |x| x.len());
    if let Some(x) = xs.iter().find(|x| x.len() != len) {
        return Err(Error::LengthMismatch(x.len(), len));
    }
    let f = a.field();
    let mut buckets: Vec<Vec<Vec<FqElement>>> = vec![Vec::new(); len];
    for x in xs {
        for (j, c) in x.iter().enumerate() {
            if c.len() != a.dim() {
                return Err(Error::LengthMismatch(c.len(), a.dim()));
            }
            if !is_zero(c) {
                buckets[j].push(c.clone());
            }
        }
    }
    let mut out = Vec::with_capacity(len);
    for j in 0..len {
        let mut bucket = std::mem::take(&mut buckets[j]);
        while bucket.len() > 1 {
            let u = bucket.pop().expect("two terms");
            let v = bucket.pop().expect("two terms");
            let s = f.vadd(&u, &v);
            if !is_zero(&s) {
                bucket.push(s);
            }
            for (k, c) in carries(a, &u, &v, len - 1 - j)?.into_iter().enumerate() {
                if let Some(c) = c {
                    buckets[j + 1 + k].push(c);
                }
            }
        }
        out.push(bucket.pop().unwrap_or_else(|| a.zero()));
    }
    Ok(out)
}
