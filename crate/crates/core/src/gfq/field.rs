use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which log/antilog tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Element of 𝔽_{p^m}, packed as the integer `Σ c_i p^i` of its power-basis
/// coordinates. Elements of the prime field are exactly the values `< p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqElement(pub u32);

impl FqElement {
    pub const ZERO: FqElement = FqElement(0);
    pub const ONE: FqElement = FqElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// 𝔽_{p^m} with a fixed monic irreducible modulus.
pub struct FqField {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    /// exp[i] = g^i for a primitive element g, i in 0..q-1
    exp: Vec<u32>,
    /// log[a] for a != 0
    log: Vec<u32>,
    /// p^i for i in 0..m
    place: Vec<u32>,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.m, self.modulus)
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FqField {}

/// Wire form `{"p": 2, "m": 2, "modulus": [1, 1, 1]}` (little-endian).
/// An omitted modulus selects the default one for `(p, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u32,
    pub m: u32,
    #[serde(default)]
    pub modulus: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn field_cache() -> &'static Mutex<HashMap<(u32, Vec<u32>), Arc<FqField>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, Vec<u32>), Arc<FqField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn lex_cache() -> &'static Mutex<HashMap<(u32, u32), Vec<u32>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Vec<u32>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

// --- dense polynomials over 𝔽_p, little-endian, used only at construction ---

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (factor as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    mod_pow(a, p - 2, p)
}

fn mod_pow(a: u32, mut e: u32, p: u32) -> u32 {
    let (mut base, mut acc) = (a as u64 % p as u64, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn digits(mut k: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (k % p as u64) as u32;
            k /= p as u64;
            d
        })
        .collect()
}

/// Brute-force irreducibility: no monic factor of degree `1..=deg/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = trim(f.to_vec());
    let deg = match f.len() {
        0 => return false,
        n => n - 1,
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for k in 0..(p as u64).pow(d as u32) {
            let mut g = digits(k, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `m`
/// (least packed value of the low coefficients). For `m = 1` this is `x`.
pub fn lex_least_irreducible(p: u32, m: u32) -> Vec<u32> {
    if let Some(f) = lex_cache().lock().expect("cache").get(&(p, m)) {
        return f.clone();
    }
    let f = if m == 1 {
        vec![0, 1]
    } else {
        (0..(p as u64).pow(m))
            .map(|k| {
                let mut f = digits(k, p, m as usize);
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree")
    };
    lex_cache().lock().expect("cache").insert((p, m), f.clone());
    f
}

impl FqField {
    /// Deterministic 𝔽_{p^m} with the lexicographically least modulus.
    pub fn new(p: u32, m: u32) -> Result<Arc<FqField>> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::Invalid("extension degree must be positive".into()));
        }
        Self::check_order(p, m)?;
        Self::with_modulus(p, lex_least_irreducible(p, m))
    }

    fn check_order(p: u32, m: u32) -> Result<u32> {
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(Error::Invalid(format!(
                "field of order {p}^{m} exceeds the supported size"
            )));
        }
        Ok(q as u32)
    }

    /// Field with an explicit monic irreducible modulus (little-endian).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Arc<FqField>> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let modulus = trim(modulus);
        if modulus.len() < 2 || *modulus.last().expect("nonempty") != 1 {
            return Err(Error::Invalid(
                "modulus must be monic of degree >= 1".into(),
            ));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::Invalid(
                "modulus coefficients must be reduced mod p".into(),
            ));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::Invalid(format!("{modulus:?} is reducible mod {p}")));
        }
        let key = (p, modulus.clone());
        if let Some(f) = field_cache().lock().expect("cache").get(&key) {
            return Ok(f.clone());
        }
        let m = (modulus.len() - 1) as u32;
        let q = Self::check_order(p, m)?;
        let place: Vec<u32> = (0..m).map(|i| p.pow(i)).collect();
        let field = Arc::new(Self::build_tables(p, m, q, modulus, place));
        field_cache()
            .lock()
            .expect("cache")
            .insert(key, field.clone());
        Ok(field)
    }

    fn build_tables(p: u32, m: u32, q: u32, modulus: Vec<u32>, place: Vec<u32>) -> FqField {
        let slow_mul = |a: u32, b: u32| -> u32 {
            let da = digits(a as u64, p, m as usize);
            let db = digits(b as u64, p, m as usize);
            let mut prod = vec![0u32; 2 * m as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let r = poly_rem(&prod, &modulus, p);
            r.iter().enumerate().map(|(i, &c)| c * place[i]).sum()
        };
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![0u32; q as usize];
        'search: for g in 1..q {
            exp.clear();
            let mut x = 1u32;
            for i in 0..(q - 1) {
                if i > 0 && x == 1 {
                    continue 'search;
                }
                exp.push(x);
                log[x as usize] = i;
                x = slow_mul(x, g);
            }
            break;
        }
        FqField {
            p,
            m,
            q,
            modulus,
            exp,
            log,
            place,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            p: self.p,
            m: self.m,
            modulus: self.modulus.clone(),
        }
    }

    pub fn from_json(j: &FieldJson) -> Result<Arc<FqField>> {
        if j.modulus.is_empty() {
            return Self::new(j.p, j.m);
        }
        let f = Self::with_modulus(j.p, j.modulus.clone())?;
        if f.m != j.m {
            return Err(Error::Invalid(format!(
                "modulus has degree {} but m = {}",
                f.m, j.m
            )));
        }
        Ok(f)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElement> {
        (0..self.q).map(FqElement)
    }

    pub fn from_int(&self, n: i64) -> FqElement {
        FqElement(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FqElement> {
        if coords.len() > self.m as usize || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::Invalid(format!(
                "{coords:?} is not a coordinate vector of GF({}^{})",
                self.p, self.m
            )));
        }
        Ok(FqElement(
            coords
                .iter()
                .enumerate()
                .map(|(i, &c)| c * self.place[i])
                .sum(),
        ))
    }

    pub fn coords(&self, a: FqElement) -> Vec<u32> {
        digits(a.0 as u64, self.p, self.m as usize)
    }

    /// The power-basis generator (class of `x` modulo the modulus).
    pub fn generator(&self) -> FqElement {
        if self.m == 1 {
            // x ≡ -c_0
            FqElement((self.p - self.modulus[0]) % self.p)
        } else {
            FqElement(self.p)
        }
    }

    pub fn is_in_prime_field(&self, a: FqElement) -> bool {
        a.0 < self.p
    }

    pub fn add(&self, a: FqElement, b: FqElement) -> FqElement {
        if self.p == 2 {
            return FqElement(a.0 ^ b.0);
        }
        if self.m == 1 {
            return FqElement((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FqElement(out)
    }

    pub fn neg(&self, a: FqElement) -> FqElement {
        if self.p == 2 {
            return a;
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FqElement(out)
    }

    pub fn sub(&self, a: FqElement, b: FqElement) -> FqElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElement, b: FqElement) -> FqElement {
        if a.0 == 0 || b.0 == 0 {
            return FqElement::ZERO;
        }
        let n = self.q - 1;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FqElement(self.exp[(if s >= n { s - n } else { s }) as usize])
    }

    pub fn inv(&self, a: FqElement) -> Result<FqElement> {
        if a.is_zero() {
            return Err(Error::Precondition("inverse of zero".into()));
        }
        let n = self.q - 1;
        Ok(FqElement(
            self.exp[((n - self.log[a.0 as usize]) % n) as usize],
        ))
    }

    pub fn div(&self, a: FqElement, b: FqElement) -> Result<FqElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElement, e: u64) -> FqElement {
        if e == 0 {
            return FqElement::ONE;
        }
        if a.is_zero() {
            return FqElement::ZERO;
        }
        let n = (self.q - 1) as u64;
        FqElement(self.exp[((self.log[a.0 as usize] as u64 * (e % n)) % n) as usize])
    }

    /// `a^{p^k}`; negative `k` applies the inverse automorphism.
    pub fn frobenius(&self, a: FqElement, k: i64) -> FqElement {
        let k = k.rem_euclid(self.m as i64) as u32;
        if k == 0 || a.is_zero() {
            return a;
        }
        let n = (self.q - 1) as u64;
        let e = (self.p as u64).pow(k) % n;
        FqElement(self.exp[((self.log[a.0 as usize] as u64 * e) % n) as usize])
    }

    /// Sum of scalar multiples, `Σ c_i v_i` over index pairs.
    pub fn dot(&self, a: &[FqElement], b: &[FqElement]) -> FqElement {
        a.iter().zip(b).fold(FqElement::ZERO, |acc, (&x, &y)| {
            self.add(acc, self.mul(x, y))
        })
    }

    pub fn vadd(&self, a: &[FqElement], b: &[FqElement]) -> Vec<FqElement> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn vsub(&self, a: &[FqElement], b: &[FqElement]) -> Vec<FqElement> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    pub fn vneg(&self, a: &[FqElement]) -> Vec<FqElement> {
        a.iter().map(|&x| self.neg(x)).collect()
    }

    pub fn vscale(&self, c: FqElement, a: &[FqElement]) -> Vec<FqElement> {
        a.iter().map(|&x| self.mul(c, x)).collect()
    }

    /// `acc += c * a`
    pub fn vaxpy(&self, acc: &mut [FqElement], c: FqElement, a: &[FqElement]) {
        if c.is_zero() {
            return;
        }
        for (x, &y) in acc.iter_mut().zip(a) {
            *x = self.add(*x, self.mul(c, y));
        }
    }

    pub fn vfrob(&self, a: &[FqElement], k: i64) -> Vec<FqElement> {
        a.iter().map(|&x| self.frobenius(x, k)).collect()
    }

    /// Element for display: packed digits as a coordinate list.
    pub fn show(&self, a: FqElement) -> String {
        if self.m == 1 {
            a.0.to_string()
        } else {
            format!("{:?}", self.coords(a))
        }
    }
}

/// Embedding 𝔽_{p^a} ↪ 𝔽_{p^b} sending the small field's generator to the
/// least root (by packed value) of its modulus in the large field.
#[derive(Clone)]
pub struct FieldEmbedding {
    pub small: Arc<FqField>,
    pub large: Arc<FqField>,
    images: Vec<FqElement>,
    preimages: HashMap<FqElement, FqElement>,
}

impl fmt::Debug for FieldEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.small, self.large)
    }
}

impl FieldEmbedding {
    pub fn new(small: Arc<FqField>, large: Arc<FqField>) -> Result<Self> {
        if small.p != large.p || large.m % small.m != 0 {
            return Err(Error::Invalid(format!(
                "no embedding of {small:?} into {large:?}"
            )));
        }
        let eval = |x: FqElement| {
            small.modulus.iter().rev().fold(FqElement::ZERO, |acc, &c| {
                large.add(large.mul(acc, x), large.from_int(c as i64))
            })
        };
        let root = large
            .elements()
            .find(|&x| eval(x).is_zero())
            .ok_or_else(|| Error::Invalid("modulus has no root in the larger field".into()))?;
        let images: Vec<FqElement> = small
            .elements()
            .map(|a| {
                small
                    .coords(a)
                    .iter()
                    .rev()
                    .fold(FqElement::ZERO, |acc, &c| {
                        large.add(large.mul(acc, root), large.from_int(c as i64))
                    })
            })
            .collect();
        let preimages = images
            .iter()
            .enumerate()
            .map(|(i, &img)| (img, FqElement(i as u32)))
            .collect();
        Ok(FieldEmbedding {
            small,
            large,
            images,
            preimages,
        })
    }

    pub fn identity(field: Arc<FqField>) -> Self {
        let images: Vec<FqElement> = field.elements().collect();
        let preimages = images.iter().map(|&a| (a, a)).collect();
        FieldEmbedding {
            small: field.clone(),
            large: field,
            images,
            preimages,
        }
    }

    pub fn apply(&self, a: FqElement) -> FqElement {
        self.images[a.0 as usize]
    }

    pub fn apply_vec(&self, a: &[FqElement]) -> Vec<FqElement> {
        a.iter().map(|&x| self.apply(x)).collect()
    }

    /// Inverse on the image; `None` outside it.
    pub fn preimage(&self, a: FqElement) -> Option<FqElement> {
        self.preimages.get(&a).copied()
    }

    /// Composition `self` then `next`.
    pub fn then(&self, next: &FieldEmbedding) -> Result<FieldEmbedding> {
        if next.small != self.large {
            return Err(Error::Invalid("embeddings do not compose".into()));
        }
        let images: Vec<FqElement> = self.images.iter().map(|&x| next.apply(x)).collect();
        let preimages = images
            .iter()
            .enumerate()
            .map(|(i, &img)| (img, FqElement(i as u32)))
            .collect();
        Ok(FieldEmbedding {
            small: self.small.clone(),
            large: next.large.clone(),
            images,
            preimages,
        })
    }
}
