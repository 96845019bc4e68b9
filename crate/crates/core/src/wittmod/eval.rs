use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exact::{Block, ModPoly};
use crate::gfq::FqElement;
use crate::ppolar::PPolarAlgebra;
use crate::wittuniv::{reduce_mod_p, universal_polys, WittKind};

#[derive(Clone, Debug)]
struct Term {
    coeff: u32,
    scalars: Vec<(usize, u32)>,
    /// (block, index, exponent)
    polar: Vec<(usize, usize, u32)>,
    degree: usize,
}

/// A mod-p polynomial prepared for evaluation on p-polar algebras: Witt
/// blocks are polar variables, the scalar block takes field values.
#[derive(Clone, Debug)]
pub struct PolarEvaluator {
    p: u32,
    terms: Vec<Term>,
}

impl PolarEvaluator {
    pub fn new(poly: &ModPoly) -> Result<Self> {
        let p = poly.p;
        let mut terms = Vec::with_capacity(poly.len());
        for (m, c) in poly.terms().iter().map(|(m, c)| (m, *c)) {
            let mut t = Term {
                coeff: c,
                scalars: Vec::new(),
                polar: Vec::new(),
                degree: 0,
            };
            for &(v, e) in m.pairs() {
                match v.block {
                    Block::Witt(j) => {
                        t.polar.push((j as usize, v.index as usize, e));
                        t.degree += e as usize;
                    }
                    Block::Scalar => t.scalars.push((v.index as usize, e)),
                    Block::Free => {
                        return Err(Error::Invalid(format!(
                            "free generator {v} cannot be evaluated"
                        )))
                    }
                }
            }
            if t.degree == 0 || (t.degree - 1) % (p as usize - 1) != 0 {
                return Err(Error::LengthNotAdmissible { len: t.degree, p });
            }
            terms.push(t);
        }
        Ok(PolarEvaluator { p, terms })
    }

    /// Evaluates with `blocks[j][i]` bound to the Witt variable of block `j`,
    /// index `i`, and `scalars[i]` to `a_i`.
    pub fn eval(
        &self,
        a: &PPolarAlgebra,
        blocks: &[&[Vec<FqElement>]],
        scalars: &[FqElement],
    ) -> Vec<FqElement> {
        let f = a.field();
        debug_assert_eq!(f.p(), self.p);
        let mut out = a.zero();
        'terms: for t in &self.terms {
            let mut c = f.from_int(t.coeff as i64);
            for &(i, e) in &t.scalars {
                let s = scalars[i];
                if s.is_zero() {
                    continue 'terms;
                }
                c = f.mul(c, f.pow(s, e as u64));
            }
            let mut args: Vec<&[FqElement]> = Vec::with_capacity(t.degree);
            for &(j, i, e) in &t.polar {
                let v = &blocks[j][i];
                if v.iter().all(|x| x.is_zero()) {
                    continue 'terms;
                }
                for _ in 0..e {
                    args.push(v);
                }
            }
            let prod = a.mu_eval(&args).expect("admissible degree");
            f.vaxpy(&mut out, c, &prod);
        }
        out
    }
}

type Key = (u32, usize, WittKind);

/// Evaluators for the reduced universal polynomials of one family.
pub fn evaluators(p: u32, n: usize, kind: WittKind) -> Result<Arc<Vec<PolarEvaluator>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<PolarEvaluator>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("cache lock").get(&(p, n, kind)) {
        return Ok(hit.clone());
    }
    let polys = universal_polys(p, n, kind)?;
    let evs = reduce_mod_p(&polys)
        .iter()
        .map(PolarEvaluator::new)
        .collect::<Result<Vec<_>>>()?;
    let evs = Arc::new(evs);
    cache
        .lock()
        .expect("cache lock")
        .insert((p, n, kind), evs.clone());
    Ok(evs)
}
