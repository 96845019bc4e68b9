use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::poly::{Coeff, Monomial, MultiPoly, RatPoly, Var};
use crate::error::{Error, Result};

/// Wire form: `{"vars": [...], "terms": [{"exp": [...], "num": "...", "den": "..."}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub num: String,
    pub den: String,
}

/// Coefficients that can be written as a numerator/denominator pair.
pub trait AsFraction {
    fn fraction(&self) -> (BigInt, BigInt);
}

impl AsFraction for BigInt {
    fn fraction(&self) -> (BigInt, BigInt) {
        (self.clone(), BigInt::one())
    }
}

impl AsFraction for BigRational {
    fn fraction(&self) -> (BigInt, BigInt) {
        (self.numer().clone(), self.denom().clone())
    }
}

pub fn poly_to_json<C: Coeff + AsFraction>(p: &MultiPoly<C>) -> PolyJson {
    let vars = p.vars();
    let terms = p
        .terms()
        .map(|(m, c)| {
            let (num, den) = c.fraction();
            TermJson {
                exp: vars.iter().map(|&v| m.exponent(v)).collect(),
                num: num.to_string(),
                den: den.to_string(),
            }
        })
        .collect();
    PolyJson {
        vars: vars.iter().map(Var::name).collect(),
        terms,
    }
}

pub fn poly_from_json(j: &PolyJson) -> Result<RatPoly> {
    let vars: Vec<Var> = j
        .vars
        .iter()
        .map(|s| Var::parse(s))
        .collect::<Result<_>>()?;
    let mut out = RatPoly::zero();
    for t in &j.terms {
        if t.exp.len() != vars.len() {
            return Err(Error::Invalid(format!(
                "term has {} exponents for {} variables",
                t.exp.len(),
                vars.len()
            )));
        }
        let num: BigInt = t
            .num
            .parse()
            .map_err(|_| Error::Invalid(format!("bad numerator {:?}", t.num)))?;
        let den: BigInt = t
            .den
            .parse()
            .map_err(|_| Error::Invalid(format!("bad denominator {:?}", t.den)))?;
        if den <= BigInt::from(0) {
            return Err(Error::Invalid("denominator must be positive".into()));
        }
        let m = Monomial::from_pairs(vars.iter().copied().zip(t.exp.iter().copied()));
        out.add_term(m, BigRational::new(num, den));
    }
    Ok(out)
}
