//! Integer Laurent polynomials in q with half-integer exponents.
//!
//! Exponents are stored doubled: the key `h` stands for q^(h/2).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(1, 0)
    }

    pub fn monomial(coeff: impl Into<BigInt>, half_exponent: i64) -> Self {
        let c = coeff.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(half_exponent, c);
        }
        LaurentPoly { terms }
    }

    /// q^a − q^(−a) for an integer exponent a.
    pub fn sinh_factor(a: i64) -> Self {
        LaurentPoly::monomial(1, 2 * a) - LaurentPoly::monomial(1, -2 * a)
    }

    /// q^a + q^(−a) for an integer exponent a.
    pub fn cosh_factor(a: i64) -> Self {
        LaurentPoly::monomial(1, 2 * a) + LaurentPoly::monomial(1, -2 * a)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms as (half_exponent, coefficient), ascending.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, half_exponent: i64) -> BigInt {
        self.terms.get(&half_exponent).cloned().unwrap_or_default()
    }

    pub fn max_half_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_half_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// The polynomial with q replaced by q⁻¹.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = LaurentPoly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        let mut out = LaurentPoly::zero();
        for (&e, c) in &self.terms {
            out.add_term(e, c * &k);
        }
        out
    }

    pub fn eval_at(&self, q0: &BigRational) -> Result<BigRational> {
        if q0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let has_half = self.terms.keys().any(|e| e % 2 != 0);
        let (base, step) = if has_half { (rational_sqrt(q0).ok_or(Error::NotASquare)?, 1) } else { (q0.clone(), 2) };
        let mut acc = BigRational::zero();
        for (&e, c) in &self.terms {
            let k = e / step;
            let p = if k >= 0 { pow_rat(&base, k as u64) } else { pow_rat(&base, (-k) as u64).recip() };
            acc += p * BigRational::from_integer(c.clone());
        }
        Ok(acc)
    }

    pub fn to_canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (&e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if e == 0 {
                out.push_str(&a.to_string());
                continue;
            }
            if !a.is_one() {
                out.push_str(&a.to_string());
                out.push('*');
            }
            out.push_str("q^");
            if e % 2 == 0 {
                out.push_str(&(e / 2).to_string());
            } else {
                out.push_str(&format!("{}/2", e));
            }
        }
        out
    }

    pub fn parse(s: &str) -> Result<Self> {
        let err = |m: &str| Error::Parse(format!("{m} in {s:?}"));
        let s = s.trim();
        if s.is_empty() {
            return Err(err("empty polynomial"));
        }
        let mut tokens: Vec<(bool, &str)> = Vec::new();
        let mut rest = s;
        let mut neg = false;
        if let Some(r) = rest.strip_prefix('-') {
            neg = true;
            rest = r;
        }
        loop {
            let next = [" + ", " - "].iter().filter_map(|sep| rest.find(sep).map(|i| (i, *sep))).min();
            match next {
                Some((i, sep)) => {
                    tokens.push((neg, &rest[..i]));
                    neg = sep == " - ";
                    rest = &rest[i + 3..];
                }
                None => {
                    tokens.push((neg, rest));
                    break;
                }
            }
        }
        let mut out = LaurentPoly::zero();
        for (neg, tok) in tokens {
            let (coeff, exp) = match tok.find("q^") {
                None => (tok, None),
                Some(i) => {
                    let c = &tok[..i];
                    let c = if c.is_empty() {
                        "1"
                    } else {
                        c.strip_suffix('*').ok_or_else(|| err("missing '*' before q"))?
                    };
                    (c, Some(&tok[i + 2..]))
                }
            };
            if coeff.is_empty() || !coeff.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err("bad coefficient"));
            }
            let mut c = BigInt::from_str(coeff).map_err(|_| err("bad coefficient"))?;
            if neg {
                c = -c;
            }
            let e = match exp {
                None => 0,
                Some(x) => match x.strip_suffix("/2") {
                    Some(h) => h.parse::<i64>().map_err(|_| err("bad exponent"))?,
                    None => 2 * x.parse::<i64>().map_err(|_| err("bad exponent"))?,
                },
            };
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Every exponent κ is an integer and κ ≡ 𝒜 mod 4 (𝒜 given doubled).
    pub fn exponents_congruent(&self, doubled_area: i64) -> bool {
        self.terms.keys().all(|&h| h % 2 == 0 && (h / 2 - doubled_area / 2).rem_euclid(4) == 0)
            && doubled_area % 2 == 0
    }
}

fn pow_rat(b: &BigRational, n: u64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..n {
        out *= b;
    }
    out
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LaurentPoly::parse(s)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(LaurentPoly::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for LaurentPoly {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(LaurentPoly::one(), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn monomials() {
        assert_eq!(LaurentPoly::monomial(1, 4).to_string(), "q^2");
        assert_eq!(LaurentPoly::monomial(-2, -8).to_string(), "-2*q^-4");
        assert!(LaurentPoly::monomial(0, 6).is_zero());
    }

    #[test]
    fn ring_examples() {
        assert!((p("q^2") + p("-q^2")).is_zero());
        assert_eq!(p("q^2 - q^-2") + p("q^2 + q^-2"), p("2*q^2"));
        assert_eq!(p("q^2 - q^-2") + LaurentPoly::zero(), p("q^2 - q^-2"));
        assert_eq!(p("q^2 - q^-2") * p("q^2 - q^-2"), p("q^4 - 2 + q^-4"));
        assert_eq!(p("q^4 - 2 + q^-4") * p("q^4 + q^-4"), p("q^8 - 2*q^4 + 2 - 2*q^-4 + q^-8"));
        assert_eq!(p("3*q^1/2") * LaurentPoly::one(), p("3*q^1/2"));
    }

    #[test]
    fn evaluation() {
        let f = p("q^2 - q^-2");
        assert_eq!(f.eval_at(&rat(1, 1)), Ok(rat(0, 1)));
        assert_eq!(f.eval_at(&rat(2, 1)), Ok(rat(15, 4)));
        assert_eq!(f.eval_at(&rat(0, 1)), Err(Error::DivisionByZero));
        assert_eq!(p("q^1/2").eval_at(&rat(4, 9)), Ok(rat(2, 3)));
        assert_eq!(p("q^1/2").eval_at(&rat(2, 1)), Err(Error::NotASquare));
    }

    #[test]
    fn canonical_strings() {
        let f = LaurentPoly::sinh_factor(2) * LaurentPoly::sinh_factor(2) * LaurentPoly::cosh_factor(4);
        assert_eq!(f.to_string(), "q^8 - 2*q^4 + 2 - 2*q^-4 + q^-8");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(LaurentPoly::monomial(3, 1).to_string(), "3*q^1/2");
        assert_eq!(LaurentPoly::monomial(-1, -3).to_string(), "-q^-3/2");
        assert_eq!(LaurentPoly::monomial(-5, 0).to_string(), "-5");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(LaurentPoly::parse("").is_err());
        assert!(LaurentPoly::parse("q^x").is_err());
        assert!(LaurentPoly::parse("2q^2").is_err());
        assert!(LaurentPoly::parse("1 +").is_err());
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-12i64..12, -20i64..20), 0..6).prop_map(|ts| {
            ts.into_iter().map(|(e, c)| LaurentPoly::monomial(c, e)).sum()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn round_trip(a in arb_poly()) {
            prop_assert_eq!(LaurentPoly::parse(&a.to_canonical_string()).unwrap(), a);
        }

        #[test]
        fn degree_additivity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let ab = &a * &b;
            prop_assert_eq!(ab.max_half_exponent(), Some(a.max_half_exponent().unwrap() + b.max_half_exponent().unwrap()));
        }
    }
}
