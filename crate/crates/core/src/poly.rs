//! Trigonometric polynomials on spacetime.
//!
//! A `TrigPoly` is a finite sum `Σ c · e^{i k x^0} · x^α` over `N` real
//! coordinates. Pure polynomials have every `k = 0`; the periodic factor in
//! the `x^0` direction is only used once `x^0` is identified with time.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::{GaussianRational, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct PolyKey {
    /// Frequency `k` of the factor `e^{i k x^0}`.
    pub freq: i64,
    pub exps: MultiIndex,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TrigPoly {
    n: usize,
    terms: BTreeMap<PolyKey, GaussianRational>,
}

impl TrigPoly {
    pub fn zero(n: usize) -> Self {
        TrigPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: GaussianRational) -> Self {
        Self::term(n, c, 0, MultiIndex::zero(n))
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, GaussianRational::one())
    }

    /// `c · e^{i freq x^0} · x^exps`.
    pub fn term(n: usize, c: GaussianRational, freq: i64, exps: MultiIndex) -> Self {
        assert_eq!(exps.dim(), n);
        let mut p = Self::zero(n);
        p.add_term(PolyKey { freq, exps }, c);
        p
    }

    pub fn monomial(n: usize, c: GaussianRational, exps: &[u32]) -> Self {
        Self::term(n, c, 0, MultiIndex(exps.to_vec()))
    }

    /// The coordinate function `x^mu`.
    pub fn var(n: usize, mu: usize) -> Self {
        Self::term(n, GaussianRational::one(), 0, MultiIndex::unit(n, mu))
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolyKey, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: PolyKey, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        TrigPoly { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    /// True if no `e^{i k x^0}` factor with `k != 0` occurs.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|k| k.freq == 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.exps.order()).max().unwrap_or(0)
    }

    /// `∂_mu` of the function.
    pub fn deriv(&self, mu: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            if mu == 0 && k.freq != 0 {
                let f = GaussianRational::new(Rational::zero(), Rational::from_integer(k.freq.into()));
                out.add_term(k.clone(), c * &f);
            }
            let e = k.exps[mu];
            if e > 0 {
                let key = PolyKey { freq: k.freq, exps: k.exps.minus_unit(mu).unwrap() };
                out.add_term(key, c * &GaussianRational::from_int(e as i64));
            }
        }
        out
    }

    /// `∂_m = ∂_0^{m_0} .. ∂_{N-1}^{m_{N-1}}`.
    pub fn deriv_multi(&self, m: &MultiIndex) -> Self {
        let mut p = self.clone();
        for (mu, &k) in m.0.iter().enumerate() {
            for _ in 0..k {
                p = p.deriv(mu);
            }
        }
        p
    }

    /// Exact value at a rational point; requires a pure polynomial.
    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        if point.len() != self.n {
            return Err(EngineError::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let mut acc = GaussianRational::zero();
        for (k, c) in &self.terms {
            if k.freq != 0 {
                return Err(EngineError::InvalidInput(
                    "cannot evaluate e^{ik x^0} at a rational point".into(),
                ));
            }
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&k.exps.0) {
                t = &t * &x.pow(e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Largest `|k|` among periodic factors.
    pub fn max_freq(&self) -> i64 {
        self.terms.keys().map(|k| k.freq.abs()).max().unwrap_or(0)
    }
}

impl<'a> Add<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn add(self, o: &TrigPoly) -> TrigPoly {
        assert_eq!(self.n, o.n, "TrigPoly dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn sub(self, o: &TrigPoly) -> TrigPoly {
        assert_eq!(self.n, o.n, "TrigPoly dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn mul(self, o: &TrigPoly) -> TrigPoly {
        assert_eq!(self.n, o.n, "TrigPoly dimension mismatch");
        let mut out = TrigPoly::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let key = PolyKey { freq: a.freq + b.freq, exps: &a.exps + &b.exps };
                out.add_term(key, ca * cb);
            }
        }
        out
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl Zero for TrigPoly {
    // `Zero` needs a dimension-free zero; a 0-variable zero adds as identity
    // only with itself, so arithmetic code always builds zeros via `zero(n)`.
    fn zero() -> Self {
        TrigPoly::zero(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for TrigPoly {
    type Output = TrigPoly;
    fn add(self, o: TrigPoly) -> TrigPoly {
        if self.n == 0 && self.terms.is_empty() {
            return o;
        }
        if o.n == 0 && o.terms.is_empty() {
            return self;
        }
        &self + &o
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if k.freq != 0 {
                write!(f, "·e^{{{}i x0}}", k.freq)?;
            }
            for (mu, &e) in k.exps.0.iter().enumerate() {
                if e == 1 {
                    write!(f, "·x{mu}")?;
                } else if e > 1 {
                    write!(f, "·x{mu}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gc, gr};

    #[test]
    fn derivative_rules() {
        // ∂_0 (x0^2 x1) = 2 x0 x1
        let p = TrigPoly::monomial(2, gr(1, 1), &[2, 1]);
        assert_eq!(p.deriv(0), TrigPoly::monomial(2, gr(2, 1), &[1, 1]));
        // ∂_0 e^{3i x0} x0 = 3i e^{3ix0} x0 + e^{3ix0}
        let q = TrigPoly::term(1, gr(1, 1), 3, MultiIndex(vec![1]));
        let expect = &TrigPoly::term(1, gc(0, 3), 3, MultiIndex(vec![1]))
            + &TrigPoly::term(1, gr(1, 1), 3, MultiIndex(vec![0]));
        assert_eq!(q.deriv(0), expect);
    }

    #[test]
    fn leibniz_rule() {
        let a = &TrigPoly::monomial(2, gr(3, 2), &[2, 1]) + &TrigPoly::term(2, gc(1, 1), -2, MultiIndex(vec![0, 2]));
        let b = &TrigPoly::monomial(2, gr(-1, 1), &[1, 3]) + &TrigPoly::term(2, gr(1, 1), 1, MultiIndex(vec![1, 0]));
        for mu in 0..2 {
            assert_eq!((&a * &b).deriv(mu), &(&a.deriv(mu) * &b) + &(&a * &b.deriv(mu)));
        }
    }

    #[test]
    fn evaluation() {
        let p = &TrigPoly::monomial(2, gr(1, 1), &[2, 1]) + &TrigPoly::constant(2, gr(1, 2));
        assert_eq!(p.eval(&[gr(2, 1), gr(3, 1)]).unwrap(), gr(25, 2));
        assert!(TrigPoly::term(1, gr(1, 1), 1, MultiIndex(vec![0])).eval(&[gr(0, 1)]).is_err());
    }
}
