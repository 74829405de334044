//! Univariate Laurent polynomials with integer exponents.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<S> {
    terms: BTreeMap<i64, S>,
}

impl<S: Scalar> Default for Laurent<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Laurent<S> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }
    pub fn monomial(c: S, k: i64) -> Self {
        let mut l = Self::zero();
        l.add_term(k, c);
        l
    }
    pub fn constant(c: S) -> Self {
        Self::monomial(c, 0)
    }
    pub fn from_terms(it: impl IntoIterator<Item = (i64, S)>) -> Self {
        let mut l = Self::zero();
        for (k, c) in it {
            l.add_term(k, c);
        }
        l
    }
    pub fn add_term(&mut self, k: i64, c: S) {
        if c.is_exact_zero() {
            return;
        }
        let v = match self.terms.remove(&k) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_exact_zero() {
            self.terms.insert(k, v);
        }
    }
    pub fn coeff(&self, k: i64) -> S {
        self.terms.get(&k).cloned().unwrap_or_else(S::zero)
    }
    pub fn terms(&self) -> impl Iterator<Item = (i64, &S)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().last().copied()
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(*k, c.clone());
        }
        r
    }
    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, x)| (*k, x.clone() * c.clone())))
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                r.add_term(a + b, x.clone() * y.clone());
            }
        }
        r
    }
    /// Multiply by the variable to the power `k`.
    pub fn shift(&self, k: i64) -> Self {
        Laurent { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }
    /// Substitute x -> -x.
    pub fn negate_var(&self) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(k, c)| (*k, if k.rem_euclid(2) == 1 { -c.clone() } else { c.clone() })),
        )
    }
    /// Coefficientwise conjugation.
    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, c.conj())))
    }
    pub fn derivative(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (k - 1, c.clone() * S::from_i64(*k))))
    }
    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for (k, c) in &self.terms {
            acc = acc + c.clone() * x.pow_i(*k);
        }
        acc
    }
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Laurent<T> {
        Laurent::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }
    /// Drop coefficients that are negligible relative to the largest one.
    pub fn cleaned(&self) -> Self {
        let scale = self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max);
        Laurent {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| !c.negligible(scale))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }
}

impl<S: Scalar> fmt::Display for Laurent<S> {
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
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{k}")?,
            }
        }
        Ok(())
    }
}
