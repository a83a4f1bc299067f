//! Truncated Laurent series in the single equivariant parameter λ.
//!
//! Series are expanded in ascending powers of λ. A series carries the
//! largest exponent through which its coefficients are known
//! (`truncation_order`); `None` marks an exact Laurent polynomial. Every
//! operation propagates the truncation so that a coefficient that is not
//! actually known can never be read back as zero.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AlgebraError, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    lowest_exponent: i64,
    coefficients: Vec<Rational>,
    truncation_order: Option<i64>,
}

impl LaurentSeries {
    /// The exact zero polynomial.
    pub fn zero() -> Self {
        LaurentSeries {
            lowest_exponent: 0,
            coefficients: Vec::new(),
            truncation_order: None,
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c λ^exponent`, exact.
    pub fn monomial(c: Rational, exponent: i64) -> Self {
        LaurentSeries::from_parts(exponent, vec![c], None)
    }

    /// λ itself.
    pub fn lambda() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// `a + b λ`, exact.
    pub fn linear(a: Rational, b: Rational) -> Self {
        LaurentSeries::from_parts(0, vec![a, b], None)
    }

    /// Coefficient list starting at `lowest_exponent`; normalizes on the way in.
    pub fn from_parts(
        lowest_exponent: i64,
        coefficients: Vec<Rational>,
        truncation_order: Option<i64>,
    ) -> Self {
        let mut s = LaurentSeries {
            lowest_exponent,
            coefficients,
            truncation_order,
        };
        s.normalize();
        s
    }

    pub fn from_terms(terms: &BTreeMap<i64, Rational>, truncation_order: Option<i64>) -> Self {
        let Some((&lo, _)) = terms.iter().next() else {
            return LaurentSeries::from_parts(0, Vec::new(), truncation_order);
        };
        let hi = *terms.keys().next_back().unwrap();
        let mut coefficients = vec![Rational::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coefficients[(e - lo) as usize] = c.clone();
        }
        LaurentSeries::from_parts(lo, coefficients, truncation_order)
    }

    fn normalize(&mut self) {
        if let Some(t) = self.truncation_order {
            let keep = (t - self.lowest_exponent + 1).max(0) as usize;
            self.coefficients.truncate(keep);
        }
        while self.coefficients.last().is_some_and(Rational::is_zero) {
            self.coefficients.pop();
        }
        let lead = self.coefficients.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coefficients.drain(..lead);
            self.lowest_exponent += lead as i64;
        }
        if self.coefficients.is_empty() {
            self.lowest_exponent = 0;
        }
    }

    pub fn truncation_order(&self) -> Option<i64> {
        self.truncation_order
    }

    pub fn is_exact(&self) -> bool {
        self.truncation_order.is_none()
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Exponent of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lowest_exponent)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.lowest_exponent + self.coefficients.len() as i64 - 1)
    }

    /// Lower bound on the true valuation: for a truncated zero the first
    /// unknown slot, for an exact zero `None`.
    pub fn valuation_bound(&self) -> Option<i64> {
        match self.valuation() {
            Some(v) => Some(v),
            None => self.truncation_order.map(|t| t + 1),
        }
    }

    /// Coefficient of λ^exponent; an error if that coefficient lies beyond
    /// the truncation order.
    pub fn coeff(&self, exponent: i64) -> Result<Rational, AlgebraError> {
        if let Some(t) = self.truncation_order {
            if exponent > t {
                return Err(AlgebraError::UnknownCoefficient {
                    exponent,
                    truncation_order: t,
                });
            }
        }
        let idx = exponent - self.lowest_exponent;
        if idx < 0 || idx >= self.coefficients.len() as i64 {
            return Ok(Rational::zero());
        }
        Ok(self.coefficients[idx as usize].clone())
    }

    /// Nonzero terms as an ordered map.
    pub fn terms(&self) -> BTreeMap<i64, Rational> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.lowest_exponent + i as i64, c.clone()))
            .collect()
    }

    /// Forget everything above `order`.
    pub fn truncate(&self, order: i64) -> LaurentSeries {
        let t = match self.truncation_order {
            Some(t) => t.min(order),
            None => order,
        };
        LaurentSeries::from_parts(self.lowest_exponent, self.coefficients.clone(), Some(t))
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let truncation_order = min_opt(self.truncation_order, other.truncation_order);
        if self.is_zero() {
            return LaurentSeries::from_parts(
                other.lowest_exponent,
                other.coefficients.clone(),
                truncation_order,
            );
        }
        if other.is_zero() {
            return LaurentSeries::from_parts(
                self.lowest_exponent,
                self.coefficients.clone(),
                truncation_order,
            );
        }
        let lo = self.lowest_exponent.min(other.lowest_exponent);
        let hi = self.degree().unwrap().max(other.degree().unwrap());
        let mut coefficients = vec![Rational::zero(); (hi - lo + 1) as usize];
        for s in [self, other] {
            let off = (s.lowest_exponent - lo) as usize;
            for (i, c) in s.coefficients.iter().enumerate() {
                coefficients[off + i] += c;
            }
        }
        LaurentSeries::from_parts(lo, coefficients, truncation_order)
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            lowest_exponent: self.lowest_exponent,
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            truncation_order: self.truncation_order,
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> LaurentSeries {
        LaurentSeries::from_parts(
            self.lowest_exponent,
            self.coefficients.iter().map(|x| x * c).collect(),
            self.truncation_order,
        )
    }

    /// Multiply by λ^shift.
    pub fn shift(&self, shift: i64) -> LaurentSeries {
        LaurentSeries {
            lowest_exponent: if self.is_zero() {
                0
            } else {
                self.lowest_exponent + shift
            },
            coefficients: self.coefficients.clone(),
            truncation_order: self.truncation_order.map(|t| t + shift),
        }
    }

    /// Exact product; the result is known through the smaller of each
    /// factor's truncation order shifted by the other factor's valuation.
    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let exact_zero = |s: &LaurentSeries| s.is_zero() && s.is_exact();
        if exact_zero(self) || exact_zero(other) {
            return LaurentSeries::zero();
        }
        let mut truncation_order = None;
        if let (Some(t), Some(v)) = (self.truncation_order, other.valuation_bound()) {
            truncation_order = min_opt(truncation_order, Some(t + v));
        }
        if let (Some(t), Some(v)) = (other.truncation_order, self.valuation_bound()) {
            truncation_order = min_opt(truncation_order, Some(t + v));
        }
        if self.is_zero() || other.is_zero() {
            return LaurentSeries::from_parts(0, Vec::new(), truncation_order);
        }
        let lo = self.lowest_exponent + other.lowest_exponent;
        let mut len = self.coefficients.len() + other.coefficients.len() - 1;
        if let Some(t) = truncation_order {
            len = len.min((t - lo + 1).max(0) as usize);
        }
        let mut coefficients = vec![Rational::zero(); len];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coefficients[i + j] += &(a * b);
            }
        }
        LaurentSeries::from_parts(lo, coefficients, truncation_order)
    }

    /// Multiplicative inverse, expanded far enough that `self * inverse`
    /// is known to equal 1 through λ^order.
    ///
    /// The result is additionally capped by the precision of `self`: a series
    /// known through `t` with valuation `v` has an inverse known through
    /// `t − 2v`.
    pub fn invert(&self, order: i64) -> Result<LaurentSeries, AlgebraError> {
        let Some(v) = self.valuation() else {
            return Err(AlgebraError::NotInvertible);
        };
        let mut trunc = order - v;
        if let Some(t) = self.truncation_order {
            trunc = trunc.min(t - 2 * v);
        }
        let lead = self.coefficients[0].recip()?;
        // b_k is the coefficient of λ^{k - v}
        let count = (trunc + v + 1).max(0) as usize;
        let mut inv: Vec<Rational> = Vec::with_capacity(count);
        for k in 0..count {
            if k == 0 {
                inv.push(lead.clone());
                continue;
            }
            let mut acc = Rational::zero();
            for j in 1..=k.min(self.coefficients.len() - 1) {
                acc += &(&self.coefficients[j] * &inv[k - j]);
            }
            inv.push(-(acc * &lead));
        }
        Ok(LaurentSeries::from_parts(-v, inv, Some(trunc)))
    }

    /// Non-negative integer power.
    pub fn pow(&self, exp: u32) -> LaurentSeries {
        let mut acc = LaurentSeries::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Expansion of `1/(λ − shift)` in descending powers of λ, kept through
    /// the geometric term `shift^order λ^{-order-1}`.
    ///
    /// This is the large-λ (equivalently, nilpotent-shift) expansion used for
    /// kernel insertions; it is an exact finite sum, so the result carries no
    /// truncation order.
    pub fn inverse_linear_at_infinity(shift: &Rational, order: u32) -> LaurentSeries {
        let mut terms = BTreeMap::new();
        let mut p = Rational::one();
        for k in 0..=order as i64 {
            terms.insert(-k - 1, p.clone());
            p = &p * shift;
        }
        LaurentSeries::from_terms(&terms, None)
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Free-function form of [`LaurentSeries::mul`].
pub fn laurent_mul(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    a.mul(b)
}

/// Free-function form of [`LaurentSeries::invert`].
pub fn laurent_invert(a: &LaurentSeries, order: i64) -> Result<LaurentSeries, AlgebraError> {
    a.invert(order)
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match e {
                0 => write!(f, "{c}")?,
                _ => write!(f, "{c}*λ^{e}")?,
            }
        }
        if let Some(t) = self.truncation_order {
            write!(f, " + O(λ^{})", t + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exact series serialize as `{"<exponent>": "p/q", ...}`, ordered by
/// exponent. A truncated series has no faithful form in that schema and
/// refuses to serialize.
impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if let Some(t) = self.truncation_order {
            return Err(serde::ser::Error::custom(format!(
                "refusing to serialize a series truncated at λ^{t}"
            )));
        }
        self.terms().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = BTreeMap::<i64, Rational>::deserialize(deserializer)?;
        Ok(LaurentSeries::from_terms(&terms, None))
    }
}
