//! Polynomials in `x` and Laurent polynomials in `y` with rational
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::rational::{to_f64, Rational};
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// Sparse map `(x-degree, y-degree) -> coefficient`; zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BiLaurent {
    terms: BTreeMap<(u32, i32), Rational>,
}

impl BiLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, x_deg: u32, y_deg: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((x_deg, y_deg), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn y_inv() -> Self {
        Self::monomial(Rational::one(), 0, -1)
    }

    /// Embeds a polynomial in `x` (no `y` dependence).
    pub fn from_x_poly(p: &UniPoly) -> Self {
        Self::from_y_coeffs_at(p, 0)
    }

    /// `p(x) * y^k`.
    pub fn from_y_coeffs_at(p: &UniPoly, k: i32) -> Self {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| ((i as u32, k), c.clone()))
            .collect();
        Self { terms }
    }

    /// `Σ_k coeffs[k](x) * y^(k + offset)`.
    pub fn from_poly_in_y(coeffs: &[UniPoly], offset: i32) -> Self {
        let mut out = Self::zero();
        for (k, p) in coeffs.iter().enumerate() {
            out = out + Self::from_y_coeffs_at(p, k as i32 + offset);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i32, &Rational)> {
        self.terms.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, x_deg: u32, y_deg: i32) -> Rational {
        self.terms
            .get(&(x_deg, y_deg))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn y_min(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).min()
    }

    pub fn y_max(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn is_y_free(&self) -> bool {
        self.terms.keys().all(|k| k.1 == 0)
    }

    pub fn is_x_free(&self) -> bool {
        self.terms.keys().all(|k| k.0 == 0)
    }

    /// Coefficient of `y^k` as a polynomial in `x`.
    pub fn y_coeff(&self, k: i32) -> UniPoly {
        let deg = self
            .terms
            .keys()
            .filter(|key| key.1 == k)
            .map(|key| key.0 as usize)
            .max();
        let Some(deg) = deg else {
            return UniPoly::zero();
        };
        let mut c = vec![Rational::zero(); deg + 1];
        for (&(a, b), v) in &self.terms {
            if b == k {
                c[a as usize] = v.clone();
            }
        }
        UniPoly::new(c)
    }

    /// The polynomial in `x` when `self` has no `y` dependence.
    pub fn to_x_poly(&self) -> Option<UniPoly> {
        self.is_y_free().then(|| self.y_coeff(0))
    }

    /// Multiplies by `y^k`.
    pub fn shift_y(&self, k: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a, b + k), c.clone()))
                .collect(),
        }
    }

    /// Multiplies by the smallest power of `y` that makes every exponent
    /// nonnegative (and the lowest one zero). Returns the shifted polynomial
    /// and the power used.
    pub fn clear_y(&self) -> (Self, i32) {
        let k = -self.y_min().unwrap_or(0);
        (self.shift_y(k), k)
    }

    /// Coefficients in `y` (lowest first) as polynomials in `x`.
    ///
    /// Requires every `y` exponent to be nonnegative.
    pub fn as_poly_in_y(&self) -> Result<Vec<UniPoly>> {
        if let Some(lo) = self.y_min() {
            if lo < 0 {
                return Err(Error::Contract(format!(
                    "negative y-degree {lo} where a polynomial in y is required"
                )));
            }
        }
        let hi = self.y_max().unwrap_or(-1);
        Ok((0..=hi).map(|k| self.y_coeff(k)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        if y.is_zero() && self.y_min().is_some_and(|k| k < 0) {
            return Err(Error::Contract("evaluation at y = 0 of a Laurent tail".into()));
        }
        let mut acc = Rational::zero();
        for (&(a, b), c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..a {
                term *= x;
            }
            if b >= 0 {
                for _ in 0..b {
                    term *= y;
                }
            } else {
                for _ in 0..(-b) {
                    term /= y;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| to_f64(c) * x.powu(a) * y.powi(b))
            .sum()
    }

    /// Substitutes a rational value for `x`, leaving a Laurent polynomial in `y`.
    pub fn eval_x(&self, x: &Rational) -> Self {
        let mut out = BTreeMap::<(u32, i32), Rational>::new();
        for (&(a, b), c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..a {
                term *= x;
            }
            *out.entry((0, b)).or_insert_with(Rational::zero) += term;
        }
        out.retain(|_, v| !v.is_zero());
        Self { terms: out }
    }

    /// Coefficients in `y` at a complex `x`, lowest `y`-degree first,
    /// together with that lowest degree.
    pub fn y_coeffs_at_complex(&self, x: Complex64) -> (Vec<Complex64>, i32) {
        let lo = self.y_min().unwrap_or(0);
        let hi = self.y_max().unwrap_or(0);
        let mut out = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (&(a, b), c) in &self.terms {
            out[(b - lo) as usize] += to_f64(c) * x.powu(a);
        }
        (out, lo)
    }

    pub fn derivative_x(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.0 > 0)
            .map(|(&(a, b), c)| ((a - 1, b), c * Rational::from_integer(a.into())))
            .collect();
        Self { terms }
    }

    pub fn derivative_y(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.1 != 0)
            .map(|(&(a, b), c)| ((a, b - 1), c * Rational::from_integer(b.into())))
            .collect();
        Self { terms }
    }

    /// Division in `y` by a divisor whose highest `y`-coefficient is a nonzero
    /// constant, so no fractions in `x` arise. Both operands must be
    /// polynomials in `y`. Returns `(quotient, remainder)` with
    /// `deg_y remainder < deg_y divisor`.
    pub fn div_rem_y(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d = divisor.as_poly_in_y()?;
        let Some(lead) = d.last() else {
            return Err(Error::Contract("division by zero polynomial".into()));
        };
        if !lead.is_constant() {
            return Err(Error::Contract(
                "divisor's leading y-coefficient must be constant".into(),
            ));
        }
        let inv = lead.lead().recip();
        let dd = d.len() - 1;
        let mut rem = self.as_poly_in_y()?;
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quo = vec![UniPoly::zero(); rem.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = rem[k + dd].scale(&inv);
            if !c.is_zero() {
                for (j, dc) in d.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&c * dc);
                }
            }
            quo[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::from_poly_in_y(&quo, 0), Self::from_poly_in_y(&rem, 0)))
    }
}

impl fmt::Debug for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| format!("({c})x^{a}y^{b}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add<&BiLaurent> for &BiLaurent {
    type Output = BiLaurent;
    fn add(self, rhs: &BiLaurent) -> BiLaurent {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            let e = terms.entry(*k).or_insert_with(Rational::zero);
            *e += v;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        BiLaurent { terms }
    }
}

impl Sub<&BiLaurent> for &BiLaurent {
    type Output = BiLaurent;
    fn sub(self, rhs: &BiLaurent) -> BiLaurent {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            let e = terms.entry(*k).or_insert_with(Rational::zero);
            *e -= v;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        BiLaurent { terms }
    }
}

impl Mul<&BiLaurent> for &BiLaurent {
    type Output = BiLaurent;
    fn mul(self, rhs: &BiLaurent) -> BiLaurent {
        let mut terms = BTreeMap::<(u32, i32), Rational>::new();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                *terms.entry((a1 + a2, b1 + b2)).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        BiLaurent { terms }
    }
}

impl Neg for &BiLaurent {
    type Output = BiLaurent;
    fn neg(self) -> BiLaurent {
        BiLaurent {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl Neg for BiLaurent {
    type Output = BiLaurent;
    fn neg(self) -> BiLaurent {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<BiLaurent> for BiLaurent {
            type Output = BiLaurent;
            fn $m(self, rhs: BiLaurent) -> BiLaurent {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BiLaurent> for BiLaurent {
            type Output = BiLaurent;
            fn $m(self, rhs: &BiLaurent) -> BiLaurent {
                (&self).$m(rhs)
            }
        }
        impl $tr<BiLaurent> for &BiLaurent {
            type Output = BiLaurent;
            fn $m(self, rhs: BiLaurent) -> BiLaurent {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<Rational> for BiLaurent {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<&UniPoly> for BiLaurent {
    fn from(p: &UniPoly) -> Self {
        Self::from_x_poly(p)
    }
}
