//! The ordered field of truncated Laurent series over the reals.
//!
//! An element is a window of `order` consecutive coefficients starting at
//! `valuation`: `coeffs[i]` multiplies `e^(valuation + i)`, where `e` is a
//! positive infinitesimal smaller than every positive real. All arithmetic
//! is exact modulo `e^(valuation + order)`; the order relation compares the
//! leading coefficient of the difference (lower valuation dominates).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order (number of tracked coefficients).
pub const DEFAULT_ORDER: usize = 12;
/// Smallest supported truncation order.
pub const MIN_ORDER: usize = 4;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 64;
/// Valuations are clamped to `[-MAX_VALUATION, MAX_VALUATION]`; drifting
/// past the bound is an error, not a wraparound.
pub const MAX_VALUATION: i64 = 64;
/// Relative threshold below which a coefficient is treated as zero during
/// normalization.
pub const COEFF_TOLERANCE: f64 = 1e-12;

/// Coarse size class of a field element, read off the normalized valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// The canonical zero element.
    Zero,
    /// Nonzero, but smaller in absolute value than every positive real.
    Infinitesimal,
    /// Finite with a nonzero standard part.
    Appreciable,
    /// Larger in absolute value than every real; has no standard part.
    Infinite,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Classification::Zero => "zero",
            Classification::Infinitesimal => "infinitesimal",
            Classification::Appreciable => "appreciable",
            Classification::Infinite => "infinite",
        };
        write!(f, "{name}")
    }
}

/// Serialized form: the JSON contract is `{"valuation", "order", "coeffs"}`.
#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    valuation: i64,
    order: usize,
    coeffs: Vec<f64>,
}

/// An element of the field: a truncated Laurent series in the infinitesimal.
///
/// Invariants maintained by every constructor:
/// - a nonzero element has `coeffs[0] != 0` (valuation points at the first
///   coefficient surviving the relative tolerance);
/// - the zero element is canonical: valuation 0, all coefficients exactly 0;
/// - `coeffs.len() == order` and `|valuation| <= MAX_VALUATION`.
///
/// ```
/// use std::cmp::Ordering;
/// use petit_core::field::{Laurent, DEFAULT_ORDER};
///
/// let eps = Laurent::epsilon(DEFAULT_ORDER)?;
/// let just_less = Laurent::one(DEFAULT_ORDER)?.sub(&eps)?;
/// assert_eq!(just_less.compare(&Laurent::one(DEFAULT_ORDER)?)?, Ordering::Less);
///
/// let (standard, infinitesimal) = just_less.decompose()?;
/// assert_eq!(standard, 1.0);
/// assert_eq!(infinitesimal, eps.neg());
/// # Ok::<(), petit_core::Error>(())
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LaurentRepr", into = "LaurentRepr")]
pub struct Laurent {
    valuation: i64,
    coeffs: Vec<f64>,
}

impl TryFrom<LaurentRepr> for Laurent {
    type Error = Error;

    fn try_from(raw: LaurentRepr) -> Result<Self> {
        if raw.coeffs.len() != raw.order {
            return Err(Error::InvalidArgument(format!(
                "coeffs length {} does not match order {}",
                raw.coeffs.len(),
                raw.order
            )));
        }
        Laurent::new(raw.valuation, raw.coeffs)
    }
}

impl From<Laurent> for LaurentRepr {
    fn from(x: Laurent) -> Self {
        LaurentRepr {
            valuation: x.valuation,
            order: x.coeffs.len(),
            coeffs: x.coeffs,
        }
    }
}

fn check_order(order: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "truncation order {order} outside {MIN_ORDER}..={MAX_ORDER}"
        )));
    }
    Ok(())
}

impl Laurent {
    /// Builds an element from a raw coefficient window and normalizes it.
    pub fn new(valuation: i64, coeffs: Vec<f64>) -> Result<Self> {
        check_order(coeffs.len())?;
        let mut out = Laurent { valuation, coeffs };
        out.normalize()?;
        Ok(out)
    }

    /// The canonical zero element at the given order.
    ///
    /// Panics if `order` is outside `MIN_ORDER..=MAX_ORDER`.
    pub fn zero(order: usize) -> Self {
        assert!(
            check_order(order).is_ok(),
            "invalid truncation order {order}"
        );
        Laurent {
            valuation: 0,
            coeffs: vec![0.0; order],
        }
    }

    /// Embeds a finite real into the field (standard part `r`, no
    /// infinitesimal part). The embedding preserves `+`, `×` and order.
    pub fn from_real(r: f64, order: usize) -> Result<Self> {
        check_order(order)?;
        if !r.is_finite() {
            return Err(Error::NonFiniteInput(r));
        }
        let mut coeffs = vec![0.0; order];
        coeffs[0] = r;
        Laurent::new(0, coeffs)
    }

    /// The generator: a positive infinitesimal below every positive real.
    pub fn epsilon(order: usize) -> Result<Self> {
        check_order(order)?;
        let mut coeffs = vec![0.0; order];
        coeffs[0] = 1.0;
        Laurent::new(1, coeffs)
    }

    /// The multiplicative identity.
    pub fn one(order: usize) -> Result<Self> {
        Laurent::from_real(1.0, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Tracked coefficients; `coeffs()[i]` multiplies `e^(valuation + i)`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficient of `e^exp`, zero outside the tracked window.
    pub fn coeff_at(&self, exp: i64) -> f64 {
        let idx = exp - self.valuation;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Restores the invariants: snaps relatively-tiny coefficients to zero,
    /// shifts the window so `coeffs[0]` is the leading nonzero coefficient,
    /// and bounds the valuation.
    fn normalize(&mut self) -> Result<()> {
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteResult);
        }
        let max = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            self.valuation = 0;
            self.coeffs.iter_mut().for_each(|c| *c = 0.0);
            return Ok(());
        }
        // Strictly below the relative threshold: a coefficient exactly at
        // tau * max (such as 1e-12 against a unit leading term) still
        // decides comparisons.
        let threshold = COEFF_TOLERANCE * max;
        for c in &mut self.coeffs {
            if c.abs() < threshold {
                *c = 0.0;
            } else if *c == 0.0 {
                *c = 0.0; // normalize -0.0
            }
        }
        let lead = self.coeffs.iter().position(|&c| c != 0.0);
        match lead {
            None => {
                self.valuation = 0;
                Ok(())
            }
            Some(0) => self.check_valuation(),
            Some(k) => {
                self.coeffs.rotate_left(k);
                let n = self.coeffs.len();
                self.coeffs[n - k..].iter_mut().for_each(|c| *c = 0.0);
                self.valuation += k as i64;
                self.check_valuation()
            }
        }
    }

    fn check_valuation(&self) -> Result<()> {
        if self.valuation.abs() > MAX_VALUATION {
            Err(Error::ValuationOverflow(self.valuation, MAX_VALUATION))
        } else {
            Ok(())
        }
    }

    fn check_same_order(&self, other: &Laurent) -> Result<()> {
        if self.order() != other.order() {
            Err(Error::OrderMismatch(self.order(), other.order()))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Laurent) -> Result<Laurent> {
        self.check_same_order(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let v = self.valuation.min(other.valuation);
        let n = self.order();
        let mut coeffs = vec![0.0; n];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let exp = v + i as i64;
            *c = self.coeff_at(exp) + other.coeff_at(exp);
        }
        Laurent::new(v, coeffs)
    }

    pub fn neg(&self) -> Laurent {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            if *c != 0.0 {
                *c = -*c;
            }
        }
        out
    }

    pub fn sub(&self, other: &Laurent) -> Result<Laurent> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Laurent) -> Result<Laurent> {
        self.check_same_order(other)?;
        let n = self.order();
        if self.is_zero() || other.is_zero() {
            return Ok(Laurent::zero(n));
        }
        let v = self.valuation + other.valuation;
        if v.abs() > MAX_VALUATION {
            return Err(Error::ValuationOverflow(v, MAX_VALUATION));
        }
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..n - i {
                coeffs[i + j] += a * other.coeffs[j];
            }
        }
        Laurent::new(v, coeffs)
    }

    /// Scales every coefficient by a finite real.
    pub fn scale(&self, k: f64) -> Result<Laurent> {
        if !k.is_finite() {
            return Err(Error::NonFiniteInput(k));
        }
        let coeffs = self.coeffs.iter().map(|c| c * k).collect();
        Laurent::new(self.valuation, coeffs)
    }

    /// Series long division: the quotient `q` satisfies
    /// `q * other == self` up to the truncation order.
    pub fn div(&self, other: &Laurent) -> Result<Laurent> {
        self.check_same_order(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order();
        if self.is_zero() {
            return Ok(Laurent::zero(n));
        }
        let v = self.valuation - other.valuation;
        if v.abs() > MAX_VALUATION {
            return Err(Error::ValuationOverflow(v, MAX_VALUATION));
        }
        let lead = other.coeffs[0];
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for (j, qj) in q.iter().enumerate().take(k) {
                acc -= qj * other.coeffs[k - j];
            }
            q[k] = acc / lead;
        }
        Laurent::new(v, q)
    }

    /// Multiplicative inverse at working order.
    pub fn inverse(&self) -> Result<Laurent> {
        Laurent::one(self.order())?.div(self)
    }

    /// Multiplies by `e^shift` (a pure window shift, exact).
    pub fn shift_valuation(&self, shift: i64) -> Result<Laurent> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        out.valuation += shift;
        out.check_valuation()?;
        Ok(out)
    }

    /// Total order: sign of the leading coefficient of `self - other`.
    /// Returns `Equal` when the difference vanishes at working order.
    pub fn compare(&self, other: &Laurent) -> Result<Ordering> {
        let diff = self.sub(other)?;
        if diff.is_zero() {
            Ok(Ordering::Equal)
        } else if diff.coeffs[0] > 0.0 {
            Ok(Ordering::Greater)
        } else {
            Ok(Ordering::Less)
        }
    }

    /// Like [`compare`](Self::compare), but refuses to equate: truncation
    /// cannot prove true equality, so a vanishing difference is reported as
    /// an error instead of `Equal`.
    pub fn compare_strict(&self, other: &Laurent) -> Result<Ordering> {
        match self.compare(other)? {
            Ordering::Equal => Err(Error::Indistinguishable(self.order())),
            ord => Ok(ord),
        }
    }

    /// Size classification from the normalized valuation.
    pub fn classify(&self) -> Classification {
        if self.is_zero() {
            Classification::Zero
        } else if self.valuation < 0 {
            Classification::Infinite
        } else if self.valuation == 0 {
            Classification::Appreciable
        } else {
            Classification::Infinitesimal
        }
    }

    /// Splits a finite element into its unique real part plus an
    /// infinitesimal remainder. Infinite elements have no standard part.
    pub fn decompose(&self) -> Result<(f64, Laurent)> {
        match self.classify() {
            Classification::Infinite => Err(Error::NoStandardPart),
            Classification::Zero => Ok((0.0, self.clone())),
            Classification::Infinitesimal => Ok((0.0, self.clone())),
            Classification::Appreciable => {
                let st = self.coeffs[0];
                let mut rest = self.clone();
                rest.coeffs[0] = 0.0;
                rest.normalize()?;
                Ok((st, rest))
            }
        }
    }

    /// The real `r` with `self - r` infinitesimal; errors on infinite input.
    pub fn standard_part(&self) -> Result<f64> {
        Ok(self.decompose()?.0)
    }

    /// The microscope map `(x - c) / e^power`: rescales infinitesimal detail
    /// near `c` to appreciable size. `power` defaults to 1 at the call sites.
    pub fn magnify(&self, center: &Laurent, power: u32) -> Result<Laurent> {
        if power == 0 {
            return Err(Error::InvalidArgument(
                "magnification power must be >= 1".into(),
            ));
        }
        self.sub(center)?.shift_valuation(-(power as i64))
    }

    /// Evaluates the tracked window at `e = 1/n`. Exact for Laurent
    /// polynomials; for quotients or composed series it evaluates the
    /// truncated representation, not the untruncated ancestor.
    pub fn realize(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("index n must be >= 1".into()));
        }
        let x = 1.0 / n as f64;
        let mut acc = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                acc += c * x.powi((self.valuation + i as i64) as i32);
            }
        }
        if acc.is_finite() {
            Ok(acc)
        } else {
            Err(Error::NonFiniteResult)
        }
    }

    /// Canonical text form: terms by ascending exponent, zero terms omitted,
    /// `e` denoting the infinitesimal ("3.5 + 2e^1 - 0.25e^3").
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let exp = self.valuation + i as i64;
            if out.is_empty() {
                if c < 0.0 {
                    out.push('-');
                }
            } else if c < 0.0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = c.abs();
            if exp == 0 {
                out.push_str(&format!("{mag}"));
            } else {
                out.push_str(&format!("{mag}e^{exp}"));
            }
        }
        out
    }

    /// Parses the canonical text form back into an element of the given
    /// order. Accepts a bare `e` as `e^1`. A `e` directly followed by a
    /// digit or a signed digit is read as scientific notation of the
    /// coefficient ("2e-5"); write `e^-5` for a negative epsilon power.
    pub fn from_text(text: &str, order: usize) -> Result<Laurent> {
        check_order(order)?;
        ElementParser::new(text).parse(order)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Hand-rolled scanner for the element text form.
struct ElementParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ElementParser<'a> {
    fn new(text: &'a str) -> Self {
        ElementParser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse(&mut self, order: usize) -> Result<Laurent> {
        let mut terms: Vec<(i64, f64)> = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.error("empty element literal"));
        }
        let mut sign = 1.0;
        if let Some(b) = self.peek() {
            if b == b'+' || b == b'-' {
                sign = if b == b'-' { -1.0 } else { 1.0 };
                self.pos += 1;
            }
        }
        loop {
            self.skip_ws();
            let (exp, coeff) = self.term()?;
            terms.push((exp, sign * coeff));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign = 1.0;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -1.0;
                    self.pos += 1;
                }
                Some(_) => return Err(self.error("expected '+', '-', or end of element")),
            }
        }
        let min_exp = terms.iter().map(|t| t.0).min().unwrap();
        let max_exp = terms.iter().map(|t| t.0).max().unwrap();
        if (max_exp - min_exp) as usize >= order {
            return Err(Error::InvalidArgument(format!(
                "exponent span {}..{} does not fit in order {order}",
                min_exp, max_exp
            )));
        }
        let mut coeffs = vec![0.0; order];
        for (exp, c) in terms {
            coeffs[(exp - min_exp) as usize] += c;
        }
        Laurent::new(min_exp, coeffs)
    }

    /// One term: `coeff`, `coeff e[^exp]`, or `e[^exp]`.
    fn term(&mut self) -> Result<(i64, f64)> {
        let coeff = match self.peek() {
            Some(b) if b.is_ascii_digit() || b == b'.' => Some(self.number()?),
            _ => None,
        };
        let has_eps = self.peek() == Some(b'e');
        if has_eps {
            self.pos += 1;
            let exp = if self.peek() == Some(b'^') {
                self.pos += 1;
                self.signed_int()?
            } else {
                1
            };
            if exp.abs() > MAX_VALUATION {
                return Err(Error::ValuationOverflow(exp, MAX_VALUATION));
            }
            Ok((exp, coeff.unwrap_or(1.0)))
        } else {
            match coeff {
                Some(c) => Ok((0, c)),
                None => Err(self.error("expected a number or 'e'")),
            }
        }
    }

    /// A decimal literal. An `e` is absorbed as scientific notation only
    /// when a digit (or signed digit) follows immediately; otherwise it is
    /// left in place as the infinitesimal symbol.
    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if self.peek() == Some(b'e') || self.peek() == Some(b'E') {
            let next = self.bytes.get(self.pos + 1).copied();
            let after = self.bytes.get(self.pos + 2).copied();
            let scientific = match next {
                Some(d) if d.is_ascii_digit() => true,
                Some(b'+') | Some(b'-') => after.is_some_and(|d| d.is_ascii_digit()),
                _ => false,
            };
            if scientific {
                self.pos += 1;
                if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
                while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map_err(|_| self.error("malformed number"))
    }

    fn signed_int(&mut self) -> Result<i64> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<i64>()
            .map_err(|_| self.error("malformed exponent"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(r: f64) -> Laurent {
        Laurent::from_real(r, DEFAULT_ORDER).unwrap()
    }

    fn eps() -> Laurent {
        Laurent::epsilon(DEFAULT_ORDER).unwrap()
    }

    #[test]
    fn from_real_embeds() {
        let x = real(3.5);
        assert_eq!(x.valuation(), 0);
        assert_eq!(x.coeffs()[0], 3.5);
        assert!(x.coeffs()[1..].iter().all(|&c| c == 0.0));

        assert!(real(0.0).is_zero());
        assert_eq!(real(0.0).valuation(), 0);

        let y = real(2.25);
        assert_eq!(y.mul(&Laurent::one(DEFAULT_ORDER).unwrap()).unwrap(), y);
    }

    #[test]
    fn from_real_rejects_non_finite() {
        assert!(matches!(
            Laurent::from_real(f64::NAN, DEFAULT_ORDER),
            Err(Error::NonFiniteInput(_))
        ));
        assert!(Laurent::from_real(f64::INFINITY, DEFAULT_ORDER).is_err());
    }

    #[test]
    fn epsilon_is_below_every_positive_real() {
        let e = eps();
        assert_eq!(e.classify(), Classification::Infinitesimal);
        for k in 0..=12 {
            let r = real(10f64.powi(-k));
            assert_eq!(e.compare(&r).unwrap(), Ordering::Less);
        }
        assert_eq!(e.compare(&real(0.0)).unwrap(), Ordering::Greater);
    }

    #[test]
    fn arithmetic_basics() {
        let e = eps();
        let e2 = e.mul(&e).unwrap();
        assert_eq!(e2.valuation(), 2);
        assert_eq!(e2.coeffs()[0], 1.0);

        let inv = real(1.0).div(&e).unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_eq!(inv.classify(), Classification::Infinite);

        assert!(matches!(
            real(1.0).div(&Laurent::zero(DEFAULT_ORDER)),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn geometric_series_by_long_division() {
        // 1 / (1 - e) = 1 + e + e^2 + ... at working order.
        let g = real(1.0).div(&real(1.0).sub(&eps()).unwrap()).unwrap();
        assert_eq!(g.valuation(), 0);
        for &c in g.coeffs() {
            assert!((c - 1.0).abs() < 1e-12);
        }
        // Multiplying back recovers 1 at working order.
        let back = g.mul(&real(1.0).sub(&eps()).unwrap()).unwrap();
        assert_eq!(back.standard_part().unwrap(), 1.0);
        assert!(back.sub(&real(1.0)).unwrap().is_zero());
    }

    #[test]
    fn compare_is_lexicographic() {
        let just_less = real(1.0).sub(&eps()).unwrap();
        assert_eq!(just_less.compare(&real(1.0)).unwrap(), Ordering::Less);

        let e = eps();
        let e2 = e.mul(&e).unwrap();
        assert_eq!(e.compare(&e2).unwrap(), Ordering::Greater);

        assert_eq!(real(2.0).compare(&real(2.0)).unwrap(), Ordering::Equal);
        assert!(matches!(
            real(2.0).compare_strict(&real(2.0)),
            Err(Error::Indistinguishable(_))
        ));
        assert_eq!(
            real(3.0).compare_strict(&real(2.0)).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn classification_follows_valuation() {
        assert_eq!(eps().classify(), Classification::Infinitesimal);
        let x = real(2.0).add(&eps().scale(3.0).unwrap()).unwrap();
        assert_eq!(x.classify(), Classification::Appreciable);
        let inf = real(1.0).div(&eps().mul(&eps()).unwrap()).unwrap();
        assert_eq!(inf.classify(), Classification::Infinite);
        assert_eq!(
            Laurent::zero(DEFAULT_ORDER).classify(),
            Classification::Zero
        );
    }

    #[test]
    fn decompose_splits_standard_and_infinitesimal() {
        let x = real(1.0).sub(&eps()).unwrap();
        let (st, inf) = x.decompose().unwrap();
        assert_eq!(st, 1.0);
        assert_eq!(inf, eps().neg());

        let y = real(2.0)
            .add(&eps().scale(3.0).unwrap())
            .unwrap()
            .add(&eps().mul(&eps()).unwrap())
            .unwrap();
        let (st, inf) = y.decompose().unwrap();
        assert_eq!(st, 2.0);
        assert_eq!(inf.valuation(), 1);
        assert_eq!(inf.coeffs()[0], 3.0);
        assert_eq!(inf.coeffs()[1], 1.0);

        let (st, inf) = real(std::f64::consts::PI).decompose().unwrap();
        assert_eq!(st, std::f64::consts::PI);
        assert!(inf.is_zero());

        assert!(matches!(
            eps().inverse().unwrap().decompose(),
            Err(Error::NoStandardPart)
        ));
    }

    #[test]
    fn magnify_rescales_infinitesimal_detail() {
        let c = real(0.7);
        let e = eps();

        let m = c.add(&e).unwrap().magnify(&c, 1).unwrap();
        assert_eq!(m, Laurent::one(DEFAULT_ORDER).unwrap());

        let m = c
            .add(&e.scale(7.0).unwrap())
            .unwrap()
            .magnify(&c, 1)
            .unwrap();
        assert_eq!(m, real(7.0));

        let m = c.add(&e.mul(&e).unwrap()).unwrap().magnify(&c, 1).unwrap();
        assert_eq!(m, e);

        assert!(c.magnify(&c, 1).unwrap().is_zero());
    }

    #[test]
    fn realize_evaluates_at_one_over_n() {
        assert_eq!(eps().realize(10).unwrap(), 0.1);
        assert_eq!(eps().inverse().unwrap().realize(5).unwrap(), 5.0);
        let just_less = real(1.0).sub(&eps()).unwrap();
        assert_eq!(just_less.realize(1000).unwrap(), 0.999);
        assert!(matches!(eps().realize(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn valuation_overflow_is_an_error() {
        let e = eps();
        let mut big = e.clone();
        for _ in 0..63 {
            big = big.mul(&e).unwrap();
        }
        assert_eq!(big.valuation(), 64);
        assert!(matches!(big.mul(&e), Err(Error::ValuationOverflow(65, 64))));
    }

    #[test]
    fn text_round_trip() {
        let x = real(3.5)
            .add(&eps().scale(2.0).unwrap())
            .unwrap()
            .sub(
                &eps()
                    .mul(&eps())
                    .unwrap()
                    .mul(&eps())
                    .unwrap()
                    .scale(0.25)
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(x.to_text(), "3.5 + 2e^1 - 0.25e^3");
        assert_eq!(
            Laurent::from_text("3.5 + 2e^1 - 0.25e^3", DEFAULT_ORDER).unwrap(),
            x
        );

        assert_eq!(Laurent::zero(DEFAULT_ORDER).to_text(), "0");
        assert_eq!(Laurent::from_text("e", DEFAULT_ORDER).unwrap(), eps());
        assert_eq!(
            Laurent::from_text("1 - e^1", DEFAULT_ORDER).unwrap(),
            real(1.0).sub(&eps()).unwrap()
        );
        assert_eq!(
            Laurent::from_text("e^-2", DEFAULT_ORDER)
                .unwrap()
                .valuation(),
            -2
        );
        // Scientific notation still works for coefficients.
        assert_eq!(
            Laurent::from_text("2e-5", DEFAULT_ORDER).unwrap(),
            real(2e-5)
        );
        assert!(Laurent::from_text("", DEFAULT_ORDER).is_err());
        assert!(Laurent::from_text("2 +", DEFAULT_ORDER).is_err());
    }

    #[test]
    fn overflow_paths_in_div_magnify_and_text() {
        let e = eps();
        let deep = e.shift_valuation(31).unwrap(); // e^32
        let tall = real(1.0).div(&deep).unwrap().shift_valuation(-1).unwrap(); // e^-33
        assert!(matches!(
            tall.div(&deep),
            Err(Error::ValuationOverflow(-65, 64))
        ));
        assert!(matches!(
            tall.magnify(&Laurent::zero(DEFAULT_ORDER), 32),
            Err(Error::ValuationOverflow(-65, 64))
        ));
        assert!(matches!(
            real(1.0).magnify(&real(0.5), 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            Laurent::from_text("e^100", DEFAULT_ORDER),
            Err(Error::ValuationOverflow(100, 64))
        ));
    }

    #[test]
    fn realize_rejects_non_finite_accumulation() {
        let mut coeffs = vec![0.0; DEFAULT_ORDER];
        coeffs[0] = 1e300;
        let huge = Laurent::new(-3, coeffs).unwrap();
        assert!(matches!(huge.realize(100_000), Err(Error::NonFiniteResult)));
        // Positive valuations shrink instead and stay finite.
        assert!(huge.shift_valuation(6).unwrap().realize(100_000).is_ok());
    }

    #[test]
    fn compare_across_disjoint_windows() {
        let e = eps();
        let tiny = e.shift_valuation(59).unwrap(); // e^60
        let giant = real(1.0).div(&e).unwrap().shift_valuation(-59).unwrap(); // e^-60
        assert_eq!(giant.compare(&tiny).unwrap(), Ordering::Greater);
        assert_eq!(tiny.compare(&giant.neg()).unwrap(), Ordering::Greater);
        assert_eq!(
            tiny.compare(&Laurent::zero(DEFAULT_ORDER)).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn extreme_orders_work() {
        for order in [MIN_ORDER, MAX_ORDER] {
            let e = Laurent::epsilon(order).unwrap();
            let g = Laurent::one(order)
                .unwrap()
                .div(&Laurent::one(order).unwrap().sub(&e).unwrap())
                .unwrap();
            assert_eq!(g.coeffs().len(), order);
            assert!(g.coeffs().iter().all(|&c| (c - 1.0).abs() < 1e-12));
        }
        assert!(Laurent::from_real(1.0, 3).is_err());
        assert!(Laurent::from_real(1.0, 65).is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = real(1.0).sub(&eps()).unwrap();
        let js = serde_json::to_string(&x).unwrap();
        assert!(js.contains("\"valuation\":0"));
        assert!(js.contains("\"order\":12"));
        let back: Laurent = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);

        let bad = r#"{"valuation": 0, "order": 5, "coeffs": [1.0]}"#;
        assert!(serde_json::from_str::<Laurent>(bad).is_err());
    }
}
