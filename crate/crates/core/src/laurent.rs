//! Multivariate Laurent polynomials with unbounded integer coefficients.
//!
//! A [`LaurentPoly`] lives in `Z[x1^±1, ..., xn^±1]` for a fixed generator
//! count `n`. Terms are kept sorted in descending lexicographic order of
//! their exponent vectors with no zero coefficients, so structural equality
//! is mathematical equality and the derived `Ord`/`Hash` are usable as keys.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("generator count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("quotient is not a Laurent polynomial")]
    NotDivisible,
    #[error("evaluation point has a zero coordinate at x{index}")]
    ZeroCoordinate { index: usize },
    #[error("cannot parse Laurent polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Exponent vector of a Laurent monomial; negative entries are allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[i32; 8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    /// The generator `x_{index+1}` raised to `exp`.
    pub fn generator(nvars: usize, index: usize, exp: i32) -> Self {
        let mut m = Self::one(nvars);
        m.0[index] = exp;
        m
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// An element of `Z[x1^±1, ..., xn^±1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    nvars: usize,
    /// Sorted by monomial, descending; coefficients nonzero.
    terms: Vec<(Monomial, BigInt)>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: Vec::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    /// The generator `x_{index+1}` (0-based index).
    pub fn generator(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "generator index {index} out of range for {nvars} generators");
        Self::monomial(nvars, Monomial::generator(nvars, index, 1), 1)
    }

    pub fn monomial(nvars: usize, m: Monomial, c: impl Into<BigInt>) -> Self {
        assert_eq!(m.len(), nvars, "monomial length must equal generator count");
        let c = c.into();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        LaurentPoly { nvars, terms: vec![(m, c)] }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial length must equal generator count");
            *acc.entry(m).or_default() += c;
        }
        Self::from_sorted_map(nvars, acc)
    }

    fn from_sorted_map(nvars: usize, acc: BTreeMap<Monomial, BigInt>) -> Self {
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        LaurentPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_constant() && self.terms[0].1.is_one()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (descending lexicographic) order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().map(|(m, c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms
            .binary_search_by(|(k, _)| m.cmp(k))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    /// True when every exponent is non-negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.0.iter().all(|&e| e >= 0))
    }

    fn check_dims(&self, other: &LaurentPoly) -> Result<(), LaurentError> {
        if self.nvars != other.nvars {
            return Err(LaurentError::DimensionMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_dims(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_dims(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &LaurentPoly, negate: bool) -> LaurentPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &BigInt| if negate { -c } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), sign(cb)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        LaurentPoly { nvars: self.nvars, terms: out }
    }

    pub fn checked_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_dims(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if self.terms.len() == 1 {
            return Ok(other.scale_term(&self.terms[0].0, &self.terms[0].1));
        }
        if other.terms.len() == 1 {
            return Ok(self.scale_term(&other.terms[0].0, &other.terms[0].1));
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len().saturating_mul(other.terms.len()).min(1 << 20));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                acc.entry(ma.mul(mb)).and_modify(|e| *e += &c).or_insert(c);
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Ok(LaurentPoly { nvars: self.nvars, terms })
    }

    /// Multiplies by the single term `c * m`; order is preserved.
    fn scale_term(&self, m: &Monomial, c: &BigInt) -> LaurentPoly {
        let terms = self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, exp: u32) -> LaurentPoly {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Componentwise minimum exponent over all terms.
    fn min_exponents(&self) -> Monomial {
        let mut mins = self.terms[0].0.clone();
        for (m, _) in &self.terms[1..] {
            for (lo, &e) in mins.0.iter_mut().zip(&m.0) {
                *lo = (*lo).min(e);
            }
        }
        mins
    }

    /// Exact quotient `self / divisor` in the Laurent ring.
    ///
    /// Both operands are shifted into the polynomial ring so that the
    /// divisor has no monomial factor; the quotient is then a polynomial and
    /// is found by leading-term elimination in lex order. Any leading term
    /// that fails to divide proves non-divisibility.
    pub fn div_exact(&self, divisor: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_dims(divisor)?;
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if divisor.terms.len() == 1 {
            let (m, c) = &divisor.terms[0];
            let mut terms = Vec::with_capacity(self.terms.len());
            for (mm, cc) in &self.terms {
                let (q, r) = cc.div_rem(c);
                if !r.is_zero() {
                    return Err(LaurentError::NotDivisible);
                }
                terms.push((mm.div(m), q));
            }
            return Ok(LaurentPoly { nvars: self.nvars, terms });
        }

        let shift_a = self.min_exponents();
        let shift_b = divisor.min_exponents();
        let b: Vec<(Monomial, BigInt)> =
            divisor.terms.iter().map(|(m, c)| (m.div(&shift_b), c.clone())).collect();
        let (lead_m, lead_c) = &b[0];

        let mut rem: BTreeMap<Monomial, BigInt> =
            self.terms.iter().map(|(m, c)| (m.div(&shift_a), c.clone())).collect();
        let mut quotient = Vec::new();
        while let Some((rm, rc)) = rem.pop_last() {
            if !lead_m.divides(&rm) {
                return Err(LaurentError::NotDivisible);
            }
            let (qc, r) = rc.div_rem(lead_c);
            if !r.is_zero() {
                return Err(LaurentError::NotDivisible);
            }
            let qm = rm.div(lead_m);
            for (bm, bc) in &b[1..] {
                let key = bm.mul(&qm);
                let delta = bc * &qc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quotient.push((qm, qc));
        }
        // q' = q * x^(shift_b - shift_a), so q = q' * x^(shift_a - shift_b).
        let back = shift_a.div(&shift_b);
        let terms = quotient.into_iter().map(|(m, c)| (m.mul(&back), c)).collect();
        Ok(LaurentPoly { nvars: self.nvars, terms })
    }

    /// Exact rational value at `point`; every coordinate must be nonzero.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, LaurentError> {
        if point.len() != self.nvars {
            return Err(LaurentError::DimensionMismatch { left: self.nvars, right: point.len() });
        }
        if let Some(index) = point.iter().position(Zero::is_zero) {
            return Err(LaurentError::ZeroCoordinate { index: index + 1 });
        }
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = BigRational::from_integer(c.clone());
            for (p, &e) in point.iter().zip(m.0.iter()) {
                if e != 0 {
                    v *= p.pow(e);
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Renders at most `max_terms` terms, appending a marker with the number
    /// of omitted terms.
    pub fn to_string_truncated(&self, max_terms: usize) -> String {
        if self.terms.len() <= max_terms {
            return self.to_string();
        }
        let head = LaurentPoly { nvars: self.nvars, terms: self.terms[..max_terms].to_vec() };
        format!("{head} + ... [{} more terms]", self.terms.len() - max_terms)
    }

    /// Parses the printed form, e.g. `x1^2*x2^-1 - 3*x3 + 1`.
    pub fn parse(text: &str, nvars: usize) -> Result<LaurentPoly, LaurentError> {
        Parser { src: text.as_bytes(), pos: 0, nvars }.parse()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_constant() {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            let mut first = true;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "x{}", i + 1)?;
                } else {
                    write!(f, "x{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({})", self.nvars, self)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }
}

// The operator impls panic on mismatched generator counts; use the
// `checked_*` methods where that is not already guaranteed.
impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("LaurentPoly addition")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("LaurentPoly subtraction")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("LaurentPoly multiplication")
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LaurentError> {
        Err(LaurentError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<&str, LaurentError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn parse(mut self) -> Result<LaurentPoly, LaurentError> {
        let mut terms = Vec::new();
        let mut negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(_) => false,
            None => return self.err("empty input"),
        };
        loop {
            let (m, mut c) = self.term()?;
            if negative {
                c = -c;
            }
            terms.push((m, c));
            match self.peek() {
                None => break,
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(_) => return self.err("expected '+' or '-'"),
            }
            self.pos += 1;
        }
        Ok(LaurentPoly::from_terms(self.nvars, terms))
    }

    fn term(&mut self) -> Result<(Monomial, BigInt), LaurentError> {
        let mut coeff = BigInt::one();
        let mut mono = Monomial::one(self.nvars);
        loop {
            match self.peek() {
                Some(b'x') => {
                    self.pos += 1;
                    let idx: usize = self.digits()?.parse().map_err(|_| LaurentError::Parse {
                        pos: self.pos,
                        msg: "bad generator index".into(),
                    })?;
                    if idx == 0 || idx > self.nvars {
                        return self.err(format!("generator x{idx} outside x1..x{}", self.nvars));
                    }
                    let mut exp = 1i32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let neg = self.peek() == Some(b'-');
                        if neg {
                            self.pos += 1;
                        }
                        let e: i32 = self.digits()?.parse().map_err(|_| LaurentError::Parse {
                            pos: self.pos,
                            msg: "exponent out of range".into(),
                        })?;
                        exp = if neg { -e } else { e };
                    }
                    mono.0[idx - 1] += exp;
                }
                Some(c) if c.is_ascii_digit() => {
                    let n: BigInt = self.digits()?.parse().expect("digits parse");
                    coeff *= n;
                }
                _ => return self.err("expected a coefficient or generator"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((mono, coeff))
    }
}
