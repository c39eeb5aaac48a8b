//! The complete discretely valued field `K = k((t))`.
//!
//! Elements are Laurent series with a finite number of stored coefficients.
//! A series is either *exact* (a Laurent polynomial, no truncation) or carries
//! an absolute precision `P`, meaning it is known modulo `t^P`. Exact zero and
//! "zero modulo `t^P`" are distinct values: asking for the valuation of the
//! latter is a [`Error::PrecisionExhausted`] error, never a silent zero.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::base_fields::{ResElem, ResidueField};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: i64 = 32;

/// `k((t))` together with the working precision used when a computation has
/// to truncate an exact input (inversion and square roots of non-monomials).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ValuedField {
    residue: ResidueField,
    precision: i64,
}

impl ValuedField {
    pub fn new(residue: ResidueField, precision: i64) -> Result<Self> {
        if matches!(residue, ResidueField::QuadExt { .. }) {
            return Err(Error::InvalidField(
                "base residue field must be F_p or Q".into(),
            ));
        }
        if precision <= 0 {
            return Err(Error::InvalidField("precision must be positive".into()));
        }
        Ok(ValuedField { residue, precision })
    }

    /// `F_p((t))` with the default precision.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(ResidueField::prime(p)?, DEFAULT_PRECISION)
    }

    /// `Q((t))` with the default precision.
    pub fn rationals() -> Self {
        ValuedField {
            residue: ResidueField::Rationals,
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn residue(&self) -> ResidueField {
        self.residue
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn with_precision(&self, precision: i64) -> Result<Self> {
        Self::new(self.residue, precision)
    }

    pub fn zero(&self) -> Laurent {
        Laurent {
            field: *self,
            start: 0,
            coeffs: self.empty_coeffs(),
            prec: None,
        }
    }

    /// `O(t^prec)`.
    pub fn approx_zero(&self, prec: i64) -> Laurent {
        Laurent {
            field: *self,
            start: 0,
            coeffs: self.empty_coeffs(),
            prec: Some(prec),
        }
    }

    pub fn one(&self) -> Laurent {
        self.int(1)
    }

    /// The uniformizer `t`.
    pub fn t(&self) -> Laurent {
        self.monomial(self.residue.one(), 1)
    }

    pub fn int(&self, n: i64) -> Laurent {
        self.monomial(self.residue.from_int(n), 0)
    }

    pub fn constant(&self, c: ResElem) -> Laurent {
        self.monomial(c, 0)
    }

    /// `c * t^e`, exact.
    pub fn monomial(&self, c: ResElem, e: i64) -> Laurent {
        self.from_coeffs(e, vec![c], None)
            .expect("coefficient from the residue field")
    }

    /// Series `sum c_i t^(start+i)` known modulo `t^prec` (`None` = exact).
    pub fn from_coeffs(
        &self,
        start: i64,
        coeffs: Vec<ResElem>,
        prec: Option<i64>,
    ) -> Result<Laurent> {
        if coeffs.iter().any(|c| c.field() != self.residue) {
            return Err(Error::FieldMismatch);
        }
        let coeffs = match self.residue {
            ResidueField::Prime { p } => Coeffs::Fp {
                p,
                c: coeffs.iter().map(|c| c.as_fp().unwrap()).collect(),
            },
            _ => Coeffs::Q(coeffs),
        };
        Ok(Laurent {
            field: *self,
            start,
            coeffs,
            prec,
        }
        .normalized())
    }

    fn empty_coeffs(&self) -> Coeffs {
        match self.residue {
            ResidueField::Prime { p } => Coeffs::Fp { p, c: Vec::new() },
            _ => Coeffs::Q(Vec::new()),
        }
    }

    /// Canonical representative of a square class of `K*`.
    pub fn square_class_element(&self, class: &SquareClassK) -> Laurent {
        self.monomial(class.unit, class.t_parity as i64)
    }

    /// The four square classes `{1, u, t, ut}` (finite residue field only).
    pub fn square_classes(&self) -> Result<Vec<SquareClassK>> {
        let u = self.residue.nonsquare()?;
        let one = self.residue.one();
        Ok(vec![
            SquareClassK {
                unit: one,
                t_parity: 0,
            },
            SquareClassK {
                unit: u,
                t_parity: 0,
            },
            SquareClassK {
                unit: one,
                t_parity: 1,
            },
            SquareClassK {
                unit: u,
                t_parity: 1,
            },
        ])
    }

    pub fn parse(&self, text: &str) -> Result<Laurent> {
        Parser {
            field: *self,
            text: text.as_bytes(),
            pos: 0,
        }
        .parse()
    }
}

/// Square class of `K*`: the class of `unit * t^t_parity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SquareClassK {
    /// Square-class representative of the leading coefficient in `k`.
    pub unit: ResElem,
    pub t_parity: u8,
}

impl fmt::Display for SquareClassK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.unit.is_one(), self.t_parity) {
            (true, 0) => write!(f, "1"),
            (true, _) => write!(f, "t"),
            (false, 0) => write!(f, "{}", self.unit),
            (false, _) => write!(f, "{}*t", self.unit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Coeffs {
    Fp { p: u64, c: Vec<u64> },
    Q(Vec<ResElem>),
}

/// Coefficient arithmetic used by the dense series kernels.
trait CoeffRing {
    type C: Clone;
    fn zero(&self) -> Self::C;
    fn is_zero(&self, a: &Self::C) -> bool;
    fn add(&self, a: &Self::C, b: &Self::C) -> Result<Self::C>;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Result<Self::C>;
    fn neg(&self, a: &Self::C) -> Self::C;
    fn inv(&self, a: &Self::C) -> Result<Self::C>;
    fn half(&self, a: &Self::C) -> Result<Self::C>;
}

struct Fp(u64);

impl CoeffRing for Fp {
    type C = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> Result<u64> {
        Ok((a + b) % self.0)
    }
    fn mul(&self, a: &u64, b: &u64) -> Result<u64> {
        Ok(a * b % self.0)
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        let (p, mut acc, mut b, mut e) = (self.0, 1u64, *a, self.0 - 2);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        Ok(acc)
    }
    fn half(&self, a: &u64) -> Result<u64> {
        self.mul(a, &self.0.div_ceil(2))
    }
}

struct Rat;

impl CoeffRing for Rat {
    type C = ResElem;
    fn zero(&self) -> ResElem {
        ResidueField::Rationals.zero()
    }
    fn is_zero(&self, a: &ResElem) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &ResElem, b: &ResElem) -> Result<ResElem> {
        a.add(b)
    }
    fn mul(&self, a: &ResElem, b: &ResElem) -> Result<ResElem> {
        a.mul(b)
    }
    fn neg(&self, a: &ResElem) -> ResElem {
        a.neg()
    }
    fn inv(&self, a: &ResElem) -> Result<ResElem> {
        a.inv()
    }
    fn half(&self, a: &ResElem) -> Result<ResElem> {
        a.mul(&ResidueField::Rationals.from_ratio(1, 2)?)
    }
}

/// `(start, coefficients)` with no normalization.
type Dense<C> = (i64, Vec<C>);

fn coeff_at<R: CoeffRing>(r: &R, d: &Dense<R::C>, e: i64) -> R::C {
    let i = e - d.0;
    if i >= 0 && (i as usize) < d.1.len() {
        d.1[i as usize].clone()
    } else {
        r.zero()
    }
}

fn dense_add<R: CoeffRing>(
    r: &R,
    a: &Dense<R::C>,
    b: &Dense<R::C>,
    end: Option<i64>,
) -> Result<Dense<R::C>> {
    let ends = |d: &Dense<R::C>| d.0 + d.1.len() as i64;
    let start = match (a.1.is_empty(), b.1.is_empty()) {
        (true, true) => return Ok((0, Vec::new())),
        (true, false) => b.0,
        (false, true) => a.0,
        (false, false) => a.0.min(b.0),
    };
    let mut stop = ends(a).max(ends(b));
    if let Some(e) = end {
        stop = stop.min(e);
    }
    let mut out = Vec::with_capacity((stop - start).max(0) as usize);
    for e in start..stop {
        out.push(r.add(&coeff_at(r, a, e), &coeff_at(r, b, e))?);
    }
    Ok((start, out))
}

fn dense_mul<R: CoeffRing>(
    r: &R,
    a: &Dense<R::C>,
    b: &Dense<R::C>,
    end: Option<i64>,
) -> Result<Dense<R::C>> {
    if a.1.is_empty() || b.1.is_empty() {
        return Ok((0, Vec::new()));
    }
    let start = a.0 + b.0;
    let mut len = a.1.len() + b.1.len() - 1;
    if let Some(e) = end {
        len = len.min((e - start).max(0) as usize);
    }
    let mut out = vec![r.zero(); len];
    for (i, x) in a.1.iter().enumerate() {
        if i >= len || r.is_zero(x) {
            continue;
        }
        for (j, y) in b.1.iter().enumerate().take(len - i) {
            out[i + j] = r.add(&out[i + j], &r.mul(x, y)?)?;
        }
    }
    Ok((start, out))
}

/// Inverse of a unit power series `c[0] + c[1] t + ...` to `n` terms.
fn series_inv<R: CoeffRing>(r: &R, c: &[R::C], n: usize) -> Result<Vec<R::C>> {
    let c0inv = r.inv(&c[0])?;
    let mut out: Vec<R::C> = Vec::with_capacity(n);
    out.push(c0inv.clone());
    for k in 1..n {
        let mut acc = r.zero();
        for i in 1..=k.min(c.len() - 1) {
            acc = r.add(&acc, &r.mul(&c[i], &out[k - i])?)?;
        }
        out.push(r.mul(&r.neg(&acc), &c0inv)?);
    }
    Ok(out)
}

/// Square root of a unit power series with prescribed constant term root.
fn series_sqrt<R: CoeffRing>(r: &R, c: &[R::C], s0: R::C, n: usize) -> Result<Vec<R::C>> {
    let inv_2s0 = r.inv(&r.add(&s0, &s0)?)?;
    let mut out: Vec<R::C> = Vec::with_capacity(n);
    out.push(s0);
    for k in 1..n {
        let mut acc = if k < c.len() { c[k].clone() } else { r.zero() };
        for i in 1..k {
            acc = r.add(&acc, &r.neg(&r.mul(&out[i], &out[k - i])?))?;
        }
        out.push(r.mul(&acc, &inv_2s0)?);
    }
    Ok(out)
}

/// Element of `k((t))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laurent {
    field: ValuedField,
    /// Exponent of the first stored coefficient (nonzero when any are stored).
    start: i64,
    coeffs: Coeffs,
    /// Known modulo `t^prec`; `None` for exact values.
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

macro_rules! dispatch2 {
    ($a:expr, $b:expr, |$r:ident, $da:ident, $db:ident| $body:expr) => {
        match (&$a.coeffs, &$b.coeffs) {
            (Coeffs::Fp { p, c: ca }, Coeffs::Fp { c: cb, .. }) => {
                let $r = Fp(*p);
                let $da = ($a.start, ca.clone());
                let $db = ($b.start, cb.clone());
                $body.map(|(s, v)| (s, Coeffs::Fp { p: *p, c: v }))
            }
            (Coeffs::Q(ca), Coeffs::Q(cb)) => {
                let $r = Rat;
                let $da = ($a.start, ca.clone());
                let $db = ($b.start, cb.clone());
                $body.map(|(s, v)| (s, Coeffs::Q(v)))
            }
            _ => Err(Error::FieldMismatch),
        }
    };
}

impl Laurent {
    pub fn field(&self) -> ValuedField {
        self.field
    }

    /// Absolute precision (`None` = exact).
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Fp { c, .. } => c.len(),
            Coeffs::Q(c) => c.len(),
        }
    }

    fn normalized(mut self) -> Self {
        match &mut self.coeffs {
            Coeffs::Fp { c, .. } => {
                if let Some(end) = self.prec {
                    let keep = (end - self.start).clamp(0, c.len() as i64) as usize;
                    c.truncate(keep);
                }
                let lead = c.iter().position(|&x| x != 0).unwrap_or(c.len());
                c.drain(..lead);
                while c.last() == Some(&0) {
                    c.pop();
                }
                self.start += lead as i64;
                if c.is_empty() {
                    self.start = 0;
                }
            }
            Coeffs::Q(c) => {
                if let Some(end) = self.prec {
                    let keep = (end - self.start).clamp(0, c.len() as i64) as usize;
                    c.truncate(keep);
                }
                let lead = c.iter().position(|x| !x.is_zero()).unwrap_or(c.len());
                c.drain(..lead);
                while c.last().is_some_and(|x| x.is_zero()) {
                    c.pop();
                }
                self.start += lead as i64;
                if c.is_empty() {
                    self.start = 0;
                }
            }
        }
        self
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True only for the exact zero.
    pub fn is_exact_zero(&self) -> bool {
        self.len() == 0 && self.prec.is_none()
    }

    /// True for exact zero and for `O(t^P)`.
    pub fn is_zero_within_precision(&self) -> bool {
        self.len() == 0
    }

    /// Lower bound on the valuation: the valuation when certified nonzero, the
    /// precision for `O(t^P)`, `None` (= infinity) for exact zero.
    pub fn val_lower_bound(&self) -> Option<i64> {
        if self.len() > 0 {
            Some(self.start)
        } else {
            self.prec
        }
    }

    pub fn valuation(&self) -> Result<i64> {
        if self.len() > 0 {
            Ok(self.start)
        } else if self.prec.is_some() {
            Err(Error::PrecisionExhausted)
        } else {
            Err(Error::ZeroInput)
        }
    }

    /// Coefficient of `t^e` (zero outside the stored range).
    pub fn coeff(&self, e: i64) -> ResElem {
        let r = self.field.residue;
        let i = e - self.start;
        match &self.coeffs {
            Coeffs::Fp { c, .. } if i >= 0 && (i as usize) < c.len() => {
                r.from_int(c[i as usize] as i64)
            }
            Coeffs::Q(c) if i >= 0 && (i as usize) < c.len() => c[i as usize],
            _ => r.zero(),
        }
    }

    /// Stored coefficients as `(exponent, coefficient)` pairs, nonzero only.
    pub fn terms(&self) -> Vec<(i64, ResElem)> {
        (0..self.len() as i64)
            .map(|i| (self.start + i, self.coeff(self.start + i)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn leading_coeff(&self) -> Result<ResElem> {
        let v = self.valuation()?;
        Ok(self.coeff(v))
    }

    /// True if exactly `c t^e`.
    pub fn is_monomial(&self) -> bool {
        self.prec.is_none() && self.terms().len() == 1
    }

    fn with_dense(&self, (start, coeffs): (i64, Coeffs), prec: Option<i64>) -> Laurent {
        Laurent {
            field: self.field,
            start,
            coeffs,
            prec,
        }
        .normalized()
    }

    fn check_field(&self, rhs: &Laurent) -> Result<()> {
        if self.field.residue == rhs.field.residue {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, rhs: &Laurent) -> Result<Laurent> {
        self.check_field(rhs)?;
        let prec = min_prec(self.prec, rhs.prec);
        let dense = dispatch2!(self, rhs, |r, a, b| dense_add(&r, &a, &b, prec))?;
        Ok(self.with_dense(dense, prec))
    }

    pub fn neg(&self) -> Laurent {
        let coeffs = match &self.coeffs {
            Coeffs::Fp { p, c } => Coeffs::Fp {
                p: *p,
                c: c.iter().map(|x| (p - x) % p).collect(),
            },
            Coeffs::Q(c) => Coeffs::Q(c.iter().map(ResElem::neg).collect()),
        };
        Laurent {
            coeffs,
            ..self.clone()
        }
    }

    pub fn sub(&self, rhs: &Laurent) -> Result<Laurent> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Laurent) -> Result<Laurent> {
        self.check_field(rhs)?;
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return Ok(self.field.zero());
        }
        // the valuation of an O(t^P) factor is at least P
        let va = self.val_lower_bound().unwrap();
        let vb = rhs.val_lower_bound().unwrap();
        let prec = min_prec(self.prec.map(|p| p + vb), rhs.prec.map(|p| p + va));
        let dense = dispatch2!(self, rhs, |r, a, b| dense_mul(&r, &a, &b, prec))?;
        Ok(self.with_dense(dense, prec))
    }

    /// Multiply by a residue-field scalar.
    pub fn scale(&self, c: &ResElem) -> Result<Laurent> {
        self.mul(&self.field.constant(*c))
    }

    /// Multiply by `t^k` (exact shift).
    pub fn shift(&self, k: i64) -> Laurent {
        let mut out = self.clone();
        if out.len() > 0 {
            out.start += k;
        }
        out.prec = out.prec.map(|p| p + k);
        out
    }

    pub fn inv(&self) -> Result<Laurent> {
        if self.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = self.valuation()?;
        let rel = match self.prec {
            Some(p) => p - v,
            None if self.len() == 1 => {
                let c = self.leading_coeff()?.inv()?;
                return Ok(self.field.monomial(c, -v));
            }
            None => self.field.precision,
        };
        let n = rel.max(1) as usize;
        let coeffs = match &self.coeffs {
            Coeffs::Fp { p, c } => Coeffs::Fp {
                p: *p,
                c: series_inv(&Fp(*p), c, n)?,
            },
            Coeffs::Q(c) => Coeffs::Q(series_inv(&Rat, c, n)?),
        };
        Ok(Laurent {
            field: self.field,
            start: -v,
            coeffs,
            prec: Some(-v + rel),
        }
        .normalized())
    }

    pub fn div(&self, rhs: &Laurent) -> Result<Laurent> {
        self.mul(&rhs.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Laurent> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field.one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// Forget everything from `t^prec` on.
    pub fn truncate(&self, prec: i64) -> Laurent {
        let prec = min_prec(self.prec, Some(prec));
        Laurent {
            prec,
            ..self.clone()
        }
        .normalized()
    }

    /// `self - other` vanishes to the available precision.
    pub fn approx_eq(&self, other: &Laurent) -> bool {
        self.sub(other)
            .map(|d| d.is_zero_within_precision())
            .unwrap_or(false)
    }

    /// The residue (bar map) of an integral element.
    pub fn residue(&self) -> Result<ResElem> {
        match self.val_lower_bound() {
            None => Ok(self.field.residue.zero()),
            Some(v) if self.len() == 0 && v <= 0 => Err(Error::PrecisionExhausted),
            Some(v) if v < 0 => Err(Error::NegativeValuation),
            Some(_) => Ok(self.coeff(0)),
        }
    }

    /// `self * t^(-v)` where `v` is the valuation.
    pub fn unit_part(&self) -> Result<Laurent> {
        Ok(self.shift(-self.valuation()?))
    }

    pub fn square_class(&self) -> Result<SquareClassK> {
        let v = self.valuation()?;
        let unit = self.leading_coeff()?.square_class_rep()?;
        Ok(SquareClassK {
            unit,
            t_parity: v.rem_euclid(2) as u8,
        })
    }

    pub fn is_square(&self) -> Result<bool> {
        let v = self.valuation()?;
        Ok(v % 2 == 0 && self.leading_coeff()?.is_square()?)
    }

    /// Square root by coefficient recursion (Hensel); the leading coefficient
    /// uses the residue-field tie-break.
    pub fn hensel_sqrt(&self) -> Result<Laurent> {
        if self.is_exact_zero() {
            return Err(Error::ZeroInput);
        }
        if !self.is_square()? {
            return Err(Error::NotASquare);
        }
        let v = self.valuation()?;
        let s0 = self.leading_coeff()?.sqrt()?;
        if self.is_monomial() {
            return Ok(self.field.monomial(s0, v / 2));
        }
        let rel = match self.prec {
            Some(p) => p - v,
            None => self.field.precision,
        };
        let n = rel.max(1) as usize;
        let coeffs = match &self.coeffs {
            Coeffs::Fp { p, c } => Coeffs::Fp {
                p: *p,
                c: series_sqrt(&Fp(*p), c, s0.as_fp().unwrap(), n)?,
            },
            Coeffs::Q(c) => Coeffs::Q(series_sqrt(&Rat, c, s0, n)?),
        };
        Ok(Laurent {
            field: self.field,
            start: v / 2,
            coeffs,
            prec: Some(v / 2 + rel),
        }
        .normalized())
    }

    /// Halve (char != 2).
    pub fn half(&self) -> Result<Laurent> {
        let coeffs = match &self.coeffs {
            Coeffs::Fp { p, c } => {
                let r = Fp(*p);
                Coeffs::Fp {
                    p: *p,
                    c: c.iter().map(|x| r.half(x)).collect::<Result<_>>()?,
                }
            }
            Coeffs::Q(c) => Coeffs::Q(c.iter().map(|x| Rat.half(x)).collect::<Result<_>>()?),
        };
        Ok(Laurent {
            coeffs,
            ..self.clone()
        })
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return match self.prec {
                None => write!(f, "0"),
                Some(p) => write!(f, "O(t^{p})"),
            };
        }
        for (i, (e, c)) in terms.iter().enumerate() {
            let text = c.to_string();
            let (neg, mag) = match text.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, text),
            };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = match *e {
                0 => String::new(),
                1 => "t".to_string(),
                e => format!("t^{e}"),
            };
            match (mag == "1", mono.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        if let Some(p) = self.prec {
            write!(f, " + O(t^{p})")?;
        }
        Ok(())
    }
}

impl Serialize for Laurent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Parser<'a> {
    field: ValuedField,
    text: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.text.len()
            && (self.text[self.pos] == b'-' || self.text[self.pos] == b'+')
        {
            self.pos += 1;
        }
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.text[start..self.pos]).unwrap_or("");
        match s.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected integer")
            }
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.eat(b'^') {
            self.integer()
        } else {
            Ok(1)
        }
    }

    fn parse(mut self) -> Result<Laurent> {
        let mut acc = self.field.zero();
        let mut prec: Option<i64> = None;
        let mut first = true;
        loop {
            let negative = if self.eat(b'-') {
                true
            } else {
                if !self.eat(b'+') && !first {
                    break;
                }
                false
            };
            first = false;
            match self.peek() {
                Some(b'O') => {
                    self.pos += 1;
                    if !self.eat(b'(') || !self.eat(b't') {
                        return self.err("expected O(t^n)");
                    }
                    let e = self.exponent()?;
                    if !self.eat(b')') {
                        return self.err("expected ')'");
                    }
                    prec = Some(prec.map_or(e, |p: i64| p.min(e)));
                }
                Some(b't') => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    let c = self.field.residue.from_int(if negative { -1 } else { 1 });
                    acc = acc.add(&self.field.monomial(c, e))?;
                }
                Some(b) if b.is_ascii_digit() => {
                    let num = self.integer()?;
                    let den = if self.eat(b'/') { self.integer()? } else { 1 };
                    let mut c = self
                        .field
                        .residue
                        .from_ratio(num, den)
                        .map_err(|e| match e {
                            Error::DivisionByZero => Error::Parse {
                                pos: self.pos,
                                msg: "zero denominator".into(),
                            },
                            other => other,
                        })?;
                    if negative {
                        c = c.neg();
                    }
                    let e = if self.eat(b'*') {
                        if !self.eat(b't') {
                            return self.err("expected 't' after '*'");
                        }
                        self.exponent()?
                    } else {
                        0
                    };
                    acc = acc.add(&self.field.monomial(c, e))?;
                }
                _ => return self.err("expected term"),
            }
        }
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(match prec {
            Some(p) => acc.truncate(p),
            None => acc,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> ValuedField {
        ValuedField::prime(3).unwrap()
    }

    #[test]
    fn product_and_inverse() {
        let k = f3();
        let a = k.parse("1 + t").unwrap();
        let b = k.parse("1 - t").unwrap();
        assert_eq!(a.mul(&b).unwrap(), k.parse("1 - t^2").unwrap());
        assert_eq!(k.t().inv().unwrap(), k.parse("t^-1").unwrap());
        let inv = a.inv().unwrap();
        // geometric series 1 - t + t^2 - ... = 1 + 2t + t^2 + 2t^3 + ...
        for e in 0..8 {
            let want = if e % 2 == 0 { 1 } else { 2 };
            assert_eq!(inv.coeff(e).as_fp(), Some(want));
        }
        let check = a.mul(&inv).unwrap();
        assert!(check.approx_eq(&k.one()));
        assert_eq!(k.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn precision_propagation() {
        let k = f3();
        let a = k.parse("1 + t + O(t^10)").unwrap();
        let b = k.parse("t^2 + O(t^5)").unwrap();
        assert_eq!(a.add(&b).unwrap().prec(), Some(5));
        // min(0 + 5, 2 + 10)
        assert_eq!(a.mul(&b).unwrap().prec(), Some(5));
        let c = k.parse("t^3 + t^4 + O(t^9)").unwrap();
        // inverse: prec - 2 val
        assert_eq!(c.inv().unwrap().prec(), Some(3));
        let z = a.sub(&a).unwrap();
        assert!(z.is_zero_within_precision());
        assert!(!z.is_exact_zero());
        assert_eq!(z.valuation(), Err(Error::PrecisionExhausted));
        assert_eq!(z.inv(), Err(Error::PrecisionExhausted));
        assert_eq!(k.zero().valuation(), Err(Error::ZeroInput));
    }

    #[test]
    fn valuation_and_residue() {
        let k = f3();
        assert_eq!(k.t().valuation().unwrap(), 1);
        assert_eq!(k.parse("2*t^-3 + t").unwrap().valuation().unwrap(), -3);
        assert_eq!(
            k.parse("2 + t").unwrap().residue().unwrap().as_fp(),
            Some(2)
        );
        assert!(k.t().residue().unwrap().is_zero());
        assert_eq!(
            k.parse("t^-1").unwrap().residue(),
            Err(Error::NegativeValuation)
        );
    }

    #[test]
    fn square_classes() {
        let q = ValuedField::rationals();
        let c = q.parse("4*t^2").unwrap().square_class().unwrap();
        assert!(c.unit.is_one() && c.t_parity == 0);
        let k = f3();
        let c = k.parse("2*t").unwrap().square_class().unwrap();
        assert_eq!(c.unit.as_fp(), Some(2));
        assert_eq!(c.t_parity, 1);
        assert_eq!(k.square_classes().unwrap().len(), 4);
    }

    #[test]
    fn hensel_square_root() {
        let k = f3();
        let x = k.parse("1 + t").unwrap();
        let s = x.hensel_sqrt().unwrap();
        assert_eq!(s.coeff(0).as_fp(), Some(1));
        assert_eq!(s.coeff(1).as_fp(), Some(2));
        assert_eq!(s.coeff(2).as_fp(), Some(1));
        let resid = s.mul(&s).unwrap().sub(&x).unwrap();
        assert!(resid.is_zero_within_precision());
        assert!(resid.prec().unwrap() >= k.precision());
        assert_eq!(k.parse("2").unwrap().hensel_sqrt(), Err(Error::NotASquare));
        assert_eq!(k.parse("t").unwrap().hensel_sqrt(), Err(Error::NotASquare));
        assert_eq!(
            k.parse("t^4").unwrap().hensel_sqrt().unwrap(),
            k.parse("t^2").unwrap()
        );
    }

    #[test]
    fn parse_and_display_round_trip() {
        let k = f3();
        for s in [
            "2*t^-1 + 1 + 2*t^3",
            "t",
            "0",
            "1 + 2*t + O(t^7)",
            "O(t^4)",
            "t^-2",
        ] {
            let x = k.parse(s).unwrap();
            assert_eq!(k.parse(&x.to_string()).unwrap(), x, "{s}");
        }
        let q = ValuedField::rationals();
        let x = q.parse("3/4 - 1/2*t^2").unwrap();
        assert_eq!(x.to_string(), "3/4 - 1/2*t^2");
        assert_eq!(q.parse(&x.to_string()).unwrap(), x);
        assert!(matches!(k.parse("2 +"), Err(Error::Parse { .. })));
        assert!(matches!(k.parse("2 t"), Err(Error::Parse { .. })));
        assert!(matches!(k.parse("1/0"), Err(Error::Parse { .. })));
    }
}
