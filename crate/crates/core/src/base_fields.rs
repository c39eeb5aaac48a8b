//! Exact arithmetic over the residue fields `F_p`, `F_{p^2} = F_p(xbar)` and a
//! magnitude-bounded model of `Q`, plus quadratic-form invariants over the
//! finite ones.

use std::cmp::Ordering;
use std::fmt;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest numerator or denominator magnitude allowed in rational mode.
pub const RATIONAL_BOUND: i64 = i64::MAX;

/// Primes above this bound use Tonelli-Shanks instead of exhaustive search.
const EXHAUSTIVE_SQRT_LIMIT: u64 = 100;

/// Residue field descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResidueField {
    Prime {
        p: u64,
    },
    /// `F_p(xbar)` with `xbar^2 = abar`, `abar` a nonresidue mod `p`.
    QuadExt {
        p: u64,
        abar: u64,
    },
    Rationals,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn legendre_is_residue(v: u64, p: u64) -> bool {
    pow_mod(v, (p - 1) / 2, p) == 1
}

/// Smallest quadratic nonresidue modulo the odd prime `p`.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&v| !legendre_is_residue(v, p))
        .expect("odd prime has a nonresidue")
}

impl ResidueField {
    pub fn prime(p: u64) -> Result<Self> {
        if !(3..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(format!(
                "{p} is not an odd prime below 2^31"
            )));
        }
        Ok(ResidueField::Prime { p })
    }

    pub fn quad_ext(p: u64, abar: u64) -> Result<Self> {
        Self::prime(p)?;
        let abar = abar % p;
        if abar == 0 || legendre_is_residue(abar, p) {
            return Err(Error::InvalidField(format!(
                "{abar} is not a nonresidue mod {p}"
            )));
        }
        Ok(ResidueField::QuadExt { p, abar })
    }

    pub fn characteristic(&self) -> u64 {
        match *self {
            ResidueField::Prime { p } | ResidueField::QuadExt { p, .. } => p,
            ResidueField::Rationals => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, ResidueField::Rationals)
    }

    pub fn zero(&self) -> ResElem {
        let repr = match self {
            ResidueField::Prime { .. } => Repr::Fp(0),
            ResidueField::QuadExt { .. } => Repr::Fq(0, 0),
            ResidueField::Rationals => Repr::Q(0, 1),
        };
        ResElem { field: *self, repr }
    }

    pub fn one(&self) -> ResElem {
        self.from_int(1)
    }

    /// Image of an integer. Never fails for values within the rational bound.
    pub fn from_int(&self, n: i64) -> ResElem {
        let repr = match *self {
            ResidueField::Prime { p } => Repr::Fp(n.rem_euclid(p as i64) as u64),
            ResidueField::QuadExt { p, .. } => Repr::Fq(n.rem_euclid(p as i64) as u64, 0),
            ResidueField::Rationals => Repr::Q(n, 1),
        };
        ResElem { field: *self, repr }
    }

    /// Image of `num/den`; over `F_p` the denominator is inverted.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<ResElem> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        match self {
            ResidueField::Rationals => ResElem::rational(num as i128, den as i128),
            _ => self.from_int(num).div(&self.from_int(den)),
        }
    }

    /// `e0 + e1*xbar` in a quadratic extension.
    pub fn fq(&self, e0: i64, e1: i64) -> Result<ResElem> {
        match *self {
            ResidueField::QuadExt { p, .. } => Ok(ResElem {
                field: *self,
                repr: Repr::Fq(
                    e0.rem_euclid(p as i64) as u64,
                    e1.rem_euclid(p as i64) as u64,
                ),
            }),
            _ => Err(Error::UnsupportedField),
        }
    }

    /// The prime field underneath a quadratic extension (identity otherwise).
    pub fn base(&self) -> ResidueField {
        match *self {
            ResidueField::QuadExt { p, .. } => ResidueField::Prime { p },
            f => f,
        }
    }

    /// Number of elements, for finite fields.
    pub fn order(&self) -> Option<u64> {
        match *self {
            ResidueField::Prime { p } => Some(p),
            ResidueField::QuadExt { p, .. } => Some(p * p),
            ResidueField::Rationals => None,
        }
    }

    /// All elements in canonical order (finite fields only).
    pub fn elements(&self) -> Vec<ResElem> {
        match *self {
            ResidueField::Prime { p } => (0..p)
                .map(|v| ResElem {
                    field: *self,
                    repr: Repr::Fp(v),
                })
                .collect(),
            ResidueField::QuadExt { p, .. } => (0..p)
                .flat_map(|e0| (0..p).map(move |e1| (e0, e1)))
                .map(|(e0, e1)| ResElem {
                    field: *self,
                    repr: Repr::Fq(e0, e1),
                })
                .collect(),
            ResidueField::Rationals => Vec::new(),
        }
    }

    /// Fixed nonsquare used as the square-class representative `u`.
    pub fn nonsquare(&self) -> Result<ResElem> {
        match *self {
            ResidueField::Prime { p } => Ok(self.from_int(smallest_nonresidue(p) as i64)),
            ResidueField::QuadExt { .. } => self
                .elements()
                .into_iter()
                .find(|e| !e.is_zero() && !e.euler_is_square())
                .ok_or(Error::UnsupportedField),
            ResidueField::Rationals => Err(Error::UnsupportedField),
        }
    }
}

impl fmt::Display for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueField::Prime { p } => write!(f, "F_{p}"),
            ResidueField::QuadExt { p, abar } => write!(f, "F_{p}(sqrt {abar})"),
            ResidueField::Rationals => write!(f, "Q"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Repr {
    Fp(u64),
    Fq(u64, u64),
    /// Reduced fraction with positive denominator.
    Q(i64, i64),
}

/// Element of a [`ResidueField`] in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResElem {
    field: ResidueField,
    repr: Repr,
}

impl ResElem {
    fn rational(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let bound = RATIONAL_BOUND as i128;
        if n.abs() > bound || d > bound {
            return Err(Error::MagnitudeExceeded);
        }
        Ok(ResElem {
            field: ResidueField::Rationals,
            repr: Repr::Q(n as i64, d as i64),
        })
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match self.repr {
            Repr::Fp(v) => v == 0,
            Repr::Fq(a, b) => a == 0 && b == 0,
            Repr::Q(n, _) => n == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    /// Value in `[0, p)` for prime-field elements.
    pub fn as_fp(&self) -> Option<u64> {
        match self.repr {
            Repr::Fp(v) => Some(v),
            _ => None,
        }
    }

    /// Coordinates `(e0, e1)` w.r.t. `{1, xbar}`.
    pub fn fq_parts(&self) -> Option<(u64, u64)> {
        match self.repr {
            Repr::Fq(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_ratio(&self) -> Option<(i64, i64)> {
        match self.repr {
            Repr::Q(n, d) => Some((n, d)),
            _ => None,
        }
    }

    fn same_field(&self, rhs: &ResElem) -> Result<()> {
        if self.field == rhs.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, rhs: &ResElem) -> Result<ResElem> {
        self.same_field(rhs)?;
        let repr = match (self.repr, rhs.repr, self.field) {
            (Repr::Fp(a), Repr::Fp(b), ResidueField::Prime { p }) => Repr::Fp((a + b) % p),
            (Repr::Fq(a0, a1), Repr::Fq(b0, b1), ResidueField::QuadExt { p, .. }) => {
                Repr::Fq((a0 + b0) % p, (a1 + b1) % p)
            }
            (Repr::Q(an, ad), Repr::Q(bn, bd), _) => {
                return ResElem::rational(
                    an as i128 * bd as i128 + bn as i128 * ad as i128,
                    ad as i128 * bd as i128,
                )
            }
            _ => unreachable!("repr always matches its field"),
        };
        Ok(ResElem {
            field: self.field,
            repr,
        })
    }

    pub fn neg(&self) -> ResElem {
        let repr = match (self.repr, self.field) {
            (Repr::Fp(a), ResidueField::Prime { p }) => Repr::Fp((p - a) % p),
            (Repr::Fq(a0, a1), ResidueField::QuadExt { p, .. }) => {
                Repr::Fq((p - a0) % p, (p - a1) % p)
            }
            (Repr::Q(n, d), _) => Repr::Q(-n, d),
            _ => unreachable!("repr always matches its field"),
        };
        ResElem {
            field: self.field,
            repr,
        }
    }

    pub fn sub(&self, rhs: &ResElem) -> Result<ResElem> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &ResElem) -> Result<ResElem> {
        self.same_field(rhs)?;
        let repr = match (self.repr, rhs.repr, self.field) {
            (Repr::Fp(a), Repr::Fp(b), ResidueField::Prime { p }) => Repr::Fp(a * b % p),
            (Repr::Fq(a0, a1), Repr::Fq(b0, b1), ResidueField::QuadExt { p, abar }) => {
                let c0 = (a0 * b0 % p + abar * (a1 * b1 % p)) % p;
                let c1 = (a0 * b1 % p + a1 * b0 % p) % p;
                Repr::Fq(c0, c1)
            }
            (Repr::Q(an, ad), Repr::Q(bn, bd), _) => {
                return ResElem::rational(an as i128 * bn as i128, ad as i128 * bd as i128)
            }
            _ => unreachable!("repr always matches its field"),
        };
        Ok(ResElem {
            field: self.field,
            repr,
        })
    }

    pub fn inv(&self) -> Result<ResElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let repr = match (self.repr, self.field) {
            (Repr::Fp(a), ResidueField::Prime { p }) => Repr::Fp(pow_mod(a, p - 2, p)),
            (Repr::Fq(a0, a1), ResidueField::QuadExt { p, abar }) => {
                // (a0 - a1 xbar) / (a0^2 - abar a1^2)
                let norm = (a0 * a0 % p + p - abar * (a1 * a1 % p) % p) % p;
                let ninv = pow_mod(norm, p - 2, p);
                Repr::Fq(a0 * ninv % p, (p - a1) % p * ninv % p)
            }
            (Repr::Q(n, d), _) => return ResElem::rational(d as i128, n as i128),
            _ => unreachable!("repr always matches its field"),
        };
        Ok(ResElem {
            field: self.field,
            repr,
        })
    }

    pub fn div(&self, rhs: &ResElem) -> Result<ResElem> {
        self.same_field(rhs)?;
        self.mul(&rhs.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Result<ResElem> {
        let mut acc = self.field.one();
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Nontrivial automorphism `e0 + e1 xbar -> e0 - e1 xbar`; identity on other fields.
    pub fn conj(&self) -> ResElem {
        match (self.repr, self.field) {
            (Repr::Fq(a0, a1), ResidueField::QuadExt { p, .. }) => ResElem {
                field: self.field,
                repr: Repr::Fq(a0, (p - a1) % p),
            },
            _ => *self,
        }
    }

    /// Embed a prime-field element into the given quadratic extension.
    pub fn embed(&self, ext: ResidueField) -> Result<ResElem> {
        match (self.repr, ext) {
            (Repr::Fp(v), ResidueField::QuadExt { p, .. })
                if self.field == (ResidueField::Prime { p }) =>
            {
                Ok(ResElem {
                    field: ext,
                    repr: Repr::Fq(v, 0),
                })
            }
            _ if self.field == ext => Ok(*self),
            _ => Err(Error::FieldMismatch),
        }
    }

    /// Euler criterion; only meaningful for nonzero elements of finite fields.
    fn euler_is_square(&self) -> bool {
        match self.field.order() {
            Some(q) => self.pow((q - 1) / 2).map(|r| r.is_one()).unwrap_or(false),
            None => false,
        }
    }

    pub fn is_square(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        match self.repr {
            Repr::Q(n, d) => Ok(n > 0 && is_perfect_square(n) && is_perfect_square(d)),
            _ => Ok(self.euler_is_square()),
        }
    }

    /// Square root with the smaller canonical representative (positive over `Q`).
    pub fn sqrt(&self) -> Result<ResElem> {
        if !self.is_square()? {
            return Err(Error::NotASquare);
        }
        let root = match (self.repr, self.field) {
            (Repr::Q(n, d), _) => {
                return Ok(ResElem {
                    field: self.field,
                    repr: Repr::Q(n.sqrt(), d.sqrt()),
                })
            }
            (_, f) if f.characteristic() <= EXHAUSTIVE_SQRT_LIMIT => f
                .elements()
                .into_iter()
                .find(|r| r.mul(r).map(|s| s == *self).unwrap_or(false))
                .ok_or(Error::NotASquare)?,
            _ => self.tonelli_shanks()?,
        };
        let other = root.neg();
        Ok(if other.canonical_cmp(&root) == Ordering::Less {
            other
        } else {
            root
        })
    }

    fn tonelli_shanks(&self) -> Result<ResElem> {
        let q = self.field.order().ok_or(Error::UnsupportedField)?;
        let z = self.field.nonsquare()?;
        let mut s = q - 1;
        let mut e = 0u32;
        while s % 2 == 0 {
            s /= 2;
            e += 1;
        }
        let mut x = self.pow(s.div_ceil(2))?;
        let mut b = self.pow(s)?;
        let mut g = z.pow(s)?;
        let mut r = e;
        loop {
            if b.is_one() {
                return Ok(x);
            }
            let mut m = 0;
            let mut t = b;
            while !t.is_one() {
                t = t.mul(&t)?;
                m += 1;
                if m == r {
                    return Err(Error::NotASquare);
                }
            }
            let gs = g.pow(1 << (r - m - 1))?;
            g = gs.mul(&gs)?;
            x = x.mul(&gs)?;
            b = b.mul(&g)?;
            r = m;
        }
    }

    /// Total order on canonical representatives (used for deterministic tie-breaks).
    pub fn canonical_cmp(&self, other: &ResElem) -> Ordering {
        match (self.repr, other.repr) {
            (Repr::Fp(a), Repr::Fp(b)) => a.cmp(&b),
            (Repr::Fq(a0, a1), Repr::Fq(b0, b1)) => (a0, a1).cmp(&(b0, b1)),
            (Repr::Q(an, ad), Repr::Q(bn, bd)) => {
                (an as i128 * bd as i128).cmp(&(bn as i128 * ad as i128))
            }
            _ => Ordering::Equal,
        }
    }

    /// Canonical representative of the square class of a nonzero element:
    /// `1` or the fixed nonsquare over finite fields, the signed square-free
    /// part of `num*den` over `Q`.
    pub fn square_class_rep(&self) -> Result<ResElem> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        match self.repr {
            Repr::Q(n, d) => {
                let m = squarefree_part(n as i128 * d as i128);
                ResElem::rational(m, 1)
            }
            _ if self.is_square()? => Ok(self.field.one()),
            _ => self.field.nonsquare(),
        }
    }

    /// Norm to the prime field of an element of `F_p(xbar)`.
    pub fn norm(&self) -> Result<ResElem> {
        match (self.repr, self.field) {
            (Repr::Fq(..), ResidueField::QuadExt { p, .. }) => {
                let n = self.mul(&self.conj())?;
                Ok(ResElem {
                    field: ResidueField::Prime { p },
                    repr: Repr::Fp(n.fq_parts().unwrap().0),
                })
            }
            _ => Err(Error::UnsupportedField),
        }
    }
}

fn is_perfect_square(n: i64) -> bool {
    n >= 0 && {
        let r = n.sqrt();
        r * r == n
    }
}

/// Signed square-free part, by trial division.
fn squarefree_part(mut n: i128) -> i128 {
    let sign = if n < 0 { -1 } else { 1 };
    n = n.abs();
    let mut out = 1i128;
    let mut d = 2i128;
    while d * d <= n {
        let mut k = 0;
        while n % d == 0 {
            n /= d;
            k += 1;
        }
        if k % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    sign * out * n
}

impl fmt::Display for ResElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Fp(v) => write!(f, "{v}"),
            Repr::Fq(0, 0) => write!(f, "0"),
            Repr::Fq(a, 0) => write!(f, "{a}"),
            Repr::Fq(0, 1) => write!(f, "xbar"),
            Repr::Fq(0, b) => write!(f, "{b}*xbar"),
            Repr::Fq(a, 1) => write!(f, "{a} + xbar"),
            Repr::Fq(a, b) => write!(f, "{a} + {b}*xbar"),
            Repr::Q(n, 1) => write!(f, "{n}"),
            Repr::Q(n, d) => write!(f, "{n}/{d}"),
        }
    }
}

impl Serialize for ResElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Diagonal quadratic form over a residue field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadFormRes {
    pub field: ResidueField,
    pub entries: Vec<ResElem>,
}

impl QuadFormRes {
    pub fn new(field: ResidueField, entries: Vec<ResElem>) -> Result<Self> {
        for e in &entries {
            if e.field() != field {
                return Err(Error::FieldMismatch);
            }
            if e.is_zero() {
                return Err(Error::ZeroInput);
            }
        }
        Ok(QuadFormRes { field, entries })
    }

    pub fn empty(field: ResidueField) -> Self {
        QuadFormRes {
            field,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Orthogonal sum.
    pub fn perp(&self, other: &QuadFormRes) -> Result<QuadFormRes> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(QuadFormRes {
            field: self.field,
            entries,
        })
    }

    pub fn neg(&self) -> QuadFormRes {
        QuadFormRes {
            field: self.field,
            entries: self.entries.iter().map(ResElem::neg).collect(),
        }
    }

    /// Evaluate `sum d_i v_i^2`.
    pub fn eval(&self, v: &[ResElem]) -> Result<ResElem> {
        let mut acc = self.field.zero();
        for (d, x) in self.entries.iter().zip(v) {
            acc = acc.add(&d.mul(&x.mul(x)?)?)?;
        }
        Ok(acc)
    }
}

fn require_finite(field: ResidueField) -> Result<()> {
    if field.is_finite() {
        Ok(())
    } else {
        Err(Error::UnsupportedField)
    }
}

/// Isotropy over a finite field: every form of dimension at least 3 is
/// isotropic, a binary form `<d1, d2>` is isotropic iff `-d1 d2` is a square.
pub fn is_isotropic_quad_finite(q: &QuadFormRes) -> Result<bool> {
    require_finite(q.field)?;
    match q.entries.as_slice() {
        [] | [_] => Ok(false),
        [d1, d2] => d1.mul(d2)?.neg().is_square(),
        _ => Ok(true),
    }
}

/// Witt class of a quadratic form over a finite field, stored as
/// `(dim mod 2, signed discriminant mod squares)`; these four pairs are exactly
/// the four elements of `W(F_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WittClassQuad {
    pub field: ResidueField,
    pub rank_parity: u8,
    /// Square-class representative (`1` or the fixed nonsquare) of the signed
    /// discriminant of the anisotropic representative.
    pub disc: ResElem,
}

impl WittClassQuad {
    pub fn zero(field: ResidueField) -> Result<Self> {
        require_finite(field)?;
        Ok(WittClassQuad {
            field,
            rank_parity: 0,
            disc: field.one(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.rank_parity == 0 && self.disc.is_one()
    }

    /// Anisotropic diagonal representative of the class.
    pub fn representative(&self) -> Result<QuadFormRes> {
        let one = self.field.one();
        let entries = match (self.rank_parity, self.disc.is_one()) {
            (0, true) => vec![],
            (1, _) => vec![self.disc],
            // signed disc of <1, -d> is d
            _ => vec![one, self.disc.neg()],
        };
        QuadFormRes::new(self.field, entries)
    }

    pub fn add(&self, other: &WittClassQuad) -> Result<WittClassQuad> {
        witt_class_quad(&self.representative()?.perp(&other.representative()?)?)
    }

    pub fn neg(&self) -> Result<WittClassQuad> {
        witt_class_quad(&self.representative()?.neg())
    }
}

/// Reduce a form to its anisotropic part over a finite field by repeatedly
/// splitting off hyperbolic planes.
pub fn anisotropic_part(q: &QuadFormRes) -> Result<QuadFormRes> {
    require_finite(q.field)?;
    let mut entries: Vec<ResElem> = q
        .entries
        .iter()
        .map(|e| e.square_class_rep())
        .collect::<Result<_>>()?;
    // <a, b, c> is isotropic, hence H + <-abc>
    while entries.len() >= 3 {
        let c = entries.pop().unwrap();
        let b = entries.pop().unwrap();
        let a = entries.pop().unwrap();
        entries.push(a.mul(&b)?.mul(&c)?.neg().square_class_rep()?);
    }
    let reduced = QuadFormRes::new(q.field, entries)?;
    if reduced.dim() == 2 && is_isotropic_quad_finite(&reduced)? {
        return Ok(QuadFormRes::empty(q.field));
    }
    Ok(reduced)
}

/// Canonical Witt class of a quadratic form over `F_p` or `F_{p^2}`.
pub fn witt_class_quad(q: &QuadFormRes) -> Result<WittClassQuad> {
    let aniso = anisotropic_part(q)?;
    let field = q.field;
    let disc = match aniso.entries.as_slice() {
        [] => field.one(),
        [d] => *d,
        [d1, d2] => d1.mul(d2)?.neg().square_class_rep()?,
        _ => unreachable!("anisotropic forms over finite fields have dim <= 2"),
    };
    Ok(WittClassQuad {
        field,
        rank_parity: (aniso.dim() % 2) as u8,
        disc,
    })
}

/// Witt class of a hermitian form over `(F_{p^2}, conj)` with entries in `F_p`:
/// the norm is surjective, so the rank modulo 2 classifies.
pub fn witt_class_herm_quadext(field: ResidueField, entries: &[ResElem]) -> Result<u8> {
    if !matches!(field, ResidueField::QuadExt { .. }) {
        return Err(Error::UnsupportedField);
    }
    for e in entries {
        if e.field() != field {
            return Err(Error::FieldMismatch);
        }
        if e.is_zero() {
            return Err(Error::ZeroInput);
        }
        if e.conj() != *e {
            return Err(Error::EntryNotFixed);
        }
    }
    Ok((entries.len() % 2) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> ResidueField {
        ResidueField::prime(p).unwrap()
    }

    #[test]
    fn small_field_arithmetic() {
        let f3 = f(3);
        assert_eq!(f3.from_int(2).mul(&f3.from_int(2)).unwrap(), f3.one());
        let f9 = ResidueField::quad_ext(3, 2).unwrap();
        let xbar = f9.fq(0, 1).unwrap();
        assert_eq!(xbar.mul(&xbar).unwrap(), f9.fq(2, 0).unwrap());
        let f5 = f(5);
        // exhaustive inverse check
        let inv = f5.from_int(2).inv().unwrap();
        assert_eq!(inv, f5.from_int(3));
        for v in 1..5 {
            let e = f5.from_int(v);
            assert!(e.mul(&e.inv().unwrap()).unwrap().is_one());
        }
        assert_eq!(f5.zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(f3.one().add(&f5.one()), Err(Error::FieldMismatch));
    }

    #[test]
    fn rational_bound_enforced() {
        let q = ResidueField::Rationals;
        let big = q.from_int(1 << 40);
        assert_eq!(big.mul(&big), Err(Error::MagnitudeExceeded));
        assert_eq!(q.from_ratio(6, -4).unwrap().as_ratio(), Some((-3, 2)));
    }

    #[test]
    fn square_detection() {
        let f3 = f(3);
        assert!(!f3.from_int(2).is_square().unwrap());
        let f9 = ResidueField::quad_ext(3, 2).unwrap();
        let two = f9.fq(2, 0).unwrap();
        assert!(two.is_square().unwrap());
        assert_eq!(two.sqrt().unwrap(), f9.fq(0, 1).unwrap());
        let q = ResidueField::Rationals;
        let r = q.from_ratio(4, 9).unwrap();
        assert!(r.is_square().unwrap());
        assert_eq!(r.sqrt().unwrap(), q.from_ratio(2, 3).unwrap());
        assert_eq!(f3.zero().is_square(), Err(Error::ZeroInput));
        assert!(!q.from_int(-4).is_square().unwrap());
    }

    #[test]
    fn tonelli_shanks_large_prime() {
        // 1_000_003 is prime and exceeds the exhaustive-search limit
        let fp = f(1_000_003);
        for v in [2i64, 5, 17, 123_456, 999_999] {
            let e = fp.from_int(v);
            if e.is_square().unwrap() {
                let r = e.sqrt().unwrap();
                assert_eq!(r.mul(&r).unwrap(), e);
                assert!(r.as_fp().unwrap() <= 1_000_003 / 2);
            } else {
                assert_eq!(e.sqrt(), Err(Error::NotASquare));
            }
        }
        let fq = ResidueField::quad_ext(101, smallest_nonresidue(101)).unwrap();
        let e = fq.fq(7, 33).unwrap();
        let sq = e.mul(&e).unwrap();
        let r = sq.sqrt().unwrap();
        assert_eq!(r.mul(&r).unwrap(), sq);
    }

    #[test]
    fn witt_classes_over_f3() {
        let f3 = f(3);
        let form =
            |v: &[i64]| QuadFormRes::new(f3, v.iter().map(|&x| f3.from_int(x)).collect()).unwrap();
        assert!(witt_class_quad(&form(&[1, 2])).unwrap().is_zero());
        let c11 = witt_class_quad(&form(&[1, 1])).unwrap();
        assert_eq!(c11.rank_parity, 0);
        assert!(!c11.is_zero());
        assert!(witt_class_quad(&form(&[1, 1, 1, 1])).unwrap().is_zero());
    }

    #[test]
    fn isotropy_examples() {
        let f3 = f(3);
        let f5 = f(5);
        let form = |fld: ResidueField, v: &[i64]| {
            QuadFormRes::new(fld, v.iter().map(|&x| fld.from_int(x)).collect()).unwrap()
        };
        assert!(!is_isotropic_quad_finite(&form(f3, &[1, 1])).unwrap());
        assert!(is_isotropic_quad_finite(&form(f3, &[1, 1, 1])).unwrap());
        assert!(is_isotropic_quad_finite(&form(f5, &[1, 1])).unwrap());
        let q =
            QuadFormRes::new(ResidueField::Rationals, vec![ResidueField::Rationals.one()]).unwrap();
        assert_eq!(is_isotropic_quad_finite(&q), Err(Error::UnsupportedField));
        assert_eq!(witt_class_quad(&q), Err(Error::UnsupportedField));
    }

    #[test]
    fn hermitian_rank_parity() {
        let f9 = ResidueField::quad_ext(3, 2).unwrap();
        let one = f9.one();
        assert_eq!(witt_class_herm_quadext(f9, &[one]).unwrap(), 1);
        assert_eq!(
            witt_class_herm_quadext(f9, &[one, f9.from_int(2)]).unwrap(),
            0
        );
        assert_eq!(witt_class_herm_quadext(f9, &[]).unwrap(), 0);
        assert_eq!(
            witt_class_herm_quadext(f9, &[f9.fq(0, 1).unwrap()]),
            Err(Error::EntryNotFixed)
        );
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(12), 3);
        assert_eq!(squarefree_part(-18), -2);
        assert_eq!(squarefree_part(1), 1);
        let q = ResidueField::Rationals;
        assert_eq!(
            q.from_ratio(3, 4).unwrap().square_class_rep().unwrap(),
            q.from_int(3)
        );
        assert_eq!(
            q.from_ratio(-2, 3).unwrap().square_class_rep().unwrap(),
            q.from_int(-6)
        );
    }

    #[test]
    fn invalid_fields_rejected() {
        assert!(ResidueField::prime(2).is_err());
        assert!(ResidueField::prime(9).is_err());
        assert!(ResidueField::quad_ext(3, 1).is_err());
        assert_eq!(smallest_nonresidue(3), 2);
        assert_eq!(smallest_nonresidue(5), 2);
        assert_eq!(smallest_nonresidue(7), 3);
    }
}
