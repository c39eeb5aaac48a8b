//! Quaternion algebras `D = (a, b / K)` over `K = k((t))`.
//!
//! Elements are coordinate 4-tuples on the basis `{1, x, y, z}` with
//! `x^2 = a`, `y^2 = b`, `z = xy = -yx`.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::base_fields::{ResElem, ResidueField};
use crate::error::{Error, Result};
use crate::quad_forms::{is_anisotropic_quad_k, QuadFormK};
use crate::valued_field::{Laurent, ValuedField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Ramification {
    Unramified,
    Ramified,
}

/// A value of `nu_D`, stored as a numerator over 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    pub fn numerator(self) -> i64 {
        self.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `delta + alpha x + beta y + gamma z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatElem {
    pub delta: Laurent,
    pub alpha: Laurent,
    pub beta: Laurent,
    pub gamma: Laurent,
}

impl QuatElem {
    pub fn coords(&self) -> [&Laurent; 4] {
        [&self.delta, &self.alpha, &self.beta, &self.gamma]
    }

    pub fn from_coords([delta, alpha, beta, gamma]: [Laurent; 4]) -> QuatElem {
        QuatElem {
            delta,
            alpha,
            beta,
            gamma,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coords().iter().all(|c| c.is_exact_zero())
    }

    pub fn is_zero_within_precision(&self) -> bool {
        self.coords().iter().all(|c| c.is_zero_within_precision())
    }

    /// True if only the scalar coordinate can be nonzero.
    pub fn is_scalar(&self) -> bool {
        self.coords()[1..].iter().all(|c| c.is_exact_zero())
    }

    pub fn approx_eq(&self, other: &QuatElem) -> bool {
        self.coords()
            .iter()
            .zip(other.coords())
            .all(|(a, b)| a.approx_eq(b))
    }

    /// Smallest absolute precision among the coordinates.
    pub fn prec(&self) -> Option<i64> {
        self.coords().iter().filter_map(|c| c.prec()).min()
    }

    pub fn truncate(&self, prec: i64) -> QuatElem {
        QuatElem::from_coords(self.coords().map(|c| c.truncate(prec)))
    }

    /// Which basis vectors carry a coordinate that is not exactly zero.
    pub fn support(&self) -> [bool; 4] {
        self.coords().map(|c| !c.is_zero_within_precision())
    }
}

impl fmt::Display for QuatElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, name) in self.coords().iter().zip(["", "x", "y", "z"]) {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if name.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{name}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for QuatElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

/// The algebra `(a, b / K)` for a given presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatAlgebra {
    base: ValuedField,
    a: Laurent,
    b: Laurent,
    ab: Laurent,
    /// Set for division algebras in normalized presentation.
    ramification: Option<Ramification>,
}

impl Serialize for QuatAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuatAlgebra", 4)?;
        match self.base.residue() {
            ResidueField::Prime { p } => st.serialize_field("p", &p)?,
            _ => st.serialize_field("p", "Q")?,
        }
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("ramification", &self.ramification)?;
        st.end()
    }
}

impl QuatAlgebra {
    /// An arbitrary presentation; no division or normalization checks.
    pub fn presentation(a: Laurent, b: Laurent) -> Result<QuatAlgebra> {
        if a.field().residue() != b.field().residue() {
            return Err(Error::FieldMismatch);
        }
        if a.is_zero_within_precision() || b.is_zero_within_precision() {
            return Err(Error::ZeroInput);
        }
        let ab = a.mul(&b)?;
        Ok(QuatAlgebra {
            base: a.field(),
            a,
            b,
            ab,
            ramification: None,
        })
    }

    pub(crate) fn with_ramification(mut self, ram: Ramification) -> QuatAlgebra {
        self.ramification = Some(ram);
        self
    }

    pub fn base(&self) -> ValuedField {
        self.base
    }

    pub fn a(&self) -> &Laurent {
        &self.a
    }

    pub fn b(&self) -> &Laurent {
        &self.b
    }

    /// Ramification of a normalized division algebra.
    pub fn ramification(&self) -> Result<Ramification> {
        self.ramification.ok_or(Error::UnsupportedRamification)
    }

    pub fn is_ramified(&self) -> bool {
        self.ramification == Some(Ramification::Ramified)
    }

    /// Ramification index: 1 or 2.
    pub fn j(&self) -> Result<i64> {
        Ok(match self.ramification()? {
            Ramification::Unramified => 1,
            Ramification::Ramified => 2,
        })
    }

    pub fn elem(&self, delta: Laurent, alpha: Laurent, beta: Laurent, gamma: Laurent) -> QuatElem {
        QuatElem {
            delta,
            alpha,
            beta,
            gamma,
        }
    }

    pub fn zero(&self) -> QuatElem {
        self.scalar(self.base.zero())
    }

    pub fn one(&self) -> QuatElem {
        self.scalar(self.base.one())
    }

    pub fn scalar(&self, c: Laurent) -> QuatElem {
        let z = self.base.zero();
        QuatElem {
            delta: c,
            alpha: z.clone(),
            beta: z.clone(),
            gamma: z,
        }
    }

    /// Basis vector by index `0..4` for `1, x, y, z`.
    pub fn basis(&self, i: usize) -> QuatElem {
        let mut c: [Laurent; 4] = std::array::from_fn(|_| self.base.zero());
        c[i] = self.base.one();
        QuatElem::from_coords(c)
    }

    pub fn x(&self) -> QuatElem {
        self.basis(1)
    }

    pub fn y(&self) -> QuatElem {
        self.basis(2)
    }

    pub fn z(&self) -> QuatElem {
        self.basis(3)
    }

    /// Element from integer coordinates.
    pub fn from_ints(&self, c: [i64; 4]) -> QuatElem {
        QuatElem::from_coords(c.map(|n| self.base.int(n)))
    }

    pub fn add(&self, u: &QuatElem, v: &QuatElem) -> Result<QuatElem> {
        Ok(QuatElem {
            delta: u.delta.add(&v.delta)?,
            alpha: u.alpha.add(&v.alpha)?,
            beta: u.beta.add(&v.beta)?,
            gamma: u.gamma.add(&v.gamma)?,
        })
    }

    pub fn neg(&self, u: &QuatElem) -> QuatElem {
        QuatElem::from_coords(u.coords().map(Laurent::neg))
    }

    pub fn sub(&self, u: &QuatElem, v: &QuatElem) -> Result<QuatElem> {
        self.add(u, &self.neg(v))
    }

    pub fn scale(&self, c: &Laurent, u: &QuatElem) -> Result<QuatElem> {
        Ok(QuatElem {
            delta: c.mul(&u.delta)?,
            alpha: c.mul(&u.alpha)?,
            beta: c.mul(&u.beta)?,
            gamma: c.mul(&u.gamma)?,
        })
    }

    pub fn mul(&self, u: &QuatElem, v: &QuatElem) -> Result<QuatElem> {
        let (d1, a1, b1, g1) = (&u.delta, &u.alpha, &u.beta, &u.gamma);
        let (d2, a2, b2, g2) = (&v.delta, &v.alpha, &v.beta, &v.gamma);
        let m = |p: &Laurent, q: &Laurent| p.mul(q);
        let delta = m(d1, d2)?
            .add(&self.a.mul(&m(a1, a2)?)?)?
            .add(&self.b.mul(&m(b1, b2)?)?)?
            .sub(&self.ab.mul(&m(g1, g2)?)?)?;
        let alpha = m(d1, a2)?
            .add(&m(a1, d2)?)?
            .add(&self.b.mul(&m(g1, b2)?.sub(&m(b1, g2)?)?)?)?;
        let beta = m(d1, b2)?
            .add(&m(b1, d2)?)?
            .add(&self.a.mul(&m(a1, g2)?.sub(&m(g1, a2)?)?)?)?;
        let gamma = m(d1, g2)?
            .add(&m(g1, d2)?)?
            .add(&m(a1, b2)?)?
            .sub(&m(b1, a2)?)?;
        Ok(QuatElem {
            delta,
            alpha,
            beta,
            gamma,
        })
    }

    /// Product of a sequence, left to right.
    pub fn product(&self, factors: &[&QuatElem]) -> Result<QuatElem> {
        let mut acc = self.one();
        for f in factors {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    /// Canonical involution: negate the pure part.
    pub fn tau(&self, u: &QuatElem) -> QuatElem {
        QuatElem {
            delta: u.delta.clone(),
            alpha: u.alpha.neg(),
            beta: u.beta.neg(),
            gamma: u.gamma.neg(),
        }
    }

    pub fn nrd(&self, u: &QuatElem) -> Result<Laurent> {
        let sq = |c: &Laurent| c.mul(c);
        sq(&u.delta)?
            .sub(&self.a.mul(&sq(&u.alpha)?)?)?
            .sub(&self.b.mul(&sq(&u.beta)?)?)?
            .add(&self.ab.mul(&sq(&u.gamma)?)?)
    }

    pub fn trd(&self, u: &QuatElem) -> Result<Laurent> {
        u.delta.add(&u.delta)
    }

    pub fn inv(&self, u: &QuatElem) -> Result<QuatElem> {
        if u.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.nrd(u)?.inv()?;
        self.scale(&n, &self.tau(u))
    }

    /// Scalar coordinate of `u * tau(v)`: the polar form of `Nrd`.
    pub fn norm_pairing(&self, u: &QuatElem, v: &QuatElem) -> Result<Laurent> {
        Ok(self.mul(u, &self.tau(v))?.delta)
    }

    /// `nu_D(u) = nu_K(Nrd u) / 2`, in half-units.
    pub fn valuation_d(&self, u: &QuatElem) -> Result<HalfInt> {
        if u.is_exact_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(HalfInt(self.nrd(u)?.valuation()?))
    }

    /// Lower bound for `nu_D(u)` from the coordinates (exact for normalized
    /// division algebras when the minimum is attained by a certified term);
    /// `None` for exact zero.
    pub fn val_lower_bound_d(&self, u: &QuatElem) -> Option<i64> {
        let va = self.a.valuation().unwrap_or(0);
        let vb = self.b.valuation().unwrap_or(0);
        let offsets = [0, va, vb, va + vb];
        u.coords()
            .iter()
            .zip(offsets)
            .filter_map(|(c, o)| c.val_lower_bound().map(|v| 2 * v + o))
            .min()
    }

    /// Residue field of the center of the residue algebra of a ramified
    /// algebra, `k(xbar)`, when `k` is finite.
    pub fn residue_quad_ext(&self) -> Result<ResidueField> {
        match self.base.residue() {
            ResidueField::Prime { p } => {
                ResidueField::quad_ext(p, self.a.residue()?.as_fp().unwrap())
            }
            _ => Err(Error::UnsupportedField),
        }
    }

    pub fn res_algebra(&self) -> Result<ResAlgebra> {
        let abar = self.a.residue()?;
        Ok(match self.ramification()? {
            Ramification::Unramified => ResAlgebra::Quat {
                abar,
                bbar: self.b.residue()?,
            },
            Ramification::Ramified => ResAlgebra::Ext { abar },
        })
    }

    /// Image in the residue algebra of an integral element.
    pub fn residue_d(&self, u: &QuatElem) -> Result<ResAlgebraElem> {
        let alg = self.res_algebra()?;
        // integrality of every coordinate is equivalent to integrality in D
        let r = u.coords().map(|c| c.residue());
        if let Some(Err(e)) = r.iter().find(|c| c.is_err()) {
            return Err(e.clone());
        }
        let r = r.map(|c| c.unwrap());
        Ok(match alg {
            ResAlgebra::Quat { abar, bbar } => ResAlgebraElem::Quat { abar, bbar, c: r },
            ResAlgebra::Ext { abar } => ResAlgebraElem::Ext {
                abar,
                c: [r[0], r[1]],
            },
        })
    }

    /// Lift a residue element by taking its coordinates as constants.
    pub fn lift_residue(&self, r: &ResAlgebraElem) -> QuatElem {
        let k = &self.base;
        match r {
            ResAlgebraElem::Quat { c, .. } => QuatElem::from_coords(c.map(|e| k.constant(e))),
            ResAlgebraElem::Ext { c, .. } => QuatElem {
                delta: k.constant(c[0]),
                alpha: k.constant(c[1]),
                beta: k.zero(),
                gamma: k.zero(),
            },
        }
    }

    /// Norm form `<1, -a, -b, ab>`.
    pub fn norm_form(&self) -> Result<QuadFormK> {
        QuadFormK::new(
            self.base,
            vec![self.base.one(), self.a.neg(), self.b.neg(), self.ab.clone()],
        )
    }
}

/// Residue algebra: `(abar, bbar / k)` or the field `k(xbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ResAlgebra {
    Quat { abar: ResElem, bbar: ResElem },
    Ext { abar: ResElem },
}

/// Element of the residue algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResAlgebraElem {
    /// Coordinates on `1, xbar, ybar, zbar` in `(abar, bbar / k)`.
    Quat {
        abar: ResElem,
        bbar: ResElem,
        c: [ResElem; 4],
    },
    /// `c0 + c1 xbar` in `k(xbar)`.
    Ext { abar: ResElem, c: [ResElem; 2] },
}

impl ResAlgebraElem {
    pub fn one(alg: &ResAlgebra) -> ResAlgebraElem {
        match *alg {
            ResAlgebra::Quat { abar, bbar } => {
                let (o, z) = (abar.field().one(), abar.field().zero());
                ResAlgebraElem::Quat {
                    abar,
                    bbar,
                    c: [o, z, z, z],
                }
            }
            ResAlgebra::Ext { abar } => ResAlgebraElem::Ext {
                abar,
                c: [abar.field().one(), abar.field().zero()],
            },
        }
    }

    pub fn coords(&self) -> Vec<ResElem> {
        match self {
            ResAlgebraElem::Quat { c, .. } => c.to_vec(),
            ResAlgebraElem::Ext { c, .. } => c.to_vec(),
        }
    }

    fn with_coords(&self, v: &[ResElem]) -> ResAlgebraElem {
        match *self {
            ResAlgebraElem::Quat { abar, bbar, .. } => ResAlgebraElem::Quat {
                abar,
                bbar,
                c: [v[0], v[1], v[2], v[3]],
            },
            ResAlgebraElem::Ext { abar, .. } => ResAlgebraElem::Ext {
                abar,
                c: [v[0], v[1]],
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(ResElem::is_zero)
    }

    pub fn add(&self, o: &ResAlgebraElem) -> Result<ResAlgebraElem> {
        let v = self
            .coords()
            .iter()
            .zip(o.coords())
            .map(|(a, b)| a.add(&b))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with_coords(&v))
    }

    pub fn neg(&self) -> ResAlgebraElem {
        let v: Vec<ResElem> = self.coords().iter().map(ResElem::neg).collect();
        self.with_coords(&v)
    }

    pub fn sub(&self, o: &ResAlgebraElem) -> Result<ResAlgebraElem> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ResAlgebraElem) -> Result<ResAlgebraElem> {
        match (self, o) {
            (
                ResAlgebraElem::Quat {
                    abar: a,
                    bbar: b,
                    c: u,
                },
                ResAlgebraElem::Quat { c: v, .. },
            ) => {
                let ab = a.mul(b)?;
                let m = |p: &ResElem, q: &ResElem| p.mul(q);
                let d = m(&u[0], &v[0])?
                    .add(&a.mul(&m(&u[1], &v[1])?)?)?
                    .add(&b.mul(&m(&u[2], &v[2])?)?)?
                    .sub(&ab.mul(&m(&u[3], &v[3])?)?)?;
                let x = m(&u[0], &v[1])?
                    .add(&m(&u[1], &v[0])?)?
                    .add(&b.mul(&m(&u[3], &v[2])?.sub(&m(&u[2], &v[3])?)?)?)?;
                let y = m(&u[0], &v[2])?
                    .add(&m(&u[2], &v[0])?)?
                    .add(&a.mul(&m(&u[1], &v[3])?.sub(&m(&u[3], &v[1])?)?)?)?;
                let z = m(&u[0], &v[3])?
                    .add(&m(&u[3], &v[0])?)?
                    .add(&m(&u[1], &v[2])?)?
                    .sub(&m(&u[2], &v[1])?)?;
                Ok(self.with_coords(&[d, x, y, z]))
            }
            (ResAlgebraElem::Ext { abar, c: u }, ResAlgebraElem::Ext { c: v, .. }) => {
                let c0 = u[0].mul(&v[0])?.add(&abar.mul(&u[1].mul(&v[1])?)?)?;
                let c1 = u[0].mul(&v[1])?.add(&u[1].mul(&v[0])?)?;
                Ok(self.with_coords(&[c0, c1]))
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    /// Conjugation: negate every non-scalar coordinate (`tau bar` on the
    /// quaternion residue, the nontrivial automorphism on `k(xbar)`).
    pub fn conj(&self) -> ResAlgebraElem {
        let mut v = self.coords();
        for c in v.iter_mut().skip(1) {
            *c = c.neg();
        }
        self.with_coords(&v)
    }

    /// As an element of `F_{p^2}` (ramified case, finite `k`).
    pub fn to_quad_ext(&self) -> Result<ResElem> {
        match self {
            ResAlgebraElem::Ext { abar, c } => {
                let p = abar.field().characteristic();
                let ext = ResidueField::quad_ext(p, abar.as_fp().ok_or(Error::UnsupportedField)?)?;
                ext.fq(c[0].as_fp().unwrap() as i64, c[1].as_fp().unwrap() as i64)
            }
            _ => Err(Error::UnsupportedField),
        }
    }
}

impl fmt::Display for ResAlgebraElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "xbar", "ybar", "zbar"];
        let mut first = true;
        for (c, n) in self.coords().iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (n.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => write!(f, "{n}")?,
                (false, false) => write!(f, "({c})*{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for ResAlgebraElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Change of presentation between two models of the same algebra, recorded
/// as the images of the target basis vectors `x'`, `y'` in source
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraIso {
    pub source: QuatAlgebra,
    pub target: QuatAlgebra,
    pub x_img: QuatElem,
    pub y_img: QuatElem,
}

impl AlgebraIso {
    pub fn identity(alg: &QuatAlgebra) -> AlgebraIso {
        AlgebraIso {
            source: alg.clone(),
            target: alg.clone(),
            x_img: alg.x(),
            y_img: alg.y(),
        }
    }

    fn z_img(&self) -> Result<QuatElem> {
        self.source.mul(&self.x_img, &self.y_img)
    }

    /// Source coordinates of a target element.
    pub fn to_source(&self, u: &QuatElem) -> Result<QuatElem> {
        let s = &self.source;
        let mut acc = s.scalar(u.delta.clone());
        acc = s.add(&acc, &s.scale(&u.alpha, &self.x_img)?)?;
        acc = s.add(&acc, &s.scale(&u.beta, &self.y_img)?)?;
        s.add(&acc, &s.scale(&u.gamma, &self.z_img()?)?)
    }

    /// Target coordinates of a source element, by orthogonal projection
    /// onto the target basis with respect to the norm form.
    pub fn to_target(&self, u: &QuatElem) -> Result<QuatElem> {
        let s = &self.source;
        let t = &self.target;
        let nx = t.a.neg();
        let ny = t.b.neg();
        let nz = t.ab.clone();
        let coord = |e: &QuatElem, n: &Laurent| -> Result<Laurent> { s.norm_pairing(u, e)?.div(n) };
        Ok(QuatElem {
            delta: u.delta.clone(),
            alpha: coord(&self.x_img, &nx)?,
            beta: coord(&self.y_img, &ny)?,
            gamma: coord(&self.z_img()?, &nz)?,
        })
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &AlgebraIso) -> Result<AlgebraIso> {
        Ok(AlgebraIso {
            source: self.source.clone(),
            target: next.target.clone(),
            x_img: self.to_source(&next.x_img)?,
            y_img: self.to_source(&next.y_img)?,
        })
    }

    /// Check `x'^2 = a'`, `y'^2 = b'`, `x'y' = -y'x'` in the source.
    pub fn verify(&self) -> Result<bool> {
        let s = &self.source;
        let xx = s.mul(&self.x_img, &self.x_img)?;
        let yy = s.mul(&self.y_img, &self.y_img)?;
        let xy = s.mul(&self.x_img, &self.y_img)?;
        let yx = s.mul(&self.y_img, &self.x_img)?;
        Ok(xx.approx_eq(&s.scalar(self.target.a.clone()))
            && yy.approx_eq(&s.scalar(self.target.b.clone()))
            && s.add(&xy, &yx)?.is_zero_within_precision())
    }
}

/// Rescale a basis vector `e` with `e^2 = c` so its square is the canonical
/// square-class representative `c'`; returns `(c', e / sqrt(c / c'))`.
pub(crate) fn reduce_square(
    alg: &QuatAlgebra,
    e: &QuatElem,
    c: &Laurent,
) -> Result<(Laurent, QuatElem)> {
    let rep = c.field().square_class_element(&c.square_class()?);
    let s = c.div(&rep)?.hensel_sqrt()?;
    Ok((rep, alg.scale(&s.inv()?, e)?))
}

/// Bring `(a_raw, b_raw / K)` to the form `nu(a) = 0`, `nu(b) in {0, 1}`
/// with `a`, `b` canonical square-class representatives, and check that it
/// is a division algebra. Over `Q` division cannot be decided here and must
/// be asserted with `assume_division`.
pub fn normalize_presentation(
    a_raw: &Laurent,
    b_raw: &Laurent,
    assume_division: bool,
) -> Result<AlgebraIso> {
    let src = QuatAlgebra::presentation(a_raw.clone(), b_raw.clone())?;
    let (mut a, mut xi) = reduce_square(&src, &src.x(), a_raw)?;
    let (mut b, mut yi) = reduce_square(&src, &src.y(), b_raw)?;
    if a.valuation()? % 2 != 0 && b.valuation()? % 2 != 0 {
        // (a, b) = (a, -ab) via y' = xy
        let zi = src.mul(&xi, &yi)?;
        let (b2, y2) = reduce_square(&src, &zi, &a.mul(&b)?.neg())?;
        b = b2;
        yi = y2;
    }
    if a.valuation()? % 2 != 0 {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut xi, &mut yi);
    }
    let mut target = QuatAlgebra::presentation(a, b)?;
    check_division(&target, assume_division)?;
    target.ramification = Some(if target.b.valuation()? == 0 {
        Ramification::Unramified
    } else {
        Ramification::Ramified
    });
    Ok(AlgebraIso {
        source: src,
        target,
        x_img: xi,
        y_img: yi,
    })
}

fn check_division(alg: &QuatAlgebra, assume_division: bool) -> Result<()> {
    if alg.base.residue().is_finite() {
        return if is_anisotropic_quad_k(&alg.norm_form()?)? {
            Ok(())
        } else {
            Err(Error::SplitAlgebra)
        };
    }
    // a square among a, b, -ab splits the algebra outright
    for c in [&alg.a, &alg.b, &alg.ab.neg()] {
        if c.is_square()? {
            return Err(Error::SplitAlgebra);
        }
    }
    if assume_division {
        Ok(())
    } else {
        Err(Error::UndecidableDivision)
    }
}

/// Normalized division algebra from a presentation (discarding the change
/// of basis).
pub fn division_algebra(a: &Laurent, b: &Laurent, assume_division: bool) -> Result<QuatAlgebra> {
    Ok(normalize_presentation(a, b, assume_division)?.target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> ValuedField {
        ValuedField::prime(3).unwrap()
    }

    fn ram3() -> QuatAlgebra {
        let k = f3();
        division_algebra(&k.int(2), &k.t(), false).unwrap()
    }

    #[test]
    fn defining_relations() {
        let d = ram3();
        assert_eq!(d.mul(&d.x(), &d.y()).unwrap(), d.z());
        assert_eq!(d.mul(&d.y(), &d.x()).unwrap(), d.neg(&d.z()));
        assert_eq!(d.mul(&d.x(), &d.x()).unwrap(), d.scalar(d.a().clone()));
        assert_eq!(d.nrd(&d.y()).unwrap(), d.base().parse("2*t").unwrap());
        let u = d.from_ints([1, 2, 0, 1]);
        let prod = d.mul(&u, &d.inv(&u).unwrap()).unwrap();
        assert!(prod.approx_eq(&d.one()));
    }

    #[test]
    fn valuations() {
        let d = ram3();
        assert_eq!(d.valuation_d(&d.y()).unwrap(), HalfInt(1));
        assert_eq!(d.valuation_d(&d.x()).unwrap(), HalfInt(0));
        assert_eq!(d.valuation_d(&d.one()).unwrap(), HalfInt(0));
        assert_eq!(d.valuation_d(&d.zero()), Err(Error::ZeroInput));
        assert_eq!(d.ramification().unwrap(), Ramification::Ramified);
        assert_eq!(d.j().unwrap(), 2);
    }

    #[test]
    fn residues() {
        let d = ram3();
        let k = d.base();
        let r = d.residue_d(&d.y()).unwrap();
        assert!(r.is_zero());
        let u = d.elem(
            k.parse("2 + t").unwrap(),
            k.parse("1 + t").unwrap(),
            k.zero(),
            k.zero(),
        );
        let r = d.residue_d(&u).unwrap();
        let f9 = ResidueField::quad_ext(3, 2).unwrap();
        assert_eq!(r.to_quad_ext().unwrap(), f9.fq(2, 1).unwrap());
        let v = d.scale(&k.parse("t^-1").unwrap(), &d.x()).unwrap();
        assert_eq!(d.residue_d(&v), Err(Error::NegativeValuation));
    }

    #[test]
    fn presentation_normalization() {
        let k = f3();
        let iso = normalize_presentation(&k.t(), &k.t(), false).unwrap();
        assert_eq!(iso.target.a(), &k.int(2));
        assert_eq!(iso.target.b().valuation().unwrap(), 1);
        assert!(iso.verify().unwrap());
        let u = iso.source.from_ints([1, 2, 1, 1]);
        let back = iso.to_source(&iso.to_target(&u).unwrap()).unwrap();
        assert!(back.approx_eq(&u));
        assert_eq!(
            normalize_presentation(&k.one(), &k.t(), false),
            Err(Error::SplitAlgebra)
        );
        let q = ValuedField::rationals();
        assert_eq!(
            normalize_presentation(&q.int(-1), &q.int(-1), false),
            Err(Error::UndecidableDivision)
        );
        let h = normalize_presentation(&q.int(-1), &q.int(-1), true)
            .unwrap()
            .target;
        assert_eq!(h.ramification().unwrap(), Ramification::Unramified);
        assert_eq!(
            normalize_presentation(&q.int(4), &q.int(-1), true),
            Err(Error::SplitAlgebra)
        );
    }

    #[test]
    fn scaled_generators() {
        // a = 3 t^2 (1 + t) over F_5((t)) needs a Hensel square root
        let k = ValuedField::prime(5).unwrap();
        let a = k.parse("3*t^2 + 3*t^3").unwrap();
        let iso = normalize_presentation(&a, &k.t(), false).unwrap();
        assert!(iso.verify().unwrap());
        assert_eq!(iso.target.a(), &k.int(2));
    }
}
